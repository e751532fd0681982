#include "rdlab/stats.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>

namespace rdlab {

BinomialEstimate binomial_estimate(std::size_t successes, std::size_t trials,
                                   double confidence) {
  if (trials == 0) throw std::invalid_argument("binomial_estimate: trials must be > 0");
  if (successes > trials)
    throw std::invalid_argument("binomial_estimate: successes > trials");
  const double alpha = 1.0 - confidence;
  BinomialEstimate e;
  e.successes = successes;
  e.trials = trials;
  e.estimate = static_cast<double>(successes) / static_cast<double>(trials);
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  if (successes == 0) {
    e.ci_low = 0.0;
  } else {
    boost::math::beta_distribution<double> lo(k, n - k + 1.0);
    e.ci_low = boost::math::quantile(lo, alpha / 2.0);
  }
  if (successes == trials) {
    e.ci_high = 1.0;
  } else {
    boost::math::beta_distribution<double> hi(k + 1.0, n - k);
    e.ci_high = boost::math::quantile(hi, 1.0 - alpha / 2.0);
  }
  return e;
}

MeanEstimate mean_estimate(const double* values, std::size_t count, double confidence) {
  if (count == 0) throw std::invalid_argument("mean_estimate: empty sample");
  MeanEstimate e;
  e.count = count;
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) sum += values[i];
  e.mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double d = values[i] - e.mean;
    ss += d * d;
  }
  const double var = count > 1 ? ss / static_cast<double>(count - 1) : 0.0;
  const double se = std::sqrt(var / static_cast<double>(count));
  boost::math::normal_distribution<double> norm;
  const double z = boost::math::quantile(norm, 1.0 - (1.0 - confidence) / 2.0);
  e.ci_low = e.mean - z * se;
  e.ci_high = e.mean + z * se;
  return e;
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (workers == 0) workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min(workers, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(body);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rdlab
