#ifndef RDLAB_STATS_HPP
#define RDLAB_STATS_HPP

#include <cstddef>
#include <functional>

namespace rdlab {

// Binomial proportion estimate with an exact Clopper-Pearson interval.
struct BinomialEstimate {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;

  double half_width() const { return (ci_high - ci_low) / 2.0; }
};

BinomialEstimate binomial_estimate(std::size_t successes, std::size_t trials,
                                   double confidence = 0.95);

// Sample mean with a normal-approximation interval.
struct MeanEstimate {
  std::size_t count = 0;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

MeanEstimate mean_estimate(const double* values, std::size_t count,
                           double confidence = 0.95);

// Runs fn(i) for i in [0, count) on up to `workers` threads. workers == 0
// picks the hardware count. Results must be written to disjoint slots; the
// call returns after all indices complete. Exceptions from fn are rethrown.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace rdlab

#endif  // RDLAB_STATS_HPP
