#include "rdlab/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace rdlab {

namespace {

void check_same_alphabet(const Alphabet& a, const Alphabet& b, const char* where) {
  if (a != b) throw std::invalid_argument(std::string(where) + ": alphabet mismatch");
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw std::invalid_argument("Alphabet: needs at least one symbol");
  if (symbols_.size() > 256) throw std::invalid_argument("Alphabet: at most 256 symbols");
  std::unordered_set<std::string> seen;
  for (const auto& s : symbols_) {
    if (!seen.insert(s).second)
      throw std::invalid_argument("Alphabet: duplicate symbol '" + s + "'");
  }
}

Alphabet Alphabet::indexed(std::size_t size) {
  std::vector<std::string> syms;
  syms.reserve(size);
  for (std::size_t i = 0; i < size; ++i) syms.push_back(std::to_string(i));
  return Alphabet(std::move(syms));
}

std::optional<std::size_t> Alphabet::index_of(const std::string& s) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] == s) return i;
  }
  return std::nullopt;
}

Distribution::Distribution(Alphabet alphabet, std::vector<double> probs)
    : alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
  if (probs_.size() != alphabet_.size())
    throw std::invalid_argument("Distribution: probs/alphabet size mismatch");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("Distribution: probabilities must be >= 0 and finite");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbSumTol)
    throw std::invalid_argument("Distribution: probabilities sum to " + std::to_string(sum));
}

Distribution Distribution::uniform(const Alphabet& alphabet) {
  return Distribution(alphabet,
                      std::vector<double>(alphabet.size(), 1.0 / alphabet.size()));
}

Distribution Distribution::point_mass(const Alphabet& alphabet, std::size_t index) {
  if (index >= alphabet.size())
    throw std::invalid_argument("point_mass: index out of range");
  std::vector<double> p(alphabet.size(), 0.0);
  p[index] = 1.0;
  return Distribution(alphabet, std::move(p));
}

JointDistribution::JointDistribution(Alphabet row_alphabet, Alphabet col_alphabet,
                                     std::vector<std::vector<double>> probs)
    : row_(std::move(row_alphabet)), col_(std::move(col_alphabet)), probs_(std::move(probs)) {
  if (probs_.size() != row_.size())
    throw std::invalid_argument("JointDistribution: row count mismatch");
  double sum = 0.0;
  for (const auto& row : probs_) {
    if (row.size() != col_.size())
      throw std::invalid_argument("JointDistribution: column count mismatch");
    for (double p : row) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw std::invalid_argument("JointDistribution: entries must be >= 0 and finite");
      sum += p;
    }
  }
  if (std::abs(sum - 1.0) > kProbSumTol)
    throw std::invalid_argument("JointDistribution: entries sum to " + std::to_string(sum));
}

Distribution JointDistribution::row_marginal() const {
  std::vector<double> m(row_.size(), 0.0);
  for (std::size_t r = 0; r < row_.size(); ++r) {
    for (double p : probs_[r]) m[r] += p;
  }
  // Exact row summation can land a hair outside the construction tolerance;
  // nudge the total back to 1 within one ulp-scale correction.
  double total = 0.0;
  for (double v : m) total += v;
  if (total > 0.0 && std::abs(total - 1.0) <= 64 * std::numeric_limits<double>::epsilon()) {
    for (double& v : m) v /= total;
  }
  return Distribution(row_, std::move(m));
}

Distribution JointDistribution::col_marginal() const {
  std::vector<double> m(col_.size(), 0.0);
  for (std::size_t r = 0; r < row_.size(); ++r) {
    for (std::size_t c = 0; c < col_.size(); ++c) m[c] += probs_[r][c];
  }
  double total = 0.0;
  for (double v : m) total += v;
  if (total > 0.0 && std::abs(total - 1.0) <= 64 * std::numeric_limits<double>::epsilon()) {
    for (double& v : m) v /= total;
  }
  return Distribution(col_, std::move(m));
}

JointDistribution JointDistribution::product(const Distribution& row,
                                             const Distribution& col) {
  std::vector<std::vector<double>> probs(row.size(), std::vector<double>(col.size(), 0.0));
  for (std::size_t r = 0; r < row.size(); ++r) {
    for (std::size_t c = 0; c < col.size(); ++c) probs[r][c] = row[r] * col[c];
  }
  return JointDistribution(row.alphabet(), col.alphabet(), std::move(probs));
}

Sequence::Sequence(Alphabet alphabet, std::vector<std::uint8_t> values)
    : alphabet_(std::move(alphabet)), values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("Sequence: must be nonempty");
  for (std::uint8_t v : values_) {
    if (v >= alphabet_.size())
      throw std::invalid_argument("Sequence: symbol index out of range");
  }
}

Sequence Sequence::concat(const Sequence& other) const {
  check_same_alphabet(alphabet_, other.alphabet_, "Sequence::concat");
  std::vector<std::uint8_t> v = values_;
  v.insert(v.end(), other.values_.begin(), other.values_.end());
  return Sequence(alphabet_, std::move(v));
}

DistortionSpec::DistortionSpec(Alphabet input_alphabet, Alphabet output_alphabet,
                               std::vector<std::vector<double>> matrix)
    : input_(std::move(input_alphabet)),
      output_(std::move(output_alphabet)),
      matrix_(std::move(matrix)) {
  if (matrix_.size() != input_.size())
    throw std::invalid_argument("DistortionSpec: row count mismatch");
  for (const auto& row : matrix_) {
    if (row.size() != output_.size())
      throw std::invalid_argument("DistortionSpec: column count mismatch");
    for (double d : row) {
      if (!(d >= 0.0) || !std::isfinite(d))
        throw std::invalid_argument("DistortionSpec: entries must be >= 0 and finite");
    }
  }
}

DistortionSpec DistortionSpec::hamming(const Alphabet& alphabet) {
  std::vector<std::vector<double>> m(alphabet.size(),
                                     std::vector<double>(alphabet.size(), 1.0));
  for (std::size_t i = 0; i < alphabet.size(); ++i) m[i][i] = 0.0;
  return DistortionSpec(alphabet, alphabet, std::move(m));
}

double DistortionSpec::max_entry() const {
  double m = 0.0;
  for (const auto& row : matrix_) {
    for (double d : row) m = std::max(m, d);
  }
  return m;
}

std::vector<std::size_t> symbol_counts(const Sequence& s) {
  std::vector<std::size_t> counts(s.alphabet().size(), 0);
  for (std::uint8_t v : s.values()) ++counts[v];
  return counts;
}

Distribution empirical_type(const Sequence& s) {
  const auto counts = symbol_counts(s);
  const double n = static_cast<double>(s.size());
  std::vector<double> probs(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    probs[i] = static_cast<double>(counts[i]) / n;
  return Distribution(s.alphabet(), std::move(probs));
}

double l1_distance(const Distribution& p, const Distribution& q) {
  check_same_alphabet(p.alphabet(), q.alphabet(), "l1_distance");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return d;
}

bool counts_typical(const std::vector<std::size_t>& counts, std::size_t n,
                    const Distribution& p, double eps) {
  double d = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    d += std::abs(static_cast<double>(counts[i]) / static_cast<double>(n) - p[i]);
  return d <= eps;
}

bool is_typical(const Sequence& s, const Distribution& p, double eps) {
  check_same_alphabet(s.alphabet(), p.alphabet(), "is_typical");
  if (eps < 0.0) throw std::invalid_argument("is_typical: eps must be >= 0");
  return counts_typical(symbol_counts(s), s.size(), p, eps);
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  check_same_alphabet(p.alphabet(), q.alphabet(), "kl_divergence");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    sum += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(sum, 0.0);
}

double mutual_information(const JointDistribution& j) {
  const Distribution pz = j.row_marginal();
  const Distribution py = j.col_marginal();
  double sum = 0.0;
  for (std::size_t r = 0; r < pz.size(); ++r) {
    for (std::size_t c = 0; c < py.size(); ++c) {
      const double v = j.at(r, c);
      if (v == 0.0) continue;
      sum += v * std::log2(v / (pz[r] * py[c]));
    }
  }
  return std::max(sum, 0.0);
}

double entropy_bits(const Distribution& p) {
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log2(p[i]);
  }
  return h;
}

double n_letter_distortion(const Sequence& x, const Sequence& y, const DistortionSpec& d) {
  if (x.size() != y.size())
    throw std::invalid_argument("n_letter_distortion: length mismatch");
  check_same_alphabet(x.alphabet(), d.input_alphabet(), "n_letter_distortion(x)");
  check_same_alphabet(y.alphabet(), d.output_alphabet(), "n_letter_distortion(y)");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += d.at(x[i], y[i]);
  return sum;
}

Sequence sample_iid(const Distribution& p, std::size_t n, SeededRng& rng) {
  if (n == 0) throw std::invalid_argument("sample_iid: n must be >= 1");
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;
  std::vector<std::uint8_t> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.next_double();
    std::size_t lo = 0, hi = p.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (u < cdf[mid]) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    values[i] = static_cast<std::uint8_t>(lo);
  }
  return Sequence(p.alphabet(), std::move(values));
}

}  // namespace rdlab
