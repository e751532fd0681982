#ifndef RDLAB_PROB_HPP
#define RDLAB_PROB_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdlab/rng.hpp"

namespace rdlab {

// Construction-time tolerance for probability normalization. Inputs farther
// off are rejected, never silently renormalized.
inline constexpr double kProbSumTol = 1e-12;

// Ordered finite set of distinct symbols. The index <-> symbol bijection is
// fixed for the life of the object.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> symbols);

  // Convenience: symbols "0", "1", ..., "size-1".
  static Alphabet indexed(std::size_t size);

  std::size_t size() const { return symbols_.size(); }
  const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::optional<std::size_t> index_of(const std::string& s) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.symbols_ == b.symbols_;
  }
  friend bool operator!=(const Alphabet& a, const Alphabet& b) { return !(a == b); }

 private:
  std::vector<std::string> symbols_;
};

// Probability mass function over an Alphabet.
class Distribution {
 public:
  Distribution(Alphabet alphabet, std::vector<double> probs);

  static Distribution uniform(const Alphabet& alphabet);
  static Distribution point_mass(const Alphabet& alphabet, std::size_t index);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  Alphabet alphabet_;
  std::vector<double> probs_;
};

// Joint pmf over a product alphabet, row-major.
class JointDistribution {
 public:
  JointDistribution(Alphabet row_alphabet, Alphabet col_alphabet,
                    std::vector<std::vector<double>> probs);

  const Alphabet& row_alphabet() const { return row_; }
  const Alphabet& col_alphabet() const { return col_; }
  double at(std::size_t r, std::size_t c) const { return probs_[r][c]; }
  const std::vector<std::vector<double>>& probs() const { return probs_; }

  Distribution row_marginal() const;
  Distribution col_marginal() const;

  // Outer product p (x) q.
  static JointDistribution product(const Distribution& row, const Distribution& col);

 private:
  Alphabet row_;
  Alphabet col_;
  std::vector<std::vector<double>> probs_;
};

// Finite word over an Alphabet; elements are symbol indices.
class Sequence {
 public:
  Sequence(Alphabet alphabet, std::vector<std::uint8_t> values);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return values_.size(); }
  std::uint8_t operator[](std::size_t i) const { return values_[i]; }
  const std::vector<std::uint8_t>& values() const { return values_; }

  Sequence concat(const Sequence& other) const;

  friend bool operator==(const Sequence& a, const Sequence& b) {
    return a.alphabet_ == b.alphabet_ && a.values_ == b.values_;
  }

 private:
  Alphabet alphabet_;
  std::vector<std::uint8_t> values_;
};

// Per-letter distortion matrix d(x, y) >= 0 together with its additive
// n-letter extension.
class DistortionSpec {
 public:
  DistortionSpec(Alphabet input_alphabet, Alphabet output_alphabet,
                 std::vector<std::vector<double>> matrix);

  static DistortionSpec hamming(const Alphabet& alphabet);

  const Alphabet& input_alphabet() const { return input_; }
  const Alphabet& output_alphabet() const { return output_; }
  double at(std::size_t x, std::size_t y) const { return matrix_[x][y]; }
  const std::vector<std::vector<double>>& matrix() const { return matrix_; }
  double max_entry() const;

 private:
  Alphabet input_;
  Alphabet output_;
  std::vector<std::vector<double>> matrix_;
};

// --- operations ---

// Per-symbol frequency vector of s.
Distribution empirical_type(const Sequence& s);

// Symbol counts of s (same order as the alphabet).
std::vector<std::size_t> symbol_counts(const Sequence& s);

double l1_distance(const Distribution& p, const Distribution& q);

// L1 typicality: sum_x |type_s(x) - p(x)| <= eps, inclusive.
bool is_typical(const Sequence& s, const Distribution& p, double eps);

// Count-level variant shared with the exact DP paths so both sides of every
// oracle comparison use the identical boundary arithmetic.
bool counts_typical(const std::vector<std::size_t>& counts, std::size_t n,
                    const Distribution& p, double eps);

// KL divergence in bits; +infinity when absolute continuity fails.
double kl_divergence(const Distribution& p, const Distribution& q);

// I(Z;Y) in bits: KL between the joint and the product of its marginals.
double mutual_information(const JointDistribution& j);

double entropy_bits(const Distribution& p);

// Additive n-letter distortion (not divided by n).
double n_letter_distortion(const Sequence& x, const Sequence& y, const DistortionSpec& d);

Sequence sample_iid(const Distribution& p, std::size_t n, SeededRng& rng);

}  // namespace rdlab

#endif  // RDLAB_PROB_HPP
