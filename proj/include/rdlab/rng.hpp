#ifndef RDLAB_RNG_HPP
#define RDLAB_RNG_HPP

#include <cstdint>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace rdlab {

// Counter-seeded xoshiro256** stream. A stream is identified by
// (seed, stream_id); identical pairs reproduce identical output on every
// platform, and distinct stream_ids give statistically independent streams.
// Workers never share an instance: each derives its own via derive().
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // New independent stream keyed by this stream plus the given tags.
  SeededRng derive(std::initializer_list<std::uint64_t> tags) const;
  SeededRng derive(std::uint64_t a) const { return derive({a}); }
  SeededRng derive(std::uint64_t a, std::uint64_t b) const { return derive({a, b}); }
  SeededRng derive(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return derive({a, b, c});
  }

  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 random bits.
  double next_double();

  // Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound);

  // Index sampled from an unnormalized nonnegative weight vector.
  std::size_t sample_index(const std::vector<double>& weights);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_[4];
};

}  // namespace rdlab

#endif  // RDLAB_RNG_HPP
