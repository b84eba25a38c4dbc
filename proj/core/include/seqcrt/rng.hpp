#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace seqcrt {

/// Counter-based random stream (Philox4x32-10).
///
/// The seed is the key and (stream_id, block counter) is the counter, so the
/// k-th draw of a stream depends only on (seed, stream_id, k). Streams are
/// cheap to create; hand each worker its own instead of sharing one.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  /// Independent child stream identified by `tag`; a pure function of
  /// (seed, stream_id, tag) that does not advance this stream.
  RngStream derive(std::uint64_t tag) const;
  RngStream derive(std::uint64_t tag_a, std::uint64_t tag_b) const {
    return derive(tag_a).derive(tag_b);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  bool bernoulli(double prob) { return uniform() < prob; }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// Draw an index from a discrete law given by nonnegative weights summing to `total`.
  int categorical(const double* weights, int count, double total = 1.0);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t k = below(i);
      std::swap(v[i - 1], v[k]);
    }
  }

  /// `count` distinct values from {0, ..., population-1}, in draw order.
  std::vector<int> sample_without_replacement(int population, int count);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to mix seeds and tags.
std::uint64_t mix64(std::uint64_t x);

}  // namespace seqcrt
