#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace qfb {

/// Counter-based random stream. Output n is a keyed hash of n, so a stream is
/// fully determined by its key and position; nothing is shared between
/// streams.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal deviate.
  double normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stream key for (master seed, trajectory index, experiment tag). Independent
/// of the order in which trajectories are executed.
std::uint64_t derive_stream_key(std::uint64_t master_seed, std::uint64_t index,
                                std::uint64_t tag = 0);

}  // namespace qfb
