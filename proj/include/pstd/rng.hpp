#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace pstd {

/// Identifies one reproducible random stream: (master seed, stream index).
///
/// Streams are realized with the Philox4x32-10 counter-based generator. The
/// 64-bit master seed is the Philox key, and the stream index occupies the
/// upper 64 bits of the 128-bit counter, so distinct stream indices never
/// share a counter value. Each stream can emit 2^66 words before wrapping.
struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// Seed of the substream `offset` positions after this one.
  [[nodiscard]] RngSeed advanced(std::uint64_t offset) const {
    return {master_seed, stream_index + offset};
  }
};

/// Stream layout used by the Monte-Carlo harness: every trial owns a block
/// of 2^24 consecutive streams, one per role.
inline constexpr std::uint64_t kStreamsPerTrial = std::uint64_t{1} << 24;

namespace stream_role {
inline constexpr std::uint64_t kObservation = 0;
/// Training series l (0-based) uses kTrainingBase + l.
inline constexpr std::uint64_t kTrainingBase = 1;
}  // namespace stream_role

[[nodiscard]] inline RngSeed trial_stream(std::uint64_t master_seed, std::uint64_t trial,
                                          std::uint64_t role) {
  return {master_seed, trial * kStreamsPerTrial + role};
}

/// Philox4x32-10 bijection. Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// UniformRandomBitGenerator producing 32-bit words from one Philox stream.
class PhiloxEngine {
 public:
  using result_type = std::uint32_t;

  explicit PhiloxEngine(RngSeed seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal deviate (Marsaglia polar method).
  double normal();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::uint64_t block_ = 0;
  std::uint64_t stream_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int next_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pstd
