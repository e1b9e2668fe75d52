#pragma once

#include <array>
#include <cstdint>

/// Counter-based random numbers: every (seed, stream) pair names an
/// independent sequence, so a sample's draws depend only on its index and never
/// on which thread produced it.
namespace resetfp::rng {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

class Stream {
 public:
  /// Key = seed; counter words 0-1 = stream id, words 2-3 = block index.
  Stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal by Box-Muller; the second variate of each pair is cached.
  double normal();
  /// Unit-mean exponential.
  double exponential();

 private:
  PhiloxKey key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int used_ = 2;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace resetfp::rng
