#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace speclab {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds (Salmon et al., Random123).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

std::uint64_t splitmix64(std::uint64_t x);

/// What a stream feeds; distinct purposes never share counters.
enum class StreamPurpose : std::uint32_t { potential = 0, start_vector = 1 };

/// Counter-based keyed stream of 64-bit words. The full state is
/// (key, counter prefix, block index), so any stream can be recreated from
/// its derivation triple on any worker.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  CounterStream(PhiloxKey key, std::uint64_t lane, std::uint32_t purpose);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double next_uniform();

  std::uint64_t operator()() { return next_u64(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return std::numeric_limits<std::uint64_t>::max(); }

 private:
  void refill();

  PhiloxKey key_;
  PhiloxCounter counter_;
  PhiloxCounter block_{};
  int used_ = 4;
};

/// Stream for one (master_seed, trial, site) triple. `site` is a
/// box-independent site key (see lattice.hpp: site_key) so nested boxes of
/// one trial see the same omega at shared sites.
CounterStream derive_stream(std::uint64_t master_seed, std::uint64_t trial_index,
                            std::uint64_t site, StreamPurpose purpose = StreamPurpose::potential);

}  // namespace speclab
