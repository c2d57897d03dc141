#include "speclab/rng.hpp"

namespace speclab {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline PhiloxCounter philox_round(const PhiloxCounter& ctr, const PhiloxKey& key) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
  mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    counter = philox_round(counter, key);
  }
  return counter;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

CounterStream::CounterStream(PhiloxKey key, std::uint64_t lane, std::uint32_t purpose)
    : key_(key),
      counter_{static_cast<std::uint32_t>(lane), static_cast<std::uint32_t>(lane >> 32), purpose, 0u} {}

void CounterStream::refill() {
  block_ = philox4x32_10(counter_, key_);
  ++counter_[3];
  used_ = 0;
}

std::uint64_t CounterStream::next_u64() {
  if (used_ >= 4) refill();
  const std::uint64_t lo = block_[static_cast<std::size_t>(used_)];
  const std::uint64_t hi = block_[static_cast<std::size_t>(used_) + 1];
  used_ += 2;
  return (hi << 32) | lo;
}

double CounterStream::next_uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

CounterStream derive_stream(std::uint64_t master_seed, std::uint64_t trial_index,
                            std::uint64_t site, StreamPurpose purpose) {
  const std::uint64_t mixed = splitmix64(master_seed ^ splitmix64(trial_index));
  const PhiloxKey key{static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)};
  return CounterStream(key, site, static_cast<std::uint32_t>(purpose));
}

}  // namespace speclab
