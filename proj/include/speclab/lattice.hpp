#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace speclab {

enum class NormKind { euclidean, sup };

std::string to_string(NormKind kind);
NormKind parse_norm_kind(const std::string& name);

/// Default ceiling on the number of sites any box may hold.
inline constexpr std::uint64_t kDefaultSiteCap = std::uint64_t{1} << 27;

/// The cube {n in Z^d : |n_i| <= L} together with the norm used for <n>.
struct BoxSpec {
  int dimension = 1;
  int radius = 1;
  NormKind norm_kind = NormKind::euclidean;

  int side() const { return 2 * radius + 1; }

  /// (2L+1)^d; throws CapacityError when it exceeds `cap`.
  std::size_t site_count(std::uint64_t cap = kDefaultSiteCap) const;

  bool operator==(const BoxSpec&) const = default;
};

struct SiteIndex {
  std::vector<int> site;
  std::size_t ordinal = 0;
};

/// All sites of the box in lexicographic order (first coordinate most
/// significant), ordinal i at position i.
std::vector<SiteIndex> enumerate_box(const BoxSpec& spec, std::uint64_t cap = kDefaultSiteCap);

/// <n>^alpha with <n> = 1 + |n| in the requested norm.
double site_weight(std::span<const int> site, double alpha, NormKind norm_kind);

std::size_t ordinal_of(const BoxSpec& spec, std::span<const int> site);
std::vector<int> site_of(const BoxSpec& spec, std::size_t ordinal);

/// Box-independent 64-bit key of a site: zigzag-encoded coordinates packed
/// into 64/d bits each. Identical sites get identical keys in every box.
std::uint64_t site_key(std::span<const int> site);

/// Streams the sites with ordinals in [begin, end) through `fn(coords, ordinal)`
/// without materializing the box. `coords` is only valid during the call.
template <typename Fn>
void for_each_site(const BoxSpec& spec, std::size_t begin, std::size_t end, Fn&& fn) {
  if (begin >= end) return;
  std::vector<int> coords = site_of(spec, begin);
  const int radius = spec.radius;
  const int dim = spec.dimension;
  for (std::size_t ordinal = begin; ordinal < end; ++ordinal) {
    fn(std::span<const int>(coords), ordinal);
    for (int axis = dim - 1; axis >= 0; --axis) {
      if (coords[axis] < radius) {
        ++coords[axis];
        break;
      }
      coords[axis] = -radius;
    }
  }
}

}  // namespace speclab
