#include "speclab/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "speclab/errors.hpp"

namespace speclab {

std::string to_string(NormKind kind) {
  return kind == NormKind::euclidean ? "euclidean" : "sup";
}

NormKind parse_norm_kind(const std::string& name) {
  if (name == "euclidean") return NormKind::euclidean;
  if (name == "sup") return NormKind::sup;
  throw ConfigError("unknown norm_kind '" + name + "'");
}

std::size_t BoxSpec::site_count(std::uint64_t cap) const {
  if (dimension < 1) throw ConfigError("box dimension must be >= 1");
  if (radius < 1) throw ConfigError("box radius must be >= 1");
  const auto s = static_cast<std::uint64_t>(side());
  std::uint64_t count = 1;
  for (int i = 0; i < dimension; ++i) {
    if (count > cap / s) {
      throw CapacityError("box with d=" + std::to_string(dimension) + ", L=" +
                          std::to_string(radius) + " exceeds the site cap " +
                          std::to_string(cap));
    }
    count *= s;
  }
  return static_cast<std::size_t>(count);
}

std::vector<SiteIndex> enumerate_box(const BoxSpec& spec, std::uint64_t cap) {
  const std::size_t count = spec.site_count(cap);
  std::vector<SiteIndex> sites;
  sites.reserve(count);
  for_each_site(spec, 0, count, [&](std::span<const int> n, std::size_t ordinal) {
    sites.push_back(SiteIndex{{n.begin(), n.end()}, ordinal});
  });
  return sites;
}

double site_weight(std::span<const int> site, double alpha, NormKind norm_kind) {
  if (alpha == 0.0) return 1.0;
  double norm = 0.0;
  if (norm_kind == NormKind::sup) {
    for (int c : site) norm = std::max(norm, static_cast<double>(std::abs(c)));
  } else {
    for (int c : site) norm += static_cast<double>(c) * static_cast<double>(c);
    norm = std::sqrt(norm);
  }
  return std::pow(1.0 + norm, alpha);
}

std::size_t ordinal_of(const BoxSpec& spec, std::span<const int> site) {
  if (static_cast<int>(site.size()) != spec.dimension) {
    throw ConfigError("site dimension does not match box");
  }
  std::size_t ordinal = 0;
  const auto side = static_cast<std::size_t>(spec.side());
  for (int c : site) {
    if (std::abs(c) > spec.radius) throw DomainError("site outside box");
    ordinal = ordinal * side + static_cast<std::size_t>(c + spec.radius);
  }
  return ordinal;
}

std::vector<int> site_of(const BoxSpec& spec, std::size_t ordinal) {
  const auto side = static_cast<std::size_t>(spec.side());
  std::vector<int> site(static_cast<std::size_t>(spec.dimension));
  for (int axis = spec.dimension - 1; axis >= 0; --axis) {
    site[static_cast<std::size_t>(axis)] = static_cast<int>(ordinal % side) - spec.radius;
    ordinal /= side;
  }
  if (ordinal != 0) throw DomainError("ordinal outside box");
  return site;
}

std::uint64_t site_key(std::span<const int> site) {
  const auto dim = site.size();
  if (dim == 0) return 0;
  const unsigned bits = static_cast<unsigned>(64 / dim);
  const std::uint64_t limit = bits >= 64 ? std::numeric_limits<std::uint64_t>::max()
                                         : (std::uint64_t{1} << bits) - 1;
  std::uint64_t key = 0;
  for (int c : site) {
    const auto z = static_cast<std::int64_t>(c);
    const auto zigzag = static_cast<std::uint64_t>((z << 1) ^ (z >> 63));
    if (zigzag > limit) throw CapacityError("site coordinate too large for site key");
    key = bits >= 64 ? zigzag : (key << bits) | zigzag;
  }
  return key;
}

}  // namespace speclab
