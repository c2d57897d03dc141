#include "speclab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>

#include "speclab/errors.hpp"
#include "speclab/rng.hpp"

namespace speclab {

PotentialSample sample_potential(const BoxSpec& box, const TailLaw& law, double alpha,
                                 std::uint64_t master_seed, std::uint64_t trial_index) {
  const std::size_t count = box.site_count();
  std::vector<double> omegas(count);
  for_each_site(box, 0, count, [&](std::span<const int> site, std::size_t ordinal) {
    auto stream = derive_stream(master_seed, trial_index, site_key(site));
    omegas[ordinal] = sample_omega(law, stream.next_uniform());
  });
  auto sample = potential_from_omegas(box, std::move(omegas), alpha);
  sample.master_seed = master_seed;
  sample.trial_index = trial_index;
  return sample;
}

PotentialSample potential_from_omegas(const BoxSpec& box, std::vector<double> omegas,
                                      double alpha) {
  const std::size_t count = box.site_count();
  if (omegas.size() != count) throw ConfigError("omega count does not match the box");
  PotentialSample sample;
  sample.box = box;
  sample.alpha = alpha;
  sample.values.resize(count);
  for_each_site(box, 0, count, [&](std::span<const int> site, std::size_t ordinal) {
    sample.values[ordinal] = omegas[ordinal] / site_weight(site, alpha, box.norm_kind);
  });
  sample.omegas = std::move(omegas);
  return sample;
}

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::full: return "full";
    case OperatorKind::diagonal: return "diagonal";
    case OperatorKind::free: return "free";
  }
  return "?";
}

LatticeOperator::LatticeOperator(BoxSpec box, std::vector<double> diagonal, OperatorKind kind)
    : box_(box), diagonal_(std::move(diagonal)), kind_(kind) {
  if (diagonal_.size() != box_.site_count()) {
    throw ConfigError("operator diagonal does not match the box");
  }
  strides_.assign(static_cast<std::size_t>(box_.dimension), 1);
  for (int axis = box_.dimension - 2; axis >= 0; --axis) {
    strides_[static_cast<std::size_t>(axis)] =
        strides_[static_cast<std::size_t>(axis) + 1] * static_cast<std::size_t>(box_.side());
  }
}

void LatticeOperator::apply(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = size();
  if (u.size() != n || out.size() != n) throw ConfigError("apply: vector length mismatch");
  for (std::size_t i = 0; i < n; ++i) out[i] = diagonal_[i] * u[i];
  if (!has_hopping()) return;

  if (box_.dimension == 1) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      out[i] += u[i + 1];
      out[i + 1] += u[i];
    }
    return;
  }
  const int radius = box_.radius;
  for_each_site(box_, 0, n, [&](std::span<const int> site, std::size_t i) {
    double acc = 0.0;
    for (std::size_t axis = 0; axis < strides_.size(); ++axis) {
      if (site[axis] > -radius) acc += u[i - strides_[axis]];
      if (site[axis] < radius) acc += u[i + strides_[axis]];
    }
    out[i] += acc;
  });
}

std::vector<double> LatticeOperator::apply(std::span<const double> u) const {
  std::vector<double> out(size());
  apply(u, out);
  return out;
}

double LatticeOperator::norm_bound() const {
  double vmax = 0.0;
  for (double v : diagonal_) vmax = std::max(vmax, std::abs(v));
  return (has_hopping() ? 2.0 * box_.dimension : 0.0) + vmax;
}

std::vector<Triplet> LatticeOperator::triplets() const {
  std::vector<Triplet> out;
  const std::size_t n = size();
  out.reserve(n * (has_hopping() ? 1 + 2 * strides_.size() : 1));
  const int radius = box_.radius;
  for_each_site(box_, 0, n, [&](std::span<const int> site, std::size_t i) {
    std::vector<Triplet> row;
    if (kind_ != OperatorKind::free || diagonal_[i] != 0.0) row.push_back({i, i, diagonal_[i]});
    if (has_hopping()) {
      for (std::size_t axis = 0; axis < strides_.size(); ++axis) {
        if (site[axis] > -radius) row.push_back({i, i - strides_[axis], 1.0});
        if (site[axis] < radius) row.push_back({i, i + strides_[axis], 1.0});
      }
    }
    std::sort(row.begin(), row.end(), [](const Triplet& a, const Triplet& b) { return a.col < b.col; });
    out.insert(out.end(), row.begin(), row.end());
  });
  return out;
}

std::vector<double> LatticeOperator::dense(std::size_t cap) const {
  const std::size_t n = size();
  if (n > cap) {
    throw CapacityError("dense materialization of " + std::to_string(n) +
                        " sites exceeds the cap " + std::to_string(cap));
  }
  std::vector<double> matrix(n * n, 0.0);
  for (const auto& t : triplets()) matrix[t.row * n + t.col] = t.value;
  return matrix;
}

LatticeOperator build_hamiltonian(const BoxSpec& box, const PotentialSample& potential,
                                  OperatorKind kind) {
  if (kind == OperatorKind::free) return free_operator(box);
  if (!(potential.box == box)) throw ConfigError("potential was sampled on a different box");
  return LatticeOperator(box, potential.values, kind);
}

LatticeOperator free_operator(const BoxSpec& box) {
  return LatticeOperator(box, std::vector<double>(box.site_count(), 0.0), OperatorKind::free);
}

std::vector<double> free_laplacian_eigs(int d, int L, std::uint64_t cap) {
  const BoxSpec box{d, L};
  const std::size_t count = box.site_count(cap);
  const int side = box.side();
  std::vector<double> modes(static_cast<std::size_t>(side));
  for (int j = 1; j <= side; ++j) {
    modes[static_cast<std::size_t>(j - 1)] = 2.0 * std::cos(j * M_PI / (side + 1));
  }
  std::vector<double> values{0.0};
  values.reserve(count);
  for (int axis = 0; axis < d; ++axis) {
    std::vector<double> next;
    next.reserve(values.size() * modes.size());
    for (double base : values) {
      for (double mode : modes) next.push_back(base + mode);
    }
    values = std::move(next);
  }
  std::sort(values.begin(), values.end());
  return values;
}

std::vector<double> v_spectrum(const PotentialSample& potential) {
  std::vector<double> values = potential.values;
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

void write_triplets(std::ostream& out, const std::vector<Triplet>& triplets) {
  const auto old_precision = out.precision(17);
  for (const auto& t : triplets) out << t.row << ' ' << t.col << ' ' << t.value << '\n';
  out.precision(old_precision);
}

}  // namespace speclab
