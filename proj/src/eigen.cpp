#include "speclab/eigen.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <numeric>

#include "speclab/errors.hpp"

namespace speclab {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Column-major n x cols block of orthonormal vectors.
class Basis {
 public:
  explicit Basis(std::size_t n) : n_(n) {}

  std::size_t size() const { return cols_; }
  std::span<const double> col(std::size_t j) const { return {data_.data() + j * n_, n_}; }
  std::span<double> col(std::size_t j) { return {data_.data() + j * n_, n_}; }

  void push(std::span<const double> v) {
    data_.insert(data_.end(), v.begin(), v.end());
    ++cols_;
  }

  void clear() {
    data_.clear();
    cols_ = 0;
  }

  // w -= Q (Q^T w), twice; returns the accumulated coefficients.
  std::vector<double> orthogonalize(std::span<double> w) const {
    std::vector<double> coeffs(cols_, 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < cols_; ++j) {
        const double h = dot(col(j), w);
        coeffs[j] += h;
        const auto q = col(j);
        for (std::size_t i = 0; i < n_; ++i) w[i] -= h * q[i];
      }
    }
    return coeffs;
  }

  // Q * s for a coefficient vector s of length size().
  std::vector<double> combine(std::span<const double> s) const {
    std::vector<double> out(n_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) {
      const auto q = col(j);
      for (std::size_t i = 0; i < n_; ++i) out[i] += s[j] * q[i];
    }
    return out;
  }

 private:
  std::size_t n_;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> random_unit(std::size_t n, CounterStream& stream) {
  std::vector<double> v(n);
  for (auto& x : v) x = stream.next_uniform() - 0.5;
  const double nv = norm2(v);
  for (auto& x : v) x /= nv;
  return v;
}

}  // namespace

std::string to_string(SpectrumMethod method) {
  return method == SpectrumMethod::dense ? "dense" : "lanczos";
}

std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> off) {
  const std::size_t n = d.size();
  if (n == 0) return d;
  if (off.size() + 1 != n) throw ConfigError("tridiagonal: off-diagonal length must be n - 1");
  // e[i] couples i and i+1; e[n-1] = 0 terminates the scan.
  std::vector<double> e(off);
  e.push_back(0.0);
  const std::size_t sweep_cap = 30 * n;
  std::size_t sweeps = 0;

  for (std::size_t l = 0; l < n; ++l) {
    for (;;) {
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd) break;
      }
      if (m == l) break;
      if (++sweeps > sweep_cap) throw ConvergenceError("QL iteration did not converge");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw ConfigError("symmetric_eigenvalues: matrix is not n x n");
  if (n == 0) return {};
  std::vector<double> off(n > 0 ? n - 1 : 0, 0.0);
  std::vector<double> v(n), p(n);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;  // trailing block A[k+1.., k+1..]
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) scale += a[(k + 1 + i) * n + k] * a[(k + 1 + i) * n + k];
    double alpha = std::sqrt(scale);
    if (alpha == 0.0) {
      off[k] = 0.0;
      continue;
    }
    const double x0 = a[(k + 1) * n + k];
    if (x0 > 0.0) alpha = -alpha;
    for (std::size_t i = 0; i < m; ++i) v[i] = a[(k + 1 + i) * n + k];
    v[0] -= alpha;
    const double vnorm2 = scale - 2.0 * alpha * x0 + alpha * alpha;
    off[k] = alpha;
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;

    // p = beta B v; q = p - (beta/2)(v.p) v; B -= v q^T + q v^T.
    double vp = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = &a[(k + 1 + i) * n + (k + 1)];
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += row[j] * v[j];
      p[i] = beta * s;
      vp += v[i] * p[i];
    }
    const double K = 0.5 * beta * vp;
    for (std::size_t i = 0; i < m; ++i) p[i] -= K * v[i];
    for (std::size_t i = 0; i < m; ++i) {
      double* row = &a[(k + 1 + i) * n + (k + 1)];
      const double vi = v[i], qi = p[i];
      for (std::size_t j = 0; j < m; ++j) row[j] -= vi * p[j] + qi * v[j];
    }
  }
  if (n >= 2) off[n - 2] = a[(n - 1) * n + (n - 2)];
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a[i * n + i];
  return tridiagonal_eigenvalues(std::move(diag), std::move(off));
}

SmallEigen jacobi_eigen(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw ConfigError("jacobi_eigen: matrix is not n x n");
  std::vector<double> vec(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) vec[i * n + i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        total += a[i * n + j] * a[i * n + j];
        if (i != j) off += a[i * n + j] * a[i * n + j];
      }
    }
    if (off <= kEps * kEps * total) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = vec[k * n + p], vkq = vec[k * n + q];
          vec[k * n + p] = c * vkp - s * vkq;
          vec[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });
  SmallEigen out;
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a[order[j] * n + order[j]];
    for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + j] = vec[i * n + order[j]];
  }
  return out;
}

Spectrum dense_spectrum(const LatticeOperator& op, std::size_t dense_cap) {
  Spectrum spectrum;
  spectrum.method = SpectrumMethod::dense;
  const auto diag = op.diagonal();
  if (!op.has_hopping()) {
    spectrum.values.assign(diag.begin(), diag.end());
    std::sort(spectrum.values.begin(), spectrum.values.end());
  } else if (op.box().dimension == 1) {
    if (op.size() > kTridiagonalCap) throw CapacityError("tridiagonal spectrum exceeds cap");
    spectrum.values = tridiagonal_eigenvalues({diag.begin(), diag.end()},
                                              std::vector<double>(op.size() - 1, 1.0));
  } else {
    spectrum.values = symmetric_eigenvalues(op.dense(dense_cap), op.size());
  }
  return spectrum;
}

namespace {

using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

struct RitzPairs {
  std::vector<double> values;                ///< descending
  std::vector<std::vector<double>> vectors;  ///< unit norm
  bool converged = false;
  std::size_t matvecs = 0;
};

// One thick-restart Lanczos run for the `want` largest eigenpairs of `apply`.
// Residuals are checked against `apply` itself.
RitzPairs lanczos_pass(const ApplyFn& apply, std::size_t n, std::size_t want, std::size_t max_basis,
                       double norm_est, double threshold, std::size_t budget, CounterStream& start) {
  std::size_t cap = max_basis ? max_basis : std::max<std::size_t>(2 * want + 20, 40);
  cap = std::min(std::max(cap, want + 2), n);
  const double breakdown = 1e-14 * norm_est;
  constexpr std::size_t kCheckInterval = 5;

  Basis basis(n);
  basis.push(random_unit(n, start));
  std::vector<double> T(cap * cap, 0.0);  // projected matrix, leading size x size block
  std::vector<double> w(n), hx(n);
  RitzPairs result;
  std::size_t since_check = 0;

  auto top_ritz = [](std::size_t size, std::size_t count) {
    std::vector<std::size_t> idx;
    for (std::size_t r = 0; r < count; ++r) idx.push_back(size - 1 - r);
    return idx;  // descending by value
  };

  for (;;) {
    const std::size_t size = basis.size();
    const std::size_t c = size - 1;
    apply(basis.col(c), w);
    ++result.matvecs;
    const auto h = basis.orthogonalize(w);
    for (std::size_t i = 0; i < size; ++i) T[i * cap + c] = T[c * cap + i] = h[i];
    const double beta = norm2(w);
    const bool broke_down = beta <= breakdown;
    const bool full = size == cap;
    const bool exhausted = result.matvecs >= budget;
    ++since_check;

    if (full || broke_down || exhausted || since_check >= kCheckInterval || size == n) {
      since_check = 0;
      std::vector<double> block(size * size);
      for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) block[i * size + j] = T[i * cap + j];
      }
      const auto eig = jacobi_eigen(std::move(block), size);
      const std::size_t have = std::min(want, size);
      const auto idx = top_ritz(size, have);
      const double coupling = broke_down ? 0.0 : beta;
      bool estimated = have == want;
      for (auto r : idx) {
        if (coupling * std::abs(eig.vectors[c * size + r]) > threshold) estimated = false;
      }
      // After a breakdown the Krylov space is invariant; keep going with a
      // fresh direction unless it already spans everything.
      if (broke_down && size < n && !exhausted) estimated = false;
      if (estimated || exhausted || (size == n && have == want)) {
        RitzPairs pairs;
        // Out of budget without a converged estimate: skip the explicit check.
        const bool check = estimated || size == n;
        bool verified = have == want && check;
        for (auto r : idx) {
          std::vector<double> s(size);
          for (std::size_t i = 0; i < size; ++i) s[i] = eig.vectors[i * size + r];
          auto x = basis.combine(s);
          const double xn = norm2(x);
          for (auto& xi : x) xi /= xn;
          if (check) {
            apply(x, hx);
            ++result.matvecs;
            for (std::size_t i = 0; i < n; ++i) hx[i] -= eig.values[r] * x[i];
            if (norm2(hx) > threshold) verified = false;
          }
          pairs.values.push_back(eig.values[r]);
          pairs.vectors.push_back(std::move(x));
        }
        if (verified || exhausted || size == n) {
          pairs.converged = verified;
          pairs.matvecs = result.matvecs;
          return pairs;
        }
      }

      if (full) {
        // Thick restart: keep the largest Ritz vectors plus the residual direction.
        const std::size_t keep = std::min(size - 1, std::max(want + 1, cap / 2));
        const auto kept = top_ritz(size, keep);
        Basis next(n);
        std::vector<double> couplings;
        std::vector<double> thetas;
        for (auto r : kept) {
          std::vector<double> s(size);
          for (std::size_t i = 0; i < size; ++i) s[i] = eig.vectors[i * size + r];
          next.push(basis.combine(s));
          thetas.push_back(eig.values[r]);
          couplings.push_back(coupling * eig.vectors[c * size + r]);
        }
        std::vector<double> q(n);
        if (broke_down) {
          q = random_unit(n, start);
          next.orthogonalize(q);
          std::fill(couplings.begin(), couplings.end(), 0.0);
        } else {
          for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / beta;
        }
        const double qn = norm2(q);
        for (auto& qi : q) qi /= qn;
        next.push(q);
        std::fill(T.begin(), T.end(), 0.0);
        for (std::size_t i = 0; i < keep; ++i) {
          T[i * cap + i] = thetas[i];
          T[i * cap + keep] = T[keep * cap + i] = couplings[i];
        }
        basis = std::move(next);
        continue;
      }
    }

    std::vector<double> q(n);
    double link = beta;
    if (broke_down) {
      q = random_unit(n, start);
      basis.orthogonalize(q);
      const double qn = norm2(q);
      for (auto& qi : q) qi /= qn;
      link = 0.0;
    } else {
      for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / beta;
    }
    basis.push(q);
    T[size * cap + c] = T[c * cap + size] = link;
  }
}

}  // namespace

Spectrum extremal_topk(const LatticeOperator& op, const LanczosOptions& options,
                       CounterStream& start) {
  const std::size_t n = op.size();
  const std::size_t want = options.count;
  if (want < 1 || want > n) throw ConfigError("extremal_topk: count must lie in [1, n]");
  const double norm_est = op.norm_bound() > 0.0 ? op.norm_bound() : 1.0;
  const double threshold = options.tol * norm_est;
  const ApplyFn apply_h = [&op](std::span<const double> u, std::span<double> out) { op.apply(u, out); };

  Spectrum result;
  result.method = SpectrumMethod::lanczos;
  auto pass = lanczos_pass(apply_h, n, want, options.max_basis, norm_est, threshold, options.max_matvecs, start);
  result.matvecs = pass.matvecs;
  bool converged = pass.converged;

  // A single Krylov space holds one vector per eigenspace, so repeated
  // eigenvalues can be missed. Search the complement of everything found so
  // far, shifted far below the spectrum, until nothing above the m-th value is left.
  std::vector<double> found_values = pass.values;
  std::vector<std::vector<double>> found_vectors = pass.vectors;
  const double sigma = 2.0 * norm_est + 1.0;
  std::vector<double> coeff;
  const ApplyFn apply_deflated = [&](std::span<const double> u, std::span<double> out) {
    op.apply(u, out);
    coeff.assign(found_vectors.size(), 0.0);
    for (std::size_t j = 0; j < found_vectors.size(); ++j) coeff[j] = dot(found_vectors[j], u);
    for (std::size_t j = 0; j < found_vectors.size(); ++j) {
      for (std::size_t i = 0; i < n; ++i) out[i] -= sigma * coeff[j] * found_vectors[j][i];
    }
  };
  while (converged && found_vectors.size() < n) {
    if (result.matvecs >= options.max_matvecs) {
      converged = false;
      break;
    }
    auto extra = lanczos_pass(apply_deflated, n, 1, 0, norm_est + sigma, threshold,
                              options.max_matvecs - result.matvecs, start);
    result.matvecs += extra.matvecs;
    if (!extra.converged) {
      converged = false;
      break;
    }
    std::vector<double> sorted = found_values;
    std::sort(sorted.rbegin(), sorted.rend());
    if (extra.values[0] <= sorted[want - 1] + threshold) break;
    found_values.push_back(extra.values[0]);
    found_vectors.push_back(std::move(extra.vectors[0]));
  }

  std::vector<std::size_t> order(found_values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return found_values[a] > found_values[b]; });
  order.resize(std::min(want, order.size()));
  std::vector<double> hx(n);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& x = found_vectors[*it];
    op.apply(x, hx);
    ++result.matvecs;
    for (std::size_t i = 0; i < n; ++i) hx[i] -= found_values[*it] * x[i];
    const double res = norm2(hx);
    if (res > threshold) converged = false;
    result.values.push_back(found_values[*it]);
    result.residuals.push_back(res);
  }
  result.converged = converged && result.values.size() == want;
  return result;
}

}  // namespace speclab
