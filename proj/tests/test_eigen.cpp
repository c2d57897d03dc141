#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "speclab/eigen.hpp"
#include "speclab/errors.hpp"

using namespace speclab;

namespace {

Eigen::MatrixXd random_symmetric(std::size_t n, std::uint64_t seed) {
  auto stream = derive_stream(seed, 0, 0);
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = stream.next_uniform() * 2.0 - 1.0;
  }
  return a;
}

std::vector<double> row_major(const Eigen::MatrixXd& a) {
  std::vector<double> out(a.size());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out[i * a.cols() + j] = a(i, j);
  }
  return out;
}

void check_close(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(got[i] - want[i]) <= tol);
  }
}

}  // namespace

TEST_CASE("tridiagonal QL against Eigen") {
  for (std::size_t n : {1u, 2u, 7u, 60u}) {
    auto stream = derive_stream(n, 0, 0);
    std::vector<double> diag(n), off(n ? n - 1 : 0);
    for (auto& x : diag) x = 10.0 * stream.next_uniform();
    for (auto& x : off) x = stream.next_uniform() - 0.5;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) t(i, i) = diag[i];
    for (std::size_t i = 0; i + 1 < n; ++i) t(i, i + 1) = t(i + 1, i) = off[i];
    check_close(tridiagonal_eigenvalues(diag, off), oracle::eigenvalues(t), 1e-12);
  }
}

TEST_CASE("Householder + QL against Eigen") {
  for (std::size_t n : {3u, 16u, 90u}) {
    const auto a = random_symmetric(n, 100 + n);
    check_close(symmetric_eigenvalues(row_major(a), n), oracle::eigenvalues(a), 1e-11);
  }
}

TEST_CASE("Jacobi eigenpairs") {
  const std::size_t n = 12;
  const auto a = random_symmetric(n, 7);
  const auto eig = jacobi_eigen(row_major(a), n);
  check_close(eig.values, oracle::eigenvalues(a), 1e-12);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> v(eig.vectors.data(), n, n);
  CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-12);
  for (std::size_t j = 0; j < n; ++j) {
    CHECK((a * v.col(j) - eig.values[j] * v.col(j)).norm() < 1e-12);
  }
}

TEST_CASE("dense spectrum reference cases") {
  const auto free = dense_spectrum(free_operator(BoxSpec{1, 1}));
  check_close(free.values, {-std::sqrt(2.0), 0.0, std::sqrt(2.0)}, 1e-12);

  const BoxSpec box{2, 3};
  const auto potential = sample_potential(box, TailLaw::power_log(2, 0), 0.5, 1, 0);
  auto sorted = potential.values;
  std::sort(sorted.begin(), sorted.end());
  CHECK(dense_spectrum(build_hamiltonian(box, potential, OperatorKind::diagonal)).values == sorted);

  for (const BoxSpec b : {BoxSpec{1, 200}, BoxSpec{2, 6}, BoxSpec{3, 2}}) {
    const auto pot = sample_potential(b, TailLaw::power_log(1, 1), 0.4, 5, 1);
    const auto ref = oracle::eigenvalues(oracle::hamiltonian(b, pot.values));
    const double scale = std::max(std::abs(ref.front()), std::abs(ref.back()));
    check_close(dense_spectrum(build_hamiltonian(b, pot, OperatorKind::full)).values, ref, 1e-12 * scale);
  }
}

TEST_CASE("dense spectrum caps") {
  CHECK_THROWS_AS((dense_spectrum(free_operator(BoxSpec{2, 40}), 4096)), CapacityError);
  // d = 1 goes through the tridiagonal path and ignores the dense cap
  CHECK(dense_spectrum(free_operator(BoxSpec{1, 5000}), 100).values.size() == 10001);
}

TEST_CASE("Lanczos reference cases") {
  SUBCASE("diagonal operator") {
    const BoxSpec box{2, 4};
    const auto potential = sample_potential(box, TailLaw::power_log(2, 0), 0.5, 2, 0);
    auto top = potential.values;
    std::sort(top.begin(), top.end());
    auto start = derive_stream(1, 0, 0, StreamPurpose::start_vector);
    const auto s = extremal_topk(build_hamiltonian(box, potential, OperatorKind::diagonal), {.count = 3}, start);
    check_close(s.values, {top.end() - 3, top.end()}, 1e-10 * top.back());
  }
  SUBCASE("free chain top eigenvalue") {
    auto start = derive_stream(1, 0, 0, StreamPurpose::start_vector);
    const auto s = extremal_topk(free_operator(BoxSpec{1, 100}), {.count = 1}, start);
    CHECK(s.converged);
    CHECK(std::abs(s.values.back() - 2.0 * std::cos(std::numbers::pi / 202.0)) <= 1e-10);
  }
  SUBCASE("random d=2 instance against the dense path") {
    const BoxSpec box{2, 15};
    const auto potential = sample_potential(box, TailLaw::power_log(2, 0), 0.5, 9, 4);
    const auto op = build_hamiltonian(box, potential, OperatorKind::full);
    auto start = derive_stream(9, 4, 15, StreamPurpose::start_vector);
    const auto s = extremal_topk(op, {.count = 10}, start);
    CHECK(s.converged);
    const auto dense = dense_spectrum(op, 4096).values;
    check_close(s.values, {dense.end() - 10, dense.end()}, 1e-8);
    for (double r : s.residuals) CHECK(r <= 1e-10 * op.norm_bound());
    CHECK(std::is_sorted(s.values.begin(), s.values.end()));
  }
  SUBCASE("repeated eigenvalues") {
    const auto op = free_operator(BoxSpec{2, 10});
    auto start = derive_stream(3, 0, 0, StreamPurpose::start_vector);
    const auto s = extremal_topk(op, {.count = 4}, start);
    const auto dense = dense_spectrum(op, 4096).values;
    check_close(s.values, {dense.end() - 4, dense.end()}, 1e-8);
  }
  SUBCASE("matvec budget exhaustion is reported") {
    const BoxSpec box{2, 30};
    const auto op = build_hamiltonian(box, sample_potential(box, TailLaw::power_log(1, 0), 0.0, 1, 0),
                                      OperatorKind::full);
    auto start = derive_stream(1, 0, 0, StreamPurpose::start_vector);
    const auto s = extremal_topk(op, {.count = 20, .max_matvecs = 25}, start);
    CHECK_FALSE(s.converged);
    CHECK(s.matvecs <= 25 + 20);
  }
}

TEST_CASE("Weyl comparison and interlacing on random instances") {
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    for (const BoxSpec box : {BoxSpec{1, 60}, BoxSpec{2, 5}}) {
      const auto potential = sample_potential(box, TailLaw::power_log(2, 0), 0.5, 77, trial);
      const auto h = dense_spectrum(build_hamiltonian(box, potential, OperatorKind::full)).values;
      auto v = potential.values;
      std::sort(v.begin(), v.end());
      for (std::size_t j = 0; j < h.size(); ++j) CHECK(std::abs(h[j] - v[j]) <= 2.0 * box.dimension + 1e-9);

      const BoxSpec bigger{box.dimension, box.radius + 2};
      const auto pb = sample_potential(bigger, TailLaw::power_log(2, 0), 0.5, 77, trial);
      const auto hb = dense_spectrum(build_hamiltonian(bigger, pb, OperatorKind::full)).values;
      CHECK(hb.back() >= h.back() - 1e-9);
    }
  }
}
