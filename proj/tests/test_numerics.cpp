#include <doctest.h>

#include <cmath>
#include <random>

#include "pwfrg/model.hpp"
#include "pwfrg/numerics.hpp"
#include "pwfrg/oracle.hpp"

using namespace pwfrg;
using numerics::Matrix;
using numerics::Vector;

namespace {

Matrix random_symmetric(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
  return m;
}

Matrix random_matrix(int r, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

template <typename F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::io;
}

}  // namespace

TEST_CASE("sym_eig_desc: identity gives unit values and an orthonormal basis") {
  const auto sd = numerics::sym_eig_desc(Matrix::Identity(4, 4));
  CHECK((sd.values - Vector::Ones(4)).norm() <= 1e-14);
  CHECK((sd.vectors.transpose() * sd.vectors - Matrix::Identity(4, 4)).norm() <= 1e-12);
}

TEST_CASE("sym_eig_desc: Pauli x") {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  const auto sd = numerics::sym_eig_desc(x);
  CHECK(sd.values(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sd.values(1) == doctest::Approx(-1.0).epsilon(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(sd.vectors(0, 0) - r) <= 1e-14);
  CHECK(std::abs(sd.vectors(1, 0) - r) <= 1e-14);
  // (1, -1)/sqrt2 has a magnitude tie; the first entry is made positive.
  CHECK(std::abs(sd.vectors(0, 1) - r) <= 1e-14);
  CHECK(std::abs(sd.vectors(1, 1) + r) <= 1e-14);
}

TEST_CASE("sym_eig_desc: reconstruction, ordering and gauge on random inputs") {
  for (int n : {1, 2, 8, 33, 128}) {
    const Matrix m = random_symmetric(n, 17 + n);
    const auto sd = numerics::sym_eig_desc(m);
    const Matrix rec = sd.vectors * sd.values.asDiagonal() * sd.vectors.transpose();
    CHECK((rec - m).norm() <= 1e-10 * m.norm());
    CHECK((sd.vectors.transpose() * sd.vectors - Matrix::Identity(n, n)).norm() <= 1e-12);
    for (int k = 0; k + 1 < n; ++k) CHECK(sd.values(k) >= sd.values(k + 1));
    for (int c = 0; c < n; ++c) {
      Eigen::Index at = 0;
      sd.vectors.col(c).cwiseAbs().maxCoeff(&at);
      CHECK(sd.vectors(at, c) > 0.0);
    }
  }
}

TEST_CASE("sym_eig_desc: rejects non-symmetric and non-finite input") {
  Matrix m = random_symmetric(4, 3);
  m(0, 1) += 1e-6;
  CHECK(code_of([&] { numerics::sym_eig_desc(m); }) == Errc::non_symmetric);
  Matrix n = random_symmetric(3, 4);
  n(1, 1) = std::nan("");
  CHECK(code_of([&] { numerics::sym_eig_desc(n); }) == Errc::non_finite);
}

TEST_CASE("lanczos: 2x2 diagonal is exact after at most two expansions") {
  Matrix a = Vector(Eigen::Vector2d(-1.0, 3.0)).asDiagonal();
  Vector start = Eigen::Vector2d(1.0, 1.0) / std::sqrt(2.0);
  const auto r = numerics::lanczos_ground([&](const Vector& v) -> Vector { return a * v; }, start);
  CHECK(std::abs(r.energy + 1.0) <= 1e-12);
  CHECK(r.iterations <= 2);
  CHECK(std::abs(r.vector.norm() - 1.0) <= 1e-12);
}

TEST_CASE("lanczos: four-site Heisenberg chain against the dense spectrum") {
  const model::ModelSpec spec{1.0, 0.0};
  auto apply = [&](const Vector& v) { return oracle::full_apply(spec, 4, v); };
  Matrix h(16, 16);
  for (int i = 0; i < 16; ++i) h.col(i) = apply(Vector::Unit(16, i));
  const double e0 = Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues()(0);
  const auto r = numerics::lanczos_ground(apply, random_matrix(16, 1, 5).col(0));
  CHECK(std::abs(r.energy - e0) <= 1e-10);
  CHECK(std::abs(r.energy - (-1.6160254)) <= 1e-7);
  CHECK((apply(r.vector) - r.energy * r.vector).norm() <= 1e-12 * std::abs(r.energy));
}

TEST_CASE("lanczos: exact eigenvector as start returns after one expansion") {
  const Matrix a = random_symmetric(20, 9);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const Vector v = es.eigenvectors().col(0);
  const auto r = numerics::lanczos_ground([&](const Vector& x) -> Vector { return a * x; }, v);
  CHECK(r.iterations == 1);
  CHECK(std::abs(r.energy - es.eigenvalues()(0)) <= 1e-12);
}

TEST_CASE("lanczos: converge mode meets the residual contract on larger problems") {
  const Matrix a = random_symmetric(300, 11);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  numerics::LanczosOptions opt;
  opt.tol = 1e-12;
  const auto r = numerics::lanczos_ground([&](const Vector& x) -> Vector { return a * x; },
                                          random_matrix(300, 1, 12).col(0), opt);
  CHECK((a * r.vector - r.energy * r.vector).norm() <= 1e-12 * std::max(1.0, std::abs(r.energy)));
  CHECK(std::abs(r.energy - es.eigenvalues()(0)) <= 1e-10);
  REQUIRE(r.second_ritz.has_value());
  CHECK(*r.second_ritz >= r.energy);
}

TEST_CASE("lanczos: errors") {
  const Matrix a = random_symmetric(200, 13);
  auto apply = [&](const Vector& x) -> Vector { return a * x; };
  CHECK(code_of([&] { numerics::lanczos_ground(apply, Vector::Zero(200)); }) == Errc::zero_start_vector);

  numerics::LanczosOptions opt;
  opt.max_iter = 3;
  try {
    numerics::lanczos_ground(apply, random_matrix(200, 1, 14).col(0), opt);
    FAIL("expected NoConvergence");
  } catch (const numerics::NoConvergence& e) {
    CHECK(e.code() == Errc::no_convergence);
    CHECK(e.best().vector.size() == 200);
    CHECK(std::isfinite(e.best().energy));
  }
}

TEST_CASE("lanczos: single_step is the Rayleigh-Ritz optimum over span{start, A start}") {
  const Matrix a = random_symmetric(40, 21);
  const Vector s = random_matrix(40, 1, 22).col(0).normalized();
  numerics::LanczosOptions opt;
  opt.mode = numerics::LanczosMode::single_step;
  const auto r = numerics::lanczos_ground([&](const Vector& x) -> Vector { return a * x; }, s, opt);
  CHECK(r.iterations == 1);

  Matrix basis(40, 2);
  basis.col(0) = s;
  basis.col(1) = a * s;
  const Eigen::HouseholderQR<Matrix> qr(basis);
  const Matrix q = qr.householderQ() * Matrix::Identity(40, 2);
  const Matrix h = q.transpose() * a * q;
  const double best = Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues()(0);
  CHECK(std::abs(r.energy - best) <= 1e-12);
  CHECK(r.energy <= s.dot(a * s) + 1e-14);

  // An extra direction can only lower the result.
  const Vector extra = random_matrix(40, 1, 23).col(0);
  const auto r3 = numerics::lanczos_ground([&](const Vector& x) -> Vector { return a * x; }, s, opt, extra);
  CHECK(r3.energy <= r.energy + 1e-14);
}

TEST_CASE("pinv_cutoff: examples") {
  Matrix d(2, 2);
  d << 2, 0, 0, 1;
  Matrix expect(2, 2);
  expect << 0.5, 0, 0, 1;
  CHECK((numerics::pinv_cutoff(d) - expect).norm() <= 1e-14);

  Matrix tiny(2, 2);
  tiny << 1, 0, 0, 1e-15;
  Matrix cut(2, 2);
  cut << 1, 0, 0, 0;
  CHECK((numerics::pinv_cutoff(tiny, 1e-8) - cut).norm() <= 1e-14);

  const Matrix m = random_matrix(6, 4, 31);
  CHECK((numerics::pinv_cutoff(m) * m - Matrix::Identity(4, 4)).norm() <= 1e-10);
}

TEST_CASE("pinv_cutoff: Penrose identity and double application") {
  const Matrix m = random_matrix(5, 5, 41);
  const Matrix p = numerics::pinv_cutoff(m);
  CHECK((m * p * m - m).norm() <= 1e-8);
  CHECK((numerics::pinv_cutoff(p) - m).norm() <= 1e-8);

  Matrix rank2 = random_matrix(5, 2, 42) * random_matrix(2, 5, 43);
  CHECK((rank2 * numerics::pinv_cutoff(rank2) * rank2 - rank2).norm() <= 1e-8 * rank2.norm());
}

TEST_CASE("pinv_cutoff: rank zero and non-finite input") {
  CHECK(code_of([] { numerics::pinv_cutoff(Matrix::Zero(3, 3)); }) == Errc::all_singular_values_cut);
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = INFINITY;
  CHECK(code_of([&] { numerics::pinv_cutoff(m); }) == Errc::non_finite);
}

TEST_CASE("fix_sign_gauge: largest magnitude positive, first index on ties") {
  Vector v(3);
  v << 0.5, -0.9, 0.2;
  numerics::fix_sign_gauge(v);
  CHECK(v(1) == doctest::Approx(0.9));
  Vector t(2);
  t << -0.5, 0.5;
  numerics::fix_sign_gauge(t);
  CHECK(t(0) > 0.0);
}
