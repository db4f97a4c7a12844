#include <doctest.h>

#include <bit>
#include <random>
#include <vector>

#include "pwfrg/oracle.hpp"
#include "pwfrg/predictor.hpp"

using namespace pwfrg;
using numerics::Matrix;
using numerics::Vector;

namespace {

Vector gaussian(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

Matrix dense_h(const model::ModelSpec& spec, int two_n) {
  const Eigen::Index d = Eigen::Index{1} << two_n;
  Matrix h(d, d);
  for (Eigen::Index i = 0; i < d; ++i) h.col(i) = oracle::full_apply(spec, two_n, Vector::Unit(d, i));
  return h;
}

Vector sz_diag(int two_n) {
  Vector s(Eigen::Index{1} << two_n);
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = 0.5 * two_n - std::popcount(static_cast<std::uint64_t>(i));
  return s;
}

}  // namespace

TEST_CASE("full_apply: small chains") {
  const model::ModelSpec uni{1.0, 0.0};
  Matrix h2 = dense_h(uni, 2);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(h2).eigenvalues()(0) == doctest::Approx(-0.75).epsilon(1e-15));
  CHECK((h2 - model::bond_hamiltonian(1.0)).norm() <= 1e-15);

  const Matrix h4 = dense_h(uni, 4);
  CHECK((h4 - h4.transpose()).norm() <= 1e-15);
  CHECK(std::abs(Eigen::SelfAdjointEigenSolver<Matrix>(h4).eigenvalues()(0) - (-1.6160254)) <= 1e-7);
}

TEST_CASE("full_apply: linear, symmetric and Sz conserving") {
  const model::ModelSpec s{1.0, 0.23};
  const int t = 10;
  const Eigen::Index d = Eigen::Index{1} << t;
  const Vector x = gaussian(d, 1);
  const Vector y = gaussian(d, 2);
  const Vector hx = oracle::full_apply(s, t, x);
  const Vector hy = oracle::full_apply(s, t, y);
  CHECK(std::abs(y.dot(hx) - hy.dot(x)) <= 1e-12 * hx.norm() * y.norm());
  CHECK((oracle::full_apply(s, t, 2.0 * x - 3.0 * y) - (2.0 * hx - 3.0 * hy)).norm() <= 1e-12 * hx.norm());
  const Vector sz = sz_diag(t);
  const Vector comm = oracle::full_apply(s, t, sz.cwiseProduct(x)) - sz.cwiseProduct(hx);
  CHECK(comm.norm() <= 1e-12 * x.norm());
}

TEST_CASE("full_apply: size guards") {
  const model::ModelSpec s{};
  try {
    oracle::full_apply(s, 22, Vector::Zero(1));
    FAIL("expected SizeTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::size_too_large);
  }
  try {
    oracle::full_apply(s, 5, Vector::Zero(32));
    FAIL("expected OddSystemSize");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::odd_system_size);
  }
}

TEST_CASE("ed_ground: dense agreement and analytic dimer limit") {
  for (double delta : {0.0, 0.1, -0.4}) {
    const model::ModelSpec s{1.0, delta};
    for (int t : {4, 6, 8}) {
      const auto gs = oracle::ed_ground(s, t);
      const double e0 = Eigen::SelfAdjointEigenSolver<Matrix>(dense_h(s, t)).eigenvalues()(0);
      CHECK(std::abs(gs.energy - e0) <= 1e-10);
      CHECK(std::abs(gs.psi.norm() - 1.0) <= 1e-12);
    }
  }
  // delta = 1: bonds 2, 4, 6 carry 2J, the rest vanish.
  CHECK(std::abs(oracle::ed_ground({1.0, 1.0}, 8).energy - (-4.5)) <= 1e-10);
  CHECK(std::abs(oracle::ed_ground({1.0, -1.0}, 8).energy - (-6.0)) <= 1e-10);
}

TEST_CASE("ed_ground: the mirrored ground state has the same energy") {
  // Bond i maps to 2N - i, which has the parity of i.
  const model::ModelSpec s{1.0, 0.3};
  const int t = 10;
  const auto gs = oracle::ed_ground(s, t);
  Vector rev(gs.psi.size());
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(rev.size()); ++i) {
    std::uint64_t r = 0;
    for (int k = 0; k < t; ++k) r |= ((i >> k) & 1u) << (t - 1 - k);
    rev(static_cast<Eigen::Index>(r)) = gs.psi(static_cast<Eigen::Index>(i));
  }
  CHECK(std::abs(rev.dot(oracle::full_apply(s, t, rev)) - gs.energy) <= 1e-10);
}

TEST_CASE("bipartite: round trip and Schmidt norm") {
  const Vector x = gaussian(Eigen::Index{1} << 8, 5);
  for (int k = 0; k <= 8; ++k) {
    const Matrix m = oracle::bipartite(x, 8, k);
    CHECK(m.rows() == (Eigen::Index{1} << k));
    CHECK((oracle::from_bipartite(m, 8, k) - x).norm() == 0.0);
    CHECK(std::abs(m.norm() - x.norm()) <= 1e-12);
  }
}

TEST_CASE("raw_predict: norm and pad content") {
  const auto gs = oracle::ed_ground({1.0, 0.0}, 4);
  for (PadState pad : {PadState::staggered, PadState::uniform}) {
    const Vector p = oracle::raw_predict(gs.psi, 4, pad);
    CHECK(p.size() == 256);
    CHECK(std::abs(p.norm() - 1.0) <= 1e-12);
    // Tracing out the two padded pairs returns the original state.
    const Eigen::Vector4d u = predictor::pad_vector(pad);
    Vector back = Vector::Zero(16);
    for (std::uint64_t s = 0; s < 256; ++s) {
      const int l = 2 * static_cast<int>(s & 1u) + static_cast<int>((s >> 1) & 1u);
      const int r = 2 * static_cast<int>((s >> 7) & 1u) + static_cast<int>((s >> 6) & 1u);
      back(static_cast<Eigen::Index>((s >> 2) & 15u)) += u(l) * u(r) * p(static_cast<Eigen::Index>(s));
    }
    CHECK((back - gs.psi).norm() <= 1e-12);
  }
}

TEST_CASE("raw_predict: uniform padding is orthogonal to the singlet ground state") {
  for (double delta : {0.0, 0.1}) {
    const model::ModelSpec s{1.0, delta};
    for (int t : {8, 10, 12}) {
      const auto small = oracle::ed_ground(s, t - 4);
      const auto big = oracle::ed_ground(s, t);
      const double uniform = std::abs(big.psi.dot(oracle::raw_predict(small.psi, t - 4, PadState::uniform)));
      const double staggered = std::abs(big.psi.dot(oracle::raw_predict(small.psi, t - 4, PadState::staggered)));
      CHECK(uniform <= 1e-10);
      CHECK(staggered >= 0.1);
    }
  }
}

TEST_CASE("raw_mcculloch: exact on the dimer product state") {
  const model::ModelSpec s{1.0, 1.0};
  for (int t : {6, 8, 10}) {
    const auto a = oracle::ed_ground(s, t - 2);
    const auto b = oracle::ed_ground(s, t);
    const Vector trial = oracle::raw_mcculloch(a.psi, b.psi, t);
    const double e = trial.dot(oracle::full_apply(s, t + 2, trial));
    CHECK(std::abs(e - oracle::ed_ground(s, t + 2).energy) <= 1e-10);
  }
}

TEST_CASE("pinv identity on bipartite ground states") {
  const auto gs = oracle::ed_ground({1.0, 0.0}, 10);
  const Matrix psi = oracle::bipartite(gs.psi, 10, 5);
  const Matrix inv = numerics::pinv_cutoff(psi, 1e-12);
  CHECK((psi * inv * psi - psi).norm() <= 1e-10);
}

TEST_CASE("block_transform and block_lift invert each other for full-rank chains") {
  // Random orthogonal maps with no truncation.
  const int t = 8;
  const int n = t / 2;
  std::vector<Matrix> a;
  std::vector<Matrix> b;
  Eigen::Index d = 1;
  for (int k = 1; k < n; ++k) {
    const Eigen::Index p = 2 * d;
    Eigen::HouseholderQR<Matrix> qa(Matrix(gaussian(p * p, 10 + k).reshaped(p, p)));
    Eigen::HouseholderQR<Matrix> qb(Matrix(gaussian(p * p, 20 + k).reshaped(p, p)));
    a.push_back(qa.householderQ() * Matrix::Identity(p, p));
    b.push_back(qb.householderQ() * Matrix::Identity(p, p));
    d = p;
  }
  const Vector x = gaussian(Eigen::Index{1} << t, 7);
  const auto c = oracle::block_transform(x, t, a, b);
  CHECK(c.m.rows() == 2 * d);
  CHECK(std::abs(c.norm() - x.norm()) <= 1e-12 * x.norm());
  CHECK((oracle::block_lift(c, t, a, b) - x).norm() <= 1e-12 * x.norm());
}
