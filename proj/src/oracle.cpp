#include "pwfrg/oracle.hpp"

#include "pwfrg/predictor.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace pwfrg::oracle {

namespace {

using Index = Eigen::Index;

void require_size(int two_n, int cap) {
  if (two_n < 2 || two_n % 2 != 0)
    throw Error(Errc::odd_system_size, "chain size " + std::to_string(two_n) + " must be even and >= 2");
  if (two_n > cap)
    throw Error(Errc::size_too_large,
                "chain size " + std::to_string(two_n) + " exceeds the cap " + std::to_string(cap));
}

void require_length(const Vector& x, int two_n) {
  if (x.size() != (Index{1} << two_n))
    throw Error(Errc::dimension_mismatch, "vector length does not match 2^" + std::to_string(two_n));
}

// Spin of site i (1-based) in state s.
int spin(std::uint64_t s, int site) { return static_cast<int>((s >> (site - 1)) & 1u); }

// Bipartite row/column indices of state s.
std::pair<Index, Index> split_index(std::uint64_t s, int two_n, int k_left) {
  Index row = 0;
  for (int k = 1; k <= k_left; ++k) row = 2 * row + spin(s, k);
  Index col = 0;
  for (int k = 1; k <= two_n - k_left; ++k) col = 2 * col + spin(s, two_n + 1 - k);
  return {row, col};
}

// rows of m over (sites 1..K, first site most significant) -> rows over
// (xi_{K-1}, s_K) by applying A_1 .. A_{K-1}.
Matrix contract_chain(Matrix m, int k_sites, std::span<const Matrix> chain) {
  if (static_cast<int>(chain.size()) != k_sites - 1)
    throw Error(Errc::dimension_mismatch, "isometry chain length does not match the block size");
  Index d = 1;  // dimension of xi_{k-1}
  for (int k = 1; k < k_sites; ++k) {
    const Matrix& a = chain[static_cast<std::size_t>(k - 1)];
    const Index p = 2 * d;
    const Index rest = Index{1} << (k_sites - k);
    if (a.rows() != p) throw Error(Errc::dimension_mismatch, "isometry rows do not match the chain");
    Matrix next(rest * a.cols(), m.cols());
    for (Index c = 0; c < m.cols(); ++c) {
      const Eigen::Map<const Matrix> col(m.col(c).data(), rest, p);
      Eigen::Map<Matrix>(next.col(c).data(), rest, a.cols()) = col * a;
    }
    m = std::move(next);
    d = a.cols();
  }
  return m;
}

// Inverse direction of contract_chain.
Matrix expand_chain(Matrix m, int k_sites, std::span<const Matrix> chain) {
  if (static_cast<int>(chain.size()) != k_sites - 1)
    throw Error(Errc::dimension_mismatch, "isometry chain length does not match the block size");
  for (int k = k_sites - 1; k >= 1; --k) {
    const Matrix& a = chain[static_cast<std::size_t>(k - 1)];
    const Index rest = Index{1} << (k_sites - k);
    if (m.rows() != rest * a.cols()) throw Error(Errc::dimension_mismatch, "isometry columns do not match");
    Matrix next(rest * a.rows(), m.cols());
    for (Index c = 0; c < m.cols(); ++c) {
      const Eigen::Map<const Matrix> col(m.col(c).data(), rest, a.cols());
      Eigen::Map<Matrix>(next.col(c).data(), rest, a.rows()) = col * a.transpose();
    }
    m = std::move(next);
  }
  return m;
}

}  // namespace

Vector full_apply(const model::ModelSpec& spec, int two_n, const Vector& x) {
  require_size(two_n, kMaxSites);
  require_length(x, two_n);
  Vector y = Vector::Zero(x.size());
  for (int bond = 1; bond < two_n; ++bond) {
    const double c = model::bond_coupling(spec, bond);
    const std::uint64_t flip = std::uint64_t{3} << (bond - 1);
    for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(x.size()); ++s) {
      const auto i = static_cast<Index>(s);
      if (spin(s, bond) == spin(s, bond + 1)) {
        y(i) += 0.25 * c * x(i);
      } else {
        y(i) -= 0.25 * c * x(i);
        y(static_cast<Index>(s ^ flip)) += 0.5 * c * x(i);
      }
    }
  }
  return y;
}

GroundState ed_ground(const model::ModelSpec& spec, int two_n) {
  require_size(two_n, kMaxSites);
  const Index dim = Index{1} << two_n;
  std::mt19937_64 rng(0x5eed0000u + static_cast<unsigned>(two_n));
  std::normal_distribution<double> gauss;
  Vector start = Vector::Zero(dim);
  for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(dim); ++s)
    if (2 * std::popcount(s) == two_n) start(static_cast<Index>(s)) = gauss(rng);

  numerics::LanczosOptions opts;
  opts.tol = 1e-13;
  opts.max_iter = 2000;
  auto r = numerics::lanczos_ground([&](const Vector& v) { return full_apply(spec, two_n, v); }, start, opts);
  GroundState out;
  out.energy = r.energy;
  out.psi = r.vector.normalized();
  numerics::fix_sign_gauge(out.psi);
  return out;
}

Matrix bipartite(const Vector& x, int two_n, int k_left) {
  require_size(two_n, kMaxSites);
  require_length(x, two_n);
  if (k_left < 0 || k_left > two_n) throw Error(Errc::dimension_mismatch, "cut outside the chain");
  Matrix m(Index{1} << k_left, Index{1} << (two_n - k_left));
  for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(x.size()); ++s) {
    const auto [r, c] = split_index(s, two_n, k_left);
    m(r, c) = x(static_cast<Index>(s));
  }
  return m;
}

Vector from_bipartite(const Matrix& m, int two_n, int k_left) {
  require_size(two_n, kMaxSites);
  if (k_left < 0 || k_left > two_n || m.rows() != (Index{1} << k_left) ||
      m.cols() != (Index{1} << (two_n - k_left)))
    throw Error(Errc::dimension_mismatch, "matrix shape does not match the cut");
  Vector x(Index{1} << two_n);
  for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(x.size()); ++s) {
    const auto [r, c] = split_index(s, two_n, k_left);
    x(static_cast<Index>(s)) = m(r, c);
  }
  return x;
}

Vector raw_predict(const Vector& psi_small, int two_n_small, PadState pad) {
  const int t = two_n_small + 4;
  require_size(t, kMaxSites);
  require_length(psi_small, two_n_small);
  const Eigen::Vector4d u = predictor::pad_vector(pad);
  const Index dim = Index{1} << t;
  const std::uint64_t mask = (std::uint64_t{1} << two_n_small) - 1;
  Vector out(dim);
  for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(dim); ++s) {
    const double left = u(2 * spin(s, 1) + spin(s, 2));
    const double right = u(2 * spin(s, t) + spin(s, t - 1));
    out(static_cast<Index>(s)) = left * right * psi_small(static_cast<Index>((s >> 2) & mask));
  }
  return out;
}

Vector raw_mcculloch(const Vector& psi_small, const Vector& psi_now, int two_n_now, double eps_rel) {
  require_size(two_n_now + 2, kMaxInverseSites);
  require_size(two_n_now - 2, kMaxInverseSites);
  const int n = two_n_now / 2;
  const Matrix inv = numerics::pinv_cutoff(bipartite(psi_small, two_n_now - 2, n - 1), eps_rel);
  const Matrix phi_l = bipartite(psi_now, two_n_now, n + 1);
  const Matrix phi_r = bipartite(psi_now, two_n_now, n - 1);
  Vector out = from_bipartite(phi_l * inv * phi_r, two_n_now + 2, n + 1);
  const double norm = out.norm();
  if (!(norm > 1e-12)) throw Error(Errc::zero_norm, "inverse-based trial vanished");
  return out / norm;
}

engine::CenterTensor block_transform(const Vector& x, int two_n, std::span<const Matrix> a,
                                     std::span<const Matrix> b) {
  const int n = two_n / 2;
  Matrix m = bipartite(x, two_n, n);
  m = contract_chain(std::move(m), n, a);
  Matrix t = m.transpose();
  t = contract_chain(std::move(t), n, b);
  return engine::CenterTensor(t.transpose());
}

Vector block_lift(const engine::CenterTensor& psi, int two_n, std::span<const Matrix> a,
                  std::span<const Matrix> b) {
  require_size(two_n, kMaxSites);
  const int n = two_n / 2;
  Matrix m = expand_chain(psi.m, n, a);
  Matrix t = m.transpose();
  t = expand_chain(std::move(t), n, b);
  return from_bipartite(t.transpose(), two_n, n);
}

}  // namespace pwfrg::oracle
