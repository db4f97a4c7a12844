#pragma once

#include <span>

#include "pwfrg/center_tensor.hpp"
#include "pwfrg/model.hpp"
#include "pwfrg/run_config.hpp"

/// Brute-force references on the full 2^(2N)-dimensional chain.
///
/// Basis: site i is bit i-1 of the state index, bit value 0 = up.
namespace pwfrg::oracle {

using numerics::Matrix;
using numerics::Vector;

inline constexpr int kMaxSites = 20;
inline constexpr int kMaxInverseSites = 16;

/// H x for the open 2N-site chain. Throws Errc::size_too_large above kMaxSites.
Vector full_apply(const model::ModelSpec& spec, int two_n, const Vector& x);

struct GroundState {
  double energy = 0.0;
  Vector psi;  // unit norm, largest-magnitude entry positive
};

/// Lowest eigenpair, searched in the total Sz = 0 sector.
GroundState ed_ground(const model::ModelSpec& spec, int two_n);

/// Matrix view with sites 1..k_left as rows and the rest as columns. Rows
/// are indexed by sum s_k 2^(k_left-k), site 1 most significant; columns
/// use the mirrored numbering (site 2N is mirrored site 1) the same way.
Matrix bipartite(const Vector& x, int two_n, int k_left);
Vector from_bipartite(const Matrix& m, int two_n, int k_left);

/// Pads a (2N-2)-site state with a spin pair at each end, in the state
/// given by predictor::pad_vector.
Vector raw_predict(const Vector& psi_small, int two_n_small, PadState pad = PadState::staggered);

/// Phi_L pinv(Psi(2N-2)) Phi_R, normalized, where Phi_L/Phi_R are Psi(2N)
/// cut one site right/left of the center. Target size 2N+2 <= kMaxInverseSites.
Vector raw_mcculloch(const Vector& psi_small, const Vector& psi_now, int two_n_now, double eps_rel = 1e-8);

/// Full vector -> center tensor through the isometry chains a[k] = A_{k+1},
/// b[k] = B_{k+1}, k = 0..N-2.
engine::CenterTensor block_transform(const Vector& x, int two_n, std::span<const Matrix> a,
                                     std::span<const Matrix> b);

/// Inverse direction of block_transform: embeds a center tensor in the full space.
Vector block_lift(const engine::CenterTensor& psi, int two_n, std::span<const Matrix> a,
                  std::span<const Matrix> b);

}  // namespace pwfrg::oracle
