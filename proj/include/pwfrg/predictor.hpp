#pragma once

#include <optional>

#include "pwfrg/center_tensor.hpp"
#include "pwfrg/run_config.hpp"

namespace pwfrg::predictor {

using engine::CenterTensor;
using numerics::Matrix;

/// Basis-adjustment matrices of the 2-site shift.
///
/// `left(xi_N | xi_{N-2})` carries the left block basis of a chain two sites
/// shorter into the current one; `right` does the same on the mirrored side.
/// `step` is N.
struct ShiftMatrices {
  Matrix left;
  Matrix right;
  int step = 0;
};

struct TrialWaveFunction {
  CenterTensor psi;
  PredictorKind kind = PredictorKind::none;
  int source_small = 0;  // size of the older wave function used
  int source_now = 0;    // size of the most recent converged step
  int target = 0;        // size the trial is meant for
};

/// Two-spin pad amplitudes indexed 2*outer + inner; unit norm.
Eigen::Vector4d pad_vector(PadState pad);

/// First shift pair, built from the isometries of sizes 4 and 6. Each end
/// of the shorter chain is padded with two spins in the `pad` state, so
/// without truncation the returned matrices are isometries.
ShiftMatrices init_shift(const Matrix& a2, const Matrix& a3, const Matrix& b2, const Matrix& b3,
                         PadState pad = PadState::staggered);

/// L_{N+1}(xi_{N+1}|xi_{N-1}) = sum A_{N+1}(xi_N s|xi_{N+1}) L_N(xi_N|xi_{N-2}) A_{N-1}(xi_{N-2} s|xi_{N-1})
/// and the mirror image for the right side.
ShiftMatrices update_shift(const ShiftMatrices& shift, const Matrix& a_next, const Matrix& a_prev_small,
                           const Matrix& b_next, const Matrix& b_prev_small);

/// Trial for size 2N+2 from the converged size-(2N-2) wave function and the
/// step-N shift pair, normalized. Throws Errc::zero_norm if the shift
/// annihilates it.
TrialWaveFunction pwfrg_predict(const ShiftMatrices& shift, const CenterTensor& psi_small);

/// 1 - |<trial, converged>| for unit-norm inputs.
double fidelity_error(const CenterTensor& trial, const CenterTensor& converged);

/// Optional basis-matching matrices between an older and a newer MPS; the
/// infinite-system algorithm always produces identities, which is what an
/// empty value means.
struct BasisMatch {
  std::optional<Matrix> left;   // L(xi_{N-1} | xi'_{N-1})
  std::optional<Matrix> right;  // R(xib_{N-1} | xib'_{N-1})
};

/// Inverse-based trial for size 2N+2:
///   psi(xi, s, sb, xib) = sum lambda_now(xi|ab) b_now(b s|ab) pinv(lambda_prev)(b|a)
///                             a_now(a sb|al) lambda_now(al|xib)
/// Throws Errc::all_singular_values_cut or Errc::zero_norm.
TrialWaveFunction mcculloch_predict(const Matrix& lambda_now, const Matrix& a_now, const Matrix& b_now,
                                    const Matrix& lambda_prev, double eps_rel = 1e-8,
                                    const BasisMatch& match = {});

}  // namespace pwfrg::predictor
