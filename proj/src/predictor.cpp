#include "pwfrg/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace pwfrg::predictor {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::dimension_mismatch, what);
}

// A(xi s | xi') with L(xi | eta) and P(eta s | eta') contracted over xi, eta, s.
Matrix shift_product(const Matrix& a_next, const Matrix& shift, const Matrix& a_prev) {
  require(a_next.rows() == 2 * shift.rows(), "isometry rows do not match shift matrix rows");
  require(a_prev.rows() == 2 * shift.cols(), "isometry rows do not match shift matrix columns");
  const Matrix padded = Eigen::kroneckerProduct(shift, Matrix::Identity(2, 2)).eval();
  return a_next.transpose() * padded * a_prev;
}

TrialWaveFunction normalized(Matrix m, PredictorKind kind) {
  const double n = m.norm();
  if (!(n > 1e-12) || !std::isfinite(n))
    throw Error(Errc::zero_norm, "predicted trial has norm " + std::to_string(n));
  TrialWaveFunction out;
  out.psi = CenterTensor(m / n);
  out.kind = kind;
  return out;
}

}  // namespace

Eigen::Vector4d pad_vector(PadState pad) {
  if (pad == PadState::uniform) return Eigen::Vector4d::Constant(0.5);
  return {0.5, -0.5, 0.5, -0.5};
}

ShiftMatrices init_shift(const Matrix& a2, const Matrix& a3, const Matrix& b2, const Matrix& b3,
                         PadState pad) {
  require(a2.rows() == 4 && b2.rows() == 4, "A2/B2 must act on two raw spins (4 rows)");
  // Contracting the padded pair into A2 leaves a vector over xi_2.
  const Eigen::VectorXd u = pad_vector(pad);
  const Matrix boundary = Matrix::Identity(2, 2);  // xi_1 = sigma_1

  ShiftMatrices out;
  out.left = shift_product(a3, a2.transpose() * u, boundary);
  out.right = shift_product(b3, b2.transpose() * u, boundary);
  out.step = 3;
  return out;
}

ShiftMatrices update_shift(const ShiftMatrices& shift, const Matrix& a_next, const Matrix& a_prev_small,
                           const Matrix& b_next, const Matrix& b_prev_small) {
  ShiftMatrices out;
  out.left = shift_product(a_next, shift.left, a_prev_small);
  out.right = shift_product(b_next, shift.right, b_prev_small);
  out.step = shift.step + 1;
  return out;
}

TrialWaveFunction pwfrg_predict(const ShiftMatrices& shift, const CenterTensor& psi_small) {
  require(psi_small.m.rows() == 2 * shift.left.cols(), "left shift does not match wave function");
  require(psi_small.m.cols() == 2 * shift.right.cols(), "right shift does not match wave function");
  const Matrix id2 = Matrix::Identity(2, 2);
  const Matrix left = Eigen::kroneckerProduct(shift.left, id2).eval();
  const Matrix right = Eigen::kroneckerProduct(shift.right, id2).eval();

  auto out = normalized(left * psi_small.m * right.transpose(), PredictorKind::pwfrg);
  out.target = 2 * shift.step + 2;
  out.source_small = 2 * shift.step - 2;
  out.source_now = 2 * shift.step;
  return out;
}

double fidelity_error(const CenterTensor& trial, const CenterTensor& converged) {
  require(trial.same_shape(converged), "trial and converged wave functions differ in shape");
  const double nt = trial.norm();
  const double nc = converged.norm();
  if (!(nt > 0.0) || !(nc > 0.0)) throw Error(Errc::zero_norm, "fidelity of a zero vector");
  const double overlap = std::abs(trial.dot(converged)) / (nt * nc);
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

TrialWaveFunction mcculloch_predict(const Matrix& lambda_now, const Matrix& a_now, const Matrix& b_now,
                                    const Matrix& lambda_prev, double eps_rel, const BasisMatch& match) {
  const Eigen::Index dl = lambda_now.rows();
  const Eigen::Index dr = lambda_now.cols();
  require(a_now.cols() == dl && b_now.cols() == dr, "isometries do not match the current center matrix");
  require(a_now.rows() % 2 == 0 && b_now.rows() % 2 == 0, "isometry rows must include one raw spin");
  const Eigen::Index dl_prev = a_now.rows() / 2;
  const Eigen::Index dr_prev = b_now.rows() / 2;
  require(lambda_prev.rows() == dl_prev && lambda_prev.cols() == dr_prev,
          "previous center matrix does not match the isometries");

  // middle(bb', a') = sum R(bb|bb') pinv(lambda_prev)(bb|a) L(a|a')
  Matrix middle = numerics::pinv_cutoff(lambda_prev, eps_rel);
  if (match.right) {
    require(match.right->rows() == dr_prev, "right basis match has wrong shape");
    middle = match.right->transpose() * middle;
  }
  if (match.left) {
    require(match.left->rows() == dl_prev, "left basis match has wrong shape");
    middle = middle * *match.left;
  }
  require(middle.rows() == dr_prev && middle.cols() == dl_prev, "basis match must be square");

  // x(xi, (bb s)) -> y((xi s), bb)
  const Matrix x = lambda_now * b_now.transpose();
  Matrix y(2 * dl, dr_prev);
  for (Eigen::Index xi = 0; xi < dl; ++xi)
    for (Eigen::Index b = 0; b < dr_prev; ++b)
      for (int s = 0; s < 2; ++s) y(2 * xi + s, b) = x(xi, 2 * b + s);

  // z((a sb), xib) -> w(a, (xib sb))
  const Matrix z = a_now * lambda_now;
  Matrix w(dl_prev, 2 * dr);
  for (Eigen::Index a = 0; a < dl_prev; ++a)
    for (Eigen::Index xib = 0; xib < dr; ++xib)
      for (int s = 0; s < 2; ++s) w(a, 2 * xib + s) = z(2 * a + s, xib);

  return normalized(y * middle * w, PredictorKind::mcculloch);
}

}  // namespace pwfrg::predictor
