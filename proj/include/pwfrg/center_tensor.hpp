#pragma once

#include <Eigen/Dense>

#include "pwfrg/numerics.hpp"

namespace pwfrg::engine {

using numerics::Matrix;
using numerics::Vector;

/// Renormalized superblock wave function psi(xi, s, sb, xib).
///
/// Stored as a matrix whose row index is (xi, s) -> 2*xi + s over the left
/// block plus its neighbouring raw site and whose column index is
/// (xib, sb) -> 2*xib + sb over the right block plus its raw site. Spin
/// index 0 is up, 1 is down.
struct CenterTensor {
  Matrix m;

  CenterTensor() = default;
  explicit CenterTensor(Matrix mat) : m(std::move(mat)) {}
  static CenterTensor zero(Eigen::Index dl, Eigen::Index dr) {
    return CenterTensor(Matrix::Zero(2 * dl, 2 * dr));
  }

  Eigen::Index dl() const { return m.rows() / 2; }
  Eigen::Index dr() const { return m.cols() / 2; }

  double operator()(Eigen::Index xi, int s, int sb, Eigen::Index xib) const {
    return m(2 * xi + s, 2 * xib + sb);
  }
  double& operator()(Eigen::Index xi, int s, int sb, Eigen::Index xib) {
    return m(2 * xi + s, 2 * xib + sb);
  }

  double norm() const { return m.norm(); }
  double dot(const CenterTensor& other) const { return m.cwiseProduct(other.m).sum(); }
  bool same_shape(const CenterTensor& other) const {
    return m.rows() == other.m.rows() && m.cols() == other.m.cols();
  }
};

}  // namespace pwfrg::engine
