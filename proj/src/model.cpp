#include "pwfrg/model.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace pwfrg::model {

void ModelSpec::validate() const {
  if (!(J > 0.0) || !std::isfinite(J))
    throw Error(Errc::config_parse, "J must be a finite positive number");
  if (!(std::abs(delta) <= 1.0))
    throw Error(Errc::config_parse, "delta must lie in [-1, 1]");
}

const LocalOperators& spin_half() {
  static const LocalOperators ops = [] {
    LocalOperators o;
    o.sz = Matrix::Zero(2, 2);
    o.sz(0, 0) = 0.5;
    o.sz(1, 1) = -0.5;
    o.sp = Matrix::Zero(2, 2);
    o.sp(0, 1) = 1.0;
    o.sm = o.sp.transpose();
    o.id = Matrix::Identity(2, 2);
    return o;
  }();
  return ops;
}

double bond_coupling(const ModelSpec& spec, int bond) {
  const double sign = (bond % 2 == 0) ? 1.0 : -1.0;
  return spec.J * (1.0 + spec.delta * sign);
}

Matrix bond_hamiltonian(double c) {
  const auto& s = spin_half();
  Matrix h = Eigen::kroneckerProduct(s.sz, s.sz).eval();
  h += 0.5 * Eigen::kroneckerProduct(s.sp, s.sm).eval();
  h += 0.5 * Eigen::kroneckerProduct(s.sm, s.sp).eval();
  return c * h;
}

int center_bond_index(int two_n) {
  if (two_n < 2 || two_n % 2 != 0)
    throw Error(Errc::odd_system_size, "system size must be even and >= 2, got " +
                                           std::to_string(two_n));
  return two_n / 2;
}

}  // namespace pwfrg::model
