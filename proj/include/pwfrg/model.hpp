#pragma once

#include "pwfrg/numerics.hpp"

namespace pwfrg::model {

using numerics::Matrix;

/// Open spin-1/2 chain with alternating bonds J (1 + delta (-1)^i) between
/// sites i and i+1, sites numbered from 1.
struct ModelSpec {
  double J = 1.0;
  double delta = 0.0;
  static constexpr int local_dim = 2;

  /// Throws Errc::config_parse unless J > 0 and |delta| <= 1.
  void validate() const;
};

/// Spin-1/2 operators in the basis {up, down}.
struct LocalOperators {
  Matrix sz;
  Matrix sp;
  Matrix sm;
  Matrix id;
};

const LocalOperators& spin_half();

double bond_coupling(const ModelSpec& spec, int bond);

/// c * S_1 . S_2 on the 4-dimensional two-site space, index 2*s1 + s2.
Matrix bond_hamiltonian(double c);

/// Bond joining the two halves of a 2N-site chain, i.e. N.
int center_bond_index(int two_n);

}  // namespace pwfrg::model
