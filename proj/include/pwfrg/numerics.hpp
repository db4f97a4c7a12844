#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "pwfrg/error.hpp"

namespace pwfrg::numerics {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigen-decomposition of a real symmetric matrix, eigenvalues in
/// descending order and eigenvectors stored column-wise.
struct SpectralDecomposition {
  Vector values;
  Matrix vectors;
};

bool all_finite(const Matrix& m);

/// Flips each column so that its largest-magnitude entry is positive
/// (first such entry on exact ties).
void fix_sign_gauge(Matrix& columns);
void fix_sign_gauge(Vector& v);

/// Throws Errc::non_symmetric when M deviates from symmetry by more than
/// 1e-12 relative to its largest entry, Errc::non_finite on NaN/Inf.
SpectralDecomposition sym_eig_desc(const Matrix& m);

enum class LanczosMode { converge, single_step };

struct LanczosOptions {
  double tol = 1e-12;
  int max_iter = 500;
  LanczosMode mode = LanczosMode::converge;
};

struct LanczosResult {
  double energy = 0.0;
  Vector vector;
  int iterations = 0;
  double residual = 0.0;
  // Second-lowest Ritz value of the final projected problem, when the
  // Krylov space had dimension >= 2. Used by callers to detect
  // (near-)degenerate ground states.
  std::optional<double> second_ritz;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, LanczosResult best)
      : Error(Errc::no_convergence, what), best_(std::move(best)) {}
  const LanczosResult& best() const noexcept { return best_; }

 private:
  LanczosResult best_;
};

using LinearOperator = std::function<Vector(const Vector&)>;

/// Lowest eigenpair of a symmetric operator by Lanczos iteration with full
/// reorthogonalization.
///
/// In converge mode the iteration stops once the Ritz residual satisfies
/// ||A v - E v|| <= tol * max(1, |E|); the residual is re-measured with an
/// explicit product before returning, and the iteration restarts from the
/// current Ritz vector if the measured value fails the test. `iterations`
/// counts Krylov expansions across restarts (an exact eigenvector as start
/// returns after one).
///
/// In single_step mode exactly one expansion is done: the result is the
/// Rayleigh-Ritz optimum over span{start, A start} and, when given,
/// `extra_direction`.
LanczosResult lanczos_ground(const LinearOperator& apply, const Vector& start,
                             const LanczosOptions& options = {},
                             const std::optional<Vector>& extra_direction = std::nullopt);

/// Moore-Penrose pseudo-inverse after zeroing singular values below
/// eps_rel * s_max.
Matrix pinv_cutoff(const Matrix& m, double eps_rel = 1e-8);

}  // namespace pwfrg::numerics
