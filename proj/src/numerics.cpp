#include "pwfrg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace pwfrg::numerics {

bool all_finite(const Matrix& m) { return m.allFinite(); }

namespace {

void gauge_column(Eigen::Ref<Vector> col) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    const double a = std::abs(col(i));
    if (a > best_abs) {  // strict: lowest index wins on exact ties
      best_abs = a;
      best = i;
    }
  }
  if (col.size() > 0 && col(best) < 0.0) col = -col;
}

// Modified Gram-Schmidt, applied twice.
void orthogonalize(Vector& w, const std::vector<Vector>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) w -= q.dot(w) * q;
  }
}

bool residual_ok(double residual, double energy, double tol) {
  return residual <= tol * std::max(1.0, std::abs(energy));
}

LanczosResult single_step(const LinearOperator& apply, const Vector& q0,
                          const std::optional<Vector>& extra) {
  std::vector<Vector> basis{q0};
  std::vector<Vector> images{apply(q0)};

  Vector r = images[0] - q0.dot(images[0]) * q0;
  orthogonalize(r, basis);
  const double scale = std::max(1.0, images[0].norm());
  if (r.norm() > 1e-14 * scale) {
    basis.push_back(r / r.norm());
    images.push_back(apply(basis.back()));
  }
  if (extra) {
    Vector p = *extra;
    const double p0 = p.norm();
    orthogonalize(p, basis);
    if (p0 > 0.0 && p.norm() > 1e-10 * p0) {
      basis.push_back(p / p.norm());
      images.push_back(apply(basis.back()));
    }
  }

  const auto k = static_cast<Eigen::Index>(basis.size());
  Matrix h(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) h(i, j) = basis[i].dot(images[j]);
  h = 0.5 * (h + h.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);

  LanczosResult out;
  const Vector y = es.eigenvectors().col(0);
  out.vector = Vector::Zero(q0.size());
  Vector image = Vector::Zero(q0.size());
  for (Eigen::Index i = 0; i < k; ++i) {
    out.vector += y(i) * basis[i];
    image += y(i) * images[i];
  }
  const double n = out.vector.norm();
  out.vector /= n;
  image /= n;
  out.energy = out.vector.dot(image);
  out.residual = (image - out.energy * out.vector).norm();
  out.iterations = 1;
  if (k >= 2) out.second_ritz = es.eigenvalues()(1);
  return out;
}

}  // namespace

void fix_sign_gauge(Matrix& columns) {
  for (Eigen::Index c = 0; c < columns.cols(); ++c) gauge_column(columns.col(c));
}

void fix_sign_gauge(Vector& v) { gauge_column(v); }

SpectralDecomposition sym_eig_desc(const Matrix& m) {
  if (m.rows() != m.cols())
    throw Error(Errc::dimension_mismatch, "sym_eig_desc expects a square matrix");
  if (!m.allFinite()) throw Error(Errc::non_finite, "sym_eig_desc input has NaN/Inf");
  const double scale = m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0;
  const double asym = m.size() > 0 ? (m - m.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > 1e-12 * scale)
    throw Error(Errc::non_symmetric, "asymmetry " + std::to_string(asym));

  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw Error(Errc::non_finite, "symmetric eigensolver failed");

  SpectralDecomposition out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  fix_sign_gauge(out.vectors);
  return out;
}

LanczosResult lanczos_ground(const LinearOperator& apply, const Vector& start,
                             const LanczosOptions& options,
                             const std::optional<Vector>& extra_direction) {
  const double start_norm = start.norm();
  if (!(start_norm > 0.0) || !start.allFinite())
    throw Error(Errc::zero_start_vector, "Lanczos start vector is zero or non-finite");

  Vector x = start / start_norm;
  if (options.mode == LanczosMode::single_step) return single_step(apply, x, extra_direction);

  const double tol = options.tol;
  int total = 0;
  LanczosResult best;
  best.energy = std::numeric_limits<double>::infinity();

  while (true) {
    std::vector<Vector> basis{x};
    std::vector<double> alpha;
    std::vector<double> beta;
    double theta = 0.0;
    Vector y;
    std::optional<double> second;

    while (true) {
      const Vector& q = basis.back();
      Vector w = apply(q);
      ++total;
      alpha.push_back(q.dot(w));
      orthogonalize(w, basis);
      const double b = w.norm();

      const auto k = static_cast<Eigen::Index>(alpha.size());
      Vector diag = Eigen::Map<const Vector>(alpha.data(), k);
      Vector sub = k > 1 ? Vector(Eigen::Map<const Vector>(beta.data(), k - 1)) : Vector(0);
      Eigen::SelfAdjointEigenSolver<Matrix> es;
      es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      theta = es.eigenvalues()(0);
      y = es.eigenvectors().col(0);
      second = k > 1 ? std::optional<double>(es.eigenvalues()(1)) : std::nullopt;

      const double estimate = b * std::abs(y(k - 1));
      if (residual_ok(estimate, theta, tol) || total >= options.max_iter) break;
      beta.push_back(b);
      basis.push_back(w / b);
    }

    Vector v = Vector::Zero(x.size());
    for (std::size_t j = 0; j < basis.size(); ++j) v += y(static_cast<Eigen::Index>(j)) * basis[j];
    v.normalize();

    const Vector av = apply(v);
    const double energy = v.dot(av);
    const double residual = (av - energy * v).norm();

    if (energy <= best.energy) {
      best.energy = energy;
      best.vector = v;
      best.residual = residual;
      best.second_ritz = second;
    }
    best.iterations = total;

    if (residual_ok(residual, energy, tol)) {
      LanczosResult out;
      out.energy = energy;
      out.vector = std::move(v);
      out.iterations = total;
      out.residual = residual;
      out.second_ritz = second;
      return out;
    }
    if (total >= options.max_iter) {
      throw NoConvergence("Lanczos exceeded " + std::to_string(options.max_iter) +
                              " iterations, residual " + std::to_string(residual),
                          best);
    }
    x = v;
  }
}

Matrix pinv_cutoff(const Matrix& m, double eps_rel) {
  if (!m.allFinite()) throw Error(Errc::non_finite, "pinv_cutoff input has NaN/Inf");
  if (!(eps_rel > 0.0)) throw Error(Errc::config_parse, "pinv_cutoff eps_rel must be > 0");

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0.0))
    throw Error(Errc::all_singular_values_cut, "matrix has no nonzero singular value");

  const double cut = eps_rel * s(0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (!(s(i) < cut)) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace pwfrg::numerics
