#include "pwfrg/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace pwfrg::engine {

namespace {

using Index = Eigen::Index;

int twice(double sz) { return static_cast<int>(std::lround(2.0 * sz)); }

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Center-bond term on the two raw spins next to the cut, for blocks whose
// basis index is 2*xi + s.
void add_raw_center_bond(const Matrix& x, double c, Matrix& y) {
  using Eigen::last;
  using Eigen::seq;
  if (c == 0.0) return;
  const auto up = seq(0, last, 2);
  const auto dn = seq(1, last, 2);
  y(up, up) += 0.25 * c * x(up, up);
  y(dn, dn) += 0.25 * c * x(dn, dn);
  y(up, dn) += -0.25 * c * x(up, dn) + 0.5 * c * x(dn, up);
  y(dn, up) += -0.25 * c * x(dn, up) + 0.5 * c * x(up, dn);
}

void add_center_bond(const Block& left, const Block& right, double c, const Matrix& x, Matrix& y) {
  if (left.edge_is_raw_site && right.edge_is_raw_site) {
    add_raw_center_bond(x, c, y);
    return;
  }
  if (c == 0.0) return;
  y += c * (left.edge_sz * x * right.edge_sz.transpose());
  y += 0.5 * c * (left.edge_sp * x * right.edge_sm.transpose());
  y += 0.5 * c * (left.edge_sm * x * right.edge_sp.transpose());
}

bool nearly_equal_weights(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

// ---------------------------------------------------------------------------
// Blocks

Block empty_block(Side side) {
  Block b;
  b.side = side;
  b.n_sites = 0;
  b.h = Matrix::Zero(1, 1);
  b.edge_sz = Matrix::Zero(1, 1);
  b.edge_sp = Matrix::Zero(1, 1);
  b.edge_sm = Matrix::Zero(1, 1);
  b.sz_total = Matrix::Zero(1, 1);
  b.sz_labels = {0.0};
  return b;
}

Block enlarge(const Block& block, int new_site, const model::ModelSpec& spec) {
  if (new_site != block.n_sites + 1)
    throw Error(Errc::site_not_adjacent, "site " + std::to_string(new_site) +
                                             " is not adjacent to a block of " +
                                             std::to_string(block.n_sites) + " sites");
  const auto& s = model::spin_half();
  const Index d = block.dim();
  const Matrix id = Matrix::Identity(d, d);

  Block out;
  out.side = block.side;
  out.n_sites = new_site;
  out.h = Eigen::kroneckerProduct(block.h, s.id).eval();
  if (block.n_sites > 0) {
    const double c = model::bond_coupling(spec, block.n_sites);
    out.h += c * Eigen::kroneckerProduct(block.edge_sz, s.sz).eval();
    out.h += 0.5 * c * Eigen::kroneckerProduct(block.edge_sp, s.sm).eval();
    out.h += 0.5 * c * Eigen::kroneckerProduct(block.edge_sm, s.sp).eval();
  }
  out.edge_sz = Eigen::kroneckerProduct(id, s.sz).eval();
  out.edge_sp = Eigen::kroneckerProduct(id, s.sp).eval();
  out.edge_sm = Eigen::kroneckerProduct(id, s.sm).eval();
  out.sz_total = Eigen::kroneckerProduct(block.sz_total, s.id).eval() + out.edge_sz;
  if (!block.sz_labels.empty()) {
    out.sz_labels.reserve(static_cast<std::size_t>(2 * d));
    for (double label : block.sz_labels) {
      out.sz_labels.push_back(label + 0.5);
      out.sz_labels.push_back(label - 0.5);
    }
  }
  out.edge_is_raw_site = true;
  return out;
}

Block renormalize(const Block& enlarged, const Matrix& isometry, std::vector<double> kept_labels) {
  if (isometry.rows() != enlarged.dim())
    throw Error(Errc::dimension_mismatch, "isometry rows do not match the block dimension");
  const Matrix at = isometry.transpose();
  Block out;
  out.side = enlarged.side;
  out.n_sites = enlarged.n_sites;
  out.h = symmetrized(at * enlarged.h * isometry);
  out.edge_sz = at * enlarged.edge_sz * isometry;
  out.edge_sp = at * enlarged.edge_sp * isometry;
  out.edge_sm = at * enlarged.edge_sm * isometry;
  out.sz_total = symmetrized(at * enlarged.sz_total * isometry);
  out.sz_labels = std::move(kept_labels);
  out.edge_is_raw_site = false;
  return out;
}

// ---------------------------------------------------------------------------
// Superblock

CenterTensor superblock_apply(const Block& left, const Block& right, double center_coupling,
                              const CenterTensor& x) {
  if (x.m.rows() != left.dim() || x.m.cols() != right.dim())
    throw Error(Errc::dimension_mismatch, "center tensor does not match the superblock");
  Matrix y = left.h * x.m + x.m * right.h.transpose();
  add_center_bond(left, right, center_coupling, x.m, y);
  return CenterTensor(std::move(y));
}

CenterTensor project_total_sz_zero(const Block& left, const Block& right, const CenterTensor& x) {
  if (x.m.rows() != left.dim() || x.m.cols() != right.dim())
    throw Error(Errc::dimension_mismatch, "center tensor does not match the blocks");
  Eigen::SelfAdjointEigenSolver<Matrix> el(left.sz_total);
  Eigen::SelfAdjointEigenSolver<Matrix> er(right.sz_total);
  Matrix rotated = el.eigenvectors().transpose() * x.m * er.eigenvectors();
  for (Index i = 0; i < rotated.rows(); ++i)
    for (Index j = 0; j < rotated.cols(); ++j)
      if (twice(el.eigenvalues()(i)) + twice(er.eigenvalues()(j)) != 0) rotated(i, j) = 0.0;
  return CenterTensor(el.eigenvectors() * rotated * er.eigenvectors().transpose());
}

Superblock::Superblock(const Block& left, const Block& right, double center_coupling, bool restrict_sz)
    : left_(left), right_(right), coupling_(center_coupling), restricted_(restrict_sz) {
  if (!restricted_) {
    dimension_ = left.dim() * right.dim();
    return;
  }
  if (static_cast<Index>(left.sz_labels.size()) != left.dim() ||
      static_cast<Index>(right.sz_labels.size()) != right.dim())
    throw Error(Errc::dimension_mismatch, "Sz-restricted superblock needs labelled block bases");

  std::map<int, std::vector<Index>> rows_by_label;
  std::map<int, std::vector<Index>> cols_by_label;
  for (Index i = 0; i < left.dim(); ++i) rows_by_label[twice(left.sz_labels[i])].push_back(i);
  for (Index j = 0; j < right.dim(); ++j) cols_by_label[twice(right.sz_labels[j])].push_back(j);

  for (auto& [label, rows] : rows_by_label) {
    auto it = cols_by_label.find(-label);
    if (it == cols_by_label.end()) continue;
    Sector s;
    s.rows = rows;
    s.cols = it->second;
    s.h_left = left.h(s.rows, s.rows);
    s.h_right = right.h(s.cols, s.cols);
    s.offset = dimension_;
    dimension_ += static_cast<Index>(s.rows.size() * s.cols.size());
    sectors_.push_back(std::move(s));
  }
}

Vector Superblock::pack(const CenterTensor& x) const {
  if (x.m.rows() != left_.dim() || x.m.cols() != right_.dim())
    throw Error(Errc::dimension_mismatch, "center tensor does not match the superblock");
  if (!restricted_) return Eigen::Map<const Vector>(x.m.data(), x.m.size());
  Vector v(dimension_);
  for (const auto& s : sectors_) {
    const Matrix block = x.m(s.rows, s.cols);
    v.segment(s.offset, block.size()) = Eigen::Map<const Vector>(block.data(), block.size());
  }
  return v;
}

CenterTensor Superblock::unpack(const Vector& v) const {
  if (v.size() != dimension_)
    throw Error(Errc::dimension_mismatch, "vector length does not match the superblock");
  if (!restricted_) return CenterTensor(Eigen::Map<const Matrix>(v.data(), left_.dim(), right_.dim()));
  CenterTensor x = CenterTensor(Matrix::Zero(left_.dim(), right_.dim()));
  for (const auto& s : sectors_) {
    const auto r = static_cast<Index>(s.rows.size());
    const auto c = static_cast<Index>(s.cols.size());
    x.m(s.rows, s.cols) = Eigen::Map<const Matrix>(v.data() + s.offset, r, c);
  }
  return x;
}

Vector Superblock::apply(const Vector& v) const {
  if (!restricted_) {
    const Eigen::Map<const Matrix> x(v.data(), left_.dim(), right_.dim());
    Matrix y = left_.h * x + x * right_.h.transpose();
    add_center_bond(left_, right_, coupling_, x, y);
    return Eigen::Map<const Vector>(y.data(), y.size());
  }
  const CenterTensor x = unpack(v);
  Matrix y = Matrix::Zero(x.m.rows(), x.m.cols());
  add_center_bond(left_, right_, coupling_, x.m, y);
  Vector out = pack(CenterTensor(std::move(y)));
  for (const auto& s : sectors_) {
    const auto r = static_cast<Index>(s.rows.size());
    const auto c = static_cast<Index>(s.cols.size());
    const Eigen::Map<const Matrix> xs(v.data() + s.offset, r, c);
    Eigen::Map<Matrix> ys(out.data() + s.offset, r, c);
    ys += s.h_left * xs + xs * s.h_right.transpose();
  }
  return out;
}

Matrix Superblock::dense() const {
  Matrix h(dimension_, dimension_);
  Vector e = Vector::Zero(dimension_);
  for (Index i = 0; i < dimension_; ++i) {
    e(i) = 1.0;
    h.col(i) = apply(e);
    e(i) = 0.0;
  }
  return symmetrized(h);
}

// ---------------------------------------------------------------------------
// Density matrices and truncation

std::pair<Matrix, Matrix> density_matrices(const CenterTensor& psi) {
  const double n = psi.norm();
  if (!(std::abs(n - 1.0) <= 1e-8))
    throw Error(Errc::not_normalized, "wave function norm is " + std::to_string(n));
  Matrix rho_l = symmetrized(psi.m * psi.m.transpose());
  Matrix rho_r = symmetrized(psi.m.transpose() * psi.m);
  return {std::move(rho_l), std::move(rho_r)};
}

Truncation truncation_operator(const Matrix& rho, int m, double degeneracy_tol,
                               std::span<const double> sz_labels) {
  if (rho.rows() != rho.cols() || rho.rows() == 0)
    throw Error(Errc::invalid_density_matrix, "density matrix must be square and non-empty");
  if (m < 1) throw Error(Errc::invalid_density_matrix, "m must be positive");
  if (!sz_labels.empty() && static_cast<Index>(sz_labels.size()) != rho.rows())
    throw Error(Errc::dimension_mismatch, "one Sz label per density-matrix row expected");
  const double trace = rho.trace();
  if (!(std::abs(trace - 1.0) <= 1e-8))
    throw Error(Errc::invalid_density_matrix, "trace is " + std::to_string(trace));

  const Index dim = rho.rows();
  Vector weights(dim);
  Matrix vectors = Matrix::Zero(dim, dim);
  std::vector<double> labels;

  if (sz_labels.empty()) {
    auto sd = numerics::sym_eig_desc(rho);
    weights = std::move(sd.values);
    vectors = std::move(sd.vectors);
  } else {
    struct Entry {
      double weight;
      Vector vec;
      double label;
    };
    std::map<int, std::vector<Index>> by_label;
    for (Index i = 0; i < dim; ++i) by_label[twice(sz_labels[i])].push_back(i);
    std::vector<Entry> entries;
    for (const auto& [label, idx] : by_label) {
      const Matrix sub = rho(idx, idx);
      const auto sd = numerics::sym_eig_desc(sub);
      for (Index k = 0; k < sd.values.size(); ++k) {
        Vector v = Vector::Zero(dim);
        for (std::size_t r = 0; r < idx.size(); ++r) v(idx[r]) = sd.vectors(static_cast<Index>(r), k);
        entries.push_back({sd.values(k), std::move(v), 0.5 * label});
      }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.weight > b.weight; });
    for (Index k = 0; k < dim; ++k) {
      weights(k) = entries[static_cast<std::size_t>(k)].weight;
      vectors.col(k) = entries[static_cast<std::size_t>(k)].vec;
      labels.push_back(entries[static_cast<std::size_t>(k)].label);
    }
  }

  if (weights.minCoeff() < -1e-10)
    throw Error(Errc::invalid_density_matrix,
                "negative eigenvalue " + std::to_string(weights.minCoeff()));

  Index nonzero = 0;
  while (nonzero < dim && weights(nonzero) > kZeroWeight) ++nonzero;

  Index keep = nonzero;
  if (keep > m) {
    keep = m;
    while (keep > 0 && nearly_equal_weights(weights(keep - 1), weights(keep), degeneracy_tol)) --keep;
    // A leading multiplet wider than m cannot be kept whole; split it.
    if (keep == 0) keep = m;
  }

  Truncation out;
  out.isometry = vectors.leftCols(keep);
  out.kept_weights = weights.head(keep);
  out.weights = std::move(weights);
  out.trunc_error = std::clamp(1.0 - out.kept_weights.sum(), 0.0, 1.0);
  if (!labels.empty()) out.kept_labels.assign(labels.begin(), labels.begin() + keep);
  return out;
}

Matrix center_matrix(const CenterTensor& psi, const Matrix& a, const Matrix& b) {
  if (a.rows() != psi.m.rows() || b.rows() != psi.m.cols())
    throw Error(Errc::dimension_mismatch, "isometries do not match the wave function");
  return a.transpose() * psi.m * b;
}

// ---------------------------------------------------------------------------
// Growth loop

InfiniteDmrg::InfiniteDmrg(RunConfig config) : config_(std::move(config)) {
  config_.validate();
  spec_ = config_.model();
  two_n_ = 2;

  const Matrix id2 = Matrix::Identity(2, 2);
  std::vector<double> labels;
  if (config_.sz_sector_restriction) labels = {0.5, -0.5};
  for (Side side : {Side::left, Side::right}) {
    auto& chain = side == Side::left ? left_ : right_;
    chain.push_back(empty_block(side));
    chain.push_back(renormalize(enlarge(chain.back(), 1, spec_), id2, labels));
  }

  MpsStep boundary;
  boundary.n = 1;
  boundary.a = id2;
  boundary.b = id2;
  boundary.energy = std::numeric_limits<double>::quiet_NaN();
  mps_.steps.push_back(std::move(boundary));

  psi_.resize(2);
  trials_.resize(2);
  directions_.resize(2);
  shifts_.resize(2);
}

const CenterTensor& InfiniteDmrg::wavefunction(int two_n) const {
  const auto n = static_cast<std::size_t>(two_n / 2);
  if (two_n % 2 != 0 || n < 2 || n >= psi_.size())
    throw Error(Errc::dimension_mismatch, "no wave function stored for size " + std::to_string(two_n));
  return psi_[n];
}

const std::optional<predictor::TrialWaveFunction>& InfiniteDmrg::trial(int two_n) const {
  const auto n = static_cast<std::size_t>(two_n / 2);
  if (two_n % 2 != 0 || n >= trials_.size())
    throw Error(Errc::dimension_mismatch, "no step stored for size " + std::to_string(two_n));
  return trials_[n];
}

const std::optional<predictor::ShiftMatrices>& InfiniteDmrg::shift(int n) const {
  return shifts_.at(static_cast<std::size_t>(n));
}

std::optional<predictor::TrialWaveFunction> InfiniteDmrg::predict(int n) {
  try {
    switch (config_.predictor) {
      case PredictorKind::none:
        return std::nullopt;
      case PredictorKind::pwfrg: {
        const auto& shift = shifts_.at(static_cast<std::size_t>(n - 1));
        if (!shift) return std::nullopt;
        return predictor::pwfrg_predict(*shift, psi_.at(static_cast<std::size_t>(n - 2)));
      }
      case PredictorKind::mcculloch: {
        const MpsStep& now = mps_.at(n - 1);
        auto trial = predictor::mcculloch_predict(now.lambda, now.a, now.b, mps_.at(n - 2).lambda,
                                                  config_.pinv_eps);
        trial.target = 2 * n;
        trial.source_now = 2 * n - 2;
        trial.source_small = 2 * n - 4;
        return trial;
      }
    }
  } catch (const Error& e) {
    if (e.code() == Errc::zero_norm || e.code() == Errc::all_singular_values_cut) return std::nullopt;
    throw;
  }
  return std::nullopt;
}

Vector InfiniteDmrg::random_start(const Superblock& sb, const Block& el, const Block& er, int two_n) const {
  std::seed_seq seq{static_cast<std::uint32_t>(config_.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(config_.seed >> 32), static_cast<std::uint32_t>(two_n)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss;
  if (sb.restricted()) {
    Vector v(sb.dimension());
    for (Index i = 0; i < v.size(); ++i) v(i) = gauss(rng);
    return v.normalized();
  }
  CenterTensor x = CenterTensor::zero(el.dim() / 2, er.dim() / 2);
  for (Index j = 0; j < x.m.cols(); ++j)
    for (Index i = 0; i < x.m.rows(); ++i) x.m(i, j) = gauss(rng);
  Vector v = sb.pack(project_total_sz_zero(el, er, x));
  return v.normalized();
}

InfiniteDmrg::Solved InfiniteDmrg::solve_dense(const Superblock& sb, const Block& el, const Block& er) const {
  const Matrix h = sb.dense();
  // Orthonormal basis of the total Sz = 0 subspace; exact degeneracies
  // across sectors (free edge spins) would otherwise leak in.
  Matrix basis;
  if (sb.restricted()) {
    basis = Matrix::Identity(h.rows(), h.cols());
  } else {
    Matrix proj(h.rows(), h.cols());
    for (Eigen::Index i = 0; i < h.cols(); ++i)
      proj.col(i) = sb.pack(project_total_sz_zero(el, er, sb.unpack(Vector::Unit(h.cols(), i))));
    const auto sd = numerics::sym_eig_desc(symmetrized(proj));
    Eigen::Index rank = 0;
    while (rank < sd.values.size() && sd.values(rank) > 0.5) ++rank;
    basis = sd.vectors.leftCols(rank);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(basis.transpose() * h * basis);
  Solved out;
  out.energy = es.eigenvalues()(0);
  out.vector = basis * es.eigenvectors().col(0);
  out.degenerate = es.eigenvalues().size() > 1 &&
                   es.eigenvalues()(1) - out.energy <= kDegeneracyGap * std::max(1.0, std::abs(out.energy));
  return out;
}

InfiniteDmrg::Solved InfiniteDmrg::solve_lanczos(const Superblock& sb, const Vector& start,
                                                 const Vector& fallback_mix,
                                                 const std::optional<Vector>& extra) const {
  numerics::LanczosOptions opts;
  opts.tol = config_.lanczos_tol;
  opts.max_iter = config_.lanczos_max_iter;
  opts.mode = config_.lanczos_mode;
  const numerics::LinearOperator op = [&sb](const Vector& v) { return sb.apply(v); };

  try {
    auto r = numerics::lanczos_ground(op, start, opts, extra);
    Solved out;
    out.degenerate = opts.mode == numerics::LanczosMode::converge && r.second_ritz &&
                     *r.second_ritz - r.energy <= kDegeneracyGap * std::max(1.0, std::abs(r.energy));
    if (out.degenerate) {
      // Deterministic restart with the step's start vector mixed in.
      Vector restart = r.vector + fallback_mix.normalized();
      if (restart.norm() < 1e-8) restart = fallback_mix;
      const int first = r.iterations;
      r = numerics::lanczos_ground(op, restart, opts);
      r.iterations += first;
    }
    out.vector = std::move(r.vector);
    out.energy = r.energy;
    out.iterations = r.iterations;
    return out;
  } catch (const numerics::NoConvergence& e) {
    throw RunAborted(Errc::no_convergence, e.what(), records_);
  }
}

const StepRecord& InfiniteDmrg::step() {
  if (finished()) throw Error(Errc::size_too_large, "run already reached two_n_max");
  const int n = two_n_ / 2 + 1;
  const int size = 2 * n;
  const auto un = static_cast<std::size_t>(n);

  const Block el = enlarge(left_.at(un - 1), n, spec_);
  const Block er = enlarge(right_.at(un - 1), n, spec_);
  const double coupling = model::bond_coupling(spec_, model::center_bond_index(size));
  const Superblock sb(el, er, coupling, config_.sz_sector_restriction);

  StepRecord rec;
  rec.two_n = size;
  std::optional<predictor::TrialWaveFunction> trial;
  Solved sol;
  Vector start_used;
  try {
    if (n <= 3) {
      sol = solve_dense(sb, el, er);
    } else {
      trial = predict(n);
      Vector start;
      if (trial) {
        start = sb.pack(sb.restricted() ? trial->psi : project_total_sz_zero(el, er, trial->psi));
        if (start.norm() < 1e-12) {
          start.resize(0);
          rec.predictor_fallback_flag = true;
        }
      } else if (config_.predictor != PredictorKind::none) {
        rec.predictor_fallback_flag = true;
      }
      const Vector random = random_start(sb, el, er, size);
      if (start.size() == 0) {
        start = random;
      } else if (config_.predictor == PredictorKind::pwfrg && config_.pad_state == PadState::uniform) {
        start = start.normalized() + kUniformPadAdmixture * random;
      }
      std::optional<Vector> extra;
      if (config_.lanczos_mode == numerics::LanczosMode::single_step && trial) {
        // Previous correction carried along by the same shift as the trial.
        const CenterTensor& d = directions_.at(un - 2);
        const auto& shift = shifts_.at(un - 1);
        if (config_.predictor == PredictorKind::pwfrg && shift && d.m.size() > 0) {
          try {
            const auto moved = predictor::pwfrg_predict(*shift, d);
            extra = sb.pack(sb.restricted() ? moved.psi : project_total_sz_zero(el, er, moved.psi));
          } catch (const Error& e) {
            if (e.code() != Errc::zero_norm) throw;
          }
        }
      }
      start_used = start.normalized();
      sol = solve_lanczos(sb, start, random, extra);
      rec.lanczos_iterations = sol.iterations;
    }
  } catch (const RunAborted&) {
    throw;
  } catch (const Error& e) {
    throw RunAborted(e.code(), e.what(), records_);
  }
  rec.degeneracy_flag = sol.degenerate;
  rec.energy = sol.energy;
  if (n >= 3) rec.energy_per_site_est = 0.5 * (sol.energy - records_.back().energy);

  CenterTensor psi = sb.unpack(sol.vector);
  psi.m /= psi.norm();
  {
    Vector flat = Eigen::Map<const Vector>(psi.m.data(), psi.m.size());
    numerics::fix_sign_gauge(flat);
    psi.m = Eigen::Map<const Matrix>(flat.data(), psi.m.rows(), psi.m.cols());
  }

  if (trial && config_.lanczos_mode == numerics::LanczosMode::converge)
    rec.fidelity_error = predictor::fidelity_error(trial->psi, psi);

  const auto [rho_l, rho_r] = density_matrices(psi);
  const bool labelled = config_.sz_sector_restriction;
  const Truncation tl = truncation_operator(rho_l, config_.m_max, config_.degeneracy_tol,
                                            labelled ? std::span<const double>(el.sz_labels)
                                                     : std::span<const double>());
  const Truncation tr = truncation_operator(rho_r, config_.m_max, config_.degeneracy_tol,
                                            labelled ? std::span<const double>(er.sz_labels)
                                                     : std::span<const double>());

  MpsStep ms;
  ms.n = n;
  ms.a = tl.isometry;
  ms.b = tr.isometry;
  ms.lambda = center_matrix(psi, tl.isometry, tr.isometry);
  if (const double ln = ms.lambda.norm(); ln > 0.0) ms.lambda /= ln;
  ms.spectrum_left = tl.weights;
  ms.spectrum_right = tr.weights;
  ms.trunc_left = tl.trunc_error;
  ms.trunc_right = tr.trunc_error;
  ms.energy = sol.energy;
  mps_.steps.push_back(std::move(ms));

  left_.push_back(renormalize(el, tl.isometry, tl.kept_labels));
  right_.push_back(renormalize(er, tr.isometry, tr.kept_labels));

  if (n == 3) {
    shifts_.push_back(
        predictor::init_shift(mps_.at(2).a, mps_.at(3).a, mps_.at(2).b, mps_.at(3).b, config_.pad_state));
  } else if (n >= 4) {
    shifts_.push_back(predictor::update_shift(*shifts_.at(un - 1), mps_.at(n).a, mps_.at(n - 2).a,
                                              mps_.at(n).b, mps_.at(n - 2).b));
  } else {
    shifts_.emplace_back();
  }
  CenterTensor direction;
  if (trial && start_used.size() > 0) {
    Vector d = sb.pack(psi);
    d -= d.dot(start_used) * start_used;
    if (d.norm() > 1e-14) direction = sb.unpack(d);
  }
  directions_.push_back(std::move(direction));
  psi_.push_back(std::move(psi));
  trials_.push_back(std::move(trial));

  rec.trunc_err_left = tl.trunc_error;
  rec.trunc_err_right = tr.trunc_error;
  rec.m_kept_left = static_cast<int>(tl.isometry.cols());
  rec.m_kept_right = static_cast<int>(tr.isometry.cols());

  two_n_ = size;
  records_.push_back(rec);
  return records_.back();
}

RunResult idmrg_run(const RunConfig& config, const std::function<void(const StepRecord&)>& on_step) {
  InfiniteDmrg run(config);
  while (!run.finished()) {
    const StepRecord& rec = run.step();
    if (on_step) on_step(rec);
  }
  return {run.records(), run.mps()};
}

}  // namespace pwfrg::engine
