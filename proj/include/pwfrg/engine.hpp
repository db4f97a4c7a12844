#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pwfrg/center_tensor.hpp"
#include "pwfrg/model.hpp"
#include "pwfrg/predictor.hpp"
#include "pwfrg/run_config.hpp"

namespace pwfrg::engine {

enum class Side { left, right };

/// Renormalized chain segment attached to one end of the chain.
///
/// Sites are numbered from the block's own chain end: the left block holds
/// absolute sites 1..n_sites, the right block holds the mirrored sites
/// 2N..2N-n_sites+1 of a 2N-site chain. For even 2N the bond between
/// mirrored sites k and k+1 is absolute bond 2N-k, which has the parity of
/// k, so both sides use bond_coupling(k) and never desynchronize as the
/// chain grows.
struct Block {
  Side side = Side::left;
  int n_sites = 0;
  Matrix h;
  Matrix edge_sz;  // spin operators of site n_sites
  Matrix edge_sp;
  Matrix edge_sm;
  Matrix sz_total;
  // Per-state total Sz, only when every basis state has definite Sz.
  std::vector<double> sz_labels;
  // True when the basis is (previous basis) x (raw edge spin), index 2*xi + s.
  bool edge_is_raw_site = false;

  Eigen::Index dim() const { return h.rows(); }
  int first_site() const { return n_sites > 0 ? 1 : 0; }
  int last_site() const { return n_sites; }
};

/// Zero-site block: one state, zero Hamiltonian.
Block empty_block(Side side);

/// Adds raw site `new_site` (numbered from the block's chain end) to the
/// block. Throws Errc::site_not_adjacent unless new_site == n_sites + 1.
Block enlarge(const Block& block, int new_site, const model::ModelSpec& spec);

/// Projects an enlarged block onto the columns of `isometry`.
Block renormalize(const Block& enlarged, const Matrix& isometry, std::vector<double> kept_labels = {});

/// Superblock Hamiltonian (left + right + center bond) applied to x without
/// forming the full matrix. Throws Errc::dimension_mismatch.
CenterTensor superblock_apply(const Block& left, const Block& right, double center_coupling,
                              const CenterTensor& x);

/// Projects x onto total Sz = 0 using the blocks' sz_total operators.
CenterTensor project_total_sz_zero(const Block& left, const Block& right, const CenterTensor& x);

/// Superblock operator on flat vectors. With `restrict_sz` the vectors hold
/// only the total-Sz = 0 entries of the center tensor, which requires both
/// blocks to carry sz_labels.
class Superblock {
 public:
  Superblock(const Block& left, const Block& right, double center_coupling, bool restrict_sz);

  Eigen::Index dimension() const { return dimension_; }
  bool restricted() const { return restricted_; }

  Vector apply(const Vector& v) const;
  Vector pack(const CenterTensor& x) const;
  CenterTensor unpack(const Vector& v) const;
  Matrix dense() const;

 private:
  struct Sector {
    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> cols;
    Matrix h_left;
    Matrix h_right;
    Eigen::Index offset = 0;
  };

  const Block& left_;
  const Block& right_;
  double coupling_;
  bool restricted_;
  Eigen::Index dimension_ = 0;
  std::vector<Sector> sectors_;
};

/// Reduced density matrices over (xi s) and (xib sb).
/// Throws Errc::not_normalized if |psi| deviates from 1 by more than 1e-8.
std::pair<Matrix, Matrix> density_matrices(const CenterTensor& psi);

struct Truncation {
  Matrix isometry;      // dim_old x m_kept
  Vector kept_weights;  // descending
  Vector weights;       // full spectrum, descending
  double trunc_error = 0.0;
  std::vector<double> kept_labels;  // when Sz labels were supplied
};

/// Weights at or below this are treated as exact zeros and never kept.
inline constexpr double kZeroWeight = 1e-14;

/// Keeps the leading eigenvectors of rho, at most m of them, without splitting
/// a multiplet of weights equal to within `degeneracy_tol` (relative).
/// With `sz_labels` rho is diagonalized sector by sector and the kept
/// states inherit their labels.
/// Throws Errc::invalid_density_matrix.
Truncation truncation_operator(const Matrix& rho, int m, double degeneracy_tol,
                               std::span<const double> sz_labels = {});

/// Lambda(xi'|xib') = sum A(xi s|xi') B(xib sb|xib') psi(xi s sb xib).
Matrix center_matrix(const CenterTensor& psi, const Matrix& a, const Matrix& b);

/// Per-step matrix-product data of one run. Entry N describes size 2N;
/// entry 1 holds the boundary maps A_1 = B_1 = identity.
struct MpsStep {
  int n = 0;
  Matrix a;
  Matrix b;
  Matrix lambda;  // unit Frobenius norm
  Vector spectrum_left;
  Vector spectrum_right;
  double trunc_left = 0.0;
  double trunc_right = 0.0;
  double energy = 0.0;
};

struct MpsRecord {
  std::vector<MpsStep> steps;

  const MpsStep& at(int n) const { return steps.at(static_cast<std::size_t>(n - 1)); }
  int last_n() const { return static_cast<int>(steps.size()); }
};

/// Degenerate-ground-state threshold on the two lowest eigenvalues.
inline constexpr double kDegeneracyGap = 1e-10;

/// Weight of the seeded random vector added to a uniform-pad trial before
/// Lanczos. That trial has no singlet component, so without the seed the
/// iteration would settle in an excited multiplet.
inline constexpr double kUniformPadAdmixture = 1e-3;

/// One infinite-system growth run. Each call to step() adds two sites.
class InfiniteDmrg {
 public:
  explicit InfiniteDmrg(RunConfig config);

  bool finished() const { return two_n_ >= config_.two_n_max; }
  const StepRecord& step();

  int two_n() const { return two_n_; }
  const RunConfig& config() const { return config_; }
  const MpsRecord& mps() const { return mps_; }
  const std::vector<StepRecord>& records() const { return records_; }

  /// Converged (or, in single_step mode, improved) wave function at size two_n.
  const CenterTensor& wavefunction(int two_n) const;
  /// Predicted start vector used at size two_n, before any Sz projection.
  const std::optional<predictor::TrialWaveFunction>& trial(int two_n) const;
  const Block& left_block(int n_sites) const { return left_.at(static_cast<std::size_t>(n_sites)); }
  const Block& right_block(int n_sites) const { return right_.at(static_cast<std::size_t>(n_sites)); }
  const std::optional<predictor::ShiftMatrices>& shift(int n) const;

 private:
  struct Solved {
    Vector vector;
    double energy = 0.0;
    int iterations = 0;
    bool degenerate = false;
  };

  std::optional<predictor::TrialWaveFunction> predict(int n);
  Vector random_start(const Superblock& sb, const Block& el, const Block& er, int two_n) const;
  Solved solve_dense(const Superblock& sb, const Block& el, const Block& er) const;
  Solved solve_lanczos(const Superblock& sb, const Vector& start, const Vector& fallback_mix,
                       const std::optional<Vector>& extra) const;

  RunConfig config_;
  model::ModelSpec spec_;
  int two_n_ = 0;
  std::vector<Block> left_;   // index = number of sites
  std::vector<Block> right_;
  std::vector<CenterTensor> psi_;  // index N
  // Part of psi_ orthogonal to that step's start vector; single_step only.
  std::vector<CenterTensor> directions_;
  std::vector<std::optional<predictor::TrialWaveFunction>> trials_;
  std::vector<std::optional<predictor::ShiftMatrices>> shifts_;
  MpsRecord mps_;
  std::vector<StepRecord> records_;
};

/// A run that stopped on a numerical failure; carries the rows completed
/// before it.
class RunAborted : public Error {
 public:
  RunAborted(Errc code, const std::string& what, std::vector<StepRecord> partial)
      : Error(code, what), partial_(std::move(partial)) {}
  const std::vector<StepRecord>& partial() const noexcept { return partial_; }

 private:
  std::vector<StepRecord> partial_;
};

struct RunResult {
  std::vector<StepRecord> steps;
  MpsRecord mps;
};

/// Grows from 2N = 4 to config.two_n_max, calling on_step after each step.
RunResult idmrg_run(const RunConfig& config, const std::function<void(const StepRecord&)>& on_step = {});

}  // namespace pwfrg::engine
