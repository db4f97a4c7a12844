#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "pwfrg/model.hpp"
#include "pwfrg/numerics.hpp"

namespace pwfrg {

enum class PredictorKind { none, pwfrg, mcculloch };

/// State of each pair of spins added at a chain end by the 2-site shift,
/// over (outer, inner): amplitudes 1/2 (uniform) or (-1)^inner / 2
/// (staggered). The uniform pair is a pure triplet, so a padded singlet
/// has no singlet component; the staggered pair keeps one.
enum class PadState { staggered, uniform };

std::string_view to_string(PredictorKind kind);
std::string_view to_string(numerics::LanczosMode mode);
std::string_view to_string(PadState pad);

/// Parameters of one infinite-system growth run.
///
/// Config files are flat `key = value` lines; `#` starts a comment. Keys
/// match the field names below.
struct RunConfig {
  double J = 1.0;
  double delta = 0.0;
  int m_max = 64;
  int two_n_max = 100;
  PredictorKind predictor = PredictorKind::pwfrg;
  PadState pad_state = PadState::staggered;
  double lanczos_tol = 1e-12;
  int lanczos_max_iter = 500;
  numerics::LanczosMode lanczos_mode = numerics::LanczosMode::converge;
  double pinv_eps = 1e-8;
  double degeneracy_tol = 1e-8;
  std::uint64_t seed = 20240917;
  bool sz_sector_restriction = false;
  std::string output_path = "idmrg.csv";
  // Second leg of `compare-fidelity`.
  PredictorKind compare_predictor = PredictorKind::none;

  model::ModelSpec model() const { return {J, delta}; }

  /// Throws Error(Errc::config_parse) naming the offending field.
  void validate() const;
};

/// Sets one field from its textual value; unknown keys and malformed values
/// throw Error(Errc::config_parse).
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Parses `key = value` text on top of `base`. Does not validate.
RunConfig parse_config(std::string_view text, RunConfig base = {});

RunConfig load_config(const std::string& path);

/// `key=value` line per field, in a fixed order.
std::string echo_config(const RunConfig& config);

/// One row of the idmrg trace.
struct StepRecord {
  int two_n = 0;
  double energy = 0.0;
  std::optional<double> energy_per_site_est;
  double trunc_err_left = 0.0;
  double trunc_err_right = 0.0;
  std::optional<double> fidelity_error;
  int lanczos_iterations = 0;
  int m_kept_left = 0;
  int m_kept_right = 0;
  bool degeneracy_flag = false;
  bool predictor_fallback_flag = false;
};

inline constexpr std::string_view kStepCsvHeader =
    "two_n,energy,energy_per_site_est,trunc_err_left,trunc_err_right,fidelity_error,"
    "lanczos_iterations,m_kept_left,m_kept_right,degeneracy_flag,predictor_fallback_flag";

/// 17 significant digits, enough to round-trip a double.
std::string format_number(double value);

std::string to_csv_row(const StepRecord& record);

/// Inverse of to_csv_row; throws Error(Errc::config_parse) on malformed rows.
StepRecord parse_csv_row(std::string_view line);

}  // namespace pwfrg
