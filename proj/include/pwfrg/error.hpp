#pragma once

#include <stdexcept>
#include <string>

namespace pwfrg {

enum class Errc {
  non_symmetric,
  non_finite,
  zero_start_vector,
  no_convergence,
  all_singular_values_cut,
  dimension_mismatch,
  site_not_adjacent,
  not_normalized,
  invalid_density_matrix,
  zero_norm,
  odd_system_size,
  size_too_large,
  config_parse,
  io,
};

const char* to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::non_symmetric: return "NonSymmetric";
    case Errc::non_finite: return "NonFinite";
    case Errc::zero_start_vector: return "ZeroStartVector";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::all_singular_values_cut: return "AllSingularValuesCut";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::site_not_adjacent: return "SiteNotAdjacent";
    case Errc::not_normalized: return "NotNormalized";
    case Errc::invalid_density_matrix: return "InvalidDensityMatrix";
    case Errc::zero_norm: return "ZeroNorm";
    case Errc::odd_system_size: return "OddSystemSize";
    case Errc::size_too_large: return "SizeTooLarge";
    case Errc::config_parse: return "ConfigParse";
    case Errc::io: return "Io";
  }
  return "Unknown";
}

}  // namespace pwfrg
