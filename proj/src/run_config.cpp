#include "pwfrg/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace pwfrg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw Error(Errc::config_parse, "field '" + std::string(key) + "': cannot parse '" +
                                      std::string(value) + "' as " + std::string(want));
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) bad_value(key, value, "a real number");
  return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
  Int out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "an integer");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  bad_value(key, value, "a boolean");
}

PredictorKind parse_predictor(std::string_view key, std::string_view value) {
  if (value == "none") return PredictorKind::none;
  if (value == "pwfrg") return PredictorKind::pwfrg;
  if (value == "mcculloch") return PredictorKind::mcculloch;
  bad_value(key, value, "one of none|pwfrg|mcculloch");
}

PadState parse_pad(std::string_view key, std::string_view value) {
  if (value == "staggered") return PadState::staggered;
  if (value == "uniform") return PadState::uniform;
  bad_value(key, value, "one of staggered|uniform");
}

numerics::LanczosMode parse_mode(std::string_view key, std::string_view value) {
  if (value == "converge") return numerics::LanczosMode::converge;
  if (value == "single_step") return numerics::LanczosMode::single_step;
  bad_value(key, value, "one of converge|single_step");
}

[[noreturn]] void invalid(std::string_view key, std::string_view why) {
  throw Error(Errc::config_parse, "field '" + std::string(key) + "': " + std::string(why));
}

}  // namespace

std::string_view to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::none: return "none";
    case PredictorKind::pwfrg: return "pwfrg";
    case PredictorKind::mcculloch: return "mcculloch";
  }
  return "none";
}

std::string_view to_string(PadState pad) {
  return pad == PadState::staggered ? "staggered" : "uniform";
}

std::string_view to_string(numerics::LanczosMode mode) {
  return mode == numerics::LanczosMode::converge ? "converge" : "single_step";
}

void RunConfig::validate() const {
  if (!(J > 0.0)) invalid("J", "must be > 0");
  if (!(std::abs(delta) <= 1.0)) invalid("delta", "must lie in [-1, 1]");
  if (m_max < 4) invalid("m_max", "must be >= 4");
  if (two_n_max < 8 || two_n_max % 2 != 0) invalid("two_n_max", "must be even and >= 8");
  if (!(lanczos_tol > 0.0)) invalid("lanczos_tol", "must be > 0");
  if (lanczos_max_iter < 1) invalid("lanczos_max_iter", "must be >= 1");
  if (!(pinv_eps > 0.0)) invalid("pinv_eps", "must be > 0");
  if (!(degeneracy_tol > 0.0)) invalid("degeneracy_tol", "must be > 0");
  if (output_path.empty()) invalid("output_path", "must not be empty");
  if (lanczos_mode == numerics::LanczosMode::single_step && predictor == PredictorKind::none)
    invalid("lanczos_mode", "single_step needs a predictor (pwfrg or mcculloch)");
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "J") c.J = parse_double(key, value);
  else if (key == "delta") c.delta = parse_double(key, value);
  else if (key == "m_max") c.m_max = parse_int<int>(key, value);
  else if (key == "two_n_max") c.two_n_max = parse_int<int>(key, value);
  else if (key == "predictor") c.predictor = parse_predictor(key, value);
  else if (key == "pad_state") c.pad_state = parse_pad(key, value);
  else if (key == "lanczos_tol") c.lanczos_tol = parse_double(key, value);
  else if (key == "lanczos_max_iter") c.lanczos_max_iter = parse_int<int>(key, value);
  else if (key == "lanczos_mode") c.lanczos_mode = parse_mode(key, value);
  else if (key == "pinv_eps") c.pinv_eps = parse_double(key, value);
  else if (key == "degeneracy_tol") c.degeneracy_tol = parse_double(key, value);
  else if (key == "seed") c.seed = parse_int<std::uint64_t>(key, value);
  else if (key == "sz_sector_restriction") c.sz_sector_restriction = parse_bool(key, value);
  else if (key == "output_path") {
    if (value.empty()) bad_value(key, value, "a path");
    c.output_path = std::string(value);
  } else if (key == "compare_predictor") c.compare_predictor = parse_predictor(key, value);
  else throw Error(Errc::config_parse, "unknown field '" + std::string(key) + "'");
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::config_parse,
                  "line " + std::to_string(line_no) + ": expected key = value, got '" +
                      std::string(line) + "'");
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream out;
  out << "J=" << format_number(c.J) << '\n'
      << "delta=" << format_number(c.delta) << '\n'
      << "m_max=" << c.m_max << '\n'
      << "two_n_max=" << c.two_n_max << '\n'
      << "predictor=" << to_string(c.predictor) << '\n'
      << "pad_state=" << to_string(c.pad_state) << '\n'
      << "lanczos_tol=" << format_number(c.lanczos_tol) << '\n'
      << "lanczos_max_iter=" << c.lanczos_max_iter << '\n'
      << "lanczos_mode=" << to_string(c.lanczos_mode) << '\n'
      << "pinv_eps=" << format_number(c.pinv_eps) << '\n'
      << "degeneracy_tol=" << format_number(c.degeneracy_tol) << '\n'
      << "seed=" << c.seed << '\n'
      << "sz_sector_restriction=" << (c.sz_sector_restriction ? "true" : "false") << '\n'
      << "output_path=" << c.output_path << '\n'
      << "compare_predictor=" << to_string(c.compare_predictor) << '\n';
  return out.str();
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string to_csv_row(const StepRecord& r) {
  std::string out;
  out += std::to_string(r.two_n);
  out += ',' + format_number(r.energy);
  out += ',' + (r.energy_per_site_est ? format_number(*r.energy_per_site_est) : std::string());
  out += ',' + format_number(r.trunc_err_left);
  out += ',' + format_number(r.trunc_err_right);
  out += ',' + (r.fidelity_error ? format_number(*r.fidelity_error) : std::string());
  out += ',' + std::to_string(r.lanczos_iterations);
  out += ',' + std::to_string(r.m_kept_left);
  out += ',' + std::to_string(r.m_kept_right);
  out += ',' + std::string(r.degeneracy_flag ? "1" : "0");
  out += ',' + std::string(r.predictor_fallback_flag ? "1" : "0");
  return out;
}

StepRecord parse_csv_row(std::string_view line) {
  std::vector<std::string_view> cells;
  while (true) {
    const auto comma = line.find(',');
    cells.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line = line.substr(comma + 1);
  }
  if (cells.size() != 11)
    throw Error(Errc::config_parse, "expected 11 CSV cells, got " + std::to_string(cells.size()));

  auto opt = [](std::string_view key, std::string_view v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    return parse_double(key, v);
  };
  StepRecord r;
  r.two_n = parse_int<int>("two_n", cells[0]);
  r.energy = parse_double("energy", cells[1]);
  r.energy_per_site_est = opt("energy_per_site_est", cells[2]);
  r.trunc_err_left = parse_double("trunc_err_left", cells[3]);
  r.trunc_err_right = parse_double("trunc_err_right", cells[4]);
  r.fidelity_error = opt("fidelity_error", cells[5]);
  r.lanczos_iterations = parse_int<int>("lanczos_iterations", cells[6]);
  r.m_kept_left = parse_int<int>("m_kept_left", cells[7]);
  r.m_kept_right = parse_int<int>("m_kept_right", cells[8]);
  r.degeneracy_flag = parse_bool("degeneracy_flag", cells[9]);
  r.predictor_fallback_flag = parse_bool("predictor_fallback_flag", cells[10]);
  return r;
}

}  // namespace pwfrg
