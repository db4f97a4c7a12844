// pwfrg <idmrg|ed|compare-fidelity> --config <path> [--set key=value ...]
//
// Exit status: 0 success, 2 configuration error, 3 numerical failure,
// 4 file error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pwfrg/engine.hpp"
#include "pwfrg/oracle.hpp"
#include "pwfrg/run_config.hpp"

namespace {

using pwfrg::Errc;
using pwfrg::Error;
using pwfrg::RunConfig;
using pwfrg::StepRecord;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open " + path + " for writing");
  return out;
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? pwfrg::format_number(*v) : std::string();
}

void write_summary(const RunConfig& config, const std::vector<StepRecord>& steps) {
  std::ofstream out = open_output(config.output_path + ".summary");
  int total = 0;
  for (const auto& s : steps) total += s.lanczos_iterations;
  if (!steps.empty()) {
    out << "final_two_n=" << steps.back().two_n << '\n';
    out << "final_energy=" << pwfrg::format_number(steps.back().energy) << '\n';
    out << "final_energy_per_site_est=" << optional_cell(steps.back().energy_per_site_est) << '\n';
  }
  out << "total_lanczos_iterations=" << total << '\n';
  out << pwfrg::echo_config(config);
  if (!out) throw Error(Errc::io, "write failed for " + config.output_path + ".summary");
}

int run_idmrg(const RunConfig& config) {
  std::ofstream csv = open_output(config.output_path);
  csv << pwfrg::kStepCsvHeader << '\n' << std::flush;
  auto on_step = [&](const StepRecord& rec) {
    csv << pwfrg::to_csv_row(rec) << '\n' << std::flush;
    if (!csv) throw Error(Errc::io, "write failed for " + config.output_path);
  };
  try {
    const auto result = pwfrg::engine::idmrg_run(config, on_step);
    write_summary(config, result.steps);
    const auto& last = result.steps.back();
    std::cout << "two_n=" << last.two_n << " energy=" << pwfrg::format_number(last.energy)
              << " energy_per_site_est=" << optional_cell(last.energy_per_site_est) << '\n';
  } catch (const pwfrg::engine::RunAborted& e) {
    write_summary(config, e.partial());
    throw;
  }
  return 0;
}

int run_ed(const RunConfig& config) {
  std::ofstream out = open_output(config.output_path);
  out << "two_n,energy\n";
  const int cap = std::min(config.two_n_max, pwfrg::oracle::kMaxSites);
  for (int two_n = 2; two_n <= cap; two_n += 2) {
    const auto gs = pwfrg::oracle::ed_ground(config.model(), two_n);
    out << two_n << ',' << pwfrg::format_number(gs.energy) << '\n' << std::flush;
    std::cout << two_n << ' ' << pwfrg::format_number(gs.energy) << '\n';
  }
  if (!out) throw Error(Errc::io, "write failed for " + config.output_path);
  return 0;
}

int run_compare(const RunConfig& config) {
  RunConfig second = config;
  second.predictor = config.compare_predictor;
  if (second.predictor == pwfrg::PredictorKind::none &&
      second.lanczos_mode == pwfrg::numerics::LanczosMode::single_step)
    second.lanczos_mode = pwfrg::numerics::LanczosMode::converge;

  std::ofstream out = open_output(config.output_path);
  const auto a = pwfrg::engine::idmrg_run(config).steps;
  const auto b = pwfrg::engine::idmrg_run(second).steps;

  out << "two_n,energy_a,energy_b,fidelity_error_a,fidelity_error_b,lanczos_iterations_a,"
         "lanczos_iterations_b\n";
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    out << a[i].two_n << ',' << pwfrg::format_number(a[i].energy) << ','
        << pwfrg::format_number(b[i].energy) << ',' << optional_cell(a[i].fidelity_error) << ','
        << optional_cell(b[i].fidelity_error) << ',' << a[i].lanczos_iterations << ','
        << b[i].lanczos_iterations << '\n';
  }
  out << std::flush;
  if (!out) throw Error(Errc::io, "write failed for " + config.output_path);
  int total_a = 0;
  int total_b = 0;
  for (const auto& s : a) total_a += s.lanczos_iterations;
  for (const auto& s : b) total_b += s.lanczos_iterations;
  std::cout << "total_lanczos_iterations " << pwfrg::to_string(config.predictor) << '=' << total_a << ' '
            << pwfrg::to_string(second.predictor) << '=' << total_b << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infinite-system DMRG with wave-function prediction"};
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("command", command, "idmrg, ed or compare-fidelity")
      ->required()
      ->check(CLI::IsMember({"idmrg", "ed", "compare-fidelity"}));
  app.add_option("--config", config_path, "key = value configuration file")->required();
  app.add_option("--set", overrides, "key=value override, repeatable");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    RunConfig config = pwfrg::load_config(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(Errc::config_parse, "--set expects key=value, got '" + kv + "'");
      pwfrg::apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    config.validate();

    if (command == "idmrg") return run_idmrg(config);
    if (command == "ed") return run_ed(config);
    return run_compare(config);
  } catch (const Error& e) {
    std::cerr << "pwfrg: " << e.what() << '\n';
    if (e.code() == Errc::config_parse) return kExitConfig;
    if (e.code() == Errc::io) return kExitIo;
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "pwfrg: " << e.what() << '\n';
    return kExitNumerical;
  }
}
