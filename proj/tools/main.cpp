// Command line front end: run sweep experiments, evaluate the closed-form
// error bound, and report the estimator's operation-count model.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nfirs/analysis.hpp"
#include "nfirs/harness.hpp"

namespace {

std::string fmt9(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

nfirs::ExperimentConfig preset_by_name(const std::string& name) {
  if (name == "paper") return nfirs::paper_preset();
  if (name == "desk") return nfirs::desk_preset();
  throw std::invalid_argument("unknown preset '" + name +
                              "' (expected paper or desk)");
}

// Per-sweep-point aggregate of the result rows, in row order.
struct PointSummary {
  std::string var;
  std::string value;
  int ok = 0;
  int failed = 0;
  double nmse_sum = 0.0;  // linear domain
  double crlb_sum = 0.0;
};

void print_run_summary(const std::vector<nfirs::ResultRow>& rows,
                       const std::string& out_path) {
  std::vector<PointSummary> points;
  for (const auto& row : rows) {
    if (points.empty() || points.back().value != row.sweep_value ||
        points.back().var != row.sweep_var) {
      points.push_back({row.sweep_var, row.sweep_value, 0, 0, 0.0, 0.0});
    }
    auto& p = points.back();
    if (row.error.empty()) {
      ++p.ok;
      p.nmse_sum += std::pow(10.0, row.nmse_db / 10.0);
      p.crlb_sum += row.crlb;
    } else {
      ++p.failed;
    }
  }
  std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
  for (const auto& p : points) {
    std::cout << "  " << p.var << "=" << p.value << ": " << p.ok << " ok";
    if (p.failed > 0) std::cout << ", " << p.failed << " failed";
    if (p.ok > 0) {
      const double mean_nmse = p.nmse_sum / p.ok;
      std::cout << ", mean nmse " << fmt9(10.0 * std::log10(mean_nmse))
                << " dB, mean crlb " << fmt9(p.crlb_sum / p.ok);
    }
    std::cout << "\n";
  }
}

int run_command(const std::string& config_path, const std::string& preset,
                bool has_seed, std::uint64_t seed, const std::string& out) {
  nfirs::ExperimentConfig cfg = config_path.empty()
                                    ? preset_by_name(preset)
                                    : nfirs::load_config(config_path);
  if (has_seed) cfg.seed = seed;
  if (!out.empty()) cfg.output_path = out;
  nfirs::validate_config(cfg);

  const auto rows = nfirs::run_experiment(cfg);
  nfirs::emit_results(rows, cfg.output_path);
  print_run_summary(rows, cfg.output_path);

  for (const auto& row : rows) {
    if (!row.error.empty()) {
      std::cerr << "trial " << row.sweep_var << "=" << row.sweep_value << "/"
                << row.trial << " failed: " << row.error << "\n";
    }
  }
  return 0;
}

int crlb_command(const nfirs::CrlbInputs& in) {
  const double bound = nfirs::crlb(in);
  std::cout << "noise_power " << fmt9(in.noise_power) << "\n"
            << "subcarriers " << in.subcarriers << "\n"
            << "bs_rows " << in.n_z << "\n"
            << "bs_cols " << in.n_y << "\n"
            << "irs_elements " << in.n_r << "\n"
            << "pilot_symbols " << in.pilot_symbols << "\n"
            << "crlb_per_subcarrier " << fmt9(bound / in.subcarriers) << "\n"
            << "crlb_total " << fmt9(bound) << "\n";
  return 0;
}

int complexity_command(const std::string& preset, int t_max, int pilots,
                       const std::vector<int>& ranks) {
  nfirs::ExperimentConfig cfg = preset_by_name(preset);
  if (t_max >= 0) cfg.hyper.t_max = t_max;
  if (pilots > 0) cfg.system.pilot_symbols = pilots;
  if (!ranks.empty()) {
    if (ranks.size() != 3) {
      throw std::invalid_argument("--ranks expects three integers");
    }
    cfg.hyper.mode_ranks = std::array<int, 3>{ranks[0], ranks[1], ranks[2]};
  }
  cfg.system.validate();
  cfg.hyper.validate();

  const auto report = nfirs::complexity_estimate(cfg.system, cfg.hyper);
  std::cout << "hosvd_ops " << fmt9(report.hosvd_ops) << "\n"
            << "core_ops " << fmt9(report.core_ops) << "\n"
            << "factor_ops " << fmt9(report.factor_ops) << "\n"
            << "recovery_ops " << fmt9(report.recovery_ops) << "\n"
            << "per_iteration_ops " << fmt9(report.per_iteration_ops) << "\n"
            << "total_ops " << fmt9(report.total_ops) << "\n"
            << "log10_total " << fmt9(report.log10_total) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Near-field IRS cascaded channel simulation and sparse Tucker "
      "estimation"};
  app.require_subcommand(1);

  // run: execute a sweep experiment and write the result CSV.
  auto* run = app.add_subcommand(
      "run", "Run a sweep experiment and write per-trial results as CSV");
  std::string config_path;
  std::string run_preset = "paper";
  std::uint64_t seed = 0;
  std::string out_path;
  run->add_option("config", config_path, "JSON experiment config")
      ->check(CLI::ExistingFile);
  auto* preset_opt =
      run->add_option("--preset", run_preset,
                      "Baseline configuration when no config file is given")
          ->check(CLI::IsMember({"paper", "desk"}));
  preset_opt->excludes("config");
  auto* seed_opt =
      run->add_option("--seed", seed, "Override the master random seed");
  run->add_option("--out", out_path, "Override the output CSV path");

  // crlb: closed-form estimation error bound for given dimensions.
  auto* crlb_cmd = app.add_subcommand(
      "crlb", "Evaluate the closed-form estimation error bound");
  nfirs::CrlbInputs crlb_in;
  crlb_in.noise_power = 1.0;
  crlb_cmd->add_option("--noise-power", crlb_in.noise_power,
                       "Noise variance per observation entry");
  crlb_cmd->add_option("--subcarriers", crlb_in.subcarriers,
                       "Number of subcarriers");
  crlb_cmd->add_option("--bs-rows", crlb_in.n_z, "BS panel rows");
  crlb_cmd->add_option("--bs-cols", crlb_in.n_y, "BS panel columns");
  crlb_cmd->add_option("--irs-elements", crlb_in.n_r, "IRS element count");
  crlb_cmd->add_option("--pilots", crlb_in.pilot_symbols,
                       "Pilot symbols per subcarrier");

  // complexity: operation-count model of one estimator run.
  auto* cx = app.add_subcommand(
      "complexity", "Report the estimator's operation-count model");
  std::string cx_preset = "paper";
  int cx_t_max = -1;
  int cx_pilots = 0;
  std::vector<int> cx_ranks;
  cx->add_option("--preset", cx_preset, "Baseline configuration")
      ->check(CLI::IsMember({"paper", "desk"}));
  cx->add_option("--t-max", cx_t_max, "Override the outer iteration cap");
  cx->add_option("--pilots", cx_pilots,
                 "Override the pilot symbols per subcarrier");
  cx->add_option("--ranks", cx_ranks, "Core truncation ranks (three values)")
      ->expected(3);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(config_path, run_preset, seed_opt->count() > 0, seed,
                         out_path);
    }
    if (crlb_cmd->parsed()) return crlb_command(crlb_in);
    return complexity_command(cx_preset, cx_t_max, cx_pilots, cx_ranks);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
