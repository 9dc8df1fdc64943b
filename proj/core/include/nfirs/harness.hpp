#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nfirs/analysis.hpp"
#include "nfirs/channel.hpp"
#include "nfirs/estimator.hpp"
#include "nfirs/observation.hpp"

namespace nfirs {

enum class SweepKind {
  snr,
  bandwidth,
  irs_elements,
  paths,
  pilot_length,
  lambda_grid,
};

// Exactly one of the lists below may be non-empty; it selects the sweep.
struct SweepSpec {
  std::vector<double> snr_db;
  std::vector<double> bandwidth_hz;
  std::vector<std::pair<int, int>> irs_elements;  // (nr_z, nr_y)
  std::vector<int> paths;
  std::vector<int> pilot_length;
  std::vector<double> lambda1_grid;
  std::vector<double> lambda2_grid;

  bool operator==(const SweepSpec&) const = default;
};

// A full experiment description.  Defaults reproduce the large-array
// reference configuration; desk_preset() is the small fast variant.
struct ExperimentConfig {
  SystemConfig system;
  Hyperparams hyper;
  SweepSpec sweep;
  int trials = 20;
  std::uint64_t seed = 1;
  std::string output_path = "results.csv";
  double snr_db = 20.0;  // operating SNR when not swept
  int num_paths = 2;
  std::pair<double, double> distance_range = {5.0, 10.0};  // UE-IRS, meters
  double bs_irs_distance_m = 7.2153;
  ScheduleKind schedule = ScheduleKind::orthogonal_dft;
  bool record_wall_ms = false;  // off keeps reruns byte-identical
  int threads = 0;              // 0 = hardware concurrency

  bool operator==(const ExperimentConfig&) const = default;
};

// One experiment cell after sweep expansion.
struct SweepPoint {
  std::string var;    // swept variable name, e.g. "snr_db"
  std::string value;  // formatted swept value, e.g. "20" or "0.5:1"
  SystemConfig system;
  Hyperparams hyper;
  double snr_db = 20.0;
  int num_paths = 2;
};

// One CSV row.  On a per-trial failure the numeric metrics are NaN and
// `error` carries the diagnostic (not part of the CSV contract).
struct ResultRow {
  std::string sweep_var;
  std::string sweep_value;
  int trial = 0;
  double nmse_db = 0.0;
  double crlb = 0.0;
  int iterations = 0;
  double objective_final = 0.0;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  std::string error;  // empty on success
};

ExperimentConfig paper_preset();
ExperimentConfig desk_preset();

// Reads a config file (JSON).  Missing keys keep their defaults (the paper
// preset, or the preset named by a top-level "preset" key); unknown keys
// are rejected with their field path.  The returned config has passed
// validate_config.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);
void save_config(const ExperimentConfig& cfg, const std::string& path);
std::string config_to_text(const ExperimentConfig& cfg);

// Checks global constraints and every expanded sweep point (system
// constraints, recovery precondition P >= N_r, near-field distance range).
// Throws std::invalid_argument with a field path on the first violation.
void validate_config(const ExperimentConfig& cfg);

// Expands the sweep into per-point configurations (validated).
std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg);

// Runs every (sweep point, trial) cell: sample scenario, observe, estimate,
// score.  Rows are ordered by (point index, trial index) regardless of the
// execution schedule.  Per-trial failures become error rows; the run
// continues.  Randomness derives from cfg.seed via Rng::derive_stream:
// schedule seed = derive(seed, point, 0) and trial seed = derive(seed,
// point, 1 + trial); scenario and noise streams derive from the trial seed
// with roles 1 and 2.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Writes rows as CSV with the fixed header
// sweep_var,sweep_value,trial,nmse_db,crlb,iterations,objective_final,
// wall_ms,seed and all reals at 9 significant digits.
void emit_results(const std::vector<ResultRow>& rows,
                  const std::string& path);
std::string results_to_text(const std::vector<ResultRow>& rows);

// Parses a file produced by emit_results (error diagnostics not restored).
std::vector<ResultRow> parse_results(const std::string& path);

// Scenario and observation serialization (JSON, round-trippable).
void save_scenario(const ChannelRealization& ch, const std::string& path);
ChannelRealization load_scenario(const SystemConfig& cfg,
                                 const std::string& path);
void save_observations(const ObservationSet& obs, const std::string& path);
ObservationSet load_observations(const std::string& path);

}  // namespace nfirs
