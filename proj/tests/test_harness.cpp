#include "nfirs/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "nfirs/observation.hpp"
#include "nfirs/tensor.hpp"

namespace nfirs {
namespace {

std::string temp_path(const std::string& name) {
  return testing::TempDir() + name;
}

// Small configuration that keeps run_experiment fast in unit tests.
ExperimentConfig fast_config() {
  ExperimentConfig cfg = desk_preset();
  cfg.system.n_z = 2;
  cfg.system.n_y = 2;
  cfg.system.pilot_symbols = 32;
  cfg.system.subcarriers = 1;
  cfg.hyper.t_max = 30;
  cfg.hyper.rel_tol = 1e-3;
  cfg.trials = 2;
  cfg.sweep = SweepSpec{};
  cfg.sweep.snr_db = {10.0, 20.0};
  cfg.num_paths = 1;
  cfg.threads = 1;
  return cfg;
}

void expect_throw_with(const std::string& text, const std::string& needle) {
  try {
    parse_config_text(text);
    FAIL() << "expected rejection of: " << text;
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
        << "message was: " << e.what();
  }
}

// ===== presets ==========================================================

TEST(Presets, PaperPresetMatchesReferenceNumerology) {
  const ExperimentConfig cfg = paper_preset();
  EXPECT_EQ(cfg.system.n_b(), 25);
  EXPECT_EQ(cfg.system.n_r(), 256);
  EXPECT_EQ(cfg.system.carrier_hz, 28e9);
  EXPECT_EQ(cfg.system.bandwidth_hz, 2e9);
  EXPECT_EQ(cfg.system.pilot_symbols, 280);
  EXPECT_EQ(cfg.system.subcarriers, 6);
  EXPECT_EQ(cfg.num_paths, 2);
  EXPECT_EQ(cfg.trials, 20);
  EXPECT_EQ(cfg.sweep.snr_db.size(), 7u);
  EXPECT_NO_THROW(validate_config(cfg));
}

TEST(Presets, DeskPresetIsSmallAndValid) {
  const ExperimentConfig cfg = desk_preset();
  EXPECT_EQ(cfg.system.n_b(), 16);
  EXPECT_EQ(cfg.system.n_r(), 32);
  EXPECT_EQ(cfg.system.pilot_symbols, 64);
  EXPECT_EQ(cfg.system.subcarriers, 2);
  EXPECT_LT(cfg.distance_range.second,
            rayleigh_distance(irs_aperture(cfg.system),
                              cfg.system.wavelength()));
  EXPECT_NO_THROW(validate_config(cfg));
}

// ===== config parsing ===================================================

TEST(ParseConfig, MinimalTextKeepsPresetDefaults) {
  ExperimentConfig want = paper_preset();
  want.seed = 7;
  EXPECT_EQ(parse_config_text("{\"seed\": 7}"), want);
  EXPECT_EQ(parse_config_text("{}"), paper_preset());
}

TEST(ParseConfig, PresetKeySelectsBaseBeforeOverrides) {
  EXPECT_EQ(parse_config_text("{\"preset\": \"desk\"}"), desk_preset());
  ExperimentConfig want = desk_preset();
  want.trials = 3;
  EXPECT_EQ(parse_config_text("{\"preset\": \"desk\", \"trials\": 3}"), want);
  expect_throw_with("{\"preset\": \"huge\"}", "config.preset");
}

TEST(ParseConfig, UnknownKeysAreRejectedWithFieldPath) {
  expect_throw_with("{\"sistem\": {}}", "config.sistem");
  expect_throw_with("{\"system\": {\"nz\": 3}}", "config.system.nz");
  expect_throw_with("{\"hyper\": {\"lambda9\": 1}}", "config.hyper.lambda9");
  expect_throw_with("{\"sweep\": {\"snr\": []}}", "config.sweep.snr");
  expect_throw_with("{\"channel\": {\"bs\": 1}}", "config.channel.bs");
}

TEST(ParseConfig, TypeAndValueErrorsCarryFieldPath) {
  expect_throw_with("{\"trials\": \"many\"}", "config.trials");
  expect_throw_with("{\"hyper\": {\"lambda1\": -1}}", "config.hyper");
  expect_throw_with("{\"schedule\": \"qpsk\"}", "config.schedule");
  expect_throw_with("not json", "parse failure");
}

TEST(ParseConfig, InsufficientPilotsAreRejectedPerSweepPoint) {
  expect_throw_with("{\"system\": {\"pilot_symbols\": 100}}",
                    "pilot_symbols");
  expect_throw_with(
      "{\"preset\": \"desk\", \"channel\": {\"distance_max_m\": 0.4}}",
      "near-field");
}

TEST(ParseConfig, ScheduleNamesRoundTrip) {
  const ExperimentConfig cfg =
      parse_config_text("{\"schedule\": \"random-phase\"}");
  EXPECT_EQ(cfg.schedule, ScheduleKind::random_phase);
  EXPECT_EQ(parse_config_text("{\"schedule\": \"orthogonal-dft\"}").schedule,
            ScheduleKind::orthogonal_dft);
}

TEST(ParseConfig, TextRoundTripPreservesEveryField) {
  ExperimentConfig cfg = desk_preset();
  cfg.seed = 99;
  cfg.trials = 4;
  cfg.output_path = "out.csv";
  cfg.schedule = ScheduleKind::random_phase;
  cfg.record_wall_ms = true;
  cfg.threads = 2;
  cfg.hyper.mode_ranks = std::array<int, 3>{2, 5, 2};
  cfg.sweep = SweepSpec{};
  cfg.sweep.lambda1_grid = {100.0, 400.0};
  cfg.sweep.lambda2_grid = {0.5, 1.0};
  EXPECT_EQ(parse_config_text(config_to_text(cfg)), cfg);
  EXPECT_EQ(parse_config_text(config_to_text(paper_preset())),
            paper_preset());
  EXPECT_EQ(parse_config_text(config_to_text(desk_preset())), desk_preset());
}

TEST(ParseConfig, FileRoundTrip) {
  const std::string path = temp_path("nfirs_config.json");
  ExperimentConfig cfg = fast_config();
  cfg.seed = 31337;
  save_config(cfg, path);
  EXPECT_EQ(load_config(path), cfg);
  EXPECT_THROW(load_config(temp_path("missing_config.json")),
               std::runtime_error);
}

// ===== sweep expansion ==================================================

TEST(ExpandSweep, LambdaGridTakesTheCrossProduct) {
  ExperimentConfig cfg = fast_config();
  cfg.sweep = SweepSpec{};
  cfg.sweep.lambda1_grid = {0.5, 1.0};
  cfg.sweep.lambda2_grid = {1.0, 2.0, 3.0};
  const std::vector<SweepPoint> pts = expand_sweep(cfg);
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts[0].var, "lambda_grid");
  EXPECT_EQ(pts[0].value, "0.5:1");
  EXPECT_EQ(pts[5].value, "1:3");
  EXPECT_EQ(pts[5].hyper.lambda1, 1.0);
  EXPECT_EQ(pts[5].hyper.lambda2, 3.0);
}

TEST(ExpandSweep, IrsElementsUseGridLabels) {
  ExperimentConfig cfg = fast_config();
  cfg.sweep = SweepSpec{};
  cfg.sweep.irs_elements = {{8, 4}, {16, 4}};
  cfg.system.pilot_symbols = 64;
  const std::vector<SweepPoint> pts = expand_sweep(cfg);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].var, "irs_elements");
  EXPECT_EQ(pts[0].value, "8x4");
  EXPECT_EQ(pts[1].value, "16x4");
  EXPECT_EQ(pts[1].system.nr_z, 16);
}

TEST(ExpandSweep, ExactlyOneKindMustBeActive) {
  ExperimentConfig cfg = fast_config();
  cfg.sweep = SweepSpec{};
  EXPECT_THROW(expand_sweep(cfg), std::invalid_argument);
  cfg.sweep.snr_db = {10.0};
  cfg.sweep.paths = {1, 2};
  EXPECT_THROW(expand_sweep(cfg), std::invalid_argument);
  cfg.sweep.paths.clear();
  EXPECT_EQ(expand_sweep(cfg).size(), 1u);
  cfg.sweep.snr_db.clear();
  cfg.sweep.lambda1_grid = {1.0};
  EXPECT_THROW(expand_sweep(cfg), std::invalid_argument);  // lambda2 missing
}

// ===== experiment execution =============================================

TEST(RunExperiment, RowsAreOrderedAndDeterministic) {
  const ExperimentConfig cfg = fast_config();
  const std::vector<ResultRow> rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 4u);  // 2 sweep points x 2 trials
  EXPECT_EQ(rows[0].sweep_value, "10");
  EXPECT_EQ(rows[0].trial, 0);
  EXPECT_EQ(rows[1].sweep_value, "10");
  EXPECT_EQ(rows[1].trial, 1);
  EXPECT_EQ(rows[2].sweep_value, "20");
  EXPECT_EQ(rows[2].trial, 0);
  for (const ResultRow& r : rows) {
    EXPECT_EQ(r.sweep_var, "snr_db");
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_TRUE(std::isfinite(r.nmse_db));
    EXPECT_GT(r.crlb, 0.0);
    EXPECT_GE(r.iterations, 1);
    EXPECT_EQ(r.wall_ms, 0.0);  // record_wall_ms defaults to off
  }
  // Same seed, same bytes; a different seed changes the results.
  EXPECT_EQ(results_to_text(run_experiment(cfg)), results_to_text(rows));
  ExperimentConfig other = cfg;
  other.seed = cfg.seed + 1;
  EXPECT_NE(results_to_text(run_experiment(other)), results_to_text(rows));
}

TEST(RunExperiment, ThreadCountDoesNotChangeResults) {
  ExperimentConfig cfg = fast_config();
  cfg.threads = 1;
  const std::string serial = results_to_text(run_experiment(cfg));
  cfg.threads = 4;
  EXPECT_EQ(results_to_text(run_experiment(cfg)), serial);
  cfg.threads = 0;  // hardware concurrency
  EXPECT_EQ(results_to_text(run_experiment(cfg)), serial);
}

TEST(RunExperiment, HigherSnrLowersTheError) {
  ExperimentConfig cfg = fast_config();
  cfg.sweep.snr_db = {0.0, 30.0};
  cfg.trials = 3;
  const std::vector<ResultRow> rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 6u);
  double low = 0.0, high = 0.0;
  for (const ResultRow& r : rows) {
    (r.sweep_value == "0" ? low : high) += r.nmse_db / 3.0;
  }
  EXPECT_LT(high, low);
}

TEST(RunExperiment, PerTrialFailuresBecomeErrorRows) {
  ExperimentConfig cfg = fast_config();
  cfg.hyper.mode_ranks = std::array<int, 3>{9, 9, 9};  // exceeds 2 x 32 x 2
  const std::vector<ResultRow> rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 4u);
  for (const ResultRow& r : rows) {
    EXPECT_FALSE(r.error.empty());
    EXPECT_TRUE(std::isnan(r.nmse_db));
    EXPECT_TRUE(std::isnan(r.crlb));
    EXPECT_EQ(r.iterations, 0);
  }
}

TEST(RunExperiment, WallClockRecordingIsOptIn) {
  ExperimentConfig cfg = fast_config();
  cfg.record_wall_ms = true;
  const std::vector<ResultRow> rows = run_experiment(cfg);
  for (const ResultRow& r : rows) {
    EXPECT_GT(r.wall_ms, 0.0);
  }
}

// ===== CSV contract =====================================================

TEST(ResultsCsv, HeaderAndFormattingAreStable) {
  std::vector<ResultRow> rows(1);
  rows[0].sweep_var = "snr_db";
  rows[0].sweep_value = "20";
  rows[0].trial = 3;
  rows[0].nmse_db = -31.25;
  rows[0].crlb = 137.142857142857;
  rows[0].iterations = 12;
  rows[0].objective_final = -456.789;
  rows[0].wall_ms = 0.0;
  rows[0].seed = 18446744073709551615ull;
  const std::string text = results_to_text(rows);
  EXPECT_EQ(text,
            "sweep_var,sweep_value,trial,nmse_db,crlb,iterations,"
            "objective_final,wall_ms,seed\n"
            "snr_db,20,3,-31.25,137.142857,12,-456.789,0,"
            "18446744073709551615\n");
  EXPECT_EQ(results_to_text({}),
            "sweep_var,sweep_value,trial,nmse_db,crlb,iterations,"
            "objective_final,wall_ms,seed\n");
}

TEST(ResultsCsv, FileRoundTripIsByteStable) {
  const ExperimentConfig cfg = fast_config();
  const std::vector<ResultRow> rows = run_experiment(cfg);
  const std::string path = temp_path("nfirs_results.csv");
  emit_results(rows, path);
  const std::vector<ResultRow> parsed = parse_results(path);
  ASSERT_EQ(parsed.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(parsed[i].sweep_var, rows[i].sweep_var);
    EXPECT_EQ(parsed[i].sweep_value, rows[i].sweep_value);
    EXPECT_EQ(parsed[i].trial, rows[i].trial);
    EXPECT_EQ(parsed[i].iterations, rows[i].iterations);
    EXPECT_EQ(parsed[i].seed, rows[i].seed);
    EXPECT_NEAR(parsed[i].nmse_db, rows[i].nmse_db,
                1e-7 * std::abs(rows[i].nmse_db));
  }
  // Re-serializing the parsed rows reproduces the file exactly.
  emit_results(parsed, temp_path("nfirs_results2.csv"));
  EXPECT_EQ(results_to_text(parsed), results_to_text(rows));
}

TEST(ResultsCsv, NanErrorRowsSurviveTheRoundTrip) {
  ExperimentConfig cfg = fast_config();
  cfg.hyper.mode_ranks = std::array<int, 3>{9, 9, 9};
  const std::vector<ResultRow> rows = run_experiment(cfg);
  const std::string path = temp_path("nfirs_error_rows.csv");
  emit_results(rows, path);
  const std::vector<ResultRow> parsed = parse_results(path);
  ASSERT_EQ(parsed.size(), rows.size());
  for (const ResultRow& r : parsed) {
    EXPECT_TRUE(std::isnan(r.nmse_db));
  }
}

TEST(ResultsCsv, RejectsForeignFiles) {
  const std::string path = temp_path("nfirs_not_results.csv");
  emit_results({}, path);
  EXPECT_NO_THROW(parse_results(path));
  std::vector<ResultRow> rows;
  EXPECT_THROW(parse_results(temp_path("nfirs_missing.csv")),
               std::runtime_error);
  save_config(fast_config(), path);
  EXPECT_THROW(parse_results(path), std::invalid_argument);
}

// ===== scenario and observation serialization ===========================

TEST(ScenarioIo, RoundTripRebuildsIdenticalTensors) {
  const SystemConfig sys = fast_config().system;
  const ChannelRealization ch =
      sample_scenario(sys, 2, {0.05, 0.2}, 404, 0.2);
  const std::string path = temp_path("nfirs_scenario.json");
  save_scenario(ch, path);
  const ChannelRealization back = load_scenario(sys, path);
  EXPECT_EQ(back.link.gain, ch.link.gain);
  EXPECT_EQ(back.link.distance_m, ch.link.distance_m);
  ASSERT_EQ(back.paths.size(), ch.paths.size());
  for (std::size_t l = 0; l < ch.paths.size(); ++l) {
    EXPECT_EQ(back.paths[l].gain, ch.paths[l].gain);
    EXPECT_EQ(back.paths[l].delay_s, ch.paths[l].delay_s);
    EXPECT_EQ(back.cascaded_gains[l], ch.cascaded_gains[l]);
  }
  ASSERT_EQ(back.tensors.size(), ch.tensors.size());
  for (std::size_t m = 0; m < ch.tensors.size(); ++m) {
    EXPECT_EQ(frobenius_norm(back.tensors[m] - ch.tensors[m]), 0.0);
  }
}

TEST(ObservationIo, RoundTripPreservesSchedulesAndNoise) {
  const SystemConfig sys = fast_config().system;
  const ChannelRealization ch =
      sample_scenario(sys, 1, {0.05, 0.2}, 405, 0.2);
  const PhaseSchedule sched = build_phase_schedule(
      sys.n_r(), sys.pilot_symbols, ScheduleKind::random_phase, 11);
  const ObservationSet obs = observe(ch, sched, 0.3, 12);
  const std::string path = temp_path("nfirs_obs.json");
  save_observations(obs, path);
  const ObservationSet back = load_observations(path);
  EXPECT_EQ(back.schedule.kind, ScheduleKind::random_phase);
  EXPECT_EQ((back.schedule.v - obs.schedule.v).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(back.noise_power, obs.noise_power);
  EXPECT_EQ(back.snr_db, obs.snr_db);
  ASSERT_EQ(back.tensors.size(), obs.tensors.size());
  for (std::size_t m = 0; m < obs.tensors.size(); ++m) {
    EXPECT_EQ(frobenius_norm(back.tensors[m] - obs.tensors[m]), 0.0);
  }
}

TEST(ObservationIo, NoiselessInfiniteSnrSurvives) {
  const SystemConfig sys = fast_config().system;
  const ChannelRealization ch =
      sample_scenario(sys, 1, {0.05, 0.2}, 406, 0.2);
  const PhaseSchedule sched = build_phase_schedule(
      sys.n_r(), sys.pilot_symbols, ScheduleKind::orthogonal_dft, 0);
  const ObservationSet obs = observe(ch, sched, 0.0, 0);
  const std::string path = temp_path("nfirs_obs_clean.json");
  save_observations(obs, path);
  const ObservationSet back = load_observations(path);
  EXPECT_TRUE(std::isinf(back.snr_db));
  EXPECT_GT(back.snr_db, 0.0);
  EXPECT_EQ(back.noise_power, 0.0);
}

}  // namespace
}  // namespace nfirs
