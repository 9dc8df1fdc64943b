#include "nfirs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "nfirs/rng.hpp"

namespace nfirs {

namespace {

using nlohmann::json;

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(path + "." + item.key(), "unknown key");
  }
}

template <typename T>
void read_field(const json& j, const std::string& path, const char* key,
                T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    fail(path + "." + key, e.what());
  }
}

void read_system(const json& j, const std::string& path, SystemConfig& s) {
  check_keys(j, path,
             {"n_z", "n_y", "nr_z", "nr_y", "carrier_hz", "bandwidth_hz",
              "subcarriers", "pilot_symbols", "spacing_m", "light_speed"});
  read_field(j, path, "n_z", s.n_z);
  read_field(j, path, "n_y", s.n_y);
  read_field(j, path, "nr_z", s.nr_z);
  read_field(j, path, "nr_y", s.nr_y);
  read_field(j, path, "carrier_hz", s.carrier_hz);
  read_field(j, path, "bandwidth_hz", s.bandwidth_hz);
  read_field(j, path, "subcarriers", s.subcarriers);
  read_field(j, path, "pilot_symbols", s.pilot_symbols);
  read_field(j, path, "spacing_m", s.spacing_m);
  read_field(j, path, "light_speed", s.light_speed);
}

void read_hyper(const json& j, const std::string& path, Hyperparams& h) {
  check_keys(j, path,
             {"lambda1", "lambda2", "delta", "lambda3", "rho", "t_max",
              "k_max", "rel_tol", "mode_ranks"});
  read_field(j, path, "lambda1", h.lambda1);
  read_field(j, path, "lambda2", h.lambda2);
  read_field(j, path, "delta", h.delta);
  read_field(j, path, "lambda3", h.lambda3);
  read_field(j, path, "rho", h.rho);
  read_field(j, path, "t_max", h.t_max);
  read_field(j, path, "k_max", h.k_max);
  read_field(j, path, "rel_tol", h.rel_tol);
  if (j.contains("mode_ranks")) {
    const json& mr = j.at("mode_ranks");
    if (mr.is_null()) {
      h.mode_ranks.reset();
    } else {
      std::array<int, 3> r{};
      try {
        mr.get_to(r);
      } catch (const json::exception& e) {
        fail(path + ".mode_ranks", e.what());
      }
      h.mode_ranks = r;
    }
  }
}

void read_sweep(const json& j, const std::string& path, SweepSpec& s) {
  check_keys(j, path,
             {"snr_db", "bandwidth_hz", "irs_elements", "paths",
              "pilot_length", "lambda_grid"});
  s = SweepSpec{};
  read_field(j, path, "snr_db", s.snr_db);
  read_field(j, path, "bandwidth_hz", s.bandwidth_hz);
  read_field(j, path, "paths", s.paths);
  read_field(j, path, "pilot_length", s.pilot_length);
  if (j.contains("irs_elements")) {
    try {
      for (const json& e : j.at("irs_elements")) {
        std::array<int, 2> pr{};
        e.get_to(pr);
        s.irs_elements.emplace_back(pr[0], pr[1]);
      }
    } catch (const json::exception& e) {
      fail(path + ".irs_elements", e.what());
    }
  }
  if (j.contains("lambda_grid")) {
    const json& g = j.at("lambda_grid");
    check_keys(g, path + ".lambda_grid", {"lambda1", "lambda2"});
    read_field(g, path + ".lambda_grid", "lambda1", s.lambda1_grid);
    read_field(g, path + ".lambda_grid", "lambda2", s.lambda2_grid);
  }
}

std::string schedule_name(ScheduleKind k) {
  return k == ScheduleKind::orthogonal_dft ? "orthogonal-dft" : "random-phase";
}

ScheduleKind schedule_from_name(const std::string& name,
                                const std::string& path) {
  if (name == "orthogonal-dft") return ScheduleKind::orthogonal_dft;
  if (name == "random-phase") return ScheduleKind::random_phase;
  fail(path, "expected \"orthogonal-dft\" or \"random-phase\", got \"" +
                 name + "\"");
}

json scenario_to_json(const ChannelRealization& ch) {
  json link = {{"gain", {ch.link.gain.real(), ch.link.gain.imag()}},
               {"bs_elev", ch.link.bs_elev},
               {"bs_azim", ch.link.bs_azim},
               {"irs_elev", ch.link.irs_elev},
               {"irs_azim", ch.link.irs_azim},
               {"distance_m", ch.link.distance_m}};
  json paths = json::array();
  for (const UePath& p : ch.paths) {
    paths.push_back({{"gain", {p.gain.real(), p.gain.imag()}},
                     {"delay_s", p.delay_s},
                     {"irs_elev", p.irs_elev},
                     {"irs_azim", p.irs_azim},
                     {"distance_m", p.distance_m}});
  }
  return {{"link", link}, {"paths", paths}};
}

json tensor_to_json(const Tensor3& t) {
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(2 * t.size()));
  for (std::int64_t i = 0; i < t.size(); ++i) {
    entries.push_back(t.data()[i].real());
    entries.push_back(t.data()[i].imag());
  }
  return {{"dims", t.dims()}, {"entries", entries}};
}

Tensor3 tensor_from_json(const json& j, const std::string& path) {
  std::array<int, 3> dims{};
  std::vector<double> entries;
  try {
    j.at("dims").get_to(dims);
    j.at("entries").get_to(entries);
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
  const std::size_t n = static_cast<std::size_t>(dims[0]) *
                        static_cast<std::size_t>(dims[1]) *
                        static_cast<std::size_t>(dims[2]);
  if (entries.size() != 2 * n) fail(path, "entry count mismatch");
  std::vector<cplx> data(n);
  for (std::size_t i = 0; i < n; ++i) {
    data[i] = cplx{entries[2 * i], entries[2 * i + 1]};
  }
  return Tensor3::from_data(dims[0], dims[1], dims[2], std::move(data));
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ExperimentConfig paper_preset() {
  ExperimentConfig cfg;  // field defaults are the large-array values
  cfg.sweep.snr_db = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  return cfg;
}

ExperimentConfig desk_preset() {
  ExperimentConfig cfg;
  cfg.system.n_z = 4;
  cfg.system.n_y = 4;
  cfg.system.nr_z = 8;
  cfg.system.nr_y = 4;
  cfg.system.pilot_symbols = 64;
  cfg.system.subcarriers = 2;
  cfg.hyper.lambda1 = 400.0;
  cfg.hyper.t_max = 200;
  cfg.sweep.snr_db = {0.0, 10.0, 20.0, 30.0};
  cfg.distance_range = {0.05, 0.25};
  cfg.bs_irs_distance_m = 0.2;
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config parse failure: ") +
                                e.what());
  }
  check_keys(j, "config",
             {"preset", "seed", "trials", "output_path", "snr_db", "schedule",
              "record_wall_ms", "threads", "system", "channel", "hyper",
              "sweep"});
  ExperimentConfig cfg = paper_preset();
  if (j.contains("preset")) {
    std::string p;
    read_field(j, "config", "preset", p);
    if (p == "paper") {
      cfg = paper_preset();
    } else if (p == "desk") {
      cfg = desk_preset();
    } else {
      fail("config.preset", "expected \"paper\" or \"desk\", got \"" + p +
                                "\"");
    }
  }
  read_field(j, "config", "seed", cfg.seed);
  read_field(j, "config", "trials", cfg.trials);
  read_field(j, "config", "output_path", cfg.output_path);
  read_field(j, "config", "snr_db", cfg.snr_db);
  read_field(j, "config", "record_wall_ms", cfg.record_wall_ms);
  read_field(j, "config", "threads", cfg.threads);
  if (j.contains("schedule")) {
    std::string name;
    read_field(j, "config", "schedule", name);
    cfg.schedule = schedule_from_name(name, "config.schedule");
  }
  if (j.contains("system")) {
    read_system(j.at("system"), "config.system", cfg.system);
  }
  if (j.contains("channel")) {
    const json& c = j.at("channel");
    check_keys(c, "config.channel",
               {"paths", "distance_min_m", "distance_max_m",
                "bs_irs_distance_m"});
    read_field(c, "config.channel", "paths", cfg.num_paths);
    read_field(c, "config.channel", "distance_min_m",
               cfg.distance_range.first);
    read_field(c, "config.channel", "distance_max_m",
               cfg.distance_range.second);
    read_field(c, "config.channel", "bs_irs_distance_m",
               cfg.bs_irs_distance_m);
  }
  if (j.contains("hyper")) {
    read_hyper(j.at("hyper"), "config.hyper", cfg.hyper);
  }
  if (j.contains("sweep")) {
    read_sweep(j.at("sweep"), "config.sweep", cfg.sweep);
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config_text(read_text_file(path));
}

std::string config_to_text(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["output_path"] = cfg.output_path;
  j["snr_db"] = cfg.snr_db;
  j["schedule"] = schedule_name(cfg.schedule);
  j["record_wall_ms"] = cfg.record_wall_ms;
  j["threads"] = cfg.threads;
  j["system"] = {{"n_z", cfg.system.n_z},
                 {"n_y", cfg.system.n_y},
                 {"nr_z", cfg.system.nr_z},
                 {"nr_y", cfg.system.nr_y},
                 {"carrier_hz", cfg.system.carrier_hz},
                 {"bandwidth_hz", cfg.system.bandwidth_hz},
                 {"subcarriers", cfg.system.subcarriers},
                 {"pilot_symbols", cfg.system.pilot_symbols},
                 {"spacing_m", cfg.system.spacing_m},
                 {"light_speed", cfg.system.light_speed}};
  j["channel"] = {{"paths", cfg.num_paths},
                  {"distance_min_m", cfg.distance_range.first},
                  {"distance_max_m", cfg.distance_range.second},
                  {"bs_irs_distance_m", cfg.bs_irs_distance_m}};
  json hyper = {{"lambda1", cfg.hyper.lambda1},
                {"lambda2", cfg.hyper.lambda2},
                {"delta", cfg.hyper.delta},
                {"lambda3", cfg.hyper.lambda3},
                {"rho", cfg.hyper.rho},
                {"t_max", cfg.hyper.t_max},
                {"k_max", cfg.hyper.k_max},
                {"rel_tol", cfg.hyper.rel_tol}};
  if (cfg.hyper.mode_ranks) {
    hyper["mode_ranks"] = *cfg.hyper.mode_ranks;
  } else {
    hyper["mode_ranks"] = nullptr;
  }
  j["hyper"] = hyper;
  json sweep = json::object();
  if (!cfg.sweep.snr_db.empty()) sweep["snr_db"] = cfg.sweep.snr_db;
  if (!cfg.sweep.bandwidth_hz.empty())
    sweep["bandwidth_hz"] = cfg.sweep.bandwidth_hz;
  if (!cfg.sweep.irs_elements.empty()) {
    json arr = json::array();
    for (const auto& [z, y] : cfg.sweep.irs_elements) {
      arr.push_back({z, y});
    }
    sweep["irs_elements"] = arr;
  }
  if (!cfg.sweep.paths.empty()) sweep["paths"] = cfg.sweep.paths;
  if (!cfg.sweep.pilot_length.empty())
    sweep["pilot_length"] = cfg.sweep.pilot_length;
  if (!cfg.sweep.lambda1_grid.empty() || !cfg.sweep.lambda2_grid.empty()) {
    sweep["lambda_grid"] = {{"lambda1", cfg.sweep.lambda1_grid},
                            {"lambda2", cfg.sweep.lambda2_grid}};
  }
  j["sweep"] = sweep;
  return j.dump(2) + "\n";
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  write_text_file(path, config_to_text(cfg));
}

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg) {
  const SweepSpec& s = cfg.sweep;
  const bool lambda_active =
      !s.lambda1_grid.empty() || !s.lambda2_grid.empty();
  int active = 0;
  active += !s.snr_db.empty();
  active += !s.bandwidth_hz.empty();
  active += !s.irs_elements.empty();
  active += !s.paths.empty();
  active += !s.pilot_length.empty();
  active += lambda_active;
  if (active != 1) {
    fail("config.sweep", "exactly one sweep kind must be non-empty, found " +
                             std::to_string(active));
  }
  std::vector<SweepPoint> pts;
  SweepPoint base;
  base.system = cfg.system;
  base.hyper = cfg.hyper;
  base.snr_db = cfg.snr_db;
  base.num_paths = cfg.num_paths;
  if (!s.snr_db.empty()) {
    for (double v : s.snr_db) {
      SweepPoint p = base;
      p.var = "snr_db";
      p.value = fmt9(v);
      p.snr_db = v;
      pts.push_back(std::move(p));
    }
  } else if (!s.bandwidth_hz.empty()) {
    for (double v : s.bandwidth_hz) {
      SweepPoint p = base;
      p.var = "bandwidth_hz";
      p.value = fmt9(v);
      p.system.bandwidth_hz = v;
      pts.push_back(std::move(p));
    }
  } else if (!s.irs_elements.empty()) {
    for (const auto& [z, y] : s.irs_elements) {
      SweepPoint p = base;
      p.var = "irs_elements";
      p.value = std::to_string(z) + "x" + std::to_string(y);
      p.system.nr_z = z;
      p.system.nr_y = y;
      pts.push_back(std::move(p));
    }
  } else if (!s.paths.empty()) {
    for (int v : s.paths) {
      SweepPoint p = base;
      p.var = "paths";
      p.value = std::to_string(v);
      p.num_paths = v;
      pts.push_back(std::move(p));
    }
  } else if (!s.pilot_length.empty()) {
    for (int v : s.pilot_length) {
      SweepPoint p = base;
      p.var = "pilot_length";
      p.value = std::to_string(v);
      p.system.pilot_symbols = v;
      pts.push_back(std::move(p));
    }
  } else {
    if (s.lambda1_grid.empty() || s.lambda2_grid.empty()) {
      fail("config.sweep.lambda_grid",
           "both lambda1 and lambda2 lists must be non-empty");
    }
    for (double l1 : s.lambda1_grid) {
      for (double l2 : s.lambda2_grid) {
        SweepPoint p = base;
        p.var = "lambda_grid";
        p.value = fmt9(l1) + ":" + fmt9(l2);
        p.hyper.lambda1 = l1;
        p.hyper.lambda2 = l2;
        pts.push_back(std::move(p));
      }
    }
  }
  return pts;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) fail("config.trials", "must be >= 1");
  if (cfg.threads < 0) fail("config.threads", "must be >= 0");
  if (cfg.num_paths < 1) fail("config.channel.paths", "must be >= 1");
  if (!(cfg.distance_range.first > 0.0) ||
      !(cfg.distance_range.second >= cfg.distance_range.first)) {
    fail("config.channel", "distance range must satisfy 0 < min <= max");
  }
  if (!(cfg.bs_irs_distance_m > 0.0)) {
    fail("config.channel.bs_irs_distance_m", "must be > 0");
  }
  try {
    cfg.hyper.validate();
  } catch (const std::invalid_argument& e) {
    fail("config.hyper", e.what());
  }
  const std::vector<SweepPoint> pts = expand_sweep(cfg);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const SweepPoint& p = pts[i];
    const std::string where =
        "config.sweep[" + std::to_string(i) + "] (" + p.var + "=" + p.value +
        ")";
    try {
      p.system.validate();
      p.hyper.validate();
    } catch (const std::invalid_argument& e) {
      fail(where, e.what());
    }
    if (p.system.pilot_symbols < p.system.n_r()) {
      fail(where, "pilot_symbols " + std::to_string(p.system.pilot_symbols) +
                      " < IRS elements " + std::to_string(p.system.n_r()) +
                      "; channel recovery would be ill-posed");
    }
    const double rayleigh =
        rayleigh_distance(irs_aperture(p.system), p.system.wavelength());
    if (!(cfg.distance_range.second < rayleigh)) {
      fail(where, "UE distance range max " +
                      std::to_string(cfg.distance_range.second) +
                      " m is not inside the near-field region (0, " +
                      std::to_string(rayleigh) + ") m");
    }
    if (p.num_paths < 1) fail(where, "path count must be >= 1");
  }
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const std::vector<SweepPoint> pts = expand_sweep(cfg);
  std::vector<PhaseSchedule> schedules;
  schedules.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    schedules.push_back(build_phase_schedule(
        pts[i].system.n_r(), pts[i].system.pilot_symbols, cfg.schedule,
        Rng::derive_stream(cfg.seed, i, 0)));
  }

  const std::size_t total = pts.size() * static_cast<std::size_t>(cfg.trials);
  std::vector<ResultRow> rows(total);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto run_cell = [&](std::size_t k) {
    const std::size_t i = k / static_cast<std::size_t>(cfg.trials);
    const int j = static_cast<int>(k % static_cast<std::size_t>(cfg.trials));
    const SweepPoint& pt = pts[i];
    ResultRow& row = rows[k];
    row.sweep_var = pt.var;
    row.sweep_value = pt.value;
    row.trial = j;
    const std::uint64_t trial_seed =
        Rng::derive_stream(cfg.seed, i, 1 + static_cast<std::uint64_t>(j));
    row.seed = trial_seed;
    try {
      const ChannelRealization ch = sample_scenario(
          pt.system, pt.num_paths, cfg.distance_range,
          Rng::derive_stream(trial_seed, 0, 1), cfg.bs_irs_distance_m);
      const double noise_power =
          snr_to_noise_power(ch, schedules[i], pt.snr_db);
      const ObservationSet obs = observe(ch, schedules[i], noise_power,
                                         Rng::derive_stream(trial_seed, 0, 2));
      const EstimationResult res = estimate_all(obs, pt.hyper);
      row.nmse_db = 10.0 * std::log10(nmse(res.channels, ch.tensors));
      row.crlb = crlb({noise_power, pt.system.subcarriers, pt.system.n_z,
                       pt.system.n_y, pt.system.n_r(),
                       pt.system.pilot_symbols});
      row.iterations = *std::max_element(res.iterations.begin(),
                                         res.iterations.end());
      double obj = 0.0;
      for (const auto& tr : res.traces) obj += tr.back();
      row.objective_final = obj / static_cast<double>(res.traces.size());
      row.wall_ms = cfg.record_wall_ms ? res.wall_ms : 0.0;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.nmse_db = nan;
      row.crlb = nan;
      row.iterations = 0;
      row.objective_final = nan;
      row.wall_ms = 0.0;
    }
  };

  unsigned workers = cfg.threads > 0
                         ? static_cast<unsigned>(cfg.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(total));
  if (workers <= 1) {
    for (std::size_t k = 0; k < total; ++k) run_cell(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < total;
             k = next.fetch_add(1)) {
          run_cell(k);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

std::string results_to_text(const std::vector<ResultRow>& rows) {
  std::string out =
      "sweep_var,sweep_value,trial,nmse_db,crlb,iterations,objective_final,"
      "wall_ms,seed\n";
  for (const ResultRow& r : rows) {
    out += r.sweep_var;
    out += ',';
    out += r.sweep_value;
    out += ',';
    out += std::to_string(r.trial);
    out += ',';
    out += fmt9(r.nmse_db);
    out += ',';
    out += fmt9(r.crlb);
    out += ',';
    out += std::to_string(r.iterations);
    out += ',';
    out += fmt9(r.objective_final);
    out += ',';
    out += fmt9(r.wall_ms);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

void emit_results(const std::vector<ResultRow>& rows,
                  const std::string& path) {
  write_text_file(path, results_to_text(rows));
}

std::vector<ResultRow> parse_results(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line !=
          "sweep_var,sweep_value,trial,nmse_db,crlb,iterations,"
          "objective_final,wall_ms,seed") {
    throw std::invalid_argument("unrecognized results header in " + path);
  }
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(',', start);
      if (pos == std::string::npos) {
        f.push_back(line.substr(start));
        break;
      }
      f.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (f.size() != 9) {
      throw std::invalid_argument("line " + std::to_string(lineno) + " of " +
                                  path + " has " + std::to_string(f.size()) +
                                  " fields, expected 9");
    }
    ResultRow r;
    r.sweep_var = f[0];
    r.sweep_value = f[1];
    r.trial = std::stoi(f[2]);
    r.nmse_db = std::stod(f[3]);
    r.crlb = std::stod(f[4]);
    r.iterations = std::stoi(f[5]);
    r.objective_final = std::stod(f[6]);
    r.wall_ms = std::stod(f[7]);
    r.seed = std::stoull(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void save_scenario(const ChannelRealization& ch, const std::string& path) {
  write_text_file(path, scenario_to_json(ch).dump(2) + "\n");
}

ChannelRealization load_scenario(const SystemConfig& cfg,
                                 const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw std::invalid_argument("scenario parse failure: " +
                                std::string(e.what()));
  }
  check_keys(j, "scenario", {"link", "paths"});
  const json& l = j.at("link");
  check_keys(l, "scenario.link",
             {"gain", "bs_elev", "bs_azim", "irs_elev", "irs_azim",
              "distance_m"});
  BsIrsLink link;
  std::array<double, 2> g{};
  read_field(l, "scenario.link", "gain", g);
  link.gain = cplx{g[0], g[1]};
  read_field(l, "scenario.link", "bs_elev", link.bs_elev);
  read_field(l, "scenario.link", "bs_azim", link.bs_azim);
  read_field(l, "scenario.link", "irs_elev", link.irs_elev);
  read_field(l, "scenario.link", "irs_azim", link.irs_azim);
  read_field(l, "scenario.link", "distance_m", link.distance_m);
  std::vector<UePath> paths;
  for (const json& pj : j.at("paths")) {
    check_keys(pj, "scenario.paths[]",
               {"gain", "delay_s", "irs_elev", "irs_azim", "distance_m"});
    UePath p;
    std::array<double, 2> pg{};
    read_field(pj, "scenario.paths[]", "gain", pg);
    p.gain = cplx{pg[0], pg[1]};
    read_field(pj, "scenario.paths[]", "delay_s", p.delay_s);
    read_field(pj, "scenario.paths[]", "irs_elev", p.irs_elev);
    read_field(pj, "scenario.paths[]", "irs_azim", p.irs_azim);
    read_field(pj, "scenario.paths[]", "distance_m", p.distance_m);
    paths.push_back(p);
  }
  return make_realization(cfg, link, std::move(paths));
}

void save_observations(const ObservationSet& obs, const std::string& path) {
  json j;
  j["noise_power"] = obs.noise_power;
  // JSON has no literal for infinities (noiseless sets have snr_db = inf),
  // so non-finite values travel as strings.
  if (std::isfinite(obs.snr_db)) {
    j["snr_db"] = obs.snr_db;
  } else {
    j["snr_db"] = obs.snr_db > 0 ? "inf" : "-inf";
  }
  json sched;
  sched["kind"] = schedule_name(obs.schedule.kind);
  sched["rows"] = obs.schedule.v.rows();
  sched["cols"] = obs.schedule.v.cols();
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(2 * obs.schedule.v.size()));
  for (Eigen::Index c = 0; c < obs.schedule.v.cols(); ++c) {
    for (Eigen::Index r = 0; r < obs.schedule.v.rows(); ++r) {
      entries.push_back(obs.schedule.v(r, c).real());
      entries.push_back(obs.schedule.v(r, c).imag());
    }
  }
  sched["entries"] = entries;
  j["schedule"] = sched;
  json tensors = json::array();
  for (const Tensor3& t : obs.tensors) tensors.push_back(tensor_to_json(t));
  j["tensors"] = tensors;
  write_text_file(path, j.dump() + "\n");
}

ObservationSet load_observations(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw std::invalid_argument("observation parse failure: " +
                                std::string(e.what()));
  }
  check_keys(j, "observations",
             {"noise_power", "snr_db", "schedule", "tensors"});
  ObservationSet obs;
  read_field(j, "observations", "noise_power", obs.noise_power);
  if (j.contains("snr_db")) {
    const json& s = j.at("snr_db");
    if (s.is_string()) {
      const std::string text = s.get<std::string>();
      if (text == "inf") {
        obs.snr_db = std::numeric_limits<double>::infinity();
      } else if (text == "-inf") {
        obs.snr_db = -std::numeric_limits<double>::infinity();
      } else {
        fail("observations.snr_db", "expected a number, \"inf\", or \"-inf\"");
      }
    } else {
      read_field(j, "observations", "snr_db", obs.snr_db);
    }
  }
  const json& sched = j.at("schedule");
  check_keys(sched, "observations.schedule",
             {"kind", "rows", "cols", "entries"});
  std::string kind;
  read_field(sched, "observations.schedule", "kind", kind);
  obs.schedule.kind = schedule_from_name(kind, "observations.schedule.kind");
  Eigen::Index rows = 0, cols = 0;
  read_field(sched, "observations.schedule", "rows", rows);
  read_field(sched, "observations.schedule", "cols", cols);
  std::vector<double> entries;
  read_field(sched, "observations.schedule", "entries", entries);
  if (entries.size() != static_cast<std::size_t>(2 * rows * cols)) {
    fail("observations.schedule.entries", "entry count mismatch");
  }
  obs.schedule.v.resize(rows, cols);
  std::size_t idx = 0;
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      obs.schedule.v(r, c) = cplx{entries[idx], entries[idx + 1]};
      idx += 2;
    }
  }
  for (const json& tj : j.at("tensors")) {
    obs.tensors.push_back(tensor_from_json(tj, "observations.tensors[]"));
  }
  return obs;
}

}  // namespace nfirs
