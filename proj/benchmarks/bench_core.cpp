// Microbenchmarks of the hot paths: mode products, HOSVD initialization,
// the inner core update, and the full per-subcarrier estimate at the small
// preset's scale.

#include <benchmark/benchmark.h>

#include "nfirs/estimator.hpp"
#include "nfirs/harness.hpp"
#include "nfirs/observation.hpp"

namespace {

// One deterministic small-preset observation tensor (N_z x P x N_y) plus
// its schedule; shared by the benchmarks below.
struct Fixture {
  nfirs::ExperimentConfig cfg = nfirs::desk_preset();
  nfirs::PhaseSchedule schedule;
  nfirs::Tensor3 y;

  Fixture() {
    const auto& sys = cfg.system;
    schedule = nfirs::build_phase_schedule(
        sys.n_r(), sys.pilot_symbols, cfg.schedule, /*rng_seed=*/1);
    const auto ch = nfirs::sample_scenario(sys, cfg.num_paths,
                                           cfg.distance_range, /*rng_seed=*/2,
                                           cfg.bs_irs_distance_m);
    const double noise = nfirs::snr_to_noise_power(ch, schedule, cfg.snr_db);
    const auto obs = nfirs::observe(ch, schedule, noise, /*rng_seed=*/3);
    y = obs.tensors[0];
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_ModeProduct(benchmark::State& state) {
  const auto& f = fixture();
  const int mode = static_cast<int>(state.range(0));
  const int dim = f.y.dims()[mode - 1];
  const nfirs::CMat m = nfirs::CMat::Identity(dim, dim) * nfirs::cplx(2.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nfirs::mode_product(f.y, m, mode));
  }
}
BENCHMARK(BM_ModeProduct)->DenseRange(1, 3);

void BM_Hosvd(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(nfirs::hosvd(f.y));
  }
}
BENCHMARK(BM_Hosvd);

void BM_UpdateCore(benchmark::State& state) {
  const auto& f = fixture();
  auto hp = f.cfg.hyper;
  hp.k_max = static_cast<int>(state.range(0));
  auto init = nfirs::initialize(f.y, hp);
  init.d = nfirs::weight_tensor(init.z, hp.delta);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nfirs::update_core(init, f.y, hp));
  }
}
BENCHMARK(BM_UpdateCore)->Arg(1)->Arg(10);

void BM_FactorUpdate(benchmark::State& state) {
  const auto& f = fixture();
  const auto hp = f.cfg.hyper;
  const auto init = nfirs::initialize(f.y, hp);
  const int mode = static_cast<int>(state.range(0));
  const nfirs::CMat yn = nfirs::unfold(f.y, mode);
  for (auto _ : state) {
    const nfirs::CMat xi = nfirs::build_xi(init.z, init.a, mode);
    for (int r = 0; r < yn.rows(); ++r) {
      benchmark::DoNotOptimize(
          nfirs::update_factor_row(yn.row(r), xi, hp.lambda1, hp.lambda2));
    }
  }
}
BENCHMARK(BM_FactorUpdate)->DenseRange(1, 3);

void BM_Estimate(benchmark::State& state) {
  const auto& f = fixture();
  auto hp = f.cfg.hyper;
  hp.t_max = static_cast<int>(state.range(0));
  hp.rel_tol = 0.0;  // fixed iteration count for stable timings
  for (auto _ : state) {
    benchmark::DoNotOptimize(nfirs::estimate(f.y, f.schedule, hp));
  }
}
BENCHMARK(BM_Estimate)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
