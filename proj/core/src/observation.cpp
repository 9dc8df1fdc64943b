#include "nfirs/observation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nfirs/rng.hpp"

namespace nfirs {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Mean per-entry power of the noiseless received tensors.
double mean_signal_power(const ChannelRealization& ch,
                         const PhaseSchedule& schedule) {
  if (ch.tensors.empty()) {
    throw std::invalid_argument("realization carries no channel tensors");
  }
  const CMat vt = schedule.v.transpose();
  double acc = 0.0;
  for (const Tensor3& g : ch.tensors) {
    const Tensor3 s = mode_product(g, vt, 2);
    const double fn = frobenius_norm(s);
    acc += fn * fn / static_cast<double>(s.size());
  }
  return acc / static_cast<double>(ch.tensors.size());
}

}  // namespace

PhaseSchedule build_phase_schedule(int n_r, int p, ScheduleKind kind,
                                   std::uint64_t rng_seed) {
  if (n_r < 1 || p < 1) {
    throw std::invalid_argument("schedule dimensions must be >= 1");
  }
  PhaseSchedule s;
  s.kind = kind;
  s.v.resize(n_r, p);
  if (kind == ScheduleKind::orthogonal_dft) {
    if (p < n_r) {
      throw std::invalid_argument(
          "orthogonal DFT schedule needs pilot count >= element count");
    }
    for (int i = 0; i < n_r; ++i) {
      for (int j = 0; j < p; ++j) {
        const double ph = -kTwoPi * static_cast<double>(i) *
                          static_cast<double>(j) / static_cast<double>(p);
        s.v(i, j) = cplx{std::cos(ph), std::sin(ph)};
      }
    }
  } else {
    Rng rng(rng_seed);
    for (int j = 0; j < p; ++j) {
      for (int i = 0; i < n_r; ++i) {
        const double ph = rng.uniform(0.0, kTwoPi);
        s.v(i, j) = cplx{std::cos(ph), std::sin(ph)};
      }
    }
  }
  return s;
}

ObservationSet observe(const ChannelRealization& ch,
                       const PhaseSchedule& schedule, double noise_power,
                       std::uint64_t rng_seed) {
  if (noise_power < 0.0) {
    throw std::invalid_argument("noise power must be >= 0");
  }
  if (ch.tensors.empty()) {
    throw std::invalid_argument("realization carries no channel tensors");
  }
  if (schedule.v.rows() != ch.tensors.front().dim(2)) {
    throw std::invalid_argument(
        "schedule row count does not match channel tensor mode-2 extent");
  }
  ObservationSet obs;
  obs.schedule = schedule;
  obs.noise_power = noise_power;
  const CMat vt = schedule.v.transpose();
  Rng rng(rng_seed);
  const double scale = std::sqrt(noise_power);
  double signal_power = 0.0;
  for (const Tensor3& g : ch.tensors) {
    Tensor3 y = mode_product(g, vt, 2);
    const double fn = frobenius_norm(y);
    signal_power += fn * fn / static_cast<double>(y.size());
    if (noise_power > 0.0) {
      cplx* p = y.data();
      const std::int64_t n = y.size();
      for (std::int64_t i = 0; i < n; ++i) {
        p[i] += scale * rng.complex_normal();
      }
    }
    obs.tensors.push_back(std::move(y));
  }
  signal_power /= static_cast<double>(ch.tensors.size());
  obs.snr_db = noise_power > 0.0
                   ? 10.0 * std::log10(signal_power / noise_power)
                   : std::numeric_limits<double>::infinity();
  return obs;
}

double snr_to_noise_power(const ChannelRealization& ch,
                          const PhaseSchedule& schedule, double snr_db) {
  const double p = mean_signal_power(ch, schedule);
  if (p <= 0.0) {
    throw std::invalid_argument("signal power is zero; SNR undefined");
  }
  return p / std::pow(10.0, snr_db / 10.0);
}

}  // namespace nfirs
