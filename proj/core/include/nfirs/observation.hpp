#pragma once

#include <cstdint>
#include <vector>

#include "nfirs/channel.hpp"
#include "nfirs/tensor.hpp"

namespace nfirs {

enum class ScheduleKind {
  orthogonal_dft,  // rows of the P-point DFT matrix; V* V^T = P I
  random_phase,    // i.i.d. phases uniform on [0, 2pi)
};

// IRS reflection coefficients across pilot symbols: v is N_r x P with
// unit-modulus entries.
struct PhaseSchedule {
  CMat v;
  ScheduleKind kind = ScheduleKind::orthogonal_dft;
};

// Pilot observations for all subcarriers: tensors[m-1] is N_z x P x N_y.
struct ObservationSet {
  std::vector<Tensor3> tensors;
  PhaseSchedule schedule;
  double noise_power = 0.0;  // per-entry complex noise variance
  double snr_db = 0.0;       // implied by noise_power and the signal energy
};

// Builds a schedule.  orthogonal_dft requires p >= n_r (otherwise n_r
// distinct DFT rows cannot be orthogonal) and ignores the seed.
PhaseSchedule build_phase_schedule(int n_r, int p, ScheduleKind kind,
                                   std::uint64_t rng_seed);

// Forward model: for each subcarrier, channel tensor x2 V^T plus i.i.d.
// circular complex Gaussian noise of per-entry variance noise_power.
ObservationSet observe(const ChannelRealization& ch,
                       const PhaseSchedule& schedule, double noise_power,
                       std::uint64_t rng_seed);

// Noise power giving the requested SNR, where SNR is the per-entry average
// power of the noiseless received tensors (mean over subcarriers) divided
// by the per-entry noise variance.
double snr_to_noise_power(const ChannelRealization& ch,
                          const PhaseSchedule& schedule, double snr_db);

}  // namespace nfirs
