#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nfirs/tensor.hpp"

namespace nfirs {

// Static system geometry and numerology.  Defaults correspond to the
// large-array reference configuration used throughout the tests.
struct SystemConfig {
  int n_z = 5;    // BS UPA rows
  int n_y = 5;    // BS UPA columns (N_b = n_z * n_y)
  int nr_z = 64;  // IRS rows
  int nr_y = 4;   // IRS columns (N_r = nr_z * nr_y)
  double carrier_hz = 28e9;
  double bandwidth_hz = 2e9;
  int subcarriers = 6;      // M
  int pilot_symbols = 280;  // P, OFDM pilot symbols per subcarrier
  double spacing_m = 0.0;   // element spacing d; 0 selects half wavelength
  double light_speed = 299792458.0;

  int n_b() const { return n_z * n_y; }
  int n_r() const { return nr_z * nr_y; }
  double wavelength() const { return light_speed / carrier_hz; }
  double spacing() const {
    return spacing_m > 0.0 ? spacing_m : 0.5 * wavelength();
  }
  // Subcarrier frequency f_m = f_c + (2m - M) / (2M) * B, m in 1..M.
  double subcarrier_hz(int m) const;
  // Throws std::invalid_argument on any violated constraint.
  void validate() const;

  bool operator==(const SystemConfig&) const = default;
};

// The single line-of-sight BS-IRS link.  Angles in radians.
struct BsIrsLink {
  cplx gain;            // complex path gain
  double bs_elev = 0;   // elevation of arrival at the BS UPA
  double bs_azim = 0;   // azimuth of arrival at the BS UPA
  double irs_elev = 0;  // elevation of departure at the IRS
  double irs_azim = 0;  // azimuth of departure at the IRS
  double distance_m = 0;  // IRS reference element to BS

  // Propagation delay distance / c.
  double delay_s(double light_speed) const { return distance_m / light_speed; }
};

// One UE-IRS propagation path.  Angles in radians.
struct UePath {
  cplx gain;            // complex path gain
  double delay_s = 0;   // propagation delay
  double irs_elev = 0;  // elevation of arrival at the IRS
  double irs_azim = 0;  // azimuth of arrival at the IRS
  double distance_m = 0;  // IRS reference element to UE
};

// A sampled channel instance: link, paths, the derived per-path cascaded
// gains/delays, and the per-subcarrier channel tensors.
struct ChannelRealization {
  BsIrsLink link;
  std::vector<UePath> paths;
  std::vector<cplx> cascaded_gains;     // path gain * link gain
  std::vector<double> cascaded_delays;  // path delay + link delay
  std::vector<Tensor3> tensors;         // M tensors, each N_z x N_r x N_y
};

// Extra distance travelled from the BS to IRS element (n_y, n_z) relative
// to the IRS reference element (1, 1), for a source at distance u with
// elevation theta_e and azimuth phi_a.  Indices are 1-based.
double nf_delta_distance(const SystemConfig& cfg, int n_y, int n_z,
                         double theta_e, double phi_a, double u);

// Near-field IRS response at subcarrier m (1-based): entry for element
// (n_y, n_z) is exp(-j 2 pi f_m / c * delta_u), vectorized with n_y fastest
// then n_z.  Length N_r.
CVec nf_response(const SystemConfig& cfg, double theta_e, double phi_a,
                 double u, int m);

// Far-field BS UPA steering factors at subcarrier m: the response over the
// y axis (length N_y) and over the z axis (length N_z).  The full UPA
// response is their Kronecker product bs_response = row kron col.
CVec ff_row_response(const SystemConfig& cfg, double psi_e, double phi_a,
                     int m);
CVec ff_col_response(const SystemConfig& cfg, double psi_e, int m);
CVec bs_response(const SystemConfig& cfg, double psi_e, double phi_a, int m);

// Combined incident-reflect IRS response: conj(UE-side response) hadamard
// BS-side response.  Length N_r.
CVec incident_reflect_response(const SystemConfig& cfg, const UePath& path,
                               const BsIrsLink& link, int m);

// Channel tensor for subcarrier m (1-based): sum over paths of the cascaded
// gain-delay coefficient times the outer product of the BS z-axis response,
// the incident-reflect response, and the BS y-axis response.
// Shape N_z x N_r x N_y.
Tensor3 cascaded_channel_tensor(const SystemConfig& cfg,
                                const ChannelRealization& ch, int m);

// Fills in cascaded gains/delays and all M channel tensors.
ChannelRealization make_realization(const SystemConfig& cfg,
                                    const BsIrsLink& link,
                                    std::vector<UePath> paths);

// Draws a random realization: path gains standard complex Gaussian, angles
// uniform on (0, 2pi), UE distances uniform on distance_range.  The range
// must sit inside (0, R) where R is the Rayleigh distance of the IRS
// aperture.  Deterministic given the seed.
ChannelRealization sample_scenario(const SystemConfig& cfg, int num_paths,
                                   std::pair<double, double> distance_range,
                                   std::uint64_t rng_seed,
                                   double bs_irs_distance_m = 7.2153);

// R = 2 D^2 / lambda.
double rayleigh_distance(double aperture_m, double wavelength_m);

// Diagonal extent of the IRS: sqrt(((Nr_z-1)d)^2 + ((Nr_y-1)d)^2).
double irs_aperture(const SystemConfig& cfg);

}  // namespace nfirs
