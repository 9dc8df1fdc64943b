#include "nfirs/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nfirs/rng.hpp"

namespace nfirs {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_subcarrier(const SystemConfig& cfg, int m) {
  if (m < 1 || m > cfg.subcarriers) {
    throw std::invalid_argument("subcarrier index " + std::to_string(m) +
                                " outside 1.." +
                                std::to_string(cfg.subcarriers));
  }
}

cplx unit_phase(double phase) { return {std::cos(phase), std::sin(phase)}; }

}  // namespace

double SystemConfig::subcarrier_hz(int m) const {
  check_subcarrier(*this, m);
  const double mm = static_cast<double>(m);
  const double big_m = static_cast<double>(subcarriers);
  return carrier_hz + (2.0 * mm - big_m) / (2.0 * big_m) * bandwidth_hz;
}

void SystemConfig::validate() const {
  if (n_z < 1 || n_y < 1 || nr_z < 1 || nr_y < 1) {
    throw std::invalid_argument("array extents must all be >= 1");
  }
  if (subcarriers < 1) {
    throw std::invalid_argument("subcarrier count must be >= 1");
  }
  if (pilot_symbols < 1) {
    throw std::invalid_argument("pilot symbol count must be >= 1");
  }
  if (bandwidth_hz <= 0.0) {
    throw std::invalid_argument("bandwidth must be positive");
  }
  if (carrier_hz <= 0.5 * bandwidth_hz) {
    throw std::invalid_argument("carrier must exceed half the bandwidth");
  }
  if (spacing_m < 0.0) {
    throw std::invalid_argument("element spacing must be >= 0");
  }
  if (light_speed <= 0.0) {
    throw std::invalid_argument("light speed must be positive");
  }
}

double nf_delta_distance(const SystemConfig& cfg, int n_y, int n_z,
                         double theta_e, double phi_a, double u) {
  if (u <= 0.0) {
    throw std::invalid_argument("source distance must be positive");
  }
  if (n_y < 1 || n_y > cfg.nr_y || n_z < 1 || n_z > cfg.nr_z) {
    throw std::invalid_argument("IRS element index out of range");
  }
  const double d = cfg.spacing();
  const double ay = (n_y - 1) * d;
  const double az = (n_z - 1) * d;
  const double sq = u * u + ay * ay + az * az -
                    2.0 * ay * u * std::sin(theta_e) * std::sin(phi_a) -
                    2.0 * az * u * std::cos(theta_e);
  return std::sqrt(sq) - u;
}

CVec nf_response(const SystemConfig& cfg, double theta_e, double phi_a,
                 double u, int m) {
  check_subcarrier(cfg, m);
  const double k = kTwoPi * cfg.subcarrier_hz(m) / cfg.light_speed;
  CVec a(cfg.n_r());
  for (int nz = 1; nz <= cfg.nr_z; ++nz) {
    for (int ny = 1; ny <= cfg.nr_y; ++ny) {
      const double du = nf_delta_distance(cfg, ny, nz, theta_e, phi_a, u);
      a[(ny - 1) + (nz - 1) * cfg.nr_y] = unit_phase(-k * du);
    }
  }
  return a;
}

CVec ff_row_response(const SystemConfig& cfg, double psi_e, double phi_a,
                     int m) {
  check_subcarrier(cfg, m);
  const double step = -kTwoPi * cfg.subcarrier_hz(m) / cfg.light_speed *
                      cfg.spacing() * std::sin(psi_e) * std::sin(phi_a);
  CVec a(cfg.n_y);
  for (int k = 0; k < cfg.n_y; ++k) a[k] = unit_phase(step * k);
  return a;
}

CVec ff_col_response(const SystemConfig& cfg, double psi_e, int m) {
  check_subcarrier(cfg, m);
  const double step = -kTwoPi * cfg.subcarrier_hz(m) / cfg.light_speed *
                      cfg.spacing() * std::cos(psi_e);
  CVec a(cfg.n_z);
  for (int k = 0; k < cfg.n_z; ++k) a[k] = unit_phase(step * k);
  return a;
}

CVec bs_response(const SystemConfig& cfg, double psi_e, double phi_a, int m) {
  const CVec row = ff_row_response(cfg, psi_e, phi_a, m);
  const CVec col = ff_col_response(cfg, psi_e, m);
  CVec b(cfg.n_b());
  for (int y = 0; y < cfg.n_y; ++y)
    for (int z = 0; z < cfg.n_z; ++z) b[y * cfg.n_z + z] = row[y] * col[z];
  return b;
}

CVec incident_reflect_response(const SystemConfig& cfg, const UePath& path,
                               const BsIrsLink& link, int m) {
  const CVec in =
      nf_response(cfg, path.irs_elev, path.irs_azim, path.distance_m, m);
  const CVec out =
      nf_response(cfg, link.irs_elev, link.irs_azim, link.distance_m, m);
  return in.conjugate().cwiseProduct(out);
}

Tensor3 cascaded_channel_tensor(const SystemConfig& cfg,
                                const ChannelRealization& ch, int m) {
  check_subcarrier(cfg, m);
  if (ch.paths.empty()) {
    throw std::invalid_argument("realization has no UE paths");
  }
  const double fm = cfg.subcarrier_hz(m);
  const CVec col = ff_col_response(cfg, ch.link.bs_elev, m);
  const CVec row = ff_row_response(cfg, ch.link.bs_elev, ch.link.bs_azim, m);
  Tensor3 g(cfg.n_z, cfg.n_r(), cfg.n_y);
  for (std::size_t l = 0; l < ch.paths.size(); ++l) {
    const cplx kappa = ch.cascaded_gains[l] *
                       unit_phase(-kTwoPi * fm * ch.cascaded_delays[l]);
    const CVec b = incident_reflect_response(cfg, ch.paths[l], ch.link, m);
    for (int iy = 0; iy < cfg.n_y; ++iy) {
      const cplx ky = kappa * row[iy];
      for (int ir = 0; ir < cfg.n_r(); ++ir) {
        const cplx kyb = ky * b[ir];
        for (int iz = 0; iz < cfg.n_z; ++iz) {
          g(iz, ir, iy) += kyb * col[iz];
        }
      }
    }
  }
  return g;
}

ChannelRealization make_realization(const SystemConfig& cfg,
                                    const BsIrsLink& link,
                                    std::vector<UePath> paths) {
  cfg.validate();
  if (paths.empty()) {
    throw std::invalid_argument("at least one UE path is required");
  }
  if (link.distance_m <= 0.0) {
    throw std::invalid_argument("BS-IRS distance must be positive");
  }
  ChannelRealization ch;
  ch.link = link;
  ch.paths = std::move(paths);
  const double xi = link.delay_s(cfg.light_speed);
  for (const UePath& p : ch.paths) {
    if (p.distance_m <= 0.0) {
      throw std::invalid_argument("UE path distance must be positive");
    }
    if (p.delay_s < 0.0) {
      throw std::invalid_argument("UE path delay must be >= 0");
    }
    ch.cascaded_gains.push_back(p.gain * link.gain);
    ch.cascaded_delays.push_back(xi + p.delay_s);
  }
  ch.tensors.reserve(static_cast<std::size_t>(cfg.subcarriers));
  for (int m = 1; m <= cfg.subcarriers; ++m) {
    ch.tensors.push_back(cascaded_channel_tensor(cfg, ch, m));
  }
  return ch;
}

ChannelRealization sample_scenario(const SystemConfig& cfg, int num_paths,
                                   std::pair<double, double> distance_range,
                                   std::uint64_t rng_seed,
                                   double bs_irs_distance_m) {
  cfg.validate();
  if (num_paths < 1) {
    throw std::invalid_argument("path count must be >= 1");
  }
  const double rayleigh =
      rayleigh_distance(irs_aperture(cfg), cfg.wavelength());
  if (!(distance_range.first > 0.0) ||
      !(distance_range.second >= distance_range.first) ||
      !(distance_range.second < rayleigh)) {
    throw std::invalid_argument(
        "UE distance range must sit inside (0, " + std::to_string(rayleigh) +
        ") m to stay within the near-field region");
  }
  Rng rng(rng_seed);
  BsIrsLink link;
  link.gain = rng.complex_normal();
  link.bs_elev = rng.uniform(0.0, kTwoPi);
  link.bs_azim = rng.uniform(0.0, kTwoPi);
  link.irs_elev = rng.uniform(0.0, kTwoPi);
  link.irs_azim = rng.uniform(0.0, kTwoPi);
  link.distance_m = bs_irs_distance_m;
  std::vector<UePath> paths(static_cast<std::size_t>(num_paths));
  for (UePath& p : paths) {
    p.gain = rng.complex_normal();
    p.irs_elev = rng.uniform(0.0, kTwoPi);
    p.irs_azim = rng.uniform(0.0, kTwoPi);
    p.distance_m = rng.uniform(distance_range.first, distance_range.second);
    p.delay_s = p.distance_m / cfg.light_speed;
  }
  return make_realization(cfg, link, std::move(paths));
}

double rayleigh_distance(double aperture_m, double wavelength_m) {
  if (aperture_m < 0.0 || wavelength_m <= 0.0) {
    throw std::invalid_argument(
        "aperture must be >= 0 and wavelength positive");
  }
  return 2.0 * aperture_m * aperture_m / wavelength_m;
}

double irs_aperture(const SystemConfig& cfg) {
  const double d = cfg.spacing();
  const double ez = (cfg.nr_z - 1) * d;
  const double ey = (cfg.nr_y - 1) * d;
  return std::sqrt(ez * ez + ey * ey);
}

}  // namespace nfirs
