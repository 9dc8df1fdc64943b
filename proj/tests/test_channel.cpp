#include "nfirs/channel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "nfirs/rng.hpp"
#include "nfirs/tensor.hpp"

namespace nfirs {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

SystemConfig tiny_config() {
  SystemConfig cfg;
  cfg.n_z = 2;
  cfg.n_y = 3;
  cfg.nr_z = 4;
  cfg.nr_y = 2;
  cfg.pilot_symbols = 16;
  cfg.subcarriers = 2;
  return cfg;
}

// Geometric form of the path difference: place the source at distance u
// with elevation theta_e and azimuth phi_a, subtract the reference range.
double delta_distance_oracle(const SystemConfig& cfg, int n_y, int n_z,
                             double theta_e, double phi_a, double u) {
  const double d = cfg.spacing();
  const double ay = (n_y - 1) * d;
  const double az = (n_z - 1) * d;
  const double sx = u * std::sin(theta_e) * std::cos(phi_a);
  const double sy = u * std::sin(theta_e) * std::sin(phi_a);
  const double sz = u * std::cos(theta_e);
  return std::sqrt(sx * sx + (sy - ay) * (sy - ay) + (sz - az) * (sz - az)) -
         u;
}

// ===== subcarrier grid ==================================================

TEST(SystemConfig, SubcarrierFrequencies) {
  SystemConfig cfg;  // defaults: f_c = 28 GHz, B = 2 GHz, M = 6
  EXPECT_NEAR(cfg.subcarrier_hz(1), 28e9 - 4.0 / 12.0 * 2e9, 1.0);
  EXPECT_NEAR(cfg.subcarrier_hz(6), 29e9, 1.0);
  // The grid is uniform: pair sums are all equal.
  const double s = cfg.subcarrier_hz(1) + cfg.subcarrier_hz(6);
  EXPECT_NEAR(cfg.subcarrier_hz(2) + cfg.subcarrier_hz(5), s, 1e-3);
  EXPECT_NEAR(cfg.subcarrier_hz(3) + cfg.subcarrier_hz(4), s, 1e-3);
  EXPECT_NEAR(s, 2.0 * cfg.carrier_hz + cfg.bandwidth_hz / 6.0, 1e-3);
  EXPECT_THROW(cfg.subcarrier_hz(0), std::invalid_argument);
  EXPECT_THROW(cfg.subcarrier_hz(7), std::invalid_argument);
}

TEST(SystemConfig, ValidationRejectsBadGeometry) {
  SystemConfig cfg;
  cfg.n_z = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SystemConfig{};
  cfg.bandwidth_hz = 60e9;  // carrier 28 GHz < B/2
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SystemConfig{};
  cfg.spacing_m = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_NO_THROW(SystemConfig{}.validate());
}

TEST(SystemConfig, DefaultSpacingIsHalfCarrierWavelength) {
  const SystemConfig cfg;
  EXPECT_NEAR(cfg.spacing(), 0.5 * 299792458.0 / 28e9, 1e-15);
  SystemConfig fixed;
  fixed.spacing_m = 0.004;
  EXPECT_EQ(fixed.spacing(), 0.004);
}

// ===== path difference ==================================================

TEST(DeltaDistance, ReferenceElementIsZero) {
  const SystemConfig cfg;
  EXPECT_EQ(nf_delta_distance(cfg, 1, 1, 0.7, 1.9, 5.0), 0.0);
}

TEST(DeltaDistance, ExpandedFormMatchesGeometricForm) {
  const SystemConfig cfg;
  Rng rng(101);
  for (int i = 0; i < 200; ++i) {
    const int ny = 1 + static_cast<int>(rng.uniform(0.0, cfg.nr_y));
    const int nz = 1 + static_cast<int>(rng.uniform(0.0, cfg.nr_z));
    const double theta = rng.uniform(0.0, kTwoPi);
    const double phi = rng.uniform(0.0, kTwoPi);
    const double u = rng.uniform(1.0, 20.0);
    const double got = nf_delta_distance(cfg, ny, nz, theta, phi, u);
    const double want = delta_distance_oracle(cfg, ny, nz, theta, phi, u);
    EXPECT_NEAR(got, want, 1e-12);
  }
}

TEST(DeltaDistance, PlanarLimitRecoversLinearPhase) {
  const SystemConfig cfg;
  const double theta = 1.0, phi = 0.7, u = 1e6;
  const int ny = 4, nz = 8;
  const double d = cfg.spacing();
  const double expect = -((ny - 1) * d * std::sin(theta) * std::sin(phi) +
                          (nz - 1) * d * std::cos(theta));
  const double got = nf_delta_distance(cfg, ny, nz, theta, phi, u);
  EXPECT_LT(std::abs(got - expect) / std::abs(expect), 1e-3);
}

TEST(DeltaDistance, RejectsBadInputs) {
  const SystemConfig cfg;
  EXPECT_THROW(nf_delta_distance(cfg, 1, 1, 0.0, 0.0, 0.0),
               std::invalid_argument);
  EXPECT_THROW(nf_delta_distance(cfg, 0, 1, 0.0, 0.0, 1.0),
               std::invalid_argument);
  EXPECT_THROW(nf_delta_distance(cfg, 1, cfg.nr_z + 1, 0.0, 0.0, 1.0),
               std::invalid_argument);
}

// ===== array responses ==================================================

TEST(NfResponse, UnitModulusAndReferenceEntry) {
  const SystemConfig cfg;
  const CVec a = nf_response(cfg, 0.9, 2.1, 6.5, 3);
  ASSERT_EQ(a.size(), cfg.n_r());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(std::abs(a[i]), 1.0, 1e-14);
  }
  EXPECT_NEAR(std::abs(a[0] - cplx(1.0, 0.0)), 0.0, 1e-15);
}

TEST(NfResponse, SecondElementCarriesPathDifferencePhase) {
  const SystemConfig cfg;
  const double theta = kTwoPi / 4.0, phi = kTwoPi / 4.0, u = 5.0;
  const int m = 4;
  const CVec a = nf_response(cfg, theta, phi, u, m);
  const double du = nf_delta_distance(cfg, 2, 1, theta, phi, u);
  const double phase = -kTwoPi * cfg.subcarrier_hz(m) / cfg.light_speed * du;
  // Element (n_y=2, n_z=1) sits at index 1 (n_y fastest).
  EXPECT_NEAR(std::abs(a[1] - cplx(std::cos(phase), std::sin(phase))), 0.0,
              1e-12);
}

TEST(FfResponse, DegenerateAnglesGiveFlatResponses) {
  const SystemConfig cfg;
  const CVec row = ff_row_response(cfg, 1.1, 0.0, 2);
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    EXPECT_NEAR(std::abs(row[i] - cplx(1.0, 0.0)), 0.0, 1e-12);
  }
  const CVec col = ff_col_response(cfg, kTwoPi / 4.0, 2);
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    EXPECT_NEAR(std::abs(col[i] - cplx(1.0, 0.0)), 0.0, 1e-12);
  }
}

TEST(FfResponse, KroneckerMatchesPerElementOracle) {
  const SystemConfig cfg;
  Rng rng(107);
  for (int trial = 0; trial < 20; ++trial) {
    const double psi = rng.uniform(0.0, kTwoPi);
    const double phi = rng.uniform(0.0, kTwoPi);
    const int m = 1 + static_cast<int>(rng.uniform(0.0, cfg.subcarriers));
    const CVec b = bs_response(cfg, psi, phi, m);
    const double k = kTwoPi * cfg.subcarrier_hz(m) / cfg.light_speed;
    const double d = cfg.spacing();
    for (int y = 0; y < cfg.n_y; ++y) {
      for (int z = 0; z < cfg.n_z; ++z) {
        const double phase = -k * d *
                             (y * std::sin(psi) * std::sin(phi) +
                              z * std::cos(psi));
        const cplx want{std::cos(phase), std::sin(phase)};
        EXPECT_NEAR(std::abs(b[y * cfg.n_z + z] - want), 0.0, 1e-12);
      }
    }
  }
}

TEST(IncidentReflect, ConjugateCancellationAndOracle) {
  const SystemConfig cfg = tiny_config();
  BsIrsLink link;
  link.gain = cplx{1.0, 0.0};
  link.irs_elev = 0.8;
  link.irs_azim = 1.3;
  link.distance_m = 0.21;
  UePath same;
  same.irs_elev = link.irs_elev;
  same.irs_azim = link.irs_azim;
  same.distance_m = link.distance_m;
  const CVec b_same = incident_reflect_response(cfg, same, link, 1);
  for (Eigen::Index i = 0; i < b_same.size(); ++i) {
    EXPECT_NEAR(std::abs(b_same[i] - cplx(1.0, 0.0)), 0.0, 1e-12);
  }
  UePath other;
  other.irs_elev = 2.6;
  other.irs_azim = 0.4;
  other.distance_m = 0.09;
  const CVec got = incident_reflect_response(cfg, other, link, 2);
  const CVec in = nf_response(cfg, other.irs_elev, other.irs_azim,
                              other.distance_m, 2);
  const CVec out =
      nf_response(cfg, link.irs_elev, link.irs_azim, link.distance_m, 2);
  for (Eigen::Index i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(std::abs(got[i]), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(got[i] - std::conj(in[i]) * out[i]), 0.0, 1e-14);
  }
}

// ===== cascaded channel tensor ==========================================

TEST(CascadedTensor, AllOnesFactorsGiveAllOnesTensor) {
  SystemConfig cfg = tiny_config();
  BsIrsLink link;
  link.gain = cplx{1.0, 0.0};
  // Flat responses: zero azimuth kills the row gradient, elevation at a
  // quarter turn kills the column gradient, and a huge distance with the
  // same IRS angles cancels in the incident-reflect product.
  link.bs_elev = kTwoPi / 4.0;
  link.bs_azim = 0.0;
  link.irs_elev = 0.37;
  link.irs_azim = 1.9;
  link.distance_m = 3.0;
  UePath p;
  p.gain = cplx{1.0, 0.0};
  p.delay_s = 0.0;
  p.irs_elev = link.irs_elev;
  p.irs_azim = link.irs_azim;
  p.distance_m = link.distance_m;
  ChannelRealization ch;
  ch.link = link;
  ch.paths = {p};
  ch.cascaded_gains = {cplx{1.0, 0.0}};
  ch.cascaded_delays = {0.0};
  const Tensor3 g = cascaded_channel_tensor(cfg, ch, 1);
  for (std::int64_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(std::abs(g.data()[i] - cplx(1.0, 0.0)), 0.0, 1e-12);
  }
}

TEST(CascadedTensor, MatchesMatrixOracle) {
  // Independent construction: G = sum_l kappa_l a_b b_l^T as an
  // N_b x N_r matrix, then re-indexed to (n_z, n_r, n_y).
  const SystemConfig cfg = tiny_config();
  const ChannelRealization ch =
      sample_scenario(cfg, 2, {0.01, 0.04}, 424242, 0.27);
  for (int m = 1; m <= cfg.subcarriers; ++m) {
    const double fm = cfg.subcarrier_hz(m);
    CMat g_mat = CMat::Zero(cfg.n_b(), cfg.n_r());
    for (std::size_t l = 0; l < ch.paths.size(); ++l) {
      const double phase = -kTwoPi * fm * ch.cascaded_delays[l];
      const cplx kappa =
          ch.cascaded_gains[l] * cplx{std::cos(phase), std::sin(phase)};
      const CVec ab = bs_response(cfg, ch.link.bs_elev, ch.link.bs_azim, m);
      const CVec b = incident_reflect_response(cfg, ch.paths[l], ch.link, m);
      g_mat += kappa * ab * b.transpose();
    }
    const Tensor3& g_ten = ch.tensors[static_cast<std::size_t>(m - 1)];
    ASSERT_EQ(g_ten.dims(),
              (std::array<int, 3>{cfg.n_z, cfg.n_r(), cfg.n_y}));
    for (int iy = 0; iy < cfg.n_y; ++iy) {
      for (int ir = 0; ir < cfg.n_r(); ++ir) {
        for (int iz = 0; iz < cfg.n_z; ++iz) {
          EXPECT_NEAR(
              std::abs(g_ten(iz, ir, iy) - g_mat(iy * cfg.n_z + iz, ir)),
              0.0, 1e-12);
        }
      }
    }
  }
}

TEST(CascadedTensor, RejectsEmptyPathList) {
  const SystemConfig cfg = tiny_config();
  ChannelRealization ch;
  ch.link.distance_m = 1.0;
  EXPECT_THROW(cascaded_channel_tensor(cfg, ch, 1), std::invalid_argument);
  EXPECT_THROW(make_realization(cfg, ch.link, {}), std::invalid_argument);
}

// ===== scenario sampling ================================================

TEST(SampleScenario, DeterministicGivenSeed) {
  const SystemConfig cfg = tiny_config();
  const ChannelRealization a = sample_scenario(cfg, 2, {0.01, 0.04}, 7, 0.25);
  const ChannelRealization b = sample_scenario(cfg, 2, {0.01, 0.04}, 7, 0.25);
  EXPECT_EQ(a.link.gain, b.link.gain);
  EXPECT_EQ(a.link.bs_elev, b.link.bs_elev);
  ASSERT_EQ(a.paths.size(), b.paths.size());
  for (std::size_t l = 0; l < a.paths.size(); ++l) {
    EXPECT_EQ(a.paths[l].gain, b.paths[l].gain);
    EXPECT_EQ(a.paths[l].distance_m, b.paths[l].distance_m);
  }
  for (std::size_t m = 0; m < a.tensors.size(); ++m) {
    for (std::int64_t i = 0; i < a.tensors[m].size(); ++i) {
      EXPECT_EQ(a.tensors[m].data()[i], b.tensors[m].data()[i]);
    }
  }
  const ChannelRealization c = sample_scenario(cfg, 2, {0.01, 0.04}, 8, 0.25);
  EXPECT_NE(a.link.gain, c.link.gain);
}

TEST(SampleScenario, CascadedIdentitiesHoldExactly) {
  const SystemConfig cfg = tiny_config();
  const ChannelRealization ch = sample_scenario(cfg, 3, {0.01, 0.04}, 99, 0.3);
  ASSERT_EQ(ch.cascaded_gains.size(), 3u);
  const double xi = ch.link.delay_s(cfg.light_speed);
  for (std::size_t l = 0; l < ch.paths.size(); ++l) {
    EXPECT_EQ(ch.cascaded_gains[l], ch.paths[l].gain * ch.link.gain);
    EXPECT_EQ(ch.cascaded_delays[l], xi + ch.paths[l].delay_s);
    EXPECT_GT(ch.paths[l].distance_m, 0.01);
    EXPECT_LT(ch.paths[l].distance_m, 0.04);
  }
  EXPECT_EQ(ch.tensors.size(), static_cast<std::size_t>(cfg.subcarriers));
}

TEST(SampleScenario, PathGainSecondMomentIsUnit) {
  SystemConfig cfg = tiny_config();
  cfg.n_z = 1;
  cfg.n_y = 1;
  cfg.nr_z = 2;
  cfg.nr_y = 2;
  cfg.subcarriers = 1;
  const int big_l = 20000;
  const ChannelRealization ch =
      sample_scenario(cfg, big_l, {0.002, 0.008}, 1234, 0.2);
  double acc = 0.0;
  for (const UePath& p : ch.paths) acc += std::norm(p.gain);
  EXPECT_NEAR(acc / big_l, 1.0, 0.02);
}

TEST(SampleScenario, EnforcesNearFieldRange) {
  const SystemConfig cfg;  // Rayleigh distance about 21.3 m
  EXPECT_NO_THROW(sample_scenario(cfg, 1, {5.0, 10.0}, 1));
  EXPECT_THROW(sample_scenario(cfg, 1, {5.0, 30.0}, 1),
               std::invalid_argument);
  EXPECT_THROW(sample_scenario(cfg, 1, {0.0, 10.0}, 1),
               std::invalid_argument);
  EXPECT_THROW(sample_scenario(cfg, 1, {8.0, 5.0}, 1), std::invalid_argument);
  EXPECT_THROW(sample_scenario(cfg, 0, {5.0, 10.0}, 1),
               std::invalid_argument);
}

// ===== apertures and distances ==========================================

TEST(RayleighDistance, SpotValues) {
  EXPECT_NEAR(rayleigh_distance(0.338, 0.01071), 21.3, 0.5);
  EXPECT_EQ(rayleigh_distance(0.0, 0.5), 0.0);
  EXPECT_NEAR(rayleigh_distance(1.0, 0.5), 4.0, 1e-12);
  EXPECT_THROW(rayleigh_distance(-1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(rayleigh_distance(1.0, 0.0), std::invalid_argument);
}

TEST(IrsAperture, MatchesDiagonalOfDefaultArray) {
  const SystemConfig cfg;  // 64 x 4 at half-wavelength spacing
  EXPECT_NEAR(irs_aperture(cfg), 0.338, 0.002);
  EXPECT_NEAR(rayleigh_distance(irs_aperture(cfg), cfg.wavelength()), 21.3,
              0.3);
}

}  // namespace
}  // namespace nfirs
