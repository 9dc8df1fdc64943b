#pragma once

#include <vector>

#include "nfirs/channel.hpp"
#include "nfirs/estimator.hpp"
#include "nfirs/tensor.hpp"

namespace nfirs {

// Inputs of the closed-form estimation error bound.
struct CrlbInputs {
  double noise_power = 0.0;
  int subcarriers = 6;
  int n_z = 5;
  int n_y = 5;
  int n_r = 256;
  int pilot_symbols = 280;
};

// Aggregated metrics for one experiment cell.
struct MetricReport {
  double nmse_linear = 0.0;
  double nmse_db = 0.0;
  double crlb = 0.0;
  double mse = 0.0;
  int trials = 0;
};

// Fisher information of the vectorized linear observation model, kept in
// Kronecker-factored form I_{N_y} kron (V* V^T / sigma^2) kron I_{N_z}.
struct KroneckerFim {
  CMat middle;  // V* V^T / sigma^2, N_r x N_r
  int n_z = 1;
  int n_y = 1;

  // Dense materialization, permitted only for N_z * N_y * N_r <= 512.
  CMat dense() const;
  // Trace of the inverse: N_z * N_y * Tr{middle^{-1}}.
  double trace_of_inverse() const;
};

struct TraceBound {
  double lhs = 0.0;  // Tr{(V* V^T)^{-1}}
  double rhs = 0.0;  // N_r^2 / Tr{V* V^T} = N_r / P
  bool equality = false;
};

// Per-term operation-count model of the estimator.
struct ComplexityReport {
  double hosvd_ops = 0.0;
  double core_ops = 0.0;
  double factor_ops = 0.0;
  double recovery_ops = 0.0;       // pilot count * N_r^2
  double per_iteration_ops = 0.0;  // factor + recovery
  double total_ops = 0.0;          // per-iteration * M * t_max
  double log10_total = 0.0;
};

// Mean over subcarriers of |estimate - truth|_F^2 / |truth|_F^2.
double nmse(const std::vector<Tensor3>& estimates,
            const std::vector<Tensor3>& truths);

// Closed-form bound sigma^2 * M * N_z * N_y * N_r / P.
double crlb(const CrlbInputs& in);

KroneckerFim fim(const CMat& v, double noise_power, int n_z, int n_y);

// Arithmetic-harmonic-mean bound on the per-subcarrier error:
// Tr{(V* V^T)^{-1}} >= N_r / P, with equality exactly when V^T has
// orthogonal columns of equal norm.
TraceBound trace_bound_check(const CMat& v);

// Least-squares estimate of the channel tensor from one observation:
// applies pinv(V^T) on mode 2.  Unbiased; attains the error bound for
// orthogonal schedules.
Tensor3 ls_oracle_estimate(const Tensor3& y, const CMat& v);

ComplexityReport complexity_estimate(const SystemConfig& cfg,
                                     const Hyperparams& hp);

}  // namespace nfirs
