#pragma once

#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nfirs/channel.hpp"
#include "nfirs/observation.hpp"
#include "nfirs/tensor.hpp"

namespace nfirs {

// Tuning knobs of the sparse Tucker estimator.
struct Hyperparams {
  double lambda1 = 2.0;    // data-fit weight
  double lambda2 = 1.0;    // factor ridge weight
  double delta = 1e-10;    // log-sum smoothing constant
  double lambda3 = 0.0;    // inner step size; <= 0 selects the automatic
                           // Lipschitz-based step
  double rho = 0.5;        // over-relaxation balance in [0, 1]
  int t_max = 500;         // outer iteration cap
  int k_max = 10;          // inner iterations per outer iteration
  double rel_tol = 1e-4;   // outer stop on relative objective change
  std::optional<std::array<int, 3>> mode_ranks;  // core truncation

  void validate() const;

  bool operator==(const Hyperparams&) const = default;
};

// Working state of one estimation problem.
struct EstimatorState {
  Tensor3 z;                  // core tensor
  std::array<CMat, 3> a;      // factor matrices
  Tensor3 d;                  // reweighting tensor of the current surrogate
  Tensor3 w, k, z_prev;       // inner-solver auxiliaries
  double eta = 1.0;           // momentum scalar
  double norm_scale = 1.0;    // observation norm divided out at init
  std::vector<double> objective_trace;
};

// Output of the full pipeline over all subcarriers.
struct EstimationResult {
  std::vector<Tensor3> channels;            // per-subcarrier N_z x N_r x N_y
  std::vector<std::vector<double>> traces;  // per-subcarrier objective traces
  std::vector<int> iterations;              // outer iterations used
  double wall_ms = 0.0;
};

// Scales y to unit Frobenius norm (scale kept in norm_scale) and seeds the
// core and factors with the HOSVD of the normalized tensor, truncated to
// hp.mode_ranks when given.
EstimatorState initialize(const Tensor3& y, const Hyperparams& hp);

// Reweighting tensor: entry (i1, i2, i3) sums 1 / (|slice|_F^2 + delta)
// over the three slices of z passing through that entry.
Tensor3 weight_tensor(const Tensor3& z, double delta);

// Full objective: tri-modal log-sum sparsity of the core + lambda1 * data
// fit + lambda2 * factor ridge.
double objective_Lo(const Tensor3& z, const std::array<CMat, 3>& a,
                    const Tensor3& y, const Hyperparams& hp);

// Majorizing surrogate anchored at z_ref (d must be weight_tensor(z_ref)):
// equals objective_Lo at z = z_ref and dominates it elsewhere.
double surrogate_Sn(const Tensor3& z, const std::array<CMat, 3>& a,
                    const Tensor3& y, const Tensor3& d, const Tensor3& z_ref,
                    const Hyperparams& hp);

// Gradient of the data-fit term lambda1 |y - w x1 A1 x2 A2 x3 A3|_F^2 in
// the coordinate convention d/dRe + j d/dIm:
// -2 lambda1 (y - w x A's) x1 A1^H x2 A2^H x3 A3^H.
Tensor3 grad_F2(const Tensor3& w, const std::array<CMat, 3>& a,
                const Tensor3& y, double lambda1);

// Proximal step: entrywise (w - lambda3 * grad) / (2 lambda3 * d + 1),
// the exact minimizer of lambda3 <x, d * x> + 0.5 |x - (w - lambda3 g)|^2.
Tensor3 prox_step(const Tensor3& w, const Tensor3& d, const Tensor3& grad,
                  double lambda3);

// Keeps whichever of {k, z_prev} has the smaller inner objective; ties
// prefer k.
Tensor3 monotone_select(const Tensor3& k, const Tensor3& z_prev,
                        const std::function<double(const Tensor3&)>& objective_F);

// Momentum recurrence: eta_next = (1 + sqrt(1 + 4 eta^2)) / 2 and the
// over-relaxed extrapolation combining z, k, z_prev, and w.
std::pair<Tensor3, double> momentum_update(const Tensor3& z, const Tensor3& k,
                                           const Tensor3& z_prev,
                                           const Tensor3& w, double eta,
                                           double rho);

// Inner objective <x, d * x> + lambda1 |y - x x1 A1 x2 A2 x3 A3|_F^2
// minimized by the inner solver while the factors stay fixed.
double inner_objective_F(const Tensor3& x, const Tensor3& d,
                         const std::array<CMat, 3>& a, const Tensor3& y,
                         double lambda1);

// Power-iteration estimate of the largest eigenvalue of the data-fit
// Hessian map x -> 2 lambda1 * x x1 A1^H A1 x2 A2^H A2 x3 A3^H A3.
double lipschitz_estimate(const std::array<CMat, 3>& a, double lambda1,
                          const std::array<int, 3>& core_dims);

// Runs hp.k_max accelerated proximal steps on the core with factors fixed,
// using state.d as the surrogate weights.  The inner momentum state is
// re-initialized on entry.  Non-positive k_max leaves the state unchanged.
EstimatorState update_core(EstimatorState state, const Tensor3& y,
                           const Hyperparams& hp);

// Xi = kron(factors of the other two modes, descending mode order) times
// unfold(z, mode)^T; the per-row design matrix of the factor update.
CMat build_xi(const Tensor3& z, const std::array<CMat, 3>& a, int mode);

// Ridge-regularized row update: lambda1 * y_row * conj(Xi) *
// (lambda1 Xi^T conj(Xi) + lambda2 I)^{-1}.
Eigen::RowVectorXcd update_factor_row(const Eigen::RowVectorXcd& y_row,
                                      const CMat& xi, double lambda1,
                                      double lambda2);

// Full pipeline for one subcarrier observation y (N_z x P x N_y): HOSVD
// init, alternating core/factor updates until rel_tol or t_max, then
// channel recovery through the pseudoinverse of V^T on mode 2 and
// un-normalization.  Returns the recovered N_z x N_r x N_y tensor and the
// outer objective trace (entry 0 is the value at initialization).
std::pair<Tensor3, std::vector<double>> estimate(const Tensor3& y,
                                                 const PhaseSchedule& schedule,
                                                 const Hyperparams& hp);

// Convenience loop over all subcarriers of an observation set.
EstimationResult estimate_all(const ObservationSet& obs,
                              const Hyperparams& hp);

}  // namespace nfirs
