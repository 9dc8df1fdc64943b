#include "nfirs/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nfirs {

namespace {

void check_mode_index(int mode) {
  if (mode < 1 || mode > 3) {
    throw std::invalid_argument("mode must be 1, 2, or 3");
  }
}

// Squared Frobenius norms of the mode-n slices of z, for all three modes.
std::array<std::vector<double>, 3> slice_energies(const Tensor3& z) {
  std::array<std::vector<double>, 3> e;
  for (int n = 0; n < 3; ++n) {
    e[static_cast<size_t>(n)].assign(
        static_cast<std::size_t>(z.dims()[static_cast<size_t>(n)]), 0.0);
  }
  for (int c = 0; c < z.dim(3); ++c) {
    for (int b = 0; b < z.dim(2); ++b) {
      for (int a = 0; a < z.dim(1); ++a) {
        const double p = std::norm(z(a, b, c));
        e[0][static_cast<std::size_t>(a)] += p;
        e[1][static_cast<std::size_t>(b)] += p;
        e[2][static_cast<std::size_t>(c)] += p;
      }
    }
  }
  return e;
}

double fit_residual_sq(const Tensor3& z, const std::array<CMat, 3>& a,
                       const Tensor3& y) {
  const Tensor3 r = y - tucker_product(z, a[0], a[1], a[2]);
  const double fn = frobenius_norm(r);
  return fn * fn;
}

}  // namespace

void Hyperparams::validate() const {
  if (lambda1 <= 0.0) throw std::invalid_argument("lambda1 must be > 0");
  if (lambda2 <= 0.0) throw std::invalid_argument("lambda2 must be > 0");
  if (delta <= 0.0) throw std::invalid_argument("delta must be > 0");
  if (rho < 0.0 || rho > 1.0)
    throw std::invalid_argument("rho must lie in [0, 1]");
  if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (rel_tol < 0.0) throw std::invalid_argument("rel_tol must be >= 0");
  if (mode_ranks) {
    for (int r : *mode_ranks) {
      if (r < 1) throw std::invalid_argument("mode ranks must be >= 1");
    }
  }
}

EstimatorState initialize(const Tensor3& y, const Hyperparams& hp) {
  hp.validate();
  const double fn = frobenius_norm(y);
  if (!(fn > 0.0)) {
    throw std::invalid_argument("observation tensor must be nonzero");
  }
  Tensor3 yn = y * cplx{1.0 / fn, 0.0};
  const HosvdResult h =
      hp.mode_ranks ? hosvd(yn, *hp.mode_ranks) : hosvd(yn);
  EstimatorState st;
  st.z = h.core;
  st.a = h.factors;
  st.w = st.z;
  st.k = st.z;
  st.z_prev = st.z;
  st.eta = 1.0;
  st.norm_scale = fn;
  return st;
}

Tensor3 weight_tensor(const Tensor3& z, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("delta must be > 0");
  const auto e = slice_energies(z);
  Tensor3 d(z.dim(1), z.dim(2), z.dim(3));
  for (int c = 0; c < z.dim(3); ++c) {
    for (int b = 0; b < z.dim(2); ++b) {
      for (int a = 0; a < z.dim(1); ++a) {
        const double v = 1.0 / (e[0][static_cast<std::size_t>(a)] + delta) +
                         1.0 / (e[1][static_cast<std::size_t>(b)] + delta) +
                         1.0 / (e[2][static_cast<std::size_t>(c)] + delta);
        d(a, b, c) = cplx{v, 0.0};
      }
    }
  }
  return d;
}

double objective_Lo(const Tensor3& z, const std::array<CMat, 3>& a,
                    const Tensor3& y, const Hyperparams& hp) {
  const auto e = slice_energies(z);
  double logsum = 0.0;
  for (const auto& mode : e) {
    for (double v : mode) logsum += std::log(v + hp.delta);
  }
  double ridge = 0.0;
  for (const CMat& f : a) ridge += f.squaredNorm();
  return logsum + hp.lambda1 * fit_residual_sq(z, a, y) + hp.lambda2 * ridge;
}

double surrogate_Sn(const Tensor3& z, const std::array<CMat, 3>& a,
                    const Tensor3& y, const Tensor3& d, const Tensor3& z_ref,
                    const Hyperparams& hp) {
  // Tangent-plane majorization of each log(|slice|^2 + delta) term:
  // the quadratic part is <z, d * z>; the constants complete the tangent at
  // z_ref so the surrogate touches the objective there.
  const cplx quad = inner_product(z, hadamard(d, z));
  const auto e = slice_energies(z_ref);
  double constant = 0.0;
  for (const auto& mode : e) {
    for (double v : mode) {
      constant += hp.delta / (v + hp.delta) + std::log(v + hp.delta) - 1.0;
    }
  }
  double ridge = 0.0;
  for (const CMat& f : a) ridge += f.squaredNorm();
  return quad.real() + constant + hp.lambda1 * fit_residual_sq(z, a, y) +
         hp.lambda2 * ridge;
}

Tensor3 grad_F2(const Tensor3& w, const std::array<CMat, 3>& a,
                const Tensor3& y, double lambda1) {
  Tensor3 r = y - tucker_product(w, a[0], a[1], a[2]);
  r *= cplx{-2.0 * lambda1, 0.0};
  return tucker_product(r, a[0].adjoint(), a[1].adjoint(), a[2].adjoint());
}

Tensor3 prox_step(const Tensor3& w, const Tensor3& d, const Tensor3& grad,
                  double lambda3) {
  if (lambda3 <= 0.0) throw std::invalid_argument("lambda3 must be > 0");
  if (d.dims() != w.dims() || grad.dims() != w.dims()) {
    throw std::invalid_argument("prox inputs must share one shape");
  }
  Tensor3 out = w;
  cplx* po = out.data();
  const cplx* pg = grad.data();
  const cplx* pd = d.data();
  const std::int64_t n = w.size();
  for (std::int64_t i = 0; i < n; ++i) {
    po[i] = (po[i] - lambda3 * pg[i]) /
            (2.0 * lambda3 * pd[i].real() + 1.0);
  }
  return out;
}

Tensor3 monotone_select(
    const Tensor3& k, const Tensor3& z_prev,
    const std::function<double(const Tensor3&)>& objective_F) {
  return objective_F(k) <= objective_F(z_prev) ? k : z_prev;
}

std::pair<Tensor3, double> momentum_update(const Tensor3& z, const Tensor3& k,
                                           const Tensor3& z_prev,
                                           const Tensor3& w, double eta,
                                           double rho) {
  const double eta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * eta * eta));
  const double c1 = eta / eta_next;
  const double c2 = (eta - 1.0) / eta_next;
  Tensor3 w_next = z + cplx{c1, 0.0} * (k - z) + cplx{c2, 0.0} * (z - z_prev) +
                   cplx{c1 * (1.0 - rho), 0.0} * (w - k);
  return {std::move(w_next), eta_next};
}

double inner_objective_F(const Tensor3& x, const Tensor3& d,
                         const std::array<CMat, 3>& a, const Tensor3& y,
                         double lambda1) {
  const cplx quad = inner_product(x, hadamard(d, x));
  return quad.real() + lambda1 * fit_residual_sq(x, a, y);
}

double lipschitz_estimate(const std::array<CMat, 3>& a, double lambda1,
                          const std::array<int, 3>& core_dims) {
  const std::array<CMat, 3> gram = {a[0].adjoint() * a[0],
                                    a[1].adjoint() * a[1],
                                    a[2].adjoint() * a[2]};
  Tensor3 x(core_dims[0], core_dims[1], core_dims[2]);
  cplx* px = x.data();
  for (std::int64_t i = 0; i < x.size(); ++i) px[i] = cplx{1.0, 0.0};
  double lam = 0.0;
  for (int it = 0; it < 30; ++it) {
    const double nx = frobenius_norm(x);
    if (!(nx > 0.0)) break;
    x *= cplx{1.0 / nx, 0.0};
    Tensor3 next = tucker_product(x, gram[0], gram[1], gram[2]);
    next *= cplx{2.0 * lambda1, 0.0};
    const double lam_next = frobenius_norm(next);
    x = std::move(next);
    if (it > 2 && std::abs(lam_next - lam) <= 1e-6 * std::abs(lam_next)) {
      lam = lam_next;
      break;
    }
    lam = lam_next;
  }
  return lam;
}

EstimatorState update_core(EstimatorState state, const Tensor3& y,
                           const Hyperparams& hp) {
  if (hp.k_max <= 0) return state;
  const double lam3 =
      hp.lambda3 > 0.0
          ? hp.lambda3
          : 0.9 / std::max(lipschitz_estimate(state.a, hp.lambda1,
                                              state.z.dims()),
                           1e-300);
  const auto objective = [&](const Tensor3& x) {
    return inner_objective_F(x, state.d, state.a, y, hp.lambda1);
  };
  // Fresh momentum for each outer iteration.
  state.w = state.z;
  state.z_prev = state.z;
  state.eta = 1.0;
  for (int k = 0; k < hp.k_max; ++k) {
    const Tensor3 g = grad_F2(state.w, state.a, y, hp.lambda1);
    state.k = prox_step(state.w, state.d, g, lam3);
    Tensor3 z_new = monotone_select(state.k, state.z, objective);
    auto [w_next, eta_next] =
        momentum_update(z_new, state.k, state.z, state.w, state.eta, hp.rho);
    state.z_prev = state.z;
    state.z = std::move(z_new);
    state.w = std::move(w_next);
    state.eta = eta_next;
  }
  return state;
}

CMat build_xi(const Tensor3& z, const std::array<CMat, 3>& a, int mode) {
  check_mode_index(mode);
  // Kronecker factors in descending mode order, skipping `mode`.
  const CMat* first = nullptr;
  const CMat* second = nullptr;
  switch (mode) {
    case 1:
      first = &a[2];
      second = &a[1];
      break;
    case 2:
      first = &a[2];
      second = &a[0];
      break;
    default:
      first = &a[1];
      second = &a[0];
      break;
  }
  const Eigen::Index r1 = first->rows(), c1 = first->cols();
  const Eigen::Index r2 = second->rows(), c2 = second->cols();
  CMat kron(r1 * r2, c1 * c2);
  for (Eigen::Index i = 0; i < r1; ++i) {
    for (Eigen::Index j = 0; j < c1; ++j) {
      kron.block(i * r2, j * c2, r2, c2) = (*first)(i, j) * (*second);
    }
  }
  return kron * unfold(z, mode).transpose();
}

Eigen::RowVectorXcd update_factor_row(const Eigen::RowVectorXcd& y_row,
                                      const CMat& xi, double lambda1,
                                      double lambda2) {
  if (lambda2 <= 0.0) {
    throw std::invalid_argument("factor ridge weight must be > 0");
  }
  if (y_row.cols() != xi.rows()) {
    throw std::invalid_argument("row length does not match design matrix");
  }
  CMat m = lambda1 * (xi.transpose() * xi.conjugate());
  m.diagonal().array() += lambda2;
  const Eigen::RowVectorXcd rhs = lambda1 * (y_row * xi.conjugate());
  // m is Hermitian positive definite; solve m^H x = rhs^H, i.e. m x = rhs^H.
  return m.ldlt().solve(rhs.adjoint()).adjoint();
}

namespace {

// Batched form of update_factor_row across all rows of unfold(y, mode).
CMat update_factor(const Tensor3& y, const Tensor3& z,
                   const std::array<CMat, 3>& a, int mode,
                   const Hyperparams& hp) {
  const CMat xi = build_xi(z, a, mode);
  CMat m = hp.lambda1 * (xi.transpose() * xi.conjugate());
  m.diagonal().array() += hp.lambda2;
  const CMat rhs = hp.lambda1 * (unfold(y, mode) * xi.conjugate());
  return m.ldlt().solve(rhs.adjoint()).adjoint();
}

}  // namespace

std::pair<Tensor3, std::vector<double>> estimate(const Tensor3& y,
                                                 const PhaseSchedule& schedule,
                                                 const Hyperparams& hp) {
  hp.validate();
  const Eigen::Index n_r = schedule.v.rows();
  const Eigen::Index p = schedule.v.cols();
  if (p < n_r) {
    throw std::invalid_argument(
        "recovery needs pilot count >= IRS element count");
  }
  if (y.dim(2) != p) {
    throw std::invalid_argument(
        "observation mode-2 extent does not match schedule pilot count");
  }

  EstimatorState st = initialize(y, hp);
  const Tensor3 yn = y * cplx{1.0 / st.norm_scale, 0.0};
  double prev = objective_Lo(st.z, st.a, yn, hp);
  st.objective_trace.push_back(prev);

  for (int t = 0; t < hp.t_max; ++t) {
    st.d = weight_tensor(st.z, hp.delta);
    st = update_core(std::move(st), yn, hp);
    for (int n = 1; n <= 3; ++n) {
      st.a[static_cast<size_t>(n - 1)] = update_factor(yn, st.z, st.a, n, hp);
    }
    const double cur = objective_Lo(st.z, st.a, yn, hp);
    st.objective_trace.push_back(cur);
    if (cur > prev + 1e-6) {
      throw std::runtime_error(
          "objective increased by " + std::to_string(cur - prev) +
          " between outer iterations; monotonicity violated");
    }
    const double rel = std::abs(cur - prev) / std::max(std::abs(prev), 1e-12);
    prev = cur;
    if (rel < hp.rel_tol) break;
  }

  // Recovery: undo the phase schedule on mode 2, then the normalization.
  const CMat vt = schedule.v.transpose();
  const CMat pinv_vt = vt.completeOrthogonalDecomposition().pseudoInverse();
  Tensor3 yhat = tucker_product(st.z, st.a[0], st.a[1], st.a[2]);
  Tensor3 ghat = mode_product(yhat, pinv_vt, 2);
  ghat *= cplx{st.norm_scale, 0.0};
  return {std::move(ghat), std::move(st.objective_trace)};
}

EstimationResult estimate_all(const ObservationSet& obs,
                              const Hyperparams& hp) {
  const auto start = std::chrono::steady_clock::now();
  EstimationResult out;
  for (const Tensor3& y : obs.tensors) {
    auto [ghat, trace] = estimate(y, obs.schedule, hp);
    out.iterations.push_back(static_cast<int>(trace.size()) - 1);
    out.channels.push_back(std::move(ghat));
    out.traces.push_back(std::move(trace));
  }
  const auto end = std::chrono::steady_clock::now();
  out.wall_ms =
      std::chrono::duration<double, std::milli>(end - start).count();
  return out;
}

}  // namespace nfirs
