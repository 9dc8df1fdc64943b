#include "nfirs/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nfirs {

namespace {

CMat gram_vvt(const CMat& v) {
  return v.conjugate() * v.transpose();  // N_r x N_r
}

}  // namespace

double nmse(const std::vector<Tensor3>& estimates,
            const std::vector<Tensor3>& truths) {
  if (estimates.size() != truths.size() || estimates.empty()) {
    throw std::invalid_argument(
        "estimate and truth lists must be equal-length and non-empty");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (estimates[i].dims() != truths[i].dims()) {
      throw std::invalid_argument("tensor dimension mismatch at index " +
                                  std::to_string(i));
    }
    const double denom = frobenius_norm(truths[i]);
    if (!(denom > 0.0)) {
      throw std::invalid_argument("truth tensor " + std::to_string(i) +
                                  " has zero norm");
    }
    const double num = frobenius_norm(estimates[i] - truths[i]);
    acc += (num * num) / (denom * denom);
  }
  return acc / static_cast<double>(truths.size());
}

double crlb(const CrlbInputs& in) {
  if (in.subcarriers < 1 || in.n_z < 1 || in.n_y < 1 || in.n_r < 1 ||
      in.pilot_symbols < 1) {
    throw std::invalid_argument("all counts must be >= 1");
  }
  if (in.noise_power < 0.0) {
    throw std::invalid_argument("noise power must be >= 0");
  }
  return in.noise_power * in.subcarriers * in.n_z * in.n_y * in.n_r /
         static_cast<double>(in.pilot_symbols);
}

CMat KroneckerFim::dense() const {
  const Eigen::Index n_r = middle.rows();
  const Eigen::Index dim = static_cast<Eigen::Index>(n_z) * n_y * n_r;
  if (dim > 512) {
    throw std::invalid_argument(
        "dense FIM materialization limited to dimension 512");
  }
  CMat out = CMat::Zero(dim, dim);
  // I_{N_y} kron middle kron I_{N_z}.
  for (Eigen::Index y = 0; y < n_y; ++y) {
    for (Eigen::Index i = 0; i < n_r; ++i) {
      for (Eigen::Index j = 0; j < n_r; ++j) {
        for (Eigen::Index z = 0; z < n_z; ++z) {
          out(y * n_r * n_z + i * n_z + z, y * n_r * n_z + j * n_z + z) =
              middle(i, j);
        }
      }
    }
  }
  return out;
}

double KroneckerFim::trace_of_inverse() const {
  const Eigen::PartialPivLU<CMat> lu(middle);
  const CMat inv = lu.inverse();
  return static_cast<double>(n_z) * n_y * inv.trace().real();
}

KroneckerFim fim(const CMat& v, double noise_power, int n_z, int n_y) {
  if (noise_power <= 0.0) {
    throw std::invalid_argument("noise power must be > 0");
  }
  if (n_z < 1 || n_y < 1) {
    throw std::invalid_argument("array extents must be >= 1");
  }
  KroneckerFim f;
  f.middle = gram_vvt(v) / noise_power;
  f.n_z = n_z;
  f.n_y = n_y;
  return f;
}

TraceBound trace_bound_check(const CMat& v) {
  const CMat g = gram_vvt(v);
  const Eigen::PartialPivLU<CMat> lu(g);
  const double det_mag = std::abs(lu.determinant());
  if (!(det_mag > 1e-300)) {
    throw std::invalid_argument("schedule Gram matrix is singular");
  }
  TraceBound b;
  b.lhs = lu.inverse().trace().real();
  const double n_r = static_cast<double>(v.rows());
  b.rhs = n_r * n_r / g.trace().real();
  b.equality = std::abs(b.lhs - b.rhs) <= 1e-9;
  return b;
}

Tensor3 ls_oracle_estimate(const Tensor3& y, const CMat& v) {
  if (v.cols() < v.rows()) {
    throw std::invalid_argument(
        "least-squares recovery needs pilot count >= element count");
  }
  if (y.dim(2) != v.cols()) {
    throw std::invalid_argument(
        "observation mode-2 extent does not match schedule pilot count");
  }
  const CMat vt = v.transpose();
  const CMat pinv_vt = vt.completeOrthogonalDecomposition().pseudoInverse();
  return mode_product(y, pinv_vt, 2);
}

ComplexityReport complexity_estimate(const SystemConfig& cfg,
                                     const Hyperparams& hp) {
  cfg.validate();
  const double n_z = cfg.n_z, n_y = cfg.n_y, n_b = cfg.n_b();
  const double n_r = cfg.n_r(), p = cfg.pilot_symbols;
  const double m = cfg.subcarriers, t_max = hp.t_max;
  // Core dims default to the full HOSVD ranks of the observation tensor.
  const double g_z = hp.mode_ranks ? (*hp.mode_ranks)[0] : n_z;
  const double g_r = hp.mode_ranks ? (*hp.mode_ranks)[1] : p;
  const double g_y = hp.mode_ranks ? (*hp.mode_ranks)[2] : n_y;
  const double n_p = n_z * p * n_y;  // vectorized observation length

  ComplexityReport r;
  r.hosvd_ops = p * (n_z * n_y) * (n_z * n_y);
  r.core_ops = g_z * g_r * g_y * n_z + n_z * g_r * g_y * p + n_p * g_y;
  r.factor_ops = p * n_b * g_z * g_r * g_y +
                 (g_z * g_z + g_r * g_r + g_y * g_y) * p * n_b +
                 g_z * g_z * g_z * n_z + g_r * g_r * g_r * p +
                 g_y * g_y * g_y * n_y;
  r.recovery_ops = p * n_r * n_r;
  r.per_iteration_ops = r.factor_ops + r.recovery_ops;
  r.total_ops = r.per_iteration_ops * m * t_max;
  r.log10_total = r.total_ops > 0.0 ? std::log10(r.total_ops) : 0.0;
  return r;
}

}  // namespace nfirs
