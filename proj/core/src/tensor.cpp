#include "nfirs/tensor.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nfirs {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw std::invalid_argument("tensor mode must be 1, 2, or 3, got " +
                                std::to_string(mode));
  }
}

void check_same_dims(const Tensor3& a, const Tensor3& b) {
  if (a.dims() != b.dims()) {
    throw std::invalid_argument("tensor dimension mismatch");
  }
}

}  // namespace

Tensor3::Tensor3(int i1, int i2, int i3) : dims_{i1, i2, i3} {
  if (i1 < 1 || i2 < 1 || i3 < 1) {
    throw std::invalid_argument("tensor extents must all be >= 1");
  }
  data_.assign(static_cast<std::size_t>(size()), cplx{0.0, 0.0});
}

Tensor3 Tensor3::from_data(int i1, int i2, int i3, std::vector<cplx> data) {
  Tensor3 t(i1, i2, i3);
  if (data.size() != static_cast<std::size_t>(t.size())) {
    throw std::invalid_argument("entry count does not match extents");
  }
  t.data_ = std::move(data);
  if (!is_finite(t)) {
    throw std::invalid_argument("tensor entries must be finite");
  }
  return t;
}

Tensor3& Tensor3::operator+=(const Tensor3& o) {
  check_same_dims(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& o) {
  check_same_dims(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Tensor3& Tensor3::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

CMat unfold(const Tensor3& t, int mode) {
  check_mode(mode);
  const int i1 = t.dim(1), i2 = t.dim(2), i3 = t.dim(3);
  switch (mode) {
    case 1: {
      // Canonical layout viewed as I1 x (I2*I3) column-major.
      return Eigen::Map<const CMat>(t.data(), i1,
                                    static_cast<Eigen::Index>(i2) * i3);
    }
    case 2: {
      CMat m(i2, static_cast<Eigen::Index>(i1) * i3);
      for (int c = 0; c < i3; ++c)
        for (int b = 0; b < i2; ++b)
          for (int a = 0; a < i1; ++a)
            m(b, a + static_cast<Eigen::Index>(c) * i1) = t(a, b, c);
      return m;
    }
    default: {
      // Columns (i1, i2) with i1 fastest: the layout viewed as
      // (I1*I2) x I3 column-major, transposed.
      return Eigen::Map<const CMat>(t.data(),
                                    static_cast<Eigen::Index>(i1) * i2, i3)
          .transpose();
    }
  }
}

Tensor3 fold(const CMat& m, int mode, const std::array<int, 3>& dims) {
  check_mode(mode);
  const int i1 = dims[0], i2 = dims[1], i3 = dims[2];
  const Eigen::Index other = static_cast<Eigen::Index>(i1) * i2 * i3 /
                             dims[static_cast<size_t>(mode - 1)];
  if (m.rows() != dims[static_cast<size_t>(mode - 1)] || m.cols() != other) {
    throw std::invalid_argument("matrix shape inconsistent with fold dims");
  }
  Tensor3 t(i1, i2, i3);
  switch (mode) {
    case 1: {
      Eigen::Map<CMat>(t.data(), i1, static_cast<Eigen::Index>(i2) * i3) = m;
      break;
    }
    case 2: {
      for (int c = 0; c < i3; ++c)
        for (int b = 0; b < i2; ++b)
          for (int a = 0; a < i1; ++a)
            t(a, b, c) = m(b, a + static_cast<Eigen::Index>(c) * i1);
      break;
    }
    default: {
      Eigen::Map<CMat>(t.data(), static_cast<Eigen::Index>(i1) * i2, i3) =
          m.transpose();
      break;
    }
  }
  return t;
}

Tensor3 mode_product(const Tensor3& t, const CMat& m, int mode) {
  check_mode(mode);
  if (m.cols() != t.dim(mode)) {
    throw std::invalid_argument(
        "mode_product inner dimension mismatch: matrix cols " +
        std::to_string(m.cols()) + " vs tensor extent " +
        std::to_string(t.dim(mode)));
  }
  std::array<int, 3> nd = t.dims();
  nd[static_cast<size_t>(mode - 1)] = static_cast<int>(m.rows());
  return fold(m * unfold(t, mode), mode, nd);
}

Tensor3 tucker_product(const Tensor3& core, const CMat& a1, const CMat& a2,
                       const CMat& a3) {
  return mode_product(mode_product(mode_product(core, a1, 1), a2, 2), a3, 3);
}

namespace {

HosvdResult hosvd_impl(const Tensor3& t, const std::array<int, 3>* ranks) {
  if (!is_finite(t)) {
    throw std::invalid_argument("hosvd input must be finite");
  }
  HosvdResult r;
  for (int n = 1; n <= 3; ++n) {
    const CMat un = unfold(t, n);
    Eigen::JacobiSVD<CMat> svd(un, Eigen::ComputeFullU);
    if (svd.info() != Eigen::Success) {
      throw std::runtime_error("SVD failed on mode-" + std::to_string(n) +
                               " unfolding");
    }
    CMat u = svd.matrixU();
    int keep = static_cast<int>(u.cols());
    if (ranks != nullptr) {
      const int want = (*ranks)[static_cast<size_t>(n - 1)];
      if (want < 1 || want > keep) {
        throw std::invalid_argument("requested mode-" + std::to_string(n) +
                                    " rank out of range");
      }
      keep = want;
    }
    r.factors[static_cast<size_t>(n - 1)] = u.leftCols(keep);
    r.mode_ranks[static_cast<size_t>(n - 1)] = keep;
  }
  r.core = tucker_product(t, r.factors[0].adjoint(), r.factors[1].adjoint(),
                          r.factors[2].adjoint());
  return r;
}

}  // namespace

HosvdResult hosvd(const Tensor3& t) { return hosvd_impl(t, nullptr); }

HosvdResult hosvd(const Tensor3& t, const std::array<int, 3>& ranks) {
  return hosvd_impl(t, &ranks);
}

double frobenius_norm(const Tensor3& t) {
  double s = 0.0;
  const cplx* p = t.data();
  const std::int64_t n = t.size();
  for (std::int64_t i = 0; i < n; ++i) s += std::norm(p[i]);
  return std::sqrt(s);
}

cplx inner_product(const Tensor3& a, const Tensor3& b) {
  check_same_dims(a, b);
  cplx s{0.0, 0.0};
  const cplx* pa = a.data();
  const cplx* pb = b.data();
  const std::int64_t n = a.size();
  for (std::int64_t i = 0; i < n; ++i) s += std::conj(pa[i]) * pb[i];
  return s;
}

Tensor3 hadamard(const Tensor3& a, const Tensor3& b) {
  check_same_dims(a, b);
  Tensor3 out = a;
  cplx* po = out.data();
  const cplx* pb = b.data();
  const std::int64_t n = a.size();
  for (std::int64_t i = 0; i < n; ++i) po[i] *= pb[i];
  return out;
}

bool is_finite(const Tensor3& t) {
  const cplx* p = t.data();
  const std::int64_t n = t.size();
  for (std::int64_t i = 0; i < n; ++i) {
    if (!std::isfinite(p[i].real()) || !std::isfinite(p[i].imag())) {
      return false;
    }
  }
  return true;
}

}  // namespace nfirs
