#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace nfirs {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Dense complex third-order tensor in a fixed canonical layout shared by
// every module: the linear index of entry (i1, i2, i3), all 0-based, is
//   i1 + i2*I1 + i3*I1*I2
// so mode 1 varies fastest.  Mode arguments throughout this header are
// 1-based ({1,2,3}) to match conventional n-mode notation.
class Tensor3 {
 public:
  Tensor3() : dims_{0, 0, 0} {}
  Tensor3(int i1, int i2, int i3);

  // Takes ownership of `data`, which must hold i1*i2*i3 finite entries in
  // canonical order.
  static Tensor3 from_data(int i1, int i2, int i3, std::vector<cplx> data);

  const std::array<int, 3>& dims() const { return dims_; }
  // 1-based mode.
  int dim(int mode) const { return dims_[static_cast<size_t>(mode - 1)]; }
  std::int64_t size() const {
    return static_cast<std::int64_t>(dims_[0]) * dims_[1] * dims_[2];
  }

  cplx& operator()(int i1, int i2, int i3) {
    return data_[linear(i1, i2, i3)];
  }
  const cplx& operator()(int i1, int i2, int i3) const {
    return data_[linear(i1, i2, i3)];
  }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  Tensor3& operator+=(const Tensor3& o);
  Tensor3& operator-=(const Tensor3& o);
  Tensor3& operator*=(cplx s);

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(Tensor3 a, cplx s) { return a *= s; }
  friend Tensor3 operator*(cplx s, Tensor3 a) { return a *= s; }

 private:
  std::size_t linear(int i1, int i2, int i3) const {
    return static_cast<std::size_t>(i1) +
           static_cast<std::size_t>(i2) * static_cast<std::size_t>(dims_[0]) +
           static_cast<std::size_t>(i3) * static_cast<std::size_t>(dims_[0]) *
               static_cast<std::size_t>(dims_[1]);
  }

  std::array<int, 3> dims_;
  std::vector<cplx> data_;
};

struct HosvdResult {
  Tensor3 core;
  std::array<CMat, 3> factors;     // left singular vectors per mode
  std::array<int, 3> mode_ranks;   // core dims
};

// Mode-n unfolding: rows are mode-n fibers; columns run over the remaining
// two indices with the smaller mode index varying fastest (mode 1 -> i2
// fastest then i3; modes 2 and 3 -> i1 fastest).  This ordering makes
//   unfold(t x1 A1 x2 A2 x3 A3, n) = An * unfold(t, n) * kron(others)^T
// hold with the Kronecker factors taken in descending mode order.
CMat unfold(const Tensor3& t, int mode);

// Inverse of unfold: fold(unfold(t, n), n, t.dims()) == t exactly.
Tensor3 fold(const CMat& m, int mode, const std::array<int, 3>& dims);

// n-mode product: replaces extent at `mode` with m.rows();
// equals fold(m * unfold(t, mode), mode, new dims).
Tensor3 mode_product(const Tensor3& t, const CMat& m, int mode);

// core x1 a1 x2 a2 x3 a3.
Tensor3 tucker_product(const Tensor3& core, const CMat& a1, const CMat& a2,
                       const CMat& a3);

// Higher-order SVD.  Factors are the full square left-singular-vector
// matrices of each unfolding (singular values descending); the core is
// t contracted with the conjugate transposes, so the reconstruction
// tucker_product(core, factors...) equals t.  The rank overload truncates
// each factor to the requested leading columns.
HosvdResult hosvd(const Tensor3& t);
HosvdResult hosvd(const Tensor3& t, const std::array<int, 3>& ranks);

double frobenius_norm(const Tensor3& t);
// <a, b> = sum conj(a_i) * b_i, so <a, a> = |a|_F^2.
cplx inner_product(const Tensor3& a, const Tensor3& b);
// Entrywise product.
Tensor3 hadamard(const Tensor3& a, const Tensor3& b);

bool is_finite(const Tensor3& t);

}  // namespace nfirs
