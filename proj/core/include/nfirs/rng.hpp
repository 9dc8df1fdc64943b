#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace nfirs {

// Deterministic random stream.
//
// All randomness in the library flows through this class so results are
// reproducible across platforms and standard libraries.  Raw 64-bit draws
// come from std::mt19937_64, whose output sequence is fixed by the C++
// standard; conversions to uniform and normal variates are done by hand
// because the std::*_distribution classes are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; both halves of each generated pair are
  // consumed before new raw draws are taken.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // 1 - u keeps the argument of log strictly positive.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly symmetric complex normal with unit total variance:
  // real and imaginary parts are independent N(0, 1/2).
  std::complex<double> complex_normal() {
    const double s = 0.70710678118654752440;
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

  // Raw engine draw, for tests that pin exact streams.
  std::uint64_t raw() { return engine_(); }

  // Derives an independent stream seed from a master seed and two indices
  // (splitmix64 finalizer applied to a chain of mixes).  Derivation for one
  // (a, b) pair never depends on how many other streams exist, so adding
  // trials or sweep points does not perturb existing streams.
  static std::uint64_t derive_stream(std::uint64_t master, std::uint64_t a,
                                     std::uint64_t b) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ (0x9E3779B97F4A7C15ULL + a));
    h = splitmix64(h ^ (0xD1B54A32D192ED03ULL + b));
    return h;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nfirs
