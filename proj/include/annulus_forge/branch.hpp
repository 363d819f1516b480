#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "annulus_forge/errors.hpp"

namespace aforge {

using Cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

// Wrap an angle to (-pi, pi].
inline double wrap_pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

// Values that sit exactly on the negative real axis are taken as the limit
// from the upper half-plane: a -0.0 imaginary part would silently flip
// std::sqrt / std::log to the other side of the cut.
inline Cplx canonical_branch(Cplx z) {
  if (z.imag() == 0.0) return Cplx(z.real(), 0.0);
  return z;
}

// Principal square root, negative reals resolved toward +i.
inline Cplx principal_sqrt(Cplx z) { return std::sqrt(canonical_branch(z)); }

// Principal logarithm, negative reals resolved toward +i pi.
inline Cplx principal_log(Cplx z) { return std::log(canonical_branch(z)); }

// Guard a radicand / log argument before taking a principal branch.
// `scale` is the natural magnitude of the quantity; a value whose modulus is
// below 1e-12*scale, or which hugs the negative real axis with a nonzero but
// ambiguous imaginary part, raises DomainError.
inline Cplx guard_branch(Cplx z, double scale, const char* what) {
  z = canonical_branch(z);
  const double az = std::abs(z);
  if (!(az > 1e-12 * scale)) {
    throw DomainError(std::string(what) + ": argument vanishes at the branch point");
  }
  if (z.real() < 0.0 && z.imag() != 0.0 && std::abs(z.imag()) < 1e-12 * az) {
    throw DomainError(std::string(what) + ": argument ambiguously close to the branch cut");
  }
  return z;
}

// A nonzero complex number stored as log-modulus and (unnormalized) phase.
struct LogComplex {
  double logmod = 0.0;
  double phase = 0.0;

  static LogComplex from_cplx(Cplx z) {
    if (z == Cplx(0.0, 0.0) || !std::isfinite(std::abs(z))) {
      throw DomainError("LogComplex::from_cplx: zero or non-finite value");
    }
    return {std::log(std::abs(z)), std::arg(z)};
  }

  Cplx to_cplx() const {
    if (logmod > 709.0) {
      throw EvalError("LogComplex::to_cplx: modulus overflows double range");
    }
    const double m = std::exp(logmod);
    return Cplx(m * std::cos(phase), m * std::sin(phase));
  }

  bool finite() const {
    return std::isfinite(logmod) && std::isfinite(phase);
  }

  friend LogComplex operator*(LogComplex a, LogComplex b) {
    return {a.logmod + b.logmod, a.phase + b.phase};
  }
  friend LogComplex operator/(LogComplex a, LogComplex b) {
    return {a.logmod - b.logmod, a.phase - b.phase};
  }
  LogComplex& operator*=(LogComplex o) {
    logmod += o.logmod;
    phase += o.phase;
    return *this;
  }
};

// Relative agreement of two values given in log form: modulus ratio and
// phase difference mod 2pi. Suitable for "relative mismatch <= tol" checks.
inline double log_rel_diff(LogComplex a, LogComplex b) {
  const double dm = a.logmod - b.logmod;
  const double dp = wrap_pi(a.phase - b.phase);
  return std::hypot(dm, dp);
}

}  // namespace aforge
