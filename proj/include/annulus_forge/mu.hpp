#pragma once

#include <cmath>
#include <complex>

#include "annulus_forge/branch.hpp"
#include "annulus_forge/jet.hpp"

namespace aforge {

// How principal-branch radicands are policed.
//  Strict           : the radicand must stay off the closed negative real
//                     ray, so the principal branch is unambiguous.
//  AllowNegativeReal: lambda real > 0; the radicand may be negative real and
//                     is continued from the upper half-plane (+i side).
enum class BranchPolicy { Strict, AllowNegativeReal };

struct MuParams {
  double n = 0.0;   // order (integer-valued in the construction)
  Cplx lambda{};    // spectral parameter
};

// w = sqrt(1 - lambda r^2 / m^2), the radial frequency factor.
inline Cplx mu_sqrt_term(const MuParams& p, double r, BranchPolicy policy) {
  const Cplx x = p.lambda * (r * r) / (p.n * p.n);
  if (policy == BranchPolicy::Strict) {
    if (x.imag() == 0.0 && x.real() >= 1.0) {
      throw DomainError("mu: real radicand 1 - lambda r^2/n^2 <= 0 needs the negative-real branch policy");
    }
  } else {
    if (p.lambda.imag() != 0.0 || !(p.lambda.real() > 0.0)) {
      throw DomainError("mu: negative-real branch policy requires real lambda > 0");
    }
  }
  const Cplx rad = guard_branch(Cplx(1.0, 0.0) - x, 1.0, "mu radicand");
  return principal_sqrt(rad);
}

// Exponent density E(r) with log mu = n * E(r),
//   E = log((w + 1)/2) + 1 - w,
// written so that lambda = 0 gives exactly E = 0 (w = 1, log 1 = 0).
inline Cplx mu_exponent(const MuParams& p, double r, BranchPolicy policy) {
  const Cplx w = mu_sqrt_term(p, r, policy);
  return principal_log((w + 1.0) / 2.0) + (1.0 - w);
}

// mu_n(r) as a LogComplex.
inline LogComplex mu(const MuParams& p, double r, BranchPolicy policy) {
  const Cplx e = p.n * mu_exponent(p, r, policy);
  return {e.real(), e.imag()};
}

// Jet of log mu_n(r) (a function of r only):
//   d/dr log mu  = (n/r)(1 - w)
//   d2/dr2       = -(n/r^2)(1 - w) + lambda/(n w)
inline Jet2 mu_log_jet(const MuParams& p, double r, BranchPolicy policy) {
  const Cplx w = mu_sqrt_term(p, r, policy);
  const Cplx v = p.n * (principal_log((w + 1.0) / 2.0) + (1.0 - w));
  const Cplx d1 = (p.n / r) * (1.0 - w);
  const Cplx d2 = -(p.n / (r * r)) * (1.0 - w) + p.lambda / (p.n * w);
  return jet_radial(v, d1, d2);
}

// Admissibility margin of the radicand at radius r: distance of
// 1 - lambda r^2/n^2 from the branch point (reported in manifests).
inline double mu_margin(const MuParams& p, double r) {
  const Cplx x = p.lambda * (r * r) / (p.n * p.n);
  return std::abs(Cplx(1.0, 0.0) - x);
}

// Radial gluing exponent phi_{a,b}(r) as a jet (function of r only):
//   phi   = -(1/4) log( 2 sa sb + 2 lambda r^2 - a^2 - b^2 ),
//   phi'  = -(lambda r / 2) / (sa sb),
//   phi'' = -(lambda / 2) (1 + lambda r^2/sa^2 + lambda r^2/sb^2) / (sa sb),
// with sa = sqrt(a^2 - lambda r^2), sb = sqrt(b^2 - lambda r^2).
inline Jet2 phi_ab(double a, double b, Cplx lambda, double r,
                   BranchPolicy policy) {
  const double scale_a = a * a + std::abs(lambda) * r * r + 1.0;
  const double scale_b = b * b + std::abs(lambda) * r * r + 1.0;
  if (policy == BranchPolicy::Strict && lambda.imag() == 0.0 && lambda.real() > 0.0) {
    // Real radicands must stay positive; otherwise the continuation policy
    // is required.
    if (lambda.real() * r * r >= a * a || lambda.real() * r * r >= b * b) {
      throw DomainError("phi_ab: negative real radicand needs the negative-real branch policy");
    }
  }
  const Cplx sa = principal_sqrt(guard_branch(a * a - lambda * (r * r), scale_a, "phi_ab radicand a"));
  const Cplx sb = principal_sqrt(guard_branch(b * b - lambda * (r * r), scale_b, "phi_ab radicand b"));
  const Cplx arg = guard_branch(2.0 * sa * sb + 2.0 * lambda * (r * r) - a * a - b * b,
                                scale_a + scale_b, "phi_ab log argument");
  const Cplx v = -0.25 * principal_log(arg);
  const Cplx isab = 1.0 / (sa * sb);
  const Cplx d1 = -(lambda * r / 2.0) * isab;
  const Cplx lr2 = lambda * (r * r);
  const Cplx d2 = -(lambda / 2.0) * (1.0 + lr2 / (sa * sa) + lr2 / (sb * sb)) * isab;
  return jet_radial(v, d1, d2);
}

}  // namespace aforge
