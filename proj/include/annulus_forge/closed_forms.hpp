#pragma once

// Literal transcriptions of the closed-form potentials and drift
// coefficients, kept only as cross-checks against the residual-quotient
// evaluation path.

#include <cmath>

#include "annulus_forge/annulus.hpp"

namespace aforge::closed {

inline Cplx sqrt_m2(const AnnulusSolution& sol, double m, double r) {
  const double scale = m * m + std::abs(sol.params.lambda) * r * r + 1.0;
  return principal_sqrt(
      guard_branch(m * m - sol.params.lambda * (r * r), scale, "closed-form radicand"));
}

// J_1 = lambda/sqrt((n-2k)^2-lr^2) + lambda/sqrt(n^2-lr^2) + phi'/r + phi'^2 + phi''
inline Cplx J1(const AnnulusSolution& sol, double r) {
  const auto& P = sol.params;
  const Jet2 ph = phi_ab(P.n, P.n - 2.0 * P.k, P.lambda, r, branch_policy(P.mode, P.lambda));
  return P.lambda / sqrt_m2(sol, P.n - 2.0 * P.k, r) +
         P.lambda / sqrt_m2(sol, P.n, r) + ph.r / r + ph.r * ph.r + ph.rr;
}

// J_4: step-4 analogue with orders (n+k, n+2k).
inline Cplx J4(const AnnulusSolution& sol, double r) {
  const auto& P = sol.params;
  const Jet2 ph = phi_ab(P.n + P.k, P.n + 2.0 * P.k, P.lambda, r, branch_policy(P.mode, P.lambda));
  return P.lambda / sqrt_m2(sol, P.n + 2.0 * P.k, r) +
         P.lambda / sqrt_m2(sol, P.n + P.k, r) + ph.r / r + ph.r * ph.r + ph.rr;
}

// K_1 = -(8nk + 2(n+2k) Phi' + Phi'^2 - i Phi'') / r^2
inline Cplx K1(const AnnulusSolution& sol, double r, double phi) {
  const auto& P = sol.params;
  const Jet2 Ph = sol.profile.Phi_jet(phi);
  return -(8.0 * P.n * P.k + 2.0 * (P.n + 2.0 * P.k) * Ph.p + Ph.p * Ph.p -
           Cplx(0.0, 1.0) * Ph.pp) /
         (r * r);
}

// Step-2 potential D_2.
inline Cplx D2(const AnnulusSolution& sol, double r, double phi) {
  const auto& P = sol.params;
  const double n = P.n, k = P.k;
  const Cplx lam = P.lambda;
  const auto ps = sol.psi_s2.eval(r);
  const Jet2 Ph = sol.profile.Phi_jet(phi);
  const Cplx Phi = Ph.v, dPhi = Ph.p, ddPhi = Ph.pp;
  const Cplx sm = sqrt_m2(sol, n - 2.0 * k, r);
  const Cplx i(0.0, 1.0);
  return -8.0 * n * k / (r * r) - (ps.d1 * Phi) * (ps.d1 * Phi) +
         i * Phi * (ps.d1 / r + ps.d2) -
         2.0 * ((n + 2.0 * k) / (r * r)) * ps.v * dPhi -
         (ps.v * dPhi) * (ps.v * dPhi) / (r * r) + i * ps.v * ddPhi / (r * r) +
         lam / sm - 2.0 * i * ps.d1 * Phi * sm / r;
}

// Step-3 potential D_3 = -8nk/r^2 + lambda/sqrt((n-2k)^2-lr^2)
//                        - 2 (sqrt((n-2k)^2-lr^2)/r) h'/h + (h'' + h'/r)/h.
inline Cplx D3(const AnnulusSolution& sol, double r) {
  const auto& P = sol.params;
  const double n = P.n, k = P.k;
  const auto policy = branch_policy(P.mode, P.lambda);
  Jet2 logg = jet_const(Cplx(sol.glue.d.logmod, sol.glue.d.phase));
  logg += Cplx(-4.0 * k, 0.0) * jet_log_r(r);
  logg += mu_log_jet({n + 2.0 * k, P.lambda}, r, policy);
  logg -= mu_log_jet({n - 2.0 * k, P.lambda}, r, policy);
  const auto ps = sol.psi_s3.eval(r);
  const Jet2 h = jet_cutoff(ps) + (jet_const(1.0) - jet_cutoff(ps)) * jet_exp(logg);
  const Cplx sm = sqrt_m2(sol, n - 2.0 * k, r);
  return -8.0 * n * k / (r * r) + P.lambda / sm - 2.0 * (sm / r) * (h.r / h.v) +
         (h.rr + h.r / r) / h.v;
}

// Plateau 2x2 system coefficients: j1(a) = -sqrt((n-ak)^2 - l r^2)/r,
// j2(a) = (n + ak)/r, jt2 = Phi'/r, and right-hand sides
// J1(a) = lambda/sqrt((n-ak)^2 - l r^2), Jt1 = K1.
inline Cplx j1(const AnnulusSolution& sol, double a, double r) {
  return -sqrt_m2(sol, sol.params.n - a * sol.params.k, r) / r;
}
inline Cplx j2(const AnnulusSolution& sol, double a, double r) {
  return (sol.params.n + a * sol.params.k) / r;
}
inline Cplx jt2(const AnnulusSolution& sol, double r, double phi) {
  return sol.profile.Phi_jet(phi).p / r;
}
inline Cplx J1a(const AnnulusSolution& sol, double a, double r) {
  return sol.params.lambda / sqrt_m2(sol, sol.params.n - a * sol.params.k, r);
}

}  // namespace aforge::closed
