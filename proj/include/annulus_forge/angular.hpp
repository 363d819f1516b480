#pragma once

#include <cmath>
#include <vector>

#include "annulus_forge/branch.hpp"
#include "annulus_forge/errors.hpp"
#include "annulus_forge/jet.hpp"

namespace aforge {

// Quintic smoothstep 6x^5 - 15x^4 + 10x^3 on [0,1] and derivatives.
// Clamped to [0,1]: endpoint roundoff (~1e-16) of the raw polynomial is
// material where a cutoff meets an exponentially small interpolant.
inline double smooth5(double x) {
  const double v = ((6.0 * x - 15.0) * x + 10.0) * x * x * x;
  return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}
inline double smooth5_d1(double x) { return ((30.0 * x - 60.0) * x + 30.0) * x * x; }
inline double smooth5_d2(double x) { return ((120.0 * x - 180.0) * x + 60.0) * x; }
// Antiderivative of smooth5 with value 0 at 0 (equals 1/2 at 1).
inline double smooth5_int(double x) {
  return ((x - 3.0) * x + 2.5) * x * x * x * x;
}

// T-periodic angular speed correction f and its antiderivative Phi.
//
// Per period [0, T]: f = -4k on the outer windows [0, T/5] and [4T/5, T];
// on the middle window f = -4k + H * B(sigma), sigma = (phi - T/5)/(3T/5),
// where B is a trapezoid bump with quintic-smoothstep ramps of fraction
// delta on each side. H = 20k / (3 (1 - delta)) balances the integral to
// exactly zero. With delta = 0.225, max f = H - 4k ~ 4.60k, so
// -4k <= f <= 5k, f is C^1, and f' is piecewise smooth with continuous f'.
struct AngularProfile {
  double n = 0.0;
  double k = 0.0;
  double T = 0.0;          // pi / (n + k)
  double amplitude = 0.0;  // bump height H
  static constexpr double ramp = 0.225;  // delta

  double phi_m(double m) const { return m * T; }

  // Reduce phi to tau in [0, T).
  double reduce(double phi) const {
    double t = phi - T * std::floor(phi / T);
    if (t >= T) t = 0.0;  // guard rounding at the seam
    return t;
  }

  // Bump B(sigma), B'(sigma), and the antiderivative IB(sigma) on [0, 1].
  void bump(double sg, double& B, double& dB, double& IB) const {
    const double d = ramp;
    if (sg <= d) {
      const double x = sg / d;
      B = smooth5(x);
      dB = smooth5_d1(x) / d;
      IB = d * smooth5_int(x);
    } else if (sg < 1.0 - d) {
      B = 1.0;
      dB = 0.0;
      IB = 0.5 * d + (sg - d);
    } else {
      const double x = (1.0 - sg) / d;
      B = smooth5(x);
      dB = -smooth5_d1(x) / d;
      IB = (1.0 - 1.5 * d) + d * (0.5 - smooth5_int(x));
    }
  }

  // f(phi), f'(phi).
  void f(double phi, double& fv, double& dfv) const {
    const double tau = reduce(phi);
    const double w3 = 0.6 * T;
    if (tau <= 0.2 * T || tau >= 0.8 * T) {
      fv = -4.0 * k;
      dfv = 0.0;
      return;
    }
    const double sg = (tau - 0.2 * T) / w3;
    double B, dB, IB;
    bump(sg, B, dB, IB);
    fv = -4.0 * k + amplitude * B;
    dfv = amplitude * dB / w3;
  }

  // Phi(phi) = int_0^phi f, T-periodic with Phi(m T) = 0.
  double Phi_val(double phi) const {
    const double tau = reduce(phi);
    const double w3 = 0.6 * T;
    if (tau <= 0.2 * T) return -4.0 * k * tau;
    if (tau >= 0.8 * T) return -4.0 * k * (tau - T);
    const double sg = (tau - 0.2 * T) / w3;
    double B, dB, IB;
    bump(sg, B, dB, IB);
    return -4.0 * k * tau + amplitude * w3 * IB;
  }

  // Jet of Phi as a function of phi: (Phi, f, f').
  Jet2 Phi_jet(double phi) const {
    double fv, dfv;
    f(phi, fv, dfv);
    return jet_angular(Phi_val(phi), fv, dfv);
  }

  // Total phase S(phi) = (2n + 2k) phi + Phi(phi); S(phi_m) = 2 pi m.
  Jet2 S_jet(double phi) const {
    Jet2 s = Phi_jet(phi);
    s.v += (2.0 * n + 2.0 * k) * phi;
    s.p += 2.0 * n + 2.0 * k;
    return s;
  }

  // True if phi lies in the flat window |phi - phi_m| <= T/5 of some node.
  bool in_window(double phi) const {
    const double tau = reduce(phi);
    return tau <= 0.2 * T || tau >= 0.8 * T;
  }
};

inline AngularProfile build_profile(double n, double k) {
  if (!(n > 0.0) || !(k > 0.0) || !(n > 2.0 * k)) {
    throw ConfigError("build_profile: requires 0 < 2k < n");
  }
  AngularProfile pr;
  pr.n = n;
  pr.k = k;
  pr.T = kPi / (n + k);
  pr.amplitude = 20.0 * k / (3.0 * (1.0 - AngularProfile::ramp));
  return pr;
}

// ---------------------------------------------------------------------------
// Radial cutoffs: plateaus joined by quintic smoothsteps.

struct CutoffEval {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

struct CutoffMember {
  struct Transition {
    double lo = 0.0, hi = 0.0;  // transition window in r
    double v0 = 0.0, v1 = 0.0;  // plateau values before/after
  };
  std::vector<Transition> ts;  // sorted, non-overlapping

  CutoffEval eval(double r) const {
    CutoffEval out;
    out.v = ts.front().v0;
    for (const auto& t : ts) {
      if (r <= t.lo) return out;
      if (r < t.hi) {
        const double w = t.hi - t.lo;
        const double x = (r - t.lo) / w;
        const double dv = t.v1 - t.v0;
        out.v = t.v0 + dv * smooth5(x);
        out.d1 = dv * smooth5_d1(x) / w;
        out.d2 = dv * smooth5_d2(x) / (w * w);
        return out;
      }
      out.v = t.v1;
      out.d1 = 0.0;
      out.d2 = 0.0;
    }
    return out;
  }

  CutoffMember complement() const {
    CutoffMember c = *this;
    for (auto& t : c.ts) {
      t.v0 = 1.0 - t.v0;
      t.v1 = 1.0 - t.v1;
    }
    return c;
  }
};

struct CutoffFamily {
  CutoffMember psi1, psi2, psi3, psi4;
  int smoothness = 2;
};

// Step-1 family on [rho, rho + 2 sqrt(rho)].
inline CutoffFamily make_cutoffs_step1(double rho) {
  const double s = std::sqrt(rho);
  CutoffFamily f;
  f.psi1.ts = {{rho + s / 3.0, rho + 2.0 * s / 3.0, 1.0, 0.5},
               {rho + 4.0 * s / 3.0, rho + 5.0 * s / 3.0, 0.5, 0.0}};
  f.psi2 = f.psi1.complement();
  f.psi3.ts = {{rho + 5.0 * s / 3.0, rho + 1.9 * s, 1.0, 0.0}};
  f.psi4.ts = {{rho + 0.1 * s, rho + s / 3.0, 0.0, 1.0}};
  return f;
}

// Step-4 family on [rho + 4 sqrt(rho), rho + 6 sqrt(rho)].
inline CutoffFamily make_cutoffs_step4(double rho) {
  const double s = std::sqrt(rho);
  CutoffFamily f;
  f.psi1.ts = {{rho + 13.0 * s / 3.0, rho + 14.0 * s / 3.0, 1.0, 0.5},
               {rho + 16.0 * s / 3.0, rho + 17.0 * s / 3.0, 0.5, 0.0}};
  f.psi2 = f.psi1.complement();
  f.psi3.ts = {{rho + 17.0 * s / 3.0, rho + 5.9 * s, 1.0, 0.0}};
  f.psi4.ts = {{rho + 4.1 * s, rho + 13.0 * s / 3.0, 0.0, 1.0}};
  return f;
}

// Single decreasing cutoff: 1 below rho + lo*sqrt(rho), 0 above
// rho + hi*sqrt(rho).
inline CutoffMember make_cutoff_single(double rho, double lo, double hi) {
  if (!(hi > lo) || !((hi - lo) * std::sqrt(rho) >= 0.1 * std::sqrt(rho) - 1e-12)) {
    throw ConfigError("make_cutoff_single: window must be at least 0.1 sqrt(rho)");
  }
  const double s = std::sqrt(rho);
  CutoffMember m;
  m.ts = {{rho + lo * s, rho + hi * s, 1.0, 0.0}};
  return m;
}

// Jet of log(psi) where psi > 0 at r.
inline Jet2 jet_log_cutoff(const CutoffEval& c) {
  const double q = c.d1 / c.v;
  return jet_radial(std::log(c.v), q, c.d2 / c.v - q * q);
}

// Jet of psi itself (real, function of r).
inline Jet2 jet_cutoff(const CutoffEval& c) { return jet_radial(c.v, c.d1, c.d2); }

}  // namespace aforge
