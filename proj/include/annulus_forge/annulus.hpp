#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "annulus_forge/angular.hpp"
#include "annulus_forge/branch.hpp"
#include "annulus_forge/errors.hpp"
#include "annulus_forge/jet.hpp"
#include "annulus_forge/mu.hpp"

namespace aforge {

enum class Mode { MeshN, MeshP, MeshNX };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::MeshN: return "mesh-n";
    case Mode::MeshP: return "mesh-p";
    case Mode::MeshNX: return "mesh-nx";
  }
  return "?";
}

// Real positive lambda pushes the low-order radicands across the negative
// real axis inside the annulus (the sufficient bound |lambda r^2/m^2| < 1
// only holds asymptotically in rho); those values continue from the +i
// side. Non-real lambda keeps every radicand off the cut.
inline BranchPolicy branch_policy(Mode m, Cplx lambda) {
  if (m == Mode::MeshNX) return BranchPolicy::AllowNegativeReal;
  if (lambda.imag() == 0.0 && lambda.real() > 0.0) {
    return BranchPolicy::AllowNegativeReal;
  }
  return BranchPolicy::Strict;
}

// Effective magnitude Lambda = max(1, |lambda|).
inline double lambda_mag(Cplx lambda) { return std::max(1.0, std::abs(lambda)); }

struct AnnulusParams {
  double rho = 0.0;
  Cplx lambda{};
  Mode mode = Mode::MeshN;
  double n = 0.0;
  double k = 0.0;

  double width() const { return 6.0 * std::sqrt(rho); }

  void validate() const {
    if (!(rho >= 100.0)) throw ConfigError("AnnulusParams: rho must be >= 100");
    if (!(n > 0.0) || !(k > 0.0)) throw ConfigError("AnnulusParams: n, k must be positive");
    if (!(n > 2.0 * k)) throw ConfigError("AnnulusParams: requires n > 2k");
    const double s = std::sqrt(rho);
    if (mode == Mode::MeshNX) {
      if (lambda.imag() != 0.0 || !(lambda.real() > 0.0)) {
        throw ConfigError("AnnulusParams: mesh-nx requires real lambda > 0");
      }
      const double sl = std::sqrt(lambda.real());
      if (std::abs(n - sl * (rho + 8.0 * s)) > 1.0 + 1e-9) {
        throw ConfigError("AnnulusParams: mesh-nx requires |n - sqrt(lambda)(rho+8 sqrt(rho))| <= 1");
      }
      // Ladder-consistent k (~6 sqrt(lambda) sqrt(rho)); see decisions ledger.
      if (!(k >= 4.0 * sl * s) || !(k <= 9.0 * sl * s)) {
        throw ConfigError("AnnulusParams: mesh-nx k outside ladder-consistent range");
      }
    } else {
      if (mode == Mode::MeshP && lambda == Cplx(0.0, 0.0)) {
        // lambda = 0 is admissible (degenerate mu == 1).
      }
      const double L = lambda_mag(lambda);
      if (std::abs(n - 2.0 * std::sqrt(L) * rho) > 1.0 + 1e-9) {
        throw ConfigError("AnnulusParams: requires |n - 2 sqrt(Lambda) rho| <= 1");
      }
      if (std::abs(k - 12.0 * std::sqrt(L) * s) > 1.0 + 1e-9) {
        throw ConfigError("AnnulusParams: requires |k - 12 sqrt(Lambda) sqrt(rho)| <= 1");
      }
    }
  }

  // Standalone parameter choice at scale rho.
  static AnnulusParams make(double rho, Cplx lambda, Mode mode) {
    AnnulusParams p;
    p.rho = rho;
    p.lambda = lambda;
    p.mode = mode;
    if (mode == Mode::MeshNX) {
      const double sl = std::sqrt(lambda.real());
      p.n = std::floor(sl * (rho + 8.0 * std::sqrt(rho)));
      p.k = std::floor(6.0 * sl * std::sqrt(rho));
    } else {
      const double L = lambda_mag(lambda);
      p.n = std::floor(2.0 * std::sqrt(L) * rho);
      p.k = std::floor(12.0 * std::sqrt(L) * std::sqrt(rho));
    }
    return p;
  }
};

struct GluingConstants {
  LogComplex b, d, b1, a;
};

enum class RegionClass {
  Inner,
  S1Low,
  S1PlateauWindow,
  S1PlateauSector,
  S1High,
  S2,
  S3,
  S4Low,
  S4Plateau,
  S4High,
};

inline const char* region_name(RegionClass c) {
  switch (c) {
    case RegionClass::Inner: return "inner";
    case RegionClass::S1Low: return "s1_low";
    case RegionClass::S1PlateauWindow: return "s1_plateau_window";
    case RegionClass::S1PlateauSector: return "s1_plateau_sector";
    case RegionClass::S1High: return "s1_high";
    case RegionClass::S2: return "s2";
    case RegionClass::S3: return "s3";
    case RegionClass::S4Low: return "s4_low";
    case RegionClass::S4Plateau: return "s4_plateau";
    case RegionClass::S4High: return "s4_high";
  }
  return "?";
}

// Radial sub-intervals of one annulus, with the evaluation rule used there.
struct RegionPiece {
  double r_lo = 0.0, r_hi = 0.0;  // ownership is [r_lo, r_hi), last is closed
  RegionClass cls = RegionClass::S1Low;
  bool angular_split = false;  // window/sector distinction applies
};

struct AnnulusSolution {
  AnnulusParams params;
  GluingConstants glue;
  AngularProfile profile;
  CutoffFamily cut1, cut4;
  CutoffMember psi_s2, psi_s3;
  double s = 0.0;  // sqrt(rho)
  std::vector<RegionPiece> regions;

  double r_lo() const { return params.rho; }
  double r_hi() const { return params.rho + 6.0 * s; }
};

inline AnnulusSolution build_annulus(const AnnulusParams& params) {
  params.validate();
  AnnulusSolution sol;
  sol.params = params;
  sol.s = std::sqrt(params.rho);
  sol.profile = build_profile(params.n, params.k);
  sol.cut1 = make_cutoffs_step1(params.rho);
  sol.cut4 = make_cutoffs_step4(params.rho);
  sol.psi_s2 = make_cutoff_single(params.rho, 7.0 / 3.0, 8.0 / 3.0);
  sol.psi_s3 = make_cutoff_single(params.rho, 10.0 / 3.0, 11.0 / 3.0);

  const auto policy = branch_policy(params.mode, params.lambda);
  const double rho = params.rho, s = sol.s;
  const double n = params.n, k = params.k;
  const Cplx lam = params.lambda;

  // b at rho + sqrt(rho): |u1| = |u2| there by construction.
  {
    const double r = rho + s;
    LogComplex mu_n = mu({n, lam}, r, policy);
    LogComplex mu_m = mu({n - 2.0 * k, lam}, r, policy);
    sol.glue.b = LogComplex{-2.0 * k * std::log(r), 0.0} * mu_n / mu_m;
  }
  // d at rho + 3 sqrt(rho): g(rho + 3 sqrt(rho)) = 1.
  {
    const double r = rho + 3.0 * s;
    LogComplex mu_m = mu({n - 2.0 * k, lam}, r, policy);
    LogComplex mu_p = mu({n + 2.0 * k, lam}, r, policy);
    sol.glue.d = LogComplex{4.0 * k * std::log(r), 0.0} * mu_m / mu_p;
  }
  sol.glue.b1 = sol.glue.b * sol.glue.d;
  // a at rho + 5 sqrt(rho): |u4| = |u5| there.
  {
    const double r = rho + 5.0 * s;
    LogComplex mu_p = mu({n + 2.0 * k, lam}, r, policy);
    LogComplex mu_q = mu({n + k, lam}, r, policy);
    sol.glue.a = sol.glue.b1 * LogComplex{-k * std::log(r), 0.0} * mu_p / mu_q;
  }

  sol.regions = {
      {rho, rho + 2.0 * s / 3.0, RegionClass::S1Low, false},
      {rho + 2.0 * s / 3.0, rho + 4.0 * s / 3.0, RegionClass::S1PlateauSector, true},
      {rho + 4.0 * s / 3.0, rho + 2.0 * s, RegionClass::S1High, false},
      {rho + 2.0 * s, rho + 3.0 * s, RegionClass::S2, false},
      {rho + 3.0 * s, rho + 4.0 * s, RegionClass::S3, false},
      {rho + 4.0 * s, rho + 14.0 * s / 3.0, RegionClass::S4Low, false},
      {rho + 14.0 * s / 3.0, rho + 16.0 * s / 3.0, RegionClass::S4Plateau, false},
      {rho + 16.0 * s / 3.0, rho + 6.0 * s, RegionClass::S4High, false},
  };
  return sol;
}

// ---------------------------------------------------------------------------
// Evaluation.

struct AnnulusEval {
  RegionClass cls = RegionClass::S1Low;
  int npieces = 0;
  // Full log-jets of the additive pieces (cutoffs and drift exponentials
  // included). piece[0] is the dominant one after combination.
  std::array<Jet2, 2> piece{};
  Cplx t{};        // subdominant/dominant ratio (when npieces == 2)
  Jet2 log_u{};    // jet of log u
  LogComplex u{};  // value of u
};

namespace detail {

inline Jet2 jet_logc(const LogComplex& c, bool negate) {
  return jet_const(Cplx(c.logmod, c.phase + (negate ? kPi : 0.0)));
}

// log of a "state" piece  c * r^{-m} e^{i a phi} mu_m(r).
inline Jet2 state_jet(const LogComplex& c, bool negate, double m, double aphase,
                      Cplx lam, double r, double phi, BranchPolicy policy) {
  Jet2 L = jet_logc(c, negate);
  L += Cplx(-m, 0.0) * jet_log_r(r);
  L += mu_log_jet({m, lam}, r, policy);
  L += jet_angular(Cplx(0.0, aphase * phi), Cplx(0.0, aphase), 0.0);
  return L;
}

// Combine one or two piece log-jets into log u.
inline void combine(AnnulusEval& ev) {
  if (ev.npieces == 1) {
    ev.log_u = ev.piece[0];
  } else {
    if (ev.piece[1].v.real() > ev.piece[0].v.real()) {
      std::swap(ev.piece[0], ev.piece[1]);
    }
    const Jet2 D = ev.piece[1] - ev.piece[0];
    ev.t = std::exp(D.v);
    ev.log_u = ev.piece[0] + jet_log1p_exp(D, 1e-12);
  }
  ev.u = LogComplex{ev.log_u.v.real(), ev.log_u.v.imag()};
}

}  // namespace detail

// Evaluate u (as log u jet) at (r, phi) in the annulus.
inline AnnulusEval eval_u(const AnnulusSolution& sol, double r, double phi) {
  const auto& P = sol.params;
  if (!(r >= sol.r_lo() - 1e-9) || !(r <= sol.r_hi() + 1e-9)) {
    throw OutOfDomainError("eval_u: radius outside the annulus");
  }
  const auto policy = branch_policy(P.mode, P.lambda);
  const double n = P.n, k = P.k;
  const Cplx lam = P.lambda;
  const double c = (r - P.rho) / sol.s;
  const bool vmode = (P.mode != Mode::MeshP);
  AnnulusEval ev;

  if (c < 2.0) {
    // Step 1: u = psi1 u1 e^{psi4 phi1} + psi2 u2 e^{psi3 phi1}.
    const auto p1 = sol.cut1.psi1.eval(r);
    const auto p2 = sol.cut1.psi2.eval(r);
    const auto p3 = sol.cut1.psi3.eval(r);
    const auto p4 = sol.cut1.psi4.eval(r);
    Jet2 ph1;
    if (vmode) ph1 = phi_ab(n, n - 2.0 * k, lam, r, policy);
    if (c < 2.0 / 3.0) {
      ev.cls = RegionClass::S1Low;
    } else if (c < 4.0 / 3.0) {
      ev.cls = sol.profile.in_window(phi) ? RegionClass::S1PlateauWindow
                                          : RegionClass::S1PlateauSector;
    } else {
      ev.cls = RegionClass::S1High;
    }
    if (p1.v > 0.0) {
      Jet2 L = detail::state_jet({0.0, 0.0}, false, n, -n, lam, r, phi, policy);
      L += jet_log_cutoff(p1);
      if (vmode) L += jet_cutoff(p4) * ph1;
      ev.piece[ev.npieces++] = L;
    }
    if (p2.v > 0.0) {
      Jet2 L = detail::state_jet(sol.glue.b, true, n - 2.0 * k, n + 2.0 * k, lam, r,
                                 phi, policy);
      L += Cplx(0.0, 1.0) * sol.profile.Phi_jet(phi);
      L += jet_log_cutoff(p2);
      if (vmode) L += jet_cutoff(p3) * ph1;
      ev.piece[ev.npieces++] = L;
    }
  } else if (c < 3.0) {
    // Step 2: u = -b r^{-(n-2k)} exp(i [psi(r) Phi(phi) + (n+2k) phi]) mu.
    ev.cls = RegionClass::S2;
    Jet2 L = detail::state_jet(sol.glue.b, true, n - 2.0 * k, n + 2.0 * k, lam, r,
                               phi, policy);
    const auto ps = sol.psi_s2.eval(r);
    L += Cplx(0.0, 1.0) * (jet_cutoff(ps) * sol.profile.Phi_jet(phi));
    ev.piece[ev.npieces++] = L;
  } else if (c < 4.0) {
    // Step 3: u = u3 h, h = psi + (1 - psi) g.
    ev.cls = RegionClass::S3;
    Jet2 L = detail::state_jet(sol.glue.b, true, n - 2.0 * k, n + 2.0 * k, lam, r,
                               phi, policy);
    Jet2 logg = detail::jet_logc(sol.glue.d, false);
    logg += Cplx(-4.0 * k, 0.0) * jet_log_r(r);
    logg += mu_log_jet({n + 2.0 * k, lam}, r, policy);
    logg -= mu_log_jet({n - 2.0 * k, lam}, r, policy);
    const auto ps = sol.psi_s3.eval(r);
    const Jet2 h = jet_cutoff(ps) + (jet_const(1.0) - jet_cutoff(ps)) * jet_exp(logg);
    L += jet_log(h);
    ev.piece[ev.npieces++] = L;
  } else {
    // Step 4: u = psi1 u4 e^{psi4 phi2} + psi2 u5 e^{psi3 phi2}.
    const auto p1 = sol.cut4.psi1.eval(r);
    const auto p2 = sol.cut4.psi2.eval(r);
    const auto p3 = sol.cut4.psi3.eval(r);
    const auto p4 = sol.cut4.psi4.eval(r);
    Jet2 ph2;
    if (vmode) ph2 = phi_ab(n + k, n + 2.0 * k, lam, r, policy);
    if (c < 14.0 / 3.0) {
      ev.cls = RegionClass::S4Low;
    } else if (c < 16.0 / 3.0) {
      ev.cls = RegionClass::S4Plateau;
    } else {
      ev.cls = RegionClass::S4High;
    }
    if (p1.v > 0.0) {
      Jet2 L = detail::state_jet(sol.glue.b1, true, n + 2.0 * k, n + 2.0 * k, lam, r,
                                 phi, policy);
      L += jet_log_cutoff(p1);
      if (vmode) L += jet_cutoff(p4) * ph2;
      ev.piece[ev.npieces++] = L;
    }
    if (p2.v > 0.0) {
      Jet2 L = detail::state_jet(sol.glue.a, false, n + k, -(n + k), lam, r, phi,
                                 policy);
      L += jet_log_cutoff(p2);
      if (vmode) L += jet_cutoff(p3) * ph2;
      ev.piece[ev.npieces++] = L;
    }
  }
  detail::combine(ev);
  return ev;
}

// ---------------------------------------------------------------------------
// Potentials: exact residual solves from the analytic jets.

struct PotentialValue {
  Mode mode = Mode::MeshN;
  Cplx V{};            // gradient-free potential (mesh-n / mesh-nx)
  Cplx w1{}, w2{};     // drift coefficients: radial and tangential fields
  Cplx W1{}, W2{};     // Cartesian drift components (mesh-p)
  bool fallback = false;

  double magnitude() const {
    if (mode == Mode::MeshP) {
      return std::sqrt(std::norm(W1) + std::norm(W2));
    }
    return std::abs(V);
  }
};

namespace detail {

// Per-piece residual factor q = (Delta piece)/piece + lambda.
inline Cplx piece_residual(const Jet2& L, double r, Cplx lam) {
  return lap_quotient(L, r) + lam;
}

}  // namespace detail

inline PotentialValue eval_potential(const AnnulusSolution& sol, double r,
                                     double phi) {
  const auto& P = sol.params;
  const Cplx lam = P.lambda;
  AnnulusEval ev = eval_u(sol, r, phi);
  PotentialValue out;
  out.mode = P.mode;

  // Residual quotient (Delta u + lambda u)/u, stable under piece cancellation.
  Cplx q;
  std::array<Cplx, 2> qp{};
  for (int i = 0; i < ev.npieces; ++i) {
    qp[i] = detail::piece_residual(ev.piece[i], r, lam);
  }
  if (ev.npieces == 1) {
    q = qp[0];
  } else {
    q = (qp[0] + ev.t * qp[1]) / (1.0 + ev.t);
  }

  if (P.mode != Mode::MeshP) {
    out.V = q;
    return out;
  }

  // Drift mode: W = w1 (cos, sin) + w2 (i sin, -i cos), so
  // W . grad u = w1 u_r - i w2 u_phi / r.
  const bool two_by_two = (ev.cls == RegionClass::S1PlateauWindow ||
                           ev.cls == RegionClass::S1PlateauSector ||
                           ev.cls == RegionClass::S4Plateau) &&
                          ev.npieces == 2;
  if (two_by_two) {
    // Match each piece separately: w1 Li.r - (i/r) w2 Li.p = q_i.
    const Cplx a11 = ev.piece[0].r, a12 = Cplx(0.0, -1.0) * ev.piece[0].p / r;
    const Cplx a21 = ev.piece[1].r, a22 = Cplx(0.0, -1.0) * ev.piece[1].p / r;
    const Cplx det = a11 * a22 - a12 * a21;
    const double scale = (std::abs(a11) + std::abs(a12)) * (std::abs(a21) + std::abs(a22));
    if (std::abs(det) > 1e-10 * (scale + 1e-300)) {
      out.w1 = (qp[0] * a22 - a12 * qp[1]) / det;
      out.w2 = (a11 * qp[1] - qp[0] * a21) / det;
    } else {
      // Least-norm solve of the single total equation.
      out.fallback = true;
      const Cplx c1 = ev.log_u.r, c2 = Cplx(0.0, -1.0) * ev.log_u.p / r;
      const double nn = std::norm(c1) + std::norm(c2);
      if (!(nn > 1e-300)) throw SingularSystemError("drift solve: zero gradient");
      out.w1 = std::conj(c1) * q / nn;
      out.w2 = std::conj(c2) * q / nn;
    }
  } else if (ev.cls == RegionClass::S2 || ev.cls == RegionClass::S3) {
    // Least-norm solve of w1 u_r - i w2 u_phi / r = (Delta u + lambda u).
    // A purely radial field is bounded below only asymptotically: the
    // turning point of the order n-2k state crosses these zones at moderate
    // rho and u_r/u passes near zero there, while |u_phi/u|/r stays ~ n/r.
    const Cplx c1 = ev.log_u.r, c2 = Cplx(0.0, -1.0) * ev.log_u.p / r;
    const double nn = std::norm(c1) + std::norm(c2);
    if (!(nn > 1e-300)) throw SingularSystemError("drift solve: zero gradient");
    out.w1 = std::conj(c1) * q / nn;
    out.w2 = std::conj(c2) * q / nn;
  } else {
    // Tangential field: -i w2 u_phi / r = (Delta u + lambda u).
    const Cplx lp = ev.log_u.p;
    if (!(std::abs(lp) > 1e-10 * (P.n + 1.0))) {
      throw SingularSystemError("drift solve: angular derivative too small");
    }
    out.w2 = Cplx(0.0, 1.0) * r * q / lp;
  }
  const double cs = std::cos(phi), sn = std::sin(phi);
  out.W1 = out.w1 * cs + out.w2 * Cplx(0.0, 1.0) * sn;
  out.W2 = out.w1 * sn - out.w2 * Cplx(0.0, 1.0) * cs;
  return out;
}

// ---------------------------------------------------------------------------
// Envelope.

// ln M(r): the explicit piecewise majorant of |u| on the annulus.
inline double envelope_log_M(const AnnulusSolution& sol, double r) {
  const auto& P = sol.params;
  const auto policy = branch_policy(P.mode, P.lambda);
  const double n = P.n, k = P.k;
  const Cplx lam = P.lambda;
  const double c = (r - P.rho) / sol.s;
  const bool vmode = (P.mode != Mode::MeshP);

  auto re_phi1 = [&]() {
    return vmode ? phi_ab(n, n - 2.0 * k, lam, r, policy).v.real() : 0.0;
  };
  auto re_phi2 = [&]() {
    return vmode ? phi_ab(n + k, n + 2.0 * k, lam, r, policy).v.real() : 0.0;
  };

  if (c <= 1.0) {
    const double base = -n * std::log(r) + mu({n, lam}, r, policy).logmod;
    return base + sol.cut1.psi4.eval(r).v * re_phi1();
  }
  if (c <= 2.0) {
    const double base = sol.glue.b.logmod - (n - 2.0 * k) * std::log(r) +
                        mu({n - 2.0 * k, lam}, r, policy).logmod;
    return base + sol.cut1.psi3.eval(r).v * re_phi1();
  }
  if (c <= 3.0) {
    return sol.glue.b.logmod - (n - 2.0 * k) * std::log(r) +
           mu({n - 2.0 * k, lam}, r, policy).logmod;
  }
  if (c <= 4.0) {
    const double base = sol.glue.b.logmod - (n - 2.0 * k) * std::log(r) +
                        mu({n - 2.0 * k, lam}, r, policy).logmod;
    // |h| with h = psi + (1-psi) g.
    const auto ps = sol.psi_s3.eval(r);
    const LogComplex lg = sol.glue.d * LogComplex{-4.0 * k * std::log(r), 0.0} *
                          mu({n + 2.0 * k, lam}, r, policy) /
                          mu({n - 2.0 * k, lam}, r, policy);
    const Cplx g = lg.to_cplx();
    return base + std::log(std::abs(ps.v + (1.0 - ps.v) * g));
  }
  if (c <= 5.0) {
    const double base = sol.glue.b1.logmod - (n + 2.0 * k) * std::log(r) +
                        mu({n + 2.0 * k, lam}, r, policy).logmod;
    return base + sol.cut4.psi4.eval(r).v * re_phi2();
  }
  const double base = sol.glue.a.logmod - (n + k) * std::log(r) +
                      mu({n + k, lam}, r, policy).logmod;
  return base + sol.cut4.psi3.eval(r).v * re_phi2();
}

// ln m(r) = ln max_phi |u(r, phi)| over a grid of >= 8 (n + k) angles.
inline double log_m(const AnnulusSolution& sol, double r, int oversample = 8) {
  const int na = static_cast<int>(oversample * (sol.params.n + sol.params.k));
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < na; ++i) {
    const double phi = 2.0 * kPi * i / na;
    // u may vanish at isolated angles of the second gluing plateau; those
    // angles cannot carry the angular maximum.
    try {
      best = std::max(best, eval_u(sol, r, phi).u.logmod);
    } catch (const EvalError&) {
    }
  }
  return best;
}

// ln m(rho + 6 sqrt(rho)) - ln m(rho); strictly negative for valid params.
inline double decay_increment(const AnnulusSolution& sol, int oversample = 8) {
  return log_m(sol, sol.r_hi(), oversample) - log_m(sol, sol.r_lo(), oversample);
}

}  // namespace aforge
