#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "annulus_forge/annulus.hpp"

namespace aforge {

struct PlaneConfig {
  double rho1 = 400.0;
  Cplx lambda{1.0, 0.0};
  Mode mode = Mode::MeshN;
  int annuli = 10;

  void validate() const {
    if (!(rho1 >= 100.0)) throw ConfigError("PlaneConfig: rho1 must be >= 100");
    if (annuli < 1) throw ConfigError("PlaneConfig: need at least one annulus");
    if (mode == Mode::MeshNX && (lambda.imag() != 0.0 || !(lambda.real() > 0.0))) {
      throw ConfigError("PlaneConfig: mesh-nx requires real lambda > 0");
    }
  }
};

// Inner disk: u0 = g0(r) e^{-i n1 phi} mu_{n1}(r), where
// g0 = exp((2 chi(r) - 1) n1 log r) interpolates r^{n1} near 0 to r^{-n1}
// at rho1 through a C^2 step chi (1 on (0, 0.4 rho1], 0 on [0.6 rho1, rho1]).
struct InnerDisk {
  double n1 = 0.0;
  Cplx lambda{};
  Mode mode = Mode::MeshN;
  double rho1 = 0.0;
  CutoffMember chi;
};

inline InnerDisk build_inner_disk(double n1, Cplx lambda, Mode mode, double rho1) {
  InnerDisk d;
  d.n1 = n1;
  d.lambda = lambda;
  d.mode = mode;
  d.rho1 = rho1;
  d.chi.ts = {{0.4 * rho1, 0.6 * rho1, 1.0, 0.0}};
  return d;
}

inline Jet2 inner_log_jet(const InnerDisk& d, double r, double phi) {
  if (!(r > 0.0) || !(r <= d.rho1 + 1e-9)) {
    throw OutOfDomainError("inner disk evaluation outside (0, rho1]");
  }
  const auto ch = d.chi.eval(r);
  const Jet2 expo = jet_radial(2.0 * ch.v - 1.0, 2.0 * ch.d1, 2.0 * ch.d2);
  Jet2 L = Cplx(d.n1, 0.0) * (expo * jet_log_r(r));
  L += mu_log_jet({d.n1, d.lambda}, r, branch_policy(d.mode, d.lambda));
  L += jet_angular(Cplx(0.0, -d.n1 * phi), Cplx(0.0, -d.n1), 0.0);
  return L;
}

struct PlaneSolution {
  PlaneConfig config;
  std::vector<double> rhos;   // rho_1 .. rho_{J+1}
  std::vector<AnnulusSolution> annuli;
  std::vector<LogComplex> cum;  // prod_{i<j} a_i applied to annulus j
  InnerDisk inner;

  double r_max() const { return rhos.back(); }
};

inline double ladder_n(Mode mode, Cplx lambda, double rho) {
  if (mode == Mode::MeshNX) {
    return std::floor(std::sqrt(lambda.real()) * (rho + 8.0 * std::sqrt(rho)));
  }
  return std::floor(2.0 * std::sqrt(lambda_mag(lambda)) * rho);
}

inline PlaneSolution build_plane(const PlaneConfig& cfg) {
  cfg.validate();
  PlaneSolution ps;
  ps.config = cfg;
  ps.rhos.resize(cfg.annuli + 1);
  ps.rhos[0] = cfg.rho1;
  for (int j = 0; j < cfg.annuli; ++j) {
    ps.rhos[j + 1] = ps.rhos[j] + 6.0 * std::sqrt(ps.rhos[j]);
  }
  std::vector<double> ns(cfg.annuli + 1);
  for (int j = 0; j <= cfg.annuli; ++j) {
    ns[j] = ladder_n(cfg.mode, cfg.lambda, ps.rhos[j]);
  }
  LogComplex run{0.0, 0.0};
  for (int j = 0; j < cfg.annuli; ++j) {
    const double k = ns[j + 1] - ns[j];
    if (!(k > 0.0)) throw ConfigError("build_plane: ladder produced k <= 0");
    AnnulusParams p;
    p.rho = ps.rhos[j];
    p.lambda = cfg.lambda;
    p.mode = cfg.mode;
    p.n = ns[j];
    p.k = k;
    ps.annuli.push_back(build_annulus(p));
    ps.cum.push_back(run);
    run *= ps.annuli.back().glue.a;
  }
  ps.inner = build_inner_disk(ns[0], cfg.lambda, cfg.mode, cfg.rho1);
  return ps;
}

struct GlobalEval {
  int annulus = -1;  // -1: inner disk
  RegionClass cls = RegionClass::Inner;
  Jet2 log_u{};
  LogComplex u{};
};

// Index of the annulus owning radius r ([rho_j, rho_{j+1}), last closed).
inline int locate(const PlaneSolution& ps, double r) {
  if (!(r > 0.0) || r > ps.r_max() + 1e-9) {
    throw OutOfDomainError("eval_global: radius outside the assembled region");
  }
  if (r < ps.rhos[0]) return -1;
  auto it = std::upper_bound(ps.rhos.begin(), ps.rhos.end(), r);
  int j = static_cast<int>(it - ps.rhos.begin()) - 1;
  j = std::min(j, static_cast<int>(ps.annuli.size()) - 1);
  return j;
}

inline GlobalEval eval_global_u(const PlaneSolution& ps, double r, double phi) {
  GlobalEval g;
  g.annulus = locate(ps, r);
  if (g.annulus < 0) {
    g.cls = RegionClass::Inner;
    g.log_u = inner_log_jet(ps.inner, r, phi);
    g.u = LogComplex{g.log_u.v.real(), g.log_u.v.imag()};
    return g;
  }
  AnnulusEval ev = eval_u(ps.annuli[g.annulus], r, phi);
  g.cls = ev.cls;
  g.log_u = ev.log_u;
  const LogComplex& c = ps.cum[g.annulus];
  g.log_u.v += Cplx(c.logmod, c.phase);
  g.u = LogComplex{g.log_u.v.real(), g.log_u.v.imag()};
  return g;
}

inline PotentialValue eval_global_potential(const PlaneSolution& ps, double r,
                                            double phi) {
  const int j = locate(ps, r);
  if (j >= 0) return eval_potential(ps.annuli[j], r, phi);
  // Inner disk: residual quotient; drift mode uses the tangential field.
  const Jet2 L = inner_log_jet(ps.inner, r, phi);
  const Cplx q = lap_quotient(L, r) + ps.inner.lambda;
  PotentialValue out;
  out.mode = ps.config.mode;
  if (out.mode != Mode::MeshP) {
    out.V = q;
    return out;
  }
  out.w2 = Cplx(0.0, 1.0) * r * q / L.p;
  const double cs = std::cos(phi), sn = std::sin(phi);
  out.W1 = out.w2 * Cplx(0.0, 1.0) * sn;
  out.W2 = -out.w2 * Cplx(0.0, 1.0) * cs;
  return out;
}

// ln max_phi |u| at radius r including cumulative gluing scales.
inline double global_log_m(const PlaneSolution& ps, double r, int oversample = 8) {
  const int j = locate(ps, r);
  if (j < 0) {
    // Radially symmetric modulus in the inner disk.
    return inner_log_jet(ps.inner, r, 0.0).v.real();
  }
  return ps.cum[j].logmod + log_m(ps.annuli[j], r, oversample);
}

}  // namespace aforge
