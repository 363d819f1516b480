#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "annulus_forge/plane.hpp"

namespace aforge {

using ordered_json = nlohmann::ordered_json;

// Pass/fail thresholds for the certification report.
namespace thresholds {
inline constexpr double residual_p99 = 1e-3;
inline constexpr double residual_max = 1e-2;
inline constexpr double jet_agreement = 1e-4;
inline constexpr double interface_jump = 1e-9;
inline constexpr double stability_lo = 0.5;
inline constexpr double stability_hi = 2.0;
inline constexpr double cutoff_d1_const = 40.0;
inline constexpr double sector_margin = 0.21694;  // = 0.5 sin(pi/7), rounded down
inline constexpr double decay_spread = 0.5;
inline constexpr double telescope_rel = 1e-6;
inline constexpr double h_log_depth = 100.0;  // bound on -ln min|h|
}  // namespace thresholds

struct FDScheme {
  double step_scale = 1.0;      // multiplies both steps; 1 = calibrated default
  double angle_step_frac = 0.005;  // step_phi = frac / local angular frequency
  // Sized so h * (local log-derivative) stays small even in the inner-disk
  // interpolation band, where d/dr log u ~ 2 chi' n1 log r far exceeds n1 / r;
  // roundoff (eps / h^2) remains orders of magnitude below the gates.
  double step_r(double r) const { return 2e-6 * r * step_scale; }
  double step_phi(double freq_max) const {
    return angle_step_frac * step_scale / freq_max;
  }
};

// ---------------------------------------------------------------------------
// Deterministic sampling.

namespace detail {

// Deterministic uniform double in [0, 1) independent of library distributions.
inline double next_unit(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = seed * 0x9e3779b97f4a7c15ull + a * 0xbf58476d1ce4e5b9ull +
                    b * 0x94d049bb133111ebull + 0x2545f4914f6cdd1dull;
  x ^= x >> 31;
  return x;
}

}  // namespace detail

struct SamplePoint {
  double r = 0.0, phi = 0.0;
  int annulus = -1;  // -1: inner disk
  RegionClass cls = RegionClass::Inner;
};

// Stratified interior samples: `samples` total, split evenly over every
// region class of every annulus plus the inner disk.
inline std::vector<SamplePoint> stratified_samples(const PlaneSolution& ps,
                                                   int samples,
                                                   std::uint64_t seed) {
  struct Cell {
    int annulus;
    RegionClass cls;
    double r_lo, r_hi;
    int window;  // -1 n/a, 0 sector, 1 window
  };
  std::vector<Cell> cells;
  // FD stencils at small radii meet steep r^{n1} growth; sampling starts at
  // 0.25 rho1 where the second-order step model holds (analytic jets cover
  // the deep interior in the unit tests).
  cells.push_back({-1, RegionClass::Inner, 0.25 * ps.config.rho1,
                   ps.config.rho1, -1});
  for (int j = 0; j < static_cast<int>(ps.annuli.size()); ++j) {
    for (const auto& rg : ps.annuli[j].regions) {
      if (rg.angular_split) {
        cells.push_back({j, RegionClass::S1PlateauWindow, rg.r_lo, rg.r_hi, 1});
        cells.push_back({j, RegionClass::S1PlateauSector, rg.r_lo, rg.r_hi, 0});
      } else {
        cells.push_back({j, rg.cls, rg.r_lo, rg.r_hi, -1});
      }
    }
  }
  const int quota = std::max(1, samples / static_cast<int>(cells.size()));
  std::vector<SamplePoint> out;
  out.reserve(cells.size() * quota);
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& cell = cells[ci];
    std::mt19937_64 gen(detail::mix_seed(seed, ci, cell.annulus + 7));
    const AngularProfile* pr =
        cell.annulus >= 0 ? &ps.annuli[cell.annulus].profile : nullptr;
    for (int i = 0; i < quota; ++i) {
      SamplePoint p;
      p.annulus = cell.annulus;
      p.cls = cell.cls;
      const double pad = 2e-4 * cell.r_hi;  // keeps FD stencils in-domain
      p.r = cell.r_lo + pad +
            detail::next_unit(gen) * std::max(cell.r_hi - cell.r_lo - 2.0 * pad, 0.0);
      if (cell.window < 0) {
        p.phi = 2.0 * kPi * detail::next_unit(gen);
      } else {
        // Pick a node phi_m, then a window or sector offset within the period.
        const int nodes = static_cast<int>(2.0 * (pr->n + pr->k));
        const int m = static_cast<int>(detail::next_unit(gen) * nodes);
        const double T = pr->T;
        double x;
        if (cell.window == 1) {
          x = (detail::next_unit(gen) - 0.5) * 0.38 * T;  // inside [-T/5, T/5]
        } else {
          x = (0.21 + 0.58 * detail::next_unit(gen)) * T;  // inside (T/5, 4T/5)
        }
        p.phi = pr->phi_m(m) + x;
      }
      out.push_back(p);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference residual certification.

namespace detail {

// Second-order FD Laplacian of u divided by u(center), computed from
// u(x)/u(center) ratios so every differenced quantity is O(1).
inline Cplx fd_lap_quotient(const PlaneSolution& ps, double r, double phi,
                            double hr, double hp, Cplx log_center) {
  auto ratio = [&](double rr, double pp) {
    return std::exp(eval_global_u(ps, rr, pp).log_u.v - log_center);
  };
  const Cplx rp = ratio(r + hr, phi), rm = ratio(r - hr, phi);
  const Cplx ap = ratio(r, phi + hp), am = ratio(r, phi - hp);
  const Cplx urr = (rp - 2.0 + rm) / (hr * hr);
  const Cplx ur = (rp - rm) / (2.0 * hr);
  const Cplx upp = (ap - 2.0 + am) / (hp * hp);
  return urr + ur / r + upp / (r * r);
}

// Quotient (W . grad u)/u or (V u)/u of the potential action.
inline Cplx potential_action(const PotentialValue& pot, const Jet2& L, double r) {
  if (pot.mode != Mode::MeshP) return pot.V;
  return pot.w1 * L.r - Cplx(0.0, 1.0) * pot.w2 * L.p / r;
}

template <typename Fn>
inline void parallel_for(std::size_t count, Fn&& fn) {
  unsigned threads = 1;
  if (const char* env = std::getenv("ANNULUS_FORGE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) threads = static_cast<unsigned>(v);
  }
  threads = std::min<unsigned>(threads, std::max<unsigned>(1, std::thread::hardware_concurrency()));
  if (threads <= 1 || count < 2 * threads) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t idx =
      static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
  return v[idx];
}

}  // namespace detail

struct ClassStats {
  std::string name;
  int count = 0;
  double max_rel = 0.0;
  double p99_rel = 0.0;
};

struct ResidualReport {
  std::vector<ClassStats> per_class;
  double max_rel = 0.0;
  double p99_rel = 0.0;
  int sample_count = 0;
  int skipped = 0;  // samples that hit conditioning guards
  double jet_agreement_max = 0.0;
  double step_phi = 0.0;
  bool pass() const {
    return p99_rel <= thresholds::residual_p99 &&
           max_rel <= thresholds::residual_max &&
           jet_agreement_max <= thresholds::jet_agreement;
  }
};

inline ResidualReport residual_check(const PlaneSolution& ps,
                                     const FDScheme& scheme, int samples,
                                     std::uint64_t seed) {
  const auto pts = stratified_samples(ps, samples, seed);
  // Angular step per region: resolve the local angular frequency. A single
  // global step sized for the outermost annulus would be needlessly small in
  // the inner disk, where the 1/r^2 weight amplifies the FD roundoff floor.
  const auto local_hp = [&](int annulus) {
    if (annulus < 0) return scheme.step_phi(2.0 * ps.inner.n1);
    const auto& pr = ps.annuli[static_cast<std::size_t>(annulus)].params;
    return scheme.step_phi(2.0 * (pr.n + 2.0 * pr.k));
  };
  // The jet-agreement oracle assumes C^4 smoothness, but the construction is
  // only C^2 at the angular-profile corners and the radial cutoff transition
  // endpoints. Stencils straddling such a corner keep their residual row but
  // do not feed the agreement maximum.
  const auto agree_usable = [&](int annulus, double r, double phi, double hr,
                                double hp) {
    if (annulus < 0) {
      for (double c : {0.4 * ps.inner.rho1, 0.6 * ps.inner.rho1}) {
        if (std::abs(r - c) < 3.0 * hr) return false;
      }
      return true;
    }
    const auto& sol = ps.annuli[static_cast<std::size_t>(annulus)];
    const double T = sol.profile.T;
    const double tau = sol.profile.reduce(phi);
    for (double c : {0.2 * T, 0.335 * T, 0.665 * T, 0.8 * T}) {
      double d = std::abs(tau - c);
      d = std::min(d, T - d);
      if (d < 3.0 * hp) return false;
    }
    const CutoffMember* members[] = {
        &sol.cut1.psi1, &sol.cut1.psi3, &sol.cut1.psi4, &sol.cut4.psi1,
        &sol.cut4.psi3, &sol.cut4.psi4, &sol.psi_s2,    &sol.psi_s3};
    for (const auto* m : members) {
      for (const auto& t : m->ts) {
        if (std::abs(r - t.lo) < 3.0 * hr || std::abs(r - t.hi) < 3.0 * hr) {
          return false;
        }
      }
    }
    return true;
  };
  const Cplx lam = ps.config.lambda;

  struct Row {
    double rel = -1.0;   // -1: skipped
    double agree = -1.0; // -1: stencil straddles a C^2 corner
  };
  std::vector<Row> rows(pts.size());
  detail::parallel_for(pts.size(), [&](std::size_t i) {
    const auto& p = pts[i];
    try {
      const GlobalEval g = eval_global_u(ps, p.r, p.phi);
      const PotentialValue pot = eval_global_potential(ps, p.r, p.phi);
      const Cplx action = detail::potential_action(pot, g.log_u, p.r);
      const double hr = scheme.step_r(p.r);
      const double hp = local_hp(g.annulus);
      const Cplx lap_h = detail::fd_lap_quotient(ps, p.r, p.phi, hr, hp, g.log_u.v);
      const Cplx lap_h2 =
          detail::fd_lap_quotient(ps, p.r, p.phi, 0.5 * hr, 0.5 * hp, g.log_u.v);
      const double den =
          std::abs(lap_h) + std::abs(lam) + std::abs(action) + 1e-300;
      rows[i].rel = std::abs(lap_h + lam - action) / den;
      // Independent-oracle agreement: one Richardson level against the jets.
      // Accumulated only where the FD noise floor -- rounding of log u
      // (~eps |log u|) pushed through the second differences -- leaves a
      // 10x headroom under the gate; on the gluing plateaus |jet| is O(1)
      // while |log u| is huge, and no step choice can certify 1e-4 there.
      const Cplx jet = lap_quotient(g.log_u, p.r);
      const double noise = 2.3e-15 * (1.0 + std::abs(g.log_u.v)) *
                           (1.0 / (hr * hr) + 1.0 / (hp * hp * p.r * p.r));
      if (agree_usable(g.annulus, p.r, p.phi, hr, hp) &&
          noise <= 0.1 * thresholds::jet_agreement * (std::abs(jet) + 1.0)) {
        const Cplx rich = (4.0 * lap_h2 - lap_h) / 3.0;
        rows[i].agree = std::abs(rich - jet) / (std::abs(jet) + 1.0);
      }
    } catch (const EvalError&) {
      rows[i].rel = -1.0;
    }
  });

  ResidualReport rep;
  const auto& last = ps.annuli.back().params;
  rep.step_phi = scheme.step_phi(2.0 * (last.n + 2.0 * last.k));
  std::vector<double> all;
  all.reserve(rows.size());
  // Group by (annulus irrelevant) region class name.
  std::vector<std::pair<std::string, std::vector<double>>> groups;
  auto bucket = [&](const std::string& name) -> std::vector<double>& {
    for (auto& g : groups)
      if (g.first == name) return g.second;
    groups.push_back({name, {}});
    return groups.back().second;
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (rows[i].rel < 0.0) {
      ++rep.skipped;
      continue;
    }
    all.push_back(rows[i].rel);
    bucket(region_name(pts[i].cls)).push_back(rows[i].rel);
    if (rows[i].agree >= 0.0) {
      rep.jet_agreement_max = std::max(rep.jet_agreement_max, rows[i].agree);
    }
  }
  for (auto& g : groups) {
    ClassStats cs;
    cs.name = g.first;
    cs.count = static_cast<int>(g.second.size());
    cs.max_rel = *std::max_element(g.second.begin(), g.second.end());
    cs.p99_rel = detail::percentile(g.second, 0.99);
    rep.per_class.push_back(cs);
  }
  rep.sample_count = static_cast<int>(all.size());
  if (!all.empty()) {
    rep.max_rel = *std::max_element(all.begin(), all.end());
    rep.p99_rel = detail::percentile(all, 0.99);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Envelope certification.

// Angle grid over one exact period of the construction (the solution modulus
// and potential magnitude are T-periodic in phi), at >= 8 points per period
// this matches an 8(n+k)-angle full-circle grid.
inline double log_m_period(const AnnulusSolution& sol, double r,
                           int per_period = 64) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < per_period; ++i) {
    const double phi = sol.profile.T * i / per_period;
    // Skip isolated zeros of u (they never carry the angular maximum).
    try {
      best = std::max(best, eval_u(sol, r, phi).u.logmod);
    } catch (const EvalError&) {
    }
  }
  return best;
}

inline double global_log_m_period(const PlaneSolution& ps, double r,
                                  int per_period = 64) {
  const int j = locate(ps, r);
  if (j < 0) return inner_log_jet(ps.inner, r, 0.0).v.real();
  return ps.cum[j].logmod + log_m_period(ps.annuli[j], r, per_period);
}

struct EnvelopeScale {
  double rho1 = 0.0;
  double constant = 0.0;   // mode-normalized sup of the potential magnitude
  double raw_sup = 0.0;    // un-normalized sup over the sampled grid
  bool m_le_M = true;
  double m_minus_M_max = 0.0;
  double nx_refinement = 0.0;  // sup sqrt((n+ak)^2 - lambda r^2) r^{-3/4}
  int fallback_count = 0;
};

namespace detail {

inline double envelope_normalizer(Mode mode, double r) {
  const double ax = std::sqrt(1.0 + r * r);
  if (mode == Mode::MeshN) return std::sqrt(ax) / std::log(ax);
  return std::sqrt(ax);  // mesh-p: |W| sqrt<x>; mesh-nx: |V| sqrt<x>
}

inline const std::array<double, 17>& envelope_offsets() {
  static const std::array<double, 17> c = {0.05, 0.35, 2.0 / 3.0, 1.0, 4.0 / 3.0,
                                           5.0 / 3.0, 2.0, 2.5, 3.0, 3.5, 4.0,
                                           13.0 / 3.0, 14.0 / 3.0, 5.0, 16.0 / 3.0,
                                           17.0 / 3.0, 5.95};
  return c;
}

}  // namespace detail

inline EnvelopeScale envelope_check(const PlaneSolution& ps,
                                    int angles_per_period = 64) {
  EnvelopeScale es;
  es.rho1 = ps.config.rho1;
  const Mode mode = ps.config.mode;
  for (const auto& sol : ps.annuli) {
    const double s = sol.s;
    for (double c : detail::envelope_offsets()) {
      const double r = sol.params.rho + c * s;
      double sup_here = 0.0;
      for (int i = 0; i < angles_per_period; ++i) {
        const double phi = sol.profile.T * i / angles_per_period;
        // At an isolated zero of u the plateau residual factorizes through u
        // (the closed-form row solve), so the skipped angle is a removable
        // point of the potential, not a blow-up.
        try {
          const PotentialValue pot = eval_potential(sol, r, phi);
          if (pot.fallback) ++es.fallback_count;
          sup_here = std::max(sup_here, pot.magnitude());
        } catch (const EvalError&) {
        }
      }
      es.raw_sup = std::max(es.raw_sup, sup_here);
      es.constant =
          std::max(es.constant, sup_here * detail::envelope_normalizer(mode, r));
      const double diff = log_m_period(sol, r, angles_per_period) -
                          envelope_log_M(sol, r);
      es.m_minus_M_max = std::max(es.m_minus_M_max, diff);
      if (diff > 1e-9) es.m_le_M = false;
    }
    if (mode == Mode::MeshNX) {
      for (int a = -2; a <= 2; ++a) {
        const double m = sol.params.n + a * sol.params.k;
        for (double c : {0.0, 1.5, 3.0, 4.5, 6.0}) {
          const double r = sol.params.rho + c * s;
          const double v =
              std::abs(std::sqrt(Cplx(m * m, 0.0) - sol.params.lambda * r * r)) *
              std::pow(r, -0.75);
          es.nx_refinement = std::max(es.nx_refinement, v);
        }
      }
    }
  }
  return es;
}

struct EnvelopeReport {
  EnvelopeScale base, alt;
  double stability_ratio = 0.0;   // alt constant / base constant
  double nx_ratio = 0.0;          // alt / base refinement sup (mesh-nx only)
  bool pass() const {
    const bool stable = stability_ratio >= thresholds::stability_lo &&
                        stability_ratio <= thresholds::stability_hi;
    const bool nx_ok =
        nx_ratio == 0.0 || (nx_ratio >= thresholds::stability_lo &&
                            nx_ratio <= thresholds::stability_hi);
    return std::isfinite(base.constant) && std::isfinite(alt.constant) &&
           stable && nx_ok && base.m_le_M && alt.m_le_M;
  }
};

// ---------------------------------------------------------------------------
// Decay certification.

struct DecayReport {
  std::vector<double> rho, ln_m;
  std::vector<double> increments;  // per-annulus ln m drop (within-annulus)
  std::vector<double> implied_c;   // -increment / (6 sqrt(rho_j))
  double slope = 0.0, intercept = 0.0;
  double spread_rel = 0.0;     // max |c_j - median| / median over j >= 2
  double telescope_rel = 0.0;  // telescoped sum vs endpoint difference
  bool strictly_decreasing = false;
  bool pass() const {
    return strictly_decreasing && slope < 0.0 &&
           spread_rel <= thresholds::decay_spread &&
           telescope_rel <= thresholds::telescope_rel;
  }
};

inline DecayReport decay_check(const PlaneSolution& ps) {
  DecayReport d;
  for (double rho : ps.rhos) {
    d.rho.push_back(rho);
    d.ln_m.push_back(global_log_m_period(ps, rho));
  }
  d.strictly_decreasing = true;
  for (std::size_t j = 1; j < d.ln_m.size(); ++j) {
    if (!(d.ln_m[j] < d.ln_m[j - 1])) d.strictly_decreasing = false;
  }
  // Least-squares line ln m = slope * rho + intercept.
  const std::size_t n = d.rho.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < n; ++j) {
    sx += d.rho[j];
    sy += d.ln_m[j];
    sxx += d.rho[j] * d.rho[j];
    sxy += d.rho[j] * d.ln_m[j];
  }
  const double nn = static_cast<double>(n);
  d.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  d.intercept = (sy - d.slope * sx) / nn;
  // Per-annulus increments measured inside each annulus; their telescoped sum
  // must reproduce the global endpoint drop (interface consistency).
  for (const auto& sol : ps.annuli) {
    const double inc = log_m_period(sol, sol.r_hi()) - log_m_period(sol, sol.r_lo());
    d.increments.push_back(inc);
    d.implied_c.push_back(-inc / (6.0 * sol.s));
  }
  std::vector<double> cs(d.implied_c.begin() + std::min<std::size_t>(1, d.implied_c.size()),
                         d.implied_c.end());
  if (!cs.empty()) {
    std::vector<double> sorted = cs;
    std::sort(sorted.begin(), sorted.end());
    const double med = sorted[sorted.size() / 2];
    double worst = 0.0;
    for (double c : cs) worst = std::max(worst, std::abs(c - med));
    d.spread_rel = med != 0.0 ? worst / std::abs(med) : 1e30;
  }
  double tsum = 0.0;
  for (double inc : d.increments) tsum += inc;
  const double endpoint = d.ln_m.back() - d.ln_m.front();
  d.telescope_rel = std::abs(tsum - endpoint) / std::abs(endpoint);
  return d;
}

// ---------------------------------------------------------------------------
// Interface continuity.

struct InterfaceReport {
  std::vector<double> jumps;  // relative log-space mismatch per interface
  double max_jump = 0.0;
  bool pass() const { return max_jump <= thresholds::interface_jump; }
};

inline InterfaceReport interface_check(const PlaneSolution& ps, int angles = 16) {
  InterfaceReport rep;
  for (std::size_t j = 0; j + 1 <= ps.annuli.size(); ++j) {
    const double r = ps.rhos[j];
    double worst = 0.0;
    for (int i = 0; i < angles; ++i) {
      const double phi = 2.0 * kPi * i / angles;
      Cplx below;
      if (j == 0) {
        below = inner_log_jet(ps.inner, r, phi).v;
      } else {
        const AnnulusEval ev = eval_u(ps.annuli[j - 1], r, phi);
        below = ev.log_u.v + Cplx(ps.cum[j - 1].logmod, ps.cum[j - 1].phase);
      }
      const AnnulusEval ev = eval_u(ps.annuli[j], r, phi);
      const Cplx above = ev.log_u.v + Cplx(ps.cum[j].logmod, ps.cum[j].phase);
      worst = std::max(worst, log_rel_diff({below.real(), below.imag()},
                                           {above.real(), above.imag()}));
    }
    rep.jumps.push_back(worst);
    rep.max_jump = std::max(rep.max_jump, worst);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Structural invariant sweep.

struct InvariantEntry {
  std::string name;
  double value = 0.0;
  double bound = 0.0;  // pass iff value <= bound
  bool passed = false;
};

struct InvariantReport {
  std::vector<InvariantEntry> entries;
  double sector_margin = 0.0;   // min |e^{iS} - r^{-2k} mu_n / (b mu_{n-2k})|
  double sbd_margin = 0.0;      // min dist(S mod 2pi, 2 pi Z) - pi/7 on sectors
  double cutoff_d2_const = 0.0; // sup |psi''| r, recorded (see decisions ledger)
  double h_log_depth = 0.0;     // -ln min |h| over step 3
  bool pass() const {
    for (const auto& e : entries)
      if (!e.passed) return false;
    return sector_margin >= thresholds::sector_margin && sbd_margin >= 0.0;
  }
};

namespace detail {

// Max of |smooth5 transition derivative| over a transition of width w and
// amplitude |v1 - v0|: sup|psi'| = 1.875 |dv| / w, sup|psi''| = 10/sqrt(3) |dv| / w^2.
inline void cutoff_derivative_consts(const CutoffMember& m, double& c1,
                                     double& c2) {
  for (const auto& t : m.ts) {
    const double w = t.hi - t.lo, dv = std::abs(t.v1 - t.v0);
    const double rmid = 0.5 * (t.lo + t.hi);
    c1 = std::max(c1, 1.875 * dv / w * std::sqrt(rmid));
    c2 = std::max(c2, (10.0 / std::sqrt(3.0)) * dv / (w * w) * rmid);
  }
}

}  // namespace detail

inline InvariantReport invariant_sweep(const PlaneSolution& ps) {
  InvariantReport rep;
  auto add = [&](const std::string& name, double value, double bound) {
    rep.entries.push_back({name, value, bound, value <= bound});
  };

  double f_max_rel = 0.0, f_min_dev = 0.0, f_int_rel = 0.0, f_d1_rel = 0.0;
  double phi_max_rel = 0.0, phi_node_rel = 0.0;
  double sum_dev = 0.0, c1 = 0.0, c2 = 0.0;
  double sprime_min_over_n = std::numeric_limits<double>::infinity();
  double sep_min = std::numeric_limits<double>::infinity();
  double h_min = std::numeric_limits<double>::infinity();
  double sector_min = std::numeric_limits<double>::infinity();
  double sbd_min = std::numeric_limits<double>::infinity();

  for (const auto& sol : ps.annuli) {
    const auto& pr = sol.profile;
    const double n = sol.params.n, k = sol.params.k, T = pr.T;
    const int N = 4001;
    double integral_check = std::abs(pr.Phi_val(T));  // Phi(T) = int_0^T f
    f_int_rel = std::max(f_int_rel, integral_check / (k * T));
    for (int i = 0; i <= N; ++i) {
      const double phi = T * i / N;
      double fv, dfv;
      pr.f(phi, fv, dfv);
      f_max_rel = std::max(f_max_rel, fv / (5.0 * k));
      f_min_dev = std::max(f_min_dev, (-4.0 * k - fv) / k);
      f_d1_rel = std::max(f_d1_rel, std::abs(dfv) * T / k);
      phi_max_rel = std::max(phi_max_rel, std::abs(pr.Phi_val(phi)) / (5.0 * k * T));
      sprime_min_over_n = std::min(sprime_min_over_n, (2.0 * (n + k) + fv) / n);
    }
    phi_node_rel = std::max(phi_node_rel,
                            std::max(std::abs(pr.Phi_val(0.0)),
                                     std::abs(pr.Phi_val(T))) / (k * T));
    // Cutoff families: complementarity and derivative constants.
    const double rho = sol.params.rho, s = sol.s;
    for (int i = 0; i <= 400; ++i) {
      const double r1 = rho + 2.0 * s * i / 400.0;
      sum_dev = std::max(sum_dev, std::abs(sol.cut1.psi1.eval(r1).v +
                                           sol.cut1.psi2.eval(r1).v - 1.0));
      const double r4 = rho + 4.0 * s + 2.0 * s * i / 400.0;
      sum_dev = std::max(sum_dev, std::abs(sol.cut4.psi1.eval(r4).v +
                                           sol.cut4.psi2.eval(r4).v - 1.0));
    }
    for (const CutoffMember* m : {&sol.cut1.psi1, &sol.cut1.psi2, &sol.cut1.psi3,
                                  &sol.cut1.psi4, &sol.cut4.psi1, &sol.cut4.psi2,
                                  &sol.cut4.psi3, &sol.cut4.psi4, &sol.psi_s2,
                                  &sol.psi_s3}) {
      detail::cutoff_derivative_consts(*m, c1, c2);
    }
    // Dominance separation at the single-piece edges of steps 1 and 4.
    const auto policy = branch_policy(sol.params.mode, sol.params.lambda);
    const Cplx lam = sol.params.lambda;
    auto log_ratio_12 = [&](double r) {
      return -2.0 * k * std::log(r) + mu({n, lam}, r, policy).logmod -
             mu({n - 2.0 * k, lam}, r, policy).logmod - sol.glue.b.logmod;
    };
    auto log_ratio_45 = [&](double r) {
      return sol.glue.b1.logmod - (n + 2.0 * k) * std::log(r) +
             mu({n + 2.0 * k, lam}, r, policy).logmod - sol.glue.a.logmod +
             (n + k) * std::log(r) - mu({n + k, lam}, r, policy).logmod;
    };
    sep_min = std::min({sep_min, log_ratio_12(rho + 2.0 * s / 3.0),
                        -log_ratio_12(rho + 4.0 * s / 3.0),
                        log_ratio_45(rho + 4.0 * s + 2.0 * s / 3.0),
                        -log_ratio_45(rho + 4.0 * s + 4.0 * s / 3.0)});
    // Step-3 interpolant depth.
    for (int i = 0; i <= 200; ++i) {
      const double r = rho + 3.0 * s + s * i / 200.0;
      const auto psv = sol.psi_s3.eval(r);
      const LogComplex lg = sol.glue.d * LogComplex{-4.0 * k * std::log(r), 0.0} *
                            mu({n + 2.0 * k, lam}, r, policy) /
                            mu({n - 2.0 * k, lam}, r, policy);
      h_min = std::min(h_min, std::abs(psv.v + (1.0 - psv.v) * lg.to_cplx()));
    }
    // Sector lower bound over one period and the step-1 plateau radii.
    for (int ir = 0; ir <= 20; ++ir) {
      const double r = rho + (2.0 / 3.0 + (2.0 / 3.0) * ir / 20.0) * s;
      const LogComplex w = LogComplex{-2.0 * k * std::log(r), 0.0} *
                           mu({n, lam}, r, policy) /
                           (sol.glue.b * mu({n - 2.0 * k, lam}, r, policy));
      const Cplx wv = w.logmod < 3.0 ? w.to_cplx() : Cplx(1e30, 0.0);
      for (int i = 0; i <= 200; ++i) {
        const double x = (0.2 + 0.6 * i / 200.0) * T;  // sector part of a period
        const Jet2 S = pr.S_jet(x);
        const double sv = S.v.real();
        const double dist = std::abs(wrap_pi(sv));
        sbd_min = std::min(sbd_min, dist - kPi / 7.0);
        sector_min =
            std::min(sector_min, std::abs(std::exp(Cplx(0.0, sv)) - wv));
      }
    }
  }

  add("f_upper_over_5k", f_max_rel, 1.0);           // (f1) upper bound
  add("f_lower_deviation", f_min_dev, 1e-12);       // (f1) lower bound f >= -4k
  add("f_integral_rel", f_int_rel, 1e-9);           // (f2)
  add("f_slope_const", f_d1_rel, 200.0);            // (f3): measured C, finite
  add("Phi_over_5kT", phi_max_rel, 1.0);            // (Phi1)
  add("Phi_node_rel", phi_node_rel, 1e-9);          // Phi(phi_m) = 0
  add("cutoff_sum_dev", sum_dev, 1e-12);            // (sumBd) psi1 + psi2 = 1
  add("cutoff_d1_const", c1, thresholds::cutoff_d1_const);  // (1psi)/(psiB), j = 1
  add("s_prime_over_n_min", 1.0 / sprime_min_over_n, 1.0);  // S' > n
  add("separation_min", -sep_min, 0.0);             // |u2/u1|, |u5/u4| gaps > 0
  add("h_log_depth", -std::log(h_min), thresholds::h_log_depth);  // (hBd)
  rep.cutoff_d2_const = c2;
  rep.h_log_depth = -std::log(h_min);
  rep.sector_margin = sector_min;
  rep.sbd_margin = sbd_min;
  return rep;
}

// ---------------------------------------------------------------------------
// Full report.

struct VerificationReport {
  PlaneConfig config;
  int samples = 0;
  std::uint64_t seed = 0;
  double fd_step_scale = 1.0;
  ResidualReport residual;
  EnvelopeReport envelope;
  DecayReport decay;
  InterfaceReport interfaces;
  InvariantReport invariants;
  std::vector<std::string> flags;
  bool pass = false;
};

inline VerificationReport verify_plane(const PlaneConfig& cfg, int samples,
                                       std::uint64_t seed,
                                       const FDScheme& scheme) {
  VerificationReport rep;
  rep.config = cfg;
  rep.samples = samples;
  rep.seed = seed;
  rep.fd_step_scale = scheme.step_scale;

  const PlaneSolution ps = build_plane(cfg);
  rep.residual = residual_check(ps, scheme, samples, seed);
  rep.envelope.base = envelope_check(ps);
  // Second scale (4x) for the cross-scale stability of the envelope constants.
  PlaneConfig alt = cfg;
  alt.rho1 = 4.0 * cfg.rho1;
  rep.envelope.alt = envelope_check(build_plane(alt));
  rep.envelope.stability_ratio =
      rep.envelope.base.constant != 0.0
          ? rep.envelope.alt.constant / rep.envelope.base.constant
          : 0.0;
  if (cfg.mode == Mode::MeshNX && rep.envelope.base.nx_refinement != 0.0) {
    rep.envelope.nx_ratio =
        rep.envelope.alt.nx_refinement / rep.envelope.base.nx_refinement;
  }
  rep.decay = decay_check(ps);
  rep.interfaces = interface_check(ps);
  rep.invariants = invariant_sweep(ps);

  if (scheme.step_scale > 1.0) {
    rep.flags.push_back("fd scheme coarser than the calibrated default");
  }
  if (rep.residual.skipped > 0) {
    rep.flags.push_back("conditioning guard skipped " +
                        std::to_string(rep.residual.skipped) + " samples");
  }
  if (rep.envelope.base.fallback_count + rep.envelope.alt.fallback_count > 0) {
    rep.flags.push_back("drift solve used least-norm fallback");
  }
  if (rep.invariants.cutoff_d2_const > thresholds::cutoff_d1_const) {
    rep.flags.push_back(
        "cutoff second-derivative constant exceeds 40 (see report field "
        "cutoff_d2_const); inherent to any C2 cutoff on these windows");
  }
  rep.pass = rep.residual.pass() && rep.envelope.pass() && rep.decay.pass() &&
             rep.interfaces.pass() && rep.invariants.pass();
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization (deterministic: ordered keys, no timestamps).

inline ordered_json to_json(const VerificationReport& r) {
  ordered_json j;
  j["schema"] = "annulus-forge-report/1";
  j["config"] = {{"mode", mode_name(r.config.mode)},
                 {"lambda", {r.config.lambda.real(), r.config.lambda.imag()}},
                 {"rho1", r.config.rho1},
                 {"annuli", r.config.annuli},
                 {"samples", r.samples},
                 {"seed", r.seed},
                 {"fd_step_scale", r.fd_step_scale}};
  ordered_json res;
  res["max_rel"] = r.residual.max_rel;
  res["p99_rel"] = r.residual.p99_rel;
  res["sample_count"] = r.residual.sample_count;
  res["skipped"] = r.residual.skipped;
  res["jet_agreement_max"] = r.residual.jet_agreement_max;
  res["step_phi"] = r.residual.step_phi;
  res["per_class"] = ordered_json::array();
  for (const auto& c : r.residual.per_class) {
    res["per_class"].push_back({{"class", c.name},
                                {"count", c.count},
                                {"max_rel", c.max_rel},
                                {"p99_rel", c.p99_rel}});
  }
  res["pass"] = r.residual.pass();
  j["residual"] = res;

  auto scale_json = [](const EnvelopeScale& e) {
    return ordered_json{{"rho1", e.rho1},
                        {"constant", e.constant},
                        {"raw_sup", e.raw_sup},
                        {"m_le_M", e.m_le_M},
                        {"m_minus_M_max", e.m_minus_M_max},
                        {"nx_refinement", e.nx_refinement},
                        {"fallback_count", e.fallback_count}};
  };
  j["envelope"] = {{"base", scale_json(r.envelope.base)},
                   {"alt", scale_json(r.envelope.alt)},
                   {"stability_ratio", r.envelope.stability_ratio},
                   {"nx_ratio", r.envelope.nx_ratio},
                   {"pass", r.envelope.pass()}};

  j["decay"] = {{"rho", r.decay.rho},
                {"ln_m", r.decay.ln_m},
                {"increments", r.decay.increments},
                {"implied_c", r.decay.implied_c},
                {"slope", r.decay.slope},
                {"intercept", r.decay.intercept},
                {"spread_rel", r.decay.spread_rel},
                {"telescope_rel", r.decay.telescope_rel},
                {"strictly_decreasing", r.decay.strictly_decreasing},
                {"pass", r.decay.pass()}};

  j["interfaces"] = {{"jumps", r.interfaces.jumps},
                     {"max_jump", r.interfaces.max_jump},
                     {"pass", r.interfaces.pass()}};

  ordered_json inv;
  inv["entries"] = ordered_json::array();
  for (const auto& e : r.invariants.entries) {
    inv["entries"].push_back({{"name", e.name},
                              {"value", e.value},
                              {"bound", e.bound},
                              {"pass", e.passed}});
  }
  inv["sector_margin"] = r.invariants.sector_margin;
  inv["sbd_margin"] = r.invariants.sbd_margin;
  inv["cutoff_d2_const"] = r.invariants.cutoff_d2_const;
  inv["h_log_depth"] = r.invariants.h_log_depth;
  inv["pass"] = r.invariants.pass();
  j["invariants"] = inv;

  j["flags"] = r.flags;
  j["pass"] = r.pass;
  return j;
}

inline std::string to_text(const VerificationReport& r) {
  std::string out;
  auto line = [&](const std::string& s) { out += s + "\n"; };
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };
  line("annulus-forge verification report");
  line("mode " + std::string(mode_name(r.config.mode)) + "  lambda " +
       fmt(r.config.lambda.real()) + "," + fmt(r.config.lambda.imag()) +
       "  rho1 " + fmt(r.config.rho1) + "  annuli " +
       std::to_string(r.config.annuli));
  line("");
  line(std::string("residual: ") + (r.residual.pass() ? "PASS" : "FAIL") +
       "  p99 " + fmt(r.residual.p99_rel) + "  max " + fmt(r.residual.max_rel) +
       "  jet-agreement " + fmt(r.residual.jet_agreement_max) + "  samples " +
       std::to_string(r.residual.sample_count));
  for (const auto& c : r.residual.per_class) {
    line("  " + c.name + ": p99 " + fmt(c.p99_rel) + "  max " + fmt(c.max_rel) +
         "  n " + std::to_string(c.count));
  }
  line(std::string("envelope: ") + (r.envelope.pass() ? "PASS" : "FAIL") +
       "  C(" + fmt(r.envelope.base.rho1) + ") = " + fmt(r.envelope.base.constant) +
       "  C(" + fmt(r.envelope.alt.rho1) + ") = " + fmt(r.envelope.alt.constant) +
       "  ratio " + fmt(r.envelope.stability_ratio));
  if (r.config.mode == Mode::MeshNX) {
    line("  nx refinement sup " + fmt(r.envelope.base.nx_refinement) +
         "  ratio " + fmt(r.envelope.nx_ratio));
  }
  line(std::string("decay: ") + (r.decay.pass() ? "PASS" : "FAIL") + "  slope " +
       fmt(r.decay.slope) + "  spread " + fmt(r.decay.spread_rel) +
       "  telescope " + fmt(r.decay.telescope_rel));
  line(std::string("interfaces: ") + (r.interfaces.pass() ? "PASS" : "FAIL") +
       "  max jump " + fmt(r.interfaces.max_jump));
  line(std::string("invariants: ") + (r.invariants.pass() ? "PASS" : "FAIL") +
       "  sector margin " + fmt(r.invariants.sector_margin) +
       "  cutoff d2 const " + fmt(r.invariants.cutoff_d2_const));
  for (const auto& e : r.invariants.entries) {
    line("  " + e.name + ": " + fmt(e.value) + " <= " + fmt(e.bound) +
         (e.passed ? "  ok" : "  FAIL"));
  }
  for (const auto& f : r.flags) line("flag: " + f);
  line(std::string("overall: ") + (r.pass ? "PASS" : "FAIL"));
  return out;
}

}  // namespace aforge
