#include <doctest.h>

#include "annulus_forge/annulus.hpp"
#include "annulus_forge/closed_forms.hpp"
#include "oracles.hpp"

using namespace aforge;

namespace {

AnnulusSolution make_sol(Cplx lam, Mode mode, double rho = 400.0) {
  return build_annulus(AnnulusParams::make(rho, lam, mode));
}

// Pick a plateau angle where the two-piece combination is well conditioned.
double pick_phi(const AnnulusSolution& sol, double r, double phi0) {
  const double T = sol.profile.T;
  for (int j = 0; j < 40; ++j) {
    const double phi = phi0 + j * 0.01 * T;
    const AnnulusEval ev = eval_u(sol, r, phi);
    if (ev.npieces == 1 || std::abs(1.0 + ev.t) > 0.5) return phi;
  }
  return phi0;
}

}  // namespace

TEST_CASE("parameter selection and validation") {
  const AnnulusParams p = AnnulusParams::make(400.0, Cplx(1.0, 0.0), Mode::MeshN);
  CHECK(p.n == 800.0);
  CHECK(p.k == 240.0);
  CHECK_NOTHROW(p.validate());

  AnnulusParams bad = p;
  bad.rho = 50.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.n = 700.0;  // violates |n - 2 sqrt(Lambda) rho| <= 1
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.k = 300.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  const AnnulusParams px = AnnulusParams::make(400.0, Cplx(1.0, 0.0), Mode::MeshNX);
  CHECK(px.n == 560.0);
  CHECK(px.k == 120.0);
  CHECK_NOTHROW(px.validate());
  AnnulusParams badx = px;
  badx.lambda = Cplx(1.0, 0.5);
  CHECK_THROWS_AS(badx.validate(), ConfigError);
}

TEST_CASE("gluing constants make the pieces match at their radii") {
  for (Cplx lam : {Cplx(1.0, 0.0), Cplx(1.0, 0.5)}) {
    for (Mode mode : {Mode::MeshN, Mode::MeshP}) {
      const AnnulusSolution sol = make_sol(lam, mode);
      const double rho = sol.params.rho, s = sol.s;
      const double n = sol.params.n, k = sol.params.k;
      const auto policy = branch_policy(mode, lam);

      // |u1| = |u2| at rho + sqrt(rho): equal piece log-moduli.
      {
        const AnnulusEval ev = eval_u(sol, rho + s, 0.3 * sol.profile.T);
        REQUIRE(ev.npieces == 2);
        CHECK(std::abs(ev.piece[0].v.real() - ev.piece[1].v.real()) <= 1e-9);
      }
      // g(rho + 3 sqrt(rho)) = 1 exactly in log form.
      {
        const double r = rho + 3.0 * s;
        const LogComplex g = sol.glue.d * LogComplex{-4.0 * k * std::log(r), 0.0} *
                             mu({n + 2.0 * k, lam}, r, policy) /
                             mu({n - 2.0 * k, lam}, r, policy);
        CHECK(std::abs(g.logmod) <= 1e-10);
        CHECK(std::abs(wrap_pi(g.phase)) <= 1e-10);
      }
      // |u4| = |u5| at rho + 5 sqrt(rho).
      {
        const AnnulusEval ev = eval_u(sol, rho + 5.0 * s, 0.3 * sol.profile.T);
        REQUIRE(ev.npieces == 2);
        CHECK(std::abs(ev.piece[0].v.real() - ev.piece[1].v.real()) <= 1e-9);
      }
    }
  }
}

TEST_CASE("boundary states are the pure separated solutions") {
  for (Cplx lam : {Cplx(1.0, 0.0), Cplx(1.0, 0.5)}) {
    for (Mode mode : {Mode::MeshN, Mode::MeshP}) {
      const AnnulusSolution sol = make_sol(lam, mode);
      const double rho = sol.params.rho, s = sol.s;
      const double n = sol.params.n, k = sol.params.k;
      const auto policy = branch_policy(mode, lam);
      for (double phi : {0.0, 1.3, 5.2}) {
        for (double c : {0.0, 0.05}) {
          const double r = rho + c * s;
          const AnnulusEval ev = eval_u(sol, r, phi);
          const LogComplex want =
              LogComplex{-n * std::log(r), -n * phi} * mu({n, lam}, r, policy);
          CHECK(log_rel_diff(ev.u, want) <= 1e-11);
        }
        for (double c : {5.95, 6.0}) {
          const double r = rho + c * s;
          const AnnulusEval ev = eval_u(sol, r, phi);
          const LogComplex want =
              sol.glue.a *
              LogComplex{-(n + k) * std::log(r), -(n + k) * phi} *
              mu({n + k, lam}, r, policy);
          CHECK(log_rel_diff(ev.u, want) <= 1e-11);
        }
      }
    }
  }
}

TEST_CASE("u is continuous across every seam and cutoff corner") {
  const double seams[] = {0.1,       1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, 5.0 / 3.0,
                          1.9,       2.0,       7.0 / 3.0, 8.0 / 3.0, 3.0,
                          10.0 / 3.0, 11.0 / 3.0, 4.0,     4.1,       13.0 / 3.0,
                          14.0 / 3.0, 16.0 / 3.0, 17.0 / 3.0, 5.9};
  for (Mode mode : {Mode::MeshN, Mode::MeshP}) {
    const AnnulusSolution sol = make_sol(Cplx(1.0, 0.0), mode);
    const double T = sol.profile.T;
    for (double c : seams) {
      const double r = sol.params.rho + c * sol.s;
      for (double phi : {0.12 * T, 0.5 * T, 3.7}) {
        const LogComplex lo = eval_u(sol, r - 1e-9, phi).u;
        const LogComplex hi = eval_u(sol, r + 1e-9, phi).u;
        CHECK(log_rel_diff(lo, hi) <= 1e-8);
      }
    }
  }
}

TEST_CASE("radius outside the annulus is rejected") {
  const AnnulusSolution sol = make_sol(Cplx(1.0, 0.0), Mode::MeshN);
  CHECK_THROWS_AS(eval_u(sol, sol.r_lo() - 1.0, 0.0), OutOfDomainError);
  CHECK_THROWS_AS(eval_u(sol, sol.r_hi() + 1.0, 0.0), OutOfDomainError);
}

TEST_CASE("log u jets agree with finite differences in every region") {
  for (Cplx lam : {Cplx(1.0, 0.0), Cplx(1.0, 0.5)}) {
    for (Mode mode : {Mode::MeshN, Mode::MeshP}) {
      const AnnulusSolution sol = make_sol(lam, mode);
      const double rho = sol.params.rho, s = sol.s, T = sol.profile.T;
      // Single-piece interior points plus well-conditioned plateau points.
      const double cs[] = {0.2, 1.0, 2.5, 3.5, 5.0, 5.8};
      for (double c : cs) {
        const double r = rho + c * s;
        const double phi = pick_phi(sol, r, 0.45 * T);
        const double hr = 2e-6 * r, hp = 5e-5 * T;
        const Jet2 j = eval_u(sol, r, phi).log_u;
        // Difference the O(1) ratio u/u(center) rather than log u: the logs
        // of two-piece combinations carry principal-branch jumps.
        auto R = [&](double x, double y) {
          return std::exp(eval_u(sol, x, y).log_u.v - j.v);
        };
        auto Fr = [&](double x) { return R(x, phi); };
        auto Fp = [&](double y) { return R(r, y); };
        const double sr = sol.params.n / r, sp = sol.params.n;
        const Cplx jrr = j.rr + j.r * j.r;
        const Cplx jpp = j.pp + j.p * j.p;
        const Cplx jrp = j.rp + j.r * j.p;
        CHECK(std::abs(oracle::fd1(Fr, r, hr) - j.r) <=
              1e-6 * (std::abs(j.r) + 0.05 * sr));
        CHECK(std::abs(oracle::fd1(Fp, phi, hp) - j.p) <=
              1e-6 * (std::abs(j.p) + 0.05 * sp));
        CHECK(std::abs(oracle::fd2(Fr, r, hr) - jrr) <=
              1e-4 * (std::abs(jrr) + 0.01 * sr * sr));
        CHECK(std::abs(oracle::fd2(Fp, phi, hp) - jpp) <=
              1e-4 * (std::abs(jpp) + 0.01 * sp * sp));
        CHECK(std::abs(oracle::fd_mixed(R, r, phi, hr, hp) - jrp) <=
              1e-4 * (std::abs(jrp) + 0.01 * sr * sp));
      }
    }
  }
}

TEST_CASE("potential matches the closed forms in gradient-free mode") {
  for (Cplx lam : {Cplx(1.0, 0.0), Cplx(1.0, 0.5)}) {
    const AnnulusSolution sol = make_sol(lam, Mode::MeshN);
    const double rho = sol.params.rho, s = sol.s, T = sol.profile.T;
    const double n = sol.params.n, k = sol.params.k;

    // Step-1 plateau, window angle: both pieces carry residual J1, so V = J1.
    {
      const double r = rho + s;
      const double phi = sol.profile.phi_m(3) + 0.05 * T;
      const Cplx V = eval_potential(sol, r, phi).V;
      CHECK(std::abs(V - closed::J1(sol, r)) <= 1e-9 * std::abs(V));
    }
    // Step-1 plateau, sector angle: per-piece residuals are J1 and J1 + K1.
    {
      const double r = rho + 1.1 * s;
      const double phi = pick_phi(sol, r, 0.45 * T);
      const AnnulusEval ev = eval_u(sol, r, phi);
      REQUIRE(ev.npieces == 2);
      for (int i = 0; i < 2; ++i) {
        const Cplx q = lap_quotient(ev.piece[i], r) + lam;
        const bool is_u1 = std::abs(ev.piece[i].p - Cplx(0.0, -n)) < 1.0;
        const Cplx want = is_u1 ? closed::J1(sol, r)
                                : closed::J1(sol, r) + closed::K1(sol, r, phi);
        CHECK(std::abs(q - want) <= 1e-9 * (std::abs(want) + 1.0));
      }
    }
    // Step 2: V = D2, including inside the cutoff transition.
    for (double c : {2.2, 2.5, 2.9}) {
      const double r = rho + c * s;
      for (double phi : {0.1 * T, 0.43 * T}) {
        const Cplx V = eval_potential(sol, r, phi).V;
        const Cplx want = closed::D2(sol, r, phi);
        CHECK(std::abs(V - want) <= 1e-9 * (std::abs(want) + 1.0));
      }
    }
    // Step 3: V = D3 (phi-independent).
    for (double c : {3.2, 3.5, 3.9}) {
      const double r = rho + c * s;
      const Cplx V = eval_potential(sol, r, 1.1).V;
      const Cplx want = closed::D3(sol, r);
      CHECK(std::abs(V - want) <= 1e-9 * (std::abs(want) + 1.0));
    }
    // Step-4 plateau: both pieces carry residual J4, so V = J4 for any phi.
    {
      const double r = rho + 5.0 * s;
      const Cplx V = eval_potential(sol, r, 2.7).V;
      CHECK(std::abs(V - closed::J4(sol, r)) <= 1e-9 * (std::abs(V) + 1.0));
    }
  }
}

TEST_CASE("drift coefficients match the closed-form systems") {
  const Cplx lam(1.0, 0.0);
  const AnnulusSolution sol = make_sol(lam, Mode::MeshP);
  const double rho = sol.params.rho, s = sol.s, T = sol.profile.T;
  const double n = sol.params.n, k = sol.params.k;

  // Step-1 plateau: 2x2 system with rows (j1(0), -j2(0)) and
  // (j1(2), j2(2) + jt2), right-hand sides J1a(0) and J1a(2) + K1.
  for (double phi0 : {0.08 * T, 0.45 * T}) {
    const double r = rho + s;
    const double phi = pick_phi(sol, r, phi0);
    const PotentialValue w = eval_potential(sol, r, phi);
    REQUIRE(!w.fallback);
    const Cplx a11 = closed::j1(sol, 0.0, r), a12 = -closed::j2(sol, 0.0, r);
    const Cplx a21 = closed::j1(sol, 2.0, r),
               a22 = closed::j2(sol, 2.0, r) + closed::jt2(sol, r, phi);
    const Cplx b1 = closed::J1a(sol, 0.0, r);
    const Cplx b2 = closed::J1a(sol, 2.0, r) + closed::K1(sol, r, phi);
    const Cplx det = a11 * a22 - a12 * a21;
    const Cplx w1 = (b1 * a22 - a12 * b2) / det;
    const Cplx w2 = (a11 * b2 - b1 * a21) / det;
    CHECK(std::abs(w.w1 - w1) <= 1e-8 * (std::abs(w1) + 1.0));
    CHECK(std::abs(w.w2 - w2) <= 1e-8 * (std::abs(w2) + 1.0));
  }
  // Steps 2 and 3: least-norm solve of w1 u_r/u - i w2 u_phi/(r u) = D.
  // The solution is the conjugate-gradient direction, so w1 conj(c2) =
  // w2 conj(c1); both facts pin it uniquely.
  const auto check_least_norm = [&](double r, double phi, Cplx D) {
    const PotentialValue w = eval_potential(sol, r, phi);
    const AnnulusEval ev = eval_u(sol, r, phi);
    const Cplx c1 = ev.log_u.r, c2 = Cplx(0.0, -1.0) * ev.log_u.p / r;
    const double scale = std::abs(D) + 1.0;
    CHECK(std::abs(w.w1 * c1 + w.w2 * c2 - D) <= 1e-8 * scale);
    CHECK(std::abs(w.w1 * std::conj(c2) - w.w2 * std::conj(c1)) <=
          1e-8 * (std::abs(w.w1) + std::abs(w.w2)));
    const Cplx lsq = D / (std::norm(c1) + std::norm(c2));
    CHECK(std::abs(w.w1 - std::conj(c1) * lsq) <= 1e-8 * scale);
    CHECK(std::abs(w.w2 - std::conj(c2) * lsq) <= 1e-8 * scale);
  };
  for (double c : {2.2, 2.5, 2.9}) {
    const double r = rho + c * s;
    const double phi = 0.43 * T;
    check_least_norm(r, phi, closed::D2(sol, r, phi));
  }
  for (double c : {3.2, 3.5}) {
    const double r = rho + c * s;
    check_least_norm(r, 0.9, closed::D3(sol, r));
  }
  // Single-piece zones: tangential solve against the pure-state residual.
  {
    const double r = rho + 0.2 * s;  // u1 alone
    const PotentialValue w = eval_potential(sol, r, 1.7);
    const Cplx want = -r * closed::J1a(sol, 0.0, r) / n;
    CHECK(std::abs(w.w2 - want) <= 1e-10 * (std::abs(want) + 1.0));
  }
  {
    const double r = rho + 4.2 * s;  // u4 alone
    const PotentialValue w = eval_potential(sol, r, 1.7);
    const Cplx want = r * closed::J1a(sol, -2.0, r) / (n + 2.0 * k);
    CHECK(std::abs(w.w2 - want) <= 1e-10 * (std::abs(want) + 1.0));
  }
  {
    const double r = rho + 5.8 * s;  // u5 alone
    const PotentialValue w = eval_potential(sol, r, 1.7);
    const Cplx want = -r * closed::J1a(sol, -1.0, r) / (n + k);
    CHECK(std::abs(w.w2 - want) <= 1e-10 * (std::abs(want) + 1.0));
  }
  // Cartesian components recombine the polar fields.
  {
    const double r = rho + 2.5 * s;
    const double phi = 0.7;
    const PotentialValue w = eval_potential(sol, r, phi);
    CHECK(w.W1 == w.w1 * std::cos(phi) + w.w2 * Cplx(0.0, 1.0) * std::sin(phi));
    CHECK(w.W2 == w.w1 * std::sin(phi) - w.w2 * Cplx(0.0, 1.0) * std::cos(phi));
  }
}

TEST_CASE("angular maximum stays under the explicit envelope") {
  for (Mode mode : {Mode::MeshN, Mode::MeshP}) {
    const AnnulusSolution sol = make_sol(Cplx(1.0, 0.0), mode);
    for (double c : {0.05, 0.5, 1.0, 1.6, 2.4, 3.5, 4.2, 5.0, 5.8}) {
      const double r = sol.params.rho + c * sol.s;
      CHECK(log_m(sol, r) <= envelope_log_M(sol, r) + 1e-9);
    }
  }
}

TEST_CASE("each annulus strictly decreases the angular maximum") {
  for (Mode mode : {Mode::MeshN, Mode::MeshP, Mode::MeshNX}) {
    const AnnulusSolution sol = make_sol(Cplx(1.0, 0.0), mode);
    CHECK(decay_increment(sol) < 0.0);
  }
  const AnnulusSolution solc = make_sol(Cplx(1.0, 0.5), Mode::MeshN);
  CHECK(decay_increment(solc) < 0.0);
}

TEST_CASE("mesh-nx builds and evaluates through the oscillatory regime") {
  const AnnulusSolution sol = make_sol(Cplx(1.0, 0.0), Mode::MeshNX);
  for (double c : {0.0, 1.0, 2.5, 3.5, 5.0, 6.0}) {
    const double r = sol.params.rho + c * sol.s;
    const AnnulusEval ev = eval_u(sol, r, 0.8);
    CHECK(ev.u.finite());
    const Cplx V = eval_potential(sol, r, 0.8).V;
    CHECK(std::isfinite(std::abs(V)));
  }
}
