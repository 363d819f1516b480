#include <doctest.h>

#include "annulus_forge/mu.hpp"
#include "oracles.hpp"

using namespace aforge;

TEST_CASE("mu is exactly 1 at lambda = 0") {
  for (double r : {0.5, 1.0, 100.0, 4000.0}) {
    for (double n : {1.0, 17.0, 800.0, 1e6}) {
      const LogComplex m = mu({n, Cplx(0.0, 0.0)}, r, BranchPolicy::Strict);
      CHECK(m.logmod == 0.0);
      CHECK(m.phase == 0.0);
      const Jet2 j = mu_log_jet({n, Cplx(0.0, 0.0)}, r, BranchPolicy::Strict);
      CHECK(j.v == Cplx(0.0, 0.0));
      CHECK(j.r == Cplx(0.0, 0.0));
      CHECK(j.rr == Cplx(0.0, 0.0));
    }
  }
}

TEST_CASE("log mu matches its small-parameter series") {
  // log mu = lambda r^2/(4n) + lambda^2 r^4/(32 n^3) + lambda^3 r^6/(96 n^5) + ...
  const double n = 2e4, r = 632.0;
  for (Cplx lam : {Cplx(1.0, 0.0), Cplx(1.0, 0.5), Cplx(-0.7, 0.2)}) {
    const Cplx lr2 = lam * r * r;
    const Cplx series = lr2 / (4.0 * n) + lr2 * lr2 / (32.0 * n * n * n) +
                        lr2 * lr2 * lr2 / (96.0 * std::pow(n, 5));
    const Cplx got = n * mu_exponent({n, lam}, r, BranchPolicy::Strict);
    CHECK(std::abs(got - series) <= 1e-10 * std::abs(series));
  }
}

TEST_CASE("log mu equals the quadrature of its derivative formula") {
  // d/dr log mu = (n/r)(1 - w); acceptance criterion at (lambda=1, n=800).
  const double n = 800.0;
  const Cplx lam(1.0, 0.0);
  auto dlog = [&](double r) {
    const Cplx w = mu_sqrt_term({n, lam}, r, BranchPolicy::Strict);
    return (n / r) * (1.0 - w);
  };
  const LogComplex lo = mu({n, lam}, 400.0, BranchPolicy::Strict);
  for (double r : {430.0, 470.0, 520.0}) {
    const Cplx integral = oracle::integrate(dlog, 400.0, r, 1e-13);
    const LogComplex hi = mu({n, lam}, r, BranchPolicy::Strict);
    const Cplx diff(hi.logmod - lo.logmod, hi.phase - lo.phase);
    CHECK(std::abs(diff - integral) <= 1e-10 * std::abs(diff));
  }
}

TEST_CASE("mu_log_jet derivatives match finite differences") {
  for (Cplx lam : {Cplx(1.0, 0.0), Cplx(1.0, 0.5)}) {
    const double n = 800.0;
    auto f = [&](double r) {
      return mu_log_jet({n, lam}, r, BranchPolicy::Strict).v;
    };
    for (double r : {410.0, 460.0, 515.0}) {
      const Jet2 j = mu_log_jet({n, lam}, r, BranchPolicy::Strict);
      CHECK(std::abs(oracle::fd1(f, r, 1e-3 * r) - j.r) <=
            1e-9 * (1.0 + std::abs(j.r)));
      CHECK(std::abs(oracle::fd2(f, r, 1e-3 * r) - j.rr) <=
            1e-7 * (1.0 + std::abs(j.rr)));
    }
  }
}

TEST_CASE("strict policy rejects radicands on the negative real ray") {
  CHECK_THROWS_AS(mu_sqrt_term({10.0, Cplx(1.0, 0.0)}, 11.0, BranchPolicy::Strict),
                  DomainError);
  CHECK_THROWS_AS(mu_sqrt_term({10.0, Cplx(1.0, 0.0)}, 10.0, BranchPolicy::Strict),
                  DomainError);
  // Non-real lambda keeps the radicand off the cut even with |x| > 1.
  const Cplx w = mu_sqrt_term({10.0, Cplx(0.0, 2.0)}, 10.0, BranchPolicy::Strict);
  CHECK(w.real() > 0.0);
}

TEST_CASE("negative-real policy continues through the cut from the +i side") {
  // Radicand 1 - lambda r^2/n^2 < 0: w must land on the +i axis.
  const MuParams p{10.0, Cplx(1.0, 0.0)};
  const Cplx w = mu_sqrt_term(p, 20.0, BranchPolicy::AllowNegativeReal);
  CHECK(w.real() == doctest::Approx(0.0));
  CHECK(w.imag() == doctest::Approx(std::sqrt(3.0)));
  // Policy requires real positive lambda.
  CHECK_THROWS_AS(
      mu_sqrt_term({10.0, Cplx(1.0, 0.1)}, 20.0, BranchPolicy::AllowNegativeReal),
      DomainError);
  // log mu stays finite and its jet matches FD across the oscillatory regime.
  auto f = [&](double r) {
    return mu_log_jet(p, r, BranchPolicy::AllowNegativeReal).v;
  };
  for (double r : {15.0, 25.0, 40.0}) {
    const Jet2 j = mu_log_jet(p, r, BranchPolicy::AllowNegativeReal);
    CHECK(std::isfinite(j.v.real()));
    CHECK(std::abs(oracle::fd1(f, r, 1e-4 * r) - j.r) <=
          1e-8 * (1.0 + std::abs(j.r)));
    CHECK(std::abs(oracle::fd2(f, r, 1e-4 * r) - j.rr) <=
          1e-6 * (1.0 + std::abs(j.rr)));
  }
}

TEST_CASE("phi_ab at lambda = 0 is a constant with vanishing derivatives") {
  const Jet2 j = phi_ab(800.0, 560.0, Cplx(0.0, 0.0), 450.0, BranchPolicy::Strict);
  CHECK(j.r == Cplx(0.0, 0.0));
  CHECK(j.rr == Cplx(0.0, 0.0));
  CHECK(std::isfinite(j.v.real()));
  // Degenerate a = b hits the branch point of the log argument.
  CHECK_THROWS_AS(phi_ab(800.0, 800.0, Cplx(0.0, 0.0), 450.0, BranchPolicy::Strict),
                  DomainError);
}

TEST_CASE("phi_ab jet matches finite differences and the integrand formula") {
  const double a = 800.0, b = 560.0;
  for (Cplx lam : {Cplx(1.0, 0.0), Cplx(1.0, 0.5)}) {
    auto f = [&](double r) {
      return phi_ab(a, b, lam, r, BranchPolicy::Strict).v;
    };
    for (double r : {405.0, 450.0, 510.0}) {
      const Jet2 j = phi_ab(a, b, lam, r, BranchPolicy::Strict);
      // phi' = -(lambda r/2)/(sa sb), the defining integrand.
      const Cplx sa = std::sqrt(a * a - lam * r * r);
      const Cplx sb = std::sqrt(b * b - lam * r * r);
      CHECK(std::abs(j.r - (-(lam * r / 2.0) / (sa * sb))) <=
            1e-14 * std::abs(j.r));
      CHECK(std::abs(oracle::fd1(f, r, 1e-3 * r) - j.r) <=
            1e-9 * (1.0 + std::abs(j.r)));
      CHECK(std::abs(oracle::fd2(f, r, 1e-3 * r) - j.rr) <=
            1e-7 * (1.0 + std::abs(j.rr)));
    }
  }
}
