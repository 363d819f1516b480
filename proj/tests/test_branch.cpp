#include <doctest.h>

#include "annulus_forge/branch.hpp"

using namespace aforge;

TEST_CASE("wrap_pi maps angles to (-pi, pi]") {
  CHECK(wrap_pi(0.0) == 0.0);
  CHECK(wrap_pi(kPi) == doctest::Approx(kPi));
  CHECK(wrap_pi(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_pi(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_pi(2.0 * kPi + 0.25) == doctest::Approx(0.25));
  CHECK(wrap_pi(-7.0) == doctest::Approx(-7.0 + 2.0 * kPi));
}

TEST_CASE("canonical_branch flips -0.0 imaginary parts to the +i side") {
  const Cplx z(-4.0, -0.0);
  CHECK(std::sqrt(z).imag() < 0.0);  // raw libstdc++ behavior: lower side
  const Cplx s = principal_sqrt(z);
  CHECK(s.imag() == doctest::Approx(2.0));
  CHECK(s.real() == doctest::Approx(0.0));
  CHECK(principal_log(z).imag() == doctest::Approx(kPi));
}

TEST_CASE("principal_sqrt agrees with the polar-form oracle") {
  const Cplx zs[] = {{3.0, 4.0}, {-3.0, 4.0}, {-3.0, -4.0}, {0.25, -1.0},
                     {-9.0, 0.0}, {1e8, -2e7}};
  for (Cplx z : zs) {
    const double m = std::abs(z);
    double a = std::atan2(z.imag(), z.real() == 0.0 ? z.real() : z.real());
    if (z.imag() == 0.0 && z.real() < 0.0) a = kPi;  // +i side of the cut
    const Cplx want = std::sqrt(m) * Cplx(std::cos(a / 2.0), std::sin(a / 2.0));
    const Cplx got = principal_sqrt(z);
    CHECK(std::abs(got - want) <= 1e-12 * std::sqrt(m));
    CHECK(std::abs(got * got - canonical_branch(z)) <= 1e-12 * m);
  }
}

TEST_CASE("guard_branch rejects branch-point and cut-hugging arguments") {
  CHECK_THROWS_AS(guard_branch(Cplx(0.0, 0.0), 1.0, "t"), DomainError);
  CHECK_THROWS_AS(guard_branch(Cplx(1e-15, 0.0), 1.0, "t"), DomainError);
  CHECK_THROWS_AS(guard_branch(Cplx(-1.0, 1e-14), 1.0, "t"), DomainError);
  CHECK(guard_branch(Cplx(-1.0, 0.0), 1.0, "t") == Cplx(-1.0, 0.0));
  CHECK(guard_branch(Cplx(2.0, -1.0), 1.0, "t") == Cplx(2.0, -1.0));
}

TEST_CASE("LogComplex round-trips and composes multiplicatively") {
  const Cplx z(3.0, -4.0), w(-1.0, 2.0);
  const LogComplex lz = LogComplex::from_cplx(z), lw = LogComplex::from_cplx(w);
  CHECK(std::abs(lz.to_cplx() - z) <= 1e-14 * std::abs(z));
  CHECK(std::abs((lz * lw).to_cplx() - z * w) <= 1e-13 * std::abs(z * w));
  CHECK(std::abs((lz / lw).to_cplx() - z / w) <= 1e-13 * std::abs(z / w));

  LogComplex acc = lz;
  acc *= lw;
  CHECK(acc.logmod == doctest::Approx((lz * lw).logmod));
  CHECK(acc.phase == doctest::Approx((lz * lw).phase));

  CHECK_THROWS_AS(LogComplex::from_cplx(Cplx(0.0, 0.0)), DomainError);
  CHECK_THROWS_AS((LogComplex{710.0, 0.0}).to_cplx(), EvalError);
  CHECK((LogComplex{-5000.0, 1.0}).to_cplx() == Cplx(0.0, 0.0));  // underflow ok
}

TEST_CASE("log_rel_diff measures modulus ratio and wrapped phase gap") {
  const LogComplex a{2.0, 0.1};
  CHECK(log_rel_diff(a, a) == 0.0);
  CHECK(log_rel_diff(a, {2.0, 0.1 + 2.0 * kPi}) <= 1e-12);
  CHECK(log_rel_diff(a, {2.0 + 3e-10, 0.1 + 4e-10}) == doctest::Approx(5e-10));
  CHECK(log_rel_diff(a, {3.0, 0.1}) == doctest::Approx(1.0));
}
