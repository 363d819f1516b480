#pragma once

// Independent numeric oracles used only by the tests: adaptive quadrature and
// Richardson-extrapolated finite differences.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "annulus_forge/jet.hpp"

namespace oracle {

using aforge::Cplx;

// Adaptive Simpson quadrature.
inline Cplx simpson(const std::function<Cplx(double)>& f, double a, double b,
                    Cplx fa, Cplx fm, Cplx fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const Cplx flm = f(lm), frm = f(rm);
  const Cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const Cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const Cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

inline Cplx integrate(const std::function<Cplx(double)>& f, double a, double b,
                      double tol = 1e-12) {
  const Cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, tol, 48);
}

// Richardson-extrapolated central first derivative.
inline Cplx fd1(const std::function<Cplx(double)>& f, double x, double h) {
  auto d = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

// Richardson-extrapolated central second derivative.
inline Cplx fd2(const std::function<Cplx(double)>& f, double x, double h) {
  auto d = [&](double hh) {
    return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh);
  };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

// Richardson-extrapolated mixed second derivative d^2/dxdy via nested
// central differences.
inline Cplx fd_mixed(const std::function<Cplx(double, double)>& f, double x,
                     double y, double hx, double hy) {
  auto d = [&](double ax, double ay) {
    auto gy = [&](double xx) {
      return (f(xx, y + ay) - f(xx, y - ay)) / (2.0 * ay);
    };
    return (gy(x + ax) - gy(x - ax)) / (2.0 * ax);
  };
  return (4.0 * d(0.5 * hx, 0.5 * hy) - d(hx, hy)) / 3.0;
}

// Deterministic uniform double in [0, 1).
inline double unit(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace oracle
