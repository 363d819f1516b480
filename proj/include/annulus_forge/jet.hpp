#pragma once

#include <cmath>

#include "annulus_forge/branch.hpp"

namespace aforge {

// Second-order jet of a complex-valued function of polar coordinates (r, phi):
// value plus first and second partial derivatives. Fields: v, r, p, rr, rp, pp
// where `p` differentiates in phi.
struct Jet2 {
  Cplx v{};
  Cplx r{};
  Cplx p{};
  Cplx rr{};
  Cplx rp{};
  Cplx pp{};

  friend Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.v + b.v, a.r + b.r, a.p + b.p, a.rr + b.rr, a.rp + b.rp, a.pp + b.pp};
  }
  friend Jet2 operator-(const Jet2& a, const Jet2& b) {
    return {a.v - b.v, a.r - b.r, a.p - b.p, a.rr - b.rr, a.rp - b.rp, a.pp - b.pp};
  }
  Jet2 operator-() const { return {-v, -r, -p, -rr, -rp, -pp}; }
  Jet2& operator+=(const Jet2& o) { return *this = *this + o; }
  Jet2& operator-=(const Jet2& o) { return *this = *this - o; }

  friend Jet2 operator*(Cplx c, const Jet2& a) {
    return {c * a.v, c * a.r, c * a.p, c * a.rr, c * a.rp, c * a.pp};
  }
  friend Jet2 operator*(const Jet2& a, Cplx c) { return c * a; }

  // Leibniz rule.
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 o;
    o.v = a.v * b.v;
    o.r = a.r * b.v + a.v * b.r;
    o.p = a.p * b.v + a.v * b.p;
    o.rr = a.rr * b.v + 2.0 * a.r * b.r + a.v * b.rr;
    o.rp = a.rp * b.v + a.r * b.p + a.p * b.r + a.v * b.rp;
    o.pp = a.pp * b.v + 2.0 * a.p * b.p + a.v * b.pp;
    return o;
  }
};

inline Jet2 jet_const(Cplx c) { return {c, 0.0, 0.0, 0.0, 0.0, 0.0}; }

// Jet of a function of r only, given its value and first two derivatives.
inline Jet2 jet_radial(Cplx f, Cplx df, Cplx ddf) {
  return {f, df, 0.0, ddf, 0.0, 0.0};
}

// Jet of a function of phi only.
inline Jet2 jet_angular(Cplx f, Cplx df, Cplx ddf) {
  return {f, 0.0, df, 0.0, 0.0, ddf};
}

inline Jet2 jet_log_r(double r) {
  return jet_radial(std::log(r), 1.0 / r, -1.0 / (r * r));
}

inline Jet2 jet_exp(const Jet2& a) {
  const Cplx e = std::exp(a.v);
  Jet2 o;
  o.v = e;
  o.r = e * a.r;
  o.p = e * a.p;
  o.rr = e * (a.rr + a.r * a.r);
  o.rp = e * (a.rp + a.r * a.p);
  o.pp = e * (a.pp + a.p * a.p);
  return o;
}

// Principal-branch log of a jet with nonvanishing value.
inline Jet2 jet_log(const Jet2& a) {
  const Cplx iv = 1.0 / a.v;
  Jet2 o;
  o.v = principal_log(a.v);
  o.r = a.r * iv;
  o.p = a.p * iv;
  o.rr = a.rr * iv - o.r * o.r;
  o.rp = a.rp * iv - o.r * o.p;
  o.pp = a.pp * iv - o.p * o.p;
  return o;
}

// For L = log u, returns (Delta u)/u in polar coordinates.
inline Cplx lap_quotient(const Jet2& L, double r) {
  return L.rr + L.r * L.r + L.r / r + (L.pp + L.p * L.p) / (r * r);
}

// log(1 + exp(D)) as a jet; D must have Re(D.v) <= 0 so exp(D) is the
// subdominant ratio. `floor` is the conditioning threshold on |1 + exp(D)|.
inline Jet2 jet_log1p_exp(const Jet2& D, double floor_rel) {
  const Cplx s = std::exp(D.v);
  const Cplx den = 1.0 + s;
  if (std::abs(den) < floor_rel * (1.0 + std::abs(s))) {
    throw EvalError("two-piece combination vanishes beyond conditioning floor");
  }
  const Cplx g = s / den;
  const Cplx h = g * (1.0 - g);
  Jet2 o;
  o.v = std::log(den);  // principal; correction term, not required continuous
  o.r = g * D.r;
  o.p = g * D.p;
  o.rr = g * D.rr + h * D.r * D.r;
  o.rp = g * D.rp + h * D.r * D.p;
  o.pp = g * D.pp + h * D.p * D.p;
  return o;
}

}  // namespace aforge
