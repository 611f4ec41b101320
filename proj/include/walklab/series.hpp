#pragma once

// Growth series as integer-coefficient rational functions, their composition
// under free and direct products, and growth-rate extraction by certified
// root isolation (exact integer sign evaluation at rational points, so the
// result is reproducible bit for bit).

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "walklab/group.hpp"

namespace walklab {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

struct Poly {
  std::vector<BigInt> c;  // c[i] multiplies z^i; normalized: no trailing zeros

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  int degree() const { return static_cast<int>(c.size()) - 1; }
  BigInt at(std::size_t i) const { return i < c.size() ? c[i] : BigInt(0); }
  bool is_zero() const { return c.empty(); }

  static Poly constant(long v) {
    Poly p;
    if (v != 0) p.c.push_back(v);
    return p;
  }
};

inline Poly operator+(const Poly& a, const Poly& b) {
  Poly r;
  r.c.resize(std::max(a.c.size(), b.c.size()));
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.at(i) + b.at(i);
  r.trim();
  return r;
}

inline Poly operator-(const Poly& a, const Poly& b) {
  Poly r;
  r.c.resize(std::max(a.c.size(), b.c.size()));
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.at(i) - b.at(i);
  r.trim();
  return r;
}

inline Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  if (a.is_zero() || b.is_zero()) return r;
  r.c.assign(a.c.size() + b.c.size() - 1, BigInt(0));
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  r.trim();
  return r;
}

// Sign of P(p/q) for q > 0: evaluates sum c_i p^i q^(d-i) exactly.
inline int sign_at(const Poly& P, const BigInt& p, const BigInt& q) {
  if (P.is_zero()) return 0;
  const int d = P.degree();
  BigInt acc = 0;
  BigInt pk = 1;
  std::vector<BigInt> qpow(d + 1);
  qpow[0] = 1;
  for (int i = 1; i <= d; ++i) qpow[i] = qpow[i - 1] * q;
  for (int i = 0; i <= d; ++i) {
    acc += P.c[i] * pk * qpow[d - i];
    pk *= p;
  }
  if (acc > 0) return 1;
  if (acc < 0) return -1;
  return 0;
}

struct RationalSeries {
  Poly num;
  Poly den;  // constant term normalized to 1

  void normalize() {
    num.trim();
    den.trim();
    if (den.is_zero()) throw ConfigError("rational series with zero denominator");
    if (den.c[0] == 0) throw ConfigError("rational series denominator must not vanish at 0");
    if (den.c[0] < 0) {
      for (auto& v : num.c) v = -v;
      for (auto& v : den.c) v = -v;
    }
    // reduce by integer content
    BigInt g = 0;
    for (const auto& v : num.c) g = boost::multiprecision::gcd(g, v);
    for (const auto& v : den.c) g = boost::multiprecision::gcd(g, v);
    if (g > 1) {
      for (auto& v : num.c) v /= g;
      for (auto& v : den.c) v /= g;
    }
    if (den.c[0] != 1)
      throw ConfigError("rational series denominator constant term must be 1");
  }

  // Taylor coefficients a_0..a_n via the linear recurrence
  // a_n = num_n - sum_{k>=1} den_k a_{n-k}.
  std::vector<BigInt> taylor(int n) const {
    std::vector<BigInt> a(n + 1, BigInt(0));
    for (int i = 0; i <= n; ++i) {
      BigInt v = num.at(i);
      for (int k = 1; k <= den.degree() && k <= i; ++k) v -= den.c[k] * a[i - k];
      a[i] = v;
    }
    return a;
  }
};

// Growth series of a single free or finite factor.
inline RationalSeries factor_series(const Group& g) {
  RationalSeries s;
  if (g.kind() == Group::Kind::Free) {
    const int k = g.free_rank();
    s.num.c = {BigInt(1), BigInt(1)};
    s.den.c = {BigInt(1), BigInt(-(2 * k - 1))};
  } else if (g.kind() == Group::Kind::Finite) {
    const FiniteData& fd = g.finite_data();
    s.num.c.assign(fd.diameter + 1, BigInt(0));
    for (int i = 0; i < fd.order; ++i) s.num.c[fd.len[i]] += 1;
    s.den.c = {BigInt(1)};
  } else {
    throw ConfigError("factor_series: factor must be free or finite");
  }
  s.normalize();
  return s;
}

// Sphere-count series of a free product from the factor series:
// F = F1*F2 / (1 - (F1-1)(F2-1)).
inline RationalSeries free_product_series(const RationalSeries& f1, const RationalSeries& f2) {
  RationalSeries s;
  s.num = f1.num * f2.num;
  s.den = f1.den * f2.den - (f1.num - f1.den) * (f2.num - f2.den);
  s.normalize();
  return s;
}

// Word length on a direct product with the union generating set adds over the
// parts, so the series multiply.
inline RationalSeries direct_with_finite_series(const RationalSeries& fin,
                                                const RationalSeries& base) {
  RationalSeries s;
  s.num = fin.num * base.num;
  s.den = fin.den * base.den;
  s.normalize();
  return s;
}

inline RationalSeries group_series(const Group& g) {
  switch (g.kind()) {
    case Group::Kind::Free:
    case Group::Kind::Finite:
      return factor_series(g);
    case Group::Kind::FreeProduct: {
      const auto& fs = g.factors();
      RationalSeries s = factor_series(fs[0]);
      for (std::size_t i = 1; i < fs.size(); ++i)
        s = free_product_series(s, factor_series(fs[i]));
      return s;
    }
    case Group::Kind::DirectWithFinite:
      return direct_with_finite_series(factor_series(g.dwf_finite()),
                                       group_series(g.dwf_base()));
  }
  throw ConfigError("group_series: unsupported group");
}

struct GrowthReport {
  double v = 0.0;
  double zstar = 1.0;
  // Certified bracket around the smallest positive denominator root, as exact
  // rationals lo/scale, hi/scale.
  BigInt bracket_lo = 0, bracket_hi = 0, bracket_scale = 1;
  bool polynomial_growth = false;
  std::string flag;
  std::vector<BigInt> sphere;  // Card S^n
  std::vector<BigInt> ball;    // Card B_n
  std::vector<double> log_rate;  // log(Card B_n)/n
};

// Smallest positive root of the denominator in (0,1], certified by exact sign
// brackets: a 1e-4 grid scan followed by dyadic bisection. v = -log z*.
inline GrowthReport growth_rate(const RationalSeries& series, int table_n = 40) {
  GrowthReport rep;
  const int N = std::max(table_n, 1);
  rep.sphere = series.taylor(N);
  for (const BigInt& c : rep.sphere)
    if (c < 0) throw ConfigError("growth_rate: series has a negative coefficient");
  rep.ball.resize(rep.sphere.size());
  BigInt run = 0;
  for (std::size_t i = 0; i < rep.sphere.size(); ++i) {
    run += rep.sphere[i];
    rep.ball[i] = run;
  }
  rep.log_rate.assign(rep.ball.size(), 0.0);
  for (std::size_t i = 1; i < rep.ball.size(); ++i)
    rep.log_rate[i] = std::log(rep.ball[i].convert_to<double>()) / static_cast<double>(i);

  const Poly& D = series.den;
  if (D.degree() < 1) {
    rep.polynomial_growth = true;
    rep.flag = "polynomial growth data insufficient";
    rep.v = 0.0;
    rep.zstar = 1.0;
    return rep;
  }

  const long SCAN = 10000;
  long hit = -1;
  int hit_sign = 1;
  for (long j = 1; j <= SCAN; ++j) {
    const int sg = sign_at(D, BigInt(j), BigInt(SCAN));
    if (sg <= 0) {
      hit = j;
      hit_sign = sg;
      break;
    }
  }
  if (hit < 0) {
    // No sign change in (0,1]: either the series is a polynomial in disguise
    // or the denominator root structure is outside this tool's scope.
    bool poly = true;
    for (std::size_t i = std::max<std::size_t>(series.num.c.size(), 1); i < rep.sphere.size(); ++i)
      if (rep.sphere[i] != 0) {
        poly = false;
        break;
      }
    if (poly) {
      rep.polynomial_growth = true;
      rep.flag = "polynomial growth data insufficient";
      rep.v = 0.0;
      rep.zstar = 1.0;
      return rep;
    }
    throw ConfigError("growth_rate: denominator has no sign change in (0,1]");
  }
  BigInt lo = hit - 1, hi = hit, scale = SCAN;
  if (hit_sign == 0) {
    lo = hit;  // exact root on the grid
  } else {
    for (int it = 0; it < 64; ++it) {
      const BigInt mid = lo + hi;  // midpoint of [2lo, 2hi] at doubled scale
      const BigInt s2 = scale * 2;
      const int sg = sign_at(D, mid, s2);
      lo *= 2;
      hi *= 2;
      scale = s2;
      if (sg == 0) {
        lo = hi = mid;
        break;
      }
      if (sg > 0)
        lo = mid;
      else
        hi = mid;
    }
  }
  rep.bracket_lo = lo;
  rep.bracket_hi = hi;
  rep.bracket_scale = scale;
  if (lo == scale && hi == scale) {
    // Root exactly at 1: the ball counts grow subexponentially.
    rep.polynomial_growth = true;
    rep.flag = "denominator root at 1: subexponential growth";
    rep.zstar = 1.0;
    rep.v = 0.0;
    return rep;
  }
  rep.zstar = BigRat(lo + hi, scale * 2).convert_to<double>();
  rep.v = -std::log(rep.zstar);
  return rep;
}

struct EmpiricalGrowth {
  std::vector<BigInt> ball;
  std::vector<double> log_rate;
};

// Exact ball counts by enumeration, with the log-rate column converging to v
// from above.
inline EmpiricalGrowth empirical_growth(const Group& g, int n_max, std::int64_t cap) {
  EmpiricalGrowth out;
  const auto levels = g.spheres_up_to(n_max, cap);
  BigInt run = 0;
  for (int n = 0; n <= n_max; ++n) {
    run += static_cast<long>(levels[n].size());
    out.ball.push_back(run);
    out.log_rate.push_back(n == 0 ? 0.0
                                  : std::log(out.ball.back().convert_to<double>()) / n);
  }
  return out;
}

}  // namespace walklab
