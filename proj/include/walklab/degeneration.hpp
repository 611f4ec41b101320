// Degeneration laboratory: splitting a measure into a dominant elementary
// part and a rare part, the induced block-jump measure, and the exact decay
// tables (finite-group mixing, virtually cyclic sup-norms) behind the
// vanishing of h/l along degenerating families.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "walklab/measure.hpp"
#include "walklab/series.hpp"
#include "walklab/walk.hpp"

namespace walklab {

// ---- elementary-part detection ----

namespace detail {

inline std::vector<Element> dwf_base_parts(const std::vector<Element>& xs) {
  std::vector<Element> out;
  out.reserve(xs.size());
  for (const Element& x : xs) {
    Element b;
    b.t.assign(x.t.begin() + 1, x.t.end());
    out.push_back(std::move(b));
  }
  return out;
}

inline bool single_finite_factor(const Group& g, const std::vector<Element>& xs) {
  int common = -1;
  for (const Element& x : xs) {
    if (x.t.size() != 1) return false;
    const int f = x.t[0] / TOKEN_STRIDE;
    if (g.factors()[f].kind() != Group::Kind::Finite) return false;
    if (common >= 0 && f != common) return false;
    common = f;
  }
  return true;
}

inline std::vector<Element> drop_identity(const Group& g, std::vector<Element> xs) {
  std::vector<Element> out;
  for (Element& x : xs)
    if (!g.is_identity(x)) out.push_back(std::move(x));
  return out;
}

}  // namespace detail

inline bool generate_finite_subgroup(const Group& g, const std::vector<Element>& gens) {
  const std::vector<Element> xs = detail::drop_identity(g, gens);
  if (xs.empty()) return true;
  switch (g.kind()) {
    case Group::Kind::Finite:
      return true;
    case Group::Kind::Free:
      return false;  // torsion-free
    case Group::Kind::FreeProduct:
      return detail::single_finite_factor(g, xs);
    case Group::Kind::DirectWithFinite:
      return generate_finite_subgroup(g.dwf_base(), detail::dwf_base_parts(xs));
  }
  return false;
}

// Normal-form test for virtually cyclic (or finite) subgroups of the
// supported models. Pairwise commuting words generate an abelian subgroup,
// which in a free group or free product is cyclic or conjugate into a single
// factor; a set inside one finite factor is finite; and when the ambient
// group itself grows polynomially every subgroup qualifies.
inline bool generate_elementary_subgroup(const Group& g, const std::vector<Element>& gens) {
  const std::vector<Element> xs = detail::drop_identity(g, gens);
  if (xs.empty()) return true;
  if (g.kind() == Group::Kind::Finite) return true;
  if (g.kind() == Group::Kind::DirectWithFinite)
    return generate_elementary_subgroup(g.dwf_base(), detail::dwf_base_parts(xs));
  if (generate_finite_subgroup(g, xs)) return true;
  if (growth_rate(group_series(g)).polynomial_growth) return true;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (!(g.mul(xs[i], xs[j]) == g.mul(xs[j], xs[i]))) return false;
  return true;
}

// ---- decomposition mu = (1-eps) alpha + eps beta ----

struct SplitRule {
  std::vector<Element> heavy;  // explicit dominant support; empty selects the automatic rule
  double gap_threshold = 4.0;  // smallest accepted mass ratio between consecutive atoms
};

struct Decomposition {
  FinMeasure alpha, beta;
  double eps = 0.0;
  bool ok = false;
  bool degenerate = false;     // whole support elementary, nothing rare to split off
  bool finite_recipe = false;  // beta = (delta_e + beta0)/2 with the identity half borrowed from mu
  std::string note;
};

// Split off the rare part of a near-elementary measure. Identity mass is
// classified separately: it can sit in alpha, and when the heavy side
// generates a finite subgroup half of beta is placed at the identity (the
// equidistribution device for finite parts), funded by mu's own lazy mass.
// The advertised recipe cannot reproduce mu exactly when mu(e) falls short
// of the rare mass, so the identity mixing is skipped in that case and the
// note says so.
inline Decomposition decompose(const FinMeasure& mu, const SplitRule& rule = {}) {
  const Group& g = mu.group;
  Decomposition d{mu, mu};
  const Element e = g.identity_element();
  const double lazy = mu.mass_of(e);

  std::vector<std::pair<Element, double>> rest;
  for (const auto& a : mu.atoms)
    if (!(a.first == e)) rest.push_back(a);
  std::sort(rest.begin(), rest.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  if (rest.empty()) {
    d.degenerate = true;
    d.note = "measure is concentrated at the identity";
    return d;
  }

  std::vector<char> in_heavy(rest.size(), 0);
  if (!rule.heavy.empty()) {
    for (const Element& h : rule.heavy) {
      if (g.is_identity(h)) continue;
      bool found = false;
      for (std::size_t i = 0; i < rest.size(); ++i)
        if (rest[i].first == h) {
          in_heavy[i] = 1;
          found = true;
        }
      if (!found) throw ConfigError("explicit heavy element is not an atom of the measure");
    }
    std::vector<Element> heavy;
    for (std::size_t i = 0; i < rest.size(); ++i)
      if (in_heavy[i]) heavy.push_back(rest[i].first);
    if (heavy.empty()) throw ConfigError("explicit split has an empty heavy side");
    if (!generate_elementary_subgroup(g, heavy)) {
      d.note = "explicit heavy side is not elementary";
      return d;
    }
  } else {
    int best_k = -1;
    double best_gap = 0.0;
    for (std::size_t k = 1; k < rest.size(); ++k) {
      const double gap = rest[k - 1].second / rest[k].second;
      if (gap < rule.gap_threshold || gap <= best_gap) continue;
      std::vector<Element> prefix;
      for (std::size_t i = 0; i < k; ++i) prefix.push_back(rest[i].first);
      if (!generate_elementary_subgroup(g, prefix)) continue;
      best_k = static_cast<int>(k);
      best_gap = gap;
    }
    if (best_k < 0) {
      std::vector<Element> all;
      for (const auto& a : rest) all.push_back(a.first);
      if (generate_elementary_subgroup(g, all)) {
        d.degenerate = true;
        d.note = "measure is elementary: no rare side to split off";
      } else {
        d.note = "no elementary heavy side under the gap rule";
      }
      return d;
    }
    for (int i = 0; i < best_k; ++i) in_heavy[i] = 1;
  }

  KahanSum rare_sum;
  std::vector<Element> heavy_set;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (in_heavy[i])
      heavy_set.push_back(rest[i].first);
    else
      rare_sum.add(rest[i].second);
  }
  const double eps0 = rare_sum.value();
  if (eps0 <= 0.0) {
    d.degenerate = true;
    d.note = "measure is elementary: no rare side to split off";
    return d;
  }

  std::vector<std::pair<Element, double>> alpha_atoms, beta_atoms;
  if (generate_finite_subgroup(g, heavy_set) && lazy >= eps0 - 1e-12) {
    d.finite_recipe = true;
    d.eps = 2.0 * eps0;
    if (d.eps >= 1.0 - 1e-12) {
      d.finite_recipe = false;
      d.ok = false;
      d.note = "rare side too heavy for the identity mixing recipe";
      return d;
    }
    beta_atoms.emplace_back(e, 0.5);
    for (std::size_t i = 0; i < rest.size(); ++i)
      if (!in_heavy[i]) beta_atoms.emplace_back(rest[i].first, 0.5 * rest[i].second / eps0);
    const double left = lazy - eps0;
    if (left > 0.0) alpha_atoms.emplace_back(e, left / (1.0 - d.eps));
    for (std::size_t i = 0; i < rest.size(); ++i)
      if (in_heavy[i]) alpha_atoms.emplace_back(rest[i].first, rest[i].second / (1.0 - d.eps));
  } else {
    d.eps = eps0;
    if (d.eps >= 1.0 - 1e-12) {
      d.ok = false;
      d.note = "rare side carries all the mass";
      return d;
    }
    if (generate_finite_subgroup(g, heavy_set))
      d.note = "identity mixing skipped: mu(e) below the rare mass";
    if (lazy > 0.0) alpha_atoms.emplace_back(e, lazy / (1.0 - d.eps));
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (in_heavy[i])
        alpha_atoms.emplace_back(rest[i].first, rest[i].second / (1.0 - d.eps));
      else
        beta_atoms.emplace_back(rest[i].first, rest[i].second / d.eps);
    }
  }
  d.alpha = FinMeasure::from_atoms(g, std::move(alpha_atoms));
  d.beta = FinMeasure::from_atoms(g, std::move(beta_atoms));
  d.ok = true;
  return d;
}

// ---- the block-jump measure lambda ----

struct LambdaFamily {
  Decomposition dec;
  AliasTable alpha_alias, beta_alias;
};

inline LambdaFamily lambda_family(const FinMeasure& alpha, const FinMeasure& beta, double eps) {
  if (!alpha.group.same_as(beta.group))
    throw ConfigError("lambda family needs alpha and beta on the same group");
  if (!(eps > 0.0) || eps > 1.0) throw ConfigError("block parameter must lie in (0,1]");
  std::vector<double> wa, wb;
  for (const auto& a : alpha.atoms) wa.push_back(a.second);
  for (const auto& a : beta.atoms) wb.push_back(a.second);
  Decomposition d{alpha, beta};
  d.eps = eps;
  d.ok = true;
  return LambdaFamily{std::move(d), AliasTable(wa), AliasTable(wb)};
}

inline LambdaFamily lambda_family(const Decomposition& dec) {
  if (!dec.ok) throw ConfigError("lambda family needs a valid decomposition");
  LambdaFamily fam = lambda_family(dec.alpha, dec.beta, dec.eps);
  fam.dec = dec;
  return fam;
}

// One block: a geometric number of alpha steps (failure count of parameter
// eps, mean (1-eps)/eps) followed by a single beta step.
inline Element sample_block(const LambdaFamily& fam, Rng& rng, std::int64_t* alpha_steps = nullptr) {
  const double eps = fam.dec.eps;
  std::int64_t n = 0;
  if (eps < 1.0) {
    const double u = 1.0 - rng.next_unit();  // (0, 1]
    n = static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-eps)));
    if (n < 0) n = 0;
  }
  if (alpha_steps) *alpha_steps = n;
  const Group& g = fam.dec.alpha.group;
  Element x = g.identity_element();
  for (std::int64_t i = 0; i < n; ++i)
    g.mul_inplace(x.t, fam.dec.alpha.atoms[fam.alpha_alias.sample(rng)].first);
  g.mul_inplace(x.t, fam.dec.beta.atoms[fam.beta_alias.sample(rng)].first);
  return x;
}

struct TruncatedLambda {
  FinMeasure measure;
  double deficit = 0.0;  // discarded tail mass (1-eps)^{n_trunc+1}
  int n_trunc = 0;
};

// Explicit mixture sum_{n<=N} (1-eps)^n eps alpha^{*n} * beta, renormalized.
// N = ceil(14/eps) puts the tail below exp(-14) < 1e-6.
inline TruncatedLambda lambda_truncated(const LambdaFamily& fam,
                                        std::int64_t cap = DEFAULT_SUPPORT_CAP) {
  const double eps = fam.dec.eps;
  const Group& g = fam.dec.alpha.group;
  const int N = eps >= 1.0 ? 0 : static_cast<int>(std::ceil(14.0 / eps));
  std::vector<std::pair<Element, double>> acc;
  FinMeasure conv = fam.dec.beta;
  double coef = eps;
  for (int n = 0;; ++n) {
    for (const auto& [el, w] : conv.atoms) acc.emplace_back(el, coef * w);
    if (static_cast<std::int64_t>(acc.size()) > cap)
      throw BudgetError("truncated lambda support exceeds the cap");
    if (n == N) break;
    conv = convolve(fam.dec.alpha, conv, cap);
    coef *= 1.0 - eps;
  }
  KahanSum total;
  for (const auto& a : acc) total.add(a.second);
  const double scale = 1.0 / total.value();
  for (auto& a : acc) a.second *= scale;
  TruncatedLambda out{FinMeasure::from_atoms(g, std::move(acc)), 0.0, N};
  out.deficit = eps >= 1.0 ? 0.0 : std::pow(1.0 - eps, N + 1);
  return out;
}

// ---- drift and entropy of lambda, and the identity l(mu) = eps l(lambda) ----

struct LambdaStats {
  double eps = 0.0;
  DriftEstimate mu_drift;                         // walk under mu = (1-eps) alpha + eps beta
  double ell_lambda = 0.0, ell_lambda_err = 0.0;  // word length gained per block
  std::int64_t blocks = 0;
  double mean_block_len = 0.0;  // sampled mean of (alpha steps + 1), expect 1/eps
  double h_lambda = 0.0, h_lambda_err = 0.0;
  bool h_available = false;
  double identity_gap = 0.0, identity_err = 0.0;
  bool identity_ok = false;
};

inline LambdaStats lambda_stats(const LambdaFamily& fam, const ReportBudget& budget) {
  LambdaStats out;
  out.eps = fam.dec.eps;
  const Group& g = fam.dec.alpha.group;
  const FinMeasure mu = interpolation(fam.dec.alpha, fam.dec.beta, fam.dec.eps);
  out.mu_drift = estimate_drift({mu, budget.horizon, budget.replicas, budget.seed, 0});

  const std::int64_t B = std::max<std::int64_t>(
      32, static_cast<std::int64_t>(std::llround(static_cast<double>(budget.horizon) * fam.dec.eps)));
  out.blocks = B;
  KahanSum sum, sumsq, lensum;
  std::vector<Token> pos;
  for (int r = 0; r < budget.replicas; ++r) {
    Rng rng = replica_rng(budget.seed ^ 0x6c0ff5e1a2b3c4d5ULL, r);
    pos = g.identity_element().t;
    std::int64_t len = 0;
    for (std::int64_t b = 0; b < B; ++b) {
      std::int64_t steps = 0;
      len += g.mul_inplace(pos, sample_block(fam, rng, &steps));
      lensum.add(static_cast<double>(steps + 1));
    }
    const double x = static_cast<double>(len) / static_cast<double>(B);
    sum.add(x);
    sumsq.add(x * x);
  }
  const double R = budget.replicas;
  out.ell_lambda = sum.value() / R;
  if (budget.replicas > 1) {
    const double var =
        std::max(0.0, (sumsq.value() - R * out.ell_lambda * out.ell_lambda) / (R - 1.0));
    out.ell_lambda_err = std::sqrt(var / R);
  }
  out.mean_block_len = lensum.value() / (R * static_cast<double>(B));

  out.identity_gap = std::abs(out.mu_drift.estimate - out.eps * out.ell_lambda);
  out.identity_err = std::sqrt(out.mu_drift.std_error * out.mu_drift.std_error +
                               out.eps * out.eps * out.ell_lambda_err * out.ell_lambda_err);
  out.identity_ok = out.identity_gap < 3.0 * out.identity_err + 1e-9;

  // Entropy of lambda goes through the explicit truncated mixture, which is
  // only tractable while the truncation and its support stay small; a wide
  // support would make every convolution step quadratic in it, so the
  // estimate is skipped.
  if (fam.dec.eps < 1.0 && 14.0 / fam.dec.eps > 400.0) return out;
  try {
    const TruncatedLambda t = lambda_truncated(fam, budget.cap);
    std::size_t longest = 0;
    for (const auto& a : t.measure.atoms) longest = std::max(longest, a.first.t.size());
    if (t.measure.atoms.size() <= 1500 && longest <= 24) {
      const std::int64_t cap_l = std::min<std::int64_t>(budget.cap, 200000);
      const EntropyEstimate ent = estimate_entropy(t.measure, std::min(budget.n_max, 8), cap_l);
      out.h_lambda = ent.estimate;
      out.h_lambda_err = ent.std_error;
      out.h_available = true;
    }
  } catch (const BudgetError&) {
  }
  return out;
}

// ---- mixing toward uniform on a finite group ----

struct MixingReport {
  std::vector<double> dist;  // dist[n] = euclidean distance from mu^{*n} to uniform
  double eta = 0.0;          // non-lazy mass 1 - mu(e)
  double c0 = 0.0, rho = 0.0;
  bool fitted = false;
  int fit_lo = 0, fit_hi = 0;
  double rho_bound = 1.0;  // 1 - (1 - c0) eta, the lemma form of the rate
};

inline MixingReport mixing_decay(const FinMeasure& mu, int n_max) {
  const Group& g = mu.group;
  if (g.kind() != Group::Kind::Finite) throw ConfigError("mixing decay needs a finite group");
  if (n_max < 1) throw ConfigError("mixing decay needs n_max >= 1");
  const FiniteData& fd = g.finite_data();
  const int N = fd.order;
  std::vector<std::pair<int, double>> step;
  for (const auto& [el, w] : mu.atoms) step.emplace_back(el.t.empty() ? fd.identity : el.t[0], w);

  MixingReport out;
  out.eta = 1.0 - mu.mass_of(g.identity_element());
  const double unif = 1.0 / static_cast<double>(N);
  std::vector<double> p(N, 0.0), q(N, 0.0);
  p[fd.identity] = 1.0;
  const auto euclid = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
      const double dlt = x - unif;
      s += dlt * dlt;
    }
    return std::sqrt(s);
  };
  out.dist.push_back(euclid(p));
  for (int n = 1; n <= n_max; ++n) {
    std::fill(q.begin(), q.end(), 0.0);
    for (int x = 0; x < N; ++x) {
      if (p[x] == 0.0) continue;
      for (const auto& [i, w] : step) q[fd.table[x][i]] += p[x] * w;
    }
    std::swap(p, q);
    out.dist.push_back(euclid(p));
  }

  out.fit_lo = std::max(1, std::min(20, n_max / 2));
  out.fit_hi = std::min(n_max, 200);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int n = out.fit_lo; n <= out.fit_hi; ++n) {
    // dense convolution resolves differences from uniform only down to the
    // rounding noise of order n*ulp(1/N); points near that floor would drag
    // the fitted slope toward zero
    if (out.dist[n] < 1e-11) continue;
    const double x = n, y = std::log(out.dist[n]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) {
    const double denom = cnt * sxx - sx * sx;
    const double slope = (cnt * sxy - sx * sy) / denom;
    const double inter = (sy - slope * sx) / cnt;
    out.rho = std::exp(slope);
    out.c0 = std::exp(inter);
    out.fitted = true;
    out.rho_bound = 1.0 - (1.0 - out.c0) * out.eta;
  }
  return out;
}

// ---- sup-norm decay on Z and the infinite dihedral group ----

struct SupnormReport {
  std::vector<double> sup;         // sup_g mu^{*n}(g)
  std::vector<double> normalized;  // sqrt(eta n) sup[n] (eta replaced by 1 when degenerate)
  double eta = 0.0;
  bool lazy_ok = true;
  bool degenerate = false;
  std::string flag;
};

// Exact convolution in translation-and-flip coordinates x -> flip*x + shift:
// Z walks keep flip = +1, infinite dihedral reflections carry flip = -1. The
// live support window grows by one atom shift per step, so n_max steps cost
// O(n_max^2) array cells.
inline SupnormReport vc_supnorm_decay(const FinMeasure& mu, int n_max) {
  const Group& g = mu.group;
  if (n_max < 1) throw ConfigError("sup-norm decay needs n_max >= 1");
  bool dihedral = false;
  if (g.kind() == Group::Kind::Free && g.free_rank() == 1) {
    dihedral = false;
  } else if (g.kind() == Group::Kind::FreeProduct && g.factors().size() == 2 &&
             g.factors()[0].kind() == Group::Kind::Finite && g.factors()[0].finite_data().order == 2 &&
             g.factors()[1].kind() == Group::Kind::Finite && g.factors()[1].finite_data().order == 2) {
    dihedral = true;
  } else {
    throw ConfigError("sup-norm decay supports Z and the infinite dihedral group");
  }

  struct Aff {
    int flip = 1;
    std::int64_t shift = 0;
    double w = 0.0;
  };
  std::vector<Aff> step;
  std::int64_t smax = 0;
  for (const auto& [el, w] : mu.atoms) {
    Aff a;
    a.w = w;
    for (Token t : el.t) {
      int flip;
      std::int64_t shift;
      if (!dihedral) {
        flip = 1;
        shift = t == 0 ? 1 : -1;
      } else {
        flip = -1;
        shift = t / TOKEN_STRIDE == 0 ? 0 : 1;
      }
      a.shift += static_cast<std::int64_t>(a.flip) * shift;
      a.flip *= flip;
    }
    smax = std::max(smax, std::abs(a.shift));
    step.push_back(a);
  }

  const std::int64_t W = static_cast<std::int64_t>(n_max) * smax + 2;
  const std::size_t width = static_cast<std::size_t>(2 * W + 1);
  std::vector<double> plus(width, 0.0), minus(width, 0.0), nplus(width, 0.0), nminus(width, 0.0);
  plus[W] = 1.0;

  SupnormReport out;
  out.eta = 1.0 - mu.mass_of(g.identity_element());
  out.degenerate = out.eta < 1e-15;
  if (mu.mass_of(g.identity_element()) < 0.5 - 1e-12) {
    out.lazy_ok = false;
    out.flag = "laziness hypothesis mu(e) >= 1/2 violated";
  }
  if (out.degenerate) out.flag = "support generates a finite subgroup: normalized column grows";
  const double eta_eff = out.degenerate ? 1.0 : out.eta;

  out.sup.push_back(1.0);
  out.normalized.push_back(0.0);
  std::int64_t lo = W, hi = W;  // live index range, both arrays
  for (int n = 1; n <= n_max; ++n) {
    const std::int64_t nlo = lo - smax, nhi = hi + smax;
    std::fill(nplus.begin() + nlo, nplus.begin() + nhi + 1, 0.0);
    std::fill(nminus.begin() + nlo, nminus.begin() + nhi + 1, 0.0);
    for (const Aff& a : step) {
      for (std::int64_t m = lo; m <= hi; ++m) {
        if (plus[m] != 0.0) {
          auto& dst = a.flip > 0 ? nplus : nminus;
          dst[m + a.shift] += plus[m] * a.w;
        }
        if (minus[m] != 0.0) {
          auto& dst = a.flip > 0 ? nminus : nplus;
          dst[m - a.shift] += minus[m] * a.w;
        }
      }
    }
    lo = nlo;
    hi = nhi;
    std::swap(plus, nplus);
    std::swap(minus, nminus);
    double s = 0.0;
    for (std::int64_t m = lo; m <= hi; ++m) s = std::max(s, std::max(plus[m], minus[m]));
    out.sup.push_back(s);
    out.normalized.push_back(std::sqrt(eta_eff * n) * s);
  }
  return out;
}

// ---- ratio scan over a degenerating family ----

struct RatioPoint {
  double eps = 0.0;
  bool ok = false;
  std::string error;
  double h = 0.0, h_err = 0.0;
  double ell = 0.0, ell_err = 0.0;
  double v = 0.0;
  bool ratio_defined = false;
  double ratio = 0.0, ratio_err = 0.0;  // h / ell
  double ratio_over_v = 0.0, ratio_over_v_err = 0.0;
  std::string verdict;
  std::uint64_t seed = 0;
};

struct RatioScan {
  std::vector<RatioPoint> points;
  bool decreasing = true;  // strict decrease of h/ell across the defined points
};

inline RatioScan ratio_scan(const std::function<FinMeasure(double)>& family,
                            const std::vector<double>& grid, const ReportBudget& budget) {
  RatioScan scan;
  double prev = std::numeric_limits<double>::infinity();
  bool have_prev = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    RatioPoint pt;
    pt.eps = grid[i];
    ReportBudget b = budget;
    b.seed = budget.seed + (i + 1) * 0x9e3779b97f4a7c15ULL;
    pt.seed = b.seed;
    try {
      const FinMeasure mu = family(grid[i]);
      const FundamentalReport rep = fundamental_report(mu, b);
      pt.ok = true;
      pt.h = rep.h;
      pt.h_err = rep.h_err;
      pt.ell = rep.ell;
      pt.ell_err = rep.ell_err;
      pt.v = rep.v;
      pt.verdict = rep.verdict;
      if (rep.ratio_defined) {
        pt.ratio_defined = true;
        pt.ratio_over_v = rep.ratio;
        pt.ratio_over_v_err = rep.ratio_err;
        pt.ratio = rep.ratio * rep.v;
        pt.ratio_err = rep.ratio_err * rep.v;
      }
    } catch (const std::exception& ex) {
      pt.error = ex.what();
    }
    if (pt.ratio_defined) {
      if (have_prev && !(pt.ratio < prev)) scan.decreasing = false;
      prev = pt.ratio;
      have_prev = true;
    }
    scan.points.push_back(std::move(pt));
  }
  return scan;
}

}  // namespace walklab
