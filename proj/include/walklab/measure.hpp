#pragma once

// Finitely supported probability measures on a group: entropy and length
// functionals, exact convolution, the radial entropy defect, the measure
// constructors used throughout, and the averaged entropy lower-bound tester.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "walklab/group.hpp"
#include "walklab/rng.hpp"
#include "walklab/series.hpp"

namespace walklab {

inline constexpr std::int64_t DEFAULT_SUPPORT_CAP = 5'000'000;

struct FinMeasure {
  Group group;
  // Sorted by the canonical element order, unique elements, strictly positive
  // masses summing to 1 within 1e-12.
  std::vector<std::pair<Element, double>> atoms;
  bool symmetric = false;
  std::int64_t dropped_atoms = 0;  // underflow atoms removed during construction

  // Validates, merges duplicates, sorts, and detects symmetry. Total mass must
  // already be 1 within the stated tolerance.
  static FinMeasure from_atoms(Group g, std::vector<std::pair<Element, double>> raw,
                               double total_tol = 1e-12) {
    FinMeasure m{std::move(g), {}, false, 0};
    for (auto& [el, w] : raw) {
      m.group.validate_element(el);
      if (!(w >= 0) || !std::isfinite(w)) throw ConfigError("measure mass must be a finite nonnegative number");
    }
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return shortlex_less(a.first, b.first); });
    for (auto& [el, w] : raw) {
      if (!m.atoms.empty() && m.atoms.back().first == el)
        m.atoms.back().second += w;
      else
        m.atoms.emplace_back(std::move(el), w);
    }
    std::vector<std::pair<Element, double>> kept;
    kept.reserve(m.atoms.size());
    for (auto& a : m.atoms) {
      if (a.second < 1e-300)
        ++m.dropped_atoms;
      else
        kept.push_back(std::move(a));
    }
    m.atoms = std::move(kept);
    if (m.atoms.empty()) throw ConfigError("measure has empty support");
    KahanSum total;
    for (const auto& a : m.atoms) total.add(a.second);
    if (std::abs(total.value() - 1.0) > total_tol)
      throw ConfigError("measure total mass " + std::to_string(total.value()) +
                        " deviates from 1 beyond tolerance");
    m.symmetric = m.detect_symmetry();
    return m;
  }

  double mass_of(const Element& x) const {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), x, [](const auto& a, const Element& e) {
      return shortlex_less(a.first, e);
    });
    return it != atoms.end() && it->first == x ? it->second : 0.0;
  }

  std::size_t support_size() const { return atoms.size(); }

 private:
  bool detect_symmetry() const {
    for (const auto& [el, w] : atoms)
      if (std::abs(mass_of(group.inv(el)) - w) > 1e-12) return false;
    return true;
  }
};

// Exact convolution. Contributions to each output atom are accumulated in the
// canonical order of the left factor, so results are bit-reproducible.
inline FinMeasure convolve(const FinMeasure& a, const FinMeasure& b,
                           std::int64_t cap = DEFAULT_SUPPORT_CAP) {
  if (!a.group.same_as(b.group)) throw ConfigError("convolution of measures on different groups");
  std::unordered_map<Element, double, ElementHash> acc;
  acc.reserve(a.atoms.size() * 2);
  Element scratch;
  for (const auto& [x, wx] : a.atoms) {
    for (const auto& [y, wy] : b.atoms) {
      scratch.t = x.t;
      a.group.mul_inplace(scratch.t, y);
      auto it = acc.find(scratch);
      if (it != acc.end()) {
        it->second += wx * wy;
      } else {
        if (static_cast<std::int64_t>(acc.size()) >= cap)
          throw BudgetError("convolution support exceeds cap " + std::to_string(cap));
        acc.emplace(scratch, wx * wy);
      }
    }
  }
  std::vector<std::pair<Element, double>> out;
  out.reserve(acc.size());
  for (auto it = acc.begin(); it != acc.end();) {
    auto node = acc.extract(it++);
    out.emplace_back(std::move(node.key()), node.mapped());
  }
  return FinMeasure::from_atoms(a.group, std::move(out));
}

// Iterated self-convolution mu^{*n}; n = 0 gives the point mass at e.
inline FinMeasure convolve_power(const FinMeasure& m, int n,
                                 std::int64_t cap = DEFAULT_SUPPORT_CAP) {
  if (n < 0) throw ConfigError("convolution power must be nonnegative");
  FinMeasure acc = FinMeasure::from_atoms(m.group, {{m.group.identity_element(), 1.0}});
  for (int i = 0; i < n; ++i) acc = convolve(acc, m, cap);
  return acc;
}

inline double entropy_H(const FinMeasure& m) {
  KahanSum s;
  for (const auto& [el, w] : m.atoms)
    if (w > 0) s.add(w * -std::log(w));
  return s.value();
}

inline double moment_L(const FinMeasure& m) {
  KahanSum s;
  for (const auto& [el, w] : m.atoms)
    s.add(w * static_cast<double>(m.group.token_length(el.t.data(), el.t.size())));
  return s.value();
}

struct RadialProfile {
  std::vector<double> mass;         // mass[k] = mu(S^k)
  std::vector<double> conditional;  // entropy of the conditional law on S^k
  double marginal_entropy = 0.0;    // entropy of the radius distribution
  double defect = 0.0;              // H(mu) - marginal_entropy = sum mass[k] conditional[k]
};

inline RadialProfile radial_profile(const FinMeasure& m) {
  RadialProfile p;
  std::vector<std::vector<double>> by_radius;
  for (const auto& [el, w] : m.atoms) {
    const auto k = static_cast<std::size_t>(m.group.token_length(el.t.data(), el.t.size()));
    if (by_radius.size() <= k) by_radius.resize(k + 1);
    by_radius[k].push_back(w);
  }
  p.mass.resize(by_radius.size(), 0.0);
  p.conditional.resize(by_radius.size(), 0.0);
  KahanSum marginal, defect;
  for (std::size_t k = 0; k < by_radius.size(); ++k) {
    KahanSum level;
    for (double w : by_radius[k]) level.add(w);
    const double wk = level.value();
    p.mass[k] = wk;
    if (wk <= 0) continue;
    KahanSum cond;
    for (double w : by_radius[k]) {
      const double q = w / wk;
      if (q > 0) cond.add(q * -std::log(q));
    }
    p.conditional[k] = cond.value();
    marginal.add(wk * -std::log(wk));
    defect.add(wk * cond.value());
  }
  p.marginal_entropy = marginal.value();
  p.defect = defect.value();
  return p;
}

// ---- constructors ----

inline FinMeasure uniform_on_set(const Group& g, const std::vector<Element>& set) {
  if (set.empty()) throw ConfigError("uniform measure on an empty set");
  std::vector<std::pair<Element, double>> atoms;
  const double w = 1.0 / static_cast<double>(set.size());
  for (const Element& x : set) atoms.emplace_back(x, w);
  return FinMeasure::from_atoms(g, std::move(atoms));
}

inline FinMeasure uniform_ball(const Group& g, int radius, std::int64_t cap = DEFAULT_SUPPORT_CAP) {
  const auto levels = g.spheres_up_to(radius, cap);
  std::vector<Element> all;
  for (const auto& lvl : levels) all.insert(all.end(), lvl.begin(), lvl.end());
  return uniform_on_set(g, all);
}

inline FinMeasure uniform_sphere(const Group& g, int radius, std::int64_t cap = DEFAULT_SUPPORT_CAP) {
  return uniform_on_set(g, g.sphere(radius, cap));
}

// Boltzmann weights e^{-s|g|}/Z on the ball of the given radius.
inline FinMeasure gibbs_measure(const Group& g, double s, int cutoff,
                                std::int64_t cap = DEFAULT_SUPPORT_CAP) {
  if (!std::isfinite(s)) throw ConfigError("gibbs parameter must be finite");
  const auto levels = g.spheres_up_to(cutoff, cap);
  KahanSum z;
  for (int k = 0; k < static_cast<int>(levels.size()); ++k)
    z.add(static_cast<double>(levels[k].size()) * std::exp(-s * k));
  std::vector<std::pair<Element, double>> atoms;
  for (int k = 0; k < static_cast<int>(levels.size()); ++k) {
    const double w = std::exp(-s * k) / z.value();
    for (const Element& x : levels[k]) atoms.emplace_back(x, w);
  }
  return FinMeasure::from_atoms(g, std::move(atoms));
}

// Uniform measure on the words of length p in a free product that start in the
// first factor and end in the second.
inline FinMeasure slice_uniform(const Group& g, int p, std::int64_t cap = DEFAULT_SUPPORT_CAP) {
  if (g.kind() != Group::Kind::FreeProduct)
    throw ConfigError("slice measures need a free product");
  std::vector<Element> keep;
  for (const Element& x : g.sphere(p, cap)) {
    if (x.t.empty()) continue;
    if (x.t.front() / TOKEN_STRIDE == 0 && x.t.back() / TOKEN_STRIDE == 1) keep.push_back(x);
  }
  if (keep.empty()) throw ConfigError("slice of length " + std::to_string(p) + " is empty");
  return uniform_on_set(g, keep);
}

// The two-syllable measure g1 g2 -> e^{-v|g1 g2|} on a free product of two
// finite groups. Its raw total is exactly 1 at the growth rate; the measure is
// rescaled by that total so downstream invariants see an exact distribution.
inline FinMeasure critical_product(const Group& g, double* raw_total = nullptr) {
  if (g.kind() != Group::Kind::FreeProduct || g.factors().size() != 2 ||
      g.factors()[0].kind() != Group::Kind::Finite || g.factors()[1].kind() != Group::Kind::Finite)
    throw ConfigError("critical product measure needs a free product of two finite groups");
  const GrowthReport gr = growth_rate(group_series(g));
  if (gr.polynomial_growth)
    throw ConfigError("critical product measure needs exponential growth");
  const double z = gr.zstar;
  const FiniteData& f0 = g.factors()[0].finite_data();
  const FiniteData& f1 = g.factors()[1].finite_data();
  std::vector<std::pair<Element, double>> atoms;
  KahanSum total;
  for (int x = 0; x < f0.order; ++x) {
    if (x == f0.identity) continue;
    for (int y = 0; y < f1.order; ++y) {
      if (y == f1.identity) continue;
      Element el;
      el.t = {0 * TOKEN_STRIDE + x, 1 * TOKEN_STRIDE + y};
      const double w = std::pow(z, f0.len[x] + f1.len[y]);
      total.add(w);
      atoms.emplace_back(std::move(el), w);
    }
  }
  if (raw_total) *raw_total = total.value();
  if (std::abs(total.value() - 1.0) > 1e-10)
    throw ConfigError("critical product mass identity failed: total " +
                      std::to_string(total.value()));
  for (auto& a : atoms) a.second /= total.value();
  return FinMeasure::from_atoms(g, std::move(atoms));
}

inline FinMeasure lazy_mix(const FinMeasure& m, double theta) {
  if (!(theta >= 0.0) || theta >= 1.0) throw ConfigError("lazy mix weight must lie in [0,1)");
  std::vector<std::pair<Element, double>> atoms;
  atoms.emplace_back(m.group.identity_element(), theta);
  for (const auto& [el, w] : m.atoms) atoms.emplace_back(el, (1.0 - theta) * w);
  return FinMeasure::from_atoms(m.group, std::move(atoms));
}

inline FinMeasure interpolation(const FinMeasure& m0, const FinMeasure& m1, double eps) {
  if (!m0.group.same_as(m1.group)) throw ConfigError("interpolation of measures on different groups");
  if (!(eps >= 0.0) || eps > 1.0) throw ConfigError("interpolation weight must lie in [0,1]");
  std::vector<std::pair<Element, double>> atoms;
  for (const auto& [el, w] : m0.atoms) atoms.emplace_back(el, (1.0 - eps) * w);
  for (const auto& [el, w] : m1.atoms) atoms.emplace_back(el, eps * w);
  return FinMeasure::from_atoms(m0.group, std::move(atoms));
}

// ---- averaged entropy lower bound ----

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool lhs_infinite = false;
};

// For weights w summing to 1 and f >= 0 with sum w f = 1:
// sum w(-log f) >= w(A)(-log sum_A w f) - 2/e. Atoms with f = 0 but positive
// weight push the left side to +infinity, so the bound holds vacuously.
inline BoundCheck check_entropy_lower_bound(const std::vector<double>& w,
                                            const std::vector<double>& f,
                                            const std::vector<int>& A) {
  if (w.size() != f.size()) throw ConfigError("weight and function vectors differ in length");
  KahanSum ws, wfs;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0) || !(f[i] >= 0)) throw ConfigError("weights and f must be nonnegative");
    ws.add(w[i]);
    wfs.add(w[i] * f[i]);
  }
  if (std::abs(ws.value() - 1.0) > 1e-10) throw ConfigError("weights must sum to 1");
  if (std::abs(wfs.value() - 1.0) > 1e-10) throw ConfigError("f must have average 1");

  BoundCheck out;
  KahanSum lhs;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0) continue;
    if (f[i] == 0) {
      out.lhs_infinite = true;
      break;
    }
    lhs.add(w[i] * -std::log(f[i]));
  }
  KahanSum wa, sa;
  for (int i : A) {
    if (i < 0 || i >= static_cast<int>(w.size())) throw ConfigError("subset index out of range");
    wa.add(w[i]);
    sa.add(w[i] * f[i]);
  }
  constexpr double TWO_OVER_E = 2.0 / 2.718281828459045235;
  if (out.lhs_infinite) {
    out.lhs = std::numeric_limits<double>::infinity();
    out.rhs = wa.value() > 0 && sa.value() <= 0 ? std::numeric_limits<double>::infinity()
                                                : wa.value() * -std::log(std::max(sa.value(), 1e-300)) - TWO_OVER_E;
    out.holds = true;
    return out;
  }
  out.lhs = lhs.value();
  if (wa.value() <= 0)
    out.rhs = -TWO_OVER_E;
  else
    out.rhs = wa.value() * -std::log(sa.value()) - TWO_OVER_E;
  out.holds = out.lhs >= out.rhs - 1e-9;
  return out;
}

// ---- serialization ----

inline nlohmann::json measure_to_json(const FinMeasure& m) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& [el, w] : m.atoms)
    atoms.push_back({{"word", m.group.format(el)}, {"mass", w}});
  return {{"atoms", std::move(atoms)}};
}

inline FinMeasure measure_from_json(const Group& g, const nlohmann::json& j,
                                    std::int64_t cap = DEFAULT_SUPPORT_CAP) {
  if (j.contains("atoms")) {
    std::vector<std::pair<Element, double>> atoms;
    KahanSum total;
    for (const auto& a : j.at("atoms")) {
      const double w = a.at("mass").get<double>();
      total.add(w);
      atoms.emplace_back(g.parse_word(a.at("word").get<std::string>()), w);
    }
    if (std::abs(total.value() - 1.0) > 1e-9)
      throw ConfigError("measure atoms must sum to 1 within 1e-9");
    for (auto& a : atoms) a.second /= total.value();
    return FinMeasure::from_atoms(g, std::move(atoms));
  }
  const std::string b = j.at("builder").get<std::string>();
  if (b == "uniform_ball") return uniform_ball(g, j.at("radius").get<int>(), cap);
  if (b == "uniform_sphere") return uniform_sphere(g, j.at("radius").get<int>(), cap);
  if (b == "srw") return uniform_sphere(g, 1, cap);
  if (b == "uniform_on_set") {
    std::vector<Element> set;
    for (const auto& wd : j.at("words")) set.push_back(g.parse_word(wd.get<std::string>()));
    return uniform_on_set(g, set);
  }
  if (b == "gibbs") return gibbs_measure(g, j.at("s").get<double>(), j.at("cutoff").get<int>(), cap);
  if (b == "slice_uniform") return slice_uniform(g, j.at("p").get<int>(), cap);
  if (b == "critical_product") return critical_product(g);
  if (b == "lazy_mix")
    return lazy_mix(measure_from_json(g, j.at("inner"), cap), j.at("theta").get<double>());
  if (b == "interpolation")
    return interpolation(measure_from_json(g, j.at("m0"), cap),
                         measure_from_json(g, j.at("m1"), cap), j.at("eps").get<double>());
  throw ConfigError("unknown measure builder: " + b);
}

}  // namespace walklab
