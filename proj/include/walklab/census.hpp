#pragma once

// Exact censuses over spheres: geodesic automata for free groups and free
// products, coset lifts along subgroup specifications, Perron growth data and
// the normalized geodesic chain, arbitrary-precision transfer-matrix counts
// of B_n intersected with a subgroup, quasi-convexity and distortion
// censuses, subsemigroup densities, and return-path statistics.
//
// Geodesic automata are built per model: for a free group the state is the
// last letter; for a free product it is the current factor together with the
// partial syllable, and transitions follow the canonical spelling of each
// syllable so that length-n path counts equal Card S^n even when geodesics
// are not unique.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "walklab/series.hpp"
#include "walklab/subgroup.hpp"

namespace walklab {

struct CosetAutomaton {
  Group group;

  // Geodesic layer.
  int geo_states = 0;
  int start = 0;
  std::vector<std::vector<int>> geo_next;  // [state][gen id] -> state or -1

  // Coset layer. For integer kernels cosets are a window [-W, W] plus an
  // absorbing overflow; for generated subgroups they are the folded graph's
  // vertices plus an absorbing non-member state.
  int n_cosets = 1;
  int accept = 0;
  int overflow = -1;
  std::vector<std::vector<int>> coset_next;  // [coset][gen id] -> coset
  std::vector<int> coset_dist;  // quotient distance to the trivial coset, -1 unreachable
  std::int64_t max_step = 0;
  int window = -1;  // W for integer lifts, -1 otherwise

  // Perron data of the un-lifted transfer matrix.
  double rho = 1.0;  // spectral radius, equal to e^v
  double v = 0.0;
  std::vector<double> q;                // positive right eigenvector, max-normalized
  std::vector<std::vector<double>> p;   // chain: p[state][gen id], rows sum to one

  int n_states() const { return geo_states * n_cosets; }

  // Longest count length the integer window certifies as overflow-free.
  void require_length(int n) const {
    if (window >= 0 && static_cast<std::int64_t>(n) * max_step > window)
      throw ConfigError("integer window too small for requested count length");
  }
};

namespace detail {

inline void build_geodesic_layer(const Group& g, CosetAutomaton& aut) {
  const int ng = static_cast<int>(g.generators().size());
  if (g.kind() == Group::Kind::Free) {
    aut.geo_states = 1 + ng;
    aut.start = 0;
    aut.geo_next.assign(aut.geo_states, std::vector<int>(ng, -1));
    for (int t = 0; t < ng; ++t) {
      aut.geo_next[0][t] = 1 + t;
      for (int u = 0; u < ng; ++u)
        if (g.inverse_gen(u) != t) aut.geo_next[1 + t][u] = 1 + u;
    }
    return;
  }
  if (g.kind() != Group::Kind::FreeProduct)
    throw ConfigError("geodesic automata exist for free groups and free products only");

  const auto& facs = g.factors();
  // State 0 is the start; factor f contributes one state per nontrivial
  // element (finite factor) or per letter (free factor).
  std::vector<int> offset(facs.size() + 1, 1);
  std::vector<std::vector<int>> local_state(facs.size());
  for (std::size_t f = 0; f < facs.size(); ++f) {
    if (facs[f].kind() == Group::Kind::Finite) {
      const FiniteData& fd = facs[f].finite_data();
      local_state[f].assign(fd.order, -1);
      int next = offset[f];
      for (int x = 0; x < fd.order; ++x)
        if (x != fd.identity) local_state[f][x] = next++;
      offset[f + 1] = next;
    } else {
      const int nl = static_cast<int>(facs[f].generators().size());
      local_state[f].resize(nl);
      for (int t = 0; t < nl; ++t) local_state[f][t] = offset[f] + t;
      offset[f + 1] = offset[f] + nl;
    }
  }
  aut.geo_states = offset[facs.size()];
  aut.start = 0;
  aut.geo_next.assign(aut.geo_states, std::vector<int>(ng, -1));

  // Entry transitions: the first letter of a canonical syllable.
  auto add_entries = [&](int state, std::size_t skip_factor) {
    for (std::size_t f = 0; f < facs.size(); ++f) {
      if (f == skip_factor) continue;
      if (facs[f].kind() == Group::Kind::Finite) {
        const FiniteData& fd = facs[f].finite_data();
        for (std::size_t p2 = 0; p2 < fd.gens.size(); ++p2)
          aut.geo_next[state][g.gen_id_of(static_cast<int>(f), static_cast<int>(p2))] =
              local_state[f][fd.gens[p2]];
      } else {
        const int nl = static_cast<int>(facs[f].generators().size());
        for (int t = 0; t < nl; ++t)
          aut.geo_next[state][g.gen_id_of(static_cast<int>(f), t)] = local_state[f][t];
      }
    }
  };

  add_entries(0, facs.size());
  for (std::size_t f = 0; f < facs.size(); ++f) {
    if (facs[f].kind() == Group::Kind::Finite) {
      const FiniteData& fd = facs[f].finite_data();
      for (int x = 0; x < fd.order; ++x) {
        if (x == fd.identity) continue;
        const int state = local_state[f][x];
        add_entries(state, f);
        // Continue the current syllable along its canonical spelling.
        for (std::size_t p2 = 0; p2 < fd.gens.size(); ++p2) {
          const int y = fd.table[x][fd.gens[p2]];
          if (y != fd.identity && fd.parent[y] == x &&
              fd.parent_gen[y] == static_cast<int>(p2))
            aut.geo_next[state][g.gen_id_of(static_cast<int>(f), static_cast<int>(p2))] =
                local_state[f][y];
        }
      }
    } else {
      const int nl = static_cast<int>(facs[f].generators().size());
      for (int t = 0; t < nl; ++t) {
        const int state = local_state[f][t];
        add_entries(state, f);
        for (int u = 0; u < nl; ++u)
          if (facs[f].inverse_gen(u) != t)
            aut.geo_next[state][g.gen_id_of(static_cast<int>(f), u)] = local_state[f][u];
      }
    }
  }
}

// Power iteration on A + I with Collatz-Wielandt brackets; the shift makes
// periodic automata (alternating free products) converge.
inline void build_perron_layer(CosetAutomaton& aut) {
  const int n = aut.geo_states;
  const int ng = static_cast<int>(aut.group.generators().size());
  std::vector<double> q(n, 1.0), y(n);
  double lo = 0.0, hi = 0.0;
  for (int iter = 0; iter < 200000; ++iter) {
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (int x = 0; x < n; ++x) {
      double s = q[x];
      for (int t = 0; t < ng; ++t)
        if (aut.geo_next[x][t] >= 0) s += q[aut.geo_next[x][t]];
      y[x] = s;
      const double ratio = s / q[x];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    if (hi - lo < 1e-13 && iter > 4) break;
    const double scale = 1.0 / *std::max_element(y.begin(), y.end());
    for (int x = 0; x < n; ++x) q[x] = y[x] * scale;
  }
  if (hi - lo > 1e-9) throw ConfigError("Perron iteration did not converge");
  aut.rho = 0.5 * (lo + hi) - 1.0;
  aut.v = std::log(aut.rho);
  aut.q = q;
  aut.p.assign(n, std::vector<double>(ng, 0.0));
  for (int x = 0; x < n; ++x)
    for (int t = 0; t < ng; ++t)
      if (aut.geo_next[x][t] >= 0) aut.p[x][t] = q[aut.geo_next[x][t]] / (aut.rho * q[x]);
}

}  // namespace detail

inline CosetAutomaton build_coset_automaton(const Group& g) {
  CosetAutomaton aut;
  aut.group = g;
  detail::build_geodesic_layer(g, aut);
  const int ng = static_cast<int>(g.generators().size());
  aut.n_cosets = 1;
  aut.accept = 0;
  aut.coset_next.assign(1, std::vector<int>(ng, 0));
  aut.coset_dist = {0};
  detail::build_perron_layer(aut);
  return aut;
}

inline CosetAutomaton build_coset_automaton(const Group& g, const SubgroupSpec& sub,
                                            int window = -1) {
  if (!ambient_of(sub).same_as(g))
    throw ConfigError("subgroup specification is for a different ambient group");
  CosetAutomaton aut;
  aut.group = g;
  detail::build_geodesic_layer(g, aut);
  const int ng = static_cast<int>(g.generators().size());

  if (const auto* gen = std::get_if<GeneratedSubgroup>(&sub)) {
    const StallingsGraph graph = stallings_fold(*gen);
    const int nv = static_cast<int>(graph.edge.size());
    aut.n_cosets = nv + 1;
    aut.accept = graph.base;
    aut.overflow = nv;  // absorbing non-member state
    aut.coset_next.assign(aut.n_cosets, std::vector<int>(ng, nv));
    for (int v2 = 0; v2 < nv; ++v2)
      for (int t = 0; t < ng; ++t)
        aut.coset_next[v2][t] = graph.edge[v2][t] >= 0 ? graph.edge[v2][t] : nv;
    aut.coset_dist = graph.dist;
    aut.coset_dist.push_back(-1);
  } else if (const auto* fin = std::get_if<FiniteKernel>(&sub)) {
    const FiniteData& td = fin->target.finite_data();
    aut.n_cosets = td.order;
    aut.accept = td.identity;
    aut.coset_next.assign(td.order, std::vector<int>(ng, 0));
    for (int c = 0; c < td.order; ++c)
      for (int t = 0; t < ng; ++t) aut.coset_next[c][t] = td.table[c][fin->image[t]];
    aut.coset_dist = quotient_distances(*fin);
  } else {
    const auto& ik = std::get<IntegerKernel>(sub);
    if (window < 1) throw ConfigError("integer kernels need a positive window");
    const int W = window;
    aut.window = W;
    for (std::int64_t m : ik.image) aut.max_step = std::max(aut.max_step, std::abs(m));
    aut.n_cosets = 2 * W + 2;
    aut.accept = W;
    aut.overflow = 2 * W + 1;
    aut.coset_next.assign(aut.n_cosets, std::vector<int>(ng, aut.overflow));
    for (int c = 0; c <= 2 * W; ++c)
      for (int t = 0; t < ng; ++t) {
        const std::int64_t j = c + ik.image[t];
        if (j >= 0 && j <= 2 * W) aut.coset_next[c][t] = static_cast<int>(j);
      }
    aut.coset_dist = integer_window_distances(ik, W);
    aut.coset_dist.push_back(-1);
  }
  detail::build_perron_layer(aut);
  return aut;
}

struct CensusRow {
  int n = 0;
  BigInt count = 0;   // members of the censused set in S^n
  BigInt sphere = 0;  // Card S^n of the ambient group
  BigInt ball = 0;    // Card B_n of the ambient group
  double density = 0.0;      // cumulative members up to n over Card B_n
  double log_density = 0.0;  // log(count / sphere)
};

namespace detail {

inline void finish_row(CensusRow& row, const BigInt& cumulative) {
  row.density = BigRat(cumulative, row.ball).convert_to<double>();
  row.log_density = row.count > 0
                        ? std::log(BigRat(row.count, row.sphere).convert_to<double>())
                        : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

// Exact Card S^n intersected with the subgroup for n = 0..n_max, by a
// path-count dynamic program over (state, coset) with arbitrary-precision
// integers. Densities are exact rationals floated at the end.
inline std::vector<CensusRow> subgroup_census(const CosetAutomaton& aut, int n_max) {
  if (n_max < 0) throw ConfigError("census length must be nonnegative");
  aut.require_length(n_max);
  const int ng = static_cast<int>(aut.group.generators().size());
  std::vector<std::vector<BigInt>> cnt(aut.geo_states, std::vector<BigInt>(aut.n_cosets, 0));
  cnt[aut.start][aut.accept] = 1;
  std::vector<CensusRow> rows;
  BigInt cumulative = 0, ball = 0;
  for (int n = 0;; ++n) {
    CensusRow row;
    row.n = n;
    for (int s = 0; s < aut.geo_states; ++s)
      for (int c = 0; c < aut.n_cosets; ++c) {
        row.sphere += cnt[s][c];
        if (c == aut.accept) row.count += cnt[s][c];
      }
    cumulative += row.count;
    ball += row.sphere;
    row.ball = ball;
    detail::finish_row(row, cumulative);
    rows.push_back(std::move(row));
    if (n == n_max) break;
    std::vector<std::vector<BigInt>> next(aut.geo_states, std::vector<BigInt>(aut.n_cosets, 0));
    for (int s = 0; s < aut.geo_states; ++s)
      for (int c = 0; c < aut.n_cosets; ++c) {
        if (cnt[s][c] == 0) continue;
        for (int t = 0; t < ng; ++t) {
          const int s2 = aut.geo_next[s][t];
          if (s2 >= 0) next[s2][aut.coset_next[c][t]] += cnt[s][c];
        }
      }
    cnt = std::move(next);
  }
  return rows;
}

inline CensusRow count_in_sphere(const CosetAutomaton& aut, int n) {
  return subgroup_census(aut, n).back();
}

namespace detail {

inline int visit_threshold(double eps, int n) {
  return std::max(0, static_cast<int>(std::ceil(eps * n - 1e-9)));
}

}  // namespace detail

// Members of S^n whose canonical geodesic has at least eps*n prefixes within
// quotient distance M of the subgroup, for n = 0..n_max. Kernel cosets carry
// the exact quotient distance, so the census is a saturated dynamic program
// over (state, coset, prefix count); generated subgroups are enumerated by
// walking closed paths of the folded graph under the budget cap.
inline std::vector<CensusRow> qc_census(const CosetAutomaton& aut, double eps, int M,
                                        int n_max, std::int64_t cap = 50'000'000) {
  if (n_max < 0 || eps < 0.0 || eps > 1.0 || M < 0)
    throw ConfigError("bad quasi-convexity census parameters");
  aut.require_length(n_max);
  const int ng = static_cast<int>(aut.group.generators().size());
  const int kmax = detail::visit_threshold(eps, n_max);

  std::vector<CensusRow> rows;
  BigInt cumulative = 0, ball = 0;

  if (aut.overflow >= 0 && aut.window < 0) {
    // Generated subgroup: enumerate closed non-backtracking paths, tracking
    // the number of prefixes that stay within graph distance M of the base.
    std::vector<std::vector<BigInt>> good_closed(n_max + 1);
    for (int n = 0; n <= n_max; ++n) good_closed[n].assign(n + 1, 0);
    std::int64_t budget = cap;
    auto dfs = [&](auto&& self, int coset, int last, int depth, int good) -> void {
      if (--budget < 0) throw BudgetError("census enumeration cap exceeded");
      if (coset == aut.accept) ++good_closed[depth][good];
      if (depth == n_max) return;
      for (int t = 0; t < ng; ++t) {
        if (last >= 0 && aut.group.inverse_gen(t) == last) continue;
        const int c2 = aut.coset_next[coset][t];
        if (c2 == aut.overflow) continue;  // off the graph: no member extends this
        const int d = aut.coset_dist[c2];
        self(self, c2, t, depth + 1, good + (d >= 0 && d <= M ? 1 : 0));
      }
    };
    dfs(dfs, aut.accept, -1, 0, 0);
    const std::vector<BigInt> sphere = group_series(aut.group).taylor(n_max);
    for (int n = 0; n <= n_max; ++n) {
      CensusRow row;
      row.n = n;
      row.sphere = sphere[n];
      for (int k = detail::visit_threshold(eps, n); k <= n; ++k) row.count += good_closed[n][k];
      cumulative += row.count;
      ball += row.sphere;
      row.ball = ball;
      detail::finish_row(row, cumulative);
      rows.push_back(std::move(row));
    }
    return rows;
  }

  // Kernel route: cnt[state][coset][min(good prefixes, kmax)].
  std::vector<std::vector<std::vector<BigInt>>> cnt(
      aut.geo_states,
      std::vector<std::vector<BigInt>>(aut.n_cosets, std::vector<BigInt>(kmax + 1, 0)));
  cnt[aut.start][aut.accept][0] = 1;
  for (int n = 0;; ++n) {
    CensusRow row;
    row.n = n;
    const int need = detail::visit_threshold(eps, n);
    for (int s = 0; s < aut.geo_states; ++s)
      for (int c = 0; c < aut.n_cosets; ++c)
        for (int k = 0; k <= kmax; ++k) {
          row.sphere += cnt[s][c][k];
          if (c == aut.accept && k >= need) row.count += cnt[s][c][k];
        }
    cumulative += row.count;
    ball += row.sphere;
    row.ball = ball;
    detail::finish_row(row, cumulative);
    rows.push_back(std::move(row));
    if (n == n_max) break;
    std::vector<std::vector<std::vector<BigInt>>> next(
        aut.geo_states,
        std::vector<std::vector<BigInt>>(aut.n_cosets, std::vector<BigInt>(kmax + 1, 0)));
    for (int s = 0; s < aut.geo_states; ++s)
      for (int c = 0; c < aut.n_cosets; ++c)
        for (int k = 0; k <= kmax; ++k) {
          if (cnt[s][c][k] == 0) continue;
          for (int t = 0; t < ng; ++t) {
            const int s2 = aut.geo_next[s][t];
            if (s2 < 0) continue;
            const int c2 = aut.coset_next[c][t];
            const int d = aut.coset_dist[c2];
            const int k2 = std::min(kmax, k + (d >= 0 && d <= M ? 1 : 0));
            next[s2][c2][k2] += cnt[s][c][k];
          }
        }
    cnt = std::move(next);
  }
  return rows;
}

// Members of S^n with subgroup length at most D times their ambient length,
// for n = 0..n_max, by walking closed paths of the folded graph and counting
// crossings of non-tree edges.
inline std::vector<CensusRow> ud_census(const StallingsGraph& graph, double D, int n_max,
                                        std::int64_t cap = 50'000'000) {
  if (n_max < 0 || D < 0.0) throw ConfigError("bad distortion census parameters");
  const Group& g = graph.ambient;
  const int ng = static_cast<int>(g.generators().size());
  std::vector<BigInt> counts(n_max + 1, 0);
  std::int64_t budget = cap;
  auto dfs = [&](auto&& self, int v2, int last, int depth, int crossings) -> void {
    if (--budget < 0) throw BudgetError("census enumeration cap exceeded");
    if (v2 == graph.base && crossings <= D * depth + 1e-9) ++counts[depth];
    if (depth == n_max) return;
    for (int t = 0; t < ng; ++t) {
      if (last >= 0 && g.inverse_gen(t) == last) continue;
      const int w = graph.edge[v2][t];
      if (w < 0) continue;
      self(self, w, t, depth + 1, crossings + (graph.edge_basis[v2][t] >= 0 ? 1 : 0));
    }
  };
  dfs(dfs, graph.base, -1, 0, 0);

  const std::vector<BigInt> sphere = group_series(g).taylor(n_max);
  std::vector<CensusRow> rows;
  BigInt cumulative = 0, ball = 0;
  for (int n = 0; n <= n_max; ++n) {
    CensusRow row;
    row.n = n;
    row.count = counts[n];
    row.sphere = sphere[n];
    cumulative += row.count;
    ball += row.sphere;
    row.ball = ball;
    detail::finish_row(row, cumulative);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct SemigroupSlices {
  Group group;  // free
  int letter = 0;  // generator id both endpoints of every slice word share
  std::vector<int> lengths;
  std::vector<std::vector<Element>> words;  // materialized slices
};

inline SemigroupSlices semigroup_slices(const Group& g, const std::string& letter_name,
                                        std::vector<int> lengths) {
  if (g.kind() != Group::Kind::Free)
    throw ConfigError("subsemigroup slices need a free ambient group");
  SemigroupSlices out;
  out.group = g;
  out.letter = g.gen_id_by_name(letter_name);
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  const int ng = static_cast<int>(g.generators().size());
  for (int len : lengths) {
    if (len < 1) throw ConfigError("slice lengths must be positive");
    std::vector<Element> slice;
    Element w;
    w.t.push_back(out.letter);
    auto rec = [&](auto&& self) -> void {
      if (static_cast<int>(w.t.size()) == len) {
        if (w.t.back() == out.letter) slice.push_back(w);
        return;
      }
      for (int t = 0; t < ng; ++t) {
        if (g.inverse_gen(t) == w.t.back()) continue;
        w.t.push_back(t);
        self(self);
        w.t.pop_back();
      }
    };
    rec(rec);
    out.lengths.push_back(len);
    out.words.push_back(std::move(slice));
  }
  return out;
}

// A reduced word lies in the subsemigroup iff it splits into consecutive
// blocks, each of a slice length with the designated letter at both ends;
// subwords of reduced words are geodesic, so no other condition remains, and
// concatenations of slice words never cancel.
inline bool semigroup_member(const SemigroupSlices& sl, const Element& w) {
  sl.group.validate_element(w);
  const int n = static_cast<int>(w.t.size());
  if (n == 0) return false;
  std::vector<char> good(n + 1, 0);
  good[0] = 1;
  for (int m = 1; m <= n; ++m)
    for (int len : sl.lengths) {
      if (len > m || !good[m - len]) continue;
      if (w.t[m - len] == sl.letter && w.t[m - 1] == sl.letter) {
        good[m] = 1;
        break;
      }
    }
  return good[n] != 0;
}

// Exact Card S^n intersected with the subsemigroup for n = 0..n_max, by a
// depth-first walk over reduced words carrying the block-splitting state.
inline std::vector<CensusRow> semigroup_density(const SemigroupSlices& sl, int n_max,
                                                std::int64_t cap = 50'000'000) {
  if (n_max < 0) throw ConfigError("census length must be nonnegative");
  const Group& g = sl.group;
  const int ng = static_cast<int>(g.generators().size());
  std::vector<std::int64_t> counts(n_max + 1, 0);
  std::vector<int> stack;
  std::vector<char> good(n_max + 1, 0);
  good[0] = 1;
  std::int64_t budget = cap;
  auto dfs = [&](auto&& self) -> void {
    if (--budget < 0) throw BudgetError("census enumeration cap exceeded");
    const int m = static_cast<int>(stack.size());
    if (m > 0) {
      good[m] = 0;
      for (int len : sl.lengths) {
        if (len > m || !good[m - len]) continue;
        if (stack[m - len] == sl.letter && stack[m - 1] == sl.letter) {
          good[m] = 1;
          break;
        }
      }
      if (good[m]) ++counts[m];
    }
    if (m == n_max) return;
    for (int t = 0; t < ng; ++t) {
      if (m > 0 && g.inverse_gen(t) == stack.back()) continue;
      stack.push_back(t);
      self(self);
      stack.pop_back();
    }
  };
  dfs(dfs);

  const std::vector<BigInt> sphere = group_series(g).taylor(n_max);
  std::vector<CensusRow> rows;
  BigInt cumulative = 0, ball = 0;
  for (int n = 0; n <= n_max; ++n) {
    CensusRow row;
    row.n = n;
    row.count = counts[n];
    row.sphere = sphere[n];
    cumulative += row.count;
    ball += row.sphere;
    row.ball = ball;
    detail::finish_row(row, cumulative);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct ReturnRow {
  int n = 0;
  BigInt count = 0;
  double normalized = 0.0;  // count times e^{-n v}
};

// Length-n lifted paths from (state, trivial coset) back to itself with at
// least eps0*n visits to that pair, for n = 0..n_max. The visit coordinate
// saturates at the largest threshold; only the threshold event matters.
inline std::vector<ReturnRow> lifted_return_experiment(const CosetAutomaton& aut, int state,
                                                       int n_max, double eps0) {
  if (aut.window < 0)
    throw ConfigError("return experiment needs an integer coset window");
  if (state < 0 || state >= aut.geo_states) throw ConfigError("bad automaton state");
  if (n_max < 0 || eps0 < 0.0 || eps0 > 1.0)
    throw ConfigError("bad return experiment parameters");
  aut.require_length(n_max);
  const int ng = static_cast<int>(aut.group.generators().size());
  const int kmax = detail::visit_threshold(eps0, n_max);

  std::vector<std::vector<std::vector<BigInt>>> cnt(
      aut.geo_states,
      std::vector<std::vector<BigInt>>(aut.n_cosets, std::vector<BigInt>(kmax + 1, 0)));
  cnt[state][aut.accept][0] = 1;
  std::vector<ReturnRow> rows;
  for (int n = 0;; ++n) {
    ReturnRow row;
    row.n = n;
    const int need = detail::visit_threshold(eps0, n);
    for (int k = need; k <= kmax; ++k) row.count += cnt[state][aut.accept][k];
    row.normalized =
        row.count > 0 ? std::exp(std::log(row.count.convert_to<double>()) - n * aut.v) : 0.0;
    rows.push_back(std::move(row));
    if (n == n_max) break;
    std::vector<std::vector<std::vector<BigInt>>> next(
        aut.geo_states,
        std::vector<std::vector<BigInt>>(aut.n_cosets, std::vector<BigInt>(kmax + 1, 0)));
    for (int s = 0; s < aut.geo_states; ++s)
      for (int c = 0; c < aut.n_cosets; ++c)
        for (int k = 0; k <= kmax; ++k) {
          if (cnt[s][c][k] == 0) continue;
          for (int t = 0; t < ng; ++t) {
            const int s2 = aut.geo_next[s][t];
            if (s2 < 0) continue;
            const int c2 = aut.coset_next[c][t];
            const int k2 =
                std::min(kmax, k + (s2 == state && c2 == aut.accept ? 1 : 0));
            next[s2][c2][k2] += cnt[s][c][k];
          }
        }
    cnt = std::move(next);
  }
  return rows;
}

}  // namespace walklab
