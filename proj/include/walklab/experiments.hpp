#pragma once

// Experiment registry behind the command line: configuration loading for
// groups, measures, subgroups, and degeneration families, and one runner per
// subcommand. Every runner returns an ExperimentReport whose config block
// echoes exactly what was run; runners that draw random numbers stamp the
// seed into the report.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "walklab/census.hpp"
#include "walklab/degeneration.hpp"
#include "walklab/report.hpp"
#include "walklab/walk.hpp"

namespace walklab {

struct RunOptions {
  int nmax = -1;  // negative picks the per-experiment default
  std::int64_t cap = DEFAULT_SUPPORT_CAP;
  std::int64_t horizon = 10000;
  int replicas = 2000;
  std::uint64_t seed = 1;
};

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad JSON in " + path + ": " + e.what());
  }
}

inline Group group_from_file(const std::string& path) {
  try {
    return Group::from_json(load_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad group config " + path + ": " + e.what());
  }
}

inline FinMeasure measure_from_file(const Group& g, const std::string& path,
                                    std::int64_t cap = DEFAULT_SUPPORT_CAP) {
  try {
    return measure_from_json(g, load_json_file(path), cap);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad measure config " + path + ": " + e.what());
  }
}

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Exact integer cells stay exact: decimal strings once they outgrow int64.
inline nlohmann::json bigint_cell(const BigInt& v) {
  static const BigInt lo = std::numeric_limits<std::int64_t>::min();
  static const BigInt hi = std::numeric_limits<std::int64_t>::max();
  if (v >= lo && v <= hi) return v.convert_to<std::int64_t>();
  return v.str();
}

}  // namespace detail

inline ExperimentReport run_growth(const Group& g, const RunOptions& opt) {
  const detail::Stopwatch timer;
  const int nmax = opt.nmax >= 0 ? opt.nmax : 40;
  ExperimentReport rep;
  rep.id = "growth";
  rep.config = {{"group", g.to_json()}, {"nmax", nmax}};
  const GrowthReport gr = growth_rate(group_series(g), nmax);
  rep.summary["v"] = gr.v;
  rep.summary["zstar"] = gr.zstar;
  rep.verdicts["polynomial_growth"] = gr.polynomial_growth;
  if (!gr.flag.empty()) rep.verdicts["flag"] = gr.flag;
  ReportTable& t = rep.add_table("growth", {"n", "sphere", "ball", "log_rate"});
  for (std::size_t n = 0; n < gr.sphere.size(); ++n)
    t.rows.push_back({static_cast<std::int64_t>(n), detail::bigint_cell(gr.sphere[n]),
                      detail::bigint_cell(gr.ball[n]), gr.log_rate[n]});
  rep.plot = {"growth", "n", {"log_rate"}};
  rep.wall_time_s = timer.seconds();
  return rep;
}

inline ExperimentReport run_enumerate(const Group& g, const RunOptions& opt) {
  const detail::Stopwatch timer;
  const int nmax = opt.nmax >= 0 ? opt.nmax : 8;
  ExperimentReport rep;
  rep.id = "enumerate";
  rep.config = {{"group", g.to_json()}, {"nmax", nmax}, {"cap", opt.cap}};
  const auto levels = g.spheres_up_to(nmax, opt.cap);
  const std::vector<BigInt> series = group_series(g).taylor(nmax);
  ReportTable& t =
      rep.add_table("enumeration", {"n", "sphere", "sphere_series", "ball", "log_rate"});
  bool agree = true;
  BigInt ball = 0;
  for (int n = 0; n <= nmax; ++n) {
    const BigInt count = static_cast<long>(levels[n].size());
    ball += count;
    if (count != series[n]) agree = false;
    t.rows.push_back({n, detail::bigint_cell(count), detail::bigint_cell(series[n]),
                      detail::bigint_cell(ball),
                      n == 0 ? 0.0 : std::log(ball.convert_to<double>()) / n});
  }
  rep.verdicts["series_matches_enumeration"] = agree;
  rep.plot = {"enumeration", "n", {"log_rate"}};
  rep.wall_time_s = timer.seconds();
  return rep;
}

inline ExperimentReport run_walk(const FinMeasure& m, const RunOptions& opt) {
  const detail::Stopwatch timer;
  ExperimentReport rep;
  rep.id = "walk";
  rep.config = {{"group", m.group.to_json()},
                {"measure", measure_to_json(m)},
                {"horizon", opt.horizon},
                {"replicas", opt.replicas},
                {"seed", opt.seed}};
  rep.seed = opt.seed;
  const DriftEstimate d = estimate_drift({m, opt.horizon, opt.replicas, opt.seed, 0});
  rep.summary["ell"] = d.estimate;
  rep.summary["ell_err"] = d.std_error;
  rep.summary["method"] = d.method;
  ReportTable& t = rep.add_table("drift", {"n", "mean_length_over_n"});
  for (const auto& [n, val] : d.checkpoints) t.rows.push_back({n, val});
  rep.plot = {"drift", "n", {"mean_length_over_n"}};
  rep.wall_time_s = timer.seconds();
  return rep;
}

inline ExperimentReport run_entropy(const FinMeasure& m, const RunOptions& opt) {
  const detail::Stopwatch timer;
  const int nmax = opt.nmax >= 0 ? opt.nmax : 12;
  ExperimentReport rep;
  rep.id = "entropy";
  rep.config = {{"group", m.group.to_json()},
                {"measure", measure_to_json(m)},
                {"nmax", nmax},
                {"cap", opt.cap}};
  const EntropyEstimate e = estimate_entropy(m, nmax, opt.cap);
  rep.summary["h"] = e.estimate;
  rep.summary["h_err"] = e.std_error;
  rep.summary["n_achieved"] = e.n_achieved;
  rep.summary["method"] = e.method;
  rep.verdicts["capped"] = e.capped;
  ReportTable& t = rep.add_table("entropy", {"n", "H", "H_over_n", "increment", "defect", "L"});
  for (int n = 0; n <= e.n_achieved; ++n)
    t.rows.push_back({n, e.H[n], e.upper[n], e.increment[n], e.defect[n], e.L[n]});
  rep.plot = {"entropy", "n", {"increment", "H_over_n"}};
  rep.wall_time_s = timer.seconds();
  return rep;
}

inline ExperimentReport run_ratio(const FinMeasure& m, const RunOptions& opt) {
  const detail::Stopwatch timer;
  const int nmax = opt.nmax >= 0 ? opt.nmax : 12;
  const ReportBudget budget{nmax, opt.cap, opt.horizon, opt.replicas, opt.seed};
  ExperimentReport rep;
  rep.id = "ratio";
  rep.config = {{"group", m.group.to_json()}, {"measure", measure_to_json(m)},
                {"nmax", nmax},               {"cap", opt.cap},
                {"horizon", opt.horizon},     {"replicas", opt.replicas},
                {"seed", opt.seed}};
  rep.seed = opt.seed;
  const FundamentalReport r = fundamental_report(m, budget);
  rep.summary["h"] = r.h;
  rep.summary["h_err"] = r.h_err;
  rep.summary["ell"] = r.ell;
  rep.summary["ell_err"] = r.ell_err;
  rep.summary["v"] = r.v;
  rep.summary["ratio"] = r.ratio;
  rep.summary["ratio_err"] = r.ratio_err;
  rep.summary["h_method"] = r.h_method;
  rep.summary["ell_method"] = r.ell_method;
  rep.verdicts["verdict"] = r.verdict;
  rep.verdicts["ratio_defined"] = r.ratio_defined;
  rep.verdicts["polynomial_growth"] = r.polynomial_growth;
  rep.verdicts["tree_route"] = r.tree_route;
  rep.verdicts["projected_finite_part"] = r.projected_finite_part;
  if (r.tree_route) {
    rep.summary["green_check"] = r.green_check;
    rep.summary["green_check_err"] = r.green_check_err;
    ReportTable& t = rep.add_table("first_passage", {"letter", "F", "green", "nu", "pi"});
    const Group base = m.group.kind() == Group::Kind::DirectWithFinite ? m.group.dwf_base() : m.group;
    for (std::size_t s = 0; s < r.tree.F.size(); ++s)
      t.rows.push_back({base.generators()[s].name, r.tree.F[s], r.tree.green[s], r.tree.nu[s],
                        r.tree.pi[s]});
  } else {
    ReportTable& te = rep.add_table("entropy", {"n", "H", "H_over_n", "increment", "defect", "L"});
    for (int n = 0; n <= r.entropy.n_achieved; ++n)
      te.rows.push_back({n, r.entropy.H[n], r.entropy.upper[n], r.entropy.increment[n],
                         r.entropy.defect[n], r.entropy.L[n]});
    ReportTable& td = rep.add_table("drift", {"n", "mean_length_over_n"});
    for (const auto& [n, val] : r.drift.checkpoints) td.rows.push_back({n, val});
    rep.plot = {"entropy", "n", {"increment"}};
  }
  rep.wall_time_s = timer.seconds();
  return rep;
}

namespace detail {

inline void census_rows_table(ExperimentReport& rep, const std::vector<CensusRow>& rows) {
  ReportTable& t =
      rep.add_table("census", {"n", "count", "sphere", "ball", "density", "log_density"});
  for (const CensusRow& row : rows)
    t.rows.push_back({row.n, bigint_cell(row.count), bigint_cell(row.sphere),
                      bigint_cell(row.ball), row.density, row.log_density});
  rep.plot = {"census", "n", {"density"}};
}

}  // namespace detail

// Subgroup censuses, plus subsemigroup slice densities when the spec file says
// {"type": "semigroup_slices", "letter": ..., "lengths": [...]}.
inline ExperimentReport run_census(const Group& g, const nlohmann::json& spec,
                                   const RunOptions& opt) {
  const detail::Stopwatch timer;
  const int nmax = opt.nmax >= 0 ? opt.nmax : 16;
  ExperimentReport rep;
  rep.id = "census";
  rep.config = {{"group", g.to_json()}, {"subgroup", spec}, {"nmax", nmax}, {"cap", opt.cap}};
  if (spec.value("type", "") == "semigroup_slices") {
    const SemigroupSlices sl = semigroup_slices(g, spec.at("letter").get<std::string>(),
                                                spec.at("lengths").get<std::vector<int>>());
    detail::census_rows_table(rep, semigroup_density(sl, nmax, opt.cap));
  } else {
    const SubgroupSpec sub = subgroup_from_json(g, spec);
    int window = -1;
    if (const auto* ik = std::get_if<IntegerKernel>(&sub)) {
      std::int64_t step = 1;
      for (std::int64_t m : ik->image) step = std::max(step, std::abs(m));
      window = static_cast<int>(step * nmax);  // no reachable sum leaves the window
    }
    const CosetAutomaton aut = build_coset_automaton(g, sub, window);
    rep.summary["v"] = aut.v;
    rep.summary["rho"] = aut.rho;
    detail::census_rows_table(rep, subgroup_census(aut, nmax));
  }
  rep.wall_time_s = timer.seconds();
  return rep;
}

// Family specs name a builder and its epsilon grid. "interpolation" mixes two
// configured measures as (1-eps) m0 + eps m1; "closing_family" is the direct
// product family with masses 1/2-eps-eps^2 on the identity and the finite
// flip, eps on the first base generator pair, and eps^2 on the second.
inline std::function<FinMeasure(double)> family_from_json(const Group& g,
                                                          const nlohmann::json& spec,
                                                          std::int64_t cap) {
  const std::string builder = spec.value("builder", "interpolation");
  if (builder == "interpolation") {
    const FinMeasure m0 = measure_from_json(g, spec.at("m0"), cap);
    const FinMeasure m1 = measure_from_json(g, spec.at("m1"), cap);
    return [m0, m1](double eps) { return interpolation(m0, m1, eps); };
  }
  if (builder == "closing_family") {
    if (g.kind() != Group::Kind::DirectWithFinite ||
        g.dwf_finite().finite_data().order != 2 || g.dwf_base().kind() != Group::Kind::Free ||
        g.dwf_base().free_rank() != 2)
      throw ConfigError("closing_family needs order-two times free rank-two");
    return [g](double eps) {
      const double head = 0.5 - eps - eps * eps;
      return FinMeasure::from_atoms(g, {{g.identity_element(), head},
                                        {g.generator(4), head},
                                        {g.generator(0), eps},
                                        {g.generator(1), eps},
                                        {g.generator(2), eps * eps},
                                        {g.generator(3), eps * eps}});
    };
  }
  throw ConfigError("unknown family builder: " + builder);
}

inline ExperimentReport run_degenerate(const Group& g, const nlohmann::json& spec,
                                       const RunOptions& opt) {
  const detail::Stopwatch timer;
  const int nmax = opt.nmax >= 0 ? opt.nmax : 12;
  std::vector<double> grid;
  try {
    grid = spec.at("grid").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("family spec needs an epsilon grid: ") + e.what());
  }
  const auto family = family_from_json(g, spec, opt.cap);
  const ReportBudget budget{nmax, opt.cap, opt.horizon, opt.replicas, opt.seed};

  ExperimentReport rep;
  rep.id = "degenerate";
  rep.config = {{"group", g.to_json()}, {"family", spec},         {"nmax", nmax},
                {"cap", opt.cap},       {"horizon", opt.horizon}, {"replicas", opt.replicas},
                {"seed", opt.seed}};
  rep.seed = opt.seed;
  const RatioScan scan = ratio_scan(family, grid, budget);
  ReportTable& t = rep.add_table(
      "scan", {"eps", "ok", "error", "h", "h_err", "ell", "ell_err", "v", "ratio", "ratio_err",
               "ratio_over_v", "ratio_over_v_err", "verdict", "seed"});
  int defined = 0;
  for (const RatioPoint& p : scan.points) {
    if (p.ratio_defined) ++defined;
    t.rows.push_back({p.eps, p.ok, p.error, p.h, p.h_err, p.ell, p.ell_err, p.v, p.ratio,
                      p.ratio_err, p.ratio_over_v, p.ratio_over_v_err, p.verdict, p.seed});
  }
  rep.summary["points"] = static_cast<int>(scan.points.size());
  rep.summary["defined_points"] = defined;
  rep.verdicts["ratio_decreasing"] = scan.decreasing;
  rep.plot = {"scan", "eps", {"ratio"}};
  rep.wall_time_s = timer.seconds();
  return rep;
}

}  // namespace walklab
