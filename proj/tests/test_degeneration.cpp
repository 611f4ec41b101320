// Tests for the degeneration laboratory. Decompositions are checked by exact
// atomwise reconstruction, the block sampler against its geometric length law
// and the truncated explicit mixture, the finite-group mixing table against
// the discrete Fourier rate, the sup-norm tables against direct convolution
// and the local limit value, and the ratio scans against exact tree values.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "walklab/degeneration.hpp"

using namespace walklab;

namespace {

FinMeasure meas(const Group& g, const std::vector<std::pair<std::string, double>>& atoms) {
  std::vector<std::pair<Element, double>> raw;
  for (const auto& [w, m] : atoms) raw.emplace_back(g.parse_word(w), m);
  return FinMeasure::from_atoms(g, std::move(raw));
}

void check_reconstruction(const FinMeasure& mu, const Decomposition& d) {
  REQUIRE(d.ok);
  const FinMeasure back = interpolation(d.alpha, d.beta, d.eps);
  for (const auto& [el, w] : mu.atoms)
    REQUIRE(back.mass_of(el) == Catch::Approx(w).margin(1e-12));
  for (const auto& [el, w] : back.atoms)
    REQUIRE(mu.mass_of(el) == Catch::Approx(w).margin(1e-12));
}

}  // namespace

TEST_CASE("elementary and finite subgroup detection across models") {
  const Group f2 = Group::free_group(2);
  auto els = [&](const Group& g, const std::vector<std::string>& ws) {
    std::vector<Element> out;
    for (const auto& w : ws) out.push_back(g.parse_word(w));
    return out;
  };

  CHECK(generate_elementary_subgroup(f2, els(f2, {"a a", "a^-1"})));
  CHECK(generate_elementary_subgroup(f2, els(f2, {"a b a^-1"})));
  CHECK(generate_elementary_subgroup(f2, els(f2, {"e"})));
  CHECK_FALSE(generate_elementary_subgroup(f2, els(f2, {"a", "b a b^-1"})));
  CHECK_FALSE(generate_elementary_subgroup(f2, els(f2, {"a", "b"})));
  CHECK_FALSE(generate_finite_subgroup(f2, els(f2, {"a"})));
  CHECK(generate_finite_subgroup(f2, els(f2, {"e"})));

  const Group zz = Group::free_product({Group::cyclic(2), Group::cyclic(4)});
  CHECK(generate_elementary_subgroup(zz, els(zz, {"a"})));
  CHECK(generate_finite_subgroup(zz, els(zz, {"a"})));
  CHECK(generate_finite_subgroup(zz, els(zz, {"b", "b b"})));
  CHECK_FALSE(generate_elementary_subgroup(zz, els(zz, {"a", "b"})));
  CHECK_FALSE(generate_finite_subgroup(zz, els(zz, {"a b"})));
  CHECK(generate_elementary_subgroup(zz, els(zz, {"a b a"})));

  // the infinite dihedral group is virtually cyclic, so everything qualifies
  const Group dih = Group::free_product({Group::cyclic(2), Group::cyclic(2)});
  CHECK(generate_elementary_subgroup(dih, els(dih, {"a", "b"})));
  CHECK_FALSE(generate_finite_subgroup(dih, els(dih, {"a", "b"})));

  const Group z = Group::free_group(1);
  CHECK(generate_elementary_subgroup(z, els(z, {"a", "a a a"})));

  const Group dwf = Group::direct_with_finite(Group::cyclic(2), Group::free_group(2));
  const Element flip = dwf.generator(4);
  CHECK(generate_elementary_subgroup(dwf, {flip}));
  CHECK(generate_finite_subgroup(dwf, {flip}));
  CHECK(generate_elementary_subgroup(dwf, {flip, dwf.generator(0)}));
  CHECK_FALSE(generate_elementary_subgroup(dwf, {dwf.generator(0), dwf.generator(2)}));
}

TEST_CASE("automatic split on a dominant finite-factor atom") {
  const Group g = Group::free_product({Group::cyclic(2), Group::cyclic(4)});

  // No identity mass: the delta_e half of the recipe cannot be funded, so
  // the split falls back to the plain scaling.
  const FinMeasure mu = meas(g, {{"a", 0.9}, {"b", 0.05}, {"b^-1", 0.05}});
  const Decomposition d = decompose(mu);
  REQUIRE(d.ok);
  CHECK_FALSE(d.finite_recipe);
  CHECK(d.eps == Catch::Approx(0.1).margin(1e-14));
  CHECK(d.alpha.mass_of(g.parse_word("a")) == Catch::Approx(1.0).margin(1e-14));
  CHECK(d.beta.mass_of(g.parse_word("b")) == Catch::Approx(0.5).margin(1e-14));
  CHECK(d.beta.mass_of(g.parse_word("b^-1")) == Catch::Approx(0.5).margin(1e-14));
  CHECK(d.note.find("identity mixing skipped") != std::string::npos);
  check_reconstruction(mu, d);

  // With mu(e) matching the rare mass the full recipe applies.
  const FinMeasure lazy = meas(g, {{"e", 0.1}, {"a", 0.8}, {"b", 0.05}, {"b^-1", 0.05}});
  const Decomposition dl = decompose(lazy);
  REQUIRE(dl.ok);
  CHECK(dl.finite_recipe);
  CHECK(dl.eps == Catch::Approx(0.2).margin(1e-14));
  CHECK(dl.alpha.mass_of(g.parse_word("a")) == Catch::Approx(1.0).margin(1e-14));
  CHECK(dl.beta.mass_of(g.identity_element()) == Catch::Approx(0.5).margin(1e-14));
  CHECK(dl.beta.mass_of(g.parse_word("b")) == Catch::Approx(0.25).margin(1e-14));
  check_reconstruction(lazy, dl);

  // Surplus identity mass stays in alpha.
  const FinMeasure surplus = meas(g, {{"e", 0.3}, {"a", 0.6}, {"b", 0.05}, {"b^-1", 0.05}});
  const Decomposition ds = decompose(surplus);
  REQUIRE(ds.ok);
  CHECK(ds.finite_recipe);
  CHECK(ds.eps == Catch::Approx(0.2).margin(1e-14));
  CHECK(ds.beta.mass_of(g.identity_element()) == Catch::Approx(0.5).margin(1e-14));
  CHECK(ds.alpha.mass_of(g.identity_element()) == Catch::Approx(0.25).margin(1e-14));
  check_reconstruction(surplus, ds);
}

TEST_CASE("automatic split on a dominant cyclic part in the free group") {
  const Group g = Group::free_group(2);
  const FinMeasure mu = meas(g, {{"a", 0.45}, {"a^-1", 0.45}, {"b", 0.05}, {"b^-1", 0.05}});
  const Decomposition d = decompose(mu);
  REQUIRE(d.ok);
  CHECK_FALSE(d.finite_recipe);
  CHECK(d.eps == Catch::Approx(0.1).margin(1e-14));
  CHECK(d.alpha.mass_of(g.parse_word("a")) == Catch::Approx(0.5).margin(1e-14));
  CHECK(d.alpha.mass_of(g.parse_word("a^-1")) == Catch::Approx(0.5).margin(1e-14));
  CHECK(d.beta.mass_of(g.parse_word("b")) == Catch::Approx(0.5).margin(1e-14));
  check_reconstruction(mu, d);
}

TEST_CASE("degenerate and non-decomposable measures") {
  const Group g = Group::free_group(2);

  const Decomposition da = decompose(meas(g, {{"a", 1.0}}));
  CHECK_FALSE(da.ok);
  CHECK(da.degenerate);

  const Decomposition de = decompose(meas(g, {{"e", 1.0}}));
  CHECK_FALSE(de.ok);
  CHECK(de.degenerate);

  // simple random walk: no gap and no elementary heavy side
  const Decomposition ds =
      decompose(meas(g, {{"a", 0.25}, {"a^-1", 0.25}, {"b", 0.25}, {"b^-1", 0.25}}));
  CHECK_FALSE(ds.ok);
  CHECK_FALSE(ds.degenerate);
  CHECK(ds.note.find("no elementary heavy side") != std::string::npos);

  // a gap exists but the heavy side is non-elementary
  const Decomposition dn =
      decompose(meas(g, {{"a", 0.48}, {"b", 0.48}, {"a b", 0.02}, {"b a", 0.02}}));
  CHECK_FALSE(dn.ok);
  CHECK_FALSE(dn.degenerate);
}

TEST_CASE("explicit partitions") {
  const Group g = Group::free_group(2);
  const FinMeasure mu = meas(g, {{"a", 0.45}, {"a^-1", 0.45}, {"b", 0.05}, {"b^-1", 0.05}});

  SplitRule rule;
  rule.heavy = {g.parse_word("a"), g.parse_word("a^-1")};
  const Decomposition d = decompose(mu, rule);
  REQUIRE(d.ok);
  CHECK(d.eps == Catch::Approx(0.1).margin(1e-14));
  check_reconstruction(mu, d);

  // heavy side that drops one of the big atoms still reconstructs
  SplitRule one;
  one.heavy = {g.parse_word("a")};
  const Decomposition d1 = decompose(mu, one);
  REQUIRE(d1.ok);
  CHECK(d1.eps == Catch::Approx(0.55).margin(1e-14));
  check_reconstruction(mu, d1);

  SplitRule bad;
  bad.heavy = {g.parse_word("a"), g.parse_word("b")};
  const Decomposition db = decompose(mu, bad);
  CHECK_FALSE(db.ok);
  CHECK(db.note.find("not elementary") != std::string::npos);

  SplitRule missing;
  missing.heavy = {g.parse_word("a b a")};
  CHECK_THROWS_AS(decompose(mu, missing), ConfigError);
}

TEST_CASE("reconstruction on randomized near-elementary measures") {
  const Group f2 = Group::free_group(2);
  const Group zz = Group::free_product({Group::cyclic(2), Group::cyclic(4)});
  Rng rng(424242);
  for (int trial = 0; trial < 20; ++trial) {
    const double small = 0.005 + 0.02 * rng.next_unit();
    const double lazy = 0.05 + 0.2 * rng.next_unit();
    const double wa = 0.5 + 0.2 * rng.next_unit();
    {
      const double rest = 1.0 - 2.0 * small - lazy;
      const FinMeasure mu = meas(f2, {{"e", lazy},
                                      {"a", wa * rest},
                                      {"a^-1", (1.0 - wa) * rest},
                                      {"b", small},
                                      {"a b a", small}});
      const Decomposition d = decompose(mu);
      REQUIRE(d.ok);
      CHECK_FALSE(d.finite_recipe);
      check_reconstruction(mu, d);
    }
    {
      const double rest = 1.0 - 2.0 * small - lazy;
      const FinMeasure mu = meas(zz, {{"e", lazy},
                                      {"b", wa * rest},
                                      {"b^-1", (1.0 - wa) * rest},
                                      {"a b", small},
                                      {"b a", small}});
      const Decomposition d = decompose(mu);
      REQUIRE(d.ok);
      CHECK(d.finite_recipe == (lazy >= 2.0 * small - 1e-12));
      if (d.finite_recipe)
        CHECK(d.beta.mass_of(zz.identity_element()) == Catch::Approx(0.5).margin(1e-14));
      check_reconstruction(mu, d);
    }
  }
}

TEST_CASE("block sampler length law") {
  const Group g = Group::free_group(2);
  const FinMeasure mu = meas(g, {{"a", 0.45}, {"a^-1", 0.45}, {"b", 0.05}, {"b^-1", 0.05}});
  const LambdaFamily fam = lambda_family(decompose(mu));
  REQUIRE(fam.dec.eps == Catch::Approx(0.1).margin(1e-14));

  Rng rng(7);
  const int R = 100000;
  KahanSum sum, sumsq;
  for (int r = 0; r < R; ++r) {
    std::int64_t steps = 0;
    sample_block(fam, rng, &steps);
    const double len = static_cast<double>(steps + 1);
    sum.add(len);
    sumsq.add(len * len);
  }
  const double mean = sum.value() / R;
  const double var = (sumsq.value() - R * mean * mean) / (R - 1.0);
  const double se = std::sqrt(var / R);
  CHECK(std::abs(mean - 10.0) < 3.0 * se);
  // geometric block length: sd of the alpha-step count is sqrt(1-eps)/eps
  CHECK(std::sqrt(var) == Catch::Approx(std::sqrt(0.9) / 0.1).epsilon(0.02));
}

TEST_CASE("truncated lambda matches block frequencies") {
  const Group g = Group::free_group(2);
  const FinMeasure alpha = meas(g, {{"a", 0.5}, {"a^-1", 0.5}});
  const FinMeasure beta = meas(g, {{"b", 0.5}, {"b^-1", 0.5}});
  const LambdaFamily fam = lambda_family(alpha, beta, 0.25);

  const TruncatedLambda trunc = lambda_truncated(fam);
  CHECK(trunc.n_trunc == 56);
  CHECK(trunc.deficit == Catch::Approx(std::pow(0.75, 57)).epsilon(1e-12));
  CHECK(trunc.deficit < 1e-6);

  std::vector<std::pair<Element, double>> atoms(trunc.measure.atoms.begin(),
                                                trunc.measure.atoms.end());
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  atoms.resize(20);

  std::map<Element, int> counts;
  Rng rng(11);
  const int R = 100000;
  for (int r = 0; r < R; ++r) ++counts[sample_block(fam, rng)];
  for (const auto& [el, p] : atoms) {
    const auto it = counts.find(el);
    const double freq = it == counts.end() ? 0.0 : static_cast<double>(it->second) / R;
    const double se = std::sqrt(p * (1.0 - p) / R);
    CHECK(std::abs(freq - p) < 3.0 * se);
  }
}

TEST_CASE("truncated lambda at eps one is beta") {
  const Group g = Group::free_group(2);
  const FinMeasure alpha = meas(g, {{"a", 1.0}});
  const FinMeasure beta = meas(g, {{"b", 0.7}, {"b^-1", 0.3}});
  const LambdaFamily fam = lambda_family(alpha, beta, 1.0);
  const TruncatedLambda trunc = lambda_truncated(fam);
  CHECK(trunc.deficit == 0.0);
  CHECK(trunc.n_trunc == 0);
  REQUIRE(trunc.measure.atoms.size() == 2);
  CHECK(trunc.measure.mass_of(g.parse_word("b")) == Catch::Approx(0.7).margin(1e-14));

  Rng rng(3);
  for (int r = 0; r < 50; ++r) {
    std::int64_t steps = -1;
    const Element x = sample_block(fam, rng, &steps);
    CHECK(steps == 0);
    CHECK(x.t.size() == 1);
  }
}

TEST_CASE("drift identity between mu and its block measure") {
  const Group g = Group::free_group(2);
  const FinMeasure mu = meas(g, {{"a", 0.45}, {"a^-1", 0.45}, {"b", 0.05}, {"b^-1", 0.05}});
  const LambdaFamily fam = lambda_family(decompose(mu));

  ReportBudget budget;
  budget.horizon = 12000;
  budget.replicas = 400;
  budget.seed = 5;
  const LambdaStats st = lambda_stats(fam, budget);

  CHECK(st.eps == Catch::Approx(0.1).margin(1e-14));
  CHECK(std::abs(st.mean_block_len - 10.0) < 0.2);
  CHECK(st.identity_ok);
  CHECK(st.identity_gap < 3.0 * st.identity_err + 1e-9);
  CHECK(st.ell_lambda > 0.5);
  // blocks here are words of length up to the truncation, far past the
  // tractable range for convolution entropy
  CHECK_FALSE(st.h_available);
}

TEST_CASE("block entropy via the truncated mixture on a finite-recipe split") {
  const Group g = Group::free_product({Group::cyclic(2), Group::cyclic(4)});
  const FinMeasure mu = meas(g, {{"e", 0.1}, {"a", 0.8}, {"b", 0.05}, {"b^-1", 0.05}});
  const LambdaFamily fam = lambda_family(decompose(mu));
  REQUIRE(fam.dec.finite_recipe);
  REQUIRE(fam.dec.eps == Catch::Approx(0.2).margin(1e-14));

  ReportBudget budget;
  budget.horizon = 8000;
  budget.replicas = 400;
  budget.seed = 13;
  const LambdaStats st = lambda_stats(fam, budget);
  CHECK(st.h_available);
  CHECK(st.h_lambda > 0.0);
  CHECK(st.identity_ok);
  CHECK(std::abs(st.mean_block_len - 5.0) < 0.1);
}

TEST_CASE("block walk at eps one reduces to beta") {
  const Group g = Group::free_group(2);
  const FinMeasure alpha = meas(g, {{"a", 1.0}});
  const FinMeasure beta = meas(g, {{"b", 1.0}});
  const LambdaFamily fam = lambda_family(alpha, beta, 1.0);
  ReportBudget budget;
  budget.horizon = 200;
  budget.replicas = 50;
  const LambdaStats st = lambda_stats(fam, budget);
  CHECK(st.ell_lambda == Catch::Approx(1.0).margin(1e-12));
  CHECK(st.ell_lambda_err == Catch::Approx(0.0).margin(1e-12));
  CHECK(st.mu_drift.estimate == Catch::Approx(1.0).margin(1e-12));
  CHECK(st.identity_ok);
  CHECK(st.mean_block_len == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("virtually cyclic block drift scales like inverse square root") {
  const Group g = Group::free_group(2);
  const FinMeasure alpha = meas(g, {{"a", 0.5}, {"a^-1", 0.5}});
  const FinMeasure beta = meas(g, {{"b", 0.5}, {"b^-1", 0.5}});

  ReportBudget budget;
  budget.horizon = 12000;
  budget.replicas = 300;
  budget.seed = 9;
  const LambdaStats s1 = lambda_stats(lambda_family(alpha, beta, 0.1), budget);
  const LambdaStats s2 = lambda_stats(lambda_family(alpha, beta, 0.01), budget);

  const double n1 = s1.ell_lambda * std::sqrt(0.1);
  const double n2 = s2.ell_lambda * std::sqrt(0.01);
  CHECK(n1 / n2 > 0.5);
  CHECK(n1 / n2 < 2.0);
  CHECK(s1.identity_ok);
  CHECK(s2.identity_ok);
}

TEST_CASE("mixing decay on the four element cycle matches the Fourier rate") {
  const Group g = Group::cyclic(4);
  const FinMeasure mu = meas(g, {{"e", 0.8}, {"a", 0.1}, {"a^-1", 0.1}});
  const MixingReport rep = mixing_decay(mu, 200);

  REQUIRE(rep.dist.size() == 201);
  CHECK(rep.eta == Catch::Approx(0.2).margin(1e-14));
  // characters give eigenvalues 0.8, 0.6, 0.8 away from the trivial one
  for (int n = 0; n <= 60; ++n) {
    const double exact =
        std::sqrt((2.0 * std::pow(0.8, 2 * n) + std::pow(0.6, 2 * n)) / 4.0);
    REQUIRE(rep.dist[n] == Catch::Approx(exact).margin(1e-12));
  }
  REQUIRE(rep.fitted);
  CHECK(rep.fit_lo == 20);
  CHECK(rep.fit_hi == 200);
  CHECK(rep.rho == Catch::Approx(0.8).margin(1e-5));
  CHECK(rep.c0 == Catch::Approx(std::sqrt(0.5)).margin(1e-4));
  CHECK(rep.rho <= rep.rho_bound + 1e-9);
}

TEST_CASE("mixing decay trivial cases and rate bound battery") {
  const Group z4 = Group::cyclic(4);
  const Element a = z4.parse_word("a");
  const FinMeasure pi = FinMeasure::from_atoms(
      z4, {{z4.identity_element(), 0.25}, {a, 0.25}, {z4.mul(a, a), 0.25}, {z4.inv(a), 0.25}});
  const MixingReport rp = mixing_decay(pi, 30);
  CHECK(rp.dist[0] == Catch::Approx(std::sqrt(0.75)).margin(1e-14));
  for (int n = 1; n <= 30; ++n) CHECK(rp.dist[n] < 1e-14);
  CHECK_FALSE(rp.fitted);

  const Group z2 = Group::cyclic(2);
  const MixingReport rh = mixing_decay(meas(z2, {{"e", 0.5}, {"a", 0.5}}), 10);
  CHECK(rh.dist[0] == Catch::Approx(std::sqrt(0.5)).margin(1e-14));
  for (int n = 1; n <= 10; ++n) CHECK(rh.dist[n] < 1e-15);

  // stay in the range where 1-eta beats |1-2*eta|, so the fitted rate is 1-eta
  for (const double eta : {0.1, 0.3, 0.5, 0.6}) {
    const FinMeasure mu = meas(z4, {{"e", 1.0 - eta}, {"a", eta / 2.0}, {"a^-1", eta / 2.0}});
    const MixingReport rep = mixing_decay(mu, 200);
    REQUIRE(rep.fitted);
    CHECK(rep.rho < 1.0);
    CHECK(rep.rho <= rep.rho_bound + 1e-9);
    CHECK(rep.rho == Catch::Approx(1.0 - eta).margin(1e-4));
  }

  const Group f2 = Group::free_group(2);
  CHECK_THROWS_AS(mixing_decay(meas(f2, {{"a", 1.0}}), 10), ConfigError);
}

TEST_CASE("lazy walk on the integers approaches the local limit value") {
  const Group z = Group::free_group(1);
  const FinMeasure mu = meas(z, {{"e", 0.5}, {"a", 0.25}, {"a^-1", 0.25}});
  const SupnormReport rep = vc_supnorm_decay(mu, 10000);

  REQUIRE(rep.sup.size() == 10001);
  CHECK(rep.eta == Catch::Approx(0.5).margin(1e-14));
  CHECK(rep.lazy_ok);
  CHECK_FALSE(rep.degenerate);

  // exact small-n cross-check against group convolution
  FinMeasure p = mu;
  for (int n = 1; n <= 10; ++n) {
    double m = 0.0;
    for (const auto& a : p.atoms) m = std::max(m, a.second);
    REQUIRE(rep.sup[n] == Catch::Approx(m).margin(1e-14));
    if (n < 10) p = convolve(p, mu);
  }

  CHECK(std::sqrt(100.0) * rep.sup[100] == Catch::Approx(0.56348).margin(1e-4));
  CHECK(std::sqrt(10000.0) * rep.sup[10000] == Catch::Approx(0.56418).margin(1e-4));
  CHECK(std::abs(std::sqrt(10000.0) * rep.sup[10000] - 1.0 / std::sqrt(M_PI)) < 1e-3);
  // the normalized column sqrt(eta n) sup stays bounded
  for (int n = 100; n <= 10000; n += 37) CHECK(rep.normalized[n] < 1.0);
}

TEST_CASE("dihedral reflection walk sup-norm battery") {
  const Group dih = Group::free_product({Group::cyclic(2), Group::cyclic(2)});
  const FinMeasure mu = meas(dih, {{"e", 0.5}, {"a", 0.25}, {"b", 0.25}});
  const SupnormReport rep = vc_supnorm_decay(mu, 10000);
  CHECK(rep.lazy_ok);

  FinMeasure p = mu;
  for (int n = 1; n <= 10; ++n) {
    double m = 0.0;
    for (const auto& a : p.atoms) m = std::max(m, a.second);
    REQUIRE(rep.sup[n] == Catch::Approx(m).margin(1e-14));
    if (n < 10) p = convolve(p, mu);
  }

  double worst = 0.0;
  for (int n = 100; n <= 10000; ++n)
    worst = std::max(worst, std::sqrt(static_cast<double>(n)) * rep.sup[n]);
  CHECK(worst < 1.2);
  CHECK(worst > 0.3);
}

TEST_CASE("sup-norm flags and rejections") {
  const Group z = Group::free_group(1);
  const SupnormReport rd = vc_supnorm_decay(meas(z, {{"e", 1.0}}), 400);
  CHECK(rd.degenerate);
  CHECK(rd.flag.find("finite subgroup") != std::string::npos);
  for (int n = 0; n <= 400; ++n) CHECK(rd.sup[n] == 1.0);
  CHECK(rd.normalized[400] == Catch::Approx(20.0).margin(1e-12));

  const SupnormReport rw = vc_supnorm_decay(meas(z, {{"e", 0.4}, {"a", 0.6}}), 50);
  CHECK_FALSE(rw.lazy_ok);
  CHECK(rw.flag.find("laziness") != std::string::npos);
  CHECK(rw.sup[50] < 0.2);

  CHECK_THROWS_AS(vc_supnorm_decay(meas(Group::free_group(2), {{"a", 1.0}}), 10), ConfigError);
  CHECK_THROWS_AS(
      vc_supnorm_decay(meas(Group::free_product({Group::cyclic(2), Group::cyclic(4)}),
                            {{"a", 1.0}}),
                       10),
      ConfigError);
}

TEST_CASE("ratio scan over the biased free group family") {
  const Group g = Group::free_group(2);
  const auto family = [&](double eps) {
    return meas(g, {{"a", (1.0 - eps) / 2.0},
                    {"a^-1", (1.0 - eps) / 2.0},
                    {"b", eps / 2.0},
                    {"b^-1", eps / 2.0}});
  };
  ReportBudget budget;
  budget.horizon = 2000;
  budget.replicas = 200;
  const RatioScan scan = ratio_scan(family, {0.4, 0.1, 0.025}, budget);

  REQUIRE(scan.points.size() == 3);
  for (const auto& pt : scan.points) {
    REQUIRE(pt.ok);
    REQUIRE(pt.ratio_defined);
    CHECK(pt.v == Catch::Approx(std::log(3.0)).margin(1e-9));
    CHECK(pt.ratio_over_v == Catch::Approx(pt.ratio / pt.v).margin(1e-12));
    CHECK(pt.ratio_over_v < 1.0 + 1e-9);
  }
  CHECK(scan.points[0].ratio == Catch::Approx(1.09205).margin(1e-3));
  CHECK(scan.points[1].ratio == Catch::Approx(0.91999).margin(1e-3));
  CHECK(scan.points[2].ratio == Catch::Approx(0.67443).margin(1e-3));
  CHECK(scan.decreasing);
  CHECK(scan.points[2].ratio < 0.7 * scan.points[0].ratio);
  // the drop stays well above a factor two even this deep into the family
  CHECK(scan.points[2].ratio > 0.5 * scan.points[0].ratio);
}

TEST_CASE("ratio scan marks per-point failures and keeps going") {
  const Group g = Group::free_group(2);
  const auto family = [&](double eps) {
    if (eps > 0.6) throw ConfigError("family undefined this far out");
    return meas(g, {{"a", (1.0 - eps) / 2.0},
                    {"a^-1", (1.0 - eps) / 2.0},
                    {"b", eps / 2.0},
                    {"b^-1", eps / 2.0}});
  };
  ReportBudget budget;
  budget.horizon = 500;
  budget.replicas = 50;
  const RatioScan scan = ratio_scan(family, {0.1, 0.7, 0.4, 0.0}, budget);

  REQUIRE(scan.points.size() == 4);
  CHECK(scan.points[0].ok);
  CHECK_FALSE(scan.points[1].ok);
  CHECK(scan.points[1].error.find("family undefined") != std::string::npos);
  CHECK(scan.points[2].ok);
  // eps = 0 gives the driftless restriction to <a>: defined report, no ratio
  CHECK(scan.points[3].ok);
  CHECK_FALSE(scan.points[3].ratio_defined);
  CHECK(scan.points[3].verdict == "ratio undefined");
  // 0.1 then 0.4 increases the ratio, so the monotone verdict fails
  CHECK_FALSE(scan.decreasing);
}

TEST_CASE("ratio scan on the direct product closing family") {
  const Group g = Group::direct_with_finite(Group::cyclic(2), Group::free_group(2));
  const Element flip = g.generator(4);
  const auto family = [&](double eps) {
    std::vector<std::pair<Element, double>> atoms = {
        {g.identity_element(), 0.5 - eps - eps * eps},
        {flip, 0.5 - eps - eps * eps},
        {g.generator(0), eps},
        {g.generator(1), eps},
        {g.generator(2), eps * eps},
        {g.generator(3), eps * eps}};
    return FinMeasure::from_atoms(g, std::move(atoms));
  };
  ReportBudget budget;
  budget.horizon = 1000;
  budget.replicas = 100;
  const RatioScan scan = ratio_scan(family, {0.2, 0.05}, budget);

  REQUIRE(scan.points.size() == 2);
  REQUIRE(scan.points[0].ratio_defined);
  REQUIRE(scan.points[1].ratio_defined);
  CHECK(scan.decreasing);
  CHECK(scan.points[1].ratio < scan.points[0].ratio);
  for (const auto& pt : scan.points) CHECK(pt.ratio_over_v < 1.0);
}

TEST_CASE("ratio scan approaches the limit measure on the free product") {
  const Group g = Group::free_product({Group::cyclic(2), Group::cyclic(4)});
  const auto family = [&](double eps) {
    return meas(g, {{"a", 1.0 - eps}, {"b", eps / 2.0}, {"b^-1", eps / 2.0}});
  };
  ReportBudget budget;
  budget.n_max = 20;
  budget.horizon = 4000;
  budget.replicas = 1500;
  budget.seed = 21;
  const RatioScan scan = ratio_scan(family, {0.05}, budget);
  REQUIRE(scan.points.size() == 1);
  REQUIRE(scan.points[0].ratio_defined);

  const FinMeasure lambda =
      meas(g, {{"b", 0.25}, {"b^-1", 0.25}, {"a b", 0.25}, {"a b^-1", 0.25}});
  const FundamentalReport lrep = fundamental_report(lambda, budget);
  REQUIRE(lrep.ratio_defined);
  const double target = lrep.h / lrep.ell;

  const double got = scan.points[0].ratio;
  const double rel_err =
      3.0 * (scan.points[0].ratio_err / got + lrep.ratio_err / lrep.ratio);
  CHECK(std::abs(got / target - 1.0) < 0.10 + rel_err);
}
