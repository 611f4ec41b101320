// Tests for the element algebra: canonical forms, multiplication, inversion,
// word length, geodesics, parsing, and ball enumeration. The reference is an
// independent rewriting oracle that reduces generator words by repeated
// adjacent-pair merging until stable, with lengths from its own BFS.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <vector>

#include "walklab/group.hpp"
#include "walklab/rng.hpp"

using namespace walklab;

namespace {

std::vector<std::vector<int>> cyc_table(int n) {
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t[i][j] = (i + j) % n;
  return t;
}

std::vector<int> cyc_gens(int n) {
  std::vector<int> g;
  if (n >= 2) g.push_back(1);
  if (n > 2) g.push_back(n - 1);
  return g;
}

// Symmetric group on three points; elements ordered lexicographically as
// permutation arrays, table[i][j] applies i first, then j.
struct PermGroup {
  std::vector<std::array<int, 3>> elems;
  std::vector<std::vector<int>> table;
  PermGroup() {
    std::array<int, 3> p{0, 1, 2};
    do elems.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    table.assign(6, std::vector<int>(6));
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        std::array<int, 3> c{};
        for (int x = 0; x < 3; ++x) c[x] = elems[j][elems[i][x]];
        table[i][j] = static_cast<int>(std::find(elems.begin(), elems.end(), c) - elems.begin());
      }
  }
};

int identity_of(const std::vector<std::vector<int>>& t) {
  for (int i = 0; i < static_cast<int>(t.size()); ++i) {
    bool ok = true;
    for (int j = 0; j < static_cast<int>(t.size()) && ok; ++j)
      ok = t[i][j] == j && t[j][i] == j;
    if (ok) return i;
  }
  return -1;
}

std::vector<int> bfs_lengths(const std::vector<std::vector<int>>& t, const std::vector<int>& gens) {
  std::vector<int> len(t.size(), -1);
  std::vector<int> q{identity_of(t)};
  len[q[0]] = 0;
  for (std::size_t qi = 0; qi < q.size(); ++qi)
    for (int g : gens) {
      const int y = t[q[qi]][g];
      if (len[y] < 0) {
        len[y] = len[q[qi]] + 1;
        q.push_back(y);
      }
    }
  return len;
}

struct FactorDesc {
  int free_rank = 0;  // > 0 for a free factor
  std::vector<std::vector<int>> table;
  std::vector<int> gens;
};

struct ModelDesc {
  std::string name;
  std::vector<FactorDesc> factors;  // base factors (standalone if just one)
  FactorDesc head;                  // direct finite part if table nonempty
  bool has_head() const { return !head.table.empty(); }
};

Group build_group(const ModelDesc& m) {
  std::vector<Group> fs;
  for (const auto& f : m.factors)
    fs.push_back(f.free_rank > 0 ? Group::free_group(f.free_rank)
                                 : Group::finite(f.table, f.gens));
  Group base = fs.size() == 1 ? fs[0] : Group::free_product(std::move(fs));
  if (!m.has_head()) return base;
  return Group::direct_with_finite(Group::finite(m.head.table, m.head.gens), std::move(base));
}

struct OLetter {
  int factor;  // -1 marks the direct finite head
  int val;     // free letter code, or finite element index
};

// Alphabet in generator-id order, mirroring the documented ordering: base
// factors left to right, then the direct finite part.
std::vector<OLetter> alphabet(const ModelDesc& m) {
  std::vector<OLetter> out;
  for (int f = 0; f < static_cast<int>(m.factors.size()); ++f) {
    const auto& fd = m.factors[f];
    if (fd.free_rank > 0)
      for (int c = 0; c < 2 * fd.free_rank; ++c) out.push_back({f, c});
    else
      for (int g : fd.gens) out.push_back({f, g});
  }
  if (m.has_head())
    for (int g : m.head.gens) out.push_back({-1, g});
  return out;
}

struct OracleResult {
  int head = -1;
  std::vector<OLetter> word;
};

OracleResult oracle_reduce(const ModelDesc& m, const std::vector<int>& gids,
                           const std::vector<OLetter>& alpha) {
  OracleResult r;
  if (m.has_head()) r.head = identity_of(m.head.table);
  for (int gid : gids) {
    const OLetter& L = alpha[gid];
    if (L.factor < 0)
      r.head = m.head.table[r.head][L.val];
    else
      r.word.push_back(L);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < r.word.size(); ++i) {
      OLetter& x = r.word[i];
      const OLetter& y = r.word[i + 1];
      if (x.factor != y.factor) continue;
      const FactorDesc& f = m.factors[x.factor];
      if (f.free_rank > 0) {
        if (x.val != (y.val ^ 1)) continue;
        r.word.erase(r.word.begin() + i, r.word.begin() + i + 2);
      } else {
        const int p = f.table[x.val][y.val];
        if (p == identity_of(f.table))
          r.word.erase(r.word.begin() + i, r.word.begin() + i + 2);
        else {
          x.val = p;
          r.word.erase(r.word.begin() + i + 1);
        }
      }
      changed = true;
      break;
    }
  }
  return r;
}

std::vector<Token> expected_tokens(const ModelDesc& m, const OracleResult& r) {
  std::vector<Token> t;
  if (m.has_head()) t.push_back(r.head);
  const bool multi = m.factors.size() > 1;
  for (const OLetter& L : r.word)
    t.push_back(multi ? L.factor * TOKEN_STRIDE + L.val : L.val);
  return t;
}

long long oracle_length(const ModelDesc& m, const OracleResult& r,
                        const std::vector<std::vector<int>>& fac_len,
                        const std::vector<int>& head_len) {
  long long n = 0;
  if (m.has_head()) n += head_len[r.head];
  for (const OLetter& L : r.word)
    n += m.factors[L.factor].free_rank > 0 ? 1 : fac_len[L.factor][L.val];
  return n;
}

std::vector<int> random_word(Rng& rng, int ngens, int maxlen) {
  const int n = static_cast<int>(rng.next_below(maxlen + 1));
  std::vector<int> w(n);
  for (int i = 0; i < n; ++i) w[i] = static_cast<int>(rng.next_below(ngens));
  return w;
}

// Folds the word through the hot-path multiply, checking the reported length
// deltas against the validated word length at the end.
Element fold_checked(const Group& g, const std::vector<int>& w) {
  Element acc = g.identity_element();
  long long len = 0;
  for (int gid : w) len += g.mul_inplace(acc.t, g.generator(gid));
  g.validate_element(acc);
  REQUIRE(len == g.word_length(acc));
  return acc;
}

void run_battery(const ModelDesc& m, int pairs, std::uint64_t seed) {
  INFO("model " << m.name);
  const Group g = build_group(m);
  const auto alpha = alphabet(m);
  REQUIRE(alpha.size() == g.generators().size());

  std::vector<std::vector<int>> fac_len(m.factors.size());
  for (std::size_t f = 0; f < m.factors.size(); ++f)
    if (m.factors[f].free_rank == 0)
      fac_len[f] = bfs_lengths(m.factors[f].table, m.factors[f].gens);
  std::vector<int> head_len;
  if (m.has_head()) head_len = bfs_lengths(m.head.table, m.head.gens);

  for (int gid = 0; gid < static_cast<int>(alpha.size()); ++gid) {
    const auto r = oracle_reduce(m, {gid}, alpha);
    REQUIRE(g.generator(gid).t == expected_tokens(m, r));
  }

  Rng rng(seed);
  const int ng = static_cast<int>(alpha.size());
  for (int it = 0; it < pairs; ++it) {
    const auto w1 = random_word(rng, ng, 30);
    const auto w2 = random_word(rng, ng, 30);
    const Element x = fold_checked(g, w1);
    const Element y = fold_checked(g, w2);

    const auto r1 = oracle_reduce(m, w1, alpha);
    REQUIRE(x.t == expected_tokens(m, r1));
    REQUIRE(g.word_length(x) == oracle_length(m, r1, fac_len, head_len));

    auto w12 = w1;
    w12.insert(w12.end(), w2.begin(), w2.end());
    REQUIRE(g.mul(x, y).t == expected_tokens(m, oracle_reduce(m, w12, alpha)));

    const Element xi = g.inv(x);
    std::vector<int> w1i;
    for (auto itg = w1.rbegin(); itg != w1.rend(); ++itg)
      w1i.push_back(g.inverse_gen(*itg));
    REQUIRE(xi.t == expected_tokens(m, oracle_reduce(m, w1i, alpha)));
    REQUIRE(g.mul(x, xi) == g.identity_element());

    if (it % 16 == 0) {
      const auto w3 = random_word(rng, ng, 20);
      const Element z = fold_checked(g, w3);
      REQUIRE(g.mul(g.mul(x, y), z) == g.mul(x, g.mul(y, z)));
    }
    if (it % 8 == 0) REQUIRE(g.parse_word(g.format(x)) == x);
  }
}

ModelDesc model_f2() { return {"F2", {{2, {}, {}}}, {}}; }
ModelDesc model_f3() { return {"F3", {{3, {}, {}}}, {}}; }
ModelDesc model_z6() { return {"Z6", {{0, cyc_table(6), cyc_gens(6)}}, {}}; }
ModelDesc model_s3() {
  PermGroup s3;
  return {"S3", {{0, s3.table, {1, 2}}}, {}};
}
ModelDesc model_z2z4() {
  return {"Z2*Z4", {{0, cyc_table(2), cyc_gens(2)}, {0, cyc_table(4), cyc_gens(4)}}, {}};
}
ModelDesc model_z2z2() {
  return {"Z2*Z2", {{0, cyc_table(2), cyc_gens(2)}, {0, cyc_table(2), cyc_gens(2)}}, {}};
}
ModelDesc model_z2z3z5() {
  return {"Z2*Z3*Z5",
          {{0, cyc_table(2), cyc_gens(2)}, {0, cyc_table(3), cyc_gens(3)}, {0, cyc_table(5), cyc_gens(5)}},
          {}};
}
ModelDesc model_z2_free_f2() {
  return {"Z2*F2", {{0, cyc_table(2), cyc_gens(2)}, {2, {}, {}}}, {}};
}
ModelDesc model_z2xf2() { return {"Z2xF2", {{2, {}, {}}}, {0, cyc_table(2), cyc_gens(2)}}; }
ModelDesc model_z4x_z2z3() {
  return {"Z4x(Z2*Z3)",
          {{0, cyc_table(2), cyc_gens(2)}, {0, cyc_table(3), cyc_gens(3)}},
          {0, cyc_table(4), cyc_gens(4)}};
}
ModelDesc model_s3xf1() { return {"S3xF1", {{1, {}, {}}}, {0, PermGroup().table, {1, 2}}}; }

std::vector<ModelDesc> all_models() {
  return {model_f2(),     model_f3(),         model_z6(),   model_s3(),
          model_z2z4(),   model_z2z2(),       model_z2z3z5(), model_z2_free_f2(),
          model_z2xf2(),  model_z4x_z2z3(),   model_s3xf1()};
}

}  // namespace

TEST_CASE("free group words multiply with full cancellation") {
  const Group g = Group::free_group(2);
  const Element w = g.parse_word("a b a^-1 b^-1");
  REQUIRE(g.word_length(w) == 4);
  const Element wi = g.parse_word("b a b^-1 a^-1");
  REQUIRE(g.inv(w) == wi);
  REQUIRE(g.is_identity(g.mul(w, wi)));
  REQUIRE(g.inv(g.parse_word("a b a^-1")) == g.parse_word("a b^-1 a^-1"));
  REQUIRE(g.format(w) == "a b a^-1 b^-1");
  REQUIRE(g.format(g.identity_element()) == "e");
  REQUIRE(g.parse_word("") == g.identity_element());
  REQUIRE(g.parse_word("e") == g.identity_element());
  REQUIRE(g.parse_word("a a^-1") == g.identity_element());
}

TEST_CASE("cyclic group words wrap and shorten") {
  const Group g = Group::cyclic(4);
  const Element b3 = g.parse_word("a a a");
  REQUIRE(g.word_length(b3) == 1);
  REQUIRE(g.format(b3) == "a^-1");
  REQUIRE(g.inv(b3) == g.parse_word("a"));
  REQUIRE(g.word_length(g.parse_word("a a")) == 2);
  REQUIRE(g.is_identity(g.parse_word("a a a a")));
}

TEST_CASE("free product of Z2 and Z4 reduces syllables across the seam") {
  const Group g = Group::free_product({Group::cyclic(2), Group::cyclic(4)});
  REQUIRE(g.generators().size() == 3);
  REQUIRE(g.generators()[0].name == "a");
  REQUIRE(g.generators()[1].name == "b");
  REQUIRE(g.generators()[2].name == "b^-1");

  REQUIRE(g.is_identity(g.mul(g.parse_word("a b"), g.parse_word("b^-1 a"))));

  const Element v = g.mul(g.parse_word("a b"), g.parse_word("b a"));
  REQUIRE(g.word_length(v) == 4);
  REQUIRE(g.format(v) == "a b b a");

  const Element b3 = g.parse_word("b b b");
  REQUIRE(g.word_length(b3) == 1);
  REQUIRE(g.format(b3) == "b^-1");
  REQUIRE(g.inv(b3) == g.parse_word("b"));

  REQUIRE(g.geodesic_word(g.parse_word("a b b")) == std::vector<int>{0, 1, 1});
  REQUIRE(g.geodesic_word(g.identity_element()).empty());
}

TEST_CASE("sphere sizes match closed forms") {
  const std::int64_t cap = 1 << 22;
  SECTION("free group of rank 2") {
    const Group g = Group::free_group(2);
    const auto levels = g.spheres_up_to(10, cap);
    std::int64_t ball = 0, pw = 1;
    for (int n = 0; n <= 10; ++n) {
      const std::int64_t sphere = n == 0 ? 1 : 4 * pw;
      if (n > 0) pw *= 3;
      REQUIRE(static_cast<std::int64_t>(levels[n].size()) == sphere);
      ball += sphere;
    }
    REQUIRE(ball == 2 * 59049 - 1);
  }
  SECTION("Z2*Z4 spheres follow the Fibonacci pattern") {
    const Group g = Group::free_product({Group::cyclic(2), Group::cyclic(4)});
    const auto levels = g.spheres_up_to(8, cap);
    const std::vector<std::size_t> want{1, 3, 5, 8, 13, 21, 34, 55, 89};
    for (int n = 0; n <= 8; ++n) REQUIRE(levels[n].size() == want[n]);
    REQUIRE(levels[1].size() + levels[2].size() + levels[3].size() + 1 == 17);

    std::set<std::string> s2;
    for (const Element& x : levels[2]) s2.insert(g.format(x));
    REQUIRE(s2 == std::set<std::string>{"a b", "a b^-1", "b a", "b^-1 a", "b b"});
  }
  SECTION("levels are sorted, disjoint, and at the right distance") {
    for (const auto& m : {model_z2z4(), model_z2_free_f2(), model_z2xf2()}) {
      const Group g = build_group(m);
      const auto levels = g.spheres_up_to(5, cap);
      std::set<Element> seen;
      for (int n = 0; n < static_cast<int>(levels.size()); ++n) {
        REQUIRE(std::is_sorted(levels[n].begin(), levels[n].end(), shortlex_less));
        for (const Element& x : levels[n]) {
          REQUIRE(g.word_length(x) == n);
          REQUIRE(seen.insert(x).second);
        }
      }
    }
  }
  SECTION("enumeration respects the cap") {
    REQUIRE_THROWS_AS(Group::free_group(2).spheres_up_to(20, 100), BudgetError);
  }
}

TEST_CASE("word metric satisfies the metric axioms on a ball") {
  const Group g = Group::free_product({Group::cyclic(2), Group::cyclic(4)});
  const auto levels = g.spheres_up_to(3, 1 << 20);
  std::vector<Element> ball;
  for (const auto& lvl : levels) ball.insert(ball.end(), lvl.begin(), lvl.end());
  REQUIRE(ball.size() == 17);

  std::vector<std::vector<std::int64_t>> d(ball.size(), std::vector<std::int64_t>(ball.size()));
  for (std::size_t i = 0; i < ball.size(); ++i)
    for (std::size_t j = 0; j < ball.size(); ++j)
      d[i][j] = g.word_length(g.mul(g.inv(ball[i]), ball[j]));
  for (std::size_t i = 0; i < ball.size(); ++i)
    for (std::size_t j = 0; j < ball.size(); ++j) {
      REQUIRE(d[i][j] == d[j][i]);
      REQUIRE((d[i][j] == 0) == (i == j));
      for (std::size_t k = 0; k < ball.size(); ++k)
        REQUIRE(d[i][j] <= d[i][k] + d[k][j]);
    }
}

TEST_CASE("geodesic words are geodesic prefix by prefix") {
  for (const auto& m : all_models()) {
    INFO("model " << m.name);
    const Group g = build_group(m);
    Rng rng(7);
    const auto alpha = alphabet(m);
    for (int it = 0; it < 60; ++it) {
      const Element x = fold_checked(g, random_word(rng, static_cast<int>(alpha.size()), 24));
      const auto w = g.geodesic_word(x);
      REQUIRE(static_cast<std::int64_t>(w.size()) == g.word_length(x));
      Element acc = g.identity_element();
      for (std::size_t i = 0; i < w.size(); ++i) {
        g.mul_inplace(acc.t, g.generator(w[i]));
        REQUIRE(g.word_length(acc) == static_cast<std::int64_t>(i) + 1);
      }
      REQUIRE(acc == x);
    }
  }
}

TEST_CASE("random words agree with the rewriting oracle") {
  std::uint64_t seed = 1000;
  for (const auto& m : all_models()) run_battery(m, 1200, seed++);
}

TEST_CASE("invalid elements and bad tables are rejected") {
  const Group f2 = Group::free_group(2);
  REQUIRE_THROWS_AS(f2.word_length(Element{{0, 1}}), ConfigError);   // a a^-1
  REQUIRE_THROWS_AS(f2.word_length(Element{{9}}), ConfigError);     // no such letter
  REQUIRE_THROWS_AS(f2.mul(Element{{0, 1}}, Element{}), ConfigError);

  const Group z4 = Group::cyclic(4);
  REQUIRE_THROWS_AS(z4.word_length(Element{{0}}), ConfigError);     // explicit identity token
  REQUIRE_THROWS_AS(z4.word_length(Element{{1, 2}}), ConfigError);  // two syllables

  const Group pr = Group::free_product({Group::cyclic(2), Group::cyclic(4)});
  REQUIRE_THROWS_AS(pr.word_length(Element{{1, 1}}), ConfigError);  // same finite factor twice
  REQUIRE_THROWS_AS(pr.word_length(Element{{TOKEN_STRIDE + 0}}), ConfigError);

  const Group dw = build_group(model_z2xf2());
  REQUIRE_THROWS_AS(dw.word_length(Element{}), ConfigError);        // missing head token

  REQUIRE_THROWS_AS(Group::free_group(0), ConfigError);
  REQUIRE_THROWS_AS(Group::free_product({Group::cyclic(2)}), ConfigError);
  REQUIRE_THROWS_AS(Group::free_product({Group::cyclic(1), Group::cyclic(2)}), ConfigError);
  REQUIRE_THROWS_AS(Group::direct_with_finite(Group::cyclic(2), Group::cyclic(3)), ConfigError);

  auto bad = cyc_table(3);
  bad[1][2] = 1;  // breaks associativity/identity structure
  REQUIRE_THROWS_AS(Group::finite(bad, {1, 2}), ConfigError);
  REQUIRE_THROWS_AS(Group::finite(cyc_table(4), {1}), ConfigError);  // not inverse-closed
  REQUIRE_THROWS_AS(Group::finite(cyc_table(4), {2}), ConfigError);  // does not generate
  REQUIRE_THROWS_AS(Group::finite(cyc_table(4), {0, 1, 3}), ConfigError);  // identity listed
}

TEST_CASE("groups serialize and restore") {
  for (const auto& m : all_models()) {
    INFO("model " << m.name);
    const Group g = build_group(m);
    const Group back = Group::from_json(g.to_json());
    REQUIRE(back.same_as(g));
    REQUIRE(back.generators().size() == g.generators().size());
    REQUIRE_FALSE(g.describe().empty());
  }
  REQUIRE_THROWS_AS(Group::from_json(nlohmann::json{{"type", "nope"}}), ConfigError);
  const Group z4 = Group::from_json(nlohmann::json{{"type", "cyclic"}, {"order", 4}});
  REQUIRE(z4.finite_data().order == 4);
  REQUIRE(z4.gen_id_by_name("a^-1") == 1);
  REQUIRE_THROWS_AS(z4.gen_id_by_name("q"), ConfigError);
}

TEST_CASE("nonabelian finite factor gets consistent lengths") {
  PermGroup s3;
  const Group g = Group::finite(s3.table, {1, 2});
  const auto len = bfs_lengths(s3.table, {1, 2});
  for (int i = 0; i < 6; ++i) {
    Element x;
    if (i != identity_of(s3.table)) x.t.push_back(i);
    REQUIRE(g.word_length(x) == len[i]);
  }
  REQUIRE(g.finite_data().diameter == 3);
}
