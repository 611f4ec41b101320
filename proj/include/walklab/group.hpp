#pragma once

// Element algebra for the supported group models: free groups, finite groups
// given by multiplication tables, free products whose factors are free or
// finite, and direct products of a finite group with a free or free-product
// base.
//
// An element is a canonical token sequence:
//   free group          letters, code 2i for generator i and 2i+1 for its
//                       inverse; no adjacent letter/inverse pair
//   finite group        empty for the identity, else a single token holding
//                       the element index
//   free product        tokens factor*TOKEN_STRIDE + payload; free factors
//                       contribute letter runs (one token per letter), finite
//                       factors one token per syllable; syllables strictly
//                       alternate factors and are nontrivial
//   direct-with-finite  token 0 is the finite element index, the rest is the
//                       base element
//
// Equal group elements always have identical token sequences, so equality,
// hashing and ordering are plain vector operations. All operations are pure;
// Group values are immutable after construction and safe to share.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

namespace walklab {

using Token = std::int32_t;
inline constexpr Token TOKEN_STRIDE = 1 << 20;

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Element {
  std::vector<Token> t;
  bool operator==(const Element&) const = default;
};

// Canonical ordering: shortlex on token sequences. Used wherever determinism
// requires a fixed element order (measure atom storage, summation order).
inline bool shortlex_less(const Element& a, const Element& b) {
  if (a.t.size() != b.t.size()) return a.t.size() < b.t.size();
  return std::lexicographical_compare(a.t.begin(), a.t.end(), b.t.begin(), b.t.end());
}
inline bool operator<(const Element& a, const Element& b) { return shortlex_less(a, b); }

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (Token v : e.t) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 0x100000001B3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

namespace detail {

inline std::string pair_letter(int pair_index) {
  if (pair_index < 26) return std::string(1, static_cast<char>('a' + pair_index));
  return "g" + std::to_string(pair_index);
}

}  // namespace detail

// Finite group given by its multiplication table, with the BFS data every
// word-metric operation needs: lengths, inverse table, and the canonical
// (shortlex-least) geodesic for each element encoded as a BFS tree.
struct FiniteData {
  int order = 0;
  int identity = 0;
  std::vector<std::vector<int>> table;
  std::vector<int> gens;  // element indices, symmetric, deduplicated
  std::vector<int> inv;
  std::vector<int> len;
  std::vector<int> parent;      // BFS tree parent element, -1 at identity
  std::vector<int> parent_gen;  // local generator position used from parent
  int diameter = 0;

  int mul(int x, int y) const { return table[x][y]; }

  // Canonical geodesic of element x as local generator positions.
  std::vector<int> geodesic(int x) const {
    std::vector<int> out;
    while (x != identity) {
      out.push_back(parent_gen[x]);
      x = parent[x];
    }
    std::reverse(out.begin(), out.end());
    return out;
  }
};

struct GenInfo {
  std::string name;  // display form, e.g. "a" or "a^-1"
  int inverse = 0;   // generator id of the inverse
};

class Group {
 public:
  enum class Kind { Free, Finite, FreeProduct, DirectWithFinite };

  // ---- constructors ----

  static Group free_group(int rank) {
    if (rank < 1 || 2 * rank >= TOKEN_STRIDE) throw ConfigError("free group rank out of range");
    Group g;
    g.kind_ = Kind::Free;
    g.rank_ = rank;
    for (int i = 0; i < rank; ++i) {
      const std::string base = detail::pair_letter(i);
      g.gens_.push_back({base, 2 * i + 1});
      g.gens_.push_back({base + "^-1", 2 * i});
    }
    return g;
  }

  static Group finite(std::vector<std::vector<int>> table, std::vector<int> gens,
                      std::optional<int> identity = std::nullopt) {
    Group g;
    g.kind_ = Kind::Finite;
    g.fin_ = build_finite_data(std::move(table), std::move(gens), identity);
    std::vector<std::pair<int, int>> dummy;
    assign_finite_product_gens(g.fin_, -1, 0, g.gens_, dummy);
    return g;
  }

  static Group cyclic(int order) {
    if (order < 1) throw ConfigError("cyclic order must be positive");
    std::vector<std::vector<int>> table(order, std::vector<int>(order));
    for (int i = 0; i < order; ++i)
      for (int j = 0; j < order; ++j) table[i][j] = (i + j) % order;
    std::vector<int> gens;
    if (order >= 2) {
      gens.push_back(1);
      if (order > 2) gens.push_back(order - 1);
    }
    return finite(std::move(table), std::move(gens), 0);
  }

  static Group free_product(std::vector<Group> factors) {
    if (factors.size() < 2) throw ConfigError("free product needs at least two factors");
    Group g;
    g.kind_ = Kind::FreeProduct;
    int pair_counter = 0;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const Group& fac = factors[f];
      if (fac.kind_ == Kind::Free) {
        for (int i = 0; i < fac.rank_; ++i) {
          const std::string base = detail::pair_letter(pair_counter++);
          const int id = static_cast<int>(g.gens_.size());
          g.gens_.push_back({base, id + 1});
          g.gens_.push_back({base + "^-1", id});
          g.genmap_.push_back({static_cast<int>(f), 2 * i});
          g.genmap_.push_back({static_cast<int>(f), 2 * i + 1});
        }
      } else if (fac.kind_ == Kind::Finite) {
        if (fac.fin_.order < 2) throw ConfigError("free product factors must be nontrivial");
        pair_counter = assign_finite_product_gens(fac.fin_, static_cast<int>(f), pair_counter,
                                                  g.gens_, g.genmap_);
      } else {
        throw ConfigError("free product factors must be free or finite groups");
      }
      g.factor_gen_offset_.push_back(static_cast<int>(g.gens_.size()));
    }
    g.factors_ = std::make_shared<std::vector<Group>>(std::move(factors));
    return g;
  }

  static Group direct_with_finite(Group finite_part, Group base) {
    if (finite_part.kind_ != Kind::Finite) throw ConfigError("direct_with_finite: first part must be finite");
    if (base.kind_ != Kind::Free && base.kind_ != Kind::FreeProduct)
      throw ConfigError("direct_with_finite: base must be a free group or free product");
    Group g;
    g.kind_ = Kind::DirectWithFinite;
    g.gens_ = base.gens_;  // base generators first, ids unchanged
    const int nb = static_cast<int>(g.gens_.size());
    int pair_counter = 0;
    for (const GenInfo& gi : g.gens_)
      if (gi.name.find("^-1") == std::string::npos) ++pair_counter;
    std::vector<std::pair<int, int>> dummy;
    assign_finite_product_gens(finite_part.fin_, -1, pair_counter, g.gens_, dummy);
    g.dwf_base_gen_count_ = nb;
    g.parts_ = std::make_shared<std::vector<Group>>();
    g.parts_->push_back(std::move(finite_part));
    g.parts_->push_back(std::move(base));
    return g;
  }

  static Group from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  // ---- basic info ----

  Kind kind() const { return kind_; }
  int free_rank() const { return rank_; }
  const FiniteData& finite_data() const { return fin_; }
  const std::vector<Group>& factors() const { return *factors_; }
  const Group& dwf_finite() const { return (*parts_)[0]; }
  const Group& dwf_base() const { return (*parts_)[1]; }
  const std::vector<GenInfo>& generators() const { return gens_; }
  int inverse_gen(int gen_id) const { return gens_.at(gen_id).inverse; }

  bool same_as(const Group& other) const { return to_json() == other.to_json(); }

  std::string describe() const {
    switch (kind_) {
      case Kind::Free:
        return "free group of rank " + std::to_string(rank_);
      case Kind::Finite:
        return "finite group of order " + std::to_string(fin_.order);
      case Kind::FreeProduct: {
        std::string s = "free product of";
        for (const Group& f : *factors_) s += " [" + f.describe() + "]";
        return s;
      }
      case Kind::DirectWithFinite:
        return "direct product [" + dwf_finite().describe() + "] x [" + dwf_base().describe() + "]";
    }
    return "?";
  }

  // ---- elements ----

  Element identity_element() const {
    Element e;
    if (kind_ == Kind::DirectWithFinite) e.t.push_back(dwf_finite().fin_.identity);
    return e;
  }

  bool is_identity(const Element& x) const {
    if (kind_ == Kind::DirectWithFinite)
      return x.t.size() == 1 && x.t[0] == dwf_finite().fin_.identity;
    return x.t.empty();
  }

  Element generator(int gen_id) const {
    check_gen(gen_id);
    Element e;
    switch (kind_) {
      case Kind::Free:
        e.t.push_back(gen_id);
        break;
      case Kind::Finite:
        e.t.push_back(fin_.gens[gen_id]);
        break;
      case Kind::FreeProduct: {
        const auto [f, local] = genmap_[gen_id];
        const Group& fac = (*factors_)[f];
        if (fac.kind_ == Kind::Free)
          e.t.push_back(f * TOKEN_STRIDE + local);
        else
          e.t.push_back(f * TOKEN_STRIDE + fac.fin_.gens[local]);
        break;
      }
      case Kind::DirectWithFinite: {
        if (gen_id < dwf_base_gen_count_) {
          e.t.push_back(dwf_finite().fin_.identity);
          Element b = dwf_base().generator(gen_id);
          e.t.insert(e.t.end(), b.t.begin(), b.t.end());
        } else {
          e.t.push_back(dwf_finite().fin_.gens[gen_id - dwf_base_gen_count_]);
        }
        break;
      }
    }
    return e;
  }

  void validate_element(const Element& x) const {
    if (!valid_tokens(x.t.data(), x.t.size()))
      throw ConfigError("element is not a valid normal form for this group");
  }

  Element mul(const Element& x, const Element& y) const {
    validate_element(x);
    validate_element(y);
    Element r = x;
    mul_inplace(r.t, y);
    return r;
  }

  Element inv(const Element& x) const {
    validate_element(x);
    return inv_unchecked(x);
  }

  std::int64_t word_length(const Element& x) const {
    validate_element(x);
    return token_length(x.t.data(), x.t.size());
  }

  // Right-multiplies the token buffer by y in place; returns the word-length
  // change. This is the hot path for Monte Carlo walks.
  std::int64_t mul_inplace(std::vector<Token>& acc, const Element& y) const {
    switch (kind_) {
      case Kind::Free:
      case Kind::FreeProduct:
        return append_tokens(acc, 0, y.t.data(), y.t.size());
      case Kind::Finite: {
        const int a = acc.empty() ? fin_.identity : acc[0];
        const int b = y.t.empty() ? fin_.identity : y.t[0];
        const int p = fin_.mul(a, b);
        const std::int64_t delta = fin_.len[p] - fin_.len[a];
        acc.clear();
        if (p != fin_.identity) acc.push_back(p);
        return delta;
      }
      case Kind::DirectWithFinite: {
        const FiniteData& fd = dwf_finite().fin_;
        const int a = acc[0];
        const int b = y.t[0];
        const int p = fd.mul(a, b);
        std::int64_t delta = fd.len[p] - fd.len[a];
        acc[0] = p;
        delta += dwf_base().append_tokens(acc, 1, y.t.data() + 1, y.t.size() - 1);
        return delta;
      }
    }
    return 0;
  }

  std::int64_t token_length(const Token* t, std::size_t n) const {
    switch (kind_) {
      case Kind::Free:
        return static_cast<std::int64_t>(n);
      case Kind::Finite:
        return n == 0 ? 0 : fin_.len[t[0]];
      case Kind::FreeProduct: {
        std::int64_t len = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const int f = t[i] / TOKEN_STRIDE;
          const int payload = t[i] % TOKEN_STRIDE;
          const Group& fac = (*factors_)[f];
          len += fac.kind_ == Kind::Free ? 1 : fac.fin_.len[payload];
        }
        return len;
      }
      case Kind::DirectWithFinite:
        return dwf_finite().fin_.len[t[0]] + dwf_base().token_length(t + 1, n - 1);
    }
    return 0;
  }

  // Canonical geodesic as a sequence of generator ids; prefix i of the result
  // multiplies to an element at distance i from the identity.
  std::vector<int> geodesic_word(const Element& x) const {
    validate_element(x);
    std::vector<int> out;
    switch (kind_) {
      case Kind::Free:
        out.assign(x.t.begin(), x.t.end());
        break;
      case Kind::Finite:
        if (!x.t.empty()) out = fin_.geodesic(x.t[0]);
        break;
      case Kind::FreeProduct:
        for (Token tok : x.t) {
          const int f = tok / TOKEN_STRIDE;
          const int payload = tok % TOKEN_STRIDE;
          const Group& fac = (*factors_)[f];
          if (fac.kind_ == Kind::Free) {
            out.push_back(gen_id_of(f, payload));
          } else {
            for (int p : fac.fin_.geodesic(payload)) out.push_back(gen_id_of(f, p));
          }
        }
        break;
      case Kind::DirectWithFinite: {
        Element b;
        b.t.assign(x.t.begin() + 1, x.t.end());
        out = dwf_base().geodesic_word(b);
        for (int p : dwf_finite().fin_.geodesic(x.t[0]))
          out.push_back(dwf_base_gen_count_ + p);
        break;
      }
    }
    return out;
  }

  // ---- parsing and formatting ----

  Element parse_word(const std::string& s) const {
    Element acc = identity_element();
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size()) break;
      std::size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      const std::string tok = s.substr(i, j - i);
      i = j;
      if (tok == "e" || tok == "1") continue;
      mul_inplace(acc.t, generator(gen_id_by_name(tok)));
    }
    return acc;
  }

  std::string format(const Element& x) const {
    if (is_identity(x)) return "e";
    std::string out;
    for (int gid : geodesic_word(x)) {
      if (!out.empty()) out += ' ';
      out += gens_[gid].name;
    }
    return out;
  }

  // ---- enumeration ----

  // Spheres S^0 .. S^n as sorted element lists; throws BudgetError when the
  // accumulated ball size exceeds cap.
  std::vector<std::vector<Element>> spheres_up_to(int n, std::int64_t cap) const {
    std::vector<std::vector<Element>> levels;
    std::unordered_set<Element, ElementHash> seen;
    levels.push_back({identity_element()});
    seen.insert(levels[0][0]);
    std::int64_t total = 1;
    for (int k = 1; k <= n; ++k) {
      std::vector<Element> next;
      for (const Element& x : levels[k - 1]) {
        for (int gid = 0; gid < static_cast<int>(gens_.size()); ++gid) {
          Element y = x;
          mul_inplace(y.t, generator(gid));
          if (seen.insert(y).second) {
            if (++total > cap)
              throw BudgetError("sphere enumeration exceeds cap " + std::to_string(cap) +
                                " at radius " + std::to_string(k));
            next.push_back(std::move(y));
          }
        }
      }
      // BFS from the identity discovers exactly the sphere of radius k.
      std::sort(next.begin(), next.end(), shortlex_less);
      levels.push_back(std::move(next));
    }
    return levels;
  }

  std::vector<Element> sphere(int n, std::int64_t cap) const {
    return spheres_up_to(n, cap).back();
  }

  int gen_id_by_name(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(gens_.size()); ++i)
      if (gens_[i].name == name) return i;
    throw ConfigError("unknown generator name: " + name);
  }

  // Exposed for census automata: (factor, local generator) -> generator id.
  int gen_id_of(int factor, int local) const {
    const int lo = factor == 0 ? 0 : factor_gen_offset_[factor - 1];
    return lo + local;
  }

 private:
  Kind kind_ = Kind::Free;
  int rank_ = 0;
  FiniteData fin_;
  std::shared_ptr<std::vector<Group>> factors_;  // FreeProduct
  std::shared_ptr<std::vector<Group>> parts_;    // DirectWithFinite: {finite, base}
  std::vector<GenInfo> gens_;
  std::vector<std::pair<int, int>> genmap_;  // FreeProduct: gen id -> (factor, local)
  std::vector<int> factor_gen_offset_;       // FreeProduct: cumulative gen counts
  int dwf_base_gen_count_ = 0;

  void check_gen(int gen_id) const {
    if (gen_id < 0 || gen_id >= static_cast<int>(gens_.size()))
      throw ConfigError("generator id out of range");
  }

  Element inv_unchecked(const Element& x) const {
    Element r;
    switch (kind_) {
      case Kind::Free:
        r.t.reserve(x.t.size());
        for (auto it = x.t.rbegin(); it != x.t.rend(); ++it) r.t.push_back(*it ^ 1);
        break;
      case Kind::Finite:
        if (!x.t.empty()) {
          const int iv = fin_.inv[x.t[0]];
          if (iv != fin_.identity) r.t.push_back(iv);
        }
        break;
      case Kind::FreeProduct:
        r.t.reserve(x.t.size());
        for (auto it = x.t.rbegin(); it != x.t.rend(); ++it) {
          const int f = *it / TOKEN_STRIDE;
          const int payload = *it % TOKEN_STRIDE;
          const Group& fac = (*factors_)[f];
          if (fac.kind_ == Kind::Free)
            r.t.push_back(f * TOKEN_STRIDE + (payload ^ 1));
          else
            r.t.push_back(f * TOKEN_STRIDE + fac.fin_.inv[payload]);
        }
        break;
      case Kind::DirectWithFinite: {
        r.t.push_back(dwf_finite().fin_.inv[x.t[0]]);
        Element b;
        b.t.assign(x.t.begin() + 1, x.t.end());
        Element bi = dwf_base().inv_unchecked(b);
        r.t.insert(r.t.end(), bi.t.begin(), bi.t.end());
        break;
      }
    }
    return r;
  }

  // Seam reduction: append src to acc (tokens from base_start on belong to this
  // group) and cancel or merge across the boundary. Returns the length change.
  std::int64_t append_tokens(std::vector<Token>& acc, std::size_t base_start, const Token* src,
                             std::size_t n) const {
    std::int64_t delta = 0;
    std::size_t j = 0;
    if (kind_ == Kind::Free) {
      while (j < n) {
        if (acc.size() > base_start && acc.back() == (src[j] ^ 1)) {
          acc.pop_back();
          --delta;
        } else {
          acc.push_back(src[j]);
          ++delta;
        }
        ++j;
      }
      return delta;
    }
    // Free product: cancel across the seam, then append the tail.
    while (acc.size() > base_start && j < n) {
      const Token tl = acc.back();
      const Token tr = src[j];
      const int fl = tl / TOKEN_STRIDE;
      const int fr = tr / TOKEN_STRIDE;
      if (fl != fr) break;
      const Group& fac = (*factors_)[fl];
      if (fac.kind_ == Kind::Free) {
        const int pl = tl % TOKEN_STRIDE;
        const int pr = tr % TOKEN_STRIDE;
        if (pr == (pl ^ 1)) {
          acc.pop_back();
          ++j;
          --delta;
          continue;
        }
        break;  // same-factor letters merge into one syllable, stay reduced
      }
      const int pl = tl % TOKEN_STRIDE;
      const int pr = tr % TOKEN_STRIDE;
      const int prod = fac.fin_.mul(pl, pr);
      delta -= fac.fin_.len[pl];
      acc.pop_back();
      ++j;
      if (prod != fac.fin_.identity) {
        acc.push_back(fl * TOKEN_STRIDE + prod);
        delta += fac.fin_.len[prod];
        break;  // neighbours on both sides are other factors now
      }
    }
    for (; j < n; ++j) {
      acc.push_back(src[j]);
      const int f = src[j] / TOKEN_STRIDE;
      const int payload = src[j] % TOKEN_STRIDE;
      const Group& fac = (*factors_)[f];
      delta += fac.kind_ == Kind::Free ? 1 : fac.fin_.len[payload];
    }
    return delta;
  }

  bool valid_tokens(const Token* t, std::size_t n) const {
    switch (kind_) {
      case Kind::Free:
        for (std::size_t i = 0; i < n; ++i) {
          if (t[i] < 0 || t[i] >= 2 * rank_) return false;
          if (i > 0 && t[i] == (t[i - 1] ^ 1)) return false;
        }
        return true;
      case Kind::Finite:
        if (n == 0) return true;
        return n == 1 && t[0] >= 0 && t[0] < fin_.order && t[0] != fin_.identity;
      case Kind::FreeProduct: {
        int prev_f = -1;
        int prev_payload = -1;
        bool prev_free = false;
        for (std::size_t i = 0; i < n; ++i) {
          const int f = t[i] / TOKEN_STRIDE;
          const int payload = t[i] % TOKEN_STRIDE;
          if (t[i] < 0 || f >= static_cast<int>(factors_->size())) return false;
          const Group& fac = (*factors_)[f];
          if (fac.kind_ == Kind::Free) {
            if (payload < 0 || payload >= 2 * fac.rank_) return false;
            if (f == prev_f) {
              if (!prev_free) return false;          // finite syllables are single tokens
              if (payload == (prev_payload ^ 1)) return false;  // not reduced
            }
            prev_free = true;
          } else {
            if (payload < 0 || payload >= fac.fin_.order || payload == fac.fin_.identity)
              return false;
            if (f == prev_f) return false;  // adjacent syllables must alternate
            prev_free = false;
          }
          prev_f = f;
          prev_payload = payload;
        }
        return true;
      }
      case Kind::DirectWithFinite: {
        if (n == 0) return false;
        if (t[0] < 0 || t[0] >= dwf_finite().fin_.order) return false;
        return dwf_base().valid_tokens(t + 1, n - 1);
      }
    }
    return false;
  }

  // ---- finite-group construction ----

  static FiniteData build_finite_data(std::vector<std::vector<int>> table, std::vector<int> gens,
                                      std::optional<int> identity_hint) {
    FiniteData fd;
    fd.order = static_cast<int>(table.size());
    if (fd.order < 1 || fd.order >= TOKEN_STRIDE) throw ConfigError("finite group order out of range");
    if (fd.order > 512) throw ConfigError("finite group table too large (limit 512)");
    for (const auto& row : table) {
      if (static_cast<int>(row.size()) != fd.order) throw ConfigError("multiplication table not square");
      for (int v : row)
        if (v < 0 || v >= fd.order) throw ConfigError("multiplication table entry out of range");
    }
    fd.table = std::move(table);
    // identity
    int id = -1;
    for (int i = 0; i < fd.order; ++i) {
      bool ok = true;
      for (int j = 0; j < fd.order && ok; ++j)
        ok = fd.table[i][j] == j && fd.table[j][i] == j;
      if (ok) {
        id = i;
        break;
      }
    }
    if (id < 0) throw ConfigError("multiplication table has no identity");
    if (identity_hint && *identity_hint != id) throw ConfigError("declared identity does not match table");
    fd.identity = id;
    // associativity
    for (int a = 0; a < fd.order; ++a)
      for (int b = 0; b < fd.order; ++b)
        for (int c = 0; c < fd.order; ++c)
          if (fd.table[fd.table[a][b]][c] != fd.table[a][fd.table[b][c]])
            throw ConfigError("multiplication table is not associative");
    // inverses
    fd.inv.assign(fd.order, -1);
    for (int a = 0; a < fd.order; ++a) {
      for (int b = 0; b < fd.order; ++b)
        if (fd.table[a][b] == fd.identity && fd.table[b][a] == fd.identity) {
          fd.inv[a] = b;
          break;
        }
      if (fd.inv[a] < 0) throw ConfigError("multiplication table has a non-invertible element");
    }
    // generating set: deduplicate, keep order, check symmetry
    std::vector<int> gset;
    for (int s : gens) {
      if (s < 0 || s >= fd.order) throw ConfigError("generator index out of range");
      if (s == fd.identity) throw ConfigError("identity cannot be a declared generator");
      if (std::find(gset.begin(), gset.end(), s) == gset.end()) gset.push_back(s);
    }
    for (int s : gset)
      if (std::find(gset.begin(), gset.end(), fd.inv[s]) == gset.end())
        throw ConfigError("generating set is not closed under inversion");
    fd.gens = std::move(gset);
    if (fd.order > 1 && fd.gens.empty()) throw ConfigError("nontrivial finite group needs generators");
    // BFS: lengths and the canonical (shortlex-least) geodesic tree. Scanning
    // the queue in discovery order and generators in declared order makes the
    // first discovery of each element its shortlex-least word.
    fd.len.assign(fd.order, -1);
    fd.parent.assign(fd.order, -1);
    fd.parent_gen.assign(fd.order, -1);
    fd.len[fd.identity] = 0;
    std::vector<int> queue{fd.identity};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int x = queue[qi];
      for (int p = 0; p < static_cast<int>(fd.gens.size()); ++p) {
        const int y = fd.table[x][fd.gens[p]];
        if (fd.len[y] < 0) {
          fd.len[y] = fd.len[x] + 1;
          fd.parent[y] = x;
          fd.parent_gen[y] = p;
          queue.push_back(y);
        }
      }
    }
    for (int i = 0; i < fd.order; ++i)
      if (fd.len[i] < 0) throw ConfigError("declared generating set does not generate");
    fd.diameter = *std::max_element(fd.len.begin(), fd.len.end());
    return fd;
  }

  // Names the directed generators of a finite factor, pairing each generator
  // with its inverse for display. Returns the next free pair index.
  static int assign_finite_product_gens(const FiniteData& fd, int factor, int pair_counter,
                                        std::vector<GenInfo>& out,
                                        std::vector<std::pair<int, int>>& genmap) {
    const int base_id = static_cast<int>(out.size());
    std::vector<int> name_of(fd.gens.size(), -1);
    std::vector<std::string> names(fd.gens.size());
    for (std::size_t p = 0; p < fd.gens.size(); ++p) {
      if (name_of[p] >= 0) continue;
      const std::string base = detail::pair_letter(pair_counter++);
      names[p] = base;
      name_of[p] = 1;
      const int invel = fd.inv[fd.gens[p]];
      if (invel != fd.gens[p]) {
        for (std::size_t q = p + 1; q < fd.gens.size(); ++q)
          if (fd.gens[q] == invel && name_of[q] < 0) {
            names[q] = base + "^-1";
            name_of[q] = 1;
            break;
          }
      }
    }
    for (std::size_t p = 0; p < fd.gens.size(); ++p) {
      const int invel = fd.inv[fd.gens[p]];
      int inv_pos = -1;
      for (std::size_t q = 0; q < fd.gens.size(); ++q)
        if (fd.gens[q] == invel) {
          inv_pos = static_cast<int>(q);
          break;
        }
      out.push_back({names[p], base_id + inv_pos});
      if (factor >= 0) genmap.push_back({factor, static_cast<int>(p)});
    }
    return pair_counter;
  }
};

inline Group Group::from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "free") return free_group(j.at("rank").get<int>());
  if (type == "cyclic") return cyclic(j.at("order").get<int>());
  if (type == "finite") {
    std::optional<int> id;
    if (j.contains("identity")) id = j.at("identity").get<int>();
    return finite(j.at("table").get<std::vector<std::vector<int>>>(),
                  j.at("gens").get<std::vector<int>>(), id);
  }
  if (type == "free_product") {
    std::vector<Group> factors;
    for (const auto& f : j.at("factors")) factors.push_back(from_json(f));
    return free_product(std::move(factors));
  }
  if (type == "direct_with_finite")
    return direct_with_finite(from_json(j.at("finite")), from_json(j.at("base")));
  throw ConfigError("unknown group type: " + type);
}

inline nlohmann::json Group::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case Kind::Free:
      j["type"] = "free";
      j["rank"] = rank_;
      break;
    case Kind::Finite:
      j["type"] = "finite";
      j["table"] = fin_.table;
      j["gens"] = fin_.gens;
      j["identity"] = fin_.identity;
      break;
    case Kind::FreeProduct: {
      j["type"] = "free_product";
      nlohmann::json fs = nlohmann::json::array();
      for (const Group& f : *factors_) fs.push_back(f.to_json());
      j["factors"] = std::move(fs);
      break;
    }
    case Kind::DirectWithFinite:
      j["type"] = "direct_with_finite";
      j["finite"] = dwf_finite().to_json();
      j["base"] = dwf_base().to_json();
      break;
  }
  return j;
}

}  // namespace walklab
