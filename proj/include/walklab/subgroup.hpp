#pragma once

// Subgroup specifications and their machinery: finitely generated subgroups
// of free groups as folded labeled graphs (membership, free basis, intrinsic
// length), homomorphism kernels into finite groups and into the integers,
// and the quotient distance tables the censuses consume.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "walklab/group.hpp"

namespace walklab {

struct GeneratedSubgroup {
  Group ambient;  // free
  std::vector<Element> words;
};

struct FiniteKernel {
  Group ambient;  // free group or free product
  Group target;   // finite
  std::vector<int> image;  // per ambient generator id, an element of the target
};

struct IntegerKernel {
  Group ambient;  // free
  std::vector<std::int64_t> image;  // per ambient generator id
};

using SubgroupSpec = std::variant<GeneratedSubgroup, FiniteKernel, IntegerKernel>;

inline const Group& ambient_of(const SubgroupSpec& s) {
  return std::visit([](const auto& v) -> const Group& { return v.ambient; }, s);
}

inline GeneratedSubgroup generated_subgroup(const Group& ambient, std::vector<Element> words) {
  if (ambient.kind() != Group::Kind::Free)
    throw ConfigError("generated subgroups need a free ambient group");
  for (const Element& w : words) ambient.validate_element(w);
  return {ambient, std::move(words)};
}

// Images are given for generators by name; inverses are filled in and the
// whole assignment is checked to respect inversion and, on free products,
// the relations of every finite factor.
inline FiniteKernel finite_kernel(const Group& ambient, const Group& target,
                                  const std::map<std::string, int>& images) {
  if (ambient.kind() != Group::Kind::Free && ambient.kind() != Group::Kind::FreeProduct)
    throw ConfigError("finite kernels need a free or free product ambient group");
  if (target.kind() != Group::Kind::Finite)
    throw ConfigError("finite kernel target must be a finite group");
  const FiniteData& td = target.finite_data();
  const int ng = static_cast<int>(ambient.generators().size());
  std::vector<int> img(ng, -1);
  for (const auto& [name, x] : images) {
    if (x < 0 || x >= td.order) throw ConfigError("finite kernel image out of range");
    img[ambient.gen_id_by_name(name)] = x;
  }
  for (int g = 0; g < ng; ++g) {
    const int h = ambient.inverse_gen(g);
    if (img[g] == -1 && img[h] != -1) img[g] = td.inv[img[h]];
  }
  for (int g = 0; g < ng; ++g) {
    if (img[g] == -1) throw ConfigError("missing image for generator " + ambient.generators()[g].name);
    if (td.inv[img[g]] != img[ambient.inverse_gen(g)])
      throw ConfigError("finite kernel images do not respect inversion");
  }
  if (ambient.kind() == Group::Kind::FreeProduct) {
    const auto& facs = ambient.factors();
    for (std::size_t f = 0; f < facs.size(); ++f) {
      if (facs[f].kind() != Group::Kind::Finite) continue;
      const FiniteData& fd = facs[f].finite_data();
      std::vector<int> order(fd.order);
      for (int x = 0; x < fd.order; ++x) order[x] = x;
      std::sort(order.begin(), order.end(), [&](int a, int b) { return fd.len[a] < fd.len[b]; });
      std::vector<int> phi(fd.order, -1);
      for (int x : order)
        phi[x] = x == fd.identity
                     ? td.identity
                     : td.table[phi[fd.parent[x]]]
                               [img[ambient.gen_id_of(static_cast<int>(f), fd.parent_gen[x])]];
      for (std::size_t p = 0; p < fd.gens.size(); ++p)
        if (phi[fd.gens[p]] != img[ambient.gen_id_of(static_cast<int>(f), static_cast<int>(p))])
          throw ConfigError("finite kernel images violate a finite factor relation");
      for (int x = 0; x < fd.order; ++x)
        for (int y = 0; y < fd.order; ++y)
          if (phi[fd.table[x][y]] != td.table[phi[x]][phi[y]])
            throw ConfigError("finite kernel images violate a finite factor relation");
    }
  }
  return {ambient, target, std::move(img)};
}

inline IntegerKernel integer_kernel(const Group& ambient,
                                    const std::map<std::string, std::int64_t>& images) {
  if (ambient.kind() != Group::Kind::Free)
    throw ConfigError("integer kernels need a free ambient group");
  const int ng = static_cast<int>(ambient.generators().size());
  std::vector<std::int64_t> img(ng, 0);
  std::vector<bool> seen(ng, false);
  for (const auto& [name, x] : images) {
    const int g = ambient.gen_id_by_name(name);
    img[g] = x;
    seen[g] = true;
  }
  for (int g = 0; g < ng; ++g) {
    const int h = ambient.inverse_gen(g);
    if (!seen[g] && seen[h]) {
      img[g] = -img[h];
      seen[g] = true;
    }
  }
  for (int g = 0; g < ng; ++g) {
    if (!seen[g]) throw ConfigError("missing image for generator " + ambient.generators()[g].name);
    if (img[g] != -img[ambient.inverse_gen(g)])
      throw ConfigError("integer kernel images do not respect inversion");
  }
  return {ambient, std::move(img)};
}

inline int finite_image(const FiniteKernel& k, const Element& g) {
  int x = k.target.finite_data().identity;
  for (int gid : k.ambient.geodesic_word(g)) x = k.target.finite_data().table[x][k.image[gid]];
  return x;
}

inline std::int64_t integer_image(const IntegerKernel& k, const Element& g) {
  std::int64_t s = 0;
  for (int gid : k.ambient.geodesic_word(g)) s += k.image[gid];
  return s;
}

inline bool kernel_member(const FiniteKernel& k, const Element& g) {
  return finite_image(k, g) == k.target.finite_data().identity;
}

inline bool kernel_member(const IntegerKernel& k, const Element& g) {
  return integer_image(k, g) == 0;
}

// Word-metric distance of each coset to the trivial one, over the images of
// the ambient generators.
inline std::vector<int> quotient_distances(const FiniteKernel& k) {
  const FiniteData& td = k.target.finite_data();
  std::vector<int> dist(td.order, -1);
  std::deque<int> queue{td.identity};
  dist[td.identity] = 0;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    for (int g = 0; g < static_cast<int>(k.image.size()); ++g) {
      const int y = td.table[x][k.image[g]];
      if (dist[y] == -1) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    }
  }
  return dist;
}

// Distances over the integer window [-W, W], index m + W. Paths are
// restricted to the window, which is exact whenever some image is +-1.
inline std::vector<int> integer_window_distances(const IntegerKernel& k, int W) {
  if (W < 0) throw ConfigError("integer window must be nonnegative");
  std::vector<int> dist(2 * W + 1, -1);
  std::deque<int> queue{W};
  dist[W] = 0;
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    for (std::int64_t step : k.image) {
      const std::int64_t j = i + step;
      if (j < 0 || j > 2 * W || dist[j] != -1) continue;
      dist[j] = dist[i] + 1;
      queue.push_back(static_cast<int>(j));
    }
  }
  return dist;
}

struct StallingsGraph {
  Group ambient;
  int base = 0;
  std::vector<std::vector<int>> edge;  // [vertex][generator id] -> vertex or -1
  bool complete = false;
  std::int64_t index = -1;  // vertex count when complete, -1 means infinite
  std::vector<Element> basis;
  std::vector<int> dist;                        // graph distance from the base vertex
  std::vector<std::vector<int>> edge_basis;     // basis index crossed by an edge, -1 on tree edges

  // Follows the reduced word from the base; -1 once an edge is missing.
  int read(const Element& g) const {
    int v = base;
    for (Token t : g.t) {
      v = edge[v][t];
      if (v < 0) return -1;
    }
    return v;
  }

  bool member(const Element& g) const {
    ambient.validate_element(g);
    return read(g) == base;
  }
};

// Length of the unique reduced expression of g in the graph's basis: reading
// the word from the base, every crossing of a non-tree edge contributes one
// basis letter, and consecutive crossings never cancel because closed tree
// detours would force a backtrack in a reduced word.
inline int subgroup_length(const StallingsGraph& graph, const Element& g) {
  graph.ambient.validate_element(g);
  int v = graph.base;
  int length = 0;
  for (Token t : g.t) {
    if (graph.edge_basis[v][t] >= 0) ++length;
    v = graph.edge[v][t];
    if (v < 0) throw ConfigError("element is not in the subgroup");
  }
  if (v != graph.base) throw ConfigError("element is not in the subgroup");
  return length;
}

namespace detail {

struct FoldState {
  std::vector<int> uf;
  std::vector<std::map<int, int>> out;
  std::vector<std::pair<int, int>> todo;

  int find(int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  }

  int fresh() {
    uf.push_back(static_cast<int>(uf.size()));
    out.emplace_back();
    return static_cast<int>(uf.size()) - 1;
  }

  void put(int u, int t, int v) {
    auto [it, inserted] = out[u].emplace(t, v);
    if (!inserted && find(it->second) != v) todo.emplace_back(find(it->second), v);
  }

  void link(int u, int t, int tinv, int v) {
    u = find(u);
    v = find(v);
    put(u, t, v);
    put(find(v), tinv, find(u));
  }

  void settle() {
    while (!todo.empty()) {
      auto [a, b] = todo.back();
      todo.pop_back();
      a = find(a);
      b = find(b);
      if (a == b) continue;
      if (out[a].size() < out[b].size()) std::swap(a, b);
      uf[b] = a;
      std::map<int, int> moved = std::move(out[b]);
      out[b].clear();
      for (const auto& [t, w] : moved) put(a, t, find(w));
    }
  }
};

}  // namespace detail

inline StallingsGraph stallings_fold(const GeneratedSubgroup& spec) {
  const Group& g = spec.ambient;
  const int ng = static_cast<int>(g.generators().size());

  detail::FoldState fold;
  const int base0 = fold.fresh();
  for (const Element& w : spec.words) {
    int v = base0;
    for (std::size_t i = 0; i < w.t.size(); ++i) {
      const int t = w.t[i];
      const int next = i + 1 == w.t.size() ? fold.find(base0) : fold.fresh();
      fold.link(v, t, g.inverse_gen(t), next);
      fold.settle();
      v = fold.find(next);
    }
  }

  // Compact onto reachable folded vertices.
  std::vector<int> id(fold.uf.size(), -1);
  std::vector<int> verts;
  std::deque<int> queue{fold.find(base0)};
  id[fold.find(base0)] = 0;
  verts.push_back(fold.find(base0));
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const auto& [t, w] : fold.out[u]) {
      const int r = fold.find(w);
      if (id[r] == -1) {
        id[r] = static_cast<int>(verts.size());
        verts.push_back(r);
        queue.push_back(r);
      }
    }
  }

  StallingsGraph out;
  out.ambient = g;
  out.base = 0;
  out.edge.assign(verts.size(), std::vector<int>(ng, -1));
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (const auto& [t, w] : fold.out[verts[i]]) out.edge[i][t] = id[fold.find(w)];

  const int n = static_cast<int>(out.edge.size());
  out.complete = true;
  for (int v = 0; v < n && out.complete; ++v)
    for (int t = 0; t < ng && out.complete; ++t) out.complete = out.edge[v][t] >= 0;
  out.index = out.complete ? n : -1;

  // Spanning tree by breadth-first search in generator order; the basis comes
  // from the edges left over, one element per undirected non-tree edge.
  out.dist.assign(n, -1);
  std::vector<int> tree_parent(n, -1), tree_gen(n, -1);
  std::vector<Element> word(n);
  out.dist[out.base] = 0;
  std::deque<int> bfs{out.base};
  while (!bfs.empty()) {
    const int u = bfs.front();
    bfs.pop_front();
    for (int t = 0; t < ng; ++t) {
      const int w = out.edge[u][t];
      if (w < 0 || out.dist[w] != -1) continue;
      out.dist[w] = out.dist[u] + 1;
      tree_parent[w] = u;
      tree_gen[w] = t;
      word[w] = g.mul(word[u], g.generator(t));
      bfs.push_back(w);
    }
  }

  out.edge_basis.assign(n, std::vector<int>(ng, -1));
  for (int u = 0; u < n; ++u) {
    for (int t = 0; t < ng; ++t) {
      const int w = out.edge[u][t];
      if (w < 0) continue;
      const bool tree = (tree_parent[w] == u && tree_gen[w] == t) ||
                        (tree_parent[u] == w && tree_gen[u] == g.inverse_gen(t));
      if (tree) continue;
      if (t > g.inverse_gen(t)) continue;  // orient each edge along its positive letter
      const int idx = static_cast<int>(out.basis.size());
      out.basis.push_back(g.mul(g.mul(word[u], g.generator(t)), g.inv(word[w])));
      out.edge_basis[u][t] = idx;
      out.edge_basis[w][g.inverse_gen(t)] = idx;
    }
  }
  return out;
}

// Distance from an arbitrary element to the subgroup in the ambient metric.
// Reading w splits it as (path readable to some vertex v) times (tail off the
// graph); the closest subgroup element cancels the tail and walks v home, and
// no cancellation occurs between the two parts.
inline int distance_to_subgroup(const StallingsGraph& graph, const Element& w) {
  graph.ambient.validate_element(w);
  int v = graph.base;
  std::size_t readable = 0;
  for (Token t : w.t) {
    const int next = graph.edge[v][t];
    if (next < 0) break;
    v = next;
    ++readable;
  }
  return static_cast<int>(w.t.size() - readable) + graph.dist[v];
}

inline SubgroupSpec subgroup_from_json(const Group& ambient, const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "generated") {
    std::vector<Element> words;
    for (const auto& w : j.at("words")) words.push_back(ambient.parse_word(w.get<std::string>()));
    return generated_subgroup(ambient, std::move(words));
  }
  if (type == "finite_kernel") {
    const Group target = Group::from_json(j.at("target"));
    std::map<std::string, int> images;
    for (const auto& [name, x] : j.at("images").items()) images[name] = x.get<int>();
    return finite_kernel(ambient, target, images);
  }
  if (type == "integer_kernel") {
    std::map<std::string, std::int64_t> images;
    for (const auto& [name, x] : j.at("images").items()) images[name] = x.get<std::int64_t>();
    return integer_kernel(ambient, images);
  }
  throw ConfigError("unknown subgroup type: " + type);
}

inline nlohmann::json subgroup_to_json(const SubgroupSpec& s) {
  nlohmann::json j;
  if (const auto* g = std::get_if<GeneratedSubgroup>(&s)) {
    j["type"] = "generated";
    nlohmann::json words = nlohmann::json::array();
    for (const Element& w : g->words) words.push_back(g->ambient.format(w));
    j["words"] = std::move(words);
  } else if (const auto* k = std::get_if<FiniteKernel>(&s)) {
    j["type"] = "finite_kernel";
    j["target"] = k->target.to_json();
    nlohmann::json images;
    const auto& gens = k->ambient.generators();
    for (std::size_t g2 = 0; g2 < gens.size(); ++g2)
      if (gens[g2].name.find("^-1") == std::string::npos) images[gens[g2].name] = k->image[g2];
    j["images"] = std::move(images);
  } else {
    const auto& ik = std::get<IntegerKernel>(s);
    j["type"] = "integer_kernel";
    nlohmann::json images;
    const auto& gens = ik.ambient.generators();
    for (std::size_t g2 = 0; g2 < gens.size(); ++g2)
      if (gens[g2].name.find("^-1") == std::string::npos) images[gens[g2].name] = ik.image[g2];
    j["images"] = std::move(images);
  }
  return j;
}

}  // namespace walklab
