#pragma once

#include "rational.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace spin2 {

using Edge = std::pair<int, int>;

// Undirected multigraph; loops and parallel edges allowed.  Edges are stored
// with u <= v.  A loop adds 2 to its vertex's degree.
struct Multigraph {
  int n = 0;
  std::vector<Edge> edges;

  Multigraph() = default;
  explicit Multigraph(int n_) : n(n_) {
    if (n_ < 0)
      throw PreconditionError("negative vertex count");
  }
  Multigraph(int n_, std::vector<Edge> es) : n(n_) {
    if (n_ < 0)
      throw PreconditionError("negative vertex count");
    for (auto [u, v] : es)
      add_edge(u, v);
  }

  int vertex_count() const { return n; }
  int edge_count() const { return int(edges.size()); }

  void check_vertex(int v) const {
    if (v < 0 || v >= n)
      throw PreconditionError("vertex index out of range");
  }

  void add_edge(int u, int v) {
    check_vertex(u);
    check_vertex(v);
    edges.emplace_back(std::min(u, v), std::max(u, v));
  }

  int add_vertex() { return n++; }

  std::vector<int> degrees() const {
    std::vector<int> d(n, 0);
    for (auto [u, v] : edges) {
      ++d[u];
      ++d[v];
    }
    return d;
  }

  int min_degree() const {
    auto d = degrees();
    return d.empty() ? 0 : *std::min_element(d.begin(), d.end());
  }

  bool has_loops() const {
    return std::any_of(edges.begin(), edges.end(), [](const Edge &e) { return e.first == e.second; });
  }

  std::vector<Edge> sorted_edges() const {
    auto e = edges;
    std::sort(e.begin(), e.end());
    return e;
  }

  friend bool operator==(const Multigraph &a, const Multigraph &b) {
    return a.n == b.n && a.sorted_edges() == b.sorted_edges();
  }
};

// Appends a copy of src to dst with src_root glued onto dst_root.
// Non-root vertices of src keep their relative order and go to the end.
inline void glue_into(Multigraph &dst, int dst_root, const Multigraph &src, int src_root) {
  dst.check_vertex(dst_root);
  src.check_vertex(src_root);
  int base = dst.n;
  auto map = [&](int w) { return w == src_root ? dst_root : base + (w < src_root ? w : w - 1); };
  dst.n += src.n - 1;
  dst.edges.reserve(dst.edges.size() + src.edges.size());
  for (auto [a, b] : src.edges)
    dst.add_edge(map(a), map(b));
}

// Vertices of g1 keep their indices; v2 becomes v1; the other vertices of
// g2 follow in order.  Returns the merged vertex (= v1).
inline std::pair<Multigraph, int> wedge_sum(const Multigraph &g1, int v1, const Multigraph &g2, int v2) {
  g1.check_vertex(v1);
  g2.check_vertex(v2);
  Multigraph out = g1;
  glue_into(out, v1, g2, v2);
  return {std::move(out), v1};
}

// New vertex gets index n; returns it.
inline std::pair<Multigraph, int> attach_edge(const Multigraph &g, int v) {
  g.check_vertex(v);
  Multigraph out = g;
  int u = out.add_vertex();
  out.add_edge(v, u);
  return {std::move(out), u};
}

inline void check_edge_index(const Multigraph &g, int idx) {
  if (idx < 0 || idx >= g.edge_count())
    throw PreconditionError("edge index out of range");
}

inline Multigraph delete_edge(const Multigraph &g, int idx) {
  check_edge_index(g, idx);
  Multigraph out = g;
  out.edges.erase(out.edges.begin() + idx);
  return out;
}

// Endpoints u, v are removed, the remaining vertices are compacted in order,
// and the merged vertex w is appended last (index n-2).  Every other edge
// between u and v becomes a loop at w.
inline Multigraph contract_edge(const Multigraph &g, int idx) {
  check_edge_index(g, idx);
  auto [u, v] = g.edges[idx];
  if (u == v)
    throw PreconditionError("cannot contract a self-loop");
  int w = g.n - 2;
  std::vector<int> map(g.n);
  for (int x = 0, next = 0; x < g.n; ++x)
    map[x] = (x == u || x == v) ? w : next++;
  Multigraph out(g.n - 1);
  for (int i = 0; i < g.edge_count(); ++i)
    if (i != idx)
      out.add_edge(map[g.edges[i].first], map[g.edges[i].second]);
  return out;
}

inline Multigraph builtin(const std::string &name, int n) {
  if (n < 1)
    throw PreconditionError("builtin: size must be positive");
  if (name == "path") {
    // n edges, n+1 vertices
    Multigraph g(n + 1);
    for (int i = 0; i < n; ++i)
      g.add_edge(i, i + 1);
    return g;
  }
  if (name == "star") {
    // center 0, leaves 1..n
    Multigraph g(n + 1);
    for (int i = 1; i <= n; ++i)
      g.add_edge(0, i);
    return g;
  }
  if (name == "cycle") {
    if (n < 3)
      throw PreconditionError("cycle needs n >= 3");
    Multigraph g(n);
    for (int i = 0; i < n; ++i)
      g.add_edge(i, (i + 1) % n);
    return g;
  }
  if (name == "clique") {
    if (n < 3)
      throw PreconditionError("clique needs n >= 3");
    Multigraph g(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        g.add_edge(i, j);
    return g;
  }
  if (name == "selfloops") {
    // one vertex carrying n loops
    Multigraph g(1);
    for (int i = 0; i < n; ++i)
      g.add_edge(0, 0);
    return g;
  }
  if (name == "grid") {
    Multigraph g(n * n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (c + 1 < n)
          g.add_edge(r * n + c, r * n + c + 1);
        if (r + 1 < n)
          g.add_edge(r * n + c, (r + 1) * n + c);
      }
    return g;
  }
  throw PreconditionError("unknown builtin graph '" + name + "'");
}

inline nlohmann::json to_json(const Multigraph &g) {
  nlohmann::json es = nlohmann::json::array();
  for (auto [u, v] : g.edges)
    es.push_back({u, v});
  return {{"n", g.n}, {"edges", es}};
}

inline Multigraph graph_from_json(const nlohmann::json &j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
    throw PreconditionError("graph JSON needs 'n' and 'edges'");
  if (!j["n"].is_number_integer())
    throw PreconditionError("graph JSON: 'n' must be an integer");
  Multigraph g(j["n"].get<int>());
  for (const auto &e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw PreconditionError("graph JSON: each edge is [u, v]");
    int u = e[0].get<int>(), v = e[1].get<int>();
    if (u < 0 || v < 0 || u >= g.n || v >= g.n)
      throw PreconditionError("graph JSON: edge endpoint out of range");
    g.add_edge(u, v);
  }
  return g;
}

inline std::string dump_graph(const Multigraph &g) { return to_json(g).dump(); }

inline Multigraph parse_graph(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw PreconditionError(std::string("graph JSON: ") + e.what());
  }
  return graph_from_json(j);
}

// Smallest sorted edge list over all relabelings; only for small graphs.
inline std::vector<Edge> canonical_form(const Multigraph &g) {
  if (g.n > 9)
    throw SizeCapError("canonical_form is for graphs with at most 9 vertices");
  std::vector<int> perm(g.n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Edge> best;
  bool first = true;
  do {
    std::vector<Edge> e;
    e.reserve(g.edges.size());
    for (auto [u, v] : g.edges) {
      int a = perm[u], b = perm[v];
      e.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(e.begin(), e.end());
    if (first || e < best) {
      best = std::move(e);
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline bool isomorphic(const Multigraph &a, const Multigraph &b) {
  if (a.n != b.n || a.edge_count() != b.edge_count())
    return false;
  auto da = a.degrees(), db = b.degrees();
  std::sort(da.begin(), da.end());
  std::sort(db.begin(), db.end());
  if (da != db)
    return false;
  return canonical_form(a) == canonical_form(b);
}

inline bool connected(const Multigraph &g) {
  if (g.n == 0)
    return true;
  std::vector<int> parent(g.n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [u, v] : g.edges)
    parent[find(u)] = find(v);
  int root = find(0);
  for (int v = 0; v < g.n; ++v)
    if (find(v) != root)
      return false;
  return true;
}

} // namespace spin2
