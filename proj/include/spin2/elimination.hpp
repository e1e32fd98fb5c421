#pragma once

// Exact partition sums by variable elimination (greedy min-degree order).
// Independent of the gadget algebra; used to check large gadget graphs that
// are beyond brute-force enumeration but have small treewidth.

#include "exact.hpp"

#include <set>

namespace spin2 {

namespace detail {

struct Factor {
  std::vector<int> vars; // sorted
  std::vector<Rat> val;  // bit i of the index is the spin of vars[i]
};

inline Factor multiply_and_sum_out(const std::vector<const Factor *> &fs, int drop) {
  std::vector<int> scope;
  for (auto *f : fs)
    scope.insert(scope.end(), f->vars.begin(), f->vars.end());
  std::sort(scope.begin(), scope.end());
  scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
  if (scope.size() > 22)
    throw SizeCapError("elimination width too large");
  std::vector<int> out_vars;
  for (int v : scope)
    if (v != drop)
      out_vars.push_back(v);
  // positions of each factor's variables inside scope
  std::vector<std::vector<int>> pos(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (int v : fs[i]->vars)
      pos[i].push_back(int(std::lower_bound(scope.begin(), scope.end(), v) - scope.begin()));
  int dpos = drop < 0 ? -1 : int(std::lower_bound(scope.begin(), scope.end(), drop) - scope.begin());
  Factor out{out_vars, std::vector<Rat>(std::size_t(1) << out_vars.size(), Rat(0))};
  std::size_t full = std::size_t(1) << scope.size();
  for (std::size_t a = 0; a < full; ++a) {
    Rat prod(1);
    for (std::size_t i = 0; i < fs.size() && sgn(prod) != 0; ++i) {
      std::size_t idx = 0;
      for (std::size_t b = 0; b < pos[i].size(); ++b)
        if (a >> pos[i][b] & 1)
          idx |= std::size_t(1) << b;
      prod *= fs[i]->val[idx];
    }
    if (sgn(prod) == 0)
      continue;
    std::size_t o = 0, ob = 0;
    for (std::size_t b = 0; b < scope.size(); ++b) {
      if (int(b) == dpos)
        continue;
      if (a >> b & 1)
        o |= std::size_t(1) << ob;
      ++ob;
    }
    out.val[o] += prod;
  }
  return out;
}

} // namespace detail

// Table over the spins of `keep` (bit i <-> keep[i]); fields optional.
inline std::vector<Rat> eliminate(const Multigraph &g, const SpinParams &p, const std::vector<int> &keep,
                                  const std::vector<Rat> *lam = nullptr) {
  using detail::Factor;
  std::vector<Factor> fs;
  std::vector<std::vector<int>> touching(g.n);
  auto add = [&](Factor f) {
    int id = int(fs.size());
    for (int v : f.vars)
      touching[v].push_back(id);
    fs.push_back(std::move(f));
  };
  std::vector<int> loops(g.n, 0);
  std::map<std::pair<int, int>, int> mult;
  for (auto [u, v] : g.edges) {
    if (u == v)
      ++loops[u];
    else
      ++mult[{u, v}];
  }
  for (int v = 0; v < g.n; ++v) {
    Rat w0 = rpow(p.beta, loops[v]), w1 = rpow(p.gamma, loops[v]);
    if (lam)
      w1 *= (*lam)[v];
    add({{v}, {w0, w1}});
  }
  for (auto &[e, c] : mult)
    add({{e.first, e.second}, {rpow(p.beta, c), Rat(1), Rat(1), rpow(p.gamma, c)}});

  std::vector<char> kept(g.n, 0), gone(g.n, 0);
  for (int v : keep) {
    g.check_vertex(v);
    kept[v] = 1;
  }
  std::vector<std::set<int>> adj(g.n);
  for (auto &[e, c] : mult) {
    adj[e.first].insert(e.second);
    adj[e.second].insert(e.first);
  }
  std::set<std::pair<int, int>> queue;
  for (int v = 0; v < g.n; ++v)
    if (!kept[v])
      queue.insert({int(adj[v].size()), v});
  std::vector<char> alive(fs.size(), 1);
  while (!queue.empty()) {
    int x = queue.begin()->second;
    queue.erase(queue.begin());
    std::vector<const Factor *> group;
    std::vector<int> ids;
    for (int id : touching[x])
      if (alive[id]) {
        group.push_back(&fs[id]);
        ids.push_back(id);
      }
    Factor nf = detail::multiply_and_sum_out(group, x);
    for (int id : ids)
      alive[id] = 0;
    gone[x] = 1;
    // neighbours of x become a clique
    std::vector<int> nb(adj[x].begin(), adj[x].end());
    for (int a : nb) {
      if (!kept[a])
        queue.erase({int(adj[a].size()), a});
      adj[a].erase(x);
      for (int b : nb)
        if (a != b)
          adj[a].insert(b);
      if (!kept[a])
        queue.insert({int(adj[a].size()), a});
    }
    adj[x].clear();
    alive.push_back(1);
    add(std::move(nf));
  }
  std::vector<const Factor *> rest;
  for (std::size_t id = 0; id < fs.size(); ++id)
    if (alive[id])
      rest.push_back(&fs[id]);
  Factor all = detail::multiply_and_sum_out(rest, -1);
  // reorder to the caller's `keep` order
  std::vector<Rat> out(std::size_t(1) << keep.size(), Rat(0));
  for (std::size_t a = 0; a < out.size(); ++a) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < keep.size(); ++i)
      if (a >> i & 1) {
        auto it = std::lower_bound(all.vars.begin(), all.vars.end(), keep[i]);
        idx |= std::size_t(1) << (it - all.vars.begin());
      }
    out[a] = all.val.empty() ? Rat(0) : all.val[idx];
  }
  return out;
}

inline Rat partition_fn_elim(const Multigraph &g, const SpinParams &p) { return eliminate(g, p, {})[0]; }

inline RealActivity activity_vector_elim(const Multigraph &g, int v, const SpinParams &p) {
  auto t = eliminate(g, p, {v});
  return {t[0], t[1]};
}

inline RealPairMatrix pair_matrix_elim(const Multigraph &g, int u, int v, const SpinParams &p) {
  RealPairMatrix out;
  if (u == v) {
    auto t = eliminate(g, p, {u});
    out.m[0][0] = t[0];
    out.m[1][1] = t[1];
    out.m[0][1] = out.m[1][0] = 0;
    return out;
  }
  auto t = eliminate(g, p, {u, v});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.m[i][j] = t[i | (j << 1)];
  return out;
}

} // namespace spin2
