#pragma once

// Subgraphs world: the Fourier-dual Holant instance of a two-spin system,
// its exact value, small-arity windability/terraced checks and a Markov
// chain estimator on the parity-constrained configurations.

#include "exact.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace spin2 {

using BinaryFn = std::array<std::array<Rat, 2>, 2>;

inline BinaryFn interaction(const SpinParams &p) {
  return {{{p.beta, Rat(1)}, {Rat(1), p.gamma}}};
}

inline BinaryFn fourier_hat(const BinaryFn &psi) {
  BinaryFn h;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Rat s(0);
      for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
          if ((a * x1 + b * x2) & 1)
            s -= psi[x1][x2];
          else
            s += psi[x1][x2];
      h[a][b] = s / 4;
    }
  return h;
}

// sum_{a,b} hat(a,b) chi_{a,b}
inline BinaryFn character_sum(const BinaryFn &hat) {
  BinaryFn f;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2) {
      Rat s(0);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a * x1 + b * x2) & 1)
            s -= hat[a][b];
          else
            s += hat[a][b];
      f[x1][x2] = s;
    }
  return f;
}

inline BinaryFn negated(BinaryFn f) {
  for (auto &row : f)
    for (auto &x : row)
      x = -x;
  return f;
}

// Table over {0,1}^arity; bit i of the index is coordinate i.
struct Table {
  int arity = 0;
  std::vector<Rat> v;

  const Rat &operator()(unsigned x) const { return v[x]; }
  friend bool operator==(const Table &a, const Table &b) { return a.arity == b.arity && a.v == b.v; }
};

inline Table table_of(const BinaryFn &f) {
  return {2, {f[0][0], f[1][0], f[0][1], f[1][1]}};
}

inline Table even_table(int k) {
  Table t{k, std::vector<Rat>(std::size_t(1) << k)};
  for (unsigned x = 0; x < t.v.size(); ++x)
    t.v[x] = __builtin_popcount(x) % 2 == 0 ? 1 : 0;
  return t;
}

struct Constraint {
  bool even = true; // parity of the scope; otherwise `table`
  Table table;
  std::vector<int> scope;

  // value on packed local bits
  Rat value(unsigned local) const {
    if (even)
      return __builtin_popcount(local) % 2 == 0 ? Rat(1) : Rat(0);
    return table(local);
  }
};

struct HolantInstance {
  int num_vars = 0;
  std::vector<Constraint> vertices;
  std::vector<int> pin;          // -1 free, else the fixed value
  int global_sign_exponent = 0;  // (-1)^this multiplies the world value
  int base_vertices = 0;         // Z_G = 2^base * sign * holant

  void validate() const {
    std::vector<int> seen(num_vars, 0);
    for (auto &c : vertices) {
      if (!c.even && c.table.arity != int(c.scope.size()))
        throw InvariantError("table arity differs from its scope size");
      for (int x : c.scope) {
        if (x < 0 || x >= num_vars)
          throw InvariantError("scope variable out of range");
        ++seen[x];
      }
    }
    for (int k : seen)
      if (k < 1 || k > 2)
        throw InvariantError("each variable must touch one or two constraints");
    if (int(pin.size()) != num_vars)
      throw InvariantError("pin vector has the wrong length");
    for (int p : pin)
      if (p < -1 || p > 1)
        throw InvariantError("pin must be -1, 0 or 1");
  }

  int free_vars() const { return int(std::count(pin.begin(), pin.end(), -1)); }

  Rat weight(const std::vector<int> &y) const {
    Rat w(1);
    for (auto &c : vertices) {
      unsigned loc = 0;
      for (std::size_t i = 0; i < c.scope.size(); ++i)
        loc |= unsigned(y[c.scope[i]]) << i;
      w *= c.value(loc);
      if (sgn(w) == 0)
        break;
    }
    return w;
  }
};

// Z_G from a holant value of a subgraphs-world instance
inline Rat world_value(const HolantInstance &inst, const Rat &holant) {
  Rat z = rpow(Rat(2), inst.base_vertices) * holant;
  return inst.global_sign_exponent % 2 ? Rat(-z) : z;
}

// Even_deg at each vertex, one binary table per edge on the two incidence
// variables (2e at u, 2e+1 at v; a loop puts both at u).  Tables are the
// Fourier transform of the interaction, negated when beta + gamma <= -2.
inline HolantInstance subgraphs_world(const Multigraph &g, const SpinParams &p) {
  HolantInstance I;
  int m = g.edge_count();
  I.base_vertices = g.n;
  I.num_vars = 2 * m;
  I.pin.assign(I.num_vars, -1);
  BinaryFn h = fourier_hat(interaction(p));
  if (p.beta + p.gamma <= -2) {
    h = negated(h);
    I.global_sign_exponent = m;
  }
  I.vertices.resize(g.n);
  for (int e = 0; e < m; ++e) {
    auto [u, v] = g.edges[e];
    I.vertices[u].scope.push_back(2 * e);
    I.vertices[v].scope.push_back(2 * e + 1);
  }
  Table t = table_of(h);
  for (int e = 0; e < m; ++e)
    I.vertices.push_back({false, t, {2 * e, 2 * e + 1}});
  return I;
}

namespace detail {

// Depth-first walk over assignments of the free variables in index order;
// each constraint is evaluated once its last variable is set.  `leaf`
// receives (y, weight) for every nonzero assignment and returns false to stop.
inline void holant_walk(const HolantInstance &I,
                        const std::function<bool(const std::vector<int> &, const Rat &)> &leaf) {
  int N = I.num_vars;
  std::vector<std::vector<int>> closes(N + 1);
  for (int c = 0; c < int(I.vertices.size()); ++c) {
    int last = -1;
    for (int x : I.vertices[c].scope)
      last = std::max(last, x);
    closes[last + 1].push_back(c);
  }
  std::vector<int> y(N, 0);
  bool stop = false;
  auto eval = [&](int c) {
    auto &con = I.vertices[c];
    unsigned loc = 0;
    for (std::size_t i = 0; i < con.scope.size(); ++i)
      loc |= unsigned(y[con.scope[i]]) << i;
    return con.value(loc);
  };
  std::function<void(int, const Rat &)> rec = [&](int k, const Rat &w) {
    Rat cur = w;
    for (int c : closes[k]) {
      cur *= eval(c);
      if (sgn(cur) == 0)
        return;
    }
    if (k == N) {
      if (!leaf(y, cur))
        stop = true;
      return;
    }
    for (int b = 0; b < 2 && !stop; ++b) {
      if (I.pin[k] >= 0 && I.pin[k] != b)
        continue;
      y[k] = b;
      rec(k + 1, cur);
    }
  };
  rec(0, Rat(1));
}

} // namespace detail

inline Rat holant_exact(const HolantInstance &I, int cap = 24) {
  I.validate();
  if (I.free_vars() > cap)
    throw SizeCapError("holant instance has " + std::to_string(I.free_vars()) +
                       " free variables; cap is " + std::to_string(cap));
  Rat total(0);
  detail::holant_walk(I, [&](const std::vector<int> &, const Rat &w) {
    total += w;
    return true;
  });
  return total;
}

// some assignment with nonzero weight, if any
inline std::optional<std::vector<int>> support_point(const HolantInstance &I) {
  std::optional<std::vector<int>> out;
  detail::holant_walk(I, [&](const std::vector<int> &y, const Rat &) {
    out = y;
    return false;
  });
  return out;
}

// Even_k as a path of k-2 Even_3 constraints: externals 0..k-1, internals
// k..2k-4.
struct EvenChain {
  int k = 0;
  int internal = 0;
  std::vector<std::array<int, 3>> triples;
};

inline EvenChain even_decompose(int k) {
  if (k < 4)
    throw PreconditionError("even_decompose needs arity at least 4");
  EvenChain c;
  c.k = k;
  c.internal = k - 3;
  auto yv = [k](int i) { return k + i; };
  c.triples.push_back({0, 1, yv(0)});
  for (int i = 1; i <= k - 4; ++i)
    c.triples.push_back({yv(i - 1), i + 1, yv(i)});
  c.triples.push_back({yv(k - 4), k - 2, k - 1});
  return c;
}

// number of internal completions of external bits x satisfying every Even_3
inline int even_chain_count(const EvenChain &c, unsigned x) {
  int count = 0;
  for (unsigned in = 0; in < (1u << c.internal); ++in) {
    unsigned all = x | (in << c.k);
    bool ok = true;
    for (auto &t : c.triples)
      if (((all >> t[0]) ^ (all >> t[1]) ^ (all >> t[2])) & 1)
        ok = false;
    count += ok;
  }
  return count;
}

// replaces every Even constraint of arity >= 4 by its Even_3 chain
inline HolantInstance expand_even(const HolantInstance &I) {
  HolantInstance out = I;
  out.vertices.clear();
  for (auto &c : I.vertices) {
    int k = int(c.scope.size());
    if (!c.even || k < 4) {
      out.vertices.push_back(c);
      continue;
    }
    auto ch = even_decompose(k);
    int base = out.num_vars;
    out.num_vars += ch.internal;
    out.pin.resize(out.num_vars, -1);
    auto var = [&](int j) { return j < k ? c.scope[j] : base + (j - k); };
    for (auto &t : ch.triples)
      out.vertices.push_back({true, {}, {var(t[0]), var(t[1]), var(t[2])}});
  }
  return out;
}

// ---- windability ----------------------------------------------------------

struct WindEntry {
  unsigned x = 0, y = 0;
  std::vector<unsigned> M; // parts as bitmasks, sorted
  Rat B;
};

struct WindCert {
  int arity = 0;
  std::vector<WindEntry> entries;
};

namespace detail {

// partitions of the bits of s into pairs and at most one singleton
inline void pairings(unsigned s, bool single_used, std::vector<unsigned> &cur,
                     std::vector<std::vector<unsigned>> &out) {
  if (s == 0) {
    auto m = cur;
    std::sort(m.begin(), m.end());
    out.push_back(m);
    return;
  }
  unsigned i = s & -s;
  unsigned rest = s ^ i;
  if (!single_used) {
    cur.push_back(i);
    pairings(rest, true, cur, out);
    cur.pop_back();
  }
  for (unsigned r = rest; r; r &= r - 1) {
    unsigned j = r & -r;
    cur.push_back(i | j);
    pairings(rest ^ j, single_used, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<unsigned>> pairings(unsigned s) {
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> cur;
  pairings(s, false, cur, out);
  return out;
}

// Phase-one simplex with Bland's rule: some x >= 0 with A x = c, or none.
inline std::optional<std::vector<Rat>> lp_feasible(std::vector<std::vector<Rat>> A, std::vector<Rat> c) {
  int m = int(A.size());
  int n = m ? int(A[0].size()) : 0;
  for (int i = 0; i < m; ++i)
    if (sgn(c[i]) < 0) {
      for (auto &a : A[i])
        a = -a;
      c[i] = -c[i];
    }
  int W = n + m;
  std::vector<std::vector<Rat>> T(m, std::vector<Rat>(W + 1, Rat(0)));
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j)
      T[i][j] = A[i][j];
    T[i][n + i] = 1;
    T[i][W] = c[i];
    basis[i] = n + i;
  }
  std::vector<Rat> d(W + 1, Rat(0)); // reduced costs of sum(artificials)
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= W; ++j)
      if (j < n || j == W)
        d[j] -= T[i][j];
  for (int iter = 0;; ++iter) {
    if (iter > 100000)
      throw InvariantError("simplex did not terminate");
    int enter = -1;
    for (int j = 0; j < W; ++j)
      if (sgn(d[j]) < 0) {
        enter = j;
        break;
      }
    if (enter < 0)
      break;
    int leave = -1;
    Rat best;
    for (int i = 0; i < m; ++i) {
      if (sgn(T[i][enter]) <= 0)
        continue;
      Rat q = T[i][W] / T[i][enter];
      if (leave < 0 || q < best || (q == best && basis[i] < basis[leave])) {
        leave = i;
        best = q;
      }
    }
    ensure(leave >= 0, "phase-one objective is bounded below");
    Rat piv = T[leave][enter];
    for (auto &x : T[leave])
      x /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave || sgn(T[i][enter]) == 0)
        continue;
      Rat f = T[i][enter];
      for (int j = 0; j <= W; ++j)
        if (sgn(T[leave][j]) != 0)
          T[i][j] -= f * T[leave][j];
    }
    if (sgn(d[enter]) != 0) {
      Rat f = d[enter];
      for (int j = 0; j <= W; ++j)
        if (sgn(T[leave][j]) != 0)
          d[j] -= f * T[leave][j];
    }
    basis[leave] = enter;
  }
  if (sgn(d[W]) != 0) // -(sum of artificials) at the optimum
    return std::nullopt;
  std::vector<Rat> x(n, Rat(0));
  for (int i = 0; i < m; ++i)
    if (basis[i] < n)
      x[basis[i]] = T[i][W];
  return x;
}

} // namespace detail

// Certificate B >= 0 for the two winding conditions, found by exact LP;
// none when the LP is infeasible.
inline std::optional<WindCert> windable_check(const Table &F) {
  int J = F.arity;
  if (J < 0 || J > 3)
    throw PreconditionError("windable_check handles arity at most 3");
  if (F.v.size() != (std::size_t(1) << J))
    throw PreconditionError("table size does not match arity");
  for (auto &x : F.v)
    if (sgn(x) < 0)
      throw PreconditionError("windability needs a nonnegative table");
  unsigned S = 1u << J;

  struct Key {
    unsigned x, y;
    std::vector<unsigned> M;
    bool operator<(const Key &o) const { return std::tie(x, y, M) < std::tie(o.x, o.y, o.M); }
  };
  std::vector<Key> keys;
  std::map<Key, int> id;
  for (unsigned x = 0; x < S; ++x)
    for (unsigned y = 0; y < S; ++y)
      for (auto &M : detail::pairings(x ^ y)) {
        Key k{x, y, M};
        id[k] = int(keys.size());
        keys.push_back(k);
      }
  // orbits under flipping parts of M
  std::vector<int> parent(keys.size());
  for (std::size_t i = 0; i < parent.size(); ++i)
    parent[i] = int(i);
  std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
  for (std::size_t i = 0; i < keys.size(); ++i)
    for (unsigned part : keys[i].M) {
      int j = id.at(Key{keys[i].x ^ part, keys[i].y ^ part, keys[i].M});
      parent[find(int(i))] = find(j);
    }
  std::map<int, int> orbit_col;
  for (std::size_t i = 0; i < keys.size(); ++i)
    orbit_col.emplace(find(int(i)), int(orbit_col.size()));
  int ncol = int(orbit_col.size());

  std::vector<std::vector<Rat>> A;
  std::vector<Rat> c;
  for (unsigned x = 0; x < S; ++x)
    for (unsigned y = 0; y < S; ++y) {
      std::vector<Rat> row(ncol, Rat(0));
      for (auto &M : detail::pairings(x ^ y))
        row[orbit_col.at(find(id.at(Key{x, y, M})))] += 1;
      A.push_back(std::move(row));
      c.push_back(F(x) * F(y));
    }
  auto sol = detail::lp_feasible(A, c);
  if (!sol)
    return std::nullopt;
  WindCert cert;
  cert.arity = J;
  for (std::size_t i = 0; i < keys.size(); ++i)
    cert.entries.push_back({keys[i].x, keys[i].y, keys[i].M, (*sol)[orbit_col.at(find(int(i)))]});
  return cert;
}

// zero iff the certificate satisfies both conditions; enumerates the
// pairings itself via set partitions
inline std::string windcert_violation(const Table &F, const WindCert &cert) {
  int J = F.arity;
  if (cert.arity != J)
    return "arity mismatch";
  unsigned S = 1u << J;
  std::map<std::tuple<unsigned, unsigned, std::vector<unsigned>>, Rat> B;
  for (auto &e : cert.entries) {
    auto M = e.M;
    std::sort(M.begin(), M.end());
    if (!B.emplace(std::make_tuple(e.x, e.y, M), e.B).second)
      return "duplicate entry";
    if (sgn(e.B) < 0)
      return "negative entry";
  }
  // set partitions of the support of d by restricted growth strings
  auto partitions = [](unsigned d) {
    std::vector<int> bits;
    for (int i = 0; i < 32; ++i)
      if (d >> i & 1)
        bits.push_back(i);
    std::vector<std::vector<unsigned>> out;
    int k = int(bits.size());
    std::vector<int> a(k, 0);
    while (true) {
      int blocks = k ? *std::max_element(a.begin(), a.end()) + 1 : 0;
      std::vector<unsigned> parts(blocks, 0);
      for (int i = 0; i < k; ++i)
        parts[a[i]] |= 1u << bits[i];
      int singles = 0;
      bool ok = true;
      for (unsigned p : parts) {
        int s = __builtin_popcount(p);
        if (s > 2)
          ok = false;
        singles += s == 1;
      }
      if (ok && singles <= 1) {
        std::sort(parts.begin(), parts.end());
        out.push_back(parts);
      }
      int i = k - 1;
      while (i >= 1) {
        int mx = *std::max_element(a.begin(), a.begin() + i);
        if (a[i] <= mx)
          break;
        --i;
      }
      if (i < 1)
        break;
      ++a[i];
      for (int j = i + 1; j < k; ++j)
        a[j] = 0;
    }
    return out;
  };
  std::size_t expected = 0;
  for (unsigned x = 0; x < S; ++x)
    for (unsigned y = 0; y < S; ++y) {
      Rat sum(0);
      for (auto &M : partitions(x ^ y)) {
        ++expected;
        auto it = B.find({x, y, M});
        if (it == B.end())
          return "missing entry";
        sum += it->second;
        for (unsigned part : M) {
          auto jt = B.find({x ^ part, y ^ part, M});
          if (jt == B.end() || jt->second != it->second)
            return "flip symmetry fails";
        }
      }
      if (sum != F(x) * F(y))
        return "product condition fails at x=" + std::to_string(x) + " y=" + std::to_string(y);
    }
  if (expected != B.size())
    return "extra entries";
  return "";
}

inline bool strictly_terraced_check(const Table &F) {
  unsigned S = 1u << F.arity;
  for (unsigned x = 0; x < S; ++x) {
    if (sgn(F(x)) != 0)
      continue;
    for (int i = 0; i < F.arity; ++i)
      for (int j = i + 1; j < F.arity; ++j)
        if (F(x ^ (1u << i)) != F(x ^ (1u << j)))
          return false;
  }
  return true;
}

// ---- worm chain -----------------------------------------------------------

// Metropolis chain on assignments of a loop-free subgraphs-world instance
// with at most two parity defects.  Moves, chosen uniformly: flip one free
// variable, or flip both variables of an edge table.  Target weight: product
// of tables times rho^(number of defects).  Only defect-free states are
// samples; zero-weight states are never entered.
class WormChain {
public:
  struct State {
    std::vector<int> y;
    std::vector<char> par; // parity per constraint (parity vertices only)
    int defects = 0;
    bool operator<(const State &o) const { return y < o.y; }
  };

  WormChain(const HolantInstance &I, Rat rho) : inst_(I), rho_(std::move(rho)) {
    I.validate();
    var_even_.assign(I.num_vars, -1);
    var_table_.assign(I.num_vars, -1);
    var_slot_.assign(I.num_vars, 0);
    for (int c = 0; c < int(I.vertices.size()); ++c) {
      auto &con = I.vertices[c];
      if (con.even) {
        for (int x : con.scope) {
          if (var_even_[x] >= 0)
            throw PreconditionError("worm chain needs each variable at one parity constraint");
          var_even_[x] = c;
        }
      } else {
        if (con.scope.size() != 2)
          throw PreconditionError("worm chain needs binary tables");
        for (int s = 0; s < 2; ++s) {
          if (var_table_[con.scope[s]] >= 0)
            throw PreconditionError("worm chain needs each variable at one table");
          var_table_[con.scope[s]] = c;
          var_slot_[con.scope[s]] = s;
        }
        for (auto &w : con.table.v)
          if (sgn(w) < 0)
            throw PreconditionError("worm chain needs nonnegative tables");
      }
    }
    for (int x = 0; x < I.num_vars; ++x)
      if (var_even_[x] < 0 || var_table_[x] < 0)
        throw PreconditionError("worm chain needs variables between a parity vertex and a table");
    if (!(sgn(rho_) > 0))
      throw PreconditionError("defect weight must be positive");
    tabd_.resize(I.vertices.size());
    for (int c = 0; c < int(I.vertices.size()); ++c)
      if (!I.vertices[c].even)
        for (int k = 0; k < 4; ++k)
          tabd_[c][k] = to_double(I.vertices[c].table(k));
    for (int d = -2; d <= 2; ++d)
      rho_pow_[d + 2] = std::pow(to_double(rho_), d);
    auto mk = [&](int a, int b) {
      Move mv{a, b, var_table_[a], 1u << var_slot_[a], var_even_[a], b >= 0 ? var_even_[b] : -1};
      if (b >= 0)
        mv.mask |= 1u << var_slot_[b];
      moves_.push_back(mv);
    };
    for (int x = 0; x < I.num_vars; ++x)
      if (I.pin[x] < 0)
        mk(x, -1);
    for (int c = 0; c < int(I.vertices.size()); ++c) {
      auto &con = I.vertices[c];
      if (!con.even && I.pin[con.scope[0]] < 0 && I.pin[con.scope[1]] < 0)
        mk(con.scope[0], con.scope[1]);
    }
  }

  const HolantInstance &instance() const { return inst_; }
  std::size_t move_count() const { return moves_.size(); }
  const Rat &rho() const { return rho_; }

  State make_state(std::vector<int> y) const {
    State s{std::move(y), std::vector<char>(inst_.vertices.size(), 0), 0};
    for (int c = 0; c < int(inst_.vertices.size()); ++c)
      if (inst_.vertices[c].even) {
        for (int x : inst_.vertices[c].scope)
          s.par[c] ^= char(s.y[x]);
        s.defects += s.par[c];
      }
    return s;
  }

  Rat weight(const State &s) const {
    if (s.defects > 2)
      return Rat(0);
    Rat w(1);
    for (auto &con : inst_.vertices)
      if (!con.even)
        w *= con.table(unsigned(s.y[con.scope[0]]) | unsigned(s.y[con.scope[1]]) << 1);
    for (int i = 0; i < s.defects; ++i)
      w *= rho_;
    return w;
  }

  // exact transition law from s: (target, probability), rejected mass on s
  std::vector<std::pair<State, Rat>> transitions(const State &s) const {
    std::vector<std::pair<State, Rat>> out;
    Rat w = weight(s);
    ensure(sgn(w) > 0, "chain state has positive weight");
    if (moves_.empty())
      return {{s, Rat(1)}};
    Rat each = Rat(1, long(moves_.size()));
    Rat stay(0);
    for (auto &mv : moves_) {
      State t = s;
      apply(t, mv);
      Rat wt = weight(t);
      if (sgn(wt) == 0) {
        stay += each;
        continue;
      }
      Rat acc = wt >= w ? Rat(1) : Rat(wt / w);
      out.push_back({t, each * acc});
      stay += each * (1 - acc);
    }
    if (sgn(stay) > 0)
      out.push_back({s, stay});
    return out;
  }

  // targets of the moves accepted with positive probability
  template <class F> void for_each_target(const State &s, F &&f) const {
    for (auto &mv : moves_) {
      if (s.defects + delta_defects(s, mv) > 2)
        continue;
      auto &sc = inst_.vertices[mv.t].scope;
      unsigned before = unsigned(s.y[sc[0]]) | unsigned(s.y[sc[1]]) << 1;
      if (tabd_[mv.t][before ^ mv.mask] == 0)
        continue;
      State t = s;
      apply(t, mv);
      f(t);
    }
  }

  template <class Rng> void step(State &s, Rng &rng) const {
    if (moves_.empty())
      return;
    const Move &mv = moves_[std::size_t((static_cast<unsigned __int128>(rng()) * moves_.size()) >> 64)];
    int dd = delta_defects(s, mv);
    int nd = s.defects + dd;
    if (nd > 2)
      return;
    auto &sc = inst_.vertices[mv.t].scope;
    unsigned before = unsigned(s.y[sc[0]]) | unsigned(s.y[sc[1]]) << 1;
    double wa = tabd_[mv.t][before ^ mv.mask];
    if (wa == 0)
      return;
    double ratio = wa / tabd_[mv.t][before] * rho_pow_[dd + 2];
    if (ratio < 1 && !(double(rng() >> 11) * 0x1.0p-53 < ratio))
      return;
    apply(s, mv);
  }

private:
  struct Move {
    int a, b;  // b < 0 for a single flip
    int t;     // the table both variables belong to
    unsigned mask;
    int ea, eb;
  };

  static int delta_defects(const State &s, const Move &mv) {
    int d = s.par[mv.ea] ? -1 : 1;
    if (mv.b >= 0)
      d += mv.eb == mv.ea ? -d : (s.par[mv.eb] ? -1 : 1);
    return d;
  }

  static void apply(State &s, const Move &mv) {
    s.defects += delta_defects(s, mv);
    s.y[mv.a] ^= 1;
    s.par[mv.ea] ^= 1;
    if (mv.b >= 0) {
      s.y[mv.b] ^= 1;
      s.par[mv.eb] ^= 1;
    }
  }

  HolantInstance inst_;
  Rat rho_;
  std::array<double, 5> rho_pow_{}; // rho^(d) for d = -2..2
  std::vector<int> var_even_, var_table_, var_slot_;
  std::vector<std::array<double, 4>> tabd_;
  std::vector<Move> moves_;
};

// states reachable from `start`, capped; none if the cap is hit
inline std::optional<std::vector<WormChain::State>> worm_reachable(const WormChain &ch,
                                                                   const WormChain::State &start,
                                                                   std::size_t cap = 1u << 18) {
  std::map<std::vector<int>, int> seen;
  std::vector<WormChain::State> order{start};
  seen.emplace(start.y, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (auto &[t, pr] : ch.transitions(order[i]))
      if (seen.emplace(t.y, int(order.size())).second) {
        order.push_back(t);
        if (order.size() > cap)
          return std::nullopt;
      }
  }
  return order;
}

// every defect-free nonzero assignment reachable from start; none past the cap
inline std::optional<bool> worm_connected(const WormChain &ch, const WormChain::State &start,
                                          std::size_t cap = 1u << 18) {
  std::set<std::vector<int>> seen{start.y};
  std::vector<WormChain::State> todo{start};
  long reached = 0;
  while (!todo.empty()) {
    auto s = std::move(todo.back());
    todo.pop_back();
    reached += s.defects == 0;
    bool over = false;
    ch.for_each_target(s, [&](const WormChain::State &t) {
      if (seen.insert(t.y).second) {
        todo.push_back(t);
        over |= seen.size() > cap;
      }
    });
    if (over)
      return std::nullopt;
  }
  long total = 0;
  detail::holant_walk(ch.instance(), [&](const std::vector<int> &, const Rat &) {
    ++total;
    return true;
  });
  return reached == total;
}

// ---- estimator ------------------------------------------------------------

struct FprasOptions {
  Rat rho = Rat(1, 4);         // defect weight
  double sample_factor = 8;    // samples per stage = factor * stages / eps^2
  int sweep = 0;               // steps between samples; 0 means half the initial moves
  int burn_in_sweeps = 20;
  double pilot_fraction = 0.25;
  int replicas = 0;          // 0: chosen from delta
  std::size_t connectivity_cap = 1u << 16;
};

struct FprasResult {
  Rat estimate;
  std::vector<Rat> replica_estimates;
  SpinParams used;
  int stages = 0;
  long samples_per_stage = 0;
  long steps = 0;
  bool degenerate = false; // no nonzero configuration: Z_G = 0 exactly
};

inline SpinParams fpras_orientation(const SpinParams &p) {
  Rat s = p.beta + p.gamma;
  bool pos = s >= 2;
  if (pos ? p.beta < p.gamma : p.beta > p.gamma)
    return p.swapped();
  return p;
}

// odd replica count for the median, growing like log(1/delta)
inline int fpras_replicas(const Rat &delta) {
  int r = int(std::ceil(std::log(1 / to_double(delta)) / 4));
  return 2 * std::max(r, 0) + 1;
}

inline FprasResult fpras_estimate(const Multigraph &g, const SpinParams &p, const Rat &eps, const Rat &delta,
                                  std::uint64_t seed, const FprasOptions &opt = {}) {
  if (p.beta == p.gamma)
    throw RegionError("fpras needs beta != gamma");
  if (rabs(p.beta + p.gamma) < 2)
    throw RegionError("fpras needs |beta + gamma| >= 2");
  if (g.has_loops())
    throw PreconditionError("fpras does not accept self-loops");
  if (!(sgn(eps) > 0 && eps < 1))
    throw PreconditionError("eps must lie in (0,1)");
  if (!(sgn(delta) > 0 && delta < 1))
    throw PreconditionError("delta must lie in (0,1)");

  FprasResult out;
  out.used = fpras_orientation(p);
  HolantInstance base = subgraphs_world(g, out.used);
  int m = g.edge_count();
  out.stages = m;
  if (m == 0) {
    out.estimate = world_value(base, Rat(1));
    return out;
  }
  auto start = support_point(base);
  if (!start) {
    out.degenerate = true;
    out.estimate = 0;
    return out;
  }
  bool has_zero = false;
  for (auto &c : base.vertices)
    if (!c.even)
      for (auto &w : c.table.v)
        has_zero |= sgn(w) == 0;

  double e = to_double(eps);
  out.samples_per_stage = long(std::ceil(opt.sample_factor * m / (e * e)));
  int R = opt.replicas > 0 ? opt.replicas : fpras_replicas(delta);
  std::mt19937_64 rng(seed);

  long sweep = opt.sweep > 0 ? opt.sweep : std::max(1L, long(3 * m / 2)); // half the unpinned moves
  std::map<std::vector<int>, bool> connected; // by pin pattern
  for (int r = 0; r < R; ++r) {
    HolantInstance I = base;
    std::vector<int> y = *start;
    Rat prod(1);
    for (int ed = 0; ed < m; ++ed) {
      WormChain ch(I, opt.rho);
      auto s = ch.make_state(y);
      if (has_zero && !connected.count(I.pin)) {
        auto ok = worm_connected(ch, s, opt.connectivity_cap);
        if (!ok)
          throw SizeCapError("cannot verify worm-chain connectivity at this size");
        if (!*ok)
          throw InvariantError("worm chain is not connected on the nonzero configurations");
        connected[I.pin] = true;
      }
      for (long t = 0; t < sweep * opt.burn_in_sweeps; ++t)
        ch.step(s, rng);
      out.steps += sweep * opt.burn_in_sweeps;
      int a = 2 * ed, b = 2 * ed + 1;
      std::array<std::vector<int>, 4> keep;
      auto collect = [&](long want) {
        std::array<long, 4> cnt{};
        for (long got = 0; got < want;) {
          for (long t = 0; t < sweep; ++t)
            ch.step(s, rng);
          out.steps += sweep;
          if (s.defects)
            continue;
          int k = s.y[a] | s.y[b] << 1;
          if (cnt[k]++ == 0 && keep[k].empty())
            keep[k] = s.y;
          ++got;
        }
        return cnt;
      };
      // the pinned value comes from a pilot run so that its frequency in
      // the main run is unbiased
      auto pilot = collect(std::max(50L, long(out.samples_per_stage * opt.pilot_fraction)));
      int best = int(std::max_element(pilot.begin(), pilot.end()) - pilot.begin());
      long n = out.samples_per_stage;
      auto cnt = collect(n);
      while (cnt[best] == 0) {
        auto more = collect(n);
        for (int k = 0; k < 4; ++k)
          cnt[k] += more[k];
        n *= 2;
      }
      prod *= Rat(cnt[best], n);
      I.pin[a] = best & 1;
      I.pin[b] = best >> 1;
      y = keep[best];
    }
    Rat w = I.weight(y);
    ensure(sgn(w) > 0, "final pinned configuration has positive weight");
    out.replica_estimates.push_back(world_value(I, w / prod));
  }
  auto v = out.replica_estimates;
  std::nth_element(v.begin(), v.begin() + R / 2, v.end());
  out.estimate = v[R / 2];
  return out;
}

} // namespace spin2
