#pragma once

// Counting minimum (s,t)-cuts with nothing but signs of partition
// functions.  The sign oracle here is the exact engine, evaluated in
// factored form on the edge-replaced graph.

#include "ising.hpp"

#include <functional>
#include <map>

namespace spin2 {

struct CutInstance {
  Multigraph g;
  int s = 0, t = 1;
};

inline void check_cut_instance(const CutInstance &in) {
  in.g.check_vertex(in.s);
  in.g.check_vertex(in.t);
  if (in.s == in.t)
    throw PreconditionError("s and t must differ");
  for (auto [a, b] : in.g.edges)
    if (a == b)
      throw PreconditionError("cut instances must be loop-free");
  if (!connected(in.g))
    throw PreconditionError("cut instance must be connected");
}

struct MinCut {
  int k = 0;
  Integer C;
};

// vertex bipartitions with s on side 0 and t on side 1
inline MinCut mincut_bruteforce(const CutInstance &in) {
  check_cut_instance(in);
  if (in.g.n > 24)
    throw SizeCapError("min-cut enumeration limited to 24 vertices");
  std::vector<int> free;
  for (int v = 0; v < in.g.n; ++v)
    if (v != in.s && v != in.t)
      free.push_back(v);
  MinCut best{int(in.g.edge_count()) + 1, Integer(0)};
  std::vector<int> side(in.g.n, 0);
  side[in.t] = 1;
  for (unsigned long mask = 0; mask < (1UL << free.size()); ++mask) {
    for (std::size_t i = 0; i < free.size(); ++i)
      side[free[i]] = int(mask >> i & 1);
    int cut = 0;
    for (auto [a, b] : in.g.edges)
      cut += side[a] != side[b];
    if (cut < best.k)
      best = {cut, Integer(1)};
    else if (cut == best.k)
      best.C += 1;
  }
  return best;
}

// [Z_{G',s,t}] where G' replaces every edge by the two-terminal gadget;
// summed over spins of G, never building G'
inline RealPairMatrix lifted_pair_matrix(const CutInstance &in, const RealPairMatrix &A) {
  check_cut_instance(in);
  if (in.g.n > 22)
    throw SizeCapError("lifted matrix limited to 22 vertices");
  int m = int(in.g.edge_count());
  // counts by (sigma_s, sigma_t, #00 edges, #11 edges)
  std::map<std::array<int, 4>, unsigned long> cnt;
  std::vector<int> sp(in.g.n);
  for (unsigned long mask = 0; mask < (1UL << in.g.n); ++mask) {
    for (int v = 0; v < in.g.n; ++v)
      sp[v] = int(mask >> v & 1);
    int n00 = 0, n11 = 0;
    for (auto [a, b] : in.g.edges) {
      n00 += sp[a] == 0 && sp[b] == 0;
      n11 += sp[a] == 1 && sp[b] == 1;
    }
    ++cnt[{sp[in.s], sp[in.t], n00, n11}];
  }
  auto P00 = detail::powers(A.m[0][0], m), P11 = detail::powers(A.m[1][1], m), PN = detail::powers(A.m[0][1], m);
  ensure(A.m[0][1] == A.m[1][0], "gadget matrix must be symmetric");
  RealPairMatrix out;
  for (auto &row : out.m)
    for (auto &x : row)
      x = 0;
  for (auto &[key, c] : cnt) {
    auto [a, b, n00, n11] = key;
    out.m[a][b] += Rat(Integer(c)) * P00[n00] * P11[n11] * PN[m - n00 - n11];
  }
  return out;
}

inline RealPairMatrix lifted_pair_matrix(const CutInstance &in, const IsingGadget &ig) {
  return lifted_pair_matrix(in, ig.pair);
}

// G' built explicitly (small gadgets only)
inline Multigraph expand_lift(const CutInstance &in, const IsingGadget &ig) {
  Multigraph out(in.g.n);
  for (auto [a, b] : in.g.edges) {
    int base = out.n;
    out.n += ig.graph.n;
    // gadget vertex x -> a if x == u, b if x == v, else base + x
    auto map = [&](int x) { return x == ig.u ? a : x == ig.v ? b : base + x; };
    for (auto [x, y] : ig.graph.edges)
      out.add_edge(map(x), map(y));
  }
  // drop the two unused slots per copy
  std::vector<int> deg = out.degrees(), idx(out.n, -1);
  int n = 0;
  for (int v = 0; v < out.n; ++v)
    if (v < in.g.n || deg[v] > 0)
      idx[v] = n++;
  Multigraph g(n);
  for (auto [x, y] : out.edges)
    g.add_edge(idx[x], idx[y]);
  return g;
}

// sign of Z for G' with H1 at s and H2 at t
inline int sign_T(const RealPairMatrix &Z, const RealActivity &a1, const RealActivity &a2) {
  Rat v = a1.z0 * a2.z0 * Z.m[0][0] + a1.z1 * a2.z0 * Z.m[1][0] + a1.z0 * a2.z1 * Z.m[0][1] +
          a1.z1 * a2.z1 * Z.m[1][1];
  return sgn(v);
}

struct SearchStep {
  Rat p, q, r, eps, h1, h2, x;
  int sign = 0; // sign of T(h1, h2)
  int h1_vertices = 0, h2_vertices = 0;
  bool in_third_window = false;
};

struct ReductionOptions {
  // true: the paper-scale Ising accuracy 2^-4m and the plain L/U sandwich
  bool literal = false;
};

struct ReductionResult {
  int k = 0;
  Integer C;
  int oracle_queries = 0;
  std::vector<SearchStep> transcript;
  Rat p, q;
  Rat M0, M1, N, eps_ising, slack_p, slack_q;
  unsigned long ising_k = 0;
  int ising_vertices = 0;
  Rat bound_ratio, chain_ratio;
  bool resolved = false;
};

namespace detail {

// x^9 compared against A = |p|^5 |q|^4 and B = |p|^4 |q|^5
inline Rat ninth_window_point(const Rat &ap, const Rat &aq) {
  Rat A = rpow(ap, 5) * rpow(aq, 4), B = rpow(ap, 4) * rpow(aq, 5);
  // geometric middle as a float guess, then dyadic bisection
  double mid = 0.5 * (approx_ln(ap) + approx_ln(aq)) / std::log(2.0);
  long e = long(std::floor(mid)) - 60;
  Rat guess = Rat(Integer(std::ldexp(1.0, 60) * std::exp2(mid - std::floor(mid)))) * pow2(e);
  Rat g9 = rpow(guess, 9);
  if (g9 > A && g9 < B)
    return guess;
  Rat lo = ap, hi = aq;
  while (true) {
    Rat c = dyadic_between(lo, hi);
    Rat c9 = rpow(c, 9);
    if (!(c9 > A))
      lo = c;
    else if (!(c9 < B))
      hi = c;
    else
      return c;
  }
}

// x in (-|p|^(1/3)|q|^(2/3), -|p|^(2/3)|q|^(1/3)), checked with cubes
inline bool in_third_window(const Rat &x, const Rat &p, const Rat &q) {
  if (sgn(x) >= 0)
    return false;
  Rat ax = -x, ap = -p, aq = -q;
  Rat x3 = ax * ax * ax;
  return x3 < ap * aq * aq && x3 > ap * ap * aq;
}

} // namespace detail

// Loop: find (p, q) with q/p < e^delta, L(q) < 0, U(p) > 0.  `oracle`
// returns the sign of T at the realized pair.
inline std::pair<Rat, Rat>
binary_search_zero(const SpinParams &sp, const LandmarkSet &L, int m, const Rat &M1,
                   const std::function<int(const RatioGadget &, const RatioGadget &)> &oracle,
                   std::vector<SearchStep> *transcript = nullptr) {
  Rat delta = pow2(-4 * m);
  Rat p(-4), q = -rpow(M1, m);
  Rat h1_eps(0);
  RatioGadget H1;
  while (!lt_exp(q / p, delta)) {
    Rat r = -detail::ninth_window_point(-p, -q);
    // eps = 2^-j <= 2^-4m / (100 |r|)
    Rat cap = delta / (100 * rabs(r));
    long j = -ilog2(cap);
    Rat eps = pow2(-j);
    while (eps > cap)
      eps /= 2;
    if (eps != h1_eps) {
      H1 = realize_signed(sp, Rat(-1, 2), eps, L);
      h1_eps = eps;
    }
    RatioGadget H2 = realize_signed(sp, (2 * r + 1) / (2 + r), eps, L);
    Rat h1 = H1.ratio(), h2 = H2.ratio();
    Rat x = (h1 + h2) / (1 + h1 * h2);
    SearchStep st{p, q, r, eps, h1, h2, x, 0, H1.vertices(), H2.vertices(), detail::in_third_window(x, p, q)};
    ensure(st.in_third_window, "combined ratio outside the one-third window");
    st.sign = oracle(H1, H2);
    if (st.sign > 0)
      p = x;
    else
      q = x;
    if (transcript)
      transcript->push_back(std::move(st));
  }
  return {p, q};
}

// T(h1, h2) = (Z00 + h1 Z10 + h2 Z01 + h1 h2 Z11) / ((1 + h1 h2) N^m)
inline Rat T_value(const RealPairMatrix &Z, const Rat &N, int m, const Rat &h1, const Rat &h2) {
  return (Z.m[0][0] + h1 * Z.m[1][0] + h2 * Z.m[0][1] + h1 * h2 * Z.m[1][1]) / ((1 + h1 * h2) * rpow(N, m));
}

// Writing x = (h1+h2)/(1+h1h2), T = D0 + x E1 + w (D1 - D0) + u (E0 - E1)
// with w = h1h2/(1+h1h2), u = h1/(1+h1h2).  Swapping M0 and M1 pairs up
// the terms of D0, D1 (and E0, E1) within a factor e^(m eps), so the last
// two terms are at most eta (|w| Dmax + |u| Emax).
inline Rat cross_term_bound(int m, const Rat &eps_ising, const Rat &M1, const Rat &h1, const Rat &h2) {
  Rat delta = pow2(-4 * m);
  Rat me = m * eps_ising;
  Rat eta = me * (1 + me); // e^x - 1 <= x + x^2 for x <= 1
  Rat Dmax = (1 + delta) * rpow(M1, m), Emax = (1 + delta) * pow2(m) * rpow(M1, m - 1);
  Rat den = 1 + h1 * h2;
  return eta * (rabs(h1 * h2 / den) * Dmax + rabs(h1 / den) * Emax);
}

// Ising accuracy small enough that the cross terms of T stay below the
// resolution needed to separate C from C + 1
inline Rat corrected_ising_eps(const SpinParams &sp, int m) {
  Rat base = sgn(sp.beta + sp.gamma) != 0 ? ising_growth(sp) : Rat(8);
  Rat Mhi = 8 * base * pow2(5 * m);
  Rat cap = pow2(-m) / (40 * m * rpow(Mhi, m));
  cap = std::min(cap, pow2(-4 * m));
  Rat eps = pow2(-ilog2(cap));
  while (eps > cap)
    eps /= 2;
  return eps;
}

inline ReductionResult reduction_count_mincuts(const SpinParams &sp, const CutInstance &in,
                                               const ReductionOptions &opt = {}) {
  require_gamma_region(sp);
  check_cut_instance(in);
  int m = int(in.g.edge_count());
  if (in.g.n > 10 || m > 12)
    throw SizeCapError("reduction demo limited to 10 vertices and 12 edges");
  ReductionResult res;
  Rat delta = pow2(-4 * m);
  res.eps_ising = opt.literal ? delta : corrected_ising_eps(sp, m);
  IsingGadget ig = realize_ising(sp, pow2(5 * m), res.eps_ising);
  while (!opt.literal && res.eps_ising * 40 * m * rpow(ig.M1, m) > pow2(-m)) {
    res.eps_ising /= rpow(Rat(2), 4 * m);
    ig = realize_ising(sp, pow2(5 * m), res.eps_ising);
  }
  res.M0 = ig.M0;
  res.M1 = ig.M1;
  res.N = ig.N;
  res.ising_k = ig.k;
  res.ising_vertices = ig.graph.n;
  RealPairMatrix Z = lifted_pair_matrix(in, ig);
  LandmarkSet L = landmarks(sp);

  auto oracle = [&](const RatioGadget &H1, const RatioGadget &H2) {
    ++res.oracle_queries;
    Rat h1 = H1.ratio(), h2 = H2.ratio();
    return sign_T(Z, H1.act, H2.act) * sgn(1 + h1 * h2) * sgn(H1.act.z0) * sgn(H2.act.z0);
  };
  auto [p, q] = binary_search_zero(sp, L, m, ig.M1, oracle, &res.transcript);
  res.p = p;
  res.q = q;
  res.slack_p = res.slack_q = 0;
  if (!opt.literal)
    for (auto &st : res.transcript) {
      Rat B = cross_term_bound(m, res.eps_ising, ig.M1, st.h1, st.h2);
      if (st.x == p)
        res.slack_p = B;
      if (st.x == q)
        res.slack_q = B;
    }

  // C < ((1+d) M1^m + Bp) / (-p M0^(m-k)),  C > (M0^m - Bq) / ((1+d)(-q) M1^(m-k))
  Integer cap = Integer(1) << m;
  int hits = 0;
  for (int k = 1; k <= m; ++k) {
    Rat up = ((1 + delta) * rpow(ig.M1, m) + res.slack_p) / (-p * rpow(ig.M0, m - k));
    Rat lo = (rpow(ig.M0, m) - res.slack_q) / ((1 + delta) * (-q) * rpow(ig.M1, m - k));
    Integer c = floor_of(lo) + 1;
    if (c < 1)
      c = 1;
    for (; c <= cap && Rat(c) < up; c += 1) {
      ++hits;
      res.k = k;
      res.C = c;
      res.bound_ratio = up / lo;
    }
  }
  res.resolved = hits == 1;
  if (res.resolved)
    res.chain_ratio = (1 + delta) * (1 + delta) * (q / p) * rpow(ig.M1 / ig.M0, 2 * m - res.k);
  return res;
}

} // namespace spin2
