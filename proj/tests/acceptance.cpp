// One PASS/FAIL line per acceptance criterion, followed by indented details.
// Exit status is nonzero when any criterion fails.

#include "oracle.hpp"

#include <spin2/spin2.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace spin2;
using testutil::random_in;
using testutil::random_multigraph;
using testutil::random_rat;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string &what) {
    if (!ok) {
      if (pass || notes.size() < 12)
        notes.push_back("violated: " + what);
      pass = false;
    }
  }
  void note(const std::string &s) { notes.push_back(s); }
};

template <class... A> std::string fmt(A &&...a) {
  std::ostringstream os;
  (os << ... << a);
  return os.str();
}

std::string pt(const SpinParams &p) { return fmt("(", p.beta, ",", p.gamma, ")"); }

// sufficient tests first, the rigorous enclosure only when they are inconclusive
bool below_exp(const Rat &q, const Rat &eps) {
  if (q < 1 + eps + eps * eps / 2)
    return true;
  return lt_exp(q, eps);
}
bool above_exp_neg(const Rat &q, const Rat &eps) {
  if (q > 1 - eps + eps * eps / 2)
    return true;
  return gt_exp(q, -eps);
}

// ------------------------------------------------------------------ 1

Outcome oracle_consistency() {
  Outcome o;
  std::mt19937_64 rng(101);
  int loops = 0, parallel = 0;
  for (int it = 0; it < 500; ++it) {
    auto g = random_multigraph(rng, 10, 14);
    SpinParams p{random_rat(rng), random_rat(rng)};
    std::vector<Rat> lam;
    for (int v = 0; v < g.n; ++v)
      lam.push_back(random_rat(rng));
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : g.edges) {
      loops += a == b;
      parallel += !seen.insert({std::min(a, b), std::max(a, b)}).second;
    }
    std::string tag = fmt("graph ", it, " at ", pt(p));
    Rat Z = partition_fn(g, p, lam);
    o.check(Z == testutil::naive_pinned(g, p, lam, std::vector<int>(g.n, -1)), tag + ": enumeration oracle");
    int u = int(rng() % g.n), v = int(rng() % g.n);
    auto au = activity_vector(g, u, p, lam);
    o.check(au.sum() == Z, tag + ": activity vector sum");
    auto M = pair_matrix(g, u, v, p, lam);
    o.check(M.sum() == Z, tag + ": pair matrix sum");
    o.check(M[0][0] + M[0][1] == au.z0 && M[1][0] + M[1][1] == au.z1, tag + ": pair matrix rows");
    o.check(z_polynomial(g, p).eval(Rat(1)) == partition_fn(g, p), tag + ": z_polynomial(1)");
    // deletion identity on a non-loop edge
    for (int idx = 0; idx < int(g.edge_count()); ++idx) {
      auto [a, b] = g.edges[idx];
      if (a == b)
        continue;
      auto D = pair_matrix(delete_edge(g, idx), a, b, p, lam);
      o.check(Z == p.beta * D[0][0] + D[0][1] + D[1][0] + p.gamma * D[1][1], tag + ": edge deletion");
      break;
    }
  }
  o.note(fmt("500 multigraphs, ", loops, " self-loops and ", parallel, " parallel edges in total"));
  return o;
}

// ------------------------------------------------------------------ 2

Outcome positivity() {
  Outcome o;
  std::mt19937_64 rng(202);
  long points = 0;
  Rat worst_lo(1), worst_hi(-1);
  for (int gi = 0; gi < 200; ++gi) {
    auto g = random_multigraph(rng, 9, 13);
    for (int k = 0; k < 50; ++k) {
      Rat ga = -random_in(rng, Rat(1, 32), Rat(3), 96);
      Rat s = random_in(rng, Rat(1), Rat(4), 96);
      SpinParams p{s - ga, ga};
      Rat lo = ga / p.beta;
      std::vector<Rat> lam;
      for (int v = 0; v < g.n; ++v)
        lam.push_back(random_in(rng, lo, Rat(1), 64));
      Rat Z = partition_fn(g, p, lam);
      o.check(sgn(Z) > 0, fmt("Z > 0 on graph ", gi, " at ", pt(p)));
      for (int v = 0; v < g.n; ++v) {
        auto a = activity_vector(g, v, p, lam);
        if (sgn(a.z0) == 0) {
          o.check(false, "z0 = 0");
          continue;
        }
        Rat r = a.z1 / a.z0;
        o.check(r >= lo && r <= 1, fmt("ratio in [gamma/beta, 1] at ", pt(p)));
        // distance to the interval ends, relative to its length
        Rat rel = (r - lo) / (1 - lo);
        if (rel < worst_lo)
          worst_lo = rel;
        if (rel > worst_hi)
          worst_hi = rel;
      }
      ++points;
    }
  }
  o.note(fmt(points, " (graph, point) pairs; ratios cover ", to_double(worst_lo), " .. ", to_double(worst_hi),
             " of [gamma/beta, 1]"));
  return o;
}

// ------------------------------------------------------------------ 3

Outcome sign_witnesses() {
  Outcome o;
  std::mt19937_64 rng(303);
  int found = 0, gadget_ok = 0, tried = 0;
  Rat closest_miss(-3);
  while (tried < 100) {
    Rat g = -random_in(rng, Rat(1, 64), Rat(2), 128);
    Rat s = random_in(rng, Rat(-2), Rat(1), 192);
    SpinParams p{s - g, g};
    if (!in_gamma_region(p))
      continue;
    ++tried;
    auto w = nonpositive_witness(p, 5, 6);
    if (w) {
      bool neg = sgn(testutil::naive_z(*w, p)) < 0;
      o.check(neg, "bounded-search witness is not negative at " + pt(p));
      found += neg;
    } else if (s > closest_miss) {
      closest_miss = s;
    }
    if (!w) {
      o.check(false, "no graph with <= 5 vertices and <= 6 edges has Z < 0 at " + pt(p) + fmt(" (beta+gamma = ", s, ")"));
    }
    auto gw = gadget_sign_witness(p);
    if (gw && sgn(partition_fn_elim(gw->graph, p)) < 0)
      ++gadget_ok;
    else
      o.note("no gadget witness at " + pt(p) + (gw ? fmt(" (", gw->graph.n, " vertices)") : std::string()));
  }
  o.note(fmt("bounded search: ", found, "/100 points have a witness"));
  if (found < 100)
    o.note(fmt("misses lie in a strip below beta+gamma = 1 (largest missed beta+gamma = ", closest_miss,
               "); every fixed graph has Z > 0 on that line, so no finite search can cover the strip"));
  o.note(fmt("gadget witness (unbounded size, verified by variable elimination): ", gadget_ok, "/100"));
  return o;
}

// ------------------------------------------------------------------ 4

Outcome realize_exp_contract() {
  Outcome o;
  SpinParams p{Rat(1, 2), Rat(-1)};
  auto L = landmarks(p);
  std::mt19937_64 rng(404);
  double c_fit = 0;
  std::vector<std::pair<int, long>> runs;
  int rechecked = 0;
  for (int i = 0; i < 50; ++i) {
    int t = 1 + int(rng() % 24);
    if (i < 5)
      t = 24;
    Rat eps = pow2(-t);
    // R = +-(num/den) * 2^e, spread over many orders of magnitude
    Rat R = Rat(long(1 + rng() % 999), long(1 + rng() % 999)) * pow2(int(rng() % 41) - 20);
    R.canonicalize();
    auto tr = realize_exp_traced(p, R, eps, L);
    Rat rho = tr.gadget.ratio();
    Rat q = rho / R;
    o.check(sgn(q) > 0 && below_exp(q, eps) && above_exp_neg(q, eps),
            fmt("ratio outside (e^-eps R, e^eps R) for R=", R, " eps=2^-", t));
    o.check(tr.claim1 && tr.claim3, "bracketing or gap-squaring claim failed");
    if (tr.gadget.graph.n <= 200000) {
      auto a = activity_vector_elim(tr.gadget.graph, tr.gadget.root, p);
      o.check(a.ratio() == rho, "gadget graph ratio mismatch");
      ++rechecked;
    }
    runs.push_back({t, tr.iterations});
    c_fit = std::max(c_fit, double(tr.iterations) / (t + 1));
  }
  double c = std::ceil(c_fit * 100) / 100;
  for (auto [t, it] : runs)
    o.check(it <= c * t + c, "iteration bound");
  o.check(c <= 2, fmt("fitted constant c = ", c, " is not small"));
  long maxit = 0;
  for (auto &r : runs)
    maxit = std::max(maxit, r.second);
  o.note(fmt("fitted c = ", c, " (iterations <= c log2(1/eps) + c), max iterations ", maxit,
             "; gadget graphs re-evaluated by elimination: ", rechecked, "/50"));
  return o;
}

// ------------------------------------------------------------------ 5

Outcome ising_contract() {
  Outcome o;
  std::vector<SpinParams> grid{{Rat(1, 2), Rat(-1)},   {Rat(0), Rat(-1, 2)},   {Rat(3, 4), Rat(-9, 16)},
                               {Rat(1, 2), Rat(-3, 2)}, {Rat(1, 2), Rat(-1, 2)}, {Rat(-9, 10), Rat(-1)},
                               {Rat(2), Rat(-3, 2)},     {Rat(1, 3), Rat(-1, 3)}};
  int certs = 0, brute = 0, elim = 0, zero_sum = 0, biggest = 0, smallest = 1 << 30;
  for (auto &p : grid)
    for (int e2 : {1, 5, 15, 30})
      for (Rat eps : {Rat(1), Rat(1, 8), pow2(-16)}) {
        if (p.beta == Rat(-9, 10) && e2 == 30)
          continue;
        Rat ms = pow2(e2);
        auto ig = realize_ising(p, ms, eps);
        std::string tag = fmt(pt(p), " M*=2^", e2, " eps=", eps);
        const auto &P = ig.pair.m;
        Rat N = P[0][1];
        o.check(P[1][0] == N && sgn(N) > 0, tag + ": off-diagonal entries");
        Rat M0 = P[0][0] / N, M1 = P[1][1] / N;
        o.check(M0 > ms && M1 > ms, tag + ": M0, M1 > M*");
        Rat q = M1 / M0;
        o.check(q > 1 && below_exp(q, eps), tag + ": M1/M0 in (1, e^eps)");
        ++certs;
        biggest = std::max(biggest, ig.graph.n);
        smallest = std::min(smallest, ig.graph.n);
        zero_sum += sgn(p.beta + p.gamma) == 0;
        if (ig.graph.n <= enum_cap_from_env()) {
          o.check(pair_matrix(ig.graph, ig.u, ig.v, p) == ig.pair, tag + ": brute-force pair matrix");
          ++brute;
        } else if (ig.graph.n <= 200000) {
          o.check(pair_matrix_elim(ig.graph, ig.u, ig.v, p) == ig.pair, tag + ": eliminated pair matrix");
          ++elim;
        }
      }
  o.note(fmt("gadgets have ", smallest, " to ", biggest, " vertices; those above the enumeration cap are checked by variable elimination"));
  o.note(fmt(certs, " certificates (", zero_sum, " at beta+gamma = 0); brute-force matches ", brute,
             ", elimination matches ", elim));
  return o;
}

// ------------------------------------------------------------------ 6

Outcome end_to_end_reduction() {
  Outcome o;
  SpinParams p{Rat(1, 2), Rat(-1)};
  std::vector<std::pair<std::string, CutInstance>> inst{
      {"path2", {builtin("path", 2), 0, 2}},
      {"path3", {builtin("path", 3), 0, 3}},
      {"parallel3", {Multigraph(2, {{0, 1}, {0, 1}, {0, 1}}), 0, 1}},
      {"cycle4", {builtin("cycle", 4), 0, 2}},
      {"theta", {Multigraph(5, {{0, 2}, {2, 1}, {0, 3}, {3, 1}, {0, 4}, {4, 1}}), 0, 1}},
  };
  {
    std::mt19937_64 rng(606);
    while (true) {
      auto g = random_multigraph(rng, 6, 8, false);
      if (g.n >= 4 && g.edge_count() == 5 && connected(g)) {
        inst.push_back({"random", {g, 0, g.n - 1}});
        break;
      }
    }
  }
  int literal_ok = 0, corrected_ok = 0;
  std::string literal_miss;
  for (auto &[name, in] : inst) {
    auto bf = mincut_bruteforce(in);
    int m = int(in.g.edge_count());
    ReductionOptions lit;
    lit.literal = true;
    auto rl = reduction_count_mincuts(p, in, lit);
    bool lok = rl.k == bf.k && rl.C == bf.C;
    literal_ok += lok;
    if (!lok)
      literal_miss += fmt(" ", name, "(got k=", rl.k, " C=", rl.C, ", want k=", bf.k, " C=", bf.C, ")");
    o.check(lok, fmt(name, " (m=", m, ") with eps = 2^-4m"));
    auto rc = reduction_count_mincuts(p, in);
    bool cok = rc.k == bf.k && rc.C == bf.C;
    corrected_ok += cok;
    o.note(fmt(name, ": m=", m, " brute force (k,C)=(", bf.k, ",", bf.C, "); eps=2^-4m gives (", rl.k, ",", rl.C,
               "); tightened accuracy gives (", rc.k, ",", rc.C, ") with ", rc.oracle_queries, " oracle calls"));
  }
  o.note(fmt("eps = 2^-4m: ", literal_ok, "/", inst.size(), " correct;", literal_miss));
  o.note(fmt("tightened Ising accuracy (40 m eps M1^m <= 2^-m, widened sandwich): ", corrected_ok, "/", inst.size(),
             " correct"));
  o.note("at eps = 2^-4m the cross terms of T exceed the L/U sandwich, so this criterion cannot hold as stated");
  return o;
}

// ------------------------------------------------------------------ 7

Outcome fptas_decay() {
  Outcome o;
  std::vector<std::pair<std::string, Multigraph>> gs;
  for (int n : {4, 6, 8, 10, 12})
    gs.push_back({fmt("cycle", n), builtin("cycle", n)});
  for (int n : {4, 6, 8, 10, 12})
    gs.push_back({fmt("clique", n), builtin("clique", n)});
  double worst_ratio = 0;
  Rat worst_err(0);
  for (SpinParams p : {SpinParams{Rat(5), Rat(-1)}, SpinParams{Rat(-5), Rat(1)}}) {
    Rat r = *pairwise_radius(p);
    double bound = 1 / to_double(r) + 0.05;
    for (auto &[name, g] : gs) {
      auto L = log_taylor(z_polynomial(g, fptas_orientation(p)), 90);
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int n = 0;
      for (int m = 2; m <= 20; ++m) {
        Rat tail(0);
        for (int k = m + 1; k <= 90; ++k)
          tail += L.t[k - 1];
        if (sgn(tail) == 0)
          continue;
        double y = approx_ln(rabs(tail));
        sx += m;
        sy += y;
        sxx += double(m) * m;
        sxy += m * y;
        ++n;
      }
      double ratio = std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
      worst_ratio = std::max(worst_ratio, ratio);
      o.check(ratio <= bound, fmt(name, " at ", pt(p), ": decay ratio ", ratio, " > ", bound));
      Rat eps(1, 1000000);
      auto res = fptas_eval(g, p, eps);
      Rat Z = partition_fn(g, p);
      Rat err = rabs(res.estimate / Z - 1);
      if (err > worst_err)
        worst_err = err;
      o.check(err <= eps, fmt(name, " at ", pt(p), ": relative error ", to_double(err)));
      o.check(res.lo <= res.estimate && res.estimate <= res.hi, fmt(name, ": estimate outside its enclosure"));
    }
    o.note(fmt(pt(p), ": r = ", to_double(r), ", allowed ratio ", bound));
  }
  o.note(fmt("worst measured decay ratio ", worst_ratio, "; worst relative error ", to_double(worst_err)));
  return o;
}

// ------------------------------------------------------------------ 8

Outcome disk_optimality() {
  Outcome o;
  SpinParams p{Rat(2), Rat(-1)};
  std::mt19937_64 rng(808);
  long evals = 0;
  Rat min_norm(-1);
  const long grid = 1024;
  for (int gi = 0; gi < 300; ++gi) {
    auto g = random_multigraph(rng, 9, 14, false);
    auto Zp = z_polynomial(g, p);
    for (int k = 0; k < 200; ++k) {
      CRat x;
      if (k < 20) {
        // real points close to -1/2, where the extremal roots sit
        x = CRat(Rat(-(grid / 2) + 1 + long(rng() % 8), grid), Rat(0));
      } else {
        while (true) {
          Rat re(long(rng() % grid) - grid / 2, grid), im(long(rng() % grid) - grid / 2, grid);
          re.canonicalize();
          im.canonicalize();
          if (re * re + im * im < Rat(1, 4)) {
            x = CRat(re, im);
            break;
          }
        }
      }
      CRat Z = Zp.eval(x);
      ++evals;
      o.check(!Z.is_zero(), fmt("root of Z_G inside |x| < 1/2 on graph ", gi));
      Rat n2 = Z.norm2() / rpow(Rat(2), 2 * g.n);
      if (min_norm < 0 || n2 < min_norm)
        min_norm = n2;
    }
  }
  o.note(fmt(evals, " exact complex evaluations, all nonzero"));
  Rat w(1, 1000000);
  for (Rat rp : {Rat(51, 100), Rat(11, 20), Rat(3, 5)}) {
    auto s = star_root_witness(p, rp, w);
    bool ok = s.hi - s.lo <= w && s.lo > -rp && s.hi < Rat(-1, 2) && sgn(star_poly(p, s.n, s.lo)) < 0 &&
              sgn(star_poly(p, s.n, s.hi)) > 0;
    if (s.n <= 18) {
      auto g = builtin("star", int(s.n));
      ok = ok && sgn(partition_fn(g, p, std::vector<Rat>(g.n, s.lo))) < 0 &&
           sgn(partition_fn(g, p, std::vector<Rat>(g.n, s.hi))) > 0;
    }
    o.check(ok, fmt("star witness for r' = ", rp));
    o.note(fmt("r' = ", rp, ": star with n = ", s.n, " leaves, root in [", to_double(s.lo), ", ", to_double(s.hi),
               "], width ", to_double(s.hi - s.lo)));
  }
  return o;
}

// ------------------------------------------------------------------ 9

Outcome holant_identity() {
  Outcome o;
  std::mt19937_64 rng(909);
  int pos = 0, neg = 0;
  for (int it = 0; it < 300; ++it) {
    auto g = random_multigraph(rng, 8, 11);
    Rat b = random_rat(rng, 12, 4), gm = random_rat(rng, 12, 4);
    Rat s = b + gm;
    bool want_neg = it % 2;
    if (want_neg ? s > -2 : s < 2) {
      Rat extra = random_in(rng, Rat(0), Rat(3), 12);
      Rat shift = want_neg ? Rat(-2 - s - extra) : Rat(2 - s + extra);
      b += shift;
    }
    SpinParams p{b, gm};
    s = b + gm;
    (s >= 2 ? pos : neg)++;
    auto I = subgraphs_world(g, p);
    Rat H = holant_exact(I);
    Rat W = world_value(I, H);
    Rat Z = testutil::naive_z(g, p);
    o.check(W == Z, fmt("fixture ", it, " at ", pt(p)));
    Rat direct = pow2(g.n) * H;
    if (I.global_sign_exponent % 2)
      direct = -direct;
    o.check(direct == Z, fmt("fixture ", it, ": 2^|V| (-1)^sign holant"));
  }
  o.note(fmt("300 fixtures with self-loops and parallel edges: ", pos, " with beta+gamma >= 2, ", neg,
             " with beta+gamma <= -2"));
  return o;
}

// ------------------------------------------------------------------ 10

Outcome windability_terraced() {
  Outcome o;
  std::mt19937_64 rng(1010);
  int zeros = 0;
  for (int t = 0; t < 100; ++t) {
    Table F{2, {}};
    for (int i = 0; i < 4; ++i) {
      Rat r = rabs(random_rat(rng, 6, 4));
      if (rng() % 5 == 0)
        r = 0;
      zeros += sgn(r) == 0;
      F.v.push_back(r);
    }
    auto cert = windable_check(F);
    o.check(cert.has_value(), fmt("table ", t, " has no certificate"));
    if (cert)
      o.check(windcert_violation(F, *cert).empty(), fmt("table ", t, " certificate: ", windcert_violation(F, *cert)));
  }
  auto E3 = even_table(3);
  auto c3 = windable_check(E3);
  o.check(c3 && windcert_violation(E3, *c3).empty(), "Even_3 certificate");
  int grid_pts = 0, boundary = 0, outside_fail = 0, outside = 0;
  for (int i = -32; i <= 32; ++i)
    for (int j = -32; j <= 32; ++j) {
      SpinParams p{Rat(i, 4), Rat(j, 4)};
      Rat s = p.beta + p.gamma;
      auto h = fourier_hat(interaction(p));
      if (p.beta > p.gamma && s >= 2) {
        ++grid_pts;
        boundary += s == 2;
        o.check(strictly_terraced_check(table_of(h)), "psi_hat terraced at " + pt(p));
      } else if (p.beta < p.gamma && s <= -2) {
        ++grid_pts;
        boundary += s == -2;
        o.check(strictly_terraced_check(table_of(negated(h))), "-psi_hat terraced at " + pt(p));
      } else if (std::abs(to_double(s)) < 2) {
        ++outside;
        auto t = table_of(h), tn = table_of(negated(h));
        bool any_neg = false, any_neg_n = false;
        for (int k = 0; k < 4; ++k) {
          any_neg |= sgn(t.v[k]) < 0;
          any_neg_n |= sgn(tn.v[k]) < 0;
        }
        outside_fail += any_neg && any_neg_n;
      }
    }
  o.check(!strictly_terraced_check(Table{2, {Rat(1), Rat(2), Rat(0), Rat(3)}}), "control table [[1,0],[2,3]]");
  o.note(fmt("100 random tables (", zeros, " zero entries) and Even_3 certified; ", grid_pts, " grid points (",
             boundary, " on beta+gamma = +-2) terraced"));
  o.note(fmt("control: ", outside_fail, "/", outside, " grid points with |beta+gamma| < 2 have a negative entry in both psi_hat and -psi_hat"));
  return o;
}

// ------------------------------------------------------------------ 11

// P(X <= k) for X ~ Bin(n, q)
double binom_cdf(int k, int n, double q) {
  double s = 0;
  for (int i = 0; i <= k; ++i)
    s += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(q) +
                  (n - i) * std::log1p(-q));
  return s;
}

Outcome fpras_contract() {
  Outcome o;
  // exact detailed balance on enumerable state spaces
  std::vector<std::pair<Multigraph, SpinParams>> small{
      {Multigraph(2, {{0, 1}}), {Rat(3), Rat(-1)}},
      {Multigraph(3, {{0, 1}, {1, 2}}), {Rat(5, 2), Rat(-1, 2)}},
      {Multigraph(2, {{0, 1}, {0, 1}}), {Rat(4), Rat(1)}},
      {Multigraph(3, {{0, 1}, {1, 2}, {0, 2}}), {Rat(-3), Rat(-1)}},
      {Multigraph(3, {{0, 1}, {1, 2}, {0, 2}}), {Rat(7, 2), Rat(-1)}},
  };
  long balance_pairs = 0;
  std::size_t max_states = 0;
  for (auto &[g, p] : small) {
    auto I = subgraphs_world(g, fpras_orientation(p));
    auto y0 = support_point(I);
    if (!y0) {
      o.check(false, "no support point");
      continue;
    }
    WormChain ch(I, Rat(1, 4));
    auto S = worm_reachable(ch, ch.make_state(*y0));
    if (!S) {
      o.check(false, "state space too large");
      continue;
    }
    max_states = std::max(max_states, S->size());
    std::map<std::vector<int>, int> idx;
    for (std::size_t i = 0; i < S->size(); ++i)
      idx[(*S)[i].y] = int(i);
    std::size_t n = S->size();
    std::vector<std::vector<Rat>> P(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) {
      Rat row(0);
      for (auto &[t, pr] : ch.transitions((*S)[i])) {
        P[i][idx.at(t.y)] += pr;
        row += pr;
      }
      o.check(row == 1, "transition row sums to 1");
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        o.check(ch.weight((*S)[i]) * P[i][j] == ch.weight((*S)[j]) * P[j][i], "detailed balance");
        ++balance_pairs;
      }
  }
  o.note(fmt("detailed balance exact on ", small.size(), " chains (", balance_pairs, " state pairs, up to ",
             max_states, " states)"));

  std::vector<std::pair<Multigraph, SpinParams>> fx{
      {builtin("path", 3), {Rat(3), Rat(-1)}},
      {builtin("cycle", 3), {Rat(4), Rat(-1)}},
      {builtin("cycle", 4), {Rat(5, 2), Rat(-1, 2)}},
      {builtin("star", 4), {Rat(3), Rat(1)}},
      {Multigraph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}}), {Rat(4), Rat(-1)}},
      {Multigraph(3, {{0, 1}, {0, 1}, {1, 2}, {1, 2}}), {Rat(3), Rat(-1, 2)}},
      {builtin("clique", 4), {Rat(-1), Rat(3)}},
      {Multigraph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}}), {Rat(5), Rat(-2)}},
      {Multigraph(8, {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {1, 2}}), {Rat(7, 2), Rat(-1)}},
      {Multigraph(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 2}}), {Rat(3), Rat(-1)}},
  };
  const int runs = 200;
  Rat eps(1, 10), delta(1, 20);
  // smallest count that a one-sided 1% binomial test accepts at coverage 0.9
  int k_crit = 0;
  while (binom_cdf(k_crit, runs, 0.9) <= 0.01)
    ++k_crit;
  int worst = runs;
  for (std::size_t f = 0; f < fx.size(); ++f) {
    auto &[g, p] = fx[f];
    Rat Z = partition_fn(g, p);
    int hit = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (int s = 0; s < runs; ++s) {
      auto r = fpras_estimate(g, p, eps, delta, 1000 * (f + 1) + s);
      Rat q = r.estimate / Z;
      hit += q >= 1 - eps && q <= 1 + eps;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    worst = std::min(worst, hit);
    o.check(hit >= k_crit, fmt("fixture ", f, " coverage ", hit, "/", runs));
    o.note(fmt("fixture ", f, ": n=", g.n, " m=", g.edge_count(), " at ", pt(p), " coverage ", hit, "/", runs, " (",
               secs, " s)"));
  }
  o.note(fmt("binomial test at 1% rejects coverage 0.9 below ", k_crit, "/", runs, "; worst fixture ", worst, "/",
             runs));
  return o;
}

// ------------------------------------------------------------------ 12

// the five disk requirements, written out from the induction cases
bool disk_requirements(const SpinParams &p, const Rat &a, const Rat &b) {
  const Rat &B = p.beta, &G = p.gamma;
  auto f = [&](const Rat &r) { return Rat((1 + G * r) / (B + r)); };
  bool r0 = a > -1 && a < 0 && b > 0;
  bool r1 = a * B <= G; // beta > 0
  bool r2 = b * (B * B + G) > B + G * G;
  bool r3 = -a < b && b <= 1;
  bool r4 = a < f(b) && f(a) < b;
  Rat x = a + G * b, y = b + G * a;
  Rat lhs = std::max(Rat(abs(x)), Rat(abs(y)));
  bool r5 = lhs < -a * (B + a);
  return r0 && r1 && r2 && r3 && r4 && r5;
}

Outcome uncentered() {
  Outcome o;
  o.check(g_threshold(Rat(2)) == Rat(1, 10), "g(2) = 1/10");
  // closed forms at beta = 2: (b-2)/(b^2-1) = 0 and (b-1)^2/(b^3+b^2-b) = 1/10
  o.check(g_first(Rat(2)) == 0 && g_second(Rat(2)) == Rat(1, 10), "closed-form branches at 2");
  o.check(g_threshold(Rat(3)) == Rat(1, 8), "g(3) = max(1/8, 4/33) = 1/8");
  o.check(g_threshold(Rat(5)) == std::max(Rat(Rat(3) / 24), Rat(Rat(16) / 145)), "g(5)");
  std::mt19937_64 rng(1212);
  int done = 0, le = 0, swapped = 0;
  while (done < 100) {
    Rat hi = 1 + random_in(rng, Rat(1, 32), Rat(6), 384);
    Rat lo = 2 - g_threshold(hi) - hi + random_in(rng, Rat(1, 1024), Rat(3, 2), 1536);
    if (sgn(lo) >= 0)
      continue;
    bool swap = rng() % 4 == 0;
    SpinParams p = swap ? SpinParams{lo, hi} : SpinParams{hi, lo};
    auto c = uncentered_constants(p);
    SpinParams q = c.swapped ? p.swapped() : p;
    o.check(c.swapped == swap, "orientation flag at " + pt(p));
    o.check(disk_requirements(q, c.a, c.b), "requirements at " + pt(p));
    le += q.gamma <= -1;
    swapped += c.swapped;
    ++done;
  }
  o.note(fmt("100 points (", le, " with the negative parameter <= -1, ", swapped,
             " given in swapped order) re-verified exactly"));
  return o;
}

} // namespace

int main(int argc, char **argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i)
    only.insert(std::atoi(argv[i]));
  std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
      {"oracle consistency on 500 random multigraphs", oracle_consistency},
      {"positivity and ratio bounds for beta+gamma >= 1", positivity},
      {"bounded sign-hardness witnesses (<= 5 vertices, <= 6 edges)", sign_witnesses},
      {"log-window gadget contract at (1/2,-1)", realize_exp_contract},
      {"Ising gadget certificates", ising_contract},
      {"end-to-end min-cut count with eps = 2^-4m", end_to_end_reduction},
      {"FPTAS error decay and eps = 1e-6", fptas_decay},
      {"zero-free disk optimality at (2,-1)", disk_optimality},
      {"subgraphs-world identity", holant_identity},
      {"windability and terraced tables", windability_terraced},
      {"FPRAS coverage and detailed balance", fpras_contract},
      {"uncentered disk constants", uncentered},
  };
  int failed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(int(i) + 1))
      continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o.pass = false;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  criterion %zu: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs);
    for (auto &n : o.notes)
      std::printf("      %s\n", n.c_str());
    std::fflush(stdout);
    failed += !o.pass;
    ++ran;
  }
  std::printf("%d/%d criteria pass\n", ran - failed, ran);
  return failed ? 1 : 0;
}
