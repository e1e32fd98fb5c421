#pragma once

// Ratio realization: gadgets are rooted graphs carrying their exact
// activity vector.  Products glue roots, extension hangs the gadget
// below a fresh root through one edge.

#include "exact.hpp"
#include "expbounds.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace spin2 {

inline bool in_gamma_region(const SpinParams &p) {
  const Rat &b = p.beta, &g = p.gamma;
  Rat s = b + g;
  return b > g && s > -2 && s < 1 && sgn(g) < 0 && !(b == 1 && g == -1);
}

inline void require_gamma_region(const SpinParams &p) {
  if (!in_gamma_region(p))
    throw RegionError("parameters outside the sign-hard region");
}

inline Rat mobius_f(const SpinParams &p, const Rat &r) {
  Rat den = p.beta + r;
  if (sgn(den) == 0)
    throw PoleError("mobius map pole at r = -beta");
  return (1 + p.gamma * r) / den;
}

inline Rat mobius_inv(const SpinParams &p, const Rat &y) {
  Rat den = y - p.gamma;
  if (sgn(den) == 0)
    throw PoleError("inverse mobius map pole at y = gamma");
  return (1 - p.beta * y) / den;
}

// f'(x)
inline Rat mobius_deriv(const SpinParams &p, const Rat &x) {
  Rat s = p.beta + x;
  if (sgn(s) == 0)
    throw PoleError("mobius map pole at r = -beta");
  return (p.beta * p.gamma - 1) / (s * s);
}

// natural log of |x| in double precision, safe for huge numerators
inline double approx_ln(const Rat &x) {
  long e1 = 0, e2 = 0;
  double m1 = mpz_get_d_2exp(&e1, x.get_num_mpz_t());
  double m2 = mpz_get_d_2exp(&e2, x.get_den_mpz_t());
  return std::log(std::fabs(m1 / m2)) + double(e1 - e2) * std::log(2.0);
}

struct RatioGadget {
  Multigraph graph;
  int root = 0;
  RealActivity act{Rat(1), Rat(1)};

  Rat ratio() const { return act.ratio(); }
  int vertices() const { return graph.n; }
};

inline RatioGadget trivial_gadget() { return {Multigraph(1), 0, {Rat(1), Rat(1)}}; }

inline RatioGadget gadget_from_graph(const Multigraph &g, int root, const SpinParams &p,
                                     const ExactOptions &opt = {}) {
  auto a = activity_vector(g, root, p, opt);
  if (sgn(a.z0) == 0)
    throw UndefinedRatioError("gadget has [Z]_0 = 0");
  return {g, root, a};
}

inline RatioGadget gadget_product(const RatioGadget &a, const RatioGadget &b) {
  auto [g, v] = wedge_sum(a.graph, a.root, b.graph, b.root);
  return {std::move(g), v, {a.act.z0 * b.act.z0, a.act.z1 * b.act.z1}};
}

inline RatioGadget gadget_extend(const RatioGadget &a, const SpinParams &p) {
  Rat z0 = p.beta * a.act.z0 + a.act.z1;
  if (sgn(z0) == 0)
    throw PoleError("extending a gadget whose ratio is -beta");
  auto [g, u] = attach_edge(a.graph, a.root);
  return {std::move(g), u, {z0, a.act.z0 + p.gamma * a.act.z1}};
}

inline RatioGadget gadget_power(const RatioGadget &a, unsigned long k) {
  RatioGadget out = trivial_gadget(), base = a;
  while (k) {
    if (k & 1)
      out = gadget_product(out, base);
    k >>= 1;
    if (k)
      base = gadget_product(base, base);
  }
  return out;
}

inline nlohmann::json gadget_to_json(const RatioGadget &g) {
  return {{"graph", to_json(g.graph)},
          {"root", g.root},
          {"activity", {{"z0", str(g.act.z0)}, {"z1", str(g.act.z1)}}},
          {"ratio", str(g.ratio())}};
}

inline RatioGadget gadget_from_json(const nlohmann::json &j) {
  RatioGadget g;
  g.graph = graph_from_json(j.at("graph"));
  g.root = j.at("root").get<int>();
  g.graph.check_vertex(g.root);
  g.act = {parse_rat(j.at("activity").at("z0").get<std::string>()),
           parse_rat(j.at("activity").at("z1").get<std::string>())};
  return g;
}

// B_n = act_n, B_k = act_k o (M B_{k+1}); chain[0] sits at the returned root
inline RealActivity exact_activity_of_backbone(const std::vector<RatioGadget> &chain, const SpinParams &p) {
  if (chain.empty())
    throw PreconditionError("empty gadget chain");
  RealActivity B = chain.back().act;
  for (std::size_t k = chain.size() - 1; k-- > 0;) {
    Rat m0 = p.beta * B.z0 + B.z1, m1 = B.z0 + p.gamma * B.z1;
    B = {chain[k].act.z0 * m0, chain[k].act.z1 * m1};
  }
  return B;
}

inline RatioGadget assemble_backbone(const std::vector<RatioGadget> &chain, const SpinParams &p) {
  if (chain.empty())
    throw PreconditionError("empty gadget chain");
  // path v_0 .. v_n first, then each G_k glued at v_k
  int n = int(chain.size());
  Multigraph g(n);
  for (int k = 0; k + 1 < n; ++k)
    g.add_edge(k, k + 1);
  for (int k = 0; k < n; ++k)
    glue_into(g, k, chain[k].graph, chain[k].root);
  return {std::move(g), 0, exact_activity_of_backbone(chain, p)};
}

// ratio > 1
inline RatioGadget base_gadget_gt1(const SpinParams &p) {
  require_gamma_region(p);
  const Rat &b = p.beta, &g = p.gamma;
  RatioGadget out;
  if (sgn(b) == 0) {
    // ratio gamma at vertex 0, then 1/gamma + gamma after extension, squared
    auto base = gadget_from_graph(Multigraph(2, {{0, 1}, {1, 1}}), 0, p);
    auto e = gadget_extend(base, p);
    out = gadget_product(e, e);
  } else if (sgn(b + g) < 0) {
    out = gadget_from_graph(Multigraph(1, {{0, 0}, {0, 0}}), 0, p);
  } else if (g != -b * b) {
    out = gadget_from_graph(Multigraph(3, {{0, 1}, {0, 2}, {1, 1}, {2, 2}}), 0, p);
  } else {
    auto base = gadget_from_graph(Multigraph(3, {{0, 1}, {1, 2}, {2, 2}}), 0, p);
    out = gadget_extend(base, p);
  }
  ensure(out.ratio() > 1, "base gadget ratio not above 1");
  return out;
}

// ratio in (-1, 0)
inline RatioGadget base_gadget_neg(const SpinParams &p) {
  require_gamma_region(p);
  RatioGadget out;
  if (p.gamma < -1) {
    out = gadget_from_graph(Multigraph(2, {{0, 1}}), 0, p);
  } else {
    auto r0 = base_gadget_gt1(p);
    Rat thr = -1 / p.gamma, x = r0.ratio();
    unsigned long j = 1;
    for (Rat y = x; !(y > thr); y *= x)
      ++j;
    out = gadget_extend(gadget_power(r0, j), p);
  }
  Rat r = out.ratio();
  ensure(r > -1 && sgn(r) < 0, "negative base gadget out of (-1,0)");
  return out;
}

struct DenseOptions {
  // try cheap products of small gadgets before the general construction
  bool shortcut = false;
  long shortcut_limit = 4096;
  int atom_vertices = 6;
};

namespace detail {

// small positive-ratio gadgets reachable from g0, gn by extension and products
inline std::vector<RatioGadget> small_atoms(const SpinParams &p, const RatioGadget &g0, const RatioGadget &gn,
                                            int max_vertices) {
  std::vector<RatioGadget> pool{g0, gn};
  for (std::size_t round = 0; round < 3; ++round) {
    std::vector<RatioGadget> add;
    for (auto &a : pool) {
      try {
        add.push_back(gadget_extend(a, p));
      } catch (const PoleError &) {
      }
      for (auto &b : pool)
        add.push_back(gadget_product(a, b));
    }
    for (auto &g : add) {
      if (g.vertices() > max_vertices || sgn(g.act.z0) == 0 || sgn(g.act.z1) == 0)
        continue;
      Rat r = g.ratio();
      bool dup = false;
      for (auto &q : pool)
        if (q.ratio() == r && q.vertices() <= g.vertices()) {
          dup = true;
          break;
        }
      if (!dup && pool.size() < 400)
        pool.push_back(g);
    }
  }
  std::vector<RatioGadget> out;
  for (auto &g : pool)
    if (sgn(g.ratio()) > 0 && g.ratio() != 1)
      out.push_back(g);
  return out;
}

// cheapest A^i B^j inside the window over pairs of atoms with ln A > 0 > ln B
inline std::optional<RatioGadget> semigroup_search(const std::vector<RatioGadget> &atoms, const Rat &R,
                                                   const Rat &eps, long limit) {
  double lr = approx_ln(R), e = to_double(eps);
  long best_size = std::numeric_limits<long>::max();
  std::optional<RatioGadget> best;
  for (auto &A : atoms) {
    double la = approx_ln(A.ratio());
    if (la <= 0)
      continue;
    long sa = A.vertices() - 1;
    for (auto &B : atoms) {
      double lb = approx_ln(B.ratio());
      if (lb >= 0)
        continue;
      long sb = B.vertices() - 1;
      for (long j = 0; j <= limit && j * sb < best_size; ++j) {
        long ic = std::lround((lr - j * lb) / la);
        for (long i = std::max(0L, ic - 1); i <= ic + 1; ++i) {
          long size = i * sa + j * sb;
          if (size >= best_size || std::fabs(i * la + j * lb - lr) > e * 1.01 + 1e-12)
            continue;
          Rat rho = rpow(A.ratio(), i) * rpow(B.ratio(), j);
          if (in_log_window(rho, R, eps)) {
            best_size = size;
            best = gadget_product(gadget_power(A, i), gadget_power(B, j));
          }
        }
      }
    }
  }
  return best;
}

} // namespace detail

// ratio strictly inside (e^-eps R, e^eps R)
inline RatioGadget realize_dense(const SpinParams &p, const Rat &R, const Rat &eps, const DenseOptions &opt = {}) {
  require_gamma_region(p);
  if (sgn(R) == 0)
    throw PreconditionError("target ratio must be nonzero");
  if (sgn(eps) <= 0)
    throw PreconditionError("eps must be positive");
  if (sgn(R) < 0) {
    auto neg = base_gadget_neg(p);
    auto inner = realize_dense(p, R / neg.ratio(), eps, opt);
    auto out = gadget_product(inner, neg);
    ensure(in_log_window(out.ratio(), R, eps), "dense realization missed its window");
    return out;
  }
  auto g0 = base_gadget_gt1(p);
  auto gn = base_gadget_neg(p);
  if (opt.shortcut)
    if (auto hit = detail::semigroup_search(
            detail::small_atoms(p, g0, gn, std::max(opt.atom_vertices, 2 * std::max(g0.vertices(), gn.vertices()) + 2)),
            R, eps, opt.shortcut_limit))
      return *hit;

  Rat r0 = g0.ratio();
  // r1 = f(r0^k) in (gamma, e^-eps gamma)
  unsigned long k = 1;
  Rat pk = r0;
  Rat thr = std::max(Rat(-p.beta), Rat(-1 / p.gamma));
  while (!(pk > thr) || !lt_exp(p.gamma / mobius_f(p, pk), eps)) {
    pk *= r0;
    ++k;
  }
  auto g1 = gadget_extend(gadget_power(g0, k), p);
  auto g2 = gadget_extend(gadget_power(g0, k + 1), p);
  Rat r1 = g1.ratio(), r2 = g2.ratio();
  ensure(p.gamma < r2 && r2 < r1 && sgn(r1) < 0, "dense: r2, r1 out of order");
  Rat rn = gn.ratio();
  unsigned long j = 0;
  Rat rr = rn;
  while (!(rabs(rr * r1) > 1)) {
    rr *= r0;
    ++j;
  }
  auto gr = gadget_product(gn, gadget_power(g0, j));
  auto G1 = gadget_product(g1, gr), G2 = gadget_product(g2, gr), G3 = gadget_product(gn, gn);
  Rat R1 = G1.ratio(), R2 = G2.ratio(), R3 = G3.ratio();
  ensure(R1 > 1 && R2 > R1 && sgn(R3) > 0 && R3 < 1, "dense: generator ratios out of range");

  double L1 = approx_ln(R1), L2 = approx_ln(R2), L3 = -approx_ln(R3), lr = approx_ln(R), e = to_double(eps);
  double need = ((L1 * L2 + e * (L1 + L2)) / (L2 - L1) - lr) / L3;
  long m = std::max(1L, long(std::ceil(need)));
  while (true) {
    // R3^m R1 < e^-eps R
    Rat R3m = rpow(R3, m);
    if (!lt_exp(R / (R3m * R1), eps)) {
      long n = long(std::floor((lr - e + m * L3) / L1));
      for (long nn = std::max(1L, n - 1); nn <= n + 1; ++nn) {
        Rat lo = R3m * rpow(R1, nn), hi = R3m * rpow(R2, nn);
        if (lt_exp(R / lo, eps) || !gt_exp(hi / R, eps))
          continue;
        // walk the progression lo .. hi
        double step = L2 - L1;
        long ic = std::lround((lr + m * L3 - nn * L1) / step);
        ic = std::clamp(ic, 0L, nn);
        std::vector<long> order;
        for (long d = 0; d <= 3; ++d) {
          if (ic - d >= 0)
            order.push_back(ic - d);
          if (d && ic + d <= nn)
            order.push_back(ic + d);
        }
        for (long i = 0; i <= nn; ++i)
          order.push_back(i);
        for (long i : order) {
          Rat t = R3m * rpow(R1, nn - i) * rpow(R2, i);
          if (in_log_window(t, R, eps)) {
            auto out = gadget_product(gadget_power(G3, m),
                                      gadget_product(gadget_power(G1, nn - i), gadget_power(G2, i)));
            ensure(out.ratio() == t, "dense: gadget ratio differs from the progression term");
            return out;
          }
        }
        throw InvariantError("dense: progression skipped the window");
      }
    }
    ++m;
  }
}

struct LandmarkSet {
  Rat a, b, c, d;
  RatioGadget h1, h2;
};

inline bool landmarks_valid(const SpinParams &p, const Rat &a, const Rat &b, const Rat &c, const Rat &d) {
  if (!(p.gamma < a && a < b && sgn(b) < 0 && rabs(p.beta) < c && c < d))
    return false;
  return b == mobius_f(p, c) && a == mobius_f(p, d) && b / (2 * d) < mobius_deriv(p, c);
}

inline LandmarkSet landmarks(const SpinParams &p) {
  require_gamma_region(p);
  Rat start = std::max(rabs(p.beta), Rat(-1 / p.gamma));
  Rat c = Rat(floor_of(start) + 1);
  while (true) {
    Rat d = 2 * c;
    Rat b = mobius_f(p, c), a = mobius_f(p, d);
    if (landmarks_valid(p, a, b, c, d)) {
      LandmarkSet L{a, b, c, d, {}, {}};
      DenseOptions opt;
      opt.shortcut = true;
      // h1 in (sqrt(b/a), 1)
      Rat q = b / a;
      Rat su = sqrt_bounds(q, 64).second;
      ensure(su < 1, "landmarks: sqrt bound too coarse");
      Rat T = (su + 1) / 2;
      Rat e1 = std::min(Rat(1 - T), Rat(1 - su / T)) / 2;
      L.h1 = realize_dense(p, T, e1, opt);
      Rat h1 = L.h1.ratio();
      ensure(h1 < 1 && h1 * h1 > q, "landmarks: h1 out of range");
      L.h2 = realize_dense(p, Rat(-4), Rat(1, 4), opt);
      ensure(L.h2.ratio() < -2, "landmarks: h2 not below -2");
      return L;
    }
    c *= 2;
  }
}

struct ExpTrace {
  RatioGadget gadget;
  std::vector<RatioGadget> chain;
  long iterations = 0;
  std::vector<Rat> R1, R2; // R1[k], R2[k] for k = 0..n
  std::size_t max_bits = 0;
  bool claim1 = true, claim3 = true;
};

namespace detail {

// h2^s h1^t for the given exponents
inline RatioGadget hh(const LandmarkSet &L, unsigned long s, unsigned long t) {
  return gadget_product(gadget_power(L.h2, s), gadget_power(L.h1, t));
}

// smallest t >= 0 with x h^t on the far side of `bound` (0 < h < 1, x > 0
// decreasing towards bound); x is advanced in place.  A float estimate
// skips most of the exact steps.
inline unsigned long shrink_below(Rat &x, const Rat &h, const Rat &bound, bool strict) {
  auto done = [&](const Rat &y) { return strict ? y < bound : !(y > bound); };
  unsigned long t = 0;
  double est = (approx_ln(x) - approx_ln(bound)) / -approx_ln(h);
  if (est > 8) {
    unsigned long jump = (unsigned long)(est * (1 - 1e-9)) - 2;
    Rat y = x * rpow(h, jump);
    if (!done(y)) {
      x = y;
      t = jump;
    }
  }
  while (!done(x)) {
    x *= h;
    ++t;
  }
  return t;
}

} // namespace detail

// sign of (u2/u1)^2 - v2/v1, on integers only
inline int cmp_square_ratio(const Rat &u1, const Rat &u2, const Rat &v1, const Rat &v2) {
  Integer l = u2.get_num() * u1.get_den();
  Integer r = u1.get_num() * u2.get_den();
  l *= l;
  r *= r;
  Integer P = v2.get_num() * v1.get_den(), Q = v1.get_num() * v2.get_den();
  return sgn(Integer(l * Q - r * P)) * sgn(Q);
}

inline ExpTrace realize_exp_traced(const SpinParams &p, const Rat &R, const Rat &eps, const LandmarkSet &L) {
  require_gamma_region(p);
  if (sgn(R) <= 0)
    throw PreconditionError("realize_exp needs R > 0; use realize_signed");
  if (sgn(eps) <= 0)
    throw PreconditionError("eps must be positive");
  const Rat &a = L.a, &b = L.b, &c = L.c, &d = L.d;
  Rat h1 = L.h1.ratio(), h2 = L.h2.ratio();
  Rat h2sq = h2 * h2, h1sq = h1 * h1;
  // loop while (R2/R1)^2 < a/b

  ExpTrace tr;
  Rat R1 = R / (1 + eps), R2 = R * (1 + eps);
  tr.R1.push_back(R1);
  tr.R2.push_back(R2);
  std::vector<RatioGadget> chain;
  while (true) {
    if (!(cmp_square_ratio(R1, R2, b, a) < 0))
      break;
    // x in (-R2/sqrt(ab), R2/a), built as h2^s h1^t with s odd
    Rat hi2 = R2 * R2 / (a * b), lo2 = R2 * R2 / (a * a);
    unsigned long s = 1;
    Rat x = h2, x2 = h2sq;
    while (!(x2 > hi2)) {
      x *= h2sq;
      x2 *= h2sq * h2sq;
      s += 2;
    }
    unsigned long t = detail::shrink_below(x2, h1sq, hi2, true);
    x *= rpow(h1, t);
    ensure(x2 > lo2 && sgn(x) < 0, "compute step missed its interval");
    chain.push_back(detail::hh(L, s, t));
    ensure(chain.back().ratio() == x, "compute gadget ratio mismatch");
    Rat n1 = mobius_inv(p, R1 / x), n2 = mobius_inv(p, R2 / x);
    bool c1 = c < n1 && n1 < n2 && n2 < d;
    bool c3 = cmp_square_ratio(R1, R2, n1, n2) < 0;
    tr.claim1 = tr.claim1 && c1;
    tr.claim3 = tr.claim3 && c3;
    ensure(c1, "landmark bracket c < R1 < R2 < d violated");
    ensure(c3, "gap failed to square");
    R1 = n1;
    R2 = n2;
    tr.R1.push_back(R1);
    tr.R2.push_back(R2);
    tr.max_bits = std::max({tr.max_bits, bits(R1), bits(R2), bits(x)});
    ++tr.iterations;
  }
  // final x in (R1, R2): s even, h2^s > R2, then shrink by h1
  {
    unsigned long s = 0;
    Rat x(1);
    while (!(x > R2)) {
      x *= h2sq;
      s += 2;
    }
    unsigned long t = detail::shrink_below(x, h1, R2, true);
    ensure(x > R1, "final compute missed its interval");
    chain.push_back(detail::hh(L, s, t));
    ensure(chain.back().ratio() == x, "final gadget ratio mismatch");
  }
  RealActivity B = exact_activity_of_backbone(chain, p);
  tr.gadget = assemble_backbone(chain, p);
  ensure(tr.gadget.act == B, "backbone activity mismatch");
  ensure(in_log_window(B.ratio(), R, eps), "realized ratio outside the window");
  tr.chain = std::move(chain);
  return tr;
}

inline RatioGadget realize_exp(const SpinParams &p, const Rat &R, const Rat &eps, const LandmarkSet &L) {
  return realize_exp_traced(p, R, eps, L).gadget;
}

inline RatioGadget realize_exp(const SpinParams &p, const Rat &R, const Rat &eps) {
  return realize_exp(p, R, eps, landmarks(p));
}

// any nonzero R; negative targets hang a (-1,0) gadget on the root
inline RatioGadget realize_signed(const SpinParams &p, const Rat &R, const Rat &eps, const LandmarkSet &L) {
  if (sgn(R) > 0)
    return realize_exp(p, R, eps, L);
  if (sgn(R) == 0)
    throw PreconditionError("target ratio must be nonzero");
  auto neg = base_gadget_neg(p);
  auto out = gadget_product(realize_exp(p, R / neg.ratio(), eps, L), neg);
  ensure(in_log_window(out.ratio(), R, eps), "signed realization outside the window");
  return out;
}

inline RatioGadget realize_signed(const SpinParams &p, const Rat &R, const Rat &eps) {
  return realize_signed(p, R, eps, landmarks(p));
}

} // namespace spin2
