#pragma once

// Zero-free regions of Z_G(x): radii of the pairwise edge polynomial, the
// disk around 0 for 1 <= beta+gamma <= 2, star-graph roots just outside it,
// exact recursion checks, and the parameter-plane classifier.

#include "exact.hpp"
#include "gadgets.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace spin2 {

// ---------------------------------------------------------------- pairwise

// Orientation in which gamma z1 z2 + z1 + z2 + beta is zero-free on a
// bidisk of radius > 1: (beta - gamma)(beta + gamma) > 0.  Swapping beta
// and gamma leaves Z_G (all fields 1) unchanged.
inline SpinParams fptas_orientation(const SpinParams &p) {
  if (sgn((p.beta - p.gamma) * (p.beta + p.gamma)) < 0)
    return p.swapped();
  return p;
}

inline bool in_fptas_region(const SpinParams &p) {
  return p.beta != p.gamma && rabs(p.beta + p.gamma) > 2;
}

// true iff gamma z1 z2 + z1 + z2 + beta has no zero with |z1|, |z2| < r.
// For beta gamma != 1 the root map z1 -> -(z1+beta)/(gamma z1+1) sends the
// disk to a disk or half-plane symmetric about R, so it suffices that
// (z+beta)^2 >= r^2 (gamma z+1)^2 on [-r, r].  When beta gamma = 1 the
// same quadratic degenerates to (z+beta)^2 (1 - r^2/beta^2).
inline bool pairwise_free_at(const SpinParams &p, const Rat &r) {
  if (sgn(r) <= 0)
    return true;
  Rat r2 = r * r;
  Rat a = 1 - r2 * p.gamma * p.gamma;
  Rat b = 2 * (p.beta - r2 * p.gamma);
  Rat c = p.beta * p.beta - r2;
  auto q = [&](const Rat &z) -> Rat { return (a * z + b) * z + c; };
  if (sgn(q(-r)) < 0 || sgn(q(r)) < 0)
    return false;
  if (sgn(a) > 0) {
    Rat zs = -b / (2 * a);
    if (zs > -r && zs < r && sgn(q(zs)) < 0)
      return false;
  }
  return true;
}

// Largest dyadic r (to 2^-prec) with pairwise_free_at, for the oriented
// parameters.  none outside beta != gamma, |beta+gamma| > 2.
inline std::optional<Rat> pairwise_radius(const SpinParams &p, long prec = 32) {
  if (!in_fptas_region(p))
    return std::nullopt;
  SpinParams q = fptas_orientation(p);
  Rat lo(1), hi = rabs(q.beta);
  ensure(pairwise_free_at(q, lo), "pairwise polynomial vanishes inside the unit bidisk");
  ensure(hi > lo, "oriented beta must exceed 1 in absolute value");
  Rat step = pow2(-prec);
  for (int it = 0; it < 4096 && (hi - lo > step || lo == 1); ++it) {
    Rat mid = (lo + hi) / 2;
    if (pairwise_free_at(q, mid))
      lo = mid;
    else
      hi = mid;
  }
  ensure(lo > 1, "no certified radius above 1");
  return lo;
}

struct SamplerReport {
  int samples = 0;
  int zeros = 0;
  Rat min_norm2; // smallest |Z|^2 seen
};

// Falsification harness: random complex-rational fields with
// |lambda_v| < r^deg(v), checks Z_G(lambda) != 0 exactly.
inline SamplerReport contraction_sampler(const Multigraph &g, const SpinParams &p, const Rat &r, int trials,
                                         std::mt19937_64 &rng, const ExactOptions &opt = {}) {
  auto deg = g.degrees();
  std::vector<Rat> rad(g.n);
  for (int v = 0; v < g.n; ++v)
    rad[v] = rpow(r, deg[v]);
  SamplerReport rep;
  const long grid = 256;
  for (int t = 0; t < trials; ++t) {
    FieldVector lam(g.n);
    for (int v = 0; v < g.n; ++v) {
      Rat bound2 = rad[v] * rad[v];
      while (true) {
        Rat re = rad[v] * Rat(long(rng() % (2 * grid + 1)) - grid, grid);
        Rat im = rad[v] * Rat(long(rng() % (2 * grid + 1)) - grid, grid);
        re.canonicalize();
        im.canonicalize();
        CRat z{re, im};
        if (z.norm2() < bound2) {
          lam[v] = z;
          break;
        }
      }
    }
    CRat Z = partition_fn(g, p, lam, opt);
    Rat n2 = Z.norm2();
    if (rep.samples == 0 || n2 < rep.min_norm2)
      rep.min_norm2 = n2;
    if (Z.is_zero())
      ++rep.zeros;
    ++rep.samples;
  }
  return rep;
}

// ------------------------------------------------------- disk around zero

inline void require_disk_region(const SpinParams &p) {
  Rat s = p.beta + p.gamma;
  if (!(sgn(p.gamma) < 0 && s >= 1 && s <= 2))
    throw RegionError("needs gamma < 0 and 1 <= beta + gamma <= 2");
}

inline Rat disk_radius(const SpinParams &p) {
  require_disk_region(p);
  return (p.beta - 1) / (1 - p.gamma);
}

// Z of the star with n leaves, all fields x
inline Rat star_poly(const SpinParams &p, unsigned long n, const Rat &x) {
  return rpow(p.beta + x, n) + x * rpow(1 + p.gamma * x, n);
}

struct StarRoot {
  unsigned long n = 0;
  Rat lo, hi; // Z(lo) < 0 < Z(hi)
};

// Smallest star with Z(-r') < 0, and a bracketed real root in (-r', -radius).
inline StarRoot star_root_witness(const SpinParams &p, const Rat &r_prime, const Rat &width,
                                  unsigned long max_n = 1UL << 20) {
  Rat rad = disk_radius(p);
  if (!(r_prime > rad && r_prime < p.beta))
    throw PreconditionError("r' must lie strictly between the disk radius and beta");
  if (sgn(width) <= 0)
    throw PreconditionError("bracket width must be positive");
  Rat x = -r_prime;
  Rat a = p.beta + x, b = 1 + p.gamma * x; // a > 0, b/a > 1
  Rat ra = b / a;
  // Z(-r') = a^n (1 - r' (b/a)^n)
  unsigned long n = 1;
  Rat t = ra;
  while (!(r_prime * t > 1)) {
    if (++n > max_n)
      throw SizeCapError("star size cap reached");
    t *= ra;
  }
  StarRoot out;
  out.n = n;
  ensure(sgn(star_poly(p, n, x)) < 0, "star polynomial not negative at -r'");
  ensure(sgn(star_poly(p, n, -rad)) > 0, "star polynomial not positive at the disk boundary");
  Rat lo = x, hi = -rad;
  while (hi - lo > width) {
    Rat mid = (lo + hi) / 2;
    if (sgn(star_poly(p, n, mid)) < 0)
      lo = mid;
    else
      hi = mid;
  }
  out.lo = lo;
  out.hi = hi;
  return out;
}

// ------------------------------------------------------- recursion checks

struct RecursionReport {
  bool ok = true;
  std::string failure;
  CRat Z;
};

// Real fields in [gamma/beta, 1]: every [Z_{G,v}]_0 != 0, every ratio in
// [gamma/beta, 1], Z > 0.
inline RecursionReport interval_recursion_check(const Multigraph &g, const SpinParams &p, const std::vector<Rat> &lam,
                                                const ExactOptions &opt = {}) {
  if (!(sgn(p.gamma) < 0 && p.beta + p.gamma >= 1))
    throw RegionError("needs gamma < 0 and beta + gamma >= 1");
  if (int(lam.size()) != g.n)
    throw PreconditionError("field vector length differs from vertex count");
  Rat lo = p.gamma / p.beta;
  for (auto &x : lam)
    if (x < lo || x > 1)
      throw PreconditionError("field outside [gamma/beta, 1]");
  RecursionReport rep;
  auto fail = [&](std::string why) {
    if (rep.ok) {
      rep.ok = false;
      rep.failure = std::move(why);
    }
  };
  Rat Z = partition_fn(g, p, lam, opt);
  rep.Z = Z;
  if (sgn(Z) <= 0)
    fail("Z <= 0");
  for (int v = 0; v < g.n; ++v) {
    auto a = activity_vector(g, v, p, lam, opt);
    if (sgn(a.z0) == 0) {
      fail("[Z]_0 = 0 at vertex " + std::to_string(v));
      continue;
    }
    Rat R = a.z1 / a.z0;
    if (R < lo || R > 1)
      fail("ratio outside [gamma/beta, 1] at vertex " + std::to_string(v));
  }
  return rep;
}

// Complex fields with |lambda| <= (beta-1)/(1-gamma), lambda != -1: every
// ratio lies in the same punctured disk and Z != 0.
inline RecursionReport disk_recursion_check(const Multigraph &g, const SpinParams &p, const FieldVector &lam,
                                            const ExactOptions &opt = {}) {
  Rat r = disk_radius(p);
  Rat r2 = r * r;
  if (int(lam.size()) != g.n)
    throw PreconditionError("field vector length differs from vertex count");
  for (auto &x : lam)
    if (x.norm2() > r2 || x == CRat(-1))
      throw PreconditionError("field outside the closed disk or equal to -1");
  RecursionReport rep;
  auto fail = [&](std::string why) {
    if (rep.ok) {
      rep.ok = false;
      rep.failure = std::move(why);
    }
  };
  rep.Z = partition_fn(g, p, lam, opt);
  if (rep.Z.is_zero())
    fail("Z = 0");
  for (int v = 0; v < g.n; ++v) {
    auto a = activity_vector(g, v, p, lam, opt);
    if (a.z0.is_zero()) {
      fail("[Z]_0 = 0 at vertex " + std::to_string(v));
      continue;
    }
    CRat R = a.z1 / a.z0;
    if (R.norm2() > r2 || R == CRat(-1))
      fail("ratio outside the disk at vertex " + std::to_string(v));
  }
  return rep;
}

// Both three-term decompositions of the edge recursion, checked as exact
// rational identities at one point.
inline bool identity_check_eq_right_left(const SpinParams &p, const Rat &A, const Rat &B, const Rat &C, const Rat &D) {
  const Rat &b = p.beta, &g = p.gamma;
  Rat den = b * A + B, s = b + g, q = b * b + g * g;
  Rat AB = A + B, bAgB = b * A + g * B, bAgC = b * A + g * C;
  for (const Rat *d : std::initializer_list<const Rat *>{&b, &den, &s, &q, &AB, &A, &bAgB, &bAgC})
    if (sgn(*d) == 0)
      throw PreconditionError("zero denominator in recursion identity");
  Rat R = (C + g * D) / den;
  Rat right_l = 1 - R;
  Rat right_r = AB / den * (1 - (C + D) / AB) + b * A / den * (D / A - g / b) + (s - 1) * A / den * (1 - D / A);
  Rat left_l = R - g / b;
  Rat left_r = (b * b + g * b + g * g) / (s * q) * bAgB / den * ((b * C + g * D) / bAgB - g / b) +
               (-g * b) / (s * q) * bAgC / den * ((b * B + g * D) / bAgC - g / b) +
               (-g * (s - 1)) / s * A / den * (1 - D / A);
  return right_l == right_r && left_l == left_r;
}

// ------------------------------------------------- uncentered disk constants

inline Rat g_first(const Rat &b) { return (b - 2) / (b * b - 1); }
inline Rat g_second(const Rat &b) { return (b - 1) * (b - 1) / (b * b * b + b * b - b); }

inline Rat g_threshold(const Rat &beta) {
  if (!(beta > 1))
    throw PreconditionError("g is defined for beta > 1");
  Rat x = g_first(beta), y = g_second(beta);
  return x > y ? x : y;
}

enum class UncenteredCase { GammaLeMinus1, GammaGtMinus1 };

struct UncenteredConstants {
  Rat a, b;
  UncenteredCase case_tag = UncenteredCase::GammaLeMinus1;
  Rat eps_margin;
  bool swapped = false; // constants belong to (gamma, beta)
};

inline bool in_uncentered_region(const SpinParams &p) {
  Rat hi = p.beta > p.gamma ? p.beta : p.gamma;
  Rat lo = p.beta > p.gamma ? p.gamma : p.beta;
  if (!(sgn(lo) < 0 && hi > 1))
    return false;
  return p.beta + p.gamma > 2 - g_threshold(hi);
}

inline Rat mobius(const SpinParams &p, const Rat &r) { return (1 + p.gamma * r) / (p.beta + r); }

// (gamma < 0 orientation)
inline bool uncentered_requirements(const SpinParams &p, const Rat &a, const Rat &b) {
  const Rat &be = p.beta, &ga = p.gamma;
  if (!(a > -1 && sgn(a) < 0 && sgn(b) > 0))
    return false;
  if (!(a <= ga / be))
    return false;
  if (!(b > (be + ga * ga) / (be * be + ga)))
    return false;
  if (!(-a < b && b <= 1))
    return false;
  if (!(a < mobius(p, b) && mobius(p, a) < b))
    return false;
  Rat l1 = rabs(a + ga * b), l2 = rabs(b + ga * a);
  Rat lhs = l1 > l2 ? l1 : l2;
  return lhs < rabs(a) * (be + a);
}

inline UncenteredConstants uncentered_constants(const SpinParams &p0) {
  if (!in_uncentered_region(p0))
    throw RegionError("needs min(beta,gamma) < 0 and beta + gamma > 2 - g(max(beta,gamma))");
  UncenteredConstants out;
  SpinParams p = p0;
  if (sgn(p.gamma) >= 0) {
    p = p.swapped();
    out.swapped = true;
  }
  Rat a, base;
  if (p.gamma <= -1) {
    out.case_tag = UncenteredCase::GammaLeMinus1;
    a = p.gamma / p.beta;
    Rat fa = mobius(p, a);
    base = fa > -a ? fa : Rat(-a);
  } else {
    out.case_tag = UncenteredCase::GammaGtMinus1;
    a = -1 / p.beta;
    base = mobius(p, a);
  }
  Rat eps(1, 4);
  for (int i = 0; i < 4096; ++i, eps /= 2) {
    Rat b = base + eps;
    if (uncentered_requirements(p, a, b)) {
      out.a = a;
      out.b = b;
      out.eps_margin = eps;
      return out;
    }
  }
  throw InvariantError("no margin satisfies the disk requirements");
}

// -------------------------------------------------------------- classifier

enum class RegionTag {
  ExactPolyTime,
  FerroFPRAS_Known,
  AntiferroClassified_Known,
  FPTAS_ThmFPTAS,
  FPRAS_ThmFPRAS,
  FPTAS_NotThreshold,
  SignSharpPHard,
  PMEquivalentLine,
  PositiveButOpen,
  Open
};

inline const char *tag_name(RegionTag t) {
  switch (t) {
  case RegionTag::ExactPolyTime: return "ExactPolyTime";
  case RegionTag::FerroFPRAS_Known: return "FerroFPRAS_Known";
  case RegionTag::AntiferroClassified_Known: return "AntiferroClassified_Known";
  case RegionTag::FPTAS_ThmFPTAS: return "FPTAS_ThmFPTAS";
  case RegionTag::FPRAS_ThmFPRAS: return "FPRAS_ThmFPRAS";
  case RegionTag::FPTAS_NotThreshold: return "FPTAS_NotThreshold";
  case RegionTag::SignSharpPHard: return "SignSharpPHard";
  case RegionTag::PMEquivalentLine: return "PMEquivalentLine";
  case RegionTag::PositiveButOpen: return "PositiveButOpen";
  case RegionTag::Open: return "Open";
  }
  return "?";
}

struct RegionClass {
  std::vector<RegionTag> tags;
  std::vector<std::string> witnesses;

  bool has(RegionTag t) const {
    for (auto x : tags)
      if (x == t)
        return true;
    return false;
  }
};

inline RegionClass classify(const SpinParams &p) {
  RegionClass out;
  auto add = [&](RegionTag t, const char *w) {
    out.tags.push_back(t);
    out.witnesses.emplace_back(w);
  };
  const Rat &b = p.beta, &g = p.gamma;
  Rat s = b + g;
  Rat lo = b < g ? b : g, hi = b < g ? g : b;

  bool special = (sgn(b) == 0 && sgn(g) == 0) || (b == 1 && g == -1) || (b == -1 && g == 1) || (b == -1 && g == -1);
  if (b * g == 1 || special)
    add(RegionTag::ExactPolyTime, "product-type or affine interaction: exact counting in polynomial time");
  if (sgn(lo) >= 0) {
    if (b * g >= 1)
      add(RegionTag::FerroFPRAS_Known, "ferromagnetic two-spin system: FPRAS known");
    else
      add(RegionTag::AntiferroClassified_Known, "antiferromagnetic two-spin system: classified by uniqueness");
  }
  if (sgn(lo) < 0 && s > -2 && s < 1 && !(b == 1 && g == -1) && !(b == -1 && g == 1))
    add(RegionTag::SignSharpPHard, "sign of Z is #P-hard (Ising-gadget reduction from minimum s-t cuts)");
  if (b != g && rabs(s) > 2)
    add(RegionTag::FPTAS_ThmFPTAS, "pairwise polynomial zero-free beyond the unit bidisk: FPTAS for bounded degree");
  if (b != g && rabs(s) >= 2)
    add(RegionTag::FPRAS_ThmFPRAS, "subgraphs-world Holant with windable strictly terraced tables: FPRAS");
  if (sgn(lo) < 0 && hi > 1 && s > 2 - g_threshold(hi))
    add(RegionTag::FPTAS_NotThreshold, "uncentered disk recursion: FPTAS for bounded degree");
  if (b == g && b < -1)
    add(RegionTag::PMEquivalentLine, "equivalent to approximately counting perfect matchings");
  if (sgn(lo) < 0 && s >= 1 && s < 2 && out.tags.empty())
    add(RegionTag::PositiveButOpen, "Z_G > 0 for every graph; approximation complexity open");
  if (out.tags.empty())
    add(RegionTag::Open, "no applicable result");
  return out;
}

// ------------------------------------------------------ small-graph search

// Exhaustive search over multigraphs on <= max_n vertices with <= max_m
// edges (loops allowed) for one with Z_G < 0, or Z_G <= 0 when
// allow_zero.  Exponent tallies per assignment keep the inner loop integer.
inline std::optional<Multigraph> nonpositive_witness(const SpinParams &p, int max_n, int max_m, bool allow_zero = false) {
  if (max_n < 1 || max_n > 8 || max_m < 0 || max_m > 12)
    throw SizeCapError("search limits out of range");
  auto pb = detail::powers(p.beta, max_m), pg = detail::powers(p.gamma, max_m);
  std::optional<Multigraph> found;
  for (int n = 1; n <= max_n && !found; ++n) {
    std::vector<Edge> pairs;
    for (int u = 0; u < n; ++u)
      for (int v = u; v < n; ++v)
        pairs.push_back({u, v});
    int A = 1 << n;
    std::vector<int> e00(A, 0), e11(A, 0);
    std::vector<int> chosen;
    auto value = [&]() -> Rat {
      Rat z(0);
      for (int s = 0; s < A; ++s)
        z += pb[e00[s]] * pg[e11[s]];
      return z;
    };
    auto rec = [&](auto &&self, std::size_t start, int depth) -> void {
      if (found)
        return;
      if (depth > 0) {
        int sg = sgn(value());
        if (sg < 0 || (allow_zero && sg == 0)) {
          Multigraph g(n);
          for (int i : chosen)
            g.add_edge(pairs[i].first, pairs[i].second);
          found = g;
          return;
        }
      }
      if (depth == max_m)
        return;
      for (std::size_t i = start; i < pairs.size() && !found; ++i) {
        auto [u, v] = pairs[i];
        for (int s = 0; s < A; ++s) {
          int a = s >> u & 1, c = s >> v & 1;
          e00[s] += (a == 0 && c == 0);
          e11[s] += (a == 1 && c == 1);
        }
        chosen.push_back(int(i));
        self(self, i, depth + 1);
        chosen.pop_back();
        for (int s = 0; s < A; ++s) {
          int a = s >> u & 1, c = s >> v & 1;
          e00[s] -= (a == 0 && c == 0);
          e11[s] -= (a == 1 && c == 1);
        }
      }
    };
    rec(rec, 0, 0);
  }
  return found;
}

// Negative-Z graph for any point of Gamma: a ratio gadget with R < -1 makes
// Z = z0 (1 + R) take the sign opposite to z0, one with R in (-1, 0) keeps it.
// Products of two gadgets cover the points where z0 itself is negative.
inline std::optional<RatioGadget> gadget_sign_witness(const SpinParams &p) {
  require_gamma_region(p);
  DenseOptions opt;
  opt.shortcut = true;
  std::vector<RatioGadget> made;
  for (Rat target : {Rat(-2), Rat(-1, 2), Rat(-4), Rat(-1, 4), Rat(2), Rat(1, 2)}) {
    auto g = realize_dense(p, target, Rat(1, 8), opt);
    if (sgn(g.act.z0 + g.act.z1) < 0)
      return g;
    made.push_back(std::move(g));
  }
  for (std::size_t i = 0; i < made.size(); ++i)
    for (std::size_t j = i; j < made.size(); ++j) {
      auto g = gadget_product(made[i], made[j]);
      if (sgn(g.act.z0 + g.act.z1) < 0)
        return g;
    }
  return std::nullopt;
}

} // namespace spin2
