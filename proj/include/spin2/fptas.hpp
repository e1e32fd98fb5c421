#pragma once

// Deterministic approximation of Z_G = Z_G(1): truncate the Taylor series of
// ln Z_G(x) at 0 inside a zero-free disk and exponentiate with a rigorous
// enclosure.  Coefficients come from the exact polynomial (desk scale).

#include "expbounds.hpp"
#include "zerofree.hpp"

namespace spin2 {

struct TruncatedLog {
  int m = 0;
  std::vector<Rat> t; // t[k-1] = coefficient of x^k in ln(p(x)/p(0))
  Rat z0;

  Rat partial_sum(int upto) const {
    Rat s(0);
    for (int k = 1; k <= upto && k <= int(t.size()); ++k)
      s += t[k - 1];
    return s;
  }
  Rat sum() const { return partial_sum(m); }
};

inline TruncatedLog log_taylor(const UniPoly &p, int m) {
  if (p.c.empty() || sgn(p.c[0]) == 0)
    throw PreconditionError("log series needs a nonzero constant term");
  if (m < 0)
    throw PreconditionError("negative order");
  TruncatedLog L;
  L.m = m;
  L.z0 = p.c[0];
  L.t.resize(m);
  for (int k = 1; k <= m; ++k) {
    Rat acc = Rat(k) * p.coeff(k);
    for (int j = 1; j < k; ++j)
      acc -= Rat(j) * L.t[j - 1] * p.coeff(k - j);
    L.t[k - 1] = acc / (Rat(k) * L.z0);
  }
  return L;
}

// n (1/r)^(m+1) / (1 - 1/r): bound on the tail of ln(Z(1)/Z(0)) when all
// n roots of Z lie outside the disk of radius r
inline Rat truncation_bound(int n, const Rat &r, int m) {
  Rat q = 1 / r;
  return Rat(n) * rpow(q, m + 1) / (1 - q);
}

inline int choose_order(int n, const Rat &r, const Rat &eps) {
  if (!(r > 1))
    throw PreconditionError("zero-free radius must exceed 1");
  if (sgn(eps) <= 0)
    throw PreconditionError("eps must be positive");
  if (n <= 0)
    return 1;
  int m = 1;
  while (truncation_bound(n, r, m) > eps / 2) {
    ++m;
    if (m > 100000)
      throw SizeCapError("order cap reached");
  }
  return m;
}

// Z(1)/Z(0) from the first d log coefficients of a degree-d polynomial:
// -k t_k are the power sums of the inverse roots; Newton's identities give
// the elementary symmetric functions, i.e. the normalized coefficients.
inline Rat newton_value_at_one(const TruncatedLog &L, int d) {
  ensure(L.m >= d, "need at least degree many coefficients");
  std::vector<Rat> ps(d + 1), e(d + 1);
  for (int k = 1; k <= d; ++k)
    ps[k] = -Rat(k) * L.t[k - 1];
  e[0] = 1;
  for (int k = 1; k <= d; ++k) {
    Rat acc(0);
    for (int i = 1; i <= k; ++i) {
      Rat term = e[k - i] * ps[i];
      if (i % 2)
        acc += term;
      else
        acc -= term;
    }
    e[k] = acc / k;
  }
  // prod (1 - x/zeta) at x = 1 is sum (-1)^k e_k
  Rat v(0);
  for (int k = 0; k <= d; ++k)
    v += k % 2 ? Rat(-e[k]) : e[k];
  return v;
}

struct FptasResult {
  Rat estimate;      // guaranteed relative error <= eps when certified
  Rat lo, hi;        // enclosure of z0 exp(truncated series) (times 2^isolated)
  int order = 0;
  Rat radius;        // zero-free radius used for Z(x)
  Rat trunc_bound;   // bound on |ln(truncated) - ln Z|
  int isolated = 0;  // stripped isolated vertices, each a factor 2
  bool exact = false;     // Newton reconstruction (order >= degree)
  bool certified = true;  // false on the uncentered-disk path
  SpinParams used;        // orientation actually evaluated
};

namespace detail {

inline std::pair<Multigraph, int> strip_isolated(const Multigraph &g) {
  auto deg = g.degrees();
  std::vector<int> id(g.n, -1);
  int k = 0;
  for (int v = 0; v < g.n; ++v)
    if (deg[v] > 0)
      id[v] = k++;
  Multigraph h(k);
  for (auto [u, v] : g.edges)
    h.add_edge(id[u], id[v]);
  return {h, g.n - k};
}

// z0 * exp(s) to relative width <= tol, with z0 != 0
inline std::pair<Rat, Rat> scaled_exp(const Rat &z0, const Rat &s, const Rat &tol) {
  for (long prec = 64;; prec *= 2) {
    auto [lo, hi] = exp_bounds(s, prec);
    if (sgn(lo) > 0 && hi - lo <= tol * lo) {
      if (sgn(z0) > 0)
        return {z0 * lo, z0 * hi};
      return {z0 * hi, z0 * lo};
    }
    if (prec > (1L << 24))
      throw InvariantError("exp enclosure did not converge");
  }
}

} // namespace detail

// Taylor expansion of ln Z(c + h w) in w, evaluated at w = 1.
inline TruncatedLog shifted_log_taylor(const UniPoly &p, const Rat &c, const Rat &h, int m) {
  // coefficients of p(c + h w) by repeated synthetic expansion
  int d = p.degree();
  std::vector<Rat> q(d + 1, Rat(0));
  // Horner in the shifted variable
  for (int k = d; k >= 0; --k) {
    // q <- q * (c + h w) + p_k
    std::vector<Rat> nq(d + 1, Rat(0));
    for (int i = 0; i <= d; ++i) {
      if (sgn(q[i]) == 0)
        continue;
      nq[i] += q[i] * c;
      if (i + 1 <= d)
        nq[i + 1] += q[i] * h;
    }
    nq[0] += p.coeff(k);
    q = std::move(nq);
  }
  return log_taylor(UniPoly(q), m);
}

inline FptasResult fptas_eval(const Multigraph &g0, const SpinParams &p, const Rat &eps0,
                              const ExactOptions &opt = {}) {
  if (sgn(eps0) <= 0)
    throw PreconditionError("eps must be positive");
  Rat eps = eps0 < Rat(1, 2) ? eps0 : Rat(1, 2);
  auto [g, iso] = detail::strip_isolated(g0);
  FptasResult out;
  out.isolated = iso;
  Rat scale = rpow(Rat(2), iso);
  if (g.n == 0) {
    out.estimate = out.lo = out.hi = scale;
    out.exact = true;
    out.used = p;
    return out;
  }

  UniPoly zp;
  TruncatedLog L;
  int n = 0;
  if (in_fptas_region(p)) {
    SpinParams q = fptas_orientation(p);
    out.used = q;
    Rat r = *pairwise_radius(q);
    out.radius = rpow(r, g.min_degree());
    zp = z_polynomial(g, q, opt);
    n = zp.degree();
    out.order = choose_order(n, out.radius, eps);
    L = log_taylor(zp, std::max(out.order, n));
    out.trunc_bound = truncation_bound(n, out.radius, out.order);
    if (out.order >= n) {
      out.exact = true;
      out.estimate = out.lo = out.hi = scale * L.z0 * newton_value_at_one(L, n);
      return out;
    }
    L.m = out.order;
  } else if (in_uncentered_region(p)) {
    // Taylor about the middle of [gamma/beta, 1] (negative parameter as
    // gamma); the disk of radius h + margin is assumed zero-free
    auto cst = uncentered_constants(p);
    SpinParams q = cst.swapped ? p.swapped() : p;
    out.used = q;
    out.certified = false;
    Rat lo = q.gamma / q.beta;
    Rat c = (1 + lo) / 2, h = (1 - lo) / 2;
    out.radius = 1 + cst.eps_margin / h;
    zp = z_polynomial(g, q, opt);
    n = zp.degree();
    out.order = choose_order(n, out.radius, eps);
    out.trunc_bound = truncation_bound(n, out.radius, out.order);
    L = shifted_log_taylor(zp, c, h, std::min(out.order, n));
    if (out.order >= n) {
      out.exact = true;
      out.estimate = out.lo = out.hi = scale * L.z0 * newton_value_at_one(L, n);
      return out;
    }
  } else {
    throw RegionError("outside the zero-free regions with a known FPTAS");
  }
  auto [lo, hi] = detail::scaled_exp(L.z0, L.sum(), eps / 4);
  out.lo = scale * lo;
  out.hi = scale * hi;
  out.estimate = (out.lo + out.hi) / 2;
  return out;
}

} // namespace spin2
