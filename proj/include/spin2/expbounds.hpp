#pragma once

// Rigorous enclosures of e^x for rational x, and the exact predicates
// y < e^x built on them.  Every rounding goes to the safe side.

#include "rational.hpp"

#include <utility>

namespace spin2 {

// lo < e^x <= hi (strict on the left for x != 0), about `prec` good bits
inline std::pair<Rat, Rat> exp_bounds(const Rat &x, long prec) {
  if (sgn(x) == 0)
    return {Rat(1), Rat(1)};
  if (sgn(x) < 0) {
    auto [lo, hi] = exp_bounds(Rat(-x), prec);
    return {round_down(1 / hi, prec + 2), round_up(1 / lo, prec + 2)};
  }
  long s = 0;
  Rat y = x;
  while (y > Rat(1, 2)) {
    y /= 2;
    ++s;
  }
  long w = prec + 2 * s + 8;
  Rat ylo = round_down(y, w), yhi = round_up(y, w);
  Rat tlo(1), thi(1), slo(1), shi(1);
  Rat tol = pow2(-w - 2);
  for (unsigned long k = 1;; ++k) {
    tlo = round_down(tlo * ylo / k, w);
    thi = round_up(thi * yhi / k, w);
    slo += tlo;
    shi += thi;
    if (thi < tol)
      break;
  }
  // tail beyond the last term is below that term when y <= 1/2
  Rat lo = round_down(slo, w), hi = round_up(shi + thi, w);
  for (long i = 0; i < s; ++i) {
    lo = round_down(lo * lo, w);
    hi = round_up(hi * hi, w);
  }
  return {lo, hi};
}

// decides y < e^x; exact because e^x is irrational for rational x != 0
inline bool lt_exp(const Rat &y, const Rat &x) {
  if (sgn(x) == 0)
    return y < 1;
  if (sgn(y) <= 0)
    return true;
  for (long prec = 64; prec < (1L << 26); prec *= 2) {
    auto [lo, hi] = exp_bounds(x, prec);
    if (y <= lo)
      return true;
    if (y >= hi)
      return false;
  }
  throw InvariantError("lt_exp: precision exhausted");
}

// y > e^x
inline bool gt_exp(const Rat &y, const Rat &x) {
  if (sgn(x) == 0)
    return y > 1;
  return !lt_exp(y, x);
}

// rho strictly inside the window (e^-eps R, e^eps R), R != 0
inline bool in_log_window(const Rat &rho, const Rat &R, const Rat &eps) {
  if (sgn(R) == 0 || sgn(rho) * sgn(R) <= 0)
    return false;
  Rat q = rho / R;
  return lt_exp(q, eps) && lt_exp(1 / q, eps);
}

} // namespace spin2
