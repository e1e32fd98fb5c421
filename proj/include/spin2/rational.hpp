#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace spin2 {

using Integer = mpz_class;
using Rat = mpq_class;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// maps to exit status 2
struct PreconditionError : Error {
  using Error::Error;
};
struct RegionError : PreconditionError {
  using PreconditionError::PreconditionError;
};
struct UndefinedRatioError : PreconditionError {
  using PreconditionError::PreconditionError;
};
struct PoleError : PreconditionError {
  using PreconditionError::PreconditionError;
};
// maps to exit status 3
struct SizeCapError : Error {
  using Error::Error;
};
// an internal certificate failed; never expected
struct InvariantError : Error {
  using Error::Error;
};

inline void ensure(bool ok, const char *what) {
  if (!ok)
    throw InvariantError(what);
}

struct CRat {
  Rat re, im;

  CRat() : re(0), im(0) {}
  CRat(const Rat &r) : re(r), im(0) {}
  CRat(long v) : re(v), im(0) {}
  CRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  Rat norm2() const { return re * re + im * im; }
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }
  CRat conj() const { return {re, -im}; }

  CRat &operator+=(const CRat &o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  CRat &operator-=(const CRat &o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  CRat &operator*=(const CRat &o) {
    if (sgn(im) == 0 && sgn(o.im) == 0) {
      re *= o.re;
      return *this;
    }
    Rat r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  CRat &operator/=(const CRat &o) {
    if (o.is_zero())
      throw std::domain_error("division by zero");
    if (sgn(o.im) == 0) {
      re /= o.re;
      im /= o.re;
      return *this;
    }
    Rat d = o.norm2();
    Rat r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
  }
  friend CRat operator+(CRat a, const CRat &b) { return a += b; }
  friend CRat operator-(CRat a, const CRat &b) { return a -= b; }
  friend CRat operator*(CRat a, const CRat &b) { return a *= b; }
  friend CRat operator/(CRat a, const CRat &b) { return a /= b; }
  friend CRat operator-(const CRat &a) { return {-a.re, -a.im}; }
  friend bool operator==(const CRat &a, const CRat &b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const CRat &a, const CRat &b) { return !(a == b); }
};

inline std::ostream &operator<<(std::ostream &os, const CRat &z) {
  return os << z.re.get_str() << (sgn(z.im) < 0 ? "" : "+") << z.im.get_str() << "i";
}

template <class T> T power(T base, unsigned long e) {
  T out(1);
  while (e) {
    if (e & 1)
      out *= base;
    e >>= 1;
    if (e)
      base *= base;
  }
  return out;
}

inline Rat rpow(const Rat &b, unsigned long e) {
  Rat out;
  mpz_pow_ui(out.get_num_mpz_t(), b.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), b.get_den_mpz_t(), e);
  if (sgn(out.get_den()) < 0) {
    out.get_num() = -out.get_num();
    out.get_den() = -out.get_den();
  }
  return out;
}

inline Rat rabs(const Rat &x) { return sgn(x) < 0 ? Rat(-x) : x; }

inline Rat dyadic(long num, long exp2) {
  Rat r(num);
  if (exp2 >= 0)
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), exp2);
  else
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), -exp2);
  return r;
}

inline Rat pow2(long e) { return dyadic(1, e); }

inline std::size_t bits(const Rat &x) {
  return mpz_sizeinbase(x.get_num_mpz_t(), 2) + mpz_sizeinbase(x.get_den_mpz_t(), 2);
}

// floor(log2|x|) for x != 0
inline long ilog2(const Rat &x) {
  Rat a = rabs(x);
  long e = long(mpz_sizeinbase(a.get_num_mpz_t(), 2)) -
           long(mpz_sizeinbase(a.get_den_mpz_t(), 2));
  // now 2^(e-1) < a < 2^(e+1)
  if (a >= pow2(e))
    return e;
  return e - 1;
}

inline Integer floor_of(const Rat &x) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

inline Integer ceil_of(const Rat &x) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

// dyadic rounding keeping `prec` significant bits
inline Rat round_down(const Rat &x, long prec) {
  if (sgn(x) == 0)
    return x;
  long k = prec - ilog2(x);
  Rat s = x * pow2(k);
  return Rat(floor_of(s)) * pow2(-k);
}

inline Rat round_up(const Rat &x, long prec) {
  if (sgn(x) == 0)
    return x;
  long k = prec - ilog2(x);
  Rat s = x * pow2(k);
  return Rat(ceil_of(s)) * pow2(-k);
}

// a short dyadic rational strictly inside (lo, hi)
inline Rat dyadic_between(const Rat &lo, const Rat &hi) {
  if (!(lo < hi))
    throw std::domain_error("dyadic_between: empty interval");
  long k = -ilog2(hi - lo) + 1;
  auto pick = [&](long e) -> Rat {
    Integer k1 = floor_of(lo * pow2(e)) + 1;
    return Rat(k1) * pow2(-e);
  };
  Rat c = pick(k);
  while (true) {
    Rat cc = pick(k - 1);
    if (!(cc < hi))
      break;
    c = cc;
    --k;
  }
  return c;
}

inline Rat parse_rat(const std::string &s) {
  if (s.empty())
    throw PreconditionError("empty rational");
  for (char ch : s)
    if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '/' || ch == '-' || ch == '+'))
      throw PreconditionError("not an exact rational: '" + s + "'");
  std::string t = s[0] == '+' ? s.substr(1) : s;
  Rat r;
  if (r.set_str(t, 10) != 0)
    throw PreconditionError("not an exact rational: '" + s + "'");
  if (sgn(r.get_den()) == 0)
    throw PreconditionError("zero denominator: '" + s + "'");
  r.canonicalize();
  return r;
}

inline std::string str(const Rat &x) { return x.get_str(); }

inline double to_double(const Rat &x) { return x.get_d(); }

// floor(sqrt(x) * 2^k) / 2^k and the next grid point bracket sqrt(x)
inline std::pair<Rat, Rat> sqrt_bounds(const Rat &x, long k) {
  if (sgn(x) < 0)
    throw std::domain_error("sqrt of negative");
  Rat s = x * pow2(2 * k);
  Integer f = floor_of(s), r;
  mpz_sqrt(r.get_mpz_t(), f.get_mpz_t());
  Rat lo = Rat(r) * pow2(-k);
  Integer r1 = r + 1;
  Rat hi = Rat(r1) * pow2(-k);
  return {lo, hi};
}

} // namespace spin2
