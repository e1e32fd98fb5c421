#pragma once

// Brute-force oracle.  Every quantity is an exact sum over spin assignments.
//
// The enumeration walks vertices in index order and buckets each assignment
// by (number of 1-spins, number of 00-edges, number of 11-edges); mixed
// edges weigh 1.  Field products are carried as integers over a common
// denominator so the inner loop never normalizes a fraction.

#include "graph.hpp"
#include "rational.hpp"

#include <cstdint>
#include <cstdlib>
#include <vector>

namespace spin2 {

struct SpinParams {
  Rat beta, gamma;

  SpinParams() = default;
  SpinParams(Rat b, Rat g) : beta(std::move(b)), gamma(std::move(g)) {}

  SpinParams swapped() const { return {gamma, beta}; }
  SpinParams negated() const { return {-beta, -gamma}; }
  friend bool operator==(const SpinParams &a, const SpinParams &b) {
    return a.beta == b.beta && a.gamma == b.gamma;
  }
};

struct ExactOptions {
  std::size_t enum_cap = 24;
};

template <class S> struct ActivityVec {
  S z0, z1;

  S sum() const { return z0 + z1; }
  S ratio() const {
    if (is_zero(z0))
      throw UndefinedRatioError("ratio undefined: [Z]_0 = 0");
    return z1 / z0;
  }
  friend bool operator==(const ActivityVec &a, const ActivityVec &b) {
    return a.z0 == b.z0 && a.z1 == b.z1;
  }

private:
  static bool is_zero(const Rat &x) { return sgn(x) == 0; }
  static bool is_zero(const CRat &x) { return x.is_zero(); }
};

template <class S> struct PairMat {
  S m[2][2];

  S sum() const { return m[0][0] + m[0][1] + m[1][0] + m[1][1]; }
  const S *operator[](int i) const { return m[i]; }
  S *operator[](int i) { return m[i]; }
  friend bool operator==(const PairMat &a, const PairMat &b) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (!(a.m[i][j] == b.m[i][j]))
          return false;
    return true;
  }
};

using FieldVector = std::vector<CRat>;
using ActivityVector = ActivityVec<CRat>;
using PairMatrix = PairMat<CRat>;
using RealActivity = ActivityVec<Rat>;
using RealPairMatrix = PairMat<Rat>;

struct UniPoly {
  std::vector<Rat> c; // c[k] is the coefficient of x^k

  UniPoly() = default;
  explicit UniPoly(std::vector<Rat> cs) : c(std::move(cs)) { trim(); }

  void trim() {
    while (!c.empty() && sgn(c.back()) == 0)
      c.pop_back();
  }
  int degree() const { return int(c.size()) - 1; }
  Rat coeff(int k) const { return k < int(c.size()) ? c[k] : Rat(0); }

  template <class S> S eval(const S &x) const {
    S acc(0);
    for (int k = degree(); k >= 0; --k) {
      acc *= x;
      acc += S(c[k]);
    }
    return acc;
  }
  friend bool operator==(const UniPoly &a, const UniPoly &b) { return a.c == b.c; }
};

namespace detail {

struct GInt {
  Integer re, im;
  GInt() = default;
  GInt(Integer r, Integer i) : re(std::move(r)), im(std::move(i)) {}
  explicit GInt(long v) : re(v), im(0) {}
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  GInt &operator+=(const GInt &o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  friend GInt operator*(const GInt &a, const GInt &b) {
    if (sgn(a.im) == 0 && sgn(b.im) == 0)
      return {Integer(a.re * b.re), Integer(0)};
    return {Integer(a.re * b.re - a.im * b.im), Integer(a.re * b.im + a.im * b.re)};
  }
};

inline bool int_is_zero(const Integer &x) { return sgn(x) == 0; }
inline bool int_is_zero(const GInt &x) { return x.is_zero(); }

template <class S> struct IntOf;
template <> struct IntOf<Rat> {
  using type = Integer;
  static Integer lcm_den(const std::vector<Rat> &lam) {
    Integer L(1);
    for (const auto &x : lam)
      mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), x.get_den_mpz_t());
    return L;
  }
  static Integer scale(const Rat &x, const Integer &L) { return Integer(x.get_num() * (L / x.get_den())); }
  static Rat back(const Integer &v) { return Rat(v); }
};
template <> struct IntOf<CRat> {
  using type = GInt;
  static Integer lcm_den(const std::vector<CRat> &lam) {
    Integer L(1);
    for (const auto &x : lam) {
      mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), x.re.get_den_mpz_t());
      mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), x.im.get_den_mpz_t());
    }
    return L;
  }
  static GInt scale(const CRat &x, const Integer &L) {
    return {Integer(x.re.get_num() * (L / x.re.get_den())), Integer(x.im.get_num() * (L / x.im.get_den()))};
  }
  static CRat back(const GInt &v) { return CRat(Rat(v.re), Rat(v.im)); }
};

// earlier-neighbour lists with multiplicity, and loop counts
struct Layout {
  int n = 0, m = 0;
  std::vector<std::vector<std::pair<int, int>>> back;
  std::vector<int> loops;

  explicit Layout(const Multigraph &g) : n(g.n), m(g.edge_count()), back(g.n), loops(g.n, 0) {
    std::vector<std::vector<int>> mult(g.n);
    for (auto [u, v] : g.edges) {
      if (u == v) {
        ++loops[u];
        continue;
      }
      // u < v: v sees u as an earlier neighbour
      auto &lst = back[v];
      auto it = std::find_if(lst.begin(), lst.end(), [&](auto &p) { return p.first == u; });
      if (it == lst.end())
        lst.emplace_back(u, 1);
      else
        ++it->second;
    }
  }
};

inline void check_cap(const Multigraph &g, const ExactOptions &opt) {
  if (std::size_t(g.n) > opt.enum_cap)
    throw SizeCapError("graph has " + std::to_string(g.n) + " vertices; enumeration cap is " +
                       std::to_string(opt.enum_cap));
}

// Counts of assignments by (ones, n00, n11) with all fields equal to 1.
// pins[v] in {-1, 0, 1}.
struct CountTable {
  int n, m;
  std::vector<std::uint64_t> t; // index (k*(m+1)+a)*(m+1)+b
  std::uint64_t &at(int k, int a, int b) { return t[(std::size_t(k) * (m + 1) + a) * (m + 1) + b]; }
  std::uint64_t at(int k, int a, int b) const { return t[(std::size_t(k) * (m + 1) + a) * (m + 1) + b]; }
};

inline CountTable count_assignments(const Multigraph &g, const std::vector<int> &pins) {
  Layout lay(g);
  CountTable T{g.n, lay.m, std::vector<std::uint64_t>(std::size_t(g.n + 1) * (lay.m + 1) * (lay.m + 1), 0)};
  std::vector<int> spin(g.n, 0);
  auto rec = [&](auto &self, int i, int k, int a, int b) -> void {
    if (i == g.n) {
      ++T.at(k, a, b);
      return;
    }
    for (int s = 0; s < 2; ++s) {
      if (pins[i] >= 0 && pins[i] != s)
        continue;
      int same = lay.loops[i];
      for (auto [j, c] : lay.back[i])
        if (spin[j] == s)
          same += c;
      spin[i] = s;
      if (s == 0)
        self(self, i + 1, k, a + same, b);
      else
        self(self, i + 1, k + 1, a, b + same);
    }
  };
  rec(rec, 0, 0, 0, 0);
  return T;
}

// Same bucketing with general fields; entries are field products scaled by
// L^k where L is the common denominator.
template <class S> struct WeightTable {
  int n, m;
  Integer L;
  std::vector<typename IntOf<S>::type> t;
  auto &at(int k, int a, int b) { return t[(std::size_t(k) * (m + 1) + a) * (m + 1) + b]; }
  const auto &at(int k, int a, int b) const { return t[(std::size_t(k) * (m + 1) + a) * (m + 1) + b]; }
};

template <class S>
WeightTable<S> weigh_assignments(const Multigraph &g, const std::vector<S> &lam, const std::vector<int> &pins) {
  using I = typename IntOf<S>::type;
  Layout lay(g);
  WeightTable<S> T{g.n, lay.m, IntOf<S>::lcm_den(lam), {}};
  T.t.assign(std::size_t(g.n + 1) * (lay.m + 1) * (lay.m + 1), I());
  std::vector<I> num(g.n);
  for (int v = 0; v < g.n; ++v)
    num[v] = IntOf<S>::scale(lam[v], T.L);
  std::vector<int> spin(g.n, 0);
  std::vector<I> prod(g.n + 1);
  prod[0] = I(1);
  auto rec = [&](auto &self, int i, int k, int a, int b) -> void {
    if (i == g.n) {
      T.at(k, a, b) += prod[i];
      return;
    }
    for (int s = 0; s < 2; ++s) {
      if (pins[i] >= 0 && pins[i] != s)
        continue;
      if (s == 1 && int_is_zero(num[i]))
        continue;
      int same = lay.loops[i];
      for (auto [j, c] : lay.back[i])
        if (spin[j] == s)
          same += c;
      spin[i] = s;
      if (s == 0) {
        prod[i + 1] = prod[i];
        self(self, i + 1, k, a + same, b);
      } else {
        prod[i + 1] = prod[i] * num[i];
        self(self, i + 1, k + 1, a, b + same);
      }
    }
  };
  rec(rec, 0, 0, 0, 0);
  return T;
}

inline std::vector<Rat> powers(const Rat &x, int m) {
  std::vector<Rat> p(m + 1);
  p[0] = 1;
  for (int i = 1; i <= m; ++i)
    p[i] = p[i - 1] * x;
  return p;
}

template <class S> S fold(const WeightTable<S> &T, const SpinParams &p) {
  auto pb = powers(p.beta, T.m), pg = powers(p.gamma, T.m);
  Rat invL = 1 / Rat(T.L);
  S total(0);
  Rat scale(1);
  for (int k = 0; k <= T.n; ++k) {
    S part(0);
    for (int a = 0; a <= T.m; ++a)
      for (int b = 0; a + b <= T.m; ++b) {
        const auto &w = T.at(k, a, b);
        if (int_is_zero(w))
          continue;
        part += IntOf<S>::back(w) * S(pb[a] * pg[b]);
      }
    total += part * S(scale);
    scale *= invL;
  }
  return total;
}

inline Rat fold_counts(const CountTable &T, const SpinParams &p) {
  auto pb = powers(p.beta, T.m), pg = powers(p.gamma, T.m);
  Rat total(0);
  for (int k = 0; k <= T.n; ++k)
    for (int a = 0; a <= T.m; ++a)
      for (int b = 0; a + b <= T.m; ++b)
        if (auto c = T.at(k, a, b))
          total += Rat(Integer((unsigned long)c)) * pb[a] * pg[b];
  return total;
}

inline std::vector<int> no_pins(int n) { return std::vector<int>(n, -1); }

template <class S> void check_fields(const Multigraph &g, const std::vector<S> &lam) {
  if (int(lam.size()) != g.n)
    throw PreconditionError("field vector length differs from vertex count");
}

} // namespace detail

// Z_G(lambda)
template <class S>
S partition_fn(const Multigraph &g, const SpinParams &p, const std::vector<S> &lam, const ExactOptions &opt = {}) {
  detail::check_cap(g, opt);
  detail::check_fields(g, lam);
  return detail::fold(detail::weigh_assignments(g, lam, detail::no_pins(g.n)), p);
}

// Z_G with every field equal to 1
inline Rat partition_fn(const Multigraph &g, const SpinParams &p, const ExactOptions &opt = {}) {
  detail::check_cap(g, opt);
  return detail::fold_counts(detail::count_assignments(g, detail::no_pins(g.n)), p);
}

template <class S>
S pinned_sum(const Multigraph &g, const SpinParams &p, const std::vector<S> &lam, const std::vector<int> &pins,
             const ExactOptions &opt = {}) {
  detail::check_cap(g, opt);
  detail::check_fields(g, lam);
  return detail::fold(detail::weigh_assignments(g, lam, pins), p);
}

inline Rat pinned_sum(const Multigraph &g, const SpinParams &p, const std::vector<int> &pins,
                      const ExactOptions &opt = {}) {
  detail::check_cap(g, opt);
  return detail::fold_counts(detail::count_assignments(g, pins), p);
}

template <class S>
ActivityVec<S> activity_vector(const Multigraph &g, int v, const SpinParams &p, const std::vector<S> &lam,
                               const ExactOptions &opt = {}) {
  g.check_vertex(v);
  auto pins = detail::no_pins(g.n);
  pins[v] = 0;
  S z0 = pinned_sum(g, p, lam, pins, opt);
  pins[v] = 1;
  S z1 = pinned_sum(g, p, lam, pins, opt);
  return {z0, z1};
}

inline RealActivity activity_vector(const Multigraph &g, int v, const SpinParams &p, const ExactOptions &opt = {}) {
  g.check_vertex(v);
  auto pins = detail::no_pins(g.n);
  pins[v] = 0;
  Rat z0 = pinned_sum(g, p, pins, opt);
  pins[v] = 1;
  Rat z1 = pinned_sum(g, p, pins, opt);
  return {z0, z1};
}

template <class S>
PairMat<S> pair_matrix(const Multigraph &g, int u, int v, const SpinParams &p, const std::vector<S> &lam,
                       const ExactOptions &opt = {}) {
  g.check_vertex(u);
  g.check_vertex(v);
  PairMat<S> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (u == v && i != j) {
        out.m[i][j] = S(0);
        continue;
      }
      auto pins = detail::no_pins(g.n);
      pins[u] = i;
      pins[v] = j;
      out.m[i][j] = pinned_sum(g, p, lam, pins, opt);
    }
  return out;
}

inline RealPairMatrix pair_matrix(const Multigraph &g, int u, int v, const SpinParams &p,
                                  const ExactOptions &opt = {}) {
  g.check_vertex(u);
  g.check_vertex(v);
  RealPairMatrix out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (u == v && i != j) {
        out.m[i][j] = 0;
        continue;
      }
      auto pins = detail::no_pins(g.n);
      pins[u] = i;
      pins[v] = j;
      out.m[i][j] = pinned_sum(g, p, pins, opt);
    }
  return out;
}

template <class S>
S ratio(const Multigraph &g, int v, const SpinParams &p, const std::vector<S> &lam, const ExactOptions &opt = {}) {
  return activity_vector(g, v, p, lam, opt).ratio();
}

inline Rat ratio(const Multigraph &g, int v, const SpinParams &p, const ExactOptions &opt = {}) {
  return activity_vector(g, v, p, opt).ratio();
}

// Z_G(x) with every field equal to x
inline UniPoly z_polynomial(const Multigraph &g, const SpinParams &p, const ExactOptions &opt = {}) {
  detail::check_cap(g, opt);
  auto T = detail::count_assignments(g, detail::no_pins(g.n));
  auto pb = detail::powers(p.beta, T.m), pg = detail::powers(p.gamma, T.m);
  std::vector<Rat> c(g.n + 1, Rat(0));
  for (int k = 0; k <= T.n; ++k)
    for (int a = 0; a <= T.m; ++a)
      for (int b = 0; a + b <= T.m; ++b)
        if (auto cnt = T.at(k, a, b))
          c[k] += Rat(Integer((unsigned long)cnt)) * pb[a] * pg[b];
  return UniPoly(std::move(c));
}

inline FieldVector uniform_field(int n, const CRat &x) { return FieldVector(n, x); }

inline int enum_cap_from_env(int fallback = 24) {
  if (const char *s = std::getenv("SPIN2_ENUM_CAP")) {
    char *end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end && *end == '\0' && v > 0 && v <= 40)
      return int(v);
    throw PreconditionError("SPIN2_ENUM_CAP must be an integer in 1..40");
  }
  return fallback;
}

} // namespace spin2
