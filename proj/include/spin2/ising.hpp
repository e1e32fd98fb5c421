#pragma once

// Two-terminal gadgets whose pair matrix is N [[M0, 1], [1, M1]] with
// M1/M0 just above 1: 2k parallel length-2 paths between u and v, with the
// same ratio gadget hung on both ends.

#include "gadgets.hpp"

namespace spin2 {

struct IsingGadget {
  Multigraph graph;
  int u = 0, v = 1;
  Rat N, M0, M1;
  RealPairMatrix pair;
  // construction record
  unsigned long k = 0;
  Rat R;                  // ratio of the end gadgets
  std::optional<Rat> tilt; // set when the parameters were tilted off beta + gamma = 0
};

// (beta^2+1)(gamma^2+1)/(beta+gamma)^2
inline Rat ising_growth(const SpinParams &p) {
  Rat s = p.beta + p.gamma;
  if (sgn(s) == 0)
    throw PreconditionError("growth factor undefined at beta + gamma = 0");
  return (p.beta * p.beta + 1) * (p.gamma * p.gamma + 1) / (s * s);
}

inline bool ising_certificate_ok(const IsingGadget &ig, const Rat &m_star, const Rat &eps) {
  if (!(sgn(ig.N) > 0 && ig.M0 > m_star && ig.M1 > m_star && ig.M1 > ig.M0))
    return false;
  if (!lt_exp(ig.M1 / ig.M0, eps))
    return false;
  const auto &P = ig.pair.m;
  return P[0][0] == ig.N * ig.M0 && P[0][1] == ig.N && P[1][0] == ig.N && P[1][1] == ig.N * ig.M1;
}

namespace detail {

// Paths carry the interaction q; when a tilt gadget T is given every path
// edge gets a copy of T at both of its ends, which turns the p-interaction
// into z0 z1 times the q-interaction.  End gadgets are realized under p.
inline IsingGadget realize_ising_core(const SpinParams &p, const SpinParams &q, const RatioGadget *T,
                                      const Rat &m_star, const Rat &eps) {
  Rat base = ising_growth(q);
  unsigned long k = 1;
  Rat bk = base;
  while (!gt_exp(bk / m_star, eps)) {
    bk *= base;
    ++k;
  }
  Rat b2 = q.beta * q.beta + 1, g2 = q.gamma * q.gamma + 1;
  Rat Ak = rpow(b2 / g2, k);
  Rat e = std::min(eps, Rat(1));
  RatioGadget G = realize_exp(p, Ak * (1 + e / 4), e / 8);
  Rat R = G.ratio();
  ensure(R > Ak && lt_exp(R / Ak, eps / 2), "end gadget ratio outside its window");

  Multigraph g(2 + 2 * int(k));
  for (int w = 2; w < g.n; ++w) {
    g.add_edge(0, w);
    g.add_edge(w, 1);
  }
  Rat scale(1);
  if (T) {
    int n0 = g.n;
    for (int w = 2; w < n0; ++w)
      for (int rep = 0; rep < 2; ++rep) {
        glue_into(g, w, T->graph, T->root);
        glue_into(g, rep == 0 ? 0 : 1, T->graph, T->root);
      }
    scale = rpow(T->act.z0 * T->act.z1, 4 * k);
  }
  glue_into(g, 0, G.graph, G.root);
  glue_into(g, 1, G.graph, G.root);

  IsingGadget ig;
  ig.graph = std::move(g);
  ig.u = 0;
  ig.v = 1;
  ig.k = k;
  ig.R = R;
  Rat z0sq = G.act.z0 * G.act.z0 * scale;
  Rat Z00 = rpow(b2, 2 * k) * z0sq;
  ig.N = rpow(q.beta + q.gamma, 2 * k) * z0sq * R;
  Rat Z11 = rpow(g2, 2 * k) * z0sq * R * R;
  ig.M0 = Z00 / ig.N;
  ig.M1 = Z11 / ig.N;
  ig.pair.m[0][0] = Z00;
  ig.pair.m[0][1] = ig.pair.m[1][0] = ig.N;
  ig.pair.m[1][1] = Z11;
  return ig;
}

} // namespace detail

// dyadic point near 1 + 1/(2 beta), used to tilt off the line beta + gamma = 0
inline Rat ising_tilt_target(const SpinParams &p) {
  Rat c = 1 + 1 / (2 * p.beta);
  Rat w = 1 / (8 * p.beta);
  return dyadic_between(c - w, c + w);
}

inline IsingGadget realize_ising(const SpinParams &p, const Rat &m_star, const Rat &eps) {
  require_gamma_region(p);
  if (!(m_star > 1))
    throw PreconditionError("M* must exceed 1");
  if (sgn(eps) <= 0)
    throw PreconditionError("eps must be positive");

  IsingGadget ig;
  if (sgn(p.beta + p.gamma) != 0) {
    ig = detail::realize_ising_core(p, p, nullptr, m_star, eps);
  } else {
    // beta = -gamma > 0
    DenseOptions opt;
    opt.shortcut = true;
    RatioGadget T = realize_dense(p, ising_tilt_target(p), 1 / (64 * (p.beta + 1)), opt);
    Rat r = T.ratio();
    ensure(r > 1 && r < 1 + 1 / p.beta, "tilt gadget ratio outside (1, 1 + 1/beta)");
    SpinParams q{p.beta / r, p.gamma * r};
    ensure(in_gamma_region(q) && sgn(q.beta + q.gamma) != 0, "tilted parameters left the region");
    ig = detail::realize_ising_core(p, q, &T, m_star, eps);
    ig.tilt = r;
  }
  ensure(ising_certificate_ok(ig, m_star, eps), "ising certificate failed");
  return ig;
}

inline nlohmann::json ising_to_json(const IsingGadget &ig) {
  nlohmann::json j = {{"graph", to_json(ig.graph)},
                      {"u", ig.u},
                      {"v", ig.v},
                      {"N", str(ig.N)},
                      {"M0", str(ig.M0)},
                      {"M1", str(ig.M1)},
                      {"pair", nlohmann::json::array({nlohmann::json::array({str(ig.pair.m[0][0]), str(ig.pair.m[0][1])}),
                                                      nlohmann::json::array({str(ig.pair.m[1][0]), str(ig.pair.m[1][1])})})},
                      {"k", ig.k},
                      {"R", str(ig.R)}};
  if (ig.tilt)
    j["tilt"] = str(*ig.tilt);
  return j;
}

inline IsingGadget ising_from_json(const nlohmann::json &j) {
  IsingGadget ig;
  ig.graph = graph_from_json(j.at("graph"));
  ig.u = j.at("u").get<int>();
  ig.v = j.at("v").get<int>();
  ig.graph.check_vertex(ig.u);
  ig.graph.check_vertex(ig.v);
  ig.N = parse_rat(j.at("N").get<std::string>());
  ig.M0 = parse_rat(j.at("M0").get<std::string>());
  ig.M1 = parse_rat(j.at("M1").get<std::string>());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      ig.pair.m[a][b] = parse_rat(j.at("pair").at(a).at(b).get<std::string>());
  ig.k = j.at("k").get<unsigned long>();
  ig.R = parse_rat(j.at("R").get<std::string>());
  if (j.contains("tilt"))
    ig.tilt = parse_rat(j.at("tilt").get<std::string>());
  return ig;
}

} // namespace spin2
