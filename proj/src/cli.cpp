#include <spin2/cli.hpp>
#include <spin2/spin2.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

namespace spin2 {

namespace {

using nlohmann::json;

Multigraph load_graph(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw PreconditionError("cannot read graph file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_graph(ss.str());
}

ExactOptions exact_opts() {
  ExactOptions o;
  o.enum_cap = std::size_t(enum_cap_from_env());
  return o;
}

json params_json(const SpinParams &p) { return {{"beta", str(p.beta)}, {"gamma", str(p.gamma)}}; }

json tags_json(const RegionClass &rc) {
  json t = json::array();
  for (auto x : rc.tags)
    t.push_back(tag_name(x));
  return t;
}

json table_json(const Table &t) {
  json a = json::array();
  for (auto &x : t.v)
    a.push_back(str(x));
  return a;
}

// Z within the exact cap, else null
json exact_or_null(const Multigraph &g, const SpinParams &p) {
  try {
    return str(partition_fn(g, p, exact_opts()));
  } catch (const SizeCapError &) {
    return nullptr;
  }
}

// output sink: --out file or the given stream
struct Sink {
  std::string path;
  std::ostream *fallback;
  std::ofstream file;

  std::ostream &get() {
    if (path.empty())
      return *fallback;
    if (!file.is_open()) {
      file.open(path);
      if (!file)
        throw PreconditionError("cannot write '" + path + "'");
    }
    return file;
  }
};

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"two-spin partition functions: exact values, gadgets, hardness reduction, FPTAS, FPRAS"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string beta, gamma, graph, target, eps, delta, mstar, rprime, width, margin, out_path, series;
  std::string bmin, bmax, gmin, gmax;
  int vertex = 0, s = 0, t = 1, steps = 8;
  std::uint64_t seed = 1;
  std::string method = "exp";
  bool literal = false;

  auto add_params = [&](CLI::App *c, bool required = true) {
    auto *b = c->add_option("--beta", beta, "beta as p/q or an integer");
    auto *g = c->add_option("--gamma", gamma, "gamma as p/q or an integer");
    if (required) {
      b->required();
      g->required();
    }
  };
  auto add_graph = [&](CLI::App *c) { c->add_option("--graph", graph, "graph JSON file")->required(); };

  auto *c_exact = app.add_subcommand("exact", "exact partition function Z_G");
  add_params(c_exact);
  add_graph(c_exact);

  auto *c_ratio = app.add_subcommand("ratio", "activity vector and ratio at a vertex");
  add_params(c_ratio);
  add_graph(c_ratio);
  c_ratio->add_option("--vertex", vertex, "root vertex");

  auto *c_realize = app.add_subcommand("realize", "gadget whose ratio approximates a target");
  add_params(c_realize);
  c_realize->add_option("--target", target, "target ratio")->required();
  c_realize->add_option("--eps", eps, "accuracy")->required();
  c_realize->add_option("--method", method, "exp (log-window construction) or dense")
      ->check(CLI::IsMember({"exp", "dense"}));

  auto *c_ising = app.add_subcommand("ising-gadget", "two-terminal Ising gadget with certificate");
  add_params(c_ising);
  c_ising->add_option("--mstar", mstar, "lower bound for M0 and M1")->required();
  c_ising->add_option("--eps", eps, "bound on ln(M1/M0)")->required();

  auto *c_mincut = app.add_subcommand("mincut-demo", "count minimum s-t cuts through the sign oracle");
  add_params(c_mincut, false);
  add_graph(c_mincut);
  c_mincut->add_option("--s", s, "source")->required();
  c_mincut->add_option("--t", t, "sink")->required();
  c_mincut->add_flag("--literal", literal, "use the uncorrected accuracy schedule");

  auto *c_classify = app.add_subcommand("classify", "complexity region tags of a parameter point");
  add_params(c_classify);

  auto *c_scan = app.add_subcommand("zero-scan", "grid scan of zero-free radii and star-root witnesses (CSV)");
  c_scan->add_option("--beta-min", bmin)->required();
  c_scan->add_option("--beta-max", bmax)->required();
  c_scan->add_option("--gamma-min", gmin)->required();
  c_scan->add_option("--gamma-max", gmax)->required();
  c_scan->add_option("--steps", steps, "grid intervals per axis")->check(CLI::Range(1, 1000));
  c_scan->add_option("--margin", margin, "witness radius is (1 + margin) times the disk radius");
  c_scan->add_option("--width", width, "root bracket width");
  c_scan->add_option("--out", out_path, "CSV file (default stdout)");

  auto *c_star = app.add_subcommand("star-root", "star graph with a real root just outside the disk");
  add_params(c_star);
  c_star->add_option("--rprime", rprime, "radius the root must beat")->required();
  c_star->add_option("--width", width, "root bracket width");

  auto *c_fptas = app.add_subcommand("fptas", "deterministic approximation by the truncated log series");
  add_params(c_fptas);
  add_graph(c_fptas);
  c_fptas->add_option("--eps", eps, "relative error")->required();
  c_fptas->add_option("--emit-series", series, "CSV of log-series coefficients");

  auto *c_fpras = app.add_subcommand("fpras", "randomized approximation in the subgraphs world");
  add_params(c_fpras);
  add_graph(c_fpras);
  c_fpras->add_option("--eps", eps, "relative error")->required();
  c_fpras->add_option("--delta", delta, "failure probability")->required();
  c_fpras->add_option("--seed", seed, "random seed");

  auto *c_holant = app.add_subcommand("holant-check", "subgraphs-world identity and table checks");
  add_params(c_holant);
  add_graph(c_holant);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    auto P = [&]() { return SpinParams{parse_rat(beta), parse_rat(gamma)}; };
    auto R = [](const std::string &x, const char *dflt) { return parse_rat(x.empty() ? std::string(dflt) : x); };

    if (*c_exact) {
      out << str(partition_fn(load_graph(graph), P(), exact_opts())) << "\n";
    } else if (*c_ratio) {
      auto g = load_graph(graph);
      g.check_vertex(vertex);
      auto a = activity_vector(g, vertex, P(), exact_opts());
      json j = {{"vertex", vertex}, {"z0", str(a.z0)}, {"z1", str(a.z1)}};
      j["ratio"] = sgn(a.z0) != 0 ? json(str(a.ratio())) : json(nullptr);
      out << j.dump(2) << "\n";
    } else if (*c_realize) {
      auto p = P();
      Rat Rt = parse_rat(target), e = parse_rat(eps);
      RatioGadget gd;
      if (method == "dense") {
        DenseOptions o;
        o.shortcut = true;
        gd = realize_dense(p, Rt, e, o);
      } else {
        gd = realize_signed(p, Rt, e);
      }
      json j = gadget_to_json(gd);
      j["method"] = method;
      j["target"] = str(Rt);
      j["eps"] = str(e);
      j["vertices"] = gd.graph.n;
      j["edges"] = gd.graph.edge_count();
      out << j.dump(2) << "\n";
    } else if (*c_ising) {
      auto p = P();
      Rat ms = parse_rat(mstar), e = parse_rat(eps);
      auto ig = realize_ising(p, ms, e);
      json j = ising_to_json(ig);
      j["certificate_ok"] = ising_certificate_ok(ig, ms, e);
      j["vertices"] = ig.graph.n;
      j["edges"] = ig.graph.edge_count();
      out << j.dump(2) << "\n";
    } else if (*c_mincut) {
      SpinParams p{R(beta, "1/2"), R(gamma, "-1")};
      CutInstance in{load_graph(graph), s, t};
      ReductionOptions o;
      o.literal = literal;
      auto res = reduction_count_mincuts(p, in, o);
      json tr = json::array();
      for (auto &st : res.transcript)
        tr.push_back({{"p", str(st.p)},
                      {"q", str(st.q)},
                      {"r", str(st.r)},
                      {"x", str(st.x)},
                      {"sign", st.sign},
                      {"h1_vertices", st.h1_vertices},
                      {"h2_vertices", st.h2_vertices},
                      {"in_third_window", st.in_third_window}});
      json j = {{"params", params_json(p)},
                {"k", res.k},
                {"C", res.C.get_str()},
                {"resolved", res.resolved},
                {"oracle_queries", res.oracle_queries},
                {"ising", {{"M0", str(res.M0)}, {"M1", str(res.M1)}, {"N", str(res.N)}, {"eps", str(res.eps_ising)},
                           {"k", res.ising_k}, {"vertices", res.ising_vertices}}},
                {"transcript", tr}};
      out << j.dump(2) << "\n";
    } else if (*c_classify) {
      auto p = P();
      auto rc = classify(p);
      json j = {{"point", params_json(p)}, {"tags", tags_json(rc)}, {"witnesses", rc.witnesses}};
      out << j.dump(2) << "\n";
    } else if (*c_scan) {
      Rat b0 = parse_rat(bmin), b1 = parse_rat(bmax), g0 = parse_rat(gmin), g1 = parse_rat(gmax);
      if (b1 < b0 || g1 < g0)
        throw PreconditionError("empty scan range");
      Rat mg = R(margin, "1/10"), wd = R(width, "1/1048576");
      Sink sink{out_path, &out, {}};
      auto &os = sink.get();
      os << "# spin2 zero-scan v1\n";
      os << "beta,gamma,radius,witness_n,root_lo,root_hi\n";
      for (int i = 0; i <= steps; ++i)
        for (int k = 0; k <= steps; ++k) {
          SpinParams p{b0 + (b1 - b0) * Rat(i, steps), g0 + (g1 - g0) * Rat(k, steps)};
          p.beta.canonicalize();
          p.gamma.canonicalize();
          std::string radius, wn, lo, hi;
          Rat sum = p.beta + p.gamma;
          if (sgn(p.gamma) < 0 && sum >= 1 && sum <= 2) {
            Rat rad = disk_radius(p);
            radius = str(rad);
            Rat rp = rad * (1 + mg);
            if (sgn(rad) > 0 && rp < p.beta) {
              try {
                auto w = star_root_witness(p, rp, wd);
                wn = std::to_string(w.n);
                lo = str(w.lo);
                hi = str(w.hi);
              } catch (const Error &) {
                // root sits on the disk boundary when beta + gamma = 2
              }
            }
          } else if (in_fptas_region(p)) {
            if (auto r = pairwise_radius(p))
              radius = str(*r);
          }
          os << str(p.beta) << "," << str(p.gamma) << "," << radius << "," << wn << "," << lo << "," << hi << "\n";
        }
    } else if (*c_star) {
      auto p = P();
      Rat rp = parse_rat(rprime), wd = R(width, "1/1048576");
      auto w = star_root_witness(p, rp, wd);
      json j = {{"point", params_json(p)}, {"disk_radius", str(disk_radius(p))}, {"rprime", str(rp)},
                {"n", w.n}, {"root_lo", str(w.lo)}, {"root_hi", str(w.hi)}};
      out << j.dump(2) << "\n";
    } else if (*c_fptas) {
      auto p = P();
      auto g = load_graph(graph);
      Rat e = parse_rat(eps);
      auto r = fptas_eval(g, p, e, exact_opts());
      json j = {{"estimate", str(r.estimate)}, {"lo", str(r.lo)}, {"hi", str(r.hi)},
                {"order", r.order}, {"radius", str(r.radius)}, {"truncation_bound", str(r.trunc_bound)},
                {"isolated", r.isolated}, {"reconstructed_exactly", r.exact}, {"certified", r.certified},
                {"used", params_json(r.used)}, {"exact", exact_or_null(g, p)}};
      if (!series.empty()) {
        auto [h, iso] = detail::strip_isolated(g);
        (void)iso;
        auto L = log_taylor(z_polynomial(h, r.used, exact_opts()), std::max(r.order, 1));
        std::ofstream cs(series);
        if (!cs)
          throw PreconditionError("cannot write '" + series + "'");
        cs << "# spin2 fptas-series v1\n";
        cs << "m,coefficient,partial_sum,truncation_bound\n";
        int n = h.n;
        for (int m = 1; m <= L.m; ++m)
          cs << m << "," << str(L.t[m - 1]) << "," << str(L.partial_sum(m)) << ","
             << (r.radius > 1 ? str(truncation_bound(n, r.radius, m)) : std::string()) << "\n";
        j["series"] = series;
      }
      out << j.dump(2) << "\n";
    } else if (*c_fpras) {
      auto p = P();
      auto g = load_graph(graph);
      auto r = fpras_estimate(g, p, parse_rat(eps), parse_rat(delta), seed);
      json reps = json::array();
      for (auto &x : r.replica_estimates)
        reps.push_back(str(x));
      json j = {{"estimate", str(r.estimate)}, {"estimate_decimal", r.estimate.get_d()},
                {"exact", exact_or_null(g, p)}, {"chains", int(reps.size())},
                {"steps", r.steps}, {"stages", r.stages}, {"samples_per_stage", r.samples_per_stage},
                {"replica_estimates", reps}, {"degenerate", r.degenerate}, {"used", params_json(r.used)},
                {"seed", seed}};
      out << j.dump(2) << "\n";
    } else if (*c_holant) {
      auto p = P();
      auto g = load_graph(graph);
      auto I = subgraphs_world(g, p);
      Rat hol = holant_exact(I);
      Rat wv = world_value(I, hol);
      Table tab = table_of(fourier_hat(interaction(p)));
      Table used = g.edge_count() ? I.vertices[g.n].table : table_of(I.global_sign_exponent ? negated(fourier_hat(interaction(p))) : fourier_hat(interaction(p)));
      bool nonneg = true;
      for (auto &x : used.v)
        nonneg &= sgn(x) >= 0;
      json wind = nullptr;
      if (nonneg) {
        auto cert = windable_check(used);
        wind = cert ? json(windcert_violation(used, *cert).empty()) : json(false);
      }
      json zex = exact_or_null(g, p);
      json j = {{"point", params_json(p)},
                {"psi_hat", table_json(tab)},
                {"edge_table", table_json(used)},
                {"global_sign_exponent", I.global_sign_exponent},
                {"holant", str(hol)},
                {"world_value", str(wv)},
                {"exact", zex},
                {"identity_holds", zex.is_null() ? json(nullptr) : json(zex.get<std::string>() == str(wv))},
                {"edge_table_nonnegative", nonneg},
                {"edge_table_terraced", strictly_terraced_check(used)},
                {"edge_table_windable", wind}};
      out << j.dump(2) << "\n";
    }
    return 0;
  } catch (const SizeCapError &e) {
    err << "size cap: " << e.what() << "\n";
    return 3;
  } catch (const PreconditionError &e) {
    err << "precondition: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception &e) {
    err << "bad input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace spin2
