#include <spin2/graph.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace spin2;

namespace {

Multigraph random_graph(std::mt19937_64 &rng, int maxn, int maxm) {
  int n = 1 + int(rng() % maxn);
  int m = int(rng() % (maxm + 1));
  Multigraph g(n);
  for (int i = 0; i < m; ++i)
    g.add_edge(int(rng() % n), int(rng() % n));
  return g;
}

} // namespace

TEST(Wedge, SingleVertices) {
  auto [g, v] = wedge_sum(Multigraph(1), 0, Multigraph(1), 0);
  EXPECT_EQ(g.n, 1);
  EXPECT_EQ(g.edge_count(), 0);
  EXPECT_EQ(v, 0);
}

TEST(Wedge, TwoLoopGraphs) {
  Multigraph k(1, {{0, 0}});
  auto [g, v] = wedge_sum(k, 0, k, 0);
  EXPECT_EQ(g.n, 1);
  EXPECT_EQ(g, Multigraph(1, {{0, 0}, {0, 0}}));
}

TEST(Wedge, PathPlusEdge) {
  auto p2 = builtin("path", 2); // 0-1-2
  Multigraph e(2, {{0, 1}});
  auto [g, v] = wedge_sum(p2, 0, e, 0);
  // hand-built: vertex 3 hangs off vertex 0
  EXPECT_EQ(g, Multigraph(4, {{0, 1}, {1, 2}, {0, 3}}));
  EXPECT_EQ(v, 0);
}

TEST(Wedge, CountsAndRangeErrors) {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 50; ++it) {
    auto a = random_graph(rng, 5, 6), b = random_graph(rng, 5, 6);
    int va = int(rng() % a.n), vb = int(rng() % b.n);
    auto [g, v] = wedge_sum(a, va, b, vb);
    EXPECT_EQ(g.n, a.n + b.n - 1);
    EXPECT_EQ(g.edge_count(), a.edge_count() + b.edge_count());
    EXPECT_EQ(v, va);
  }
  EXPECT_THROW(wedge_sum(Multigraph(1), 1, Multigraph(1), 0), PreconditionError);
}

TEST(Wedge, CommutativeAssociativeUpToIso) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 30; ++it) {
    auto a = random_graph(rng, 3, 3), b = random_graph(rng, 3, 3), c = random_graph(rng, 3, 3);
    auto [ab, v1] = wedge_sum(a, 0, b, 0);
    auto [ba, v2] = wedge_sum(b, 0, a, 0);
    EXPECT_TRUE(isomorphic(ab, ba));
    auto [ab_c, w1] = wedge_sum(ab, v1, c, 0);
    auto [bc, u] = wedge_sum(b, 0, c, 0);
    auto [a_bc, w2] = wedge_sum(a, 0, bc, u);
    EXPECT_TRUE(isomorphic(ab_c, a_bc));
  }
}

TEST(Attach, Basics) {
  auto [g, u] = attach_edge(Multigraph(1), 0);
  EXPECT_EQ(g, Multigraph(2, {{0, 1}}));
  EXPECT_EQ(u, 1);
  EXPECT_THROW(attach_edge(Multigraph(1), 3), PreconditionError);
}

TEST(Attach, RepeatedAtFreshEndGivesPath) {
  Multigraph g(1);
  int v = 0;
  for (int i = 0; i < 6; ++i)
    std::tie(g, v) = attach_edge(g, v);
  EXPECT_EQ(g, builtin("path", 6));
  auto d = g.degrees();
  EXPECT_EQ(std::count(d.begin(), d.end(), 1), 2);
  EXPECT_EQ(std::count(d.begin(), d.end(), 2), 5);
}

TEST(Attach, RepeatedAtRootGivesStar) {
  Multigraph g(1);
  for (int i = 0; i < 5; ++i)
    g = attach_edge(g, 0).first;
  EXPECT_EQ(g, builtin("star", 5));
}

TEST(Surgery, DeleteContract) {
  auto g = delete_edge(Multigraph(2, {{0, 1}}), 0);
  EXPECT_EQ(g.n, 2);
  EXPECT_EQ(g.edge_count(), 0);

  auto t = contract_edge(builtin("cycle", 3), 0);
  EXPECT_EQ(t.n, 2);
  EXPECT_EQ(t, Multigraph(2, {{0, 1}, {0, 1}}));

  auto l = contract_edge(Multigraph(2, {{0, 1}, {0, 1}}), 0);
  EXPECT_EQ(l, Multigraph(1, {{0, 0}}));

  EXPECT_THROW(contract_edge(Multigraph(1, {{0, 0}}), 0), PreconditionError);
  EXPECT_THROW(delete_edge(Multigraph(2), 0), PreconditionError);
}

TEST(Surgery, DeleteThenReAddRestores) {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 50; ++it) {
    auto g = random_graph(rng, 6, 8);
    if (g.edge_count() == 0)
      continue;
    int idx = int(rng() % g.edge_count());
    auto h = delete_edge(g, idx);
    h.add_edge(g.edges[idx].first, g.edges[idx].second);
    EXPECT_EQ(g, h);
  }
}

TEST(Builtin, ClosedForms) {
  auto k4 = builtin("clique", 4);
  EXPECT_EQ(k4.n, 4);
  EXPECT_EQ(k4.edge_count(), 6);
  auto s5 = builtin("star", 5);
  EXPECT_EQ(s5.n, 6);
  EXPECT_EQ(s5.edge_count(), 5);
  EXPECT_EQ(s5.degrees()[0], 5);
  for (int n = 3; n < 9; ++n) {
    auto c = builtin("cycle", n);
    EXPECT_EQ(c.edge_count(), n);
    for (int d : c.degrees())
      EXPECT_EQ(d, 2);
    auto k = builtin("clique", n);
    EXPECT_EQ(k.edge_count(), n * (n - 1) / 2);
    for (int d : k.degrees())
      EXPECT_EQ(d, n - 1);
    auto gr = builtin("grid", n);
    EXPECT_EQ(gr.edge_count(), 2 * n * (n - 1));
    auto sl = builtin("selfloops", n);
    EXPECT_EQ(sl.degrees()[0], 2 * n);
  }
  EXPECT_THROW(builtin("cycle", 2), PreconditionError);
  EXPECT_THROW(builtin("path", 0), PreconditionError);
  EXPECT_THROW(builtin("wheel", 4), PreconditionError);
}

TEST(Json, RoundTripAndRejects) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 50; ++it) {
    auto g = random_graph(rng, 8, 10);
    auto s = dump_graph(g);
    auto h = parse_graph(s);
    EXPECT_EQ(h.edges, g.edges);
    EXPECT_EQ(dump_graph(h), s);
  }
  EXPECT_THROW(parse_graph(R"({"n":2,"edges":[[0,2]]})"), PreconditionError);
  EXPECT_THROW(parse_graph(R"({"n":2})"), PreconditionError);
  EXPECT_THROW(parse_graph("not json"), PreconditionError);
  auto g = parse_graph(R"({"n":1,"edges":[[0,0],[0,0]]})");
  EXPECT_EQ(g.edge_count(), 2);
}
