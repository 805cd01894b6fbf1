#include <algorithm>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "loctriv/localize.hpp"

using namespace loctriv;

namespace {

std::vector<std::vector<int>> floyd(const Graph& g) {
  const int n = g.vertex_count(), inf = 1 << 20;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (auto [u, v] : g.edges()) d[u][v] = d[v][u] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

// Triangle 0,1,2 sent to a star: corners to leaves 0,1,2, center to vertex 3.
LocalizationMap fig2_map() {
  LocalizationMap m;
  m.source = Complex2(3);
  m.source.add_two_cell(0, 1, 2);
  m.target = star_graph(3);  // center 0, leaves 1..3
  m.vertex_image = {1, 2, 3};
  m.edge_path[{0, 1}] = {1, 0, 2};
  m.edge_path[{1, 2}] = {2, 0, 3};
  m.edge_path[{0, 2}] = {1, 0, 3};
  m.center_image[{0, 1, 2}] = 0;
  m.range = 1;
  return m;
}

LocalizationMap subdivision_map(int n) {
  LocalizationMap m;
  m.source = Complex2(2);
  m.source.add_one_cell(0, 1);
  m.target = path_graph(n + 1);
  m.vertex_image = {0, n};
  std::vector<int> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = i;
  m.edge_path[{0, 1}] = w;
  m.range = 1;
  return m;
}

LocalizationMap identity_map(const Graph& g) {
  LocalizationMap m;
  m.source = attach_triangles(g);
  m.target = g;
  for (int v = 0; v < g.vertex_count(); ++v) m.vertex_image.push_back(v);
  for (auto [u, v] : g.edges()) m.edge_path[{u, v}] = {u, v};
  m.range = 0;
  return m;
}

Graph ensemble_graph(std::uint64_t seed) {
  // r = 3 leaves girth >= 7 after deleting short cycles.
  auto s = sample_counterexample_graph({200, 4, 3, seed});
  return s.e;
}

}  // namespace

TEST(FirstBetti, Examples) {
  EXPECT_EQ(first_betti(binary_tree(3)), 0);
  EXPECT_EQ(first_betti(cycle_graph(6)), 1);
  Graph two(6);
  for (int b : {0, 3}) {
    two.add_edge(b, b + 1);
    two.add_edge(b + 1, b + 2);
    two.add_edge(b, b + 2);
  }
  EXPECT_EQ(first_betti(two), 2);
}

TEST(VerifyGood, IdentityOnTriangleFreeComplex) {
  auto rep = verify_good(identity_map(cycle_graph(5)));
  EXPECT_TRUE(rep.good);
  EXPECT_EQ(rep.metrics.l_max, 1);
  EXPECT_EQ(rep.metrics.max_preimage_diameter_0cell, 0);
  EXPECT_EQ(rep.metrics.max_preimage_diameter_1cell, 1);
}

TEST(VerifyGood, StarMapIsGood) {
  auto rep = verify_good(fig2_map());
  EXPECT_TRUE(rep.good) << (rep.violations.empty() ? "" : rep.violations.front());
  EXPECT_EQ(rep.metrics.D_1, 3);
  EXPECT_EQ(rep.metrics.l_max, 2);
  // Without the center the star's middle vertex is unanchored.
  auto m = fig2_map();
  m.center_image.clear();
  EXPECT_FALSE(verify_good(m).good);
}

TEST(VerifyGood, SubdivisionFlaggedByLmax) {
  for (int n : {2, 5, 9}) {
    auto rep = verify_good(subdivision_map(n));
    EXPECT_EQ(rep.metrics.l_max, n);
    EXPECT_FALSE(rep.good);
  }
}

TEST(VerifyGood, DetectsBrokenWalksAndHoles) {
  auto m = fig2_map();
  m.edge_path[{0, 1}] = {1, 2};  // 1-2 is not a target edge
  EXPECT_FALSE(verify_good(m).good);
  // A triangle wrapped once around a target triangle is not contractible.
  LocalizationMap w = identity_map(complete_graph(3));
  EXPECT_FALSE(verify_good(w).good);
}

TEST(Collapse, CycleSevenSquare) {
  auto m = collapse_high_girth_power(cycle_graph(7), 2);
  auto rep = verify_good(m);
  ASSERT_TRUE(rep.good) << rep.violations.front();
  EXPECT_EQ(rep.metrics.l_max, 2);
  EXPECT_EQ(m.source.two_cells().size(), 7u);
  for (const auto& t : m.source.two_cells()) {
    std::set<Edge> used;
    for (auto [a, b] : {Edge{t[0], t[1]}, Edge{t[1], t[2]}, Edge{t[0], t[2]}}) {
      auto w = m.walk(a, b);
      for (std::size_t s = 0; s + 1 < w.size(); ++s) used.insert(make_edge(w[s], w[s + 1]));
    }
    ASSERT_EQ(used.size(), 2u);
    auto [e, f] = std::pair{*used.begin(), *used.rbegin()};
    std::set<int> verts{e.first, e.second, f.first, f.second};
    EXPECT_EQ(verts.size(), 3u);  // two adjacent base edges
  }
}

TEST(Collapse, TreeAndRejection) {
  auto m = collapse_high_girth_power(binary_tree(4), 2);
  auto rep = verify_good(m);
  EXPECT_TRUE(rep.good);
  EXPECT_EQ(first_betti(m.target), 0);
  EXPECT_THROW(collapse_high_girth_power(cycle_graph(6), 2), std::invalid_argument);
  EXPECT_THROW(collapse_high_girth_power(cycle_graph(9), 3), std::invalid_argument);
}

TEST(Collapse, WalksAreGeodesicsOnEnsembleGraphs) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Graph g = ensemble_graph(seed);
    auto gr = girth(g);
    ASSERT_TRUE(!gr || *gr >= 7);
    auto m = collapse_high_girth_power(g, 2);
    auto d = floyd(g);
    for (const auto& [e, w] : m.edge_path) {
      EXPECT_EQ(static_cast<int>(w.size()) - 1, d[e.first][e.second]);
      for (std::size_t s = 0; s + 1 < w.size(); ++s) EXPECT_TRUE(g.has_edge(w[s], w[s + 1]));
    }
    auto rep = verify_good(m);
    EXPECT_TRUE(rep.good);
    EXPECT_EQ(rep.metrics.l_max, 2);
    EXPECT_LE(rep.metrics.max_preimage_diameter_0cell, 4);
    EXPECT_LE(rep.metrics.D_1, g.max_degree());
    auto dist = check_distortion(m, rep.metrics);
    EXPECT_TRUE(dist.holds);
  }
}

TEST(Distortion, PairsOnSmallMaps) {
  for (auto m : {fig2_map(), collapse_high_girth_power(cycle_graph(10), 3), collapse_high_girth_power(binary_tree(3), 2)}) {
    auto rep = verify_good(m);
    ASSERT_TRUE(rep.good);
    auto d = check_distortion(m, rep.metrics);
    EXPECT_TRUE(d.holds);
    EXPECT_GT(d.pairs_checked, 0);
  }
}

TEST(Normalize, RemovesDegreeTwoBadCell) {
  auto out = normalize_map(subdivision_map(2));
  EXPECT_EQ(out.target.vertex_count(), 2);
  EXPECT_EQ(out.walk(0, 1).size(), 2u);
  EXPECT_TRUE(verify_good(out).good);
  auto long_one = normalize_map(subdivision_map(6));
  EXPECT_EQ(long_one.target.vertex_count(), 2);
}

TEST(Normalize, GoodMapIsFixpoint) {
  auto m = fig2_map();
  auto out = normalize_map(m);
  EXPECT_EQ(out.target, m.target);
  EXPECT_EQ(out.edge_path, m.edge_path);
  EXPECT_EQ(out.vertex_image, m.vertex_image);
  EXPECT_EQ(out.center_image, m.center_image);
  auto c = collapse_high_girth_power(cycle_graph(7), 2);
  auto c2 = normalize_map(c);
  EXPECT_EQ(c2.edge_path, c.edge_path);
  EXPECT_LE(c2.range, c.range + 1);
}

TEST(Normalize, SplitsDisconnectedPreimage) {
  // 6-cycle with 0 and 3 sent to the same target vertex a.
  LocalizationMap m;
  m.source = attach_triangles(cycle_graph(6));
  m.target = Graph(5);
  const int a = 0, b = 1, c = 2, d = 3, e = 4;
  for (auto [x, y] : std::vector<Edge>{{a, b}, {b, c}, {c, a}, {a, d}, {d, e}, {e, a}}) m.target.add_edge(x, y);
  m.vertex_image = {a, b, c, a, d, e};
  m.edge_path[{0, 1}] = {a, b};
  m.edge_path[{1, 2}] = {b, c};
  m.edge_path[{2, 3}] = {c, a};
  m.edge_path[{3, 4}] = {a, d};
  m.edge_path[{4, 5}] = {d, e};
  m.edge_path[{0, 5}] = {a, e};
  m.range = 0;
  auto before = verify_good(m);
  EXPECT_FALSE(before.good);
  auto out = normalize_map(m);
  EXPECT_EQ(out.target.vertex_count(), 6);
  EXPECT_NE(out.vertex_image[0], out.vertex_image[3]);
  auto rep = verify_good(out);
  EXPECT_TRUE(rep.good) << (rep.violations.empty() ? "" : rep.violations.front());
  EXPECT_EQ(first_betti(out.target), 1);
}

TEST(Normalize, UnanchoredBranchPointFailsLoudly) {
  // Star with center 0 and leaves 1,2,3 plus an edge 1-3; the 2-cell passes the
  // center on two sides only, so the degree-3 center cannot be anchored.
  LocalizationMap m;
  m.source = Complex2(3);
  m.source.add_two_cell(0, 1, 2);
  m.target = star_graph(3);
  m.target.add_edge(1, 3);
  m.vertex_image = {1, 2, 3};
  m.edge_path[{0, 1}] = {1, 0, 2};
  m.edge_path[{1, 2}] = {2, 0, 3};
  m.edge_path[{0, 2}] = {1, 3};
  try {
    normalize_map(m);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& err) {
    EXPECT_NE(std::string(err.what()).find("requires branch migration (out of scope)"), std::string::npos);
  }
}

TEST(ClusterMap, TreeSquareClustersGiveGoodMap) {
  for (int depth = 2; depth <= 5; ++depth) {
    Complex2 k = attach_triangles(power(binary_tree(depth), 2));
    auto m = cluster_map(k, binary_tree_square_clustering(depth));
    auto rep = verify_good(m);
    EXPECT_TRUE(rep.good) << depth << ": " << (rep.violations.empty() ? "" : rep.violations.front());
    EXPECT_EQ(first_betti(m.target), 0);
    EXPECT_LE(m.range, 2);
  }
}

TEST(Hyperfinite, LatticeWithGenerousRange) {
  ComplexFamily lattice = [](int, std::mt19937_64&) { return triangulated_torus(6, 6); };
  auto rep = hyperfinite_experiment(lattice, 0.2, 6, 3, 5);
  EXPECT_DOUBLE_EQ(rep.success_rate(), 1.0);
}

TEST(Hyperfinite, ZeroEpsilonOnLocalizableComplex) {
  ComplexFamily ring = [](int, std::mt19937_64&) { return attach_triangles(power(cycle_graph(8), 2)); };
  auto rep = hyperfinite_experiment(ring, 0.0, 2, 2, 3);
  EXPECT_DOUBLE_EQ(rep.success_rate(), 1.0);
  for (const auto& t : rep.trials) EXPECT_EQ(t.removed, 0);
}

TEST(Hyperfinite, EnsembleSquareRarelyLocalizes) {
  ComplexFamily ens = [](int trial, std::mt19937_64&) {
    auto s = sample_counterexample_graph({500, 12, 2, static_cast<std::uint64_t>(trial)});
    return attach_triangles(power(s.e, 2));
  };
  auto rep = hyperfinite_experiment(ens, 0.02, 1, 3, 11, 4);
  EXPECT_LE(rep.success_rate(), 0.5);
  for (const auto& t : rep.trials) EXPECT_LE(t.removed, static_cast<int>(0.02 * t.cells));
}
