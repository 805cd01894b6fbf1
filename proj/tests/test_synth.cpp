#include <gtest/gtest.h>

#include <random>
#include <set>

#include <unsupported/Eigen/KroneckerProduct>

#include "loctriv/synth.hpp"
#include "loctriv/verify.hpp"

using namespace loctriv;

namespace {

LocalizationMap singleton_map(const CommutingHamiltonian& h) {
  return cluster_map(interaction_complex(h), Clustering::singletons(h.site_count()));
}

double tableau_total(const CommutingHamiltonian& h, const Circuit& c) { return tableau_energy(h, c).energy; }

}  // namespace

TEST(StabilizerCut, RingCutSides) {
  auto h = ring_zz(6);
  auto m = singleton_map(h);
  auto cd = cut_decompose(h, m, make_edge(3, 4));
  EXPECT_EQ(cd.left, std::vector<int>{3});
  EXPECT_EQ(cd.right, std::vector<int>{4});
  ASSERT_EQ(cd.h_lr.size(), 1u);
  EXPECT_EQ(cd.h_lo.size(), 1u);
  EXPECT_EQ(cd.h_ro.size(), 1u);
}

TEST(StabilizerCut, RingConstraint) {
  // (1 - Z3 Z4)/2: the centers are Z3 and Z4 tied with sign +1.
  auto sc = stabilizer_constraints({{PauliString::parse("IIIZZI")}}, {3}, {4});
  ASSERT_EQ(sc.left_center.size(), 1u);
  EXPECT_TRUE(sc.left_center[0].same_letters(PauliString::parse("IIIZII")));
  ASSERT_EQ(sc.constraints.size(), 1u);
  EXPECT_EQ(sc.constraints[0].sigma, 1);
  EXPECT_TRUE(sc.left_non_generated.empty());
}

TEST(StabilizerCut, TripleZNotGenerated) {
  // Z1Z2Z4Z5 and X2X3X5X6, Z3Z6 with L = {1,2,3}, R = {4,5,6}.
  std::vector<std::vector<PauliString>> terms = {
      {PauliString::parse("ZZIZZI")},
      {PauliString::parse("IXXIXX"), PauliString::parse("IIZIIZ")},
  };
  auto sc = stabilizer_constraints(terms, {0, 1, 2}, {3, 4, 5});
  EXPECT_FALSE(sc.stabilizer);
  ASSERT_EQ(sc.left_non_generated.size(), 1u);
  std::set<std::string> centers;
  for (const auto& c : sc.left_center) centers.insert(c.restricted({0, 1, 2}).str());
  EXPECT_TRUE(centers.count("+ZZZ")) << *centers.begin();
}

TEST(StabilizerCut, QutritCounterexampleRejected) {
  // sum_j |j><j| (x) |j><j| on two qutrits of a triangle.
  CommutingHamiltonian h({3, 3, 3});
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(9, 9);
  for (int j = 0; j < 3; ++j) m(j + 3 * j, j + 3 * j) = 1;
  h.add(Term::dense({0, 1}, m));
  h.add(Term::dense({1, 2}, m));
  h.add(Term::dense({0, 2}, m));
  auto w = make_workspace(h, singleton_map(h));
  auto cd = cut_decompose(w, make_edge(0, 1));
  StabilizerConstraints sc;
  sc.left = cd.left;
  sc.right = cd.right;
  sc.stabilizer = false;
  try {
    build_cross_hamiltonian(w, cd, sc);
    FAIL() << "accepted";
  } catch (const UnsupportedRegime& e) {
    EXPECT_NE(std::string(e.what()).find("counterexample regime"), std::string::npos);
  }
}

TEST(StabilizerCut, RingsSolveWithSameDepth) {
  int depth = -1;
  for (int n : {8, 16, 32}) {
    auto h = ring_zz(n);
    auto r = stabilizer_cut_solve(h, singleton_map(h));
    EXPECT_EQ(r.cuts, 1);
    EXPECT_EQ(r.betti.front(), 1);
    EXPECT_EQ(r.betti.back(), 0);
    EXPECT_EQ(tableau_total(h, r.circuit), 0.0) << n;
    if (depth < 0) depth = r.circuit.depth();
    EXPECT_EQ(r.circuit.depth(), depth) << n;
  }
}

TEST(StabilizerCut, PuncturedToric) {
  auto h = toric_code(8, 4);
  auto m = punctured_toric_map(8, 4);
  EXPECT_EQ(first_betti(m.target), 1);
  auto r = stabilizer_cut_solve(h, m);
  EXPECT_EQ(tableau_total(h, r.circuit), 0.0);
  auto full = toric_code(8);
  EXPECT_LE(tableau_energy(full, r.circuit).density, 4.0 / 16.0);
}

TEST(StabilizerCut, ToricFourByFour) {
  auto h = toric_code(4, 2);
  auto m = punctured_toric_map(4, 2);
  auto r = stabilizer_cut_solve(h, m);
  EXPECT_EQ(tableau_total(h, r.circuit), 0.0);
}

namespace {

Graph petersen() {
  std::vector<Edge> e;
  for (int i = 0; i < 5; ++i) {
    e.push_back(make_edge(i, (i + 1) % 5));
    e.push_back(make_edge(i, i + 5));
    e.push_back(make_edge(5 + i, 5 + (i + 2) % 5));
  }
  return make_graph(10, e);
}

// Sites sit on the vertices of g; every source 1-cell goes to a geodesic.
LocalizationMap geodesic_map(const CommutingHamiltonian& h, const Graph& g) {
  LocalizationMap m;
  m.source = interaction_complex(h);
  m.target = g;
  m.vertex_image.resize(h.site_count());
  for (int s = 0; s < h.site_count(); ++s) m.vertex_image[s] = s;
  for (const auto& [u, v] : m.source.one_cells()) {
    auto d = bfs_distances(g, v);
    std::vector<int> walk{u};
    while (walk.back() != v)
      for (int y : g.neighbors(walk.back()))
        if (d[y] == d[walk.back()] - 1) {
          walk.push_back(y);
          break;
        }
    m.edge_path[{u, v}] = walk;
  }
  return m;
}

Eigen::MatrixXcd random_unitary(long d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) m(i, j) = {g(rng), g(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  return qr.householderQ();
}

// Three-site term conjugated by u on each of its sites.
Term rotated(const Term& t, const std::vector<Eigen::MatrixXcd>& u) {
  const auto& s = t.support;
  Eigen::MatrixXcd r = Eigen::kroneckerProduct(u[s[2]], Eigen::kroneckerProduct(u[s[1]], u[s[0]]).eval()).eval();
  return Term::dense(s, r * t.dense_matrix() * r.adjoint());
}

// Cluster-state terms (1 - Z X Z)/2 on consecutive triples of C_n, each
// qubit rotated by a random unitary.
CommutingHamiltonian rotated_cluster_ring(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::MatrixXcd> u;
  for (int i = 0; i < n; ++i) u.push_back(random_unitary(2, rng));
  auto h = CommutingHamiltonian::qubits(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> s{(i + n - 1) % n, i, (i + 1) % n};
    h.add(rotated(Term::stabilizer_projector(s, PauliString::parse("ZXZ")), u));
  }
  return h;
}

}  // namespace

TEST(TreeReduce, RotatedClusterRing) {
  for (int n : {8, 10}) {
    auto h = rotated_cluster_ring(n, 11 + n);
    auto r = tree_reduce_solve(h, collapse_high_girth_power(cycle_graph(n), 2), 5);
    EXPECT_EQ(r.l_max, 2);
    ASSERT_EQ(r.steps.size(), 1u);
    EXPECT_EQ(r.steps[0].zone.size(), 3u);
    EXPECT_EQ(r.steps[0].copies, 2);
    EXPECT_EQ(r.betti.front(), 1);
    EXPECT_EQ(r.betti.back(), 0);
    EXPECT_LT(statevector_energy(h, r.circuit).energy, 1e-9) << n;
  }
}

TEST(TreeReduce, PetersenStep) {
  // ZZZ on every path of length two, rotated per qubit.
  auto g = petersen();
  std::mt19937_64 rng(3);
  std::vector<Eigen::MatrixXcd> u;
  for (int i = 0; i < 10; ++i) u.push_back(random_unitary(2, rng));
  auto h = CommutingHamiltonian::qubits(10);
  for (int b = 0; b < 10; ++b) {
    const auto& nb = g.neighbors(b);
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        std::vector<int> s{nb[i], b, nb[j]};
        std::sort(s.begin(), s.end());
        h.add(rotated(Term::stabilizer_projector(s, PauliString::parse("ZZZ")), u));
      }
  }
  auto w = make_workspace(h, geodesic_map(h, g));
  ASSERT_EQ(workspace_l_max(w), 2);
  const int before = first_betti(w.k1);
  auto step = tree_reduce_step(w, 0, 2, 1);
  EXPECT_EQ(step.zone, (std::vector<int>{0, 1, 4, 5}));
  EXPECT_EQ(step.copies, 3);
  EXPECT_EQ(w.register_count(), 10 + 2 * 4);
  EXPECT_EQ(first_betti(w.k1), before - 2);
  EXPECT_NO_THROW(validate_workspace(w));
}

TEST(TreeReduce, LowGirthRejected) {
  auto h = rotated_cluster_ring(4, 1);
  EXPECT_THROW(tree_reduce_solve(h, geodesic_map(h, cycle_graph(4))), UnsupportedRegime);
}

TEST(TwoBody, PlantedMatchesExactGround) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + trial % 5;
    Graph g = trial % 2 ? cycle_graph(n) : path_graph(n);
    auto h = planted_two_body(g, 4, 1 << 10, 100 + trial);
    auto r = solve_two_body(h, trial);
    const double exact = exact_ground_energy(h);
    EXPECT_NEAR(r.energy, exact, 1e-9) << trial;
    EXPECT_NEAR(statevector_energy(h, r.circuit).energy, exact, 1e-9) << trial;
  }
}

TEST(TwoBody, PlantedGraphWithDegenerateProducts) {
  // Some products of site-algebra basis elements vanish only up to rounding here.
  Graph g = make_graph(7, {{0, 1}, {0, 3}, {1, 2}, {1, 3}, {2, 4}, {2, 6}, {3, 5}});
  auto h = planted_two_body(g, 4, 1L << 14, 1005);
  auto r = solve_two_body(h, 5);
  EXPECT_NEAR(statevector_energy(h, r.circuit).energy, exact_ground_energy(h), 1e-9);
}

TEST(TwoBody, SingleSiteTermsNeedOneRound) {
  CommutingHamiltonian h({2, 3});
  Eigen::MatrixXcd hd(2, 2);
  hd << 0.5, 0.5, 0.5, 0.5;  // projector onto |+>
  h.add(Term::dense({0}, hd));
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(3, 3);
  q(2, 2) = 0;
  h.add(Term::dense({1}, q));
  auto r = solve_two_body(h);
  EXPECT_EQ(r.circuit.depth(), 1);
  EXPECT_NEAR(statevector_energy(h, r.circuit).energy, 0, 1e-12);
}

TEST(TwoBody, RingOfSix) {
  auto h = ring_zz(6);
  auto r = solve_two_body(h);
  EXPECT_NEAR(r.energy, 0, 1e-12);
  EXPECT_NEAR(statevector_energy(h, r.circuit).energy, 0, 1e-12);
  EXPECT_TRUE(r.exhaustive);
}

TEST(TreeStage, BandClusteringMeetsTwoClusters) {
  // Paths of length two inside a binary tree: with width 2 each path meets
  // at most two clusters.
  Graph t = binary_tree(4);
  auto label = forest_band_clustering(t, 2);
  for (int b = 0; b < t.vertex_count(); ++b) {
    const auto& nb = t.neighbors(b);
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        std::set<int> c{label[nb[i]], label[b], label[nb[j]]};
        EXPECT_LE(c.size(), 2u);
      }
  }
  auto single = forest_band_clustering(t, 0);
  EXPECT_EQ(std::set<int>(single.begin(), single.end()).size(), static_cast<std::size_t>(t.vertex_count()));
}

TEST(StabilizerCut, BettiDecreasesByOnePerCut) {
  auto h = toric_code(4, 2);
  auto r = stabilizer_cut_solve(h, punctured_toric_map(4, 2));
  for (std::size_t k = 0; k + 1 < r.betti.size(); ++k) EXPECT_EQ(r.betti[k + 1], r.betti[k] - 1);
  EXPECT_EQ(r.betti.back(), 0);
}

TEST(StabilizerCut, ClusterRingWithSignsMatchesStatevector) {
  for (int n : {7, 9}) {
    auto h = CommutingHamiltonian::qubits(n);
    for (int i = 0; i < n; ++i)
      h.add(Term::stabilizer_projector({(i + n - 1) % n, i, (i + 1) % n}, PauliString::parse(i % 3 ? "ZXZ" : "-ZXZ")));
    auto r = stabilizer_cut_solve(h, collapse_high_girth_power(cycle_graph(n), 2));
    EXPECT_EQ(r.cuts, 1);
    EXPECT_GT(r.circuit.depth(), 0);
    EXPECT_EQ(tableau_energy(h, r.circuit).energy, 0.0);
    EXPECT_NEAR(statevector_energy(h, r.circuit).energy, 0, 1e-9);
  }
}

namespace {

CommutingHamiltonian signed_cluster_ring(int n) {
  auto h = CommutingHamiltonian::qubits(n);
  for (int i = 0; i < n; ++i)
    h.add(Term::stabilizer_projector({(i + n - 1) % n, i, (i + 1) % n}, PauliString::parse(i % 3 ? "ZXZ" : "-ZXZ")));
  return h;
}

double energy_on(const CommutingHamiltonian& h, const std::vector<int>& dims, const Eigen::VectorXcd& psi) {
  double e = 0;
  for (const auto& t : h.terms) e += psi.dot(apply_local(t.dense_matrix(), t.support, dims, psi)).real();
  return e;
}

}  // namespace

TEST(StabilizerCut, CrossHamiltonianMapsGroundStates) {
  for (auto [h, m] : {std::make_pair(ring_zz(6), singleton_map(ring_zz(6))),
                      std::make_pair(signed_cluster_ring(7), collapse_high_girth_power(cycle_graph(7), 2))}) {
    auto w = make_workspace(h, m);
    auto cyc = shortest_cycle(w.k1);
    auto cd = cut_decompose(w, make_edge(cyc.front(), cyc.back()));
    std::vector<std::vector<PauliString>> terms;
    for (int t : cd.h_lr) terms.push_back({h.terms[t].global_stabilizer(h.site_count())});
    auto sc = stabilizer_constraints(terms, cd.left, cd.right);
    auto cr = build_cross_hamiltonian(w, cd, sc);
    EXPECT_EQ(cr.next.register_count(), h.site_count() + static_cast<int>(cd.left.size() + cd.right.size()));
    EXPECT_LT(first_betti(cr.next.k1), first_betti(w.k1));
    auto g = exact_ground(cr.next.h);
    EXPECT_NEAR(g.energy, 0, 1e-9);
    Eigen::VectorXcd psi = g.state;
    if (cr.unitary) psi = apply_local(cr.unitary->matrix(), cr.unitary->support, cr.next.h.site_dims, psi);
    EXPECT_NEAR(energy_on(h, cr.next.h.site_dims, psi), 0, 1e-9);
  }
}

TEST(StabilizerCut, TreeNeedsNoCuts) {
  // Open cluster-state path.
  auto h = CommutingHamiltonian::qubits(5);
  h.add(Term::stabilizer_projector({0, 1}, PauliString::parse("XZ")));
  for (int i = 1; i < 4; ++i) h.add(Term::stabilizer_projector({i - 1, i, i + 1}, PauliString::parse(i == 2 ? "-ZXZ" : "ZXZ")));
  h.add(Term::stabilizer_projector({3, 4}, PauliString::parse("ZX")));
  auto r = stabilizer_cut_solve(h, geodesic_map(h, path_graph(5)));
  EXPECT_EQ(r.cuts, 0);
  EXPECT_EQ(r.betti, std::vector<int>{0});
  EXPECT_NEAR(statevector_energy(h, r.circuit).energy, 0, 1e-12);
}

TEST(TreeReduce, TreeInputNeedsNoSteps) {
  auto h = planted_two_body(path_graph(5), 3, 1 << 8, 4);
  auto r = tree_reduce_solve(h, singleton_map(h), 2);
  EXPECT_TRUE(r.steps.empty());
  EXPECT_NEAR(statevector_energy(h, r.circuit).energy, exact_ground_energy(h), 1e-9);
}

TEST(TreeReduce, DiagonalTriplesOnSquaredRing) {
  auto h = CommutingHamiltonian::qubits(8);
  for (auto t : list_triangles(power(cycle_graph(8), 2)))
    h.add(Term::stabilizer_projector({t[0], t[1], t[2]}, PauliString::parse("ZZZ")));
  ASSERT_NEAR(exact_ground_energy(h), 0, 1e-12);
  auto r = tree_reduce_solve(h, collapse_high_girth_power(cycle_graph(8), 2));
  EXPECT_EQ(r.betti.back(), 0);
  EXPECT_NEAR(statevector_energy(h, r.circuit).energy, 0, 1e-9);
}
