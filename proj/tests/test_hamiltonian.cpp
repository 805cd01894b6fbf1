#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "loctriv/hamiltonian.hpp"

using namespace loctriv;

namespace {

Eigen::MatrixXcd random_hermitian(long d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(d, d);
  for (long i = 0; i < d; ++i) {
    for (long j = 0; j < d; ++j) m(i, j) = {g(rng), g(rng)};
  }
  return m + m.adjoint();
}

// Kronecker product with a acting on the less significant factor.
Eigen::MatrixXcd kron_low(const Eigen::MatrixXcd& low, const Eigen::MatrixXcd& high) {
  Eigen::MatrixXcd out(low.rows() * high.rows(), low.cols() * high.cols());
  for (long hr = 0; hr < high.rows(); ++hr) {
    for (long hc = 0; hc < high.cols(); ++hc) {
      out.block(hr * low.rows(), hc * low.cols(), low.rows(), low.cols()) = high(hr, hc) * low;
    }
  }
  return out;
}

}  // namespace

TEST(Hamiltonian, EmbedMatchesKron) {
  std::mt19937_64 rng(1);
  std::vector<int> dims = {2, 3, 2};
  auto a = random_hermitian(3, rng);
  // a on site 1 inside (0,1,2) = I2 (x) a (x) I2 in little-endian order.
  Eigen::MatrixXcd want = kron_low(kron_low(Eigen::MatrixXcd::Identity(2, 2), a), Eigen::MatrixXcd::Identity(2, 2));
  EXPECT_LT((embed_operator(a, {1}, {0, 1, 2}, dims) - want).norm(), 1e-12);
  auto b = random_hermitian(6, rng);
  // b on (1,0) reorders its factors.
  Eigen::MatrixXcd perm = Eigen::MatrixXcd::Zero(6, 6);
  for (int s1 = 0; s1 < 3; ++s1) {
    for (int s0 = 0; s0 < 2; ++s0) perm(s0 + 2 * s1, s1 + 3 * s0) = 1;
  }
  Eigen::MatrixXcd want_b = perm * b * perm.transpose();
  EXPECT_LT((embed_operator(b, {1, 0}, {0, 1}, dims) - want_b).norm(), 1e-12);
}

TEST(Hamiltonian, AddValidates) {
  auto h = CommutingHamiltonian::qubits(3);
  EXPECT_THROW(h.add(Term::stabilizer_projector({0, 3}, PauliString::parse("ZZ"))), std::invalid_argument);
  EXPECT_THROW(h.add(Term::stabilizer_projector({0, 0}, PauliString::parse("ZZ"))), std::invalid_argument);
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
  bad(0, 1) = 1;
  EXPECT_THROW(h.add(Term::dense({0}, bad)), std::invalid_argument);
  EXPECT_THROW(h.add(Term::dense({0, 1}, Eigen::MatrixXcd::Zero(2, 2))), std::invalid_argument);
  EXPECT_NO_THROW(h.add(Term::dense({2}, Eigen::MatrixXcd::Identity(2, 2))));
}

TEST(Hamiltonian, StabilizerSupportIsSorted) {
  auto t = Term::stabilizer_projector({3, 1}, PauliString::parse("-XZ"));
  EXPECT_EQ(t.support, (std::vector<int>{1, 3}));
  EXPECT_EQ(t.stabilizer->str(), "-ZX");
  EXPECT_EQ(t.global_stabilizer(4).str(), "-IZIX");
}

TEST(Hamiltonian, ToricCodeCommutes) {
  for (int L : {3, 4}) {
    auto h = toric_code(L);
    EXPECT_EQ(h.terms.size(), 2u * L * L);
    auto rep = check_commuting_projectors(h);
    EXPECT_TRUE(rep.ok());
    EXPECT_EQ(rep.max_commutator, 0.0);
  }
  auto punctured = toric_code(8, 4);
  EXPECT_EQ(punctured.terms.size(), 128u - 4u);
  EXPECT_TRUE(check_commuting_projectors(punctured, 2).ok());
  EXPECT_TRUE(check_commuting_projectors(wen_plaquette(4)).ok());
}

TEST(Hamiltonian, DenseCommutationAgreesWithSymplectic) {
  // Same toric code with dense terms gives the same verdict.
  auto h = toric_code(3);
  CommutingHamiltonian d(h.site_dims);
  for (const auto& t : h.terms) d.add(Term::dense(t.support, 0.5 * (Eigen::MatrixXcd::Identity(16, 16) - t.stabilizer->dense())));
  auto rep = check_commuting_projectors(d);
  EXPECT_TRUE(rep.ok());
  EXPECT_LT(rep.max_commutator, 1e-12);
}

TEST(Hamiltonian, AnticommutingTermsReported) {
  auto h = CommutingHamiltonian::qubits(3);
  h.add(Term::stabilizer_projector({0, 1}, PauliString::parse("ZZ")));
  h.add(Term::stabilizer_projector({1, 2}, PauliString::parse("XX")));
  h.add(Term::stabilizer_projector({2}, PauliString::parse("Z")));
  auto rep = check_commuting_projectors(h);
  EXPECT_FALSE(rep.commuting);
  ASSERT_EQ(rep.violating_pairs.size(), 2u);
  EXPECT_EQ(rep.violating_pairs[0], std::make_pair(0, 1));
  EXPECT_EQ(rep.violating_pairs[1], std::make_pair(1, 2));

  auto d = CommutingHamiltonian::qubits(2);
  d.add(Term::dense({0}, PauliString::parse("Z").dense()));
  d.add(Term::dense({0, 1}, PauliString::parse("XX").dense()));
  auto rd = check_commuting_projectors(d);
  EXPECT_FALSE(rd.commuting);
  EXPECT_FALSE(rd.projectors);
  EXPECT_EQ(rd.non_projector_terms.size(), 2u);
}

TEST(Hamiltonian, ProjectorizeExamples) {
  // Heisenberg-like XX+YY+ZZ: eigenvalues -3 (singlet) and 1 (triplet).
  auto h = CommutingHamiltonian::qubits(2);
  Eigen::MatrixXcd m = PauliString::parse("XX").dense() + PauliString::parse("YY").dense() + PauliString::parse("ZZ").dense();
  h.add(Term::dense({0, 1}, m));
  auto p = projectorize(h, {-3.0});
  EXPECT_TRUE(check_commuting_projectors(p).ok());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p.terms[0].matrix);
  EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(1), 1.0, 1e-12);
  EXPECT_NEAR(p.terms[0].matrix.trace().real(), 3.0, 1e-12);
  EXPECT_THROW(projectorize(h, {0.5}), std::invalid_argument);

  auto s = ring_zz(4);
  std::vector<double> lam = {0, 1, 0, 1};
  auto ps = projectorize(s, lam);
  EXPECT_EQ(ps.terms[1].stabilizer->sign(), -1);
  EXPECT_EQ(ps.terms[0].stabilizer->sign(), 1);
  EXPECT_THROW(projectorize(s, {0, 0.3, 0, 0}), std::invalid_argument);
}

TEST(Hamiltonian, HypercubeRing) {
  auto h = ring_zz(12);
  auto r = hypercube_partition(h, 1, 12, 4);
  EXPECT_EQ(r.dropped_count, 3);
  EXPECT_EQ(r.block_count, 3);
  EXPECT_EQ(r.kept.terms.size(), 9u);
  EXPECT_EQ(r.circuit.depth(), 1);
  EXPECT_NO_THROW(r.circuit.validate());
  EXPECT_EQ(hypercube_partition(ring_zz(8), 1, 8, 8).dropped_count, 0);
  // l = 5: blocks {0..4}, {5..9}, {10,11}
  auto r5 = hypercube_partition(h, 1, 12, 5);
  EXPECT_EQ(r5.block_count, 3);
  EXPECT_EQ(r5.dropped_count, 3);
}

TEST(Hamiltonian, HypercubeWen) {
  auto r = hypercube_partition(wen_plaquette(6), 2, 6, 3);
  EXPECT_EQ(r.block_count, 4);
  EXPECT_EQ(r.kept.terms.size(), 16u);
  EXPECT_EQ(r.dropped_count, 20);
  EXPECT_THROW(hypercube_partition(wen_plaquette(6), 2, 6, 6), std::invalid_argument);
}

TEST(Circuit, UnitaryWithFirstColumn) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int d : {1, 2, 5, 16}) {
    Eigen::VectorXcd v(d);
    for (int i = 0; i < d; ++i) v(i) = {g(rng), g(rng)};
    v.normalize();
    auto u = unitary_with_first_column(v);
    EXPECT_LT((u.col(0) - v).norm(), 1e-12);
    EXPECT_LT((u.adjoint() * u - Eigen::MatrixXcd::Identity(d, d)).norm(), 1e-12);
  }
}

TEST(Circuit, ScheduleAndValidate) {
  auto c = Circuit::for_sites({2, 2, 2, 2});
  auto id2 = Eigen::MatrixXcd::Identity(4, 4);
  c.append_scheduled({Gate::dense({0, 1}, id2), Gate::dense({2, 3}, id2), Gate::dense({1, 2}, id2), Gate::dense({0, 3}, id2)});
  EXPECT_EQ(c.depth(), 2);
  EXPECT_NO_THROW(c.validate());
  c.append_scheduled({Gate::dense({3, 0}, id2)});
  EXPECT_EQ(c.depth(), 3);
  c.rounds[0].push_back(Gate::dense({1, 3}, id2));
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(c.add_register(0, 0, 2), std::invalid_argument);
  EXPECT_EQ(c.add_register(0, 1, 2), 4);
  EXPECT_EQ(c.real_count(), 4);
}
