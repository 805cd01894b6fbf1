#include <gtest/gtest.h>

#include <random>

#include "loctriv/algebra.hpp"

using namespace loctriv;

namespace {

Eigen::MatrixXcd random_unitary(long d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(d, d);
  for (long i = 0; i < d; ++i) {
    for (long j = 0; j < d; ++j) m(i, j) = {g(rng), g(rng)};
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  return qr.householderQ();
}

Eigen::MatrixXcd random_matrix(long d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(d, d);
  for (long i = 0; i < d; ++i) {
    for (long j = 0; j < d; ++j) m(i, j) = {g(rng), g(rng)};
  }
  return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& low, const Eigen::MatrixXcd& high) {
  Eigen::MatrixXcd out(low.rows() * high.rows(), low.cols() * high.cols());
  for (long r = 0; r < high.rows(); ++r) {
    for (long c = 0; c < high.cols(); ++c) out.block(r * low.rows(), c * low.cols(), low.rows(), low.cols()) = high(r, c) * low;
  }
  return out;
}

Eigen::MatrixXcd direct_sum(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace

TEST(Algebra, GeneratedDimensions) {
  const auto X = PauliString::parse("X").dense(), Z = PauliString::parse("Z").dense();
  EXPECT_EQ(OperatorAlgebra::generated({Z}, 2).dimension(), 2);
  EXPECT_EQ(OperatorAlgebra::generated({X, Z}, 2).dimension(), 4);
  EXPECT_EQ(OperatorAlgebra::generated({}, 3).dimension(), 1);
  // X (x) I and Z (x) I on two qubits: M_2 (x) I.
  const auto XI = PauliString::parse("XI").dense(), ZI = PauliString::parse("ZI").dense();
  auto a = OperatorAlgebra::generated({XI, ZI}, 4);
  EXPECT_EQ(a.dimension(), 4);
  EXPECT_TRUE(a.contains(PauliString::parse("YI").dense()));
  EXPECT_FALSE(a.contains(PauliString::parse("IZ").dense()));
  // A generic matrix generates everything.
  std::mt19937_64 rng(1);
  EXPECT_EQ(OperatorAlgebra::generated({random_matrix(5, rng)}, 5).dimension(), 25);
}

TEST(Algebra, CenterOfBlockAlgebra) {
  std::mt19937_64 rng(2);
  // (M_2 (x) I_2) + M_1 on C^5, conjugated by a random unitary.
  const auto U = random_unitary(5, rng);
  std::vector<Eigen::MatrixXcd> gens;
  for (int k = 0; k < 3; ++k) {
    gens.push_back(U * direct_sum(kron(Eigen::MatrixXcd::Identity(2, 2), random_matrix(2, rng)), random_matrix(1, rng)) * U.adjoint());
  }
  auto a = OperatorAlgebra::generated(gens, 5);
  EXPECT_EQ(a.dimension(), 5);
  EXPECT_EQ(algebra_center(a).size(), 2u);
  auto projs = center_projectors(a);
  ASSERT_EQ(projs.size(), 2u);
  std::vector<double> ranks = {projs[0].trace().real(), projs[1].trace().real()};
  std::sort(ranks.begin(), ranks.end());
  EXPECT_NEAR(ranks[0], 1.0, 1e-9);
  EXPECT_NEAR(ranks[1], 4.0, 1e-9);
  for (const auto& p : projs) {
    EXPECT_TRUE(a.contains(p));
    EXPECT_LT((p * p - p).norm(), 1e-9);
  }
}

TEST(Algebra, SchmidtOperators) {
  const Eigen::MatrixXcd h = PauliString::parse("XX").dense() + PauliString::parse("YY").dense();
  auto ops = schmidt_operators(h, {0, 1}, {0}, {2, 2});
  ASSERT_EQ(ops.size(), 2u);
  auto a = OperatorAlgebra::generated(ops, 2);
  EXPECT_EQ(a.dimension(), 4);
  // Z (x) X on sites (3, 7): the site-7 side is X.
  auto zx = schmidt_operators(PauliString::parse("ZX").dense(), {3, 7}, {7}, std::vector<int>(8, 2));
  ASSERT_EQ(zx.size(), 1u);
  EXPECT_LT((zx[0] * std::sqrt(2.0) - PauliString::parse("X").dense()).norm() * (zx[0] * std::sqrt(2.0) + PauliString::parse("X").dense()).norm(), 1e-9);
}

TEST(Algebra, InteractionAlgebrasOfCommutingTermsCommute) {
  auto h = toric_code(3);
  // Qubit 0 with its neighbours on one star and one plaquette.
  const auto& plaq = h.terms[9];
  ASSERT_NE(std::find(plaq.support.begin(), plaq.support.end(), 0), plaq.support.end());
  auto a = interaction_algebra(h, {0}, {0});
  auto b = interaction_algebra(h, {0}, {9});
  EXPECT_EQ(a.dimension(), 2);
  EXPECT_EQ(b.dimension(), 2);
  // Edge-split algebras of a two-body commuting Hamiltonian on the middle site.
  auto r = ring_zz(5);
  auto left = interaction_algebra(r, {1}, {0});
  auto right = interaction_algebra(r, {1}, {1});
  EXPECT_LT(max_commutator(left, right), 1e-10);
}

TEST(Algebra, FactorDecomposePlanted) {
  std::mt19937_64 rng(3);
  // C^8 = (C^2 (x) C^3) + (C^1 (x) C^2); algebra A acts on the first factor,
  // B on the second.
  const auto U = random_unitary(8, rng);
  std::vector<Eigen::MatrixXcd> ga, gb;
  for (int k = 0; k < 3; ++k) {
    ga.push_back(U * direct_sum(kron(random_matrix(2, rng), Eigen::MatrixXcd::Identity(3, 3)), random_matrix(1, rng)(0, 0) * Eigen::MatrixXcd::Identity(2, 2)) * U.adjoint());
    gb.push_back(U * direct_sum(kron(Eigen::MatrixXcd::Identity(2, 2), random_matrix(3, rng)), random_matrix(2, rng)) * U.adjoint());
  }
  auto A = OperatorAlgebra::generated(ga, 8), B = OperatorAlgebra::generated(gb, 8);
  EXPECT_EQ(A.dimension(), 5);
  EXPECT_EQ(B.dimension(), 13);
  EXPECT_LT(max_commutator(A, B), 1e-9);
  auto dec = factor_decompose({A, B}, 8);
  ASSERT_EQ(dec.blocks.size(), 2u);
  std::vector<std::vector<int>> shapes;
  for (const auto& b : dec.blocks) shapes.push_back(b.factor_dims);
  std::sort(shapes.begin(), shapes.end());
  EXPECT_EQ(shapes[0], (std::vector<int>{1, 2, 1}));
  EXPECT_EQ(shapes[1], (std::vector<int>{2, 3, 1}));
  EXPECT_LT(dec.residual, 1e-9);
}

TEST(Algebra, FactorDecomposeAbelian) {
  const auto Z = PauliString::parse("Z").dense();
  auto a = OperatorAlgebra::generated({Z}, 2);
  auto dec = factor_decompose({a, a}, 2);
  ASSERT_EQ(dec.blocks.size(), 2u);
  for (const auto& b : dec.blocks) EXPECT_EQ(b.factor_dims, (std::vector<int>{1, 1, 1}));
  // Nothing to decompose: one block, all multiplicity.
  auto triv = factor_decompose({}, 3);
  ASSERT_EQ(triv.blocks.size(), 1u);
  EXPECT_EQ(triv.blocks[0].factor_dims, (std::vector<int>{3}));
}
