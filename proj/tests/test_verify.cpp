#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "loctriv/verify.hpp"

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

Eigen::MatrixXcd random_unitary(long d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_hermitian(d, rng) + Eigen::MatrixXcd::Identity(d, d) * std::complex<double>(0, 1));
  return qr.householderQ();
}

CommutingHamiltonian random_local(const std::vector<int>& dims, int terms, std::mt19937_64& rng) {
  CommutingHamiltonian h(dims);
  const int n = static_cast<int>(dims.size());
  for (int t = 0; t < terms; ++t) {
    const int a = t % n, b = (t + 1 + t / n) % n;
    std::vector<int> sup = a == b ? std::vector<int>{a} : std::vector<int>{a, b};
    h.add(Term::dense(sup, random_hermitian(h.support_dimension(sup), rng)));
  }
  return h;
}

Clifford random_clifford(int n, std::mt19937_64& rng, int gates = 20) {
  Clifford c(n);
  std::uniform_int_distribution<int> q(0, n - 1), kind(0, 2);
  for (int g = 0; g < gates; ++g) {
    const int k = kind(rng), a = q(rng);
    if (k == 0) {
      c = c.then(Clifford::hadamard(n, a));
    } else if (k == 1) {
      c = c.then(Clifford::phase_gate(n, a));
    } else if (n > 1) {
      c = c.then(Clifford::cnot(n, a, (a + 1 + q(rng) % (n - 1)) % n));
    }
  }
  return c;
}

}  // namespace

TEST(Verify, ApplyLocalMatchesEmbedding) {
  std::mt19937_64 rng(2);
  std::vector<int> dims = {2, 3, 2, 4};
  for (auto sup : std::vector<std::vector<int>>{{0}, {1}, {3, 1}, {2, 0, 3}}) {
    long d = 1;
    for (int s : sup) d *= dims[s];
    auto op = random_hermitian(d, rng);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Random(48);
    auto full = embed_operator(op, sup, {0, 1, 2, 3}, dims);
    EXPECT_LT((apply_local(op, sup, dims, psi) - full * psi).norm(), 1e-10);
  }
}

TEST(Verify, LanczosMatchesDense) {
  std::mt19937_64 rng(3);
  // 2^9 * 3 = 1536 > dense solver threshold.
  std::vector<int> dims(10, 2);
  dims[4] = 3;
  auto h = random_local(dims, 14, rng);
  auto lz = exact_ground(h);
  EXPECT_FALSE(lz.dense);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_hamiltonian(h), Eigen::EigenvaluesOnly);
  EXPECT_NEAR(lz.energy, es.eigenvalues()(0), 1e-9);
  EXPECT_LT((apply_hamiltonian(h, lz.state) - lz.energy * lz.state).norm(), 1e-8);
}

TEST(Verify, InitialProductState) {
  auto c = Circuit::for_sites({2, 3});
  c.registers[0].initial = Eigen::Vector2cd(0, 1);
  c.registers[1].initial = Eigen::Vector3cd(0, 0, 1);
  auto psi = initial_state(c);
  EXPECT_EQ(psi.size(), 6);
  EXPECT_EQ(psi(1 + 2 * 2), std::complex<double>(1, 0));
  EXPECT_NEAR(psi.norm(), 1.0, 1e-15);
}

TEST(Verify, CircuitPreservesNormAndIsVariational) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> dims = {2, 3, 2, 2, 3};
    auto h = random_local(dims, 6, rng);
    auto c = Circuit::for_sites(dims);
    std::vector<Gate> gates;
    for (int k = 0; k < 6; ++k) {
      const int a = k % 5, b = (k + 2) % 5;
      gates.push_back(Gate::dense({a, b}, random_unitary(dims[a] * dims[b], rng)));
    }
    c.append_scheduled(gates);
    auto psi = apply_circuit(c);
    EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
    EXPECT_GE(statevector_energy(h, c, psi).energy, exact_ground_energy(h) - 1e-9);
  }
  auto bad = Circuit::for_sites({2});
  bad.rounds.push_back({Gate::dense({0}, 2.0 * Eigen::MatrixXcd::Identity(2, 2))});
  EXPECT_THROW(apply_circuit(bad), std::invalid_argument);
}

TEST(Verify, TableauMatchesStatevector) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 6;
    auto h = CommutingHamiltonian::qubits(n);
    // Random Pauli projectors; they need not commute for this comparison.
    std::uniform_int_distribution<int> letter(0, 3);
    for (int t = 0; t < n; ++t) {
      PauliString p(n);
      for (int q = 0; q < n; ++q) p.set_letter(q, "IXYZ"[letter(rng)]);
      if (p.is_identity()) p.set_letter(0, 'Z');
      if (rng() & 1) p.set_sign(-1);
      h.add(Term::from_global_stabilizer(p));
    }
    auto c = Circuit::for_sites(std::vector<int>(n, 2));
    if (rng() & 1) c.registers[0].initial = Eigen::Vector2cd(0, 1);
    std::vector<Gate> gates;
    for (int k = 0; k < 3; ++k) {
      std::vector<int> sup;
      for (int q = 0; q < n; ++q) {
        if (rng() & 1) sup.push_back(q);
      }
      if (sup.empty()) sup.push_back(0);
      std::shuffle(sup.begin(), sup.end(), rng);
      gates.push_back(Gate::from_clifford(sup, random_clifford(static_cast<int>(sup.size()), rng)));
    }
    c.append_scheduled(gates);
    const auto tab = tableau_energy(h, c);
    const auto sv = statevector_energy(h, c);
    for (std::size_t t = 0; t < h.terms.size(); ++t) EXPECT_NEAR(tab.per_term[t], sv.per_term[t], 1e-9);
  }
}

TEST(Verify, JointEigenvaluesOfFrustratedRing) {
  // Odd ring with one antiferro bond: every ground state violates one bond.
  auto h = CommutingHamiltonian::qubits(5);
  for (int i = 0; i < 5; ++i) {
    h.add(Term::stabilizer_projector({i, (i + 1) % 5}, PauliString::parse(i == 0 ? "-ZZ" : "ZZ")));
  }
  EXPECT_NEAR(exact_ground_energy(h), 1.0, 1e-9);
  auto lam = joint_ground_eigenvalues(h);
  double sum = 0;
  for (double l : lam) {
    EXPECT_TRUE(std::abs(l) < 1e-9 || std::abs(l - 1) < 1e-9);
    sum += l;
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
  auto p = projectorize(h, lam);
  EXPECT_NEAR(exact_ground_energy(p), 0.0, 1e-9);
}
