#include <gtest/gtest.h>

#include <random>
#include <set>

#include "loctriv/pauli.hpp"

using namespace loctriv;

namespace {

PauliString random_pauli(int n, std::mt19937_64& rng, bool random_phase = true) {
  PauliString p(n);
  std::uniform_int_distribution<int> d(0, 3);
  for (int q = 0; q < n; ++q) p.set_letter(q, "IXYZ"[d(rng)]);
  if (random_phase) p.set_phase(d(rng));
  return p;
}

Clifford random_clifford(int n, std::mt19937_64& rng, int gates = 30) {
  Clifford c(n);
  std::uniform_int_distribution<int> q(0, n - 1), kind(0, 2);
  for (int g = 0; g < gates; ++g) {
    const int k = kind(rng), a = q(rng);
    if (k == 0) {
      c = c.then(Clifford::hadamard(n, a));
    } else if (k == 1) {
      c = c.then(Clifford::phase_gate(n, a));
    } else if (n > 1) {
      int b = q(rng);
      if (b == a) b = (a + 1) % n;
      c = c.then(Clifford::cnot(n, a, b));
    }
  }
  return c;
}

// All elements of the group generated by commuting signed generators.
std::set<std::string> enumerate_group(const std::vector<PauliString>& gens, int n) {
  std::set<std::string> out;
  const int k = static_cast<int>(gens.size());
  for (int mask = 0; mask < (1 << k); ++mask) {
    PauliString p(n);
    for (int i = 0; i < k; ++i) {
      if (mask >> i & 1) p *= gens[i];
    }
    out.insert(p.str());
  }
  return out;
}

}  // namespace

TEST(Pauli, ParseAndPrint) {
  auto p = PauliString::parse("-XIZY");
  EXPECT_EQ(p.size(), 4);
  EXPECT_EQ(p.sign(), -1);
  EXPECT_EQ(p.letter(3), 'Y');
  EXPECT_EQ(p.str(), "-XIZY");
  EXPECT_EQ(PauliString::parse("ZZ").str(), "+ZZ");
  EXPECT_EQ(PauliString::parse("+iX").phase(), 1);
  EXPECT_EQ(p.support(), (std::vector<int>{0, 2, 3}));
  EXPECT_THROW(PauliString::parse("XQ"), std::invalid_argument);
}

TEST(Pauli, SingleQubitProducts) {
  auto X = PauliString::parse("X"), Y = PauliString::parse("Y"), Z = PauliString::parse("Z");
  EXPECT_EQ((X * Y).str(), "+iZ");
  EXPECT_EQ((Y * X).str(), "-iZ");
  EXPECT_EQ((Z * X).str(), "+iY");
  EXPECT_EQ((Y * Z).str(), "+iX");
  EXPECT_EQ((Y * Y).str(), "+I");
}

TEST(Pauli, ProductMatchesDense) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + t % 5;
    auto a = random_pauli(n, rng), b = random_pauli(n, rng);
    EXPECT_LT(((a * b).dense() - a.dense() * b.dense()).norm(), 1e-12);
  }
}

TEST(Pauli, SymplecticCommutationMatchesDense) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 120; ++t) {
    const int n = 1 + t % 10;
    auto a = random_pauli(n, rng), b = random_pauli(n, rng);
    if (n > 7 && t % 4) continue;
    const Eigen::MatrixXcd A = a.dense(), B = b.dense();
    const bool dense_commute = (A * B - B * A).norm() < 1e-9;
    EXPECT_EQ(a.commutes(b), dense_commute) << a.str() << " " << b.str();
  }
}

TEST(Pauli, ApplyMatchesDense) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    auto p = random_pauli(4, rng);
    Eigen::VectorXcd v = Eigen::VectorXcd::Random(16);
    EXPECT_LT((p.apply(v) - p.dense() * v).norm(), 1e-12);
  }
}

TEST(Pauli, RestrictAndEmbed) {
  auto p = PauliString::parse("-XYZI");
  auto r = p.restricted({2, 0});
  EXPECT_EQ(r.str(), "+ZX");
  EXPECT_EQ(r.embedded(5, {4, 1}).str(), "+IXIIZ");
}

TEST(Gf2, SolveAndNullspace) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const int vars = 1 + t % 12, eqs = 1 + (t * 7) % 10;
    std::vector<Bits> rows(eqs, Bits(bit_words(vars), 0));
    Bits truth(bit_words(vars), 0);
    for (int c = 0; c < vars; ++c) set_bit(truth, c, rng() & 1);
    std::vector<int> rhs;
    for (auto& r : rows) {
      int s = 0;
      for (int c = 0; c < vars; ++c) {
        if (rng() & 1) {
          set_bit(r, c, true);
          s ^= get_bit(truth, c);
        }
      }
      rhs.push_back(s);
    }
    auto sol = gf2_solve(rows, rhs, vars);
    ASSERT_TRUE(sol);
    auto check = [&](const Bits& v, bool homogeneous) {
      for (int e = 0; e < eqs; ++e) {
        int s = 0;
        for (int c = 0; c < vars; ++c) s ^= get_bit(rows[e], c) && get_bit(v, c);
        EXPECT_EQ(s, homogeneous ? 0 : rhs[e]);
      }
    };
    check(sol->particular, false);
    for (const auto& k : sol->kernel) check(k, true);
  }
  // x0 = 0 and x0 = 1
  std::vector<Bits> rows = {Bits{1}, Bits{1}};
  EXPECT_FALSE(gf2_solve(rows, {0, 1}, 1));
  auto ns = gf2_nullspace({Bits{1}, Bits{2}, Bits{3}}, 2);
  ASSERT_EQ(ns.size(), 1u);
  EXPECT_EQ(ns[0], (std::vector<int>{0, 1, 2}));
}

TEST(StabilizerGroup, MembershipMatchesEnumeration) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + t % 4;
    // Random stabilizer group: conjugate signed Z's by a random Clifford.
    auto c = random_clifford(n, rng);
    std::vector<PauliString> gens;
    const int k = 1 + t % n;
    for (int q = 0; q < k; ++q) {
      auto z = PauliString::single(n, q, 'Z');
      if (rng() & 1) z.set_sign(-1);
      gens.push_back(c.conjugate(z));
    }
    StabilizerGroup g(n);
    for (const auto& s : gens) EXPECT_TRUE(g.add(s));
    EXPECT_FALSE(g.add(gens[0] * gens.back()));
    auto elems = enumerate_group(gens, n);
    for (int s = 0; s < 60; ++s) {
      auto p = random_pauli(n, rng, false);
      const bool plus = elems.count(p.str()) > 0;
      p.set_sign(-1);
      const bool minus = elems.count(p.str()) > 0;
      p.set_sign(1);
      EXPECT_EQ(g.sign_of(p), plus ? 1 : (minus ? -1 : 0));
    }
  }
}

TEST(StabilizerGroup, RejectsConflicts) {
  StabilizerGroup g(2);
  g.add(PauliString::parse("ZZ"));
  EXPECT_THROW(g.add(PauliString::parse("-ZZ")), std::invalid_argument);
  EXPECT_THROW(g.add(PauliString::parse("XI")), std::invalid_argument);
  EXPECT_FALSE(g.add(PauliString::parse("ZZ")));
  EXPECT_EQ(g.sign_of(PauliString::parse("-ZZ")), -1);
}

TEST(Symplectic, CenterMatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 60; ++t) {
    const int n = 1 + t % 4;
    std::vector<PauliString> gens;
    for (int k = 0; k < 1 + t % 4; ++k) gens.push_back(random_pauli(n, rng, false));
    // Count span elements commuting with every generator.
    std::set<std::string> span, central;
    for (int mask = 0; mask < (1 << gens.size()); ++mask) {
      PauliString p(n);
      for (std::size_t i = 0; i < gens.size(); ++i) {
        if (mask >> i & 1) p *= gens[i];
      }
      p.set_phase(0);
      span.insert(p.str());
      bool ok = true;
      for (const auto& g : gens) ok = ok && p.commutes(g);
      if (ok) central.insert(p.str());
    }
    auto split = symplectic_split(gens, n);
    EXPECT_EQ(std::size_t{1} << split.isotropic.size(), central.size());
    EXPECT_EQ(std::size_t{1} << (split.isotropic.size() + 2 * split.pairs.size()), span.size());
    for (const auto& [a, b] : split.pairs) EXPECT_FALSE(a.commutes(b));
  }
}

TEST(Symplectic, CompletionIsSymplecticBasis) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 40; ++t) {
    const int n = 1 + t % 6;
    std::vector<PauliString> gens;
    for (int k = 0; k < t % 5; ++k) gens.push_back(random_pauli(n, rng, false));
    auto split = symplectic_split(gens, n);
    auto basis = complete_symplectic_basis(split.pairs, split.isotropic, n);
    ASSERT_EQ(static_cast<int>(basis.size()), n);
    for (std::size_t k = 0; k < split.isotropic.size(); ++k) {
      EXPECT_TRUE(basis[split.pairs.size() + k].second.same_letters(split.isotropic[k]));
    }
    std::vector<PauliString> xs, zs;
    for (auto& [a, b] : basis) {
      xs.push_back(a);
      zs.push_back(b);
    }
    EXPECT_NO_THROW(Clifford::from_images(xs, zs));
  }
}

TEST(Clifford, ConjugationMatchesDense) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 40; ++t) {
    const int n = 1 + t % 4;
    auto c = random_clifford(n, rng);
    ASSERT_TRUE(c.valid());
    const Eigen::MatrixXcd U = c.dense();
    EXPECT_LT((U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols())).norm(), 1e-10);
    for (int s = 0; s < 5; ++s) {
      auto p = random_pauli(n, rng);
      EXPECT_LT((U * p.dense() * U.adjoint() - c.conjugate(p).dense()).norm(), 1e-9);
    }
  }
}

TEST(Clifford, InverseAndBasisMap) {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 6;
    auto c = random_clifford(n, rng);
    EXPECT_TRUE(c.then(c.inverse()).is_identity());
    EXPECT_TRUE(c.inverse().then(c).is_identity());
  }
  // Hadamard then phase: X -> Z -> Z, Z -> X -> Y.
  auto hs = Clifford::hadamard(1, 0).then(Clifford::phase_gate(1, 0));
  EXPECT_EQ(hs.x_image(0).str(), "+Z");
  EXPECT_EQ(hs.z_image(0).str(), "+Y");
  EXPECT_THROW(Clifford::from_images({PauliString::parse("X")}, {PauliString::parse("X")}), std::invalid_argument);
}

TEST(Clifford, StatePreparation) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 5;
    auto c = random_clifford(n, rng);
    std::vector<PauliString> stab;
    for (int q = 0; q < n; ++q) {
      auto z = PauliString::single(n, q, 'Z');
      if (rng() & 1) z.set_sign(-1);
      stab.push_back(c.conjugate(z));
    }
    auto prep = state_preparation(stab, n);
    Eigen::VectorXcd psi = prep.dense().col(0);
    for (const auto& s : stab) EXPECT_LT((s.apply(psi) - psi).norm(), 1e-9);
  }
  auto full = complete_stabilizers({PauliString::parse("XX")}, 2);
  ASSERT_EQ(full.size(), 2u);
  EXPECT_TRUE(full[1].commutes(full[0]));
}
