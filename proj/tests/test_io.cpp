#include <gtest/gtest.h>

#include "loctriv/io.hpp"
#include "loctriv/synth.hpp"
#include "loctriv/verify.hpp"

using namespace loctriv;

TEST(Io, GraphRoundTrip) {
  Graph g = cycle_graph(5);
  std::string text = write_graph(g);
  EXPECT_EQ(text.substr(0, text.find('\n')), "5 2");
  Graph back = read_graph(text);
  EXPECT_EQ(back.edges(), g.edges());
  EXPECT_EQ(*girth(back), 5);
  EXPECT_TRUE(roundtrip_text(text, FileKind::graph));
  EXPECT_EQ(detect_kind(text), FileKind::graph);
}

TEST(Io, GraphDiagnostics) {
  try {
    read_graph("3 2\n0 1\n1 x\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 3);
  }
  try {
    read_graph("# comment\n3 2\n0 5\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Io, ClusteringRoundTrip) {
  auto c = Clustering::from_assignment({0, 0, 1, 2, 1});
  auto back = read_clustering(write_clustering(c));
  EXPECT_EQ(back.assignment(5), c.assignment(5));
  EXPECT_THROW(read_clustering("0 1\n1 2\n"), ParseError);
}

TEST(Io, ComplexAndMapRoundTrip) {
  auto m = collapse_high_girth_power(cycle_graph(8), 2);
  std::string ks = write_complex(m.source);
  EXPECT_EQ(read_complex(ks), m.source);
  EXPECT_TRUE(roundtrip_text(ks, FileKind::complex));
  std::string ms = write_map(m);
  EXPECT_NE(ms.find("VIMG 0\xE2\x86\x92"), std::string::npos);
  auto back = read_map(ms);
  EXPECT_EQ(back.vertex_image, m.vertex_image);
  EXPECT_EQ(back.edge_path, m.edge_path);
  EXPECT_EQ(back.center_image, m.center_image);
  EXPECT_EQ(back.target.edges(), m.target.edges());
  EXPECT_TRUE(roundtrip_text(ms, FileKind::map));
  EXPECT_EQ(detect_kind(ms), FileKind::map);
}

TEST(Io, MapAcceptsAsciiArrow) {
  const char* text =
      "SOURCE\n0CELLS\n0 1\n1CELLS\n0 1\n2CELLS\nTARGET\n1 -1\nVIMG 0 -> 0\nVIMG 1->0\nEPATH (0,1): 0\nRANGE 0\n";
  auto m = read_map(text);
  EXPECT_EQ(m.vertex_image, (std::vector<int>{0, 0}));
  EXPECT_EQ(m.edge_path.at({0, 1}), std::vector<int>{0});
}

TEST(Io, PauliSignConvention) {
  // "PAULI +,ZZ" is (1 + ZZ)/2, zero energy where ZZ = -1.
  auto h = read_hamiltonian("SITES 2 2\nTERM 0 1\nPAULI +,ZZ\n");
  ASSERT_TRUE(h.terms[0].is_stabilizer());
  EXPECT_EQ(h.terms[0].stabilizer->str(), "-ZZ");
  Eigen::MatrixXcd m = h.terms[0].dense_matrix();
  EXPECT_NEAR(m(0, 0).real(), 1, 1e-15);
  EXPECT_NEAR(m(1, 1).real(), 0, 1e-15);
  EXPECT_NE(write_hamiltonian(h).find("PAULI +,ZZ"), std::string::npos);
}

TEST(Io, HamiltonianRoundTripBitExact) {
  CommutingHamiltonian h({2, 2, 3});
  h.add(Term::stabilizer_projector({0, 1}, PauliString::parse("-XZ")));
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d(0, 0) = 1.0 / 3.0;
  d(1, 2) = {0.1, 0.2};
  d(2, 1) = {0.1, -0.2};
  h.add(Term::dense({2}, d));
  h.add(Term::from_pauli_sum({0, 1}, {{0.5, PauliString::parse("+ZI")}, {0.25, PauliString::parse("+ZZ")}}));
  std::string text = write_hamiltonian(h);
  auto back = read_hamiltonian(text);
  ASSERT_EQ(back.terms.size(), 3u);
  EXPECT_EQ(back.terms[1].matrix, d);
  EXPECT_EQ(back.terms[2].pauli_sum.size(), 2u);
  EXPECT_EQ(write_hamiltonian(back), text);
  EXPECT_TRUE(roundtrip_text(text, FileKind::hamiltonian));
}

TEST(Io, HamiltonianDiagnostics) {
  try {
    read_hamiltonian("SITES 2 2\nTERM 0 1\nPAULI +,ZQ\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 9);
  }
  try {
    read_hamiltonian("SITES 2\nTERM 0\nDENSE\n1 0 0 0\n0 0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5);
    EXPECT_EQ(e.column(), 4);
  }
  EXPECT_THROW(read_hamiltonian("SITES 2\nTERM 3\nPAULI +,Z\n"), ParseError);
}

TEST(Io, CircuitRoundTrip) {
  // Clifford gates from the cut pipeline and dense gates from tree reduction.
  auto h = CommutingHamiltonian::qubits(7);
  for (int i = 0; i < 7; ++i) h.add(Term::stabilizer_projector({(i + 6) % 7, i, (i + 1) % 7}, PauliString::parse("ZXZ")));
  auto r = stabilizer_cut_solve(h, collapse_high_girth_power(cycle_graph(7), 2));
  std::string text = write_circuit(r.circuit);
  EXPECT_NE(text.find("CLIFFORD"), std::string::npos);
  auto back = read_circuit(text);
  EXPECT_EQ(write_circuit(back), text);
  EXPECT_EQ(tableau_energy(h, back).energy, 0.0);

  auto planted = planted_two_body(path_graph(3), 3, 27, 9);
  auto c = solve_two_body(planted).circuit;
  std::string dense = write_circuit(c);
  auto cb = read_circuit(dense);
  EXPECT_TRUE(roundtrip_text(dense, FileKind::circuit));
  EXPECT_NEAR(statevector_energy(planted, cb).energy, statevector_energy(planted, c).energy, 1e-15);
}

TEST(Io, CircuitDiagnostics) {
  EXPECT_THROW(read_circuit("REGISTERS 1\nREG 0 0 2 1 0 1 0\n"), ParseError);  // not normalised
  try {
    read_circuit("REGISTERS 1\nREG 0 0 2 1 0 0 0\nROUND 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}
