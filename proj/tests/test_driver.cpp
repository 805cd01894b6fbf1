#include <gtest/gtest.h>

#include <sstream>

#include "loctriv/driver.hpp"
#include "loctriv/graph.hpp"
#include "loctriv/io.hpp"

using namespace loctriv;

namespace {

std::string temp(const std::string& name) { return testing::TempDir() + "loctriv_driver_" + name; }

int run_capture(const ExperimentConfig& c, std::string* out, std::string* err = nullptr) {
  std::ostringstream o, e;
  int rc = run(c, o, e);
  *out = o.str();
  if (err) *err = e.str();
  return rc;
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);)
    if (l == line) return true;
  return false;
}

}  // namespace

TEST(Driver, GirthOfFiveCycle) {
  write_text_file(temp("c5.graph"), write_graph(cycle_graph(5)));
  ExperimentConfig c;
  c.command = "girth";
  c.input = temp("c5.graph");
  std::string out;
  EXPECT_EQ(run_capture(c, &out), 0);
  EXPECT_TRUE(has_line(out, "5"));
  EXPECT_TRUE(has_line(out, "girth=5"));
  EXPECT_TRUE(has_line(out, "seed=1"));
  EXPECT_NE(out.find("tol_eigen="), std::string::npos);
}

TEST(Driver, RingStabilizerSolveWritesZeroEnergyCircuit) {
  ExperimentConfig gen;
  gen.command = "instance";
  gen.instance = "ring-zz";
  gen.n = 16;
  gen.output = temp("ring.ham");
  std::string out;
  ASSERT_EQ(run_capture(gen, &out), 0);

  ExperimentConfig c;
  c.command = "stab-solve";
  c.input = gen.output;
  c.output = temp("ring.circ");
  ASSERT_EQ(run_capture(c, &out), 0);
  EXPECT_TRUE(has_line(out, "energy=0"));
  EXPECT_TRUE(has_line(out, "energy_method=tableau"));

  ExperimentConfig v;
  v.command = "verify";
  v.input = gen.output;
  v.circuit = c.output;
  ASSERT_EQ(run_capture(v, &out), 0);
  EXPECT_TRUE(has_line(out, "statevector_energy=0"));
}

TEST(Driver, RoundtripOfWrittenFiles) {
  write_text_file(temp("p.graph"), write_graph(path_graph(4)));
  ExperimentConfig c;
  c.command = "roundtrip";
  c.input = temp("p.graph");
  std::string out;
  EXPECT_EQ(run_capture(c, &out), 0);
  EXPECT_TRUE(has_line(out, "roundtrip=ok"));
}

TEST(Driver, ErrorsReturnTwo) {
  ExperimentConfig c;
  c.command = "no-such-command";
  std::string out, err;
  EXPECT_EQ(run_capture(c, &out, &err), 2);
  EXPECT_NE(err.find("unknown command"), std::string::npos);

  c.command = "girth";
  EXPECT_EQ(run_capture(c, &out, &err), 2);
  EXPECT_NE(err.find("--input"), std::string::npos);

  write_text_file(temp("bad.graph"), "3 2\n0 1\n0 7\n");
  c.input = temp("bad.graph");
  EXPECT_EQ(run_capture(c, &out, &err), 2);
  EXPECT_NE(err.find("line 3"), std::string::npos);
}

TEST(Driver, QutritCutIsUnsupported) {
  CommutingHamiltonian h({3, 3, 3});
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(9, 9);
  for (int j = 0; j < 3; ++j) m(4 * j, 4 * j) = 1;
  for (int i = 0; i < 3; ++i) h.add(Term::dense({i, (i + 1) % 3}, m));
  write_text_file(temp("q.ham"), write_hamiltonian(h));
  ExperimentConfig c;
  c.command = "stab-solve";
  c.input = temp("q.ham");
  std::string out, err;
  EXPECT_EQ(run_capture(c, &out, &err), 2);
  EXPECT_NE(err.find("counterexample regime"), std::string::npos);
}

TEST(Driver, EnsembleReportsEverySeed) {
  auto rep = ensemble_experiment(60, 4, 1, 3, 4, 2, 7);
  ASSERT_EQ(rep.trials.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(rep.trials[k].seed, 7u + k);
    EXPECT_EQ(rep.trials[k].clustered, rep.trials[k].residual == 0);
  }
  EXPECT_LE(rep.max_removed_fraction(60), 1.0);
}

TEST(Driver, CommandNamesAreListed) {
  const auto& names = command_names();
  for (const char* n : {"girth", "ensemble", "stab-solve", "tree-reduce", "verify", "roundtrip"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
}
