#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "loctriv/graph.hpp"

namespace loctriv {

struct ExperimentConfig {
  std::string command;
  std::string input, output;
  std::string map, circuit, sets;  // auxiliary input/output paths
  std::string kind = "auto";       // file kind for roundtrip
  std::string instance;            // generator for the instance command
  std::vector<int> X;              // vertex set for shields
  std::uint64_t seed = 1;
  int n = 0, d = 4, r = 1, R = 1, l = 0, maxC = 4, depth = 1, trials = 1;
  int L = 0, hole = 0, D = 1, restarts = 20;
  double epsilon = 0;
  int jobs = 1;
};

// Names accepted by run().
const std::vector<std::string>& command_names();

// Throws std::invalid_argument naming the offending parameter.
void validate_config(const ExperimentConfig& c);

// Runs one command; the report (table, then key=value lines with the seed,
// the parameters and the tolerances) goes to out. Returns the exit status:
// 0 on success, 1 when a checked property fails, 2 on errors (printed to err).
int run(const ExperimentConfig& c, std::ostream& out, std::ostream& err);

struct EnsembleTrial {
  std::uint64_t seed = 0;
  int vertices = 0;             // after deletion
  int removed_loop_vertices = 0;
  long long triangles = 0;      // in E^2
  long long residual = 0;       // best clustering's coarse triangles
  bool clustered = false;       // triangle-free clustering found
};

struct EnsembleReport {
  std::vector<EnsembleTrial> trials;
  // Fraction of trials whose search failed with residual >= 0.01 n.
  double failure_fraction(int n) const;
  double max_removed_fraction(int n) const;
};

// Samples the ensemble for seeds seed, seed+1, ... and searches a clustering
// of E^2 with clusters of size <= maxC.
EnsembleReport ensemble_experiment(int n, int d, int r, int trials, int maxC, int restarts, std::uint64_t seed,
                                   int jobs = 1);

}  // namespace loctriv
