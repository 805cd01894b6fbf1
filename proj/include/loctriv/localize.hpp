#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "loctriv/complex.hpp"
#include "loctriv/graph.hpp"

namespace loctriv {

// Simplicial encoding of f: K_2 -> K_1. Each source 1-cell (u<v) maps to a
// walk in the target from f(u) to f(v); a walk of one vertex collapses the
// 1-cell. A 2-cell maps onto the union of its boundary walks, optionally
// with its center sent to a target 0-cell.
struct LocalizationMap {
  Complex2 source;
  Graph target;
  std::vector<int> vertex_image;
  std::map<Edge, std::vector<int>> edge_path;
  std::map<Triple, int> center_image;
  int range = 0;

  // Walk oriented from f(u) to f(v).
  std::vector<int> walk(int u, int v) const;
};

struct MapMetrics {
  int l_max = 0;
  int D_1 = 0;
  int max_preimage_diameter_0cell = 0;
  int max_preimage_diameter_1cell = 0;  // closed target 1-cells
  // diam f^-1(S1) <= c_preimage (diam S1 + 1), diam f(S2) <= c_image (diam S2 + 1)
  int c_preimage = 0;
  int c_image = 0;
};

struct GoodReport {
  bool good = true;
  std::vector<std::string> violations;
  MapMetrics metrics;
};

GoodReport verify_good(const LocalizationMap& m);

struct DistortionReport {
  bool holds = true;
  int pairs_checked = 0;
  int worst_preimage_slack = 0;  // max of diam f^-1(S) - c(diam S + 1)
  int worst_image_slack = 0;
};

// Checks both distortion inequalities over every pair of target 0-cells and
// every pair of source 0-cells (pairs realise the worst case of any set).
DistortionReport check_distortion(const LocalizationMap& m, const MapMetrics& metrics);

// Source attach_triangles(g^R), target g, every long 1-cell sent to its
// geodesic in g. Requires girth(g) > 3R.
LocalizationMap collapse_high_girth_power(const Graph& g, int R);

// Splits disconnected vertex pre-images, removes unanchored bad 0-cells of
// degree 1 and 2, and anchors bad 0-cells in the lexicographically least
// 2-cell whose three boundary walks all pass through them. Throws
// std::runtime_error for an unanchored bad 0-cell of degree >= 3.
LocalizationMap normalize_map(const LocalizationMap& m);

int first_betti(const Graph& k1);

// Map sending each cluster to one target 0-cell of the coarse-grained 1-skeleton.
LocalizationMap cluster_map(const Complex2& k, const Clustering& c);

// Max pairwise source distance inside each target vertex pre-image.
std::vector<int> preimage_diameters(const LocalizationMap& m);

struct ComplexClusteringResult {
  Clustering best;
  int bad_two_cells = 0;  // 2-cells spanning three clusters
};

// Randomized greedy + local search for connected clusters of diameter <= R
// minimizing 2-cells that span three clusters.
ComplexClusteringResult search_complex_clustering(const Complex2& k, int R, int restarts, std::uint64_t seed);

using ComplexFamily = std::function<Complex2(int trial, std::mt19937_64& rng)>;

struct HyperfiniteTrial {
  int cells = 0;
  int removed = 0;
  int residual_two_cells = 0;
  bool success = false;
};

struct HyperfiniteReport {
  double epsilon = 0;
  int R = 0;
  std::uint64_t seed = 0;
  std::vector<HyperfiniteTrial> trials;
  double success_rate() const;
};

// Per trial: repeatedly search a clustering localization of range R, deleting
// the 0-cell on the most spanning 2-cells while fewer than epsilon*n are gone.
HyperfiniteReport hyperfinite_experiment(const ComplexFamily& family, double epsilon, int R, int trials,
                                         std::uint64_t seed, int restarts = 20, int jobs = 1);

Complex2 triangulated_torus(int cols, int rows);
Complex2 remove_zero_cells(const Complex2& k, const std::vector<int>& drop, std::vector<int>* old_to_new = nullptr);

}  // namespace loctriv
