#pragma once

#include <array>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "loctriv/graph.hpp"

namespace loctriv {

using Triple = std::array<int, 3>;  // sorted ascending

Edge make_edge(int u, int v);
Triple make_triple(int a, int b, int c);

// Simplicial 2-complex on 0-cells 0..n-1. Adding a 2-cell adds its boundary.
class Complex2 {
 public:
  Complex2() = default;
  explicit Complex2(int n) : n_(n) {}

  int zero_cell_count() const { return n_; }
  int add_zero_cell() { return n_++; }

  bool add_one_cell(int u, int v);
  bool add_two_cell(int a, int b, int c);
  bool has_one_cell(int u, int v) const;
  bool has_two_cell(int a, int b, int c) const;

  const std::set<Edge>& one_cells() const { return one_; }
  const std::set<Triple>& two_cells() const { return two_; }

  Graph skeleton() const;
  // 2-cells having (u,v) on their boundary.
  std::vector<Triple> two_cells_on(int u, int v) const;
  // Throws std::logic_error if an invariant is broken.
  void validate() const;

  bool operator==(const Complex2& o) const { return n_ == o.n_ && one_ == o.one_ && two_ == o.two_; }

 private:
  void check(int v) const;
  int n_ = 0;
  std::set<Edge> one_;
  std::set<Triple> two_;
};

inline constexpr int kInfiniteDistance = std::numeric_limits<int>::max();

// 0-cell per site, 1-cell per co-occurring pair, 2-cell per co-occurring triple.
Complex2 interaction_complex(int site_count, const std::vector<std::vector<int>>& supports);
Complex2 attach_triangles(const Graph& g);

// Max pairwise 1-skeleton distance; kInfiniteDistance if some pair is disconnected.
int set_diameter(const Complex2& k, const std::vector<int>& cells);
int set_diameter(const std::vector<std::vector<int>>& dist, const std::vector<int>& cells);

struct Shield {
  std::vector<Edge> pairs;  // (inside, outside), sorted
  std::vector<int> interior() const;
  std::vector<int> exterior() const;
  Shield transposed() const;
  bool operator==(const Shield& o) const { return pairs == o.pairs; }
  bool operator<(const Shield& o) const { return pairs < o.pairs; }
};

std::vector<Shield> shields(const Complex2& k, const std::vector<int>& X);

struct ShieldSplit {
  std::vector<Shield> shields;
  std::vector<int> inside;                     // term indices supported in X
  std::vector<std::vector<int>> per_shield;    // crossing terms, one list per shield
  std::vector<int> outside;                    // term indices avoiding X
};

// Classifies terms by support. Throws if a crossing term has no crossing
// 1-cell in k or touches two shields.
ShieldSplit split_by_shields(const Complex2& k, const std::vector<std::vector<int>>& supports,
                             const std::vector<int>& X);

struct SetLocalizabilityReport {
  bool ok = true;
  std::vector<std::string> violations;
  Graph neighbors;  // one vertex per set; edge when some shields match up to transposition
};

SetLocalizabilityReport check_set_localizable(const Complex2& k,
                                              const std::vector<std::vector<int>>& sets, int R);

struct CoverComplex {
  Complex2 complex;
  std::vector<int> base;                 // node -> base 0-cell
  std::vector<int> path_of;              // node -> index into paths
  std::vector<std::vector<int>> paths;   // non-backtracking walks of set indices
  int depth = 0;
  int start_set = 0;

  // Cluster nodes by path; coarse-graining by it gives the tree of paths.
  Clustering path_clustering() const;
};

// Truncated cover from the Appendix construction. Rejects sets that fail
// the shield-matching condition.
CoverComplex build_cover(const Complex2& k, const std::vector<std::vector<int>>& sets, int depth,
                         int start_set = 0);

Complex2 coarse_grain_complex(const Complex2& k, const Clustering& c);

}  // namespace loctriv
