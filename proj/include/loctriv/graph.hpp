#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace loctriv {

using Edge = std::pair<int, int>;

// Undirected simple graph with sorted adjacency lists. A negative degree
// bound means "no bound"; it is then reported as the realised max degree.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n, int degree_bound = -1);

  int vertex_count() const { return static_cast<int>(adj_.size()); }
  int degree_bound() const;
  void set_degree_bound(int d) { degree_bound_ = d; }

  // Returns false if the edge already exists. Throws on self-loops,
  // out-of-range endpoints or a degree-bound violation.
  bool add_edge(int u, int v);
  bool has_edge(int u, int v) const;
  void remove_edge(int u, int v);

  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  int max_degree() const;
  std::size_t edge_count() const { return edge_count_; }
  std::vector<Edge> edges() const;  // (u<v), lexicographic

  bool operator==(const Graph& o) const { return adj_ == o.adj_; }

 private:
  std::vector<std::vector<int>> adj_;
  int degree_bound_ = -1;
  std::size_t edge_count_ = 0;
};

Graph make_graph(int n, const std::vector<Edge>& edges, int degree_bound = -1);
Graph cycle_graph(int n);
Graph path_graph(int n);
Graph complete_graph(int n);
Graph star_graph(int leaves);
// Complete binary tree with levels 0..depth (2^(depth+1)-1 vertices), heap order.
Graph binary_tree(int depth);

// BFS distances from src; -1 for unreachable. limit >= 0 stops expansion there.
std::vector<int> bfs_distances(const Graph& g, int src, int limit = -1);
std::vector<std::vector<int>> all_pairs_distances(const Graph& g);
std::vector<int> connected_components(const Graph& g, int* count = nullptr);
Graph induced_subgraph(const Graph& g, const std::vector<int>& keep,
                       std::vector<int>* old_to_new = nullptr);

// Shortest cycle length; nullopt for forests.
std::optional<int> girth(const Graph& g);
// Edges of a shortest cycle through the lexicographically smallest possible
// edge; empty for forests.
std::vector<int> shortest_cycle(const Graph& g);

Graph power(const Graph& g, int R);

struct EnsembleParams {
  int n = 0;
  int d = 4;
  int r = 1;
  std::uint64_t seed = 0;
  void validate() const;
};

struct EnsembleSample {
  Graph e0;
  Graph e;
  int removed_loop_vertices = 0;
  int removed_degree_edges = 0;
  std::vector<int> kept;  // e vertex -> e0 vertex
};

EnsembleSample sample_counterexample_graph(const EnsembleParams& p);
// Vertices of g lying on some cycle of length <= max_len.
std::vector<bool> vertices_on_short_cycles(const Graph& g, int max_len);

struct Clustering {
  std::vector<std::vector<int>> clusters;
  int max_cluster_size = 0;

  // Throws std::invalid_argument unless the clusters partition 0..n-1 and
  // respect max_cluster_size (0 disables the size check).
  void validate(int n) const;
  std::vector<int> assignment(int n) const;
  static Clustering singletons(int n);
  static Clustering from_assignment(const std::vector<int>& label);
};

Graph coarse_grain(const Graph& g, const Clustering& c);

// Clusters of binary_tree(depth)^2 whose coarse graph is a tree: the root
// with its children, then for every vertex p on an odd level the children
// and grandchildren of p.
Clustering binary_tree_square_clustering(int depth);

std::vector<std::vector<Edge>> edge_color(const Graph& g);

long long count_triangles(const Graph& g);
std::vector<std::array<int, 3>> list_triangles(const Graph& g);

struct ClusteringSearchResult {
  bool success = false;
  Clustering best;
  long long residual_triangles = 0;
  int restarts_used = 0;
};

// Greedy construction with randomized restarts followed by local search.
// budget counts restarts.
ClusteringSearchResult search_triangle_free_clustering(const Graph& g, int maxC, int budget,
                                                       std::uint64_t seed, int jobs = 1);

}  // namespace loctriv
