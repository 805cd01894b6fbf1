#include "loctriv/graph.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "loctriv/random.hpp"

namespace loctriv {

Graph::Graph(int n, int degree_bound) : adj_(n), degree_bound_(degree_bound) {
  if (n < 0) throw std::invalid_argument("negative vertex count");
}

int Graph::degree_bound() const { return degree_bound_ >= 0 ? degree_bound_ : max_degree(); }

bool Graph::add_edge(int u, int v) {
  const int n = vertex_count();
  if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
  if (u == v) throw std::invalid_argument("self-loop");
  auto& au = adj_[u];
  auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it != au.end() && *it == v) return false;
  if (degree_bound_ >= 0 &&
      (degree(u) + 1 > degree_bound_ || degree(v) + 1 > degree_bound_))
    throw std::invalid_argument("degree bound exceeded");
  au.insert(it, v);
  auto& av = adj_[v];
  av.insert(std::lower_bound(av.begin(), av.end(), u), u);
  ++edge_count_;
  return true;
}

bool Graph::has_edge(int u, int v) const {
  if (u < 0 || v < 0 || u >= vertex_count() || v >= vertex_count()) return false;
  return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

void Graph::remove_edge(int u, int v) {
  if (!has_edge(u, v)) return;
  adj_[u].erase(std::lower_bound(adj_[u].begin(), adj_[u].end(), v));
  adj_[v].erase(std::lower_bound(adj_[v].begin(), adj_[v].end(), u));
  --edge_count_;
}

int Graph::max_degree() const {
  int m = 0;
  for (const auto& a : adj_) m = std::max(m, static_cast<int>(a.size()));
  return m;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (int u = 0; u < vertex_count(); ++u)
    for (int v : adj_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

Graph make_graph(int n, const std::vector<Edge>& edges, int degree_bound) {
  Graph g(n, degree_bound);
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

Graph cycle_graph(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

Graph path_graph(int n) {
  Graph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

Graph complete_graph(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

Graph star_graph(int leaves) {
  Graph g(leaves + 1);
  for (int i = 1; i <= leaves; ++i) g.add_edge(0, i);
  return g;
}

Graph binary_tree(int depth) {
  int n = (1 << (depth + 1)) - 1;
  Graph g(n);
  for (int v = 1; v < n; ++v) g.add_edge((v - 1) / 2, v);
  return g;
}

std::vector<int> bfs_distances(const Graph& g, int src, int limit) {
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<int> q{src};
  dist[src] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    if (limit >= 0 && dist[u] >= limit) continue;
    for (int w : g.neighbors(u))
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push_back(w);
      }
  }
  return dist;
}

std::vector<std::vector<int>> all_pairs_distances(const Graph& g) {
  std::vector<std::vector<int>> d(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) d[v] = bfs_distances(g, v);
  return d;
}

std::vector<int> connected_components(const Graph& g, int* count) {
  std::vector<int> comp(g.vertex_count(), -1);
  int c = 0;
  for (int s = 0; s < g.vertex_count(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = c;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : g.neighbors(u))
        if (comp[w] < 0) {
          comp[w] = c;
          stack.push_back(w);
        }
    }
    ++c;
  }
  if (count) *count = c;
  return comp;
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& keep, std::vector<int>* old_to_new) {
  std::vector<int> map(g.vertex_count(), -1);
  for (int i = 0; i < static_cast<int>(keep.size()); ++i) map[keep[i]] = i;
  Graph h(static_cast<int>(keep.size()));
  for (auto [u, v] : g.edges())
    if (map[u] >= 0 && map[v] >= 0) h.add_edge(map[u], map[v]);
  if (old_to_new) *old_to_new = map;
  return h;
}

std::optional<int> girth(const Graph& g) {
  const int n = g.vertex_count();
  int best = -1;
  std::vector<int> dist(n), parent(n);
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    parent[s] = -1;
    std::deque<int> q{s};
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      if (best > 0 && 2 * dist[u] + 1 >= best) break;
      for (int w : g.neighbors(u)) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          parent[w] = u;
          q.push_back(w);
        } else if (w != parent[u]) {
          int len = dist[u] + dist[w] + 1;
          if (best < 0 || len < best) best = len;
        }
      }
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

namespace {

// Shortest u-v path avoiding the edge (u,v); returns vertex sequence u..v or
// empty if longer than max_len edges or absent.
std::vector<int> path_avoiding_edge(const Graph& g, int u, int v, int max_len) {
  std::vector<int> dist(g.vertex_count(), -1), parent(g.vertex_count(), -1);
  std::deque<int> q{u};
  dist[u] = 0;
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    if (max_len >= 0 && dist[x] >= max_len) continue;
    for (int w : g.neighbors(x)) {
      if (x == u && w == v) continue;
      if (dist[w] >= 0) continue;
      dist[w] = dist[x] + 1;
      parent[w] = x;
      if (w == v) {
        std::vector<int> path{v};
        while (path.back() != u) path.push_back(parent[path.back()]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      q.push_back(w);
    }
  }
  return {};
}

}  // namespace

std::vector<int> shortest_cycle(const Graph& g) {
  auto gr = girth(g);
  if (!gr) return {};
  for (auto [u, v] : g.edges()) {
    auto p = path_avoiding_edge(g, u, v, *gr - 1);
    if (!p.empty() && static_cast<int>(p.size()) == *gr) return p;
  }
  return {};
}

std::vector<bool> vertices_on_short_cycles(const Graph& g, int max_len) {
  std::vector<bool> mark(g.vertex_count(), false);
  for (auto [u, v] : g.edges()) {
    if (mark[u] && mark[v]) continue;
    auto p = path_avoiding_edge(g, u, v, max_len - 1);
    if (!p.empty()) mark[u] = mark[v] = true;
  }
  return mark;
}

Graph power(const Graph& g, int R) {
  if (R < 1) throw std::invalid_argument("power: R must be >= 1");
  Graph h(g.vertex_count());
  for (int s = 0; s < g.vertex_count(); ++s) {
    auto d = bfs_distances(g, s, R);
    for (int t = s + 1; t < g.vertex_count(); ++t)
      if (d[t] > 0 && d[t] <= R) h.add_edge(s, t);
  }
  return h;
}

void EnsembleParams::validate() const {
  if (n <= 0) throw std::invalid_argument("ensemble: n must be positive");
  if (d < 4 || d % 4 != 0) throw std::invalid_argument("ensemble: d must be a positive multiple of 4");
  if (r < 1) throw std::invalid_argument("ensemble: r must be >= 1");
}

EnsembleSample sample_counterexample_graph(const EnsembleParams& p) {
  p.validate();
  Rng rng(p.seed);
  EnsembleSample out;
  out.e0 = Graph(p.n);
  if (p.n > 1) {
    std::uniform_int_distribution<int> pick(0, p.n - 2);
    for (int i = 0; i < p.n; ++i)
      for (int j = 0; j < p.d / 4; ++j) {
        int k = pick(rng);
        if (k >= i) ++k;
        out.e0.add_edge(i, k);
      }
  }
  auto on_cycle = vertices_on_short_cycles(out.e0, 2 * p.r);
  std::vector<bool> drop(p.n, false);
  for (int v = 0; v < p.n; ++v)
    if (on_cycle[v]) {
      drop[v] = true;
      ++out.removed_loop_vertices;
    }
  std::vector<bool> high(p.n, false);
  for (int v = 0; v < p.n; ++v)
    if (!drop[v] && out.e0.degree(v) > p.d) high[v] = true;
  for (auto [u, v] : out.e0.edges())
    if (!drop[u] && !drop[v] && (high[u] || high[v])) ++out.removed_degree_edges;
  for (int v = 0; v < p.n; ++v)
    if (!drop[v] && !high[v]) out.kept.push_back(v);
  out.e = induced_subgraph(out.e0, out.kept);
  out.e.set_degree_bound(p.d);
  return out;
}

void Clustering::validate(int n) const {
  std::vector<int> seen(n, 0);
  for (const auto& c : clusters) {
    if (c.empty()) throw std::invalid_argument("clustering: empty cluster");
    if (max_cluster_size > 0 && static_cast<int>(c.size()) > max_cluster_size)
      throw std::invalid_argument("clustering: cluster exceeds max size");
    for (int v : c) {
      if (v < 0 || v >= n) throw std::invalid_argument("clustering: vertex out of range");
      if (seen[v]++) throw std::invalid_argument("clustering: overlapping clusters");
    }
  }
  for (int v = 0; v < n; ++v)
    if (!seen[v]) throw std::invalid_argument("clustering: vertex " + std::to_string(v) + " not covered");
}

std::vector<int> Clustering::assignment(int n) const {
  validate(n);
  std::vector<int> a(n);
  for (int c = 0; c < static_cast<int>(clusters.size()); ++c)
    for (int v : clusters[c]) a[v] = c;
  return a;
}

Clustering Clustering::singletons(int n) {
  Clustering c;
  c.max_cluster_size = 1;
  for (int v = 0; v < n; ++v) c.clusters.push_back({v});
  return c;
}

Clustering Clustering::from_assignment(const std::vector<int>& label) {
  Clustering c;
  std::vector<int> remap;
  for (int v = 0; v < static_cast<int>(label.size()); ++v) {
    int l = label[v];
    if (l >= static_cast<int>(remap.size())) remap.resize(l + 1, -1);
    if (remap[l] < 0) {
      remap[l] = static_cast<int>(c.clusters.size());
      c.clusters.emplace_back();
    }
    c.clusters[remap[l]].push_back(v);
  }
  for (const auto& cl : c.clusters) c.max_cluster_size = std::max(c.max_cluster_size, static_cast<int>(cl.size()));
  return c;
}

Graph coarse_grain(const Graph& g, const Clustering& c) {
  auto a = c.assignment(g.vertex_count());
  Graph h(static_cast<int>(c.clusters.size()));
  for (auto [u, v] : g.edges())
    if (a[u] != a[v]) h.add_edge(a[u], a[v]);
  return h;
}

Clustering binary_tree_square_clustering(int depth) {
  const int n = (1 << (depth + 1)) - 1;
  auto level = [](int v) {
    int l = 0;
    for (int x = v + 1; x > 1; x >>= 1) ++l;
    return l;
  };
  Clustering c;
  auto add_below = [&](std::vector<int>& cl, int v) {
    for (int ch : {2 * v + 1, 2 * v + 2})
      if (ch < n) cl.push_back(ch);
  };
  std::vector<int> top{0};
  add_below(top, 0);
  c.clusters.push_back(top);
  for (int p = 0; p < n; ++p) {
    if (level(p) % 2 != 1) continue;
    std::vector<int> cl;
    add_below(cl, p);
    for (std::size_t i = 0, m = cl.size(); i < m; ++i) add_below(cl, cl[i]);
    if (!cl.empty()) c.clusters.push_back(cl);
  }
  for (const auto& cl : c.clusters) c.max_cluster_size = std::max(c.max_cluster_size, static_cast<int>(cl.size()));
  return c;
}

std::vector<std::vector<Edge>> edge_color(const Graph& g) {
  std::vector<std::vector<Edge>> sets;
  std::vector<std::vector<char>> used(g.vertex_count());
  for (auto [u, v] : g.edges()) {
    int c = 0;
    auto busy = [&](int x) { return c < static_cast<int>(used[x].size()) && used[x][c]; };
    while (busy(u) || busy(v)) ++c;
    if (c >= static_cast<int>(sets.size())) sets.resize(c + 1);
    sets[c].emplace_back(u, v);
    for (int x : {u, v}) {
      if (static_cast<int>(used[x].size()) <= c) used[x].resize(c + 1, 0);
      used[x][c] = 1;
    }
  }
  return sets;
}

long long count_triangles(const Graph& g) {
  long long t = 0;
  for (int u = 0; u < g.vertex_count(); ++u)
    for (int v : g.neighbors(u)) {
      if (v <= u) continue;
      const auto& a = g.neighbors(u);
      const auto& b = g.neighbors(v);
      auto ia = std::upper_bound(a.begin(), a.end(), v);
      auto ib = std::upper_bound(b.begin(), b.end(), v);
      while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else { ++t; ++ia; ++ib; }
      }
    }
  return t;
}

std::vector<std::array<int, 3>> list_triangles(const Graph& g) {
  std::vector<std::array<int, 3>> out;
  for (int u = 0; u < g.vertex_count(); ++u)
    for (int v : g.neighbors(u)) {
      if (v <= u) continue;
      for (int w : g.neighbors(v))
        if (w > v && g.has_edge(u, w)) out.push_back({u, v, w});
    }
  return out;
}

namespace {

// Cluster-level state for the local search: edge multiplicities between
// clusters and bitset adjacency of the coarse graph.
class CoarseState {
 public:
  CoarseState(const Graph& g, std::vector<int> label, int maxC)
      : g_(g), n_(g.vertex_count()), words_((n_ + 63) / 64), maxC_(maxC), label_(std::move(label)),
        size_(n_, 0), mult_(static_cast<std::size_t>(n_) * n_, 0), bits_(static_cast<std::size_t>(n_) * words_, 0) {
    for (int v = 0; v < n_; ++v) ++size_[label_[v]];
    for (auto [u, v] : g_.edges())
      if (label_[u] != label_[v]) bump(label_[u], label_[v], +1);
  }

  long long total_triangles() const {
    long long t = 0;
    for (int x = 0; x < n_; ++x) t += tri(x);
    return t / 3;
  }

  // Triangles of the coarse graph containing a or b.
  long long local(int a, int b) const {
    long long t = tri(a) + tri(b);
    if (adjacent(a, b)) t -= common(a, b);
    return t;
  }

  void move(int v, int to) {
    int from = label_[v];
    for (int w : g_.neighbors(v)) {
      int c = label_[w];
      if (c != from) bump(from, c, -1);
      if (c != to) bump(to, c, +1);
    }
    --size_[from];
    ++size_[to];
    label_[v] = to;
  }

  // Change in total triangle count if v moved to cluster `to`.
  long long delta(int v, int to) {
    int from = label_[v];
    long long before = local(from, to);
    move(v, to);
    long long after = local(from, to);
    move(v, from);
    return after - before;
  }

  int free_cluster() const {
    for (int c = 0; c < n_; ++c)
      if (size_[c] == 0) return c;
    return -1;
  }

  const std::vector<int>& label() const { return label_; }
  int size(int c) const { return size_[c]; }
  int maxC() const { return maxC_; }

 private:
  bool adjacent(int a, int b) const { return (bits_[a * words_ + b / 64] >> (b % 64)) & 1ULL; }
  long long common(int a, int b) const {
    long long s = 0;
    for (int w = 0; w < words_; ++w) s += std::popcount(bits_[a * words_ + w] & bits_[b * words_ + w]);
    return s;
  }
  long long tri(int x) const {
    long long s = 0;
    for (int w = 0; w < words_; ++w) {
      std::uint64_t word = bits_[x * words_ + w];
      while (word) {
        int y = w * 64 + std::countr_zero(word);
        word &= word - 1;
        s += common(x, y);
      }
    }
    return s / 2;
  }
  void bump(int a, int b, int by) {
    int& m = mult_[static_cast<std::size_t>(a) * n_ + b];
    int before = m;
    m += by;
    mult_[static_cast<std::size_t>(b) * n_ + a] = m;
    if ((before == 0) != (m == 0)) {
      bits_[a * words_ + b / 64] ^= 1ULL << (b % 64);
      bits_[b * words_ + a / 64] ^= 1ULL << (a % 64);
    }
  }

  const Graph& g_;
  int n_, words_, maxC_;
  std::vector<int> label_, size_;
  std::vector<int> mult_;
  std::vector<std::uint64_t> bits_;
};

std::vector<int> greedy_clusters(const Graph& g, int maxC, Rng& rng) {
  const int n = g.vertex_count();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> label(n, -1);
  int next = 0;
  for (int s : order) {
    if (label[s] >= 0) continue;
    std::vector<int> members{s};
    label[s] = next;
    while (static_cast<int>(members.size()) < maxC) {
      int best = -1, best_score = -1;
      std::uint64_t best_tie = 0;
      for (int m : members)
        for (int w : g.neighbors(m)) {
          if (label[w] >= 0) continue;
          int score = 0;
          for (int x : g.neighbors(w))
            if (label[x] == next) ++score;
          std::uint64_t tie = rng();
          if (score > best_score || (score == best_score && tie < best_tie)) {
            best = w;
            best_score = score;
            best_tie = tie;
          }
        }
      if (best < 0) break;
      label[best] = next;
      members.push_back(best);
    }
    ++next;
  }
  return label;
}

struct Attempt {
  std::vector<int> label;
  long long triangles = 0;
};

Attempt one_restart(const Graph& g, int maxC, Rng& rng) {
  CoarseState st(g, greedy_clusters(g, maxC, rng), maxC);
  long long total = st.total_triangles();
  long long best_total = total;
  std::vector<int> best_label = st.label();
  const int n = g.vertex_count();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // First-improvement descent; sideways moves are taken at random so the
  // search can leave plateaus. Stops after a few passes without a new best.
  int stale = 0;
  for (int pass = 0; pass < 40 && total > 0 && stale < 4; ++pass) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int v : order) {
      int from = st.label()[v];
      std::vector<int> targets;
      for (int w : g.neighbors(v)) targets.push_back(st.label()[w]);
      if (st.size(from) > 1) targets.push_back(st.free_cluster());
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      std::shuffle(targets.begin(), targets.end(), rng);
      long long best = 1;
      int best_to = -1;
      for (int to : targets) {
        if (to < 0 || to == from || st.size(to) >= maxC) continue;
        long long dlt = st.delta(v, to);
        if (dlt < best) {
          best = dlt;
          best_to = to;
        }
      }
      if (best_to >= 0 && (best < 0 || (rng() & 3) == 0)) {
        st.move(v, best_to);
        total += best;
        if (total == 0) break;
      }
    }
    if (total < best_total) {
      best_total = total;
      best_label = st.label();
      stale = 0;
    } else {
      ++stale;
    }
  }
  if (total < best_total) {
    best_total = total;
    best_label = st.label();
  }
  return {best_label, best_total};
}

}  // namespace

ClusteringSearchResult search_triangle_free_clustering(const Graph& g, int maxC, int budget,
                                                       std::uint64_t seed, int jobs) {
  if (maxC < 1) throw std::invalid_argument("search: maxC must be >= 1");
  ClusteringSearchResult res;
  res.best = Clustering::singletons(g.vertex_count());
  res.residual_triangles = count_triangles(g);
  res.best.max_cluster_size = maxC;
  if (res.residual_triangles == 0 || g.vertex_count() == 0) {
    res.success = true;
    return res;
  }
  budget = std::max(budget, 1);
  const int chunk = std::max(jobs, 1);
  for (int start = 0; start < budget; start += chunk) {
    int count = std::min(chunk, budget - start);
    std::vector<Attempt> got(count);
    parallel_for(count, jobs, [&](int i) {
      Rng rng = stream_rng(seed, static_cast<std::uint64_t>(start + i));
      got[i] = one_restart(g, maxC, rng);
    });
    for (int i = 0; i < count; ++i) {
      if (got[i].triangles < res.residual_triangles) {
        res.residual_triangles = got[i].triangles;
        res.best = Clustering::from_assignment(got[i].label);
        res.best.max_cluster_size = maxC;
        res.restarts_used = start + i + 1;
      }
      if (res.residual_triangles == 0) {
        res.success = true;
        return res;
      }
    }
    res.restarts_used = start + count;
  }
  return res;
}

}  // namespace loctriv
