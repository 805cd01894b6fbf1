#include "loctriv/complex.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace loctriv {

Edge make_edge(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

Triple make_triple(int a, int b, int c) {
  Triple t{a, b, c};
  std::sort(t.begin(), t.end());
  return t;
}

void Complex2::check(int v) const {
  if (v < 0 || v >= n_) throw std::invalid_argument("complex: 0-cell " + std::to_string(v) + " out of range");
}

bool Complex2::add_one_cell(int u, int v) {
  check(u);
  check(v);
  if (u == v) throw std::invalid_argument("complex: degenerate 1-cell");
  return one_.insert(make_edge(u, v)).second;
}

bool Complex2::add_two_cell(int a, int b, int c) {
  Triple t = make_triple(a, b, c);
  if (t[0] == t[1] || t[1] == t[2]) throw std::invalid_argument("complex: degenerate 2-cell");
  add_one_cell(t[0], t[1]);
  add_one_cell(t[1], t[2]);
  add_one_cell(t[0], t[2]);
  return two_.insert(t).second;
}

bool Complex2::has_one_cell(int u, int v) const { return one_.count(make_edge(u, v)) > 0; }

bool Complex2::has_two_cell(int a, int b, int c) const { return two_.count(make_triple(a, b, c)) > 0; }

Graph Complex2::skeleton() const {
  Graph g(n_);
  for (auto [u, v] : one_) g.add_edge(u, v);
  return g;
}

std::vector<Triple> Complex2::two_cells_on(int u, int v) const {
  Edge e = make_edge(u, v);
  std::vector<Triple> out;
  for (const auto& t : two_) {
    bool hu = t[0] == e.first || t[1] == e.first || t[2] == e.first;
    bool hv = t[0] == e.second || t[1] == e.second || t[2] == e.second;
    if (hu && hv) out.push_back(t);
  }
  return out;
}

void Complex2::validate() const {
  for (auto [u, v] : one_)
    if (u < 0 || v >= n_ || u >= v) throw std::logic_error("complex: malformed 1-cell");
  for (const auto& t : two_) {
    if (!(t[0] < t[1] && t[1] < t[2]) || t[0] < 0 || t[2] >= n_) throw std::logic_error("complex: malformed 2-cell");
    if (!has_one_cell(t[0], t[1]) || !has_one_cell(t[1], t[2]) || !has_one_cell(t[0], t[2]))
      throw std::logic_error("complex: 2-cell boundary missing");
  }
}

Complex2 interaction_complex(int site_count, const std::vector<std::vector<int>>& supports) {
  Complex2 k(site_count);
  for (const auto& s : supports) {
    if (s.empty()) throw std::invalid_argument("interaction_complex: empty support");
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a + 1; b < s.size(); ++b) {
        k.add_one_cell(s[a], s[b]);
        for (std::size_t c = b + 1; c < s.size(); ++c) k.add_two_cell(s[a], s[b], s[c]);
      }
    for (int v : s)
      if (v < 0 || v >= site_count) throw std::invalid_argument("interaction_complex: site out of range");
  }
  return k;
}

Complex2 attach_triangles(const Graph& g) {
  Complex2 k(g.vertex_count());
  for (auto [u, v] : g.edges()) k.add_one_cell(u, v);
  for (const auto& t : list_triangles(g)) k.add_two_cell(t[0], t[1], t[2]);
  return k;
}

int set_diameter(const std::vector<std::vector<int>>& dist, const std::vector<int>& cells) {
  int best = 0;
  for (int a : cells)
    for (int b : cells) {
      int d = dist[a][b];
      if (d < 0) return kInfiniteDistance;
      best = std::max(best, d);
    }
  return best;
}

int set_diameter(const Complex2& k, const std::vector<int>& cells) {
  Graph g = k.skeleton();
  int best = 0;
  for (int a : cells) {
    auto d = bfs_distances(g, a);
    for (int b : cells) {
      if (d[b] < 0) return kInfiniteDistance;
      best = std::max(best, d[b]);
    }
  }
  return best;
}

std::vector<int> Shield::interior() const {
  std::set<int> s;
  for (auto [i, j] : pairs) s.insert(i);
  return {s.begin(), s.end()};
}

std::vector<int> Shield::exterior() const {
  std::set<int> s;
  for (auto [i, j] : pairs) s.insert(j);
  return {s.begin(), s.end()};
}

Shield Shield::transposed() const {
  Shield t;
  for (auto [i, j] : pairs) t.pairs.emplace_back(j, i);
  std::sort(t.pairs.begin(), t.pairs.end());
  return t;
}

namespace {

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

std::vector<bool> membership(int n, const std::vector<int>& X) {
  std::vector<bool> in(n, false);
  for (int v : X) {
    if (v < 0 || v >= n) throw std::invalid_argument("shields: 0-cell out of range");
    in[v] = true;
  }
  return in;
}

}  // namespace

std::vector<Shield> shields(const Complex2& k, const std::vector<int>& X) {
  auto in = membership(k.zero_cell_count(), X);
  std::vector<Edge> pairs;
  for (auto [u, v] : k.one_cells()) {
    if (in[u] && !in[v]) pairs.emplace_back(u, v);
    if (in[v] && !in[u]) pairs.emplace_back(v, u);
  }
  std::sort(pairs.begin(), pairs.end());
  std::map<Edge, int> index;
  for (int p = 0; p < static_cast<int>(pairs.size()); ++p) index[pairs[p]] = p;
  Dsu dsu(static_cast<int>(pairs.size()));
  // A 2-cell with two corners inside joins (i,j)~(k,j); with two outside joins (i,j)~(i,l).
  for (const auto& t : k.two_cells()) {
    std::vector<int> ins, outs;
    for (int v : t) (in[v] ? ins : outs).push_back(v);
    if (ins.size() == 2 && outs.size() == 1)
      dsu.unite(index.at({ins[0], outs[0]}), index.at({ins[1], outs[0]}));
    else if (ins.size() == 1 && outs.size() == 2)
      dsu.unite(index.at({ins[0], outs[0]}), index.at({ins[0], outs[1]}));
  }
  std::map<int, Shield> groups;
  for (int p = 0; p < static_cast<int>(pairs.size()); ++p) groups[dsu.find(p)].pairs.push_back(pairs[p]);
  std::vector<Shield> out;
  for (auto& [root, s] : groups) out.push_back(std::move(s));
  std::sort(out.begin(), out.end());
  return out;
}

ShieldSplit split_by_shields(const Complex2& k, const std::vector<std::vector<int>>& supports,
                             const std::vector<int>& X) {
  ShieldSplit res;
  res.shields = shields(k, X);
  res.per_shield.resize(res.shields.size());
  auto in = membership(k.zero_cell_count(), X);
  std::map<Edge, int> owner;
  for (int s = 0; s < static_cast<int>(res.shields.size()); ++s)
    for (auto p : res.shields[s].pairs) owner[p] = s;
  for (int t = 0; t < static_cast<int>(supports.size()); ++t) {
    int n_in = 0;
    for (int v : supports[t]) n_in += in.at(v) ? 1 : 0;
    if (n_in == static_cast<int>(supports[t].size())) {
      res.inside.push_back(t);
      continue;
    }
    if (n_in == 0) {
      res.outside.push_back(t);
      continue;
    }
    int shield = -1;
    for (int i : supports[t])
      for (int j : supports[t]) {
        if (!in[i] || in[j]) continue;
        auto it = owner.find({i, j});
        if (it == owner.end())
          throw std::invalid_argument("split_by_shields: term " + std::to_string(t) +
                                      " crosses X without a 1-cell");
        if (shield >= 0 && shield != it->second)
          throw std::logic_error("split_by_shields: term " + std::to_string(t) + " touches two shields");
        shield = it->second;
      }
    res.per_shield[shield].push_back(t);
  }
  return res;
}

namespace {

std::vector<std::vector<Shield>> all_shields(const Complex2& k, const std::vector<std::vector<int>>& sets) {
  std::vector<std::vector<Shield>> out;
  for (const auto& s : sets) out.push_back(shields(k, s));
  return out;
}

}  // namespace

SetLocalizabilityReport check_set_localizable(const Complex2& k,
                                              const std::vector<std::vector<int>>& sets, int R) {
  SetLocalizabilityReport rep;
  const int m = static_cast<int>(sets.size());
  rep.neighbors = Graph(m);
  auto dist = all_pairs_distances(k.skeleton());
  std::vector<bool> covered(k.zero_cell_count(), false);
  for (int a = 0; a < m; ++a) {
    for (int v : sets[a]) {
      if (v < 0 || v >= k.zero_cell_count()) throw std::invalid_argument("check_set_localizable: bad 0-cell");
      covered[v] = true;
    }
    int diam = set_diameter(dist, sets[a]);
    if (diam > R) {
      rep.ok = false;
      rep.violations.push_back("condition 1: set " + std::to_string(a) + " has diameter " +
                               (diam == kInfiniteDistance ? std::string("inf") : std::to_string(diam)) +
                               " > " + std::to_string(R));
    }
  }
  for (int v = 0; v < k.zero_cell_count(); ++v)
    if (!covered[v]) {
      rep.ok = false;
      rep.violations.push_back("condition 2: 0-cell " + std::to_string(v) + " is in no set");
    }
  auto sh = all_shields(k, sets);
  std::map<std::vector<Edge>, std::vector<int>> by_pairs;
  for (int b = 0; b < m; ++b)
    for (const auto& s : sh[b]) by_pairs[s.pairs].push_back(b);
  for (int a = 0; a < m; ++a)
    for (std::size_t si = 0; si < sh[a].size(); ++si) {
      auto it = by_pairs.find(sh[a][si].transposed().pairs);
      bool matched = false;
      if (it != by_pairs.end())
        for (int b : it->second)
          if (b != a) {
            matched = true;
            if (!rep.neighbors.has_edge(a, b)) rep.neighbors.add_edge(a, b);
          }
      if (!matched) {
        rep.ok = false;
        rep.violations.push_back("condition 3: shield " + std::to_string(si) + " of set " + std::to_string(a) +
                                 " has no transposed partner");
      }
    }
  return rep;
}

Clustering CoverComplex::path_clustering() const {
  return Clustering::from_assignment(path_of);
}

CoverComplex build_cover(const Complex2& k, const std::vector<std::vector<int>>& sets, int depth, int start_set) {
  if (depth < 1) throw std::invalid_argument("build_cover: depth must be >= 1");
  if (start_set < 0 || start_set >= static_cast<int>(sets.size()))
    throw std::invalid_argument("build_cover: bad start set");
  auto rep = check_set_localizable(k, sets, kInfiniteDistance - 1);
  for (const auto& v : rep.violations)
    if (v.rfind("condition 3", 0) == 0) throw std::invalid_argument("build_cover: " + v);

  CoverComplex cov;
  cov.depth = depth;
  cov.start_set = start_set;
  std::vector<int> parent;
  cov.paths.push_back({start_set});
  parent.push_back(-1);
  for (std::size_t p = 0; p < cov.paths.size(); ++p) {
    const auto P = cov.paths[p];
    if (static_cast<int>(P.size()) >= depth) continue;
    int last = P.back();
    int prev = P.size() >= 2 ? P[P.size() - 2] : -1;
    for (int b : rep.neighbors.neighbors(last)) {
      if (b == prev) continue;
      auto Q = P;
      Q.push_back(b);
      cov.paths.push_back(std::move(Q));
      parent.push_back(static_cast<int>(p));
    }
  }

  std::map<std::pair<int, int>, int> node;  // (base, path) -> node
  for (int p = 0; p < static_cast<int>(cov.paths.size()); ++p) {
    std::vector<int> members = sets[cov.paths[p].back()];
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (int i : members) {
      node[{i, p}] = static_cast<int>(cov.base.size());
      cov.base.push_back(i);
      cov.path_of.push_back(p);
    }
  }
  cov.complex = Complex2(static_cast<int>(cov.base.size()));
  auto link = [&](int p, int q) {
    for (int i : sets[cov.paths[p].back()])
      for (int j : sets[cov.paths[q].back()])
        if (i != j && k.has_one_cell(i, j)) cov.complex.add_one_cell(node.at({i, p}), node.at({j, q}));
  };
  for (int p = 0; p < static_cast<int>(cov.paths.size()); ++p) {
    link(p, p);
    if (parent[p] >= 0) link(parent[p], p);
  }
  // Lifted 2-cells: lifted triangles over base 2-cells. Pairwise adjacency of
  // the three lifts already forces at most two distinct paths.
  std::vector<std::vector<int>> adj(cov.base.size());
  for (auto [u, v] : cov.complex.one_cells()) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<Triple> lifted;
  for (auto [u, v] : cov.complex.one_cells())
    for (int w : adj[u])
      if (w > v && cov.complex.has_one_cell(v, w) && k.has_two_cell(cov.base[u], cov.base[v], cov.base[w]))
        lifted.push_back({u, v, w});
  for (const auto& t : lifted) cov.complex.add_two_cell(t[0], t[1], t[2]);
  return cov;
}

Complex2 coarse_grain_complex(const Complex2& k, const Clustering& c) {
  auto a = c.assignment(k.zero_cell_count());
  Complex2 out(static_cast<int>(c.clusters.size()));
  for (auto [u, v] : k.one_cells())
    if (a[u] != a[v]) out.add_one_cell(a[u], a[v]);
  for (const auto& t : k.two_cells()) {
    int x = a[t[0]], y = a[t[1]], z = a[t[2]];
    if (x != y && y != z && x != z) out.add_two_cell(x, y, z);
  }
  return out;
}

}  // namespace loctriv
