#include "loctriv/localize.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "loctriv/random.hpp"

namespace loctriv {

std::vector<int> LocalizationMap::walk(int u, int v) const {
  auto it = edge_path.find(make_edge(u, v));
  if (it == edge_path.end()) throw std::invalid_argument("LocalizationMap: no walk for 1-cell");
  std::vector<int> w = it->second;
  if (u > v) std::reverse(w.begin(), w.end());
  return w;
}

namespace {

struct Dsu {
  std::vector<int> p;
  int add() {
    p.push_back(static_cast<int>(p.size()));
    return p.back();
  }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// Connected pieces of all point pre-images. Vertex items: source 0-cells,
// interior walk visits, and one item per (2-cell, visited target vertex).
// Edge items: walk steps and one item per (2-cell, traversed target edge).
struct Preimages {
  Dsu vdsu;
  std::vector<int> vtarget;                    // item -> target vertex
  std::vector<std::vector<int>> vanchor;       // item -> nearest source 0-cells
  std::vector<std::vector<int>> occ;           // edge index -> visit index -> item
  std::map<std::pair<int, int>, int> cell_item;  // (2-cell index, target vertex) -> item
  Dsu edsu;
  std::vector<Edge> etarget;
  std::vector<std::vector<int>> eanchor;
  std::vector<Edge> edges;                     // edge index -> source 1-cell
  std::vector<Triple> cells;
};

std::vector<int> anchors_at(int twice_pos, int k, int u, int v) {
  // The point at parameter twice_pos/(2k) along u->v.
  if (twice_pos < k) return {u};
  if (twice_pos > k) return {v};
  return {u, v};
}

Preimages analyze(const LocalizationMap& m) {
  Preimages P;
  const int ns = m.source.zero_cell_count();
  for (int u = 0; u < ns; ++u) {
    P.vdsu.add();
    P.vtarget.push_back(m.vertex_image[u]);
    P.vanchor.push_back({u});
  }
  std::map<Edge, int> edge_index;
  for (auto e : m.source.one_cells()) {
    int ei = static_cast<int>(P.edges.size());
    edge_index[e] = ei;
    P.edges.push_back(e);
    const auto& w = m.edge_path.at(e);
    const int k = static_cast<int>(w.size()) - 1;
    std::vector<int> items(w.size());
    items[0] = e.first;
    items[k] = e.second;
    for (int s = 1; s < k; ++s) {
      items[s] = P.vdsu.add();
      P.vtarget.push_back(w[s]);
      P.vanchor.push_back(anchors_at(2 * s, k, e.first, e.second));
    }
    if (k == 0) P.vdsu.unite(e.first, e.second);
    P.occ.push_back(items);
  }
  std::map<std::pair<int, Edge>, int> cell_edge_item;
  for (const auto& t : m.source.two_cells()) {
    int ti = static_cast<int>(P.cells.size());
    P.cells.push_back(t);
    for (auto e : {Edge{t[0], t[1]}, Edge{t[1], t[2]}, Edge{t[0], t[2]}}) {
      int ei = edge_index.at(e);
      const auto& w = m.edge_path.at(e);
      for (std::size_t s = 0; s < w.size(); ++s) {
        auto [it, fresh] = P.cell_item.try_emplace({ti, w[s]}, -1);
        if (fresh) {
          it->second = P.vdsu.add();
          P.vtarget.push_back(w[s]);
          P.vanchor.push_back({});
        }
        P.vdsu.unite(it->second, P.occ[ei][s]);
      }
    }
    auto c = m.center_image.find(t);
    if (c != m.center_image.end() && !P.cell_item.count({ti, c->second})) {
      P.cell_item[{ti, c->second}] = P.vdsu.add();
      P.vtarget.push_back(c->second);
      P.vanchor.push_back({});
    }
  }
  // Edge pre-images.
  std::vector<std::vector<int>> steps(P.edges.size());
  for (std::size_t ei = 0; ei < P.edges.size(); ++ei) {
    const auto& w = m.edge_path.at(P.edges[ei]);
    const int k = static_cast<int>(w.size()) - 1;
    for (int s = 0; s < k; ++s) {
      steps[ei].push_back(P.edsu.add());
      P.etarget.push_back(make_edge(w[s], w[s + 1]));
      P.eanchor.push_back(anchors_at(2 * s + 1, k, P.edges[ei].first, P.edges[ei].second));
    }
  }
  for (std::size_t ti = 0; ti < P.cells.size(); ++ti) {
    const auto& t = P.cells[ti];
    for (auto e : {Edge{t[0], t[1]}, Edge{t[1], t[2]}, Edge{t[0], t[2]}}) {
      int ei = edge_index.at(e);
      const auto& w = m.edge_path.at(e);
      for (std::size_t s = 0; s + 1 < w.size(); ++s) {
        Edge te = make_edge(w[s], w[s + 1]);
        auto [it, fresh] = cell_edge_item.try_emplace({static_cast<int>(ti), te}, -1);
        if (fresh) {
          it->second = P.edsu.add();
          P.etarget.push_back(te);
          P.eanchor.push_back({});
        }
        P.edsu.unite(it->second, steps[ei][s]);
      }
    }
  }
  return P;
}

int anchor_diameter(const std::vector<std::vector<int>>& dist, const std::set<int>& anchors) {
  int best = 0;
  for (int a : anchors)
    for (int b : anchors) {
      if (dist[a][b] < 0) return kInfiniteDistance;
      best = std::max(best, dist[a][b]);
    }
  return best;
}

// Free reduction of a closed walk; true if it cancels to a point.
bool null_homotopic(const std::vector<int>& closed) {
  std::vector<int> st;
  for (int v : closed) {
    if (!st.empty() && st.back() == v) continue;
    if (st.size() >= 2 && st[st.size() - 2] == v)
      st.pop_back();
    else
      st.push_back(v);
  }
  while (st.size() >= 3 && st.front() == st.back() && st[1] == st[st.size() - 2]) {
    st.pop_back();
    st.erase(st.begin());
  }
  return st.size() <= 1 || (st.size() == 2 && st[0] == st[1]);
}

std::vector<int> boundary_walk(const LocalizationMap& m, const Triple& t) {
  std::vector<int> w = m.walk(t[0], t[1]);
  auto b = m.walk(t[1], t[2]);
  auto c = m.walk(t[2], t[0]);
  w.insert(w.end(), b.begin() + 1, b.end());
  w.insert(w.end(), c.begin() + 1, c.end());
  return w;
}

bool on_walk(const std::vector<int>& w, int x) { return std::find(w.begin(), w.end(), x) != w.end(); }

bool center_anchored(const LocalizationMap& m, const Triple& t, int x) {
  return on_walk(m.walk(t[0], t[1]), x) && on_walk(m.walk(t[1], t[2]), x) && on_walk(m.walk(t[0], t[2]), x);
}

void structural_checks(const LocalizationMap& m, std::vector<std::string>& bad) {
  const int ns = m.source.zero_cell_count(), nt = m.target.vertex_count();
  if (static_cast<int>(m.vertex_image.size()) != ns) {
    bad.push_back("vertex_image size mismatch");
    return;
  }
  for (int u = 0; u < ns; ++u)
    if (m.vertex_image[u] < 0 || m.vertex_image[u] >= nt) bad.push_back("vertex image out of range at " + std::to_string(u));
  if (!bad.empty()) return;
  for (auto e : m.source.one_cells()) {
    auto it = m.edge_path.find(e);
    std::string name = "(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
    if (it == m.edge_path.end() || it->second.empty()) {
      bad.push_back("1-cell " + name + " has no walk");
      continue;
    }
    const auto& w = it->second;
    if (w.front() != m.vertex_image[e.first] || w.back() != m.vertex_image[e.second])
      bad.push_back("walk of " + name + " does not join endpoint images");
    for (std::size_t s = 0; s + 1 < w.size(); ++s)
      if (w[s] < 0 || w[s] >= nt || w[s + 1] < 0 || w[s + 1] >= nt || !m.target.has_edge(w[s], w[s + 1])) {
        bad.push_back("walk of " + name + " leaves the target 1-skeleton");
        break;
      }
  }
  if (m.edge_path.size() != m.source.one_cells().size()) bad.push_back("walks given for non-existent 1-cells");
  for (const auto& [t, x] : m.center_image)
    if (!m.source.has_two_cell(t[0], t[1], t[2]) || x < 0 || x >= nt) bad.push_back("center for a missing 2-cell");
}

}  // namespace

std::vector<int> preimage_diameters(const LocalizationMap& m) {
  auto P = analyze(m);
  auto dist = all_pairs_distances(m.source.skeleton());
  std::vector<std::set<int>> anchors(m.target.vertex_count());
  for (std::size_t i = 0; i < P.vtarget.size(); ++i) anchors[P.vtarget[i]].insert(P.vanchor[i].begin(), P.vanchor[i].end());
  std::vector<int> out;
  for (const auto& a : anchors) out.push_back(anchor_diameter(dist, a));
  return out;
}

GoodReport verify_good(const LocalizationMap& m) {
  GoodReport rep;
  auto& bad = rep.violations;
  structural_checks(m, bad);
  if (!bad.empty()) {
    rep.good = false;
    return rep;
  }
  const int nt = m.target.vertex_count();
  for (const auto& t : m.source.two_cells()) {
    if (!null_homotopic(boundary_walk(m, t)))
      bad.push_back("boundary of 2-cell (" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
                    std::to_string(t[2]) + ") is not contractible in the target");
    auto c = m.center_image.find(t);
    if (c != m.center_image.end() && !center_anchored(m, t, c->second))
      bad.push_back("center of 2-cell (" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
                    std::to_string(t[2]) + ") is not anchored");
  }
  std::vector<bool> hit(nt, false), centred(nt, false);
  for (int x : m.vertex_image) hit[x] = true;
  for (const auto& [t, x] : m.center_image) centred[x] = true;
  for (int x = 0; x < nt; ++x)
    if (!hit[x] && !centred[x]) bad.push_back("target 0-cell " + std::to_string(x) + " is not anchored");

  auto P = analyze(m);
  auto dist = all_pairs_distances(m.source.skeleton());
  std::vector<std::set<int>> roots(nt), vanchors(nt);
  for (std::size_t i = 0; i < P.vtarget.size(); ++i) {
    roots[P.vtarget[i]].insert(P.vdsu.find(static_cast<int>(i)));
    vanchors[P.vtarget[i]].insert(P.vanchor[i].begin(), P.vanchor[i].end());
  }
  for (int x = 0; x < nt; ++x)
    if (roots[x].size() > 1)
      bad.push_back("pre-image of target 0-cell " + std::to_string(x) + " has " + std::to_string(roots[x].size()) +
                    " components");
  std::map<Edge, std::set<int>> eroots, eanchors;
  for (std::size_t i = 0; i < P.etarget.size(); ++i) {
    eroots[P.etarget[i]].insert(P.edsu.find(static_cast<int>(i)));
    eanchors[P.etarget[i]].insert(P.eanchor[i].begin(), P.eanchor[i].end());
  }
  for (const auto& [e, r] : eroots)
    if (r.size() > 1)
      bad.push_back("pre-image of target 1-cell (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                    ") has " + std::to_string(r.size()) + " components");

  MapMetrics& mt = rep.metrics;
  for (const auto& [e, w] : m.edge_path) mt.l_max = std::max(mt.l_max, static_cast<int>(w.size()) - 1);
  mt.D_1 = m.target.max_degree();
  for (int x = 0; x < nt; ++x) mt.max_preimage_diameter_0cell = std::max(mt.max_preimage_diameter_0cell, anchor_diameter(dist, vanchors[x]));
  for (auto [x, y] : m.target.edges()) {
    std::set<int> a = eanchors[{x, y}];
    a.insert(vanchors[x].begin(), vanchors[x].end());
    a.insert(vanchors[y].begin(), vanchors[y].end());
    mt.max_preimage_diameter_1cell = std::max(mt.max_preimage_diameter_1cell, anchor_diameter(dist, a));
  }
  mt.c_preimage = std::max({1, mt.max_preimage_diameter_1cell, mt.max_preimage_diameter_0cell});
  mt.c_image = std::max(1, mt.l_max);
  if (mt.max_preimage_diameter_0cell > m.range)
    bad.push_back("pre-image diameter " + std::to_string(mt.max_preimage_diameter_0cell) + " exceeds range " +
                  std::to_string(m.range));
  if (mt.max_preimage_diameter_1cell > 2 * m.range + 2)
    bad.push_back("1-cell pre-image diameter " + std::to_string(mt.max_preimage_diameter_1cell) + " exceeds 2R+2");
  rep.good = bad.empty();
  return rep;
}

DistortionReport check_distortion(const LocalizationMap& m, const MapMetrics& metrics) {
  DistortionReport rep;
  auto P = analyze(m);
  auto sdist = all_pairs_distances(m.source.skeleton());
  auto tdist = all_pairs_distances(m.target);
  const int nt = m.target.vertex_count(), ns = m.source.zero_cell_count();
  std::vector<std::vector<int>> anchors(nt);
  for (std::size_t i = 0; i < P.vtarget.size(); ++i)
    for (int a : P.vanchor[i]) anchors[P.vtarget[i]].push_back(a);
  const int big = kInfiniteDistance / 4;
  for (int x = 0; x < nt; ++x)
    for (int y = x; y < nt; ++y) {
      if (tdist[x][y] < 0) continue;
      int worst = 0;
      for (int a : anchors[x])
        for (int b : anchors[y]) worst = std::max(worst, sdist[a][b] < 0 ? big : sdist[a][b]);
      for (int a : anchors[x])
        for (int b : anchors[x]) worst = std::max(worst, sdist[a][b] < 0 ? big : sdist[a][b]);
      for (int a : anchors[y])
        for (int b : anchors[y]) worst = std::max(worst, sdist[a][b] < 0 ? big : sdist[a][b]);
      int slack = worst - metrics.c_preimage * (tdist[x][y] + 1);
      rep.worst_preimage_slack = rep.pairs_checked == 0 ? slack : std::max(rep.worst_preimage_slack, slack);
      ++rep.pairs_checked;
    }
  bool first = true;
  for (int a = 0; a < ns; ++a)
    for (int b = a; b < ns; ++b) {
      if (sdist[a][b] < 0) continue;
      int d = tdist[m.vertex_image[a]][m.vertex_image[b]];
      int slack = d - metrics.c_image * (sdist[a][b] + 1);
      rep.worst_image_slack = first ? slack : std::max(rep.worst_image_slack, slack);
      first = false;
      ++rep.pairs_checked;
    }
  rep.holds = rep.worst_preimage_slack <= 0 && rep.worst_image_slack <= 0;
  return rep;
}

LocalizationMap collapse_high_girth_power(const Graph& g, int R) {
  if (R < 1) throw std::invalid_argument("collapse_high_girth_power: R must be >= 1");
  auto gr = girth(g);
  if (gr && *gr <= 3 * R)
    throw std::invalid_argument("collapse_high_girth_power: girth " + std::to_string(*gr) +
                                " is not larger than 3R = " + std::to_string(3 * R));
  LocalizationMap m;
  m.source = attach_triangles(power(g, R));
  m.target = g;
  m.range = 2 * R;
  m.vertex_image.resize(g.vertex_count());
  std::iota(m.vertex_image.begin(), m.vertex_image.end(), 0);
  // Collapsing free edges in order of decreasing length ends with every
  // 1-cell on its (unique, by girth) geodesic; build those directly.
  for (int u = 0; u < g.vertex_count(); ++u) {
    std::vector<int> parent(g.vertex_count(), -1), depth(g.vertex_count(), -1);
    std::vector<int> q{u};
    depth[u] = 0;
    for (std::size_t h = 0; h < q.size(); ++h) {
      int x = q[h];
      if (depth[x] == R) continue;
      for (int y : g.neighbors(x))
        if (depth[y] < 0) {
          depth[y] = depth[x] + 1;
          parent[y] = x;
          q.push_back(y);
        }
    }
    for (int v : q) {
      if (v <= u) continue;
      std::vector<int> w;
      for (int x = v; x != -1; x = parent[x]) w.push_back(x);
      std::reverse(w.begin(), w.end());
      m.edge_path[{u, v}] = w;
    }
  }
  return m;
}

int first_betti(const Graph& k1) {
  int comps = 0;
  connected_components(k1, &comps);
  return static_cast<int>(k1.edge_count()) - k1.vertex_count() + comps;
}

namespace {

// Drops target vertices and 1-cells that nothing maps onto, then relabels.
LocalizationMap compact_target(const LocalizationMap& m) {
  const int nt = m.target.vertex_count();
  std::vector<bool> used(nt, false);
  std::set<Edge> used_edges;
  for (int x : m.vertex_image) used[x] = true;
  for (const auto& [e, w] : m.edge_path) {
    for (int x : w) used[x] = true;
    for (std::size_t s = 0; s + 1 < w.size(); ++s) used_edges.insert(make_edge(w[s], w[s + 1]));
  }
  for (const auto& [t, x] : m.center_image) used[x] = true;
  std::vector<int> relabel(nt, -1);
  int k = 0;
  for (int x = 0; x < nt; ++x)
    if (used[x]) relabel[x] = k++;
  LocalizationMap out;
  out.source = m.source;
  out.range = m.range;
  out.target = Graph(k);
  for (auto [x, y] : used_edges) out.target.add_edge(relabel[x], relabel[y]);
  for (int x : m.vertex_image) out.vertex_image.push_back(relabel[x]);
  for (const auto& [e, w] : m.edge_path) {
    auto& nw = out.edge_path[e];
    for (int x : w) nw.push_back(relabel[x]);
  }
  for (const auto& [t, x] : m.center_image) out.center_image[t] = relabel[x];
  return out;
}

// Removes x from every walk: degree-1 bounces w x w -> w, degree-2 passes y x z -> y z.
std::vector<int> splice_out(const std::vector<int>& w, int x) {
  std::vector<int> out;
  for (std::size_t s = 0; s < w.size(); ++s) {
    if (w[s] != x) {
      out.push_back(w[s]);
      continue;
    }
    // x is never a walk endpoint here (it is not a vertex image).
    int prev = out.back(), next = w[s + 1];
    if (prev == next) ++s;  // bounce: drop x and the repeated neighbour
  }
  return out;
}

}  // namespace

LocalizationMap normalize_map(const LocalizationMap& input) {
  {
    std::vector<std::string> bad;
    structural_checks(input, bad);
    if (!bad.empty()) throw std::invalid_argument("normalize_map: " + bad.front());
  }
  LocalizationMap m = compact_target(input);

  // 1. Split disconnected vertex pre-images into duplicated target 0-cells.
  {
    auto P = analyze(m);
    const int nt = m.target.vertex_count();
    std::vector<std::map<int, int>> comp_label(nt);  // root -> new target vertex
    int next = nt;
    for (std::size_t i = 0; i < P.vtarget.size(); ++i) {
      int x = P.vtarget[i], r = P.vdsu.find(static_cast<int>(i));
      if (!comp_label[x].count(r)) comp_label[x][r] = comp_label[x].empty() ? x : next++;
    }
    if (next > nt) {
      auto label = [&](int item) { return comp_label[P.vtarget[item]].at(P.vdsu.find(item)); };
      LocalizationMap s = m;
      for (int u = 0; u < m.source.zero_cell_count(); ++u) s.vertex_image[u] = label(u);
      for (std::size_t ei = 0; ei < P.edges.size(); ++ei) {
        auto& w = s.edge_path[P.edges[ei]];
        for (std::size_t k = 0; k < w.size(); ++k) w[k] = label(P.occ[ei][k]);
      }
      for (auto& [t, x] : s.center_image) {
        int ti = static_cast<int>(std::lower_bound(P.cells.begin(), P.cells.end(), t) - P.cells.begin());
        x = label(P.cell_item.at({ti, x}));
      }
      s.target = Graph(next);
      for (const auto& [e, w] : s.edge_path)
        for (std::size_t k = 0; k + 1 < w.size(); ++k)
          if (!s.target.has_edge(w[k], w[k + 1])) s.target.add_edge(w[k], w[k + 1]);
      m = compact_target(s);
    }
  }

  auto anchored = [&](int x, std::vector<bool>& is_image) {
    if (is_image[x]) return true;
    for (const auto& [t, c] : m.center_image)
      if (c == x) return true;
    return false;
  };

  // 2. Anchor bad 0-cells where a 2-cell admits it; remove degree-1/2 ones otherwise.
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<bool> is_image(m.target.vertex_count(), false);
    for (int x : m.vertex_image) is_image[x] = true;
    for (int x = 0; x < m.target.vertex_count() && !changed; ++x) {
      if (anchored(x, is_image)) continue;
      for (const auto& t : m.source.two_cells())
        if (!m.center_image.count(t) && center_anchored(m, t, x)) {
          m.center_image[t] = x;
          break;
        }
      if (anchored(x, is_image)) continue;
      int deg = m.target.degree(x);
      if (deg >= 3) continue;
      if (deg == 2) {
        int y = m.target.neighbors(x)[0], z = m.target.neighbors(x)[1];
        if (m.target.has_edge(y, z))
          throw std::runtime_error("normalize_map: merging at bad 0-cell " + std::to_string(x) +
                                   " would create a parallel 1-cell");
        m.target.add_edge(y, z);
      }
      for (auto& [e, w] : m.edge_path) w = splice_out(w, x);
      m.target.remove_edge(x, m.target.neighbors(x).front());
      if (m.target.degree(x) > 0) m.target.remove_edge(x, m.target.neighbors(x).front());
      m = compact_target(m);
      changed = true;
    }
  }

  std::vector<bool> is_image(m.target.vertex_count(), false);
  for (int x : m.vertex_image) is_image[x] = true;
  for (int x = 0; x < m.target.vertex_count(); ++x)
    if (!anchored(x, is_image))
      throw std::runtime_error("normalize_map: bad 0-cell " + std::to_string(x) + " of degree " +
                               std::to_string(m.target.degree(x)) +
                               " is unanchored; requires branch migration (out of scope)");
  auto d = preimage_diameters(m);
  for (int x : d) m.range = std::max(m.range, x);
  return m;
}

LocalizationMap cluster_map(const Complex2& k, const Clustering& c) {
  LocalizationMap m;
  m.source = k;
  m.vertex_image = c.assignment(k.zero_cell_count());
  m.target = coarse_grain(k.skeleton(), c);
  for (auto [u, v] : k.one_cells()) {
    int a = m.vertex_image[u], b = m.vertex_image[v];
    m.edge_path[{u, v}] = a == b ? std::vector<int>{a} : std::vector<int>{a, b};
  }
  auto d = preimage_diameters(m);
  for (int x : d) m.range = std::max(m.range, x);
  return m;
}

namespace {

struct ComplexSearch {
  const Complex2& k;
  int R;
  const std::vector<std::vector<int>>& dist;
  std::vector<std::vector<int>> adj;
  std::vector<std::vector<Triple>> cells_at;
  std::vector<int> label;
  std::vector<std::vector<int>> members;

  ComplexSearch(const Complex2& k_, int R_, const std::vector<std::vector<int>>& d) : k(k_), R(R_), dist(d) {
    const int n = k.zero_cell_count();
    adj.resize(n);
    cells_at.resize(n);
    for (auto [u, v] : k.one_cells()) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (const auto& t : k.two_cells())
      for (int v : t) cells_at[v].push_back(t);
  }

  bool spans(const Triple& t) const {
    return label[t[0]] != label[t[1]] && label[t[1]] != label[t[2]] && label[t[0]] != label[t[2]];
  }
  int bad_total() const {
    int b = 0;
    for (const auto& t : k.two_cells()) b += spans(t) ? 1 : 0;
    return b;
  }
  bool fits(int v, int c) const {
    for (int w : members[c])
      if (dist[v][w] < 0 || dist[v][w] > R) return false;
    return true;
  }
  bool stays_connected(int v) const {
    const auto& mem = members[label[v]];
    if (mem.size() <= 1) return true;
    std::set<int> left(mem.begin(), mem.end());
    left.erase(v);
    std::vector<int> st{*left.begin()};
    std::set<int> seen{st[0]};
    while (!st.empty()) {
      int x = st.back();
      st.pop_back();
      for (int y : adj[x])
        if (left.count(y) && seen.insert(y).second) st.push_back(y);
    }
    return seen.size() == left.size();
  }
  int delta(int v, int c) {
    int before = 0, after = 0, old = label[v];
    for (const auto& t : cells_at[v]) before += spans(t);
    label[v] = c;
    for (const auto& t : cells_at[v]) after += spans(t);
    label[v] = old;
    return after - before;
  }
  void move(int v, int c) {
    auto& from = members[label[v]];
    from.erase(std::find(from.begin(), from.end(), v));
    members[c].push_back(v);
    label[v] = c;
  }

  void greedy(Rng& rng) {
    const int n = k.zero_cell_count();
    label.assign(n, -1);
    members.clear();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int s : order) {
      if (label[s] >= 0) continue;
      int c = static_cast<int>(members.size());
      members.push_back({s});
      label[s] = c;
      while (true) {
        int best = -1, best_links = -1;
        for (int x : members[c])
          for (int y : adj[x]) {
            if (label[y] >= 0 || !fits(y, c)) continue;
            int links = 0;
            for (int z : adj[y]) links += label[z] == c;
            if (links > best_links || (links == best_links && y < best)) best = y, best_links = links;
          }
        if (best < 0) break;
        label[best] = c;
        members[c].push_back(best);
      }
    }
  }

  void local_search(Rng& rng) {
    const int n = k.zero_cell_count();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    int stale = 0;
    for (int pass = 0; pass < 30 && stale < 3; ++pass) {
      std::shuffle(order.begin(), order.end(), rng);
      bool improved = false;
      for (int v : order) {
        if (cells_at[v].empty()) continue;
        std::set<int> cand;
        for (int y : adj[v])
          if (label[y] != label[v]) cand.insert(label[y]);
        for (int c : cand) {
          if (!fits(v, c) || !stays_connected(v)) continue;
          int d = delta(v, c);
          if (d < 0 || (d == 0 && rng() % 4 == 0)) {
            move(v, c);
            improved |= d < 0;
            break;
          }
        }
      }
      stale = improved ? 0 : stale + 1;
    }
  }
};

}  // namespace

ComplexClusteringResult search_complex_clustering(const Complex2& k, int R, int restarts, std::uint64_t seed) {
  auto dist = all_pairs_distances(k.skeleton());
  ComplexClusteringResult best;
  best.bad_two_cells = -1;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    Rng rng = stream_rng(seed, r);
    ComplexSearch s(k, R, dist);
    s.greedy(rng);
    int bad = s.bad_total();
    if (bad > 0) {
      s.local_search(rng);
      bad = s.bad_total();
    }
    if (best.bad_two_cells < 0 || bad < best.bad_two_cells) {
      best.bad_two_cells = bad;
      best.best = Clustering::from_assignment(s.label);
    }
    if (bad == 0) break;
  }
  return best;
}

Complex2 remove_zero_cells(const Complex2& k, const std::vector<int>& drop, std::vector<int>* old_to_new) {
  std::vector<int> map(k.zero_cell_count(), 0);
  for (int v : drop) map.at(v) = -1;
  int n = 0;
  for (auto& x : map) x = x < 0 ? -1 : n++;
  Complex2 out(n);
  for (auto [u, v] : k.one_cells())
    if (map[u] >= 0 && map[v] >= 0) out.add_one_cell(map[u], map[v]);
  for (const auto& t : k.two_cells())
    if (map[t[0]] >= 0 && map[t[1]] >= 0 && map[t[2]] >= 0) out.add_two_cell(map[t[0]], map[t[1]], map[t[2]]);
  if (old_to_new) *old_to_new = map;
  return out;
}

Complex2 triangulated_torus(int cols, int rows) {
  Complex2 k(cols * rows);
  auto id = [&](int c, int r) { return ((c % cols + cols) % cols) * rows + (r % rows + rows) % rows; };
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      k.add_two_cell(id(c, r), id(c + 1, r), id(c + 1, r + 1));
      k.add_two_cell(id(c, r), id(c, r + 1), id(c + 1, r + 1));
    }
  return k;
}

double HyperfiniteReport::success_rate() const {
  if (trials.empty()) return 0;
  int ok = 0;
  for (const auto& t : trials) ok += t.success;
  return static_cast<double>(ok) / static_cast<double>(trials.size());
}

HyperfiniteReport hyperfinite_experiment(const ComplexFamily& family, double epsilon, int R, int trials,
                                         std::uint64_t seed, int restarts, int jobs) {
  if (!(epsilon >= 0 && epsilon < 1)) throw std::invalid_argument("hyperfinite_experiment: epsilon must be in [0,1)");
  HyperfiniteReport rep;
  rep.epsilon = epsilon;
  rep.R = R;
  rep.seed = seed;
  rep.trials.resize(trials);
  parallel_for(trials, jobs, [&](int trial) {
    Rng rng = stream_rng(seed, 1000003u * static_cast<std::uint64_t>(trial));
    Complex2 k = family(trial, rng);
    HyperfiniteTrial& out = rep.trials[trial];
    out.cells = k.zero_cell_count();
    const int budget = static_cast<int>(epsilon * k.zero_cell_count());
    std::vector<int> removed;  // original ids
    for (int round = 0;; ++round) {
      std::vector<int> old_to_new;
      Complex2 cur = remove_zero_cells(k, removed, &old_to_new);
      auto res = search_complex_clustering(cur, R, restarts, rng());
      out.residual_two_cells = res.bad_two_cells;
      out.removed = static_cast<int>(removed.size());
      if (res.bad_two_cells == 0) {
        auto m = cluster_map(cur, res.best);
        m.range = R;
        out.success = verify_good(m).good;
        if (out.success) break;
      }
      if (static_cast<int>(removed.size()) >= budget) break;
      auto label = res.best.assignment(cur.zero_cell_count());
      std::vector<int> score(cur.zero_cell_count(), 0);
      for (const auto& t : cur.two_cells())
        if (label[t[0]] != label[t[1]] && label[t[1]] != label[t[2]] && label[t[0]] != label[t[2]])
          for (int v : t) ++score[v];
      int pick = static_cast<int>(std::max_element(score.begin(), score.end()) - score.begin());
      for (int v = 0; v < k.zero_cell_count(); ++v)
        if (old_to_new[v] == pick) removed.push_back(v);
    }
  });
  return rep;
}

}  // namespace loctriv
