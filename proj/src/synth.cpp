#include "loctriv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "loctriv/algebra.hpp"
#include "loctriv/random.hpp"
#include "loctriv/tolerances.hpp"
#include "loctriv/verify.hpp"

namespace loctriv {

namespace {

using cd = std::complex<double>;

bool near_identity(const Eigen::MatrixXcd& u) {
  return (u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).norm() < 1e-12;
}

// Columns of a block isometry with every factor digit but `k` at zero.
Eigen::MatrixXcd factor_columns(const FactorBlock& b, int k) {
  long stride = 1;
  for (int m = 0; m < k; ++m) stride *= b.factor_dims[m];
  Eigen::MatrixXcd v(b.isometry.rows(), b.factor_dims[k]);
  for (int x = 0; x < b.factor_dims[k]; ++x) v.col(x) = b.isometry.col(x * stride);
  return v;
}

long factor_stride(const FactorBlock& b, int k) {
  long s = 1;
  for (int m = 0; m < k; ++m) s *= b.factor_dims[m];
  return s;
}

struct EdgeEntry {
  double energy = 0;
  Eigen::VectorXcd psi;
};

struct TwoBodyModel {
  int n = 0;
  std::vector<std::vector<int>> nbrs;
  std::vector<FactorDecomposition> fd;
  std::vector<std::vector<double>> single;  // per site, per block
  std::vector<Edge> edges;
  std::vector<std::vector<std::vector<EdgeEntry>>> table;  // edge, block i, block j

  int blocks(int i) const { return static_cast<int>(fd[i].blocks.size()); }
  int slot(int i, int j) const {
    return static_cast<int>(std::lower_bound(nbrs[i].begin(), nbrs[i].end(), j) - nbrs[i].begin());
  }
  double energy(const std::vector<int>& lab) const {
    double e = 0;
    for (int i = 0; i < n; ++i) e += single[i][lab[i]];
    for (std::size_t k = 0; k < edges.size(); ++k) e += table[k][lab[edges[k].first]][lab[edges[k].second]].energy;
    return e;
  }
};

TwoBodyModel build_two_body(const CommutingHamiltonian& h, std::uint64_t seed) {
  TwoBodyModel m;
  m.n = h.site_count();
  std::map<Edge, std::vector<int>> pair_terms;
  std::vector<std::vector<int>> singles(m.n);
  for (int t = 0; t < static_cast<int>(h.terms.size()); ++t) {
    const auto& s = h.terms[t].support;
    if (s.size() == 1) {
      singles[s[0]].push_back(t);
    } else if (s.size() == 2) {
      pair_terms[make_edge(s[0], s[1])].push_back(t);
    } else {
      throw std::invalid_argument("solve_two_body: term acts on more than two sites");
    }
  }
  m.nbrs.resize(m.n);
  for (const auto& [e, ts] : pair_terms) {
    m.nbrs[e.first].push_back(e.second);
    m.nbrs[e.second].push_back(e.first);
    m.edges.push_back(e);
  }
  for (auto& v : m.nbrs) std::sort(v.begin(), v.end());

  m.fd.resize(m.n);
  m.single.resize(m.n);
  for (int i = 0; i < m.n; ++i) {
    std::vector<OperatorAlgebra> algs;
    for (int j : m.nbrs[i]) algs.push_back(interaction_algebra(h, {i}, pair_terms[make_edge(i, j)]));
    if (!singles[i].empty()) algs.push_back(interaction_algebra(h, {i}, singles[i]));
    if (algs.empty()) algs.push_back(OperatorAlgebra::generated({}, h.site_dims[i]));
    m.fd[i] = factor_decompose(algs, h.site_dims[i], seed + static_cast<std::uint64_t>(i));
    Eigen::MatrixXcd hi = Eigen::MatrixXcd::Zero(h.site_dims[i], h.site_dims[i]);
    for (int t : singles[i]) hi += h.terms[t].dense_matrix();
    for (const auto& b : m.fd[i].blocks) {
      Eigen::MatrixXcd r = b.isometry.adjoint() * hi * b.isometry;
      m.single[i].push_back(r.trace().real() / static_cast<double>(b.rank()));
    }
  }

  m.table.resize(m.edges.size());
  for (std::size_t k = 0; k < m.edges.size(); ++k) {
    auto [i, j] = m.edges[k];
    std::vector<int> sup{i, j};
    long dim = static_cast<long>(h.site_dims[i]) * h.site_dims[j];
    Eigen::MatrixXcd hij = Eigen::MatrixXcd::Zero(dim, dim);
    for (int t : pair_terms[m.edges[k]]) hij += embed_operator(h.terms[t].dense_matrix(), h.terms[t].support, sup, h.site_dims);
    int si = m.slot(i, j), sj = m.slot(j, i);
    m.table[k].assign(m.blocks(i), std::vector<EdgeEntry>(m.blocks(j)));
    for (int a = 0; a < m.blocks(i); ++a) {
      Eigen::MatrixXcd vi = factor_columns(m.fd[i].blocks[a], si);
      for (int b = 0; b < m.blocks(j); ++b) {
        Eigen::MatrixXcd vj = factor_columns(m.fd[j].blocks[b], sj);
        Eigen::MatrixXcd w = Eigen::kroneckerProduct(vj, vi);
        Eigen::MatrixXcd heff = w.adjoint() * hij * w;
        heff = 0.5 * (heff + heff.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(heff);
        m.table[k][a][b] = {es.eigenvalues()(0), es.eigenvectors().col(0)};
      }
    }
  }
  return m;
}

bool is_forest(int n, const std::vector<Edge>& edges) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::function<int(int)> find = [&](int x) { return p[x] == x ? x : p[x] = find(p[x]); };
  for (auto [u, v] : edges) {
    int a = find(u), b = find(v);
    if (a == b) return false;
    p[a] = b;
  }
  return true;
}

// Exact min-sum over a forest by leaf-to-root dynamic programming.
std::vector<int> forest_min_sum(const TwoBodyModel& m) {
  std::vector<std::vector<std::pair<int, int>>> adj(m.n);  // (neighbor, edge)
  for (int k = 0; k < static_cast<int>(m.edges.size()); ++k) {
    adj[m.edges[k].first].push_back({m.edges[k].second, k});
    adj[m.edges[k].second].push_back({m.edges[k].first, k});
  }
  auto pair_energy = [&](int k, int x, int lx, int ly) {
    return m.edges[k].first == x ? m.table[k][lx][ly].energy : m.table[k][ly][lx].energy;
  };
  std::vector<int> lab(m.n, -1), parent(m.n, -1), parent_edge(m.n, -1), order;
  std::vector<char> seen(m.n, 0);
  for (int r = 0; r < m.n; ++r) {
    if (seen[r]) continue;
    std::vector<int> stack{r};
    seen[r] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      order.push_back(x);
      for (auto [y, k] : adj[x])
        if (!seen[y]) {
          seen[y] = 1;
          parent[y] = x;
          parent_edge[y] = k;
          stack.push_back(y);
        }
    }
  }
  // cost[x][l]: best energy of the subtree below x with x labelled l.
  std::vector<std::vector<double>> cost(m.n);
  std::vector<std::vector<int>> best_child(m.n);
  for (int x = 0; x < m.n; ++x) cost[x] = m.single[x];
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int x = *it;
    if (parent[x] < 0) continue;
    int p = parent[x], k = parent_edge[x];
    std::vector<int> arg(m.blocks(p));
    for (int lp = 0; lp < m.blocks(p); ++lp) {
      double best = std::numeric_limits<double>::infinity();
      for (int lx = 0; lx < m.blocks(x); ++lx) {
        double c = cost[x][lx] + pair_energy(k, p, lp, lx);
        if (c < best) {
          best = c;
          arg[lp] = lx;
        }
      }
      cost[p][lp] += best;
    }
    best_child[x] = arg;
  }
  for (int x : order) {
    if (parent[x] < 0) {
      lab[x] = static_cast<int>(std::min_element(cost[x].begin(), cost[x].end()) - cost[x].begin());
    } else {
      lab[x] = best_child[x][lab[parent[x]]];
    }
  }
  return lab;
}

// Loopy min-sum messages, then single-site descent.
std::vector<int> heuristic_labels(const TwoBodyModel& m) {
  const int ne = static_cast<int>(m.edges.size());
  // msg[2k] : first -> second, msg[2k+1] : second -> first
  std::vector<std::vector<double>> msg(2 * ne);
  for (int k = 0; k < ne; ++k) {
    msg[2 * k].assign(m.blocks(m.edges[k].second), 0.0);
    msg[2 * k + 1].assign(m.blocks(m.edges[k].first), 0.0);
  }
  std::vector<std::vector<std::pair<int, int>>> incoming(m.n);  // (message index, edge)
  for (int k = 0; k < ne; ++k) {
    incoming[m.edges[k].second].push_back({2 * k, k});
    incoming[m.edges[k].first].push_back({2 * k + 1, k});
  }
  auto belief = [&](int x, int skip) {
    std::vector<double> b = m.single[x];
    for (auto [mi, k] : incoming[x])
      if (k != skip)
        for (int l = 0; l < m.blocks(x); ++l) b[l] += msg[mi][l];
    return b;
  };
  for (int it = 0; it < 60; ++it) {
    auto next = msg;
    for (int k = 0; k < ne; ++k) {
      auto [a, b] = m.edges[k];
      auto ba = belief(a, k), bb = belief(b, k);
      for (int lb = 0; lb < m.blocks(b); ++lb) {
        double best = std::numeric_limits<double>::infinity();
        for (int la = 0; la < m.blocks(a); ++la) best = std::min(best, ba[la] + m.table[k][la][lb].energy);
        next[2 * k][lb] = best;
      }
      for (int la = 0; la < m.blocks(a); ++la) {
        double best = std::numeric_limits<double>::infinity();
        for (int lb = 0; lb < m.blocks(b); ++lb) best = std::min(best, bb[lb] + m.table[k][la][lb].energy);
        next[2 * k + 1][la] = best;
      }
    }
    for (auto& v : next) {
      double lo = *std::min_element(v.begin(), v.end());
      for (double& x : v) x -= lo;
    }
    for (int q = 0; q < 2 * ne; ++q)
      for (std::size_t l = 0; l < msg[q].size(); ++l) msg[q][l] = 0.5 * msg[q][l] + 0.5 * next[q][l];
  }
  std::vector<int> lab(m.n);
  for (int x = 0; x < m.n; ++x) {
    auto b = belief(x, -1);
    lab[x] = static_cast<int>(std::min_element(b.begin(), b.end()) - b.begin());
  }
  double cur = m.energy(lab);
  for (bool improved = true; improved;) {
    improved = false;
    for (int x = 0; x < m.n; ++x)
      for (int l = 0; l < m.blocks(x); ++l) {
        int old = lab[x];
        if (l == old) continue;
        lab[x] = l;
        double e = m.energy(lab);
        if (e < cur - 1e-12) {
          cur = e;
          improved = true;
        } else {
          lab[x] = old;
        }
      }
  }
  return lab;
}

}  // namespace

TwoBodyResult solve_two_body(const CommutingHamiltonian& h, std::uint64_t seed) {
  h.validate();
  TwoBodyModel m = build_two_body(h, seed);
  TwoBodyResult out;

  double combos = 1;
  for (int i = 0; i < m.n; ++i) combos *= m.blocks(i);
  if (combos <= 1e6) {
    std::vector<int> lab(m.n, 0), best;
    double best_e = std::numeric_limits<double>::infinity();
    while (true) {
      double e = m.energy(lab);
      if (e < best_e - 1e-13) {
        best_e = e;
        best = lab;
      }
      int i = 0;
      while (i < m.n && ++lab[i] == m.blocks(i)) lab[i++] = 0;
      if (i == m.n) break;
    }
    out.labels = best;
  } else if (is_forest(m.n, m.edges)) {
    out.labels = forest_min_sum(m);
  } else {
    out.labels = heuristic_labels(m);
    out.exhaustive = false;
  }
  out.energy = m.energy(out.labels);

  Circuit c = Circuit::for_sites(h.site_dims);
  std::vector<Gate> first;
  for (int i = 0; i < m.n; ++i) {
    const auto& b = m.fd[i].blocks[out.labels[i]];
    Eigen::MatrixXcd u = unitary_with_first_column(b.isometry.col(0));
    if (!near_identity(u)) first.push_back(Gate::dense({i}, u));
  }
  if (!first.empty()) c.rounds.push_back(first);

  std::map<Edge, Gate> edge_gates;
  for (std::size_t k = 0; k < m.edges.size(); ++k) {
    auto [i, j] = m.edges[k];
    const auto& bi = m.fd[i].blocks[out.labels[i]];
    const auto& bj = m.fd[j].blocks[out.labels[j]];
    int si = m.slot(i, j), sj = m.slot(j, i);
    long fi = bi.factor_dims[si], fj = bj.factor_dims[sj];
    if (fi * fj == 1) continue;
    Eigen::MatrixXcd g = unitary_with_first_column(m.table[k][out.labels[i]][out.labels[j]].psi);
    const long ri = bi.rank(), rj = bj.rank();
    const long sti = factor_stride(bi, si), stj = factor_stride(bj, sj);
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(ri * rj, ri * rj);
    for (long a = 0; a < ri; ++a)
      for (long b = 0; b < rj; ++b) {
        long x = (a / sti) % fi, y = (b / stj) % fj;
        long a0 = a - x * sti, b0 = b - y * stj;
        for (long x2 = 0; x2 < fi; ++x2)
          for (long y2 = 0; y2 < fj; ++y2)
            big(a0 + x2 * sti + (b0 + y2 * stj) * ri, a + b * ri) = g(x2 + fi * y2, x + fi * y);
      }
    Eigen::MatrixXcd w = Eigen::kroneckerProduct(bj.isometry, bi.isometry);
    const long dim = w.rows();
    Eigen::MatrixXcd u = w * big * w.adjoint() + Eigen::MatrixXcd::Identity(dim, dim) - w * w.adjoint();
    if (near_identity(u)) continue;
    edge_gates.emplace(m.edges[k], Gate::dense({i, j}, u));
  }
  Graph eg(m.n);
  for (const auto& [e, g] : edge_gates) eg.add_edge(e.first, e.second);
  for (const auto& cls : edge_color(eg)) {
    std::vector<Gate> round;
    for (const auto& e : cls) round.push_back(edge_gates.at(e));
    c.rounds.push_back(round);
  }
  c.validate();
  out.circuit = std::move(c);
  return out;
}

namespace {

Eigen::MatrixXcd haar_unitary(int d, Rng& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd a(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) a(r, c) = cd(nd(rng), nd(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
  Eigen::MatrixXcd rr = qr.matrixQR();
  for (int c = 0; c < d; ++c) {
    cd z = rr(c, c);
    if (std::abs(z) > 0) q.col(c) *= z / std::abs(z);
  }
  return q;
}

Eigen::MatrixXcd random_projector(int d, int rank, Rng& rng) {
  Eigen::MatrixXcd u = haar_unitary(d, rng);
  Eigen::MatrixXcd v = u.leftCols(rank);
  return v * v.adjoint();
}

struct PlantedSite {
  std::vector<std::vector<int>> blocks;  // per block, factor dim per neighbor slot
  std::vector<long> offset;
  long dim() const {
    long d = 0;
    for (const auto& b : blocks) {
      long p = 1;
      for (int f : b) p *= f;
      d += p;
    }
    return d;
  }
};

}  // namespace

CommutingHamiltonian planted_two_body(const Graph& g, int max_site_dim, long max_total_dim, std::uint64_t seed) {
  if (max_site_dim < 1) throw std::invalid_argument("planted_two_body: bad site dimension");
  Rng rng(seed);
  const int n = g.vertex_count();
  std::vector<PlantedSite> sites(n);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < n; ++i) {
    int nb = 1 + coin(rng);
    for (int b = 0; b < nb; ++b) {
      std::vector<int> f(g.degree(i));
      for (int& x : f) x = 1 + coin(rng);
      sites[i].blocks.push_back(f);
    }
    // Shrink until the site fits.
    while (sites[i].dim() > max_site_dim) {
      bool changed = false;
      for (auto& b : sites[i].blocks)
        for (int& x : b)
          if (!changed && x > 1) {
            x = 1;
            changed = true;
          }
      if (!changed) sites[i].blocks.pop_back();
    }
  }
  auto total = [&] {
    double t = 1;
    for (const auto& s : sites) t *= static_cast<double>(s.dim());
    return t;
  };
  while (total() > static_cast<double>(max_total_dim)) {
    int big = 0;
    for (int i = 1; i < n; ++i)
      if (sites[i].dim() > sites[big].dim()) big = i;
    auto& s = sites[big];
    bool changed = false;
    for (auto& b : s.blocks)
      for (int& x : b)
        if (!changed && x > 1) {
          x = 1;
          changed = true;
        }
    if (!changed) s.blocks.pop_back();
  }
  std::vector<int> dims(n);
  for (int i = 0; i < n; ++i) {
    long off = 0;
    for (const auto& b : sites[i].blocks) {
      sites[i].offset.push_back(off);
      long p = 1;
      for (int f : b) p *= f;
      off += p;
    }
    dims[i] = static_cast<int>(off);
  }
  std::vector<Eigen::MatrixXcd> rot(n);
  for (int i = 0; i < n; ++i) rot[i] = haar_unitary(dims[i], rng);

  CommutingHamiltonian h(dims);
  h.is_projector_form = true;
  auto slot = [&](int i, int j) {
    const auto& nb = g.neighbors(i);
    return static_cast<int>(std::lower_bound(nb.begin(), nb.end(), j) - nb.begin());
  };
  for (auto [i, j] : g.edges()) {
    const int si = slot(i, j), sj = slot(j, i);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<long>(dims[i]) * dims[j], static_cast<long>(dims[i]) * dims[j]);
    for (std::size_t a = 0; a < sites[i].blocks.size(); ++a)
      for (std::size_t b = 0; b < sites[j].blocks.size(); ++b) {
        const auto& fa = sites[i].blocks[a];
        const auto& fb = sites[j].blocks[b];
        const int di = fa[si], dj = fb[sj];
        std::uniform_int_distribution<int> rk(0, di * dj);
        Eigen::MatrixXcd p = random_projector(di * dj, rk(rng), rng);
        long ra = 1, rb = 1, sa = 1, sb = 1;
        for (int k = 0; k < static_cast<int>(fa.size()); ++k) {
          if (k < si) sa *= fa[k];
          ra *= fa[k];
        }
        for (int k = 0; k < static_cast<int>(fb.size()); ++k) {
          if (k < sj) sb *= fb[k];
          rb *= fb[k];
        }
        for (long x = 0; x < ra; ++x)
          for (long y = 0; y < rb; ++y) {
            long dx = (x / sa) % di, dy = (y / sb) % dj;
            long x0 = x - dx * sa, y0 = y - dy * sb;
            for (long dx2 = 0; dx2 < di; ++dx2)
              for (long dy2 = 0; dy2 < dj; ++dy2) {
                long row = sites[i].offset[a] + x0 + dx2 * sa + (sites[j].offset[b] + y0 + dy2 * sb) * dims[i];
                long col = sites[i].offset[a] + x + (sites[j].offset[b] + y) * dims[i];
                m(row, col) += p(dx2 + di * dy2, dx + di * dy);
              }
          }
      }
    Eigen::MatrixXcd u = Eigen::kroneckerProduct(rot[j], rot[i]);
    Eigen::MatrixXcd t = u * m * u.adjoint();
    t = 0.5 * (t + t.adjoint()).eval();
    h.add(Term::dense({i, j}, t));
  }
  for (int i = 0; i < n; ++i) {
    if (sites[i].blocks.size() < 2 || coin(rng)) continue;
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dims[i], dims[i]);
    const long len = (sites[i].blocks.size() > 1 ? sites[i].offset[1] : dims[i]);
    p.block(0, 0, len, len).setIdentity();
    Eigen::MatrixXcd t = rot[i] * p * rot[i].adjoint();
    t = 0.5 * (t + t.adjoint()).eval();
    h.add(Term::dense({i}, t));
  }
  return h;
}


// ---- workspace ----

namespace {

std::vector<int> reduce_walk(const std::vector<int>& w) {
  std::vector<int> s;
  for (int v : w) {
    if (!s.empty() && s.back() == v) continue;
    if (s.size() >= 2 && s[s.size() - 2] == v) {
      s.pop_back();
    } else {
      s.push_back(v);
    }
  }
  return s;
}

bool has_prefix(const std::vector<int>& w, const std::vector<int>& p) {
  return w.size() >= p.size() && std::equal(p.begin(), p.end(), w.begin());
}

// Conjugates the global Pauli p by the Clifford c acting on `regs`.
PauliString conjugate_on(const Clifford& c, const std::vector<int>& regs, const PauliString& p) {
  PauliString piece = p.restricted(regs);
  PauliString img = c.conjugate(piece);
  PauliString out = p;
  for (std::size_t k = 0; k < regs.size(); ++k) out.set(regs[k], img.x(static_cast<int>(k)), img.z(static_cast<int>(k)));
  out.set_phase(p.phase() + img.phase());
  return out;
}

// Moves the letters on from[k] to to[k] of an n-qubit register.
PauliString relocate(const PauliString& p, const std::vector<int>& from, const std::vector<int>& to, int n) {
  PauliString out(n);
  std::vector<int> target(p.size());
  std::iota(target.begin(), target.end(), 0);
  for (std::size_t k = 0; k < from.size(); ++k) target[from[k]] = to[k];
  for (int q = 0; q < p.size(); ++q)
    if (p.x(q) || p.z(q)) out.set(target[q], p.x(q), p.z(q));
  out.set_phase(p.phase());
  return out;
}

StabilizerGroup stabilizer_group_of(const CommutingHamiltonian& h) {
  StabilizerGroup g(h.site_count());
  for (const auto& t : h.terms) g.add(t.global_stabilizer(h.site_count()));
  return g;
}

}  // namespace

int Workspace::add_register(int site, int dim, int vertex) {
  int copy = 0;
  for (const auto& [s, c] : registers)
    if (s == site) copy = std::max(copy, c + 1);
  registers.emplace_back(site, copy);
  position.push_back(vertex);
  h.site_dims.push_back(dim);
  return register_count() - 1;
}

Circuit Workspace::empty_circuit() const {
  Circuit c;
  for (int r = 0; r < register_count(); ++r) c.add_register(registers[r].first, registers[r].second, h.site_dims[r]);
  return c;
}

Workspace make_workspace(const CommutingHamiltonian& h, const LocalizationMap& m) {
  h.validate();
  if (m.source.zero_cell_count() != h.site_count()) throw std::invalid_argument("workspace: map source does not match sites");
  Workspace w;
  w.h = h;
  w.k1 = m.target;
  w.origin.resize(m.target.vertex_count());
  std::iota(w.origin.begin(), w.origin.end(), 0);
  for (int s = 0; s < h.site_count(); ++s) {
    w.registers.emplace_back(s, 0);
    w.position.push_back(m.vertex_image.at(s));
  }
  for (const auto& t : h.terms) {
    TermTree tree;
    tree.walks.push_back({m.vertex_image[t.support[0]]});
    for (std::size_t k = 1; k < t.support.size(); ++k) tree.walks.push_back(reduce_walk(m.walk(t.support[0], t.support[k])));
    w.trees.push_back(std::move(tree));
  }
  validate_workspace(w);
  return w;
}

void validate_workspace(const Workspace& w) {
  if (static_cast<int>(w.position.size()) != w.register_count() || w.h.site_count() != w.register_count())
    throw std::logic_error("workspace: register tables out of sync");
  if (w.trees.size() != w.h.terms.size()) throw std::logic_error("workspace: one tree per term expected");
  if (static_cast<int>(w.origin.size()) != w.k1.vertex_count()) throw std::logic_error("workspace: origin table size");
  for (std::size_t t = 0; t < w.trees.size(); ++t) {
    const auto& tr = w.trees[t];
    const auto& sup = w.h.terms[t].support;
    if (tr.walks.size() != sup.size()) throw std::logic_error("workspace: walk count mismatch");
    for (std::size_t k = 0; k < sup.size(); ++k) {
      const auto& wk = tr.walks[k];
      if (wk.empty() || wk.front() != tr.root()) throw std::logic_error("workspace: walks must share a root");
      if (wk.back() != w.position[sup[k]]) throw std::logic_error("workspace: walk does not end at the register");
      for (std::size_t q = 0; q + 1 < wk.size(); ++q)
        if (!w.k1.has_edge(wk[q], wk[q + 1])) throw std::logic_error("workspace: walk leaves K_1");
    }
  }
}

// ---- stabilizer cut ----

CutDecomposition cut_decompose(const Workspace& w, Edge cut) {
  auto [u, v] = make_edge(cut.first, cut.second);
  if (!w.k1.has_edge(u, v)) throw std::invalid_argument("cut_decompose: cut is not a 1-cell of K_1");
  CutDecomposition cd;
  cd.cut = {u, v};
  std::map<int, int> side;  // register -> 0 left, 1 right
  std::vector<char> crossing(w.h.terms.size(), 0);

  auto assign = [&](int reg, int s, std::vector<int> key) {
    auto [it, fresh] = side.emplace(reg, s);
    if (!fresh && it->second != s) throw std::logic_error("cut_decompose: register is left for one term and right for another");
    auto [kt, kfresh] = cd.lift.emplace(reg, key);
    if (!kfresh && kt->second != key) throw std::logic_error("cut_decompose: inconsistent lift of a register");
  };

  for (std::size_t t = 0; t < w.trees.size(); ++t) {
    const auto& walks = w.trees[t].walks;
    std::set<std::vector<int>> lifted;
    for (const auto& wk : walks)
      for (std::size_t q = 0; q + 1 < wk.size(); ++q)
        if (make_edge(wk[q], wk[q + 1]) == cd.cut) lifted.insert(std::vector<int>(wk.begin(), wk.begin() + q + 2));
    if (lifted.empty()) continue;
    if (lifted.size() > 1) throw std::logic_error("cut_decompose: a term crosses the cut twice");
    const std::vector<int> deep = *lifted.begin();
    const std::vector<int> shallow(deep.begin(), deep.end() - 1);
    const int a = shallow.back();
    std::vector<int> rev(shallow.rbegin(), shallow.rend());
    const auto& sup = w.h.terms[t].support;
    std::vector<std::vector<int>> near_keys(sup.size()), far_keys(sup.size());
    int near_count = 0, far_count = 0;
    for (std::size_t k = 0; k < sup.size(); ++k) {
      const auto& wk = walks[k];
      if (has_prefix(wk, deep)) {
        far_keys[k].assign(wk.begin() + static_cast<long>(shallow.size()), wk.end());
        ++far_count;
      } else {
        std::vector<int> path = rev;
        path.insert(path.end(), wk.begin() + 1, wk.end());
        near_keys[k] = reduce_walk(path);
        ++near_count;
      }
    }
    if (near_count == 0 || far_count == 0) {
      // The walks pass the cell without registers beyond it: re-root on the occupied side.
      TermTree tr;
      const std::vector<int>& base = far_count ? deep : shallow;
      std::vector<int> back(base.rbegin(), base.rend());
      for (const auto& wk : walks) {
        std::vector<int> path = back;
        path.insert(path.end(), wk.begin() + 1, wk.end());
        tr.walks.push_back(reduce_walk(path));
      }
      cd.rerooted[static_cast<int>(t)] = tr;
      continue;
    }
    crossing[t] = 1;
    cd.h_lr.push_back(static_cast<int>(t));
    const int near_side = a == u ? 0 : 1;
    for (std::size_t k = 0; k < sup.size(); ++k) {
      if (!far_keys[k].empty()) {
        assign(sup[k], 1 - near_side, far_keys[k]);
      } else {
        assign(sup[k], near_side, near_keys[k]);
      }
    }
  }
  for (auto [r, s] : side) (s == 0 ? cd.left : cd.right).push_back(r);
  std::set<int> other;
  for (std::size_t t = 0; t < w.h.terms.size(); ++t) {
    if (crossing[t]) continue;
    bool tl = false, tr = false;
    for (int r : w.h.terms[t].support) {
      auto it = side.find(r);
      if (it != side.end()) (it->second == 0 ? tl : tr) = true;
    }
    if (tl && tr) throw std::logic_error("cut_decompose: a term off the cut touches both sides");
    if (tl || tr) {
      (tl ? cd.h_lo : cd.h_ro).push_back(static_cast<int>(t));
      for (int r : w.h.terms[t].support)
        if (!side.count(r)) other.insert(r);
    } else {
      cd.rest.push_back(static_cast<int>(t));
    }
  }
  cd.other.assign(other.begin(), other.end());
  return cd;
}

CutDecomposition cut_decompose(const CommutingHamiltonian& h, const LocalizationMap& m, Edge cut) {
  return cut_decompose(make_workspace(h, m), cut);
}

namespace {

// Symplectic frame of one side: factor pairs (a_k, b_k), then (d_j, c_j)
// for the centers, then the remaining pairs.
struct Frame {
  int n = 0, K = 0, J = 0;
  std::vector<std::pair<PauliString, PauliString>> basis;

  PauliString a(int k) const { return basis[k].first; }
  PauliString b(int k) const { return basis[k].second; }
  PauliString d(int j) const { return basis[K + j].first; }
  PauliString c(int j) const { return basis[K + j].second; }

  // Bit k: exponent of a_k, bit K+k: exponent of b_k.
  Bits factor(const PauliString& p) const {
    Bits out(bit_words(std::max(1, 2 * K)), 0);
    for (int k = 0; k < K; ++k) {
      set_bit(out, k, !p.commutes(b(k)));
      set_bit(out, K + k, !p.commutes(a(k)));
    }
    return out;
  }
  Bits center(const PauliString& p) const {
    Bits out(bit_words(std::max(1, J)), 0);
    for (int j = 0; j < J; ++j) set_bit(out, j, !p.commutes(d(j)));
    return out;
  }
};

Frame make_frame(const std::vector<std::pair<PauliString, PauliString>>& pairs, const std::vector<PauliString>& centers,
                 int n) {
  Frame f;
  f.n = n;
  f.K = static_cast<int>(pairs.size());
  f.J = static_cast<int>(centers.size());
  f.basis = complete_symplectic_basis(pairs, centers, n);
  return f;
}

std::vector<PauliString> restrict_all(const std::vector<PauliString>& ps, const std::vector<int>& regs) {
  std::vector<PauliString> out;
  for (const auto& p : ps) out.push_back(p.restricted(regs));
  return out;
}

PauliString product_of(const std::vector<PauliString>& gens, const Bits& coeffs, int n) {
  PauliString p(n);
  for (std::size_t j = 0; j < gens.size(); ++j)
    if (get_bit(coeffs, static_cast<int>(j))) p *= gens[j];
  return p.unsigned_copy();
}

struct SideCenters {
  std::vector<PauliString> centers;  // local, adapted
  int fixed = 0;
  std::vector<PauliString> non_generated;  // local
};

// Centers of the group generated by all parts (local Paulis on one side).
// With `combos` (index sets into the flattened parts whose product is
// central) the first `fixed` centers span the combos' products.
SideCenters side_centers(const std::vector<std::vector<PauliString>>& parts_by_term, int n,
                         const std::vector<std::vector<int>>* combos) {
  std::vector<PauliString> all;
  for (const auto& ps : parts_by_term) all.insert(all.end(), ps.begin(), ps.end());
  SideCenters out;
  if (n == 0) return out;
  auto split = symplectic_split(all, n);
  std::vector<PauliString> centers = split.isotropic;

  Gf2Basis per_term(2 * n);
  for (const auto& ps : parts_by_term)
    for (const auto& c : pauli_center(ps, n)) per_term.insert(c.symplectic());
  for (const auto& c : centers)
    if (!per_term.express(c.symplectic())) {
      out.non_generated.push_back(c);
      per_term.insert(c.symplectic());
    }

  if (combos && !centers.empty()) {
    Frame f0 = make_frame(split.pairs, centers, n);
    const int J = f0.J;
    Gf2Basis span(J);
    std::vector<Bits> basis;
    for (const auto& combo : *combos) {
      Bits g(bit_words(J), 0);
      for (int idx : combo) xor_into(g, f0.center(all[idx]));
      if (!span.insert(g)) basis.push_back(g);
    }
    out.fixed = static_cast<int>(basis.size());
    for (int j = 0; j < J; ++j) {
      Bits e(bit_words(J), 0);
      set_bit(e, j, true);
      if (!span.insert(e)) basis.push_back(e);
    }
    centers.clear();
    for (const auto& v : basis) centers.push_back(product_of(split.isotropic, v, n));
  }
  out.centers = centers;
  return out;
}

}  // namespace

StabilizerConstraints stabilizer_constraints(const std::vector<std::vector<PauliString>>& terms,
                                             const std::vector<int>& L, const std::vector<int>& R) {
  StabilizerConstraints sc;
  sc.left = L;
  sc.right = R;
  for (const auto& t : terms) {
    if (t.empty()) throw std::invalid_argument("stabilizer_constraints: empty term");
    if (t.size() != 1) sc.stabilizer = false;
  }
  if (terms.empty()) return sc;
  const int n = terms[0][0].size();
  sc.qubits = n;
  const int nl = static_cast<int>(L.size()), nr = static_cast<int>(R.size());
  std::vector<std::vector<PauliString>> lp, rp;
  for (const auto& t : terms) {
    lp.push_back(restrict_all(t, L));
    rp.push_back(restrict_all(t, R));
  }

  std::vector<std::vector<int>> combos;
  if (sc.stabilizer) {
    std::vector<PauliString> lflat, rflat;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      lflat.push_back(lp[t][0]);
      rflat.push_back(rp[t][0]);
    }
    auto split = symplectic_split(lflat, nl);
    Frame f = make_frame(split.pairs, split.isotropic, nl);
    std::vector<Bits> cols;
    for (const auto& p : lflat) cols.push_back(f.factor(p));
    combos = gf2_nullspace(cols, std::max(1, 2 * f.K));
    auto rsplit = symplectic_split(rflat, nr);
    Frame fr = make_frame(rsplit.pairs, rsplit.isotropic, nr);
    for (const auto& combo : combos) {
      Bits acc(bit_words(std::max(1, 2 * fr.K)), 0);
      for (int t : combo) xor_into(acc, fr.factor(rflat[t]));
      if (!is_zero(acc)) throw std::logic_error("stabilizer_constraints: central on one side only");
    }
  }
  SideCenters sl = side_centers(lp, nl, sc.stabilizer ? &combos : nullptr);
  SideCenters sr = side_centers(rp, nr, sc.stabilizer ? &combos : nullptr);
  for (const auto& c : sl.centers) sc.left_center.push_back(c.embedded(n, L));
  for (const auto& c : sr.centers) sc.right_center.push_back(c.embedded(n, R));
  for (const auto& c : sl.non_generated) sc.left_non_generated.push_back(c.embedded(n, L));
  for (const auto& c : sr.non_generated) sc.right_non_generated.push_back(c.embedded(n, R));
  sc.left_fixed = sl.fixed;
  sc.right_fixed = sr.fixed;
  if (!sc.stabilizer) return sc;

  for (const auto& combo : combos) {
    PauliString p(n);
    for (int t : combo) p *= terms[t][0];
    CenterConstraint c;
    c.terms = combo;
    c.c_left = p.restricted(L).embedded(n, L);
    c.c_right = p.restricted(R).embedded(n, R);
    c.sigma = p.sign();
    sc.constraints.push_back(c);
  }
  StabilizerGroup g(n);
  try {
    for (const auto& t : terms) g.add(t[0]);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("stabilizer_constraints: H_LR has no zero-energy state");
  }
  choose_witness(sc, g);
  return sc;
}

void choose_witness(StabilizerConstraints& sc, StabilizerGroup group) {
  auto fix = [&](const PauliString& c) {
    int s = group.sign_of(c);
    if (s == 0) {
      group.add(c);
      s = 1;
    }
    return s;
  };
  sc.tau_left.clear();
  sc.tau_right.clear();
  sc.theta_left.clear();
  sc.theta_right.clear();
  for (const auto& c : sc.left_center) sc.tau_left.push_back(fix(c));
  for (const auto& c : sc.right_center) sc.tau_right.push_back(fix(c));
  for (const auto& c : sc.constraints) {
    int tl = group.sign_of(c.c_left), tr = group.sign_of(c.c_right);
    if (tl == 0 || tr == 0 || tl * tr != c.sigma) throw std::logic_error("choose_witness: witness violates a constraint");
    sc.theta_left.push_back(tl);
    sc.theta_right.push_back(tr);
  }
}

CrossResult build_cross_hamiltonian(const Workspace& w, const CutDecomposition& cd, const StabilizerConstraints& sc) {
  for (int t : cd.h_lr) {
    if (w.h.terms[t].is_stabilizer()) continue;
    auto alg = interaction_algebra(w.h, cd.left, cd.h_lr);
    if (algebra_center(alg).size() > 1)
      throw UnsupportedRegime(
          "counterexample regime: H_LR has non-Pauli central elements on L; ancilla projectors cannot "
          "reproduce their constraints (qutrit obstruction)");
    throw UnsupportedRegime("unsupported regime: non-stabilizer cut without central elements");
  }
  const int n = w.register_count();
  const auto& L = cd.left;
  const auto& R = cd.right;
  if (sc.left != L || sc.right != R) throw std::invalid_argument("build_cross_hamiltonian: constraints for other sites");
  const int nl = static_cast<int>(L.size()), nr = static_cast<int>(R.size());
  const auto [u, v] = cd.cut;

  std::vector<PauliString> S;
  for (int t : cd.h_lr) S.push_back(w.h.terms[t].global_stabilizer(n));
  StabilizerConstraints wit = sc;
  choose_witness(wit, stabilizer_group_of(w.h));

  // Frame on L with the adapted centers.
  auto lparts = restrict_all(S, L);
  auto split = symplectic_split(lparts, nl);
  std::vector<PauliString> lc;
  for (const auto& c : sc.left_center) lc.push_back(c.restricted(L));
  Frame f = make_frame(split.pairs, lc, nl);
  const int K = f.K, J = f.J, Jf = sc.left_fixed;

  // Pauli on the factor qubits flipping exactly the terms that carry free center j.
  std::vector<PauliString> Q(J, PauliString(nl));
  for (int j = Jf; j < J; ++j) {
    std::vector<Bits> rows;
    std::vector<int> rhs;
    for (const auto& p : lparts) {
      Bits fb = f.factor(p);
      Bits row(bit_words(std::max(1, 2 * K)), 0);
      for (int k = 0; k < K; ++k) {
        set_bit(row, k, get_bit(fb, K + k));
        set_bit(row, K + k, get_bit(fb, k));
      }
      rows.push_back(row);
      rhs.push_back(get_bit(f.center(p), j));
    }
    auto sol = gf2_solve(rows, rhs, std::max(1, 2 * K));
    if (!sol) throw std::logic_error("build_cross_hamiltonian: no correction for a free center");
    PauliString q(nl);
    for (int k = 0; k < K; ++k) {
      if (get_bit(sol->particular, k)) q *= f.a(k);
      if (get_bit(sol->particular, K + k)) q *= f.b(k);
    }
    Q[j] = q.unsigned_copy();
  }

  // U: swap the factor qubits of L with its copy, then controlled corrections.
  std::vector<int> lr_idx(nl), la_idx(nl);
  std::iota(lr_idx.begin(), lr_idx.end(), 0);
  std::iota(la_idx.begin(), la_idx.end(), nl);
  Clifford U;
  if (nl > 0) {
    struct Elem {
      PauliString p;
      int q;
      bool x, real;
    };
    std::vector<Elem> elems;
    for (int q = 0; q < nl; ++q)
      for (bool x : {true, false}) {
        const PauliString& e = x ? f.basis[q].first : f.basis[q].second;
        elems.push_back({e.embedded(2 * nl, lr_idx), q, x, true});
        elems.push_back({e.embedded(2 * nl, la_idx), q, x, false});
      }
    std::vector<PauliString> basis, img;
    for (const auto& e : elems) {
      basis.push_back(e.p);
      if (e.q < K) {
        const PauliString& loc = e.x ? f.basis[e.q].first : f.basis[e.q].second;
        img.push_back(loc.embedded(2 * nl, e.real ? la_idx : lr_idx));
      } else {
        img.push_back(e.p);
      }
    }
    U = Clifford::from_basis_map(basis, img);
    for (int j = Jf; j < J; ++j) {
      PauliString tc = f.c(j).embedded(2 * nl, lr_idx);
      tc.set_sign(wit.tau_left[j]);
      PauliString qj = Q[j].embedded(2 * nl, lr_idx);
      std::vector<PauliString> vimg;
      for (const auto& e : elems) {
        if (e.real && e.q < K && !e.p.commutes(qj)) {
          vimg.push_back(e.p * tc);
        } else if (e.real && e.q == K + j && e.x) {
          vimg.push_back(e.p * qj);
        } else {
          vimg.push_back(e.p);
        }
      }
      U = U.then(Clifford::from_basis_map(basis, vimg));
    }
  }

  CrossResult out;
  Workspace nx = w;
  int nv = w.k1.vertex_count();
  std::vector<Edge> edges;
  for (const auto& e : w.k1.edges())
    if (e != cd.cut) edges.push_back(e);
  std::vector<int> origin = w.origin;
  std::map<std::vector<int>, int> node_l, node_r;
  auto node_path = [&](std::map<std::vector<int>, int>& nodes, const std::vector<int>& key, int anchor) {
    std::vector<int> path;
    for (std::size_t len = 1; len <= key.size(); ++len) {
      std::vector<int> pre(key.begin(), key.begin() + static_cast<long>(len));
      auto it = nodes.find(pre);
      if (it == nodes.end()) {
        int id = nv++;
        origin.push_back(w.origin[pre.back()]);
        edges.emplace_back(len == 1 ? anchor : nodes.at(std::vector<int>(pre.begin(), pre.end() - 1)), id);
        it = nodes.emplace(pre, id).first;
      }
      path.push_back(it->second);
    }
    return path;
  };
  std::vector<int> la(nl), ra(nr);
  std::vector<std::vector<int>> la_path(nl), ra_path(nr);
  for (int k = 0; k < nl; ++k) {
    la_path[k] = node_path(node_l, cd.lift.at(L[k]), v);
    la[k] = nx.add_register(w.registers[L[k]].first, 2, la_path[k].back());
  }
  for (int k = 0; k < nr; ++k) {
    ra_path[k] = node_path(node_r, cd.lift.at(R[k]), u);
    ra[k] = nx.add_register(w.registers[R[k]].first, 2, ra_path[k].back());
  }
  nx.k1 = make_graph(nv, edges);
  nx.origin = origin;
  const int n2 = nx.register_count();

  CommutingHamiltonian nh(nx.h.site_dims);
  nh.is_projector_form = w.h.is_projector_form;
  std::vector<TermTree> trees;
  std::set<int> crossing(cd.h_lr.begin(), cd.h_lr.end());
  for (int t = 0; t < static_cast<int>(w.h.terms.size()); ++t) {
    if (crossing.count(t)) continue;
    nh.add(w.h.terms[t]);
    auto it = cd.rerooted.find(t);
    trees.push_back(it == cd.rerooted.end() ? w.trees[t] : it->second);
  }
  auto add_term = [&](const PauliString& p, const std::map<int, std::vector<int>>& walk_of) {
    Term term = Term::from_global_stabilizer(p);
    TermTree tr;
    for (int r : term.support) tr.walks.push_back(walk_of.at(r));
    nh.add(term);
    trees.push_back(tr);
  };
  std::vector<int> all_old(n);
  std::iota(all_old.begin(), all_old.end(), 0);
  std::map<int, std::vector<int>> walk_lr_ra, walk_la_rr, walk_la, walk_ra;
  for (int k = 0; k < nl; ++k) {
    walk_lr_ra[L[k]] = cd.lift.at(L[k]);
    std::vector<int> wv{v};
    wv.insert(wv.end(), la_path[k].begin(), la_path[k].end());
    walk_la_rr[la[k]] = wv;
    walk_la[la[k]] = la_path[k];
  }
  for (int k = 0; k < nr; ++k) {
    walk_la_rr[R[k]] = cd.lift.at(R[k]);
    std::vector<int> wu{u};
    wu.insert(wu.end(), ra_path[k].begin(), ra_path[k].end());
    walk_lr_ra[ra[k]] = wu;
    walk_ra[ra[k]] = ra_path[k];
  }
  for (const auto& s : S) {
    PauliString s2 = s.embedded(n2, all_old);
    add_term(relocate(s2, R, ra, n2), walk_lr_ra);
    add_term(relocate(s2, L, la, n2), walk_la_rr);
  }
  for (int j = 0; j < static_cast<int>(wit.left_center.size()); ++j) {
    PauliString c = relocate(wit.left_center[j].embedded(n2, all_old), L, la, n2);
    c.set_sign(wit.tau_left[j]);
    add_term(c, walk_la);
  }
  for (int j = 0; j < static_cast<int>(wit.right_center.size()); ++j) {
    PauliString c = relocate(wit.right_center[j].embedded(n2, all_old), R, ra, n2);
    c.set_sign(wit.tau_right[j]);
    add_term(c, walk_ra);
  }
  nx.h = nh;
  nx.trees = trees;
  validate_workspace(nx);

  StabilizerGroup g2(n2);
  try {
    g2 = stabilizer_group_of(nx.h);
  } catch (const std::invalid_argument&) {
    throw std::logic_error("build_cross_hamiltonian: cross Hamiltonian is frustrated");
  }
  std::vector<int> uregs = L;
  uregs.insert(uregs.end(), la.begin(), la.end());
  Clifford uinv = nl > 0 ? U.inverse() : Clifford();
  for (const auto& t : w.h.terms) {
    PauliString p = t.global_stabilizer(n).embedded(n2, all_old);
    if (nl > 0) p = conjugate_on(uinv, uregs, p);
    if (g2.sign_of(p) != 1) throw std::logic_error("build_cross_hamiltonian: unitary does not map ground states back");
  }
  if (nl > 0 && !U.is_identity()) out.unitary = Gate::from_clifford(uregs, U);
  out.next = std::move(nx);
  out.left_copies = la;
  out.right_copies = ra;
  return out;
}

// ---- tree stage ----

namespace {

struct ForestInfo {
  std::vector<int> parent, depth, root;
};

ForestInfo forest_info(const Graph& g) {
  const int n = g.vertex_count();
  ForestInfo f;
  f.parent.assign(n, -1);
  f.depth.assign(n, -1);
  f.root.assign(n, -1);
  for (int r = 0; r < n; ++r) {
    if (f.depth[r] >= 0) continue;
    f.depth[r] = 0;
    f.root[r] = r;
    std::queue<int> q;
    q.push(r);
    while (!q.empty()) {
      int x = q.front();
      q.pop();
      for (int y : g.neighbors(x)) {
        if (y == f.parent[x]) continue;
        if (f.depth[y] >= 0) throw std::logic_error("tree stage: K_1 is not a forest");
        f.depth[y] = f.depth[x] + 1;
        f.parent[y] = x;
        f.root[y] = r;
        q.push(y);
      }
    }
  }
  return f;
}

int ancestor_at(const ForestInfo& f, int v, int d) {
  while (f.depth[v] > d) v = f.parent[v];
  return v;
}

int lowest_common_ancestor(const ForestInfo& f, int a, int b) {
  if (f.root[a] != f.root[b]) throw std::logic_error("tree stage: term spans two components of K_1");
  while (f.depth[a] > f.depth[b]) a = f.parent[a];
  while (f.depth[b] > f.depth[a]) b = f.parent[b];
  while (a != b) {
    a = f.parent[a];
    b = f.parent[b];
  }
  return a;
}

std::vector<int> unique_positions(const Workspace& w, const Term& t) {
  std::set<int> p;
  for (int r : t.support) p.insert(w.position[r]);
  return {p.begin(), p.end()};
}

// Registers grouped by cluster label of their position, labels compacted.
std::vector<std::vector<int>> register_clusters(const Workspace& w, const std::vector<int>& vertex_label,
                                                std::vector<int>& cluster_of) {
  std::map<int, int> compact;
  std::vector<std::vector<int>> regs;
  cluster_of.assign(w.register_count(), -1);
  for (int r = 0; r < w.register_count(); ++r) {
    int lab = vertex_label[w.position[r]];
    auto it = compact.find(lab);
    if (it == compact.end()) {
      it = compact.emplace(lab, static_cast<int>(regs.size())).first;
      regs.emplace_back();
    }
    cluster_of[r] = it->second;
    regs[it->second].push_back(r);
  }
  return regs;
}

std::vector<int> term_clusters(const Term& t, const std::vector<int>& cluster_of) {
  std::set<int> c;
  for (int r : t.support) c.insert(cluster_of[r]);
  if (c.size() > 2) throw std::logic_error("tree stage: a term meets three clusters");
  return {c.begin(), c.end()};
}

}  // namespace

std::vector<int> forest_band_clustering(const Graph& forest, int width) {
  const int n = forest.vertex_count();
  std::vector<int> label(n);
  std::iota(label.begin(), label.end(), 0);
  if (width <= 0) return label;
  ForestInfo f = forest_info(forest);
  std::map<std::pair<int, int>, int> ids;
  for (int v = 0; v < n; ++v) {
    int band = f.depth[v] / width;
    int anchor = ancestor_at(f, v, std::max(0, (band - 1) * width));
    auto it = ids.emplace(std::make_pair(band, anchor), static_cast<int>(ids.size())).first;
    label[v] = it->second;
  }
  return label;
}

std::vector<int> tree_stage_clusters(const Workspace& w) {
  ForestInfo f = forest_info(w.k1);
  bool on_edges = true;
  int width = 0;
  for (const auto& t : w.h.terms) {
    auto pos = unique_positions(w, t);
    if (pos.size() > 2 || (pos.size() == 2 && !w.k1.has_edge(pos[0], pos[1]))) on_edges = false;
    int top = pos[0];
    for (int p : pos) top = lowest_common_ancestor(f, top, p);
    for (int p : pos) width = std::max(width, f.depth[p] - f.depth[top]);
  }
  std::vector<int> label = forest_band_clustering(w.k1, on_edges ? 0 : std::max(1, width));
  std::vector<int> cluster_of;
  register_clusters(w, label, cluster_of);
  for (const auto& t : w.h.terms) term_clusters(t, cluster_of);
  return label;
}

Circuit stabilizer_tree_solve(const Workspace& w) {
  if (!w.h.is_stabilizer()) throw std::invalid_argument("stabilizer_tree_solve: stabilizer Hamiltonian required");
  const int n = w.register_count();
  std::vector<int> cluster_of;
  auto regs = register_clusters(w, tree_stage_clusters(w), cluster_of);
  const int nc = static_cast<int>(regs.size());

  std::vector<PauliString> S;
  std::vector<std::vector<int>> singles(nc);
  std::map<Edge, std::vector<int>> pairs_of;
  for (int t = 0; t < static_cast<int>(w.h.terms.size()); ++t) {
    S.push_back(w.h.terms[t].global_stabilizer(n));
    auto c = term_clusters(w.h.terms[t], cluster_of);
    if (c.size() == 1) {
      singles[c[0]].push_back(t);
    } else {
      pairs_of[{c[0], c[1]}].push_back(t);
    }
  }

  struct ClusterFrame {
    std::map<Edge, std::pair<int, int>> factor;  // edge -> [begin, end) virtual qubits
    int center_begin = 0, center_end = 0;
    std::vector<PauliString> centers;
    Clifford V, Vinv;
  };
  std::vector<ClusterFrame> frames(nc);
  for (int c = 0; c < nc; ++c) {
    const int m = static_cast<int>(regs[c].size());
    std::vector<std::pair<PauliString, PauliString>> pairs;
    std::vector<PauliString> iso;
    for (const auto& [e, ts] : pairs_of) {
      if (e.first != c && e.second != c) continue;
      std::vector<PauliString> gens;
      for (int t : ts) gens.push_back(S[t].restricted(regs[c]));
      auto sp = symplectic_split(gens, m);
      frames[c].factor[e] = {static_cast<int>(pairs.size()), static_cast<int>(pairs.size() + sp.pairs.size())};
      pairs.insert(pairs.end(), sp.pairs.begin(), sp.pairs.end());
      iso.insert(iso.end(), sp.isotropic.begin(), sp.isotropic.end());
    }
    for (int t : singles[c]) iso.push_back(S[t].restricted(regs[c]));
    auto cs = symplectic_split(iso, m);
    if (!cs.pairs.empty()) throw std::logic_error("stabilizer_tree_solve: centers do not commute");
    auto basis = complete_symplectic_basis(pairs, cs.isotropic, m);
    std::vector<PauliString> xs, zs;
    for (const auto& [x, z] : basis) {
      xs.push_back(x);
      zs.push_back(z);
    }
    frames[c].center_begin = static_cast<int>(pairs.size());
    frames[c].center_end = frames[c].center_begin + static_cast<int>(cs.isotropic.size());
    frames[c].centers = cs.isotropic;
    frames[c].V = Clifford::from_images(xs, zs);
    frames[c].Vinv = frames[c].V.inverse();
  }

  // Center eigenvalues of one zero-energy state.
  StabilizerGroup group(n);
  for (const auto& s : S) group.add(s);
  std::vector<std::vector<char>> flip(nc);
  for (int c = 0; c < nc; ++c)
    for (const auto& z : frames[c].centers) {
      PauliString g = z.embedded(n, regs[c]);
      int sgn = group.sign_of(g);
      if (sgn == 0) {
        group.add(g);
        sgn = 1;
      }
      flip[c].push_back(sgn < 0);
    }

  // Virtual image of a term: letters on the edge's factor qubits, with the
  // center eigenvalues folded into the phase.
  auto virtual_term = [&](int t, const std::vector<int>& cls, const Edge* e, int& nq) {
    std::vector<int> offset;
    nq = 0;
    for (int c : cls) {
      offset.push_back(nq);
      if (e) nq += frames[c].factor.at(*e).second - frames[c].factor.at(*e).first;
    }
    PauliString out(nq);
    int phase = S[t].phase();
    for (std::size_t k = 0; k < cls.size(); ++k) {
      const int c = cls[k];
      const auto& fr = frames[c];
      PauliString vp = fr.Vinv.conjugate(S[t].restricted(regs[c]));
      phase += vp.phase();
      auto range = e ? fr.factor.at(*e) : std::make_pair(0, 0);
      for (int q = 0; q < vp.size(); ++q) {
        if (!vp.x(q) && !vp.z(q)) continue;
        if (q >= range.first && q < range.second) {
          out.set(offset[k] + q - range.first, vp.x(q), vp.z(q));
        } else if (q >= fr.center_begin && q < fr.center_end && !vp.x(q)) {
          if (flip[c][q - fr.center_begin]) phase += 2;
        } else {
          throw std::logic_error("stabilizer_tree_solve: term leaves its factor qubits");
        }
      }
    }
    out.set_phase(phase);
    return out;
  };

  for (int c = 0; c < nc; ++c)
    for (int t : singles[c]) {
      int nq = 0;
      PauliString p = virtual_term(t, {c}, nullptr, nq);
      if (p.phase() != 0) throw std::logic_error("stabilizer_tree_solve: frustrated single-cluster term");
    }

  Circuit circ = w.empty_circuit();
  std::vector<Gate> round_a, round_b;
  for (const auto& [e, ts] : pairs_of) {
    int nq = 0;
    std::vector<int> cls{e.first, e.second};
    std::vector<PauliString> virt;
    for (int t : ts) virt.push_back(virtual_term(t, cls, &e, nq));
    if (nq == 0) {
      for (const auto& p : virt)
        if (p.phase() != 0) throw std::logic_error("stabilizer_tree_solve: frustrated edge term");
      continue;
    }
    StabilizerGroup eg(nq);
    try {
      for (const auto& p : virt) eg.add(p);
    } catch (const std::invalid_argument&) {
      throw std::logic_error("stabilizer_tree_solve: frustrated edge constraints");
    }
    Clifford prep = state_preparation(complete_stabilizers(eg.generators(), nq), nq);
    if (prep.is_identity()) continue;
    std::vector<int> support;
    for (int c : cls) {
      auto [b, en] = frames[c].factor.at(e);
      for (int q = b; q < en; ++q) support.push_back(regs[c][q]);
    }
    round_a.push_back(Gate::from_clifford(support, prep));
  }
  for (int c = 0; c < nc; ++c) {
    const int m = static_cast<int>(regs[c].size());
    PauliString x(m);
    for (int j = 0; j < static_cast<int>(flip[c].size()); ++j)
      if (flip[c][j]) x.set_letter(frames[c].center_begin + j, 'X');
    Clifford g = Clifford::pauli(x).then(frames[c].V);
    if (!g.is_identity()) round_b.push_back(Gate::from_clifford(regs[c], g));
  }
  if (!round_a.empty()) circ.rounds.push_back(round_a);
  if (!round_b.empty()) circ.rounds.push_back(round_b);
  circ.validate();
  return circ;
}

CutSolveResult stabilizer_cut_solve(const CommutingHamiltonian& h, const LocalizationMap& m) {
  if (!h.is_stabilizer())
    throw UnsupportedRegime(
        "counterexample regime: stabilizer_cut_solve needs qubit Pauli projectors; a non-stabilizer cut may "
        "carry non-Pauli central elements");
  Workspace w = make_workspace(h, m);
  CutSolveResult out;
  std::vector<Gate> unitaries;
  for (auto cyc = shortest_cycle(w.k1); !cyc.empty(); cyc = shortest_cycle(w.k1)) {
    out.betti.push_back(first_betti(w.k1));
    Edge e = w.k1.has_edge(cyc.front(), cyc.back()) ? make_edge(cyc.front(), cyc.back()) : make_edge(cyc[0], cyc[1]);
    auto cd = cut_decompose(w, e);
    std::vector<std::vector<PauliString>> terms;
    for (int t : cd.h_lr) terms.push_back({w.h.terms[t].global_stabilizer(w.register_count())});
    auto sc = stabilizer_constraints(terms, cd.left, cd.right);
    auto cr = build_cross_hamiltonian(w, cd, sc);
    if (cr.unitary) unitaries.push_back(*cr.unitary);
    w = std::move(cr.next);
    ++out.cuts;
  }
  out.betti.push_back(first_betti(w.k1));
  out.circuit = stabilizer_tree_solve(w);
  std::reverse(unitaries.begin(), unitaries.end());
  out.circuit.append_scheduled(unitaries);
  out.circuit.validate();
  out.final_workspace = std::move(w);
  return out;
}

// ---- tree reduction ----

namespace {

// BFS tree from src: parent pointers, -1 for unreachable and the root.
std::vector<int> bfs_parents(const Graph& g, int src, std::vector<int>& dist) {
  const int n = g.vertex_count();
  std::vector<int> parent(n, -1);
  dist.assign(n, -1);
  dist[src] = 0;
  std::queue<int> q;
  q.push(src);
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    for (int y : g.neighbors(x))
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        parent[y] = x;
        q.push(y);
      }
  }
  return parent;
}

TermTree geodesic_tree(const Workspace& w, const Term& t) {
  std::vector<int> dist;
  const int root = w.position[t.support[0]];
  auto parent = bfs_parents(w.k1, root, dist);
  TermTree tree;
  for (int r : t.support) {
    int x = w.position[r];
    if (dist[x] < 0) throw std::logic_error("tree_reduce: term split across components");
    std::vector<int> walk{x};
    while (x != root) walk.push_back(x = parent[x]);
    std::reverse(walk.begin(), walk.end());
    tree.walks.push_back(std::move(walk));
  }
  return tree;
}

// Vertices incident to a non-bridge edge.
std::vector<bool> cycle_vertices(const Graph& g) {
  const int n = g.vertex_count();
  std::vector<int> tin(n, -1), low(n, 0), parent(n, -1);
  int timer = 0;
  std::function<void(int)> dfs = [&](int v) {
    tin[v] = low[v] = timer++;
    for (int y : g.neighbors(v)) {
      if (y == parent[v]) continue;
      if (tin[y] >= 0) {
        low[v] = std::min(low[v], tin[y]);
      } else {
        parent[y] = v;
        dfs(y);
        low[v] = std::min(low[v], low[y]);
      }
    }
  };
  for (int v = 0; v < n; ++v)
    if (tin[v] < 0) dfs(v);
  std::vector<bool> on(n, false);
  for (const auto& [a, b] : g.edges()) {
    bool bridge = (parent[b] == a && low[b] > tin[a]) || (parent[a] == b && low[a] > tin[b]);
    if (!bridge) on[a] = on[b] = true;
  }
  return on;
}

Eigen::MatrixXcd factor_swap(const std::vector<int>& factor_dims, int slot) {
  long rank = 1;
  for (int d : factor_dims) rank *= d;
  const long big = rank * rank;
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(big, big);
  long stride = 1;
  for (int k = 0; k < slot; ++k) stride *= factor_dims[k];
  const int d = factor_dims[slot];
  for (long a = 0; a < rank; ++a)
    for (long b = 0; b < rank; ++b) {
      long da = (a / stride) % d, db = (b / stride) % d;
      long a2 = a + (db - da) * stride, b2 = b + (da - db) * stride;
      P(a2 + rank * b2, a + rank * b) = 1;
    }
  return P;
}

}  // namespace

int workspace_l_max(const Workspace& w) {
  int best = 0;
  for (const auto& t : w.h.terms) {
    auto pos = unique_positions(w, t);
    for (std::size_t a = 0; a < pos.size(); ++a) {
      auto d = bfs_distances(w.k1, pos[a]);
      for (std::size_t b = a + 1; b < pos.size(); ++b) {
        if (d[pos[b]] < 0 || d[pos[b]] == kInfiniteDistance)
          throw std::logic_error("workspace_l_max: term split across components");
        best = std::max(best, d[pos[b]]);
      }
    }
  }
  return best;
}

ReduceStep tree_reduce_step(Workspace& w, int vertex, int l_max, std::uint64_t seed) {
  const int radius = l_max / 2;
  std::vector<int> dist;
  bfs_parents(w.k1, vertex, dist);
  std::vector<int> nbrs = w.k1.neighbors(vertex);
  std::sort(nbrs.begin(), nbrs.end());
  if (nbrs.empty()) throw std::invalid_argument("tree_reduce_step: isolated vertex");
  // First step from `vertex` towards each vertex.
  std::vector<int> dir(w.k1.vertex_count(), -1);
  {
    std::queue<int> q;
    std::vector<bool> seen(w.k1.vertex_count(), false);
    seen[vertex] = true;
    for (int j = 0; j < static_cast<int>(nbrs.size()); ++j) {
      dir[nbrs[j]] = j;
      seen[nbrs[j]] = true;
      q.push(nbrs[j]);
    }
    while (!q.empty()) {
      int x = q.front();
      q.pop();
      for (int y : w.k1.neighbors(x))
        if (!seen[y]) {
          seen[y] = true;
          dir[y] = dir[x];
          q.push(y);
        }
    }
  }
  auto in_ball = [&](int x) { return dist[x] >= 0 && dist[x] <= radius; };
  std::vector<int> ball;
  for (int x = 0; x < w.k1.vertex_count(); ++x)
    if (in_ball(x)) ball.push_back(x);

  ReduceStep step;
  step.vertex = vertex;
  for (int r = 0; r < w.register_count(); ++r)
    if (in_ball(w.position[r])) step.zone.push_back(r);
  const auto& Z = step.zone;
  if (Z.empty()) throw std::invalid_argument("tree_reduce_step: no registers near the vertex");
  const int deg = static_cast<int>(nbrs.size());

  // Terms meeting the zone: inside, or attached to one direction.
  std::vector<int> inside;
  std::vector<std::vector<int>> by_dir(deg);
  std::vector<int> term_dir(w.h.terms.size(), -2);
  for (int t = 0; t < static_cast<int>(w.h.terms.size()); ++t) {
    const auto& sup = w.h.terms[t].support;
    if (std::none_of(sup.begin(), sup.end(), [&](int r) { return in_ball(w.position[r]); })) continue;
    // Direction of the boundary edges the term's walks cross.
    int d = -1;
    if (std::any_of(sup.begin(), sup.end(), [&](int r) { return !in_ball(w.position[r]); })) {
      for (const auto& walk : w.trees[t].walks)
        for (std::size_t q = 0; q + 1 < walk.size(); ++q) {
          if (in_ball(walk[q]) == in_ball(walk[q + 1])) continue;
          int x = in_ball(walk[q]) ? walk[q] : walk[q + 1], y = walk[q] + walk[q + 1] - x;
          int j = x == vertex ? dir[y] : dir[x];
          if (d >= 0 && d != j) throw std::logic_error("tree_reduce_step: term reaches two directions");
          d = j;
        }
      if (d < 0) throw std::logic_error("tree_reduce_step: term leaves the component");
    }
    term_dir[t] = d;
    if (d < 0) {
      inside.push_back(t);
    } else {
      by_dir[d].push_back(t);
    }
  }

  long dz = w.h.support_dimension(Z);
  if (dz > kMaxCarrierDim) throw std::invalid_argument("tree_reduce_step: zone dimension above the carrier cap");
  std::vector<OperatorAlgebra> algs;
  std::vector<int> slot(deg, -1);
  for (int j = 0; j < deg; ++j)
    if (!by_dir[j].empty()) {
      slot[j] = static_cast<int>(algs.size());
      algs.push_back(interaction_algebra(w.h, Z, by_dir[j]));
    }
  if (!inside.empty()) algs.push_back(interaction_algebra(w.h, Z, inside));
  auto fd = factor_decompose(algs, dz, seed);

  // Block carrying the most weight of an exact zero-energy state.
  auto ground = exact_ground(w.h, seed);
  if (std::abs(ground.energy) > 1e-8) throw std::invalid_argument("tree_reduce_step: Hamiltonian is frustrated");
  std::vector<int> zdims;
  for (int r : Z) zdims.push_back(w.h.site_dims[r]);
  double best = -1;
  for (int a = 0; a < static_cast<int>(fd.blocks.size()); ++a) {
    const auto& V = fd.blocks[a].isometry;
    Eigen::MatrixXcd P = V * V.adjoint();
    double wgt = apply_local(P, Z, w.h.site_dims, ground.state).squaredNorm();
    if (wgt > best + 1e-9) {
      best = wgt;
      step.label = a;
    }
  }
  const auto& block = fd.blocks[step.label];
  const Eigen::MatrixXcd& V = block.isometry;
  Eigen::MatrixXcd proj = Eigen::MatrixXcd::Identity(dz, dz) - V * V.adjoint();

  // Copies of the ball and zone, one per attached 1-cell beyond the first.
  const int old_vertices = w.k1.vertex_count();
  std::vector<std::map<int, int>> vcopy(deg);
  std::vector<std::vector<int>> zcopy(deg);
  for (int x : ball) vcopy[0][x] = x;
  zcopy[0] = Z;
  int next_vertex = old_vertices;
  for (int j = 1; j < deg; ++j) {
    for (int x : ball) {
      vcopy[j][x] = next_vertex++;
      w.origin.push_back(w.origin[x]);
    }
    for (int r : Z) zcopy[j].push_back(w.add_register(w.registers[r].first, w.h.site_dims[r], vcopy[j][w.position[r]]));
  }
  std::vector<Edge> edges;
  for (const auto& [a, b] : w.k1.edges()) {
    bool ia = in_ball(a), ib = in_ball(b);
    if (ia && ib) {
      for (int j = 0; j < deg; ++j) edges.push_back(make_edge(vcopy[j][a], vcopy[j][b]));
    } else if (ia || ib) {
      int x = ia ? a : b, y = ia ? b : a;
      int j = x == vertex ? dir[y] : dir[x];
      edges.push_back(make_edge(vcopy[j][x], y));
    } else {
      edges.push_back(make_edge(a, b));
    }
  }
  w.k1 = make_graph(next_vertex, edges);

  auto moved = [&](Term t, int j) {
    for (int& r : t.support) {
      auto it = std::find(Z.begin(), Z.end(), r);
      if (it != Z.end()) r = zcopy[j][it - Z.begin()];
    }
    return t;
  };
  const auto old_terms = w.h.terms;
  for (int t = 0; t < static_cast<int>(old_terms.size()); ++t) {
    int d = term_dir[t];
    if (d > 0) w.h.terms[t] = moved(old_terms[t], d);
  }
  for (int j = 1; j < deg; ++j)
    for (int t : inside) w.h.terms.push_back(moved(old_terms[t], j));
  for (int j = 0; j < deg; ++j) w.h.terms.push_back(Term::dense(zcopy[j], proj));
  w.trees.clear();
  for (const auto& t : w.h.terms) w.trees.push_back(geodesic_tree(w, t));
  validate_workspace(w);

  // Swap gates returning each direction's factor to the real zone.
  Eigen::MatrixXcd W = kroneckerProduct(V, V).eval();
  Eigen::MatrixXcd rest = Eigen::MatrixXcd::Identity(dz * dz, dz * dz) - W * W.adjoint();
  for (int j = 1; j < deg; ++j) {
    if (slot[j] < 0 || block.factor_dims[slot[j]] == 1) continue;
    Eigen::MatrixXcd U = W * factor_swap(block.factor_dims, slot[j]) * W.adjoint() + rest;
    std::vector<int> support = Z;
    support.insert(support.end(), zcopy[j].begin(), zcopy[j].end());
    step.gates.push_back(Gate::dense(support, U));
  }
  step.copies = deg;
  return step;
}

Circuit dense_tree_solve(const Workspace& w, std::uint64_t seed) {
  std::vector<int> cluster_of;
  auto regs = register_clusters(w, tree_stage_clusters(w), cluster_of);
  std::vector<int> dims;
  for (const auto& rs : regs) dims.push_back(static_cast<int>(w.h.support_dimension(rs)));
  CommutingHamiltonian ch(dims);
  for (const auto& t : w.h.terms) {
    auto cls = term_clusters(t, cluster_of);
    std::vector<int> target;
    for (int c : cls) target.insert(target.end(), regs[c].begin(), regs[c].end());
    ch.add(Term::dense(cls, embed_operator(t.dense_matrix(), t.support, target, w.h.site_dims)));
  }
  auto r = solve_two_body(ch, seed);
  Circuit c = w.empty_circuit();
  for (const auto& round : r.circuit.rounds) {
    std::vector<Gate> out;
    for (const auto& g : round) {
      std::vector<int> support;
      for (int s : g.support) support.insert(support.end(), regs[s].begin(), regs[s].end());
      out.push_back(Gate::dense(support, g.matrix()));
    }
    if (!out.empty()) c.rounds.push_back(out);
  }
  c.validate();
  return c;
}

TreeReduceResult tree_reduce_solve(const CommutingHamiltonian& h, const LocalizationMap& m, std::uint64_t seed) {
  TreeReduceResult out;
  Workspace w = make_workspace(h, m);
  out.l_max = workspace_l_max(w);
  auto g = girth(w.k1);
  if (g && *g <= 2 * out.l_max)
    throw UnsupportedRegime("tree_reduce_solve: girth(K_1) <= 2 l_max; use stabilizer_cut_solve for stabilizer input");

  // Batches: greedy coloring of the original vertices at distance <= l_max.
  const int n0 = w.k1.vertex_count();
  std::vector<int> color(n0, -1);
  int colors = 0;
  for (int v = 0; v < n0; ++v) {
    auto d = bfs_distances(w.k1, v, out.l_max);
    std::set<int> used;
    for (int y = 0; y < n0; ++y)
      if (y != v && color[y] >= 0 && d[y] >= 0 && d[y] <= out.l_max) used.insert(color[y]);
    int c = 0;
    while (used.count(c)) ++c;
    color[v] = c;
    colors = std::max(colors, c + 1);
  }

  auto run_step = [&](int x) {
    out.betti.push_back(first_betti(w.k1));
    out.steps.push_back(tree_reduce_step(w, x, out.l_max, seed));
  };
  for (int c = 0; c < colors && first_betti(w.k1) > 0; ++c)
    for (int o = 0; o < n0; ++o) {
      if (color[o] != c) continue;
      auto on = cycle_vertices(w.k1);
      for (int x = 0; x < w.k1.vertex_count(); ++x)
        if (w.origin[x] == o && on[x]) {
          run_step(x);
          break;
        }
    }
  while (first_betti(w.k1) > 0) run_step(shortest_cycle(w.k1).front());
  out.betti.push_back(first_betti(w.k1));

  out.circuit = dense_tree_solve(w, seed);
  std::vector<Gate> ordered;
  for (auto it = out.steps.rbegin(); it != out.steps.rend(); ++it)
    ordered.insert(ordered.end(), it->gates.begin(), it->gates.end());
  out.circuit.append_scheduled(ordered);
  out.circuit.validate();
  out.final_workspace = std::move(w);
  return out;
}

// ---- instances ----

Clustering punctured_toric_clustering(int L, int hole) {
  if (hole < 2 || hole % 2 || L % hole) throw std::invalid_argument("punctured_toric_clustering: need even hole dividing L");
  const int nb = L / hole;
  auto mod = [&](int x) { return ((x % L) + L) % L; };
  auto band = [&](int x) { return mod(x - (hole / 2 + 1)) / hole; };
  auto block = [&](int x, int y) { return band(mod(x)) + nb * band(mod(y)); };
  auto is_hole = [&](int x, int y) { return mod(x) % hole == hole / 2 && mod(y) % hole == hole / 2; };
  std::vector<int> label(2 * L * L);
  for (int y = 0; y < L; ++y)
    for (int x = 0; x < L; ++x) {
      label[2 * (y * L + x)] = is_hole(x, y) ? block(x + 1, y) : block(x, y);
      label[2 * (y * L + x) + 1] = is_hole(x - 1, y) ? block(x, y + 1) : block(x, y);
    }
  return Clustering::from_assignment(label);
}

LocalizationMap punctured_toric_map(int L, int hole) {
  auto h = toric_code(L, hole);
  return cluster_map(interaction_complex(h), punctured_toric_clustering(L, hole));
}
}  // namespace loctriv
