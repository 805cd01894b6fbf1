#include "loctriv/hamiltonian.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "loctriv/random.hpp"
#include "loctriv/tolerances.hpp"

namespace loctriv {

namespace {

double hermiticity(const Eigen::MatrixXcd& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace

Term Term::dense(std::vector<int> support, Eigen::MatrixXcd m) {
  Term t;
  t.support = std::move(support);
  t.matrix = std::move(m);
  return t;
}

Term Term::stabilizer_projector(std::vector<int> support, const PauliString& s) {
  if (static_cast<int>(support.size()) != s.size()) throw std::invalid_argument("stabilizer size does not match support");
  if (!s.hermitian()) throw std::invalid_argument("stabilizer must be Hermitian");
  std::vector<int> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return support[a] < support[b]; });
  Term t;
  PauliString sorted(s.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    t.support.push_back(support[order[k]]);
    sorted.set(static_cast<int>(k), s.x(order[k]), s.z(order[k]));
  }
  sorted.set_phase(s.phase());
  t.stabilizer = sorted;
  return t;
}

Term Term::from_global_stabilizer(const PauliString& s) {
  auto support = s.support();
  PauliString local = s.restricted(support);
  local.set_phase(s.phase());
  return stabilizer_projector(support, local);
}

Term Term::from_pauli_sum(std::vector<int> support, std::vector<PauliSumEntry> entries) {
  const int n = static_cast<int>(support.size());
  if (n > 12) throw std::invalid_argument("Pauli-sum term too wide");
  const long dim = 1L << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& e : entries) {
    if (e.op.size() != n || !e.op.hermitian()) throw std::invalid_argument("bad Pauli-sum entry");
    m += e.coeff * e.op.dense();
  }
  Term t = dense(std::move(support), std::move(m));
  t.pauli_sum = std::move(entries);
  return t;
}

PauliString Term::global_stabilizer(int n) const {
  if (!stabilizer) throw std::logic_error("term is not a stabilizer projector");
  return stabilizer->embedded(n, support);
}

long CommutingHamiltonian::hilbert_dimension() const { return support_dimension([&] {
  std::vector<int> all(site_count());
  std::iota(all.begin(), all.end(), 0);
  return all;
}()); }

long CommutingHamiltonian::support_dimension(const std::vector<int>& support) const {
  long d = 1;
  for (int s : support) {
    if (d > (1L << 62) / site_dims.at(s)) throw std::overflow_error("Hilbert dimension overflow");
    d *= site_dims.at(s);
  }
  return d;
}

void CommutingHamiltonian::add(Term t) {
  std::set<int> seen;
  for (int s : t.support) {
    if (s < 0 || s >= site_count()) throw std::invalid_argument("term support outside the site range");
    if (!seen.insert(s).second) throw std::invalid_argument("repeated site in term support");
  }
  if (t.support.empty()) throw std::invalid_argument("empty term support");
  if (t.stabilizer) {
    for (int s : t.support) {
      if (site_dims[s] != 2) throw std::invalid_argument("Pauli term on a non-qubit site");
    }
  } else {
    const long dim = support_dimension(t.support);
    if (dim > kMaxTermDim) throw std::invalid_argument("term dimension exceeds the cap");
    if (t.matrix.rows() != dim || t.matrix.cols() != dim) throw std::invalid_argument("term matrix shape mismatch");
    if (hermiticity(t.matrix) > kHermitianTol) throw std::invalid_argument("term is not Hermitian");
  }
  terms.push_back(std::move(t));
}

void CommutingHamiltonian::validate() const {
  CommutingHamiltonian copy(site_dims);
  for (const auto& t : terms) copy.add(t);
}

bool CommutingHamiltonian::is_stabilizer() const {
  return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.is_stabilizer(); });
}

std::vector<std::vector<int>> CommutingHamiltonian::supports() const {
  std::vector<std::vector<int>> out;
  for (const auto& t : terms) out.push_back(t.support);
  return out;
}

Eigen::MatrixXcd embed_operator(const Eigen::MatrixXcd& op, const std::vector<int>& from, const std::vector<int>& to,
                                const std::vector<int>& site_dims) {
  std::vector<long> stride_to(to.size());
  long dim_to = 1;
  for (std::size_t k = 0; k < to.size(); ++k) {
    stride_to[k] = dim_to;
    dim_to *= site_dims[to[k]];
  }
  std::vector<int> pos(from.size());
  std::vector<long> stride(from.size());
  long dim_from = 1;
  for (std::size_t k = 0; k < from.size(); ++k) {
    auto it = std::find(to.begin(), to.end(), from[k]);
    if (it == to.end()) throw std::invalid_argument("embed_operator: target does not contain the support");
    pos[k] = static_cast<int>(it - to.begin());
    stride[k] = stride_to[pos[k]];
    dim_from *= site_dims[from[k]];
  }
  if (op.rows() != dim_from) throw std::invalid_argument("embed_operator: operator shape mismatch");
  // Offset in the target index of each operator basis index.
  std::vector<long> offset(dim_from, 0);
  for (long a = 0; a < dim_from; ++a) {
    long rem = a;
    for (std::size_t k = 0; k < from.size(); ++k) {
      const int d = site_dims[from[k]];
      offset[a] += (rem % d) * stride[k];
      rem /= d;
    }
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_to, dim_to);
  for (long base = 0; base < dim_to; ++base) {
    // Skip indices whose digits on `from` are not all zero.
    bool ok = true;
    for (std::size_t k = 0; k < from.size() && ok; ++k) {
      ok = (base / stride[k]) % site_dims[from[k]] == 0;
    }
    if (!ok) continue;
    for (long c = 0; c < dim_from; ++c) {
      for (long r = 0; r < dim_from; ++r) {
        if (op(r, c) != std::complex<double>(0, 0)) out(base + offset[r], base + offset[c]) = op(r, c);
      }
    }
  }
  return out;
}

Eigen::MatrixXcd Term::dense_matrix() const {
  if (matrix.size() > 0) return matrix;
  if (stabilizer) {
    if (stabilizer->size() > 12) throw std::invalid_argument("stabilizer term too wide for a dense matrix");
    const long dim = 1L << stabilizer->size();
    return 0.5 * (Eigen::MatrixXcd::Identity(dim, dim) - stabilizer->dense());
  }
  throw std::logic_error("term without operator");
}

Eigen::MatrixXcd dense_hamiltonian(const CommutingHamiltonian& h) {
  const long dim = h.hilbert_dimension();
  if (dim > 2 * kDenseSolverDim) throw std::invalid_argument("dense_hamiltonian: dimension exceeds the dense cap");
  std::vector<int> all(h.site_count());
  std::iota(all.begin(), all.end(), 0);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms) m += embed_operator(t.dense_matrix(), t.support, all, h.site_dims);
  return m;
}

CommutationReport check_commuting_projectors(const CommutingHamiltonian& h, int jobs) {
  CommutationReport rep;
  const int m = static_cast<int>(h.terms.size());
  std::vector<std::vector<int>> by_site(h.site_count());
  for (int t = 0; t < m; ++t) {
    for (int s : h.terms[t].support) by_site[s].push_back(t);
  }
  for (int t = 0; t < m; ++t) {
    const auto& term = h.terms[t];
    if (term.stabilizer) continue;
    rep.max_hermiticity = std::max(rep.max_hermiticity, hermiticity(term.matrix));
    const double idem = (term.matrix * term.matrix - term.matrix).norm();
    rep.max_idempotency = std::max(rep.max_idempotency, idem);
    if (idem > kCommuteTol) rep.non_projector_terms.push_back(t);
  }
  rep.hermitian = rep.max_hermiticity <= kHermitianTol;
  rep.projectors = rep.non_projector_terms.empty();

  std::vector<std::pair<int, int>> pairs;
  for (int t = 0; t < m; ++t) {
    std::set<int> partners;
    for (int s : h.terms[t].support) {
      for (int u : by_site[s]) {
        if (u > t) partners.insert(u);
      }
    }
    for (int u : partners) pairs.emplace_back(t, u);
  }
  std::vector<double> residual(pairs.size(), 0.0);
  parallel_for(static_cast<int>(pairs.size()), jobs, [&](int k) {
    const auto& a = h.terms[pairs[k].first];
    const auto& b = h.terms[pairs[k].second];
    if (a.stabilizer && b.stabilizer) {
      const int n = h.site_count();
      if (!a.global_stabilizer(n).commutes(b.global_stabilizer(n))) {
        residual[k] = 0.5 * std::sqrt(static_cast<double>(h.support_dimension(a.support)));
      }
      return;
    }
    std::vector<int> joint = a.support;
    for (int s : b.support) {
      if (std::find(joint.begin(), joint.end(), s) == joint.end()) joint.push_back(s);
    }
    const auto A = embed_operator(a.dense_matrix(), a.support, joint, h.site_dims);
    const auto B = embed_operator(b.dense_matrix(), b.support, joint, h.site_dims);
    residual[k] = (A * B - B * A).norm();
  });
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    rep.max_commutator = std::max(rep.max_commutator, residual[k]);
    if (residual[k] > kCommuteTol) rep.violating_pairs.push_back(pairs[k]);
  }
  rep.commuting = rep.violating_pairs.empty();
  return rep;
}

CommutingHamiltonian projectorize(const CommutingHamiltonian& h, const std::vector<double>& lambda) {
  if (lambda.size() != h.terms.size()) throw std::invalid_argument("projectorize: one eigenvalue per term required");
  CommutingHamiltonian out(h.site_dims);
  for (std::size_t k = 0; k < h.terms.size(); ++k) {
    const auto& t = h.terms[k];
    if (t.stabilizer && t.matrix.size() == 0) {
      if (std::abs(lambda[k]) <= kEigenTol) {
        out.add(t);
      } else if (std::abs(lambda[k] - 1.0) <= kEigenTol) {
        PauliString s = *t.stabilizer;
        s.set_phase(s.phase() + 2);
        out.add(Term::stabilizer_projector(t.support, s));
      } else {
        throw std::invalid_argument("projectorize: lambda is not an eigenvalue of term " + std::to_string(k));
      }
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t.dense_matrix());
    const long dim = es.eigenvalues().size();
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
    for (long i = 0; i < dim; ++i) {
      if (std::abs(es.eigenvalues()(i) - lambda[k]) <= kEigenTol) {
        p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
      }
    }
    if (p.norm() == 0) throw std::invalid_argument("projectorize: lambda is not an eigenvalue of term " + std::to_string(k));
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(dim, dim) - p;
    q = 0.5 * (q + q.adjoint()).eval();
    out.add(Term::dense(t.support, q));
  }
  out.is_projector_form = true;
  return out;
}

Complex2 interaction_complex(const CommutingHamiltonian& h) { return interaction_complex(h.site_count(), h.supports()); }

HypercubeResult hypercube_partition(const CommutingHamiltonian& h, int D, int L, int l, long max_block_dim) {
  if (D < 1 || L < 1 || l < 1 || l > L) throw std::invalid_argument("hypercube_partition: need D,L >= 1 and 1 <= l <= L");
  long n = 1;
  for (int k = 0; k < D; ++k) n *= L;
  if (n != h.site_count()) throw std::invalid_argument("hypercube_partition: site count is not L^D");
  const int per_axis = (L + l - 1) / l;
  auto block_of = [&](int site) {
    int b = 0, mult = 1, rem = site;
    for (int k = 0; k < D; ++k) {
      b += ((rem % L) / l) * mult;
      mult *= per_axis;
      rem /= L;
    }
    return b;
  };
  HypercubeResult res;
  res.kept = CommutingHamiltonian(h.site_dims);
  res.kept.is_projector_form = h.is_projector_form;
  std::map<int, std::vector<int>> block_sites;
  for (int s = 0; s < h.site_count(); ++s) block_sites[block_of(s)].push_back(s);
  std::map<int, std::vector<int>> block_terms;
  for (int t = 0; t < static_cast<int>(h.terms.size()); ++t) {
    const auto& sup = h.terms[t].support;
    const int b = block_of(sup[0]);
    const bool inside = std::all_of(sup.begin(), sup.end(), [&](int s) { return block_of(s) == b; });
    if (inside) {
      block_terms[b].push_back(static_cast<int>(res.kept.terms.size()));
      res.kept.add(h.terms[t]);
    } else {
      res.dropped_terms.push_back(t);
    }
  }
  res.dropped_count = static_cast<int>(res.dropped_terms.size());
  res.block_count = static_cast<int>(block_sites.size());
  res.circuit = Circuit::for_sites(h.site_dims);
  std::vector<Gate> gates;
  for (const auto& [b, sites] : block_sites) {
    const auto it = block_terms.find(b);
    if (it == block_terms.end()) continue;
    const long dim = h.support_dimension(sites);
    if (dim > max_block_dim) throw std::invalid_argument("hypercube_partition: block dimension exceeds the limit");
    Eigen::MatrixXcd hb = Eigen::MatrixXcd::Zero(dim, dim);
    for (int t : it->second) {
      const auto& term = res.kept.terms[t];
      hb += embed_operator(term.dense_matrix(), term.support, sites, h.site_dims);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hb);
    gates.push_back(Gate::dense(sites, unitary_with_first_column(es.eigenvectors().col(0))));
  }
  res.circuit.append_scheduled(gates);
  return res;
}

CommutingHamiltonian ring_zz(int n) {
  if (n < 3) throw std::invalid_argument("ring_zz: need at least 3 sites");
  auto h = CommutingHamiltonian::qubits(n);
  for (int i = 0; i < n; ++i) h.add(Term::stabilizer_projector({i, (i + 1) % n}, PauliString::parse("ZZ")));
  h.is_projector_form = true;
  return h;
}

CommutingHamiltonian toric_code(int L, int hole) {
  if (L < 2) throw std::invalid_argument("toric_code: L >= 2");
  auto hq = [L](int x, int y) { return 2 * (((y + L) % L) * L + (x + L) % L); };
  auto vq = [L](int x, int y) { return 2 * (((y + L) % L) * L + (x + L) % L) + 1; };
  auto h = CommutingHamiltonian::qubits(2 * L * L);
  for (int y = 0; y < L; ++y) {
    for (int x = 0; x < L; ++x) {
      h.add(Term::stabilizer_projector({hq(x, y), hq(x - 1, y), vq(x, y), vq(x, y - 1)}, PauliString::parse("XXXX")));
    }
  }
  for (int y = 0; y < L; ++y) {
    for (int x = 0; x < L; ++x) {
      if (hole > 0 && x % hole == hole / 2 && y % hole == hole / 2) continue;
      h.add(Term::stabilizer_projector({hq(x, y), hq(x, y + 1), vq(x, y), vq(x + 1, y)}, PauliString::parse("ZZZZ")));
    }
  }
  h.is_projector_form = true;
  return h;
}

CommutingHamiltonian wen_plaquette(int L) {
  if (L < 2) throw std::invalid_argument("wen_plaquette: L >= 2");
  auto site = [L](int x, int y) { return ((y + L) % L) * L + (x + L) % L; };
  auto h = CommutingHamiltonian::qubits(L * L);
  for (int y = 0; y < L; ++y) {
    for (int x = 0; x < L; ++x) {
      h.add(Term::stabilizer_projector({site(x, y), site(x + 1, y), site(x + 1, y + 1), site(x, y + 1)},
                                       PauliString::parse("XZXZ")));
    }
  }
  h.is_projector_form = true;
  return h;
}

}  // namespace loctriv
