#include "loctriv/verify.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "loctriv/random.hpp"
#include "loctriv/tolerances.hpp"

namespace loctriv {

namespace {

constexpr long kMaxStatevector = 1L << 22;

long product(const std::vector<int>& dims) {
  long d = 1;
  for (int x : dims) {
    if (d > kMaxStatevector / x) throw std::invalid_argument("state dimension exceeds 2^22");
    d *= x;
  }
  return d;
}

std::vector<int> register_dims(const Circuit& c) {
  std::vector<int> dims;
  for (const auto& r : c.registers) dims.push_back(r.dim);
  return dims;
}

// Register index of every site of h.
std::vector<int> site_registers(const CommutingHamiltonian& h, const Circuit& c) {
  std::vector<int> out(h.site_count());
  for (int s = 0; s < h.site_count(); ++s) {
    out[s] = c.find_register(s, 0);
    if (out[s] < 0) throw std::invalid_argument("circuit has no real register for site " + std::to_string(s));
    if (c.registers[out[s]].dim != h.site_dims[s]) throw std::invalid_argument("register dimension mismatch");
  }
  return out;
}

}  // namespace

Eigen::VectorXcd apply_local(const Eigen::MatrixXcd& op, const std::vector<int>& factors, const std::vector<int>& dims,
                             const Eigen::VectorXcd& psi) {
  std::vector<long> stride(dims.size());
  long total = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    stride[k] = total;
    total *= dims[k];
  }
  if (psi.size() != total) throw std::invalid_argument("apply_local: state size mismatch");
  long local = 1;
  for (int f : factors) local *= dims.at(f);
  if (op.rows() != local || op.cols() != local) throw std::invalid_argument("apply_local: operator shape mismatch");
  std::vector<long> offset(local, 0);
  for (long a = 0; a < local; ++a) {
    long rem = a;
    for (int f : factors) {
      offset[a] += (rem % dims[f]) * stride[f];
      rem /= dims[f];
    }
  }
  // Enumerate bases with zero digits on `factors` by iterating the other factors.
  std::vector<int> rest;
  std::vector<bool> in(dims.size(), false);
  for (int f : factors) in[f] = true;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
    if (!in[k]) rest.push_back(k);
  }
  Eigen::VectorXcd out(total);
  Eigen::VectorXcd buf(local);
  const long outer = total / local;
  std::vector<int> digit(rest.size(), 0);
  long base = 0;
  for (long o = 0; o < outer; ++o) {
    for (long a = 0; a < local; ++a) buf(a) = psi(base + offset[a]);
    const Eigen::VectorXcd r = op * buf;
    for (long a = 0; a < local; ++a) out(base + offset[a]) = r(a);
    for (std::size_t k = 0; k < rest.size(); ++k) {
      const int f = rest[k];
      if (++digit[k] < dims[f]) {
        base += stride[f];
        break;
      }
      base -= (dims[f] - 1) * stride[f];
      digit[k] = 0;
    }
  }
  return out;
}

Eigen::VectorXcd apply_hamiltonian(const CommutingHamiltonian& h, const Eigen::VectorXcd& psi) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  for (const auto& t : h.terms) out += apply_local(t.dense_matrix(), t.support, h.site_dims, psi);
  return out;
}

GroundResult exact_ground(const CommutingHamiltonian& h, std::uint64_t seed) {
  const long dim = h.hilbert_dimension();
  if (dim > kMaxExactDim) throw std::invalid_argument("exact_ground: dimension exceeds 2^14");
  GroundResult res;
  if (dim <= kDenseSolverDim) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_hamiltonian(h));
    res.energy = es.eigenvalues()(0);
    res.state = es.eigenvectors().col(0);
    return res;
  }
  res.dense = false;
  // Cache term matrices once.
  std::vector<Eigen::MatrixXcd> mats;
  for (const auto& t : h.terms) mats.push_back(t.dense_matrix());
  auto apply = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
    for (std::size_t k = 0; k < mats.size(); ++k) out += apply_local(mats[k], h.terms[k].support, h.site_dims, v);
    return out;
  };
  Rng rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd x(dim);
  for (long i = 0; i < dim; ++i) x(i) = {g(rng), g(rng)};
  x.normalize();
  const int m = static_cast<int>(std::min<long>(dim, 80));
  for (int restart = 0; restart < 60; ++restart) {
    Eigen::MatrixXcd V(dim, m);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    V.col(0) = x;
    int k = 0;
    for (; k < m; ++k) {
      Eigen::VectorXcd w = apply(V.col(k));
      ++res.iterations;
      T(k, k) = V.col(k).dot(w).real();
      // Full reorthogonalisation, twice.
      for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(k + 1) * (V.leftCols(k + 1).adjoint() * w);
      const double beta = w.norm();
      if (k + 1 == m || beta < 1e-12) {
        ++k;
        break;
      }
      T(k, k + 1) = T(k + 1, k) = beta;
      V.col(k + 1) = w / beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(k, k));
    x = V.leftCols(k) * es.eigenvectors().col(0).cast<std::complex<double>>();
    x.normalize();
    res.energy = es.eigenvalues()(0);
    const double resid = (apply(x) - res.energy * x).norm();
    if (resid <= 1e-10) break;
  }
  res.state = x;
  return res;
}

double exact_ground_energy(const CommutingHamiltonian& h, std::uint64_t seed) { return exact_ground(h, seed).energy; }

Eigen::VectorXcd initial_state(const Circuit& c) {
  const long total = product(register_dims(c));
  Eigen::VectorXcd psi(total);
  psi.setZero();
  psi(0) = 1;
  long filled = 1;
  for (const auto& r : c.registers) {
    // psi <- initial (x) psi with the new register more significant.
    for (long a = r.dim - 1; a >= 0; --a) {
      for (long i = 0; i < filled; ++i) psi(a * filled + i) = r.initial(a) * psi(i);
    }
    filled *= r.dim;
  }
  return psi;
}

Eigen::VectorXcd apply_circuit(const Circuit& c) {
  c.validate();
  const auto dims = register_dims(c);
  Eigen::VectorXcd psi = initial_state(c);
  for (const auto& round : c.rounds) {
    for (const auto& g : round) {
      const Eigen::MatrixXcd u = g.matrix();
      if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).norm() > kNormTol) {
        throw std::invalid_argument("apply_circuit: gate is not unitary");
      }
      psi = apply_local(u, g.support, dims, psi);
    }
  }
  return psi;
}

EnergyReport statevector_energy(const CommutingHamiltonian& h, const Circuit& c, const Eigen::VectorXcd& psi) {
  const auto regs = site_registers(h, c);
  const auto dims = register_dims(c);
  const bool qubits = std::all_of(dims.begin(), dims.end(), [](int d) { return d == 2; });
  EnergyReport rep;
  for (const auto& t : h.terms) {
    std::vector<int> factors;
    for (int s : t.support) factors.push_back(regs[s]);
    double e;
    if (t.stabilizer && t.matrix.size() == 0 && qubits) {
      const auto s = t.stabilizer->embedded(c.register_count(), factors);
      e = 0.5 * (1.0 - psi.dot(s.apply(psi)).real());
    } else {
      e = psi.dot(apply_local(t.dense_matrix(), factors, dims, psi)).real();
    }
    rep.per_term.push_back(e);
    rep.energy += e;
  }
  rep.density = h.site_count() ? rep.energy / h.site_count() : 0.0;
  return rep;
}

EnergyReport statevector_energy(const CommutingHamiltonian& h, const Circuit& c) {
  return statevector_energy(h, c, apply_circuit(c));
}

std::vector<PauliString> tableau_state(const Circuit& c) {
  c.validate();
  const int n = c.register_count();
  std::vector<PauliString> gens;
  for (int q = 0; q < n; ++q) {
    const auto& r = c.registers[q];
    if (r.dim != 2) throw std::invalid_argument("tableau_state: non-qubit register");
    auto z = PauliString::single(n, q, 'Z');
    if (std::abs(std::abs(r.initial(0)) - 1.0) <= kNormTol) {
      gens.push_back(z);
    } else if (std::abs(std::abs(r.initial(1)) - 1.0) <= kNormTol) {
      z.set_sign(-1);
      gens.push_back(z);
    } else {
      throw std::invalid_argument("tableau_state: initial state is not a computational basis state");
    }
  }
  for (const auto& round : c.rounds) {
    for (const auto& g : round) {
      if (!g.clifford) throw std::invalid_argument("tableau_state: non-Clifford gate");
      for (auto& s : gens) {
        // Split s into its part on the gate support and the rest.
        PauliString local = s.restricted(g.support);
        PauliString rest = s;
        for (int q : g.support) rest.set(q, false, false);
        PauliString img = g.clifford->conjugate(local).embedded(n, g.support);
        rest *= img;
        s = rest;
      }
    }
  }
  return gens;
}

EnergyReport tableau_energy(const CommutingHamiltonian& h, const Circuit& c) {
  const auto regs = site_registers(h, c);
  StabilizerGroup group(c.register_count());
  for (const auto& g : tableau_state(c)) group.add(g);
  EnergyReport rep;
  for (const auto& t : h.terms) {
    if (!t.stabilizer) throw std::invalid_argument("tableau_energy: non-stabilizer term");
    std::vector<int> factors;
    for (int s : t.support) factors.push_back(regs[s]);
    const int sign = group.sign_of(t.stabilizer->embedded(c.register_count(), factors));
    const double e = sign == 1 ? 0.0 : (sign == -1 ? 1.0 : 0.5);
    rep.per_term.push_back(e);
    rep.energy += e;
  }
  rep.density = h.site_count() ? rep.energy / h.site_count() : 0.0;
  return rep;
}

std::vector<double> joint_ground_eigenvalues(const CommutingHamiltonian& h, std::uint64_t seed) {
  Eigen::VectorXcd psi = exact_ground(h, seed).state;
  std::vector<double> out;
  for (const auto& t : h.terms) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t.dense_matrix());
    const auto& ev = es.eigenvalues();
    const long d = ev.size();
    double best_weight = -1, best_value = 0;
    Eigen::VectorXcd best;
    for (long i = 0; i < d;) {
      long j = i;
      while (j < d && ev(j) - ev(i) <= kEigenTol) ++j;
      const Eigen::MatrixXcd vecs = es.eigenvectors().middleCols(i, j - i);
      const Eigen::MatrixXcd proj = vecs * vecs.adjoint();
      Eigen::VectorXcd p = apply_local(proj, t.support, h.site_dims, psi);
      const double w = p.squaredNorm();
      if (w > best_weight) {
        best_weight = w;
        best_value = ev.segment(i, j - i).mean();
        best = std::move(p);
      }
      i = j;
    }
    psi = best / std::sqrt(best_weight);
    out.push_back(best_value);
  }
  return out;
}

}  // namespace loctriv
