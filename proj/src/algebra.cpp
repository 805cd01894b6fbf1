#include "loctriv/algebra.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "loctriv/random.hpp"
#include "loctriv/tolerances.hpp"

namespace loctriv {

namespace {

std::complex<double> hs(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a.conjugate().cwiseProduct(b)).sum();
}

// Gram-Schmidt step; returns true and appends when m is new. m is a product
// of unit-norm operators, so the residual is compared on that scale: a
// product that is numerically zero must not be renormalised into noise.
bool extend(std::vector<Eigen::MatrixXcd>& basis, const Eigen::MatrixXcd& m) {
  Eigen::MatrixXcd r = m;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) r -= hs(b, r) * b;
  }
  const double nr = r.norm();
  if (nr < 1e-7) return false;
  basis.push_back(r / nr);
  return true;
}

Eigen::MatrixXcd random_combination(const std::vector<Eigen::MatrixXcd>& basis, long dim, Rng& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& b : basis) x += std::complex<double>(g(rng), g(rng)) * b;
  return x;
}

// Groups sorted eigenvalues into clusters of width below tol.
std::vector<std::pair<int, int>> clusters(const Eigen::VectorXd& ev, double tol) {
  std::vector<std::pair<int, int>> out;
  int start = 0;
  for (int i = 1; i <= ev.size(); ++i) {
    if (i == ev.size() || ev(i) - ev(i - 1) > tol) {
      out.emplace_back(start, i - start);
      start = i;
    }
  }
  return out;
}

// Normalised partial trace of m onto factor k of a tensor product with the
// given factor dimensions (factor 0 least significant).
Eigen::MatrixXcd reduce_to_factor(const Eigen::MatrixXcd& m, const std::vector<int>& dims, int k) {
  long stride = 1;
  for (int j = 0; j < k; ++j) stride *= dims[j];
  const long dk = dims[k];
  const long total = m.rows();
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(dk, dk);
  for (long idx = 0; idx < total; ++idx) {
    if ((idx / stride) % dk != 0) continue;
    for (long a = 0; a < dk; ++a) {
      for (long b = 0; b < dk; ++b) r(a, b) += m(idx + a * stride, idx + b * stride);
    }
  }
  return r / static_cast<double>(total / dk);
}

}  // namespace

OperatorAlgebra OperatorAlgebra::generated(const std::vector<Eigen::MatrixXcd>& gens, long dim) {
  OperatorAlgebra a;
  a.dim = dim;
  std::vector<Eigen::MatrixXcd> words;
  for (const auto& g : gens) {
    if (g.rows() != dim || g.cols() != dim) throw std::invalid_argument("generator shape mismatch");
    const double n = g.norm();
    if (n < 1e-12) continue;
    words.push_back(g / n);
    words.push_back(g.adjoint() / n);
  }
  std::deque<int> queue;
  extend(a.basis, Eigen::MatrixXcd::Identity(dim, dim));
  queue.push_back(0);
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    for (const auto& w : words) {
      if (extend(a.basis, w * a.basis[i])) queue.push_back(a.dimension() - 1);
    }
  }
  return a;
}

Eigen::MatrixXcd OperatorAlgebra::project(const Eigen::MatrixXcd& m) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& b : basis) out += hs(b, m) * b;
  return out;
}

bool OperatorAlgebra::contains(const Eigen::MatrixXcd& m, double tol) const {
  return (m - project(m)).norm() <= tol * std::max(1.0, m.norm());
}

Eigen::MatrixXcd OperatorAlgebra::generic_hermitian(std::uint64_t seed) const {
  Rng rng(seed);
  const Eigen::MatrixXcd x = random_combination(basis, dim, rng);
  return 0.5 * (x + x.adjoint());
}

std::vector<Eigen::MatrixXcd> schmidt_operators(const Eigen::MatrixXcd& op, const std::vector<int>& support,
                                                const std::vector<int>& part, const std::vector<int>& site_dims) {
  std::vector<int> part_pos, rest_pos;
  for (int s : part) {
    auto it = std::find(support.begin(), support.end(), s);
    if (it == support.end()) throw std::invalid_argument("schmidt_operators: part not inside the support");
    part_pos.push_back(static_cast<int>(it - support.begin()));
  }
  for (int k = 0; k < static_cast<int>(support.size()); ++k) {
    if (std::find(part_pos.begin(), part_pos.end(), k) == part_pos.end()) rest_pos.push_back(k);
  }
  const long total = op.rows();
  long P = 1, Q = 1;
  for (int k : part_pos) P *= site_dims[support[k]];
  for (int k : rest_pos) Q *= site_dims[support[k]];
  std::vector<long> pi(total), qi(total);
  for (long a = 0; a < total; ++a) {
    std::vector<long> digit(support.size());
    long rem = a;
    for (std::size_t k = 0; k < support.size(); ++k) {
      digit[k] = rem % site_dims[support[k]];
      rem /= site_dims[support[k]];
    }
    long p = 0, mult = 1;
    for (int k : part_pos) {
      p += digit[k] * mult;
      mult *= site_dims[support[k]];
    }
    long q = 0;
    mult = 1;
    for (int k : rest_pos) {
      q += digit[k] * mult;
      mult *= site_dims[support[k]];
    }
    pi[a] = p;
    qi[a] = q;
  }
  Eigen::MatrixXcd R(P * P, Q * Q);
  for (long a = 0; a < total; ++a) {
    for (long b = 0; b < total; ++b) R(pi[a] + P * pi[b], qi[a] + Q * qi[b]) = op(a, b);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(R, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  std::vector<Eigen::MatrixXcd> out;
  if (sv.size() == 0 || sv(0) < 1e-14) return out;
  for (long k = 0; k < sv.size(); ++k) {
    if (sv(k) <= 1e-10 * sv(0)) break;
    Eigen::MatrixXcd m(P, P);
    for (long r = 0; r < P; ++r) {
      for (long c = 0; c < P; ++c) m(r, c) = svd.matrixU()(r + P * c, k);
    }
    out.push_back(m);
  }
  return out;
}

OperatorAlgebra interaction_algebra(const CommutingHamiltonian& h, const std::vector<int>& X, const std::vector<int>& terms) {
  std::vector<int> which = terms;
  if (which.empty()) {
    which.resize(h.terms.size());
    std::iota(which.begin(), which.end(), 0);
  }
  const long dim = h.support_dimension(X);
  std::vector<Eigen::MatrixXcd> gens;
  for (int t : which) {
    const auto& term = h.terms.at(t);
    std::vector<int> part;
    for (int s : X) {
      if (std::find(term.support.begin(), term.support.end(), s) != term.support.end()) part.push_back(s);
    }
    if (part.empty()) continue;
    for (const auto& m : schmidt_operators(term.dense_matrix(), term.support, part, h.site_dims)) {
      gens.push_back(embed_operator(m, part, X, h.site_dims));
    }
  }
  return OperatorAlgebra::generated(gens, dim);
}

std::vector<Eigen::MatrixXcd> algebra_center(const OperatorAlgebra& a) {
  const int D = a.dimension();
  const long d = a.dim;
  Rng rng(0x5eed);
  std::vector<Eigen::MatrixXcd> probes;
  for (int k = 0; k < 2; ++k) {
    const Eigen::MatrixXcd x = random_combination(a.basis, d, rng);
    probes.push_back(x);
    probes.push_back(x.adjoint());
  }
  Eigen::MatrixXcd M(static_cast<long>(probes.size()) * d * d, D);
  for (int i = 0; i < D; ++i) {
    long row = 0;
    for (const auto& x : probes) {
      const Eigen::MatrixXcd c = a.basis[i] * x - x * a.basis[i];
      M.col(i).segment(row, d * d) = Eigen::Map<const Eigen::VectorXcd>(c.data(), d * d);
      row += d * d;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M.adjoint() * M);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<Eigen::MatrixXcd> out;
  for (int k = 0; k < D; ++k) {
    if (es.eigenvalues()(k) > 1e-10 * scale) break;
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < D; ++i) z += es.eigenvectors()(i, k) * a.basis[i];
    out.push_back(z);
  }
  return out;
}

std::vector<Eigen::MatrixXcd> center_projectors(const OperatorAlgebra& a, std::uint64_t seed) {
  const auto center = algebra_center(a);
  Rng rng(seed);
  Eigen::MatrixXcd z = random_combination(center, a.dim, rng);
  z = 0.5 * (z + z.adjoint()).eval();
  z /= std::max(1e-300, z.norm() / std::sqrt(static_cast<double>(a.dim)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(z);
  std::vector<Eigen::MatrixXcd> out;
  for (auto [start, len] : clusters(es.eigenvalues(), kCenterTol)) {
    const Eigen::MatrixXcd v = es.eigenvectors().middleCols(start, len);
    out.push_back(v * v.adjoint());
  }
  return out;
}

double max_commutator(const OperatorAlgebra& a, const OperatorAlgebra& b) {
  if (a.dim != b.dim) throw std::invalid_argument("algebras on different spaces");
  double worst = 0;
  for (const auto& x : a.basis) {
    for (const auto& y : b.basis) worst = std::max(worst, (x * y - y * x).norm());
  }
  return worst;
}

namespace {

struct Split {
  std::vector<int> dims;
  Eigen::MatrixXcd iso;
};

// Organises the range of `iso` as a tensor product with algebra k acting on
// the first factor, recursing into the multiplicity space.
Split split_block(const std::vector<OperatorAlgebra>& algebras, const Eigen::MatrixXcd& iso, std::size_t k, Rng& rng) {
  if (k == algebras.size()) return {{static_cast<int>(iso.cols())}, iso};
  const auto& alg = algebras[k];
  Eigen::MatrixXcd x = random_combination(alg.basis, alg.dim, rng);
  x = 0.5 * (x + x.adjoint()).eval();
  x /= std::max(1e-300, x.norm() / std::sqrt(static_cast<double>(alg.dim)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(iso.adjoint() * x * iso);
  const auto cl = clusters(es.eigenvalues(), kCenterTol);
  const int a = static_cast<int>(cl.size());
  const int m = cl[0].second;
  for (auto [s, len] : cl) {
    if (len != m) throw std::runtime_error("factor_decompose: block is not a factor (unequal multiplicities)");
  }
  std::vector<Eigen::MatrixXcd> F;
  for (auto [s, len] : cl) F.push_back(iso * es.eigenvectors().middleCols(s, len));
  // Matrix units E_c1 from a generic element, normalised to isometries.
  const Eigen::MatrixXcd y = random_combination(alg.basis, alg.dim, rng);
  std::vector<Eigen::MatrixXcd> G = {F[0]};
  for (int c = 1; c < a; ++c) {
    Eigen::MatrixXcd T = F[c].adjoint() * y * F[0];
    const double n = T.norm() / std::sqrt(static_cast<double>(m));
    if (n < 1e-8) throw std::runtime_error("factor_decompose: degenerate matrix unit");
    G.push_back(F[c] * (T / n));
  }
  Split inner = split_block(algebras, F[0], k + 1, rng);
  const Eigen::MatrixXcd coeff = F[0].adjoint() * inner.iso;
  Split out;
  out.dims.push_back(a);
  out.dims.insert(out.dims.end(), inner.dims.begin(), inner.dims.end());
  out.iso.resize(iso.rows(), static_cast<long>(a) * inner.iso.cols());
  for (long l = 0; l < inner.iso.cols(); ++l) {
    for (int c = 0; c < a; ++c) out.iso.col(c + a * l) = G[c] * coeff.col(l);
  }
  return out;
}

}  // namespace

FactorDecomposition factor_decompose(const std::vector<OperatorAlgebra>& algebras, long dim, std::uint64_t seed) {
  for (const auto& a : algebras) {
    if (a.dim != dim) throw std::invalid_argument("factor_decompose: algebra on the wrong space");
  }
  struct Pending {
    std::vector<int> labels;
    Eigen::MatrixXcd proj;
  };
  std::vector<Pending> blocks = {{{}, Eigen::MatrixXcd::Identity(dim, dim)}};
  for (std::size_t k = 0; k < algebras.size(); ++k) {
    const auto projs = center_projectors(algebras[k], splitmix64(seed + k));
    std::vector<Pending> next;
    for (const auto& b : blocks) {
      for (int a = 0; a < static_cast<int>(projs.size()); ++a) {
        Eigen::MatrixXcd q = b.proj * projs[a];
        if (q.trace().real() < 0.5) continue;
        auto labels = b.labels;
        labels.push_back(a);
        next.push_back({std::move(labels), 0.5 * (q + q.adjoint())});
      }
    }
    blocks = std::move(next);
  }
  FactorDecomposition out;
  out.dim = dim;
  Rng rng(splitmix64(seed ^ 0xfac7));
  long total = 0;
  for (const auto& b : blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b.proj);
    long r = 0;
    for (long i = 0; i < dim; ++i) r += es.eigenvalues()(i) > 0.5;
    const Eigen::MatrixXcd iso = es.eigenvectors().rightCols(r);
    Split s = split_block(algebras, iso, 0, rng);
    out.blocks.push_back({b.labels, s.dims, s.iso});
    total += r;
  }
  if (total != dim) throw std::runtime_error("factor_decompose: blocks do not cover the space");

  // Reconstruction: each algebra acts on its own factor inside every block.
  double worst = 0;
  Eigen::MatrixXcd all(dim, total);
  long col = 0;
  for (const auto& b : out.blocks) {
    all.middleCols(col, b.rank()) = b.isometry;
    col += b.rank();
    worst = std::max(worst, (b.isometry.adjoint() * b.isometry - Eigen::MatrixXcd::Identity(b.rank(), b.rank())).norm());
    std::vector<int> factors(b.factor_dims.size());
    std::iota(factors.begin(), factors.end(), 0);
    for (std::size_t k = 0; k < algebras.size(); ++k) {
      for (const auto& g : algebras[k].basis) {
        const Eigen::MatrixXcd gi = g * b.isometry;
        const Eigen::MatrixXcd m = b.isometry.adjoint() * gi;
        worst = std::max(worst, (gi - b.isometry * m).norm());
        const Eigen::MatrixXcd r = reduce_to_factor(m, b.factor_dims, static_cast<int>(k));
        worst = std::max(worst, (m - embed_operator(r, {static_cast<int>(k)}, factors, b.factor_dims)).norm());
      }
    }
  }
  worst = std::max(worst, (all.adjoint() * all - Eigen::MatrixXcd::Identity(dim, dim)).norm());
  out.residual = worst;
  if (worst > kReconstructionTol) {
    throw std::runtime_error("factor_decompose: reconstruction residual " + std::to_string(worst));
  }
  return out;
}

}  // namespace loctriv
