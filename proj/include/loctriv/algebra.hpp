#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "loctriv/hamiltonian.hpp"

namespace loctriv {

// Unital *-subalgebra of M_dim with a Hilbert-Schmidt orthonormal basis.
struct OperatorAlgebra {
  long dim = 1;
  std::vector<Eigen::MatrixXcd> basis;

  // Closure of {I, g, g^dagger} under multiplication.
  static OperatorAlgebra generated(const std::vector<Eigen::MatrixXcd>& gens, long dim);
  int dimension() const { return static_cast<int>(basis.size()); }
  Eigen::MatrixXcd project(const Eigen::MatrixXcd& m) const;
  bool contains(const Eigen::MatrixXcd& m, double tol = 1e-9) const;
  // Hermitian element with seeded random coefficients.
  Eigen::MatrixXcd generic_hermitian(std::uint64_t seed) const;
};

// Operators on the sites `part` (a subset of `support`, in the order given)
// spanning the part side of an operator-Schmidt decomposition of op.
std::vector<Eigen::MatrixXcd> schmidt_operators(const Eigen::MatrixXcd& op, const std::vector<int>& support,
                                                const std::vector<int>& part, const std::vector<int>& site_dims);

// Algebra on the ordered site list X generated by the X-side Schmidt
// operators of the given terms (all terms when `terms` is empty).
OperatorAlgebra interaction_algebra(const CommutingHamiltonian& h, const std::vector<int>& X,
                                    const std::vector<int>& terms = {});

// Basis of the center.
std::vector<Eigen::MatrixXcd> algebra_center(const OperatorAlgebra& a);
// Minimal central projections, from the spectrum of a generic central
// element clustered at 1e-7.
std::vector<Eigen::MatrixXcd> center_projectors(const OperatorAlgebra& a, std::uint64_t seed = 1);

// Largest commutator norm between basis elements.
double max_commutator(const OperatorAlgebra& a, const OperatorAlgebra& b);

struct FactorBlock {
  std::vector<int> labels;       // central projection index per algebra
  std::vector<int> factor_dims;  // one per algebra, then the leftover multiplicity
  // dim x prod(factor_dims); factor 0 least significant. Algebra k acts
  // only on factor k.
  Eigen::MatrixXcd isometry;
  long rank() const { return isometry.cols(); }
};

struct FactorDecomposition {
  long dim = 1;
  std::vector<FactorBlock> blocks;
  double residual = 0;  // worst reconstruction error over generators
};

// Joint block/factor decomposition of mutually commuting algebras on C^dim.
// Throws std::runtime_error if the reconstruction error exceeds 1e-9.
FactorDecomposition factor_decompose(const std::vector<OperatorAlgebra>& algebras, long dim, std::uint64_t seed = 1);

}  // namespace loctriv
