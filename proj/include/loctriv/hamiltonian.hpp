#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "loctriv/circuit.hpp"
#include "loctriv/complex.hpp"
#include "loctriv/pauli.hpp"

namespace loctriv {

struct PauliSumEntry {
  double coeff = 0;
  PauliString op;  // Hermitian, on the term support
};

// Local operator h_Z. Dense matrices use the support order with the first
// support site least significant.
struct Term {
  std::vector<int> support;
  Eigen::MatrixXcd matrix;
  // Projector (1 - S)/2: zero energy exactly where S = +1.
  std::optional<PauliString> stabilizer;
  std::vector<PauliSumEntry> pauli_sum;  // kept when given in that form

  static Term dense(std::vector<int> support, Eigen::MatrixXcd m);
  static Term stabilizer_projector(std::vector<int> support, const PauliString& s);
  static Term from_pauli_sum(std::vector<int> support, std::vector<PauliSumEntry> entries);
  // Projector form (1 - s)/2 of a Pauli on a full n-qubit register, restricted to its support.
  static Term from_global_stabilizer(const PauliString& s);

  bool is_stabilizer() const { return stabilizer.has_value(); }
  // Stabilizer placed on n qubits with term qubit k at support[k].
  PauliString global_stabilizer(int n) const;
  // The stored matrix, or (1 - S)/2 built on demand (at most 12 qubits).
  Eigen::MatrixXcd dense_matrix() const;
};

struct CommutingHamiltonian {
  std::vector<int> site_dims;
  std::vector<Term> terms;
  bool is_projector_form = false;

  CommutingHamiltonian() = default;
  explicit CommutingHamiltonian(std::vector<int> dims) : site_dims(std::move(dims)) {}
  static CommutingHamiltonian qubits(int n) { return CommutingHamiltonian(std::vector<int>(n, 2)); }

  int site_count() const { return static_cast<int>(site_dims.size()); }
  // Product of site dimensions; throws std::overflow_error beyond 2^62.
  long hilbert_dimension() const;
  long support_dimension(const std::vector<int>& support) const;
  // Checks support ranges, matrix shape, Hermiticity (1e-12) and the term cap.
  void add(Term t);
  void validate() const;
  bool is_stabilizer() const;
  std::vector<std::vector<int>> supports() const;
};

// Operator on `from` embedded as op (x) identity on the ordered site list
// `to` (which must contain `from`).
Eigen::MatrixXcd embed_operator(const Eigen::MatrixXcd& op, const std::vector<int>& from, const std::vector<int>& to,
                                const std::vector<int>& site_dims);

// Dense sum of all terms on every site; total dimension capped at 2^11.
Eigen::MatrixXcd dense_hamiltonian(const CommutingHamiltonian& h);

struct CommutationReport {
  bool hermitian = true;
  bool commuting = true;
  bool projectors = true;
  double max_hermiticity = 0;
  double max_commutator = 0;
  double max_idempotency = 0;
  std::vector<std::pair<int, int>> violating_pairs;
  std::vector<int> non_projector_terms;
  bool ok() const { return hermitian && commuting && projectors; }
};

CommutationReport check_commuting_projectors(const CommutingHamiltonian& h, int jobs = 1);

// Replaces every h_Z by I - P_Z where P_Z projects onto eigenvalue lambda[Z].
// Throws std::invalid_argument if some lambda is not an eigenvalue (1e-9).
CommutingHamiltonian projectorize(const CommutingHamiltonian& h, const std::vector<double>& lambda);

// Minimal 2-complex of the Hamiltonian's supports.
Complex2 interaction_complex(const CommutingHamiltonian& h);

struct HypercubeResult {
  CommutingHamiltonian kept;
  std::vector<int> dropped_terms;  // indices into the input
  int dropped_count = 0;
  int block_count = 0;
  Circuit circuit;
};

// Sites are the points of an L^D periodic lattice in row-major order (axis 0
// fastest). Blocks of side l (the last block per axis is shorter when l does
// not divide L); keeps terms inside one block and prepares every block's
// ground state with one gate.
HypercubeResult hypercube_partition(const CommutingHamiltonian& h, int D, int L, int l, long max_block_dim = 1024);

// Standard instances.
CommutingHamiltonian ring_zz(int n);  // (1 - Z_i Z_{i+1})/2
// Qubits on the edges of an L x L torus: horizontal edge (x,y) is qubit
// 2(yL+x), vertical edge (x,y) is 2(yL+x)+1. Stars XXXX and plaquettes
// ZZZZ, both as (1 - S)/2. Plaquettes (x,y) with x%hole == y%hole == hole/2
// are removed when hole > 0.
CommutingHamiltonian toric_code(int L, int hole = 0);
// Qubits on the vertices of an L x L torus with terms (1 - X Z X Z)/2 per plaquette.
CommutingHamiltonian wen_plaquette(int L);

}  // namespace loctriv
