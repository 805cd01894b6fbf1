#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "loctriv/circuit.hpp"
#include "loctriv/hamiltonian.hpp"

namespace loctriv {

// op on the listed tensor factors (first least significant) of a state whose
// factor dimensions are `dims`.
Eigen::VectorXcd apply_local(const Eigen::MatrixXcd& op, const std::vector<int>& factors, const std::vector<int>& dims,
                             const Eigen::VectorXcd& psi);

Eigen::VectorXcd apply_hamiltonian(const CommutingHamiltonian& h, const Eigen::VectorXcd& psi);

struct GroundResult {
  double energy = 0;
  Eigen::VectorXcd state;
  bool dense = true;    // false when Lanczos was used
  int iterations = 0;
};

// Dense diagonalisation up to 2^10, Lanczos with full reorthogonalisation up
// to 2^14; larger instances throw std::invalid_argument.
GroundResult exact_ground(const CommutingHamiltonian& h, std::uint64_t seed = 1);
double exact_ground_energy(const CommutingHamiltonian& h, std::uint64_t seed = 1);

// Product of the register initial states.
Eigen::VectorXcd initial_state(const Circuit& c);
// Full statevector after every round; at most 2^22 amplitudes. Checks that
// every gate is unitary (1e-10).
Eigen::VectorXcd apply_circuit(const Circuit& c);

struct EnergyReport {
  double energy = 0;
  double density = 0;  // energy per site
  std::vector<double> per_term;
};

// <psi| h_Z |psi> for every term, with h's site s read from register (s, 0).
EnergyReport statevector_energy(const CommutingHamiltonian& h, const Circuit& c, const Eigen::VectorXcd& psi);
EnergyReport statevector_energy(const CommutingHamiltonian& h, const Circuit& c);

// Stabilizer generators of the output of an all-Clifford circuit on qubit
// registers whose initial states are computational basis states.
std::vector<PauliString> tableau_state(const Circuit& c);
// Per term 0 if +S is in the output group, 1 if -S is, 1/2 otherwise.
EnergyReport tableau_energy(const CommutingHamiltonian& h, const Circuit& c);

// Eigenvalue of every term on a common ground state: the ground state is
// projected term by term onto the eigenspace carrying most of its weight.
std::vector<double> joint_ground_eigenvalues(const CommutingHamiltonian& h, std::uint64_t seed = 1);

}  // namespace loctriv
