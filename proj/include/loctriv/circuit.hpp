#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "loctriv/pauli.hpp"

namespace loctriv {

// One tensor factor of the circuit's Hilbert space: copy 0 of a site is the
// real register, copies j >= 1 are ancillas.
struct Register {
  int site = 0;
  int copy = 0;
  int dim = 2;
  Eigen::VectorXcd initial;  // normalised product-state factor
};

struct Gate {
  std::vector<int> support;  // register indices; first one least significant
  Eigen::MatrixXcd unitary;  // empty for Clifford gates until densified
  std::optional<Clifford> clifford;

  static Gate dense(std::vector<int> support, Eigen::MatrixXcd u);
  static Gate from_clifford(std::vector<int> support, Clifford c);
  bool is_clifford() const { return clifford.has_value(); }
  Eigen::MatrixXcd matrix() const;
};

struct Circuit {
  std::vector<Register> registers;
  std::vector<std::vector<Gate>> rounds;

  // Real registers for every site, each starting in |0>.
  static Circuit for_sites(const std::vector<int>& site_dims);
  int add_register(int site, int copy, int dim);
  int find_register(int site, int copy) const;  // -1 if absent
  int register_count() const { return static_cast<int>(registers.size()); }
  int real_count() const;
  int depth() const;  // non-empty rounds
  int gate_count() const;
  int max_gate_width() const;
  bool all_clifford() const;
  // Throws on overlapping supports in a round, bad indices or shape mismatch.
  void validate() const;
  // Appends gates in application order, placing each in the earliest round
  // after every earlier gate that shares a register.
  void append_scheduled(const std::vector<Gate>& ordered);
  void drop_empty_rounds();
};

// Completes a unit vector to a unitary whose first column is v.
Eigen::MatrixXcd unitary_with_first_column(const Eigen::VectorXcd& v);

}  // namespace loctriv
