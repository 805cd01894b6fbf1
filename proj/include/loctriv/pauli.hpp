#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace loctriv {

using Bits = std::vector<std::uint64_t>;

inline int bit_words(int nbits) { return (nbits + 63) / 64; }
inline bool get_bit(const Bits& b, int i) { return (b[i >> 6] >> (i & 63)) & 1U; }
inline void set_bit(Bits& b, int i, bool v) {
  if (v) {
    b[i >> 6] |= std::uint64_t{1} << (i & 63);
  } else {
    b[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }
}
inline void flip_bit(Bits& b, int i) { b[i >> 6] ^= std::uint64_t{1} << (i & 63); }
void xor_into(Bits& dst, const Bits& src);
bool is_zero(const Bits& b);
int first_set_bit(const Bits& b);  // -1 if none

// i^phase * (sigma_0 (x) sigma_1 (x) ...), sigma with (x,z)=(1,1) being Y.
// Dense matrices use little-endian order: qubit q is bit q of the index.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n);
  // "+XZIY", "-ZZ", "XX" (sign defaults to +), "+iXY" for odd phases.
  static PauliString parse(std::string_view s);
  static PauliString single(int n, int qubit, char letter);

  int size() const { return n_; }
  bool x(int q) const { return get_bit(x_, q); }
  bool z(int q) const { return get_bit(z_, q); }
  void set(int q, bool x, bool z);
  void set_letter(int q, char letter);
  char letter(int q) const;
  int phase() const { return phase_; }
  void set_phase(int p) { phase_ = ((p % 4) + 4) % 4; }
  bool hermitian() const { return phase_ % 2 == 0; }
  int sign() const;  // +1/-1; throws for non-Hermitian phase
  void set_sign(int s) { phase_ = s < 0 ? 2 : 0; }
  PauliString unsigned_copy() const;

  bool is_identity() const;  // ignoring phase
  int weight() const;
  std::vector<int> support() const;
  bool commutes(const PauliString& o) const;
  bool same_letters(const PauliString& o) const { return x_ == o.x_ && z_ == o.z_; }

  PauliString& operator*=(const PauliString& o);
  friend PauliString operator*(PauliString a, const PauliString& b) { return a *= b; }

  // Letters on `qubits` (in that order) with phase 0.
  PauliString restricted(const std::vector<int>& qubits) const;
  // Places this string on `qubits` of an n-qubit register, keeping the phase.
  PauliString embedded(int n, const std::vector<int>& qubits) const;

  Bits symplectic() const;  // x bits then z bits, 2n bits
  static PauliString from_symplectic(const Bits& v, int n);
  const Bits& x_bits() const { return x_; }
  const Bits& z_bits() const { return z_; }

  Eigen::MatrixXcd dense() const;
  // Applies to a 2^n state vector.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const;
  std::string str() const;

  bool operator==(const PauliString& o) const { return n_ == o.n_ && phase_ == o.phase_ && same_letters(o); }
  bool operator<(const PauliString& o) const;

 private:
  int n_ = 0;
  Bits x_, z_;
  int phase_ = 0;
};

// Incremental GF(2) elimination with bookkeeping of which inserted vectors
// combine into each reduced row.
class Gf2Basis {
 public:
  explicit Gf2Basis(int nbits) : nbits_(nbits) {}
  // Returns the dependency (over insertion indices, including this one) if v
  // lies in the span of earlier vectors, else nullopt.
  std::optional<std::vector<int>> insert(const Bits& v);
  // Insertion indices whose sum is v, or nullopt.
  std::optional<std::vector<int>> express(const Bits& v) const;
  int rank() const { return static_cast<int>(rows_.size()); }
  int inserted() const { return inserted_; }

 private:
  struct Row {
    Bits v;
    Bits combo;
    int pivot;
  };
  void reduce(Bits& v, Bits& combo) const;
  int nbits_;
  int inserted_ = 0;
  std::vector<Row> rows_;
};

struct Gf2Solution {
  Bits particular;            // free variables set to zero
  std::vector<Bits> kernel;   // basis of the homogeneous solutions
};

// Solves rows * v = rhs over GF(2) for v with nvars bits.
std::optional<Gf2Solution> gf2_solve(const std::vector<Bits>& rows, const std::vector<int>& rhs, int nvars);

// Null space of the matrix whose columns are `cols`: all index sets whose
// columns sum to zero, as a basis.
std::vector<std::vector<int>> gf2_nullspace(const std::vector<Bits>& cols, int nbits);

// Abelian group of commuting Hermitian Paulis with signs.
class StabilizerGroup {
 public:
  explicit StabilizerGroup(int n) : n_(n) {}
  // Adds g; returns false when g (with its sign) is already in the group.
  // Throws std::invalid_argument if g anticommutes with a member or -g is in
  // the group.
  bool add(const PauliString& g);
  // +1 or -1 when +-p is in the group, 0 otherwise.
  int sign_of(const PauliString& p) const;
  bool contains_up_to_sign(const PauliString& p) const { return sign_of(p) != 0; }
  bool commutes_with_all(const PauliString& p) const;
  int rank() const { return static_cast<int>(rows_.size()); }
  int qubits() const { return n_; }
  std::vector<PauliString> generators() const { return rows_; }

 private:
  PauliString reduce(const PauliString& p, bool& zero) const;
  int n_;
  std::vector<PauliString> rows_;  // reduced echelon, one pivot each
  std::vector<int> pivots_;
};

struct SymplecticSplit {
  std::vector<std::pair<PauliString, PauliString>> pairs;  // anticommuting partners
  std::vector<PauliString> isotropic;                      // independent, spans the radical
};

// Symplectic Gram-Schmidt on the span of gens (phases dropped).
SymplecticSplit symplectic_split(const std::vector<PauliString>& gens, int n);

// Radical of span(gens): independent generators of the center of the
// generated Pauli group, modulo phases.
std::vector<PauliString> pauli_center(const std::vector<PauliString>& gens, int n);

// Completes to a full symplectic basis of n qubits, returned as (x-image,
// z-image) pairs: given pairs first, then (partner, c) for each isotropic c,
// then any remaining pairs.
std::vector<std::pair<PauliString, PauliString>> complete_symplectic_basis(
    const std::vector<std::pair<PauliString, PauliString>>& pairs, const std::vector<PauliString>& isotropic, int n);

// Clifford unitary stored by the images of X_q and Z_q under conjugation.
class Clifford {
 public:
  Clifford() = default;
  explicit Clifford(int n);
  static Clifford from_images(std::vector<PauliString> x_images, std::vector<PauliString> z_images);
  // The Clifford sending basis[k] to images[k]; both lists must span all
  // 2n directions and share commutation relations.
  static Clifford from_basis_map(const std::vector<PauliString>& basis, const std::vector<PauliString>& images);
  static Clifford hadamard(int n, int q);
  static Clifford phase_gate(int n, int q);
  static Clifford cnot(int n, int control, int target);
  static Clifford pauli(const PauliString& p);

  int qubits() const { return n_; }
  const PauliString& x_image(int q) const { return xs_[q]; }
  const PauliString& z_image(int q) const { return zs_[q]; }

  PauliString conjugate(const PauliString& p) const;  // U p U^dagger
  // First this, then next.
  Clifford then(const Clifford& next) const;
  Clifford inverse() const;
  bool is_identity() const;
  bool valid() const;
  Eigen::MatrixXcd dense() const;

  bool operator==(const Clifford& o) const { return xs_ == o.xs_ && zs_ == o.zs_; }

 private:
  int n_ = 0;
  std::vector<PauliString> xs_, zs_;
};

// Clifford whose image of Z_q is stabilizers[q] (a maximal commuting
// independent set with signs), so it maps |0...0> to their common eigenstate.
Clifford state_preparation(const std::vector<PauliString>& stabilizers, int n);

// Extends a commuting independent set to n generators by adding Z/X
// single-qubit strings and products as needed.
std::vector<PauliString> complete_stabilizers(const std::vector<PauliString>& stabilizers, int n);

}  // namespace loctriv
