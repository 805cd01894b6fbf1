#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "loctriv/circuit.hpp"
#include "loctriv/graph.hpp"
#include "loctriv/hamiltonian.hpp"
#include "loctriv/localize.hpp"
#include "loctriv/pauli.hpp"

namespace loctriv {

// Raised for instances outside what the construction covers: non-stabilizer
// central structure in a cut, or a girth precondition that fails.
class UnsupportedRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- two-body solver ----

struct TwoBodyResult {
  Circuit circuit;
  double energy = 0;
  std::vector<int> labels;  // chosen block per site
  bool exhaustive = true;   // false when the label search was heuristic
};

// Terms act on one or two sites. Block labels are searched exhaustively up
// to 1e6 combinations, by exact min-sum on forests, else by message passing
// followed by single-site descent.
TwoBodyResult solve_two_body(const CommutingHamiltonian& h, std::uint64_t seed = 1);

// Random commuting two-body Hamiltonian on g: each site carries random
// blocks whose factors pair up across edges, rotated by a random unitary.
// Site dimension <= max_site_dim, total dimension <= max_total_dim.
CommutingHamiltonian planted_two_body(const Graph& g, int max_site_dim, long max_total_dim, std::uint64_t seed);

// ---- register workspace shared by the cut and tree procedures ----

// Reduced walks in K_1 from a common root to each support register, in
// support order. They describe the lift of the term to the universal cover.
struct TermTree {
  std::vector<std::vector<int>> walks;
  int root() const { return walks.front().front(); }
};

struct Workspace {
  CommutingHamiltonian h;                    // one site per register
  std::vector<std::pair<int, int>> registers;  // (original site, copy)
  std::vector<int> position;                 // register -> K_1 vertex
  Graph k1;
  std::vector<int> origin;                   // K_1 vertex -> original target vertex
  std::vector<TermTree> trees;

  int register_count() const { return static_cast<int>(registers.size()); }
  int add_register(int site, int dim, int vertex);
  Circuit empty_circuit() const;
};

Workspace make_workspace(const CommutingHamiltonian& h, const LocalizationMap& m);

// Every term's walks stay in K_1 and end at its registers' positions.
void validate_workspace(const Workspace& w);

// ---- stabilizer cut ----

struct CutDecomposition {
  Edge cut;  // (u, v), u < v; left registers lie on the u side of the lifted cell
  std::vector<int> left, right, other;  // registers
  std::vector<int> h_lr, h_lo, h_ro, rest;  // term indices
  // Reduced walk from the lifted u (left) or v (right) to each register.
  std::map<int, std::vector<int>> lift;
  // Terms whose walks pass the cell with every register on one side,
  // re-rooted on that side.
  std::map<int, TermTree> rerooted;
};

// Throws std::logic_error when a term crosses the lifted cell twice or the
// classification is inconsistent (a map that is not good).
CutDecomposition cut_decompose(const Workspace& w, Edge cut);
CutDecomposition cut_decompose(const CommutingHamiltonian& h, const LocalizationMap& m, Edge cut);

struct CenterConstraint {
  std::vector<int> terms;  // indices into the input term list
  PauliString c_left, c_right;  // global, unsigned
  int sigma = 1;           // c_left c_right = sigma on zero-energy states
};

struct StabilizerConstraints {
  int qubits = 0;
  std::vector<int> left, right;
  bool stabilizer = true;  // every term a single Pauli
  // Center generators (global, unsigned). For stabilizer input the first
  // left_fixed of them span the left parts of the constraints.
  std::vector<PauliString> left_center, right_center;
  int left_fixed = 0, right_fixed = 0;
  std::vector<CenterConstraint> constraints;
  // Center generators outside the span of the single-term centers.
  std::vector<PauliString> left_non_generated, right_non_generated;
  // Witness eigenvalues of one zero-energy assignment.
  std::vector<int> tau_left, tau_right;      // per center generator
  std::vector<int> theta_left, theta_right;  // per constraint
};

// terms[t] lists the Paulis of term t on the full register (a Pauli
// projector (1 - S)/2 is {S}). Throws std::invalid_argument when the
// single-Pauli terms have no common zero-energy state.
StabilizerConstraints stabilizer_constraints(const std::vector<std::vector<PauliString>>& terms,
                                             const std::vector<int>& L, const std::vector<int>& R);
// Recomputes the witness from a frustration-free group containing the terms.
void choose_witness(StabilizerConstraints& sc, StabilizerGroup group);

struct CrossResult {
  Workspace next;
  std::optional<Gate> unitary;  // on registers of L and their copies; none if identity
  std::vector<int> left_copies, right_copies;
};

// Throws UnsupportedRegime for non-stabilizer H_LR.
CrossResult build_cross_hamiltonian(const Workspace& w, const CutDecomposition& cd, const StabilizerConstraints& sc);

// Band clustering of a forest: each vertex is grouped by its band of depth
// `width` and its ancestor one band up, so a subtree of height <= width
// meets at most two clusters. width 0 means singletons.
std::vector<int> forest_band_clustering(const Graph& forest, int width);
// Cluster labels of K_1 vertices such that every term meets at most two
// clusters; singletons when every term sits on one edge.
std::vector<int> tree_stage_clusters(const Workspace& w);

// Zero-energy Clifford circuit for a stabilizer workspace whose K_1 is a forest.
Circuit stabilizer_tree_solve(const Workspace& w);

struct CutSolveResult {
  Circuit circuit;
  int cuts = 0;
  std::vector<int> betti;  // first Betti number before each cut, then 0
  Workspace final_workspace;
};

CutSolveResult stabilizer_cut_solve(const CommutingHamiltonian& h, const LocalizationMap& m);

// ---- tree reduction for high-girth K_1 ----

struct ReduceStep {
  int vertex = -1;          // chosen K_1 vertex
  std::vector<int> zone;    // registers within floor(l_max/2)
  int copies = 0;           // copies of the zone after the step, real included
  int label = -1;           // chosen block
  std::vector<Gate> gates;  // in application order
};

struct TreeReduceResult {
  Circuit circuit;
  std::vector<ReduceStep> steps;
  std::vector<int> betti;
  int l_max = 0;
  Workspace final_workspace;
};

// Max K_1 distance between positions of one term.
int workspace_l_max(const Workspace& w);

// One step at K_1 vertex `vertex`: adds the block projector, copies the zone
// once per attached 1-cell and returns the swap gates. The block is taken
// from an exact ground state of w.h (dimension <= 2^14).
ReduceStep tree_reduce_step(Workspace& w, int vertex, int l_max, std::uint64_t seed = 1);

// Throws UnsupportedRegime unless girth(K_1) > 2 l_max.
TreeReduceResult tree_reduce_solve(const CommutingHamiltonian& h, const LocalizationMap& m, std::uint64_t seed = 1);

// Solves a workspace on a forest by clustering to two-body.
Circuit dense_tree_solve(const Workspace& w, std::uint64_t seed = 1);

// ---- instances ----

// Clustering of the toric code's qubits into (L/hole)^2 blocks whose
// corners sit on the removed plaquettes, so no term meets three blocks.
Clustering punctured_toric_clustering(int L, int hole);
LocalizationMap punctured_toric_map(int L, int hole);

}  // namespace loctriv
