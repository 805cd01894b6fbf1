#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "loctriv/circuit.hpp"
#include "loctriv/complex.hpp"
#include "loctriv/graph.hpp"
#include "loctriv/hamiltonian.hpp"
#include "loctriv/localize.hpp"

namespace loctriv {

// Malformed input; what() reads "line L, column C: message".
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

// Text formats. Blank lines and '#' comments are ignored on input. Floats
// are written in shortest round-trip form.

// "N d" then one "i j" line per edge; d is the degree bound (the max degree
// when none was set).
std::string write_graph(const Graph& g);
Graph read_graph(std::string_view text);

// One line per cluster, space-separated vertex ids.
std::string write_clustering(const Clustering& c);
Clustering read_clustering(std::string_view text);

// Sections 0CELLS (ids), 1CELLS (pairs), 2CELLS (triples).
std::string write_complex(const Complex2& k);
Complex2 read_complex(std::string_view text);

// SOURCE <complex> TARGET <graph> then "VIMG i→a", "EPATH (i,j): a b c",
// "CENTER (i,j,k)→a" and "RANGE r" lines. "->" is accepted for the arrow.
std::string write_map(const LocalizationMap& m);
LocalizationMap read_map(std::string_view text);

// "SITES d0 d1 ...", then per term "TERM s0 s1 ..." followed by one of
//   PAULI ±,<letters>       the projector (1 ± O)/2
//   PAULISUM k              then k lines "coeff <signed letters>"
//   DENSE                   then one line per row, entries "re im"
std::string write_hamiltonian(const CommutingHamiltonian& h);
CommutingHamiltonian read_hamiltonian(std::string_view text);

// "REGISTERS n", then n lines "REG site copy dim" followed by the initial
// amplitudes as "re im" pairs; then "ROUND k" headers with "GATE r0 r1 ..."
// lines followed by "CLIFFORD" and 2m tableau rows (images of X_q, then
// Z_q) or "DENSE" and the matrix rows.
std::string write_circuit(const Circuit& c);
Circuit read_circuit(std::string_view text);

enum class FileKind { graph, clustering, complex, map, hamiltonian, circuit };

FileKind parse_kind(const std::string& name);
// From the first keyword; a first line of two integers is a graph.
FileKind detect_kind(std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// parse -> write -> parse -> write; true when both writes agree.
bool roundtrip_text(std::string_view text, FileKind kind);

}  // namespace loctriv
