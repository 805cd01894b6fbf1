#include "loctriv/io.hpp"

#include <charconv>
#include <complex>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "loctriv/tolerances.hpp"

namespace loctriv {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  std::string text;
  int column = 1;
};

struct Line {
  int number = 0;
  std::vector<Token> tokens;
};

// Words, the punctuation ( ) , : and the arrow ("->" or U+2192) as tokens.
std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view s = text.substr(start, end - start);
    ++number;
    Line line{number, {}};
    std::size_t i = 0;
    while (i < s.size()) {
      char ch = s[i];
      if (ch == '#') break;
      if (ch == ' ' || ch == '\t' || ch == '\r') {
        ++i;
        continue;
      }
      const int col = static_cast<int>(i) + 1;
      if (s.substr(i, 2) == "->") {
        line.tokens.push_back({"->", col});
        i += 2;
      } else if (s.substr(i, 3) == "\xE2\x86\x92") {
        line.tokens.push_back({"->", col});
        i += 3;
      } else if (ch == '(' || ch == ')' || ch == ',' || ch == ':') {
        line.tokens.push_back({std::string(1, ch), col});
        ++i;
      } else {
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r' && s[j] != '#' && s[j] != '(' &&
               s[j] != ')' && s[j] != ',' && s[j] != ':' && s.substr(j, 2) != "->" && s.substr(j, 3) != "\xE2\x86\x92")
          ++j;
        line.tokens.push_back({std::string(s.substr(i, j - i)), col});
        i = j;
      }
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

class Cursor {
 public:
  explicit Cursor(std::string_view text) : lines_(tokenize(text)) {}

  bool at_end() const { return li_ >= lines_.size(); }
  bool line_done() const { return at_end() || ti_ >= lines_[li_].tokens.size(); }
  int line_number() const { return at_end() ? (lines_.empty() ? 1 : lines_.back().number + 1) : lines_[li_].number; }

  [[noreturn]] void fail(const std::string& msg) const {
    int col = 1;
    if (!at_end()) {
      const auto& t = lines_[li_].tokens;
      col = ti_ < t.size() ? t[ti_].column : t.back().column + static_cast<int>(t.back().text.size());
    }
    throw ParseError(line_number(), col, msg);
  }

  const std::string& peek() const {
    static const std::string empty;
    return line_done() ? empty : lines_[li_].tokens[ti_].text;
  }
  // First token of the current line, for keyword dispatch.
  bool line_starts_with(const std::string& kw) const {
    return !at_end() && ti_ == 0 && lines_[li_].tokens[0].text == kw;
  }

  std::string word() {
    if (line_done()) fail("unexpected end of line");
    return lines_[li_].tokens[ti_++].text;
  }
  void expect(const std::string& s) {
    if (peek() != s) fail("expected '" + s + "'");
    ++ti_;
  }
  long integer() {
    if (line_done()) fail("expected an integer");
    const auto& t = lines_[li_].tokens[ti_].text;
    long v = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) fail("expected an integer, got '" + t + "'");
    ++ti_;
    return v;
  }
  int index() {
    long v = integer();
    if (v < 0 || v > std::numeric_limits<int>::max()) {
      --ti_;
      fail("index out of range");
    }
    return static_cast<int>(v);
  }
  double real() {
    if (line_done()) fail("expected a number");
    const auto& t = lines_[li_].tokens[ti_].text;
    double v = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) fail("expected a number, got '" + t + "'");
    ++ti_;
    return v;
  }
  std::vector<int> rest_indices() {
    std::vector<int> out;
    while (!line_done()) out.push_back(index());
    return out;
  }
  void end_line() {
    if (!line_done()) fail("unexpected token '" + peek() + "'");
    ++li_;
    ti_ = 0;
  }
  void require_line() {
    if (at_end()) fail("unexpected end of input");
  }

 private:
  std::vector<Line> lines_;
  std::size_t li_ = 0, ti_ = 0;
};

std::string fmt_real(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt_complex(std::complex<double> z) { return fmt_real(z.real()) + " " + fmt_real(z.imag()); }

void write_matrix(std::ostringstream& os, const Eigen::MatrixXcd& m) {
  for (long r = 0; r < m.rows(); ++r) {
    for (long c = 0; c < m.cols(); ++c) os << (c ? " " : "") << fmt_complex(m(r, c));
    os << "\n";
  }
}

Eigen::MatrixXcd read_matrix(Cursor& cur, long dim) {
  Eigen::MatrixXcd m(dim, dim);
  for (long r = 0; r < dim; ++r) {
    cur.require_line();
    for (long c = 0; c < dim; ++c) {
      double re = cur.real();
      double im = cur.real();
      m(r, c) = {re, im};
    }
    cur.end_line();
  }
  return m;
}

PauliString read_pauli(Cursor& cur, std::size_t qubits) {
  if (cur.line_done()) cur.fail("expected a signed Pauli string");
  std::string s = cur.peek();
  if (s.empty() || (s[0] != '+' && s[0] != '-')) cur.fail("expected a signed Pauli string");
  for (std::size_t k = 1; k < s.size(); ++k)
    if (std::string("IXYZi").find(s[k]) == std::string::npos) cur.fail("bad Pauli letter in '" + s + "'");
  PauliString p = PauliString::parse(s);
  if (static_cast<std::size_t>(p.size()) != qubits) cur.fail("Pauli string length does not match");
  cur.word();
  return p;
}

void write_graph_body(std::ostringstream& os, const Graph& g) {
  os << g.vertex_count() << " " << g.degree_bound() << "\n";
  for (const auto& [u, v] : g.edges()) os << u << " " << v << "\n";
}

// Graph lines run until a line starting with a keyword in `stop`.
Graph read_graph_body(Cursor& cur, const std::vector<std::string>& stop) {
  cur.require_line();
  int n = cur.index();
  long d = cur.integer();
  cur.end_line();
  Graph g(n, static_cast<int>(d));
  while (!cur.at_end()) {
    for (const auto& s : stop)
      if (cur.line_starts_with(s)) return g;
    int u = cur.index();
    int v = cur.index();
    if (u >= n || v >= n) cur.fail("vertex out of range");
    try {
      if (!g.add_edge(u, v)) cur.fail("duplicate edge");
    } catch (const std::invalid_argument& e) {
      cur.fail(e.what());
    }
    cur.end_line();
  }
  return g;
}

void write_complex_body(std::ostringstream& os, const Complex2& k) {
  os << "0CELLS\n";
  for (int v = 0; v < k.zero_cell_count(); ++v) os << (v ? " " : "") << v;
  os << "\n1CELLS\n";
  for (const auto& [u, v] : k.one_cells()) os << u << " " << v << "\n";
  os << "2CELLS\n";
  for (const auto& t : k.two_cells()) os << t[0] << " " << t[1] << " " << t[2] << "\n";
}

Complex2 read_complex_body(Cursor& cur, const std::vector<std::string>& stop) {
  cur.require_line();
  cur.expect("0CELLS");
  cur.end_line();
  std::vector<int> ids;
  while (!cur.at_end() && !cur.line_starts_with("1CELLS")) {
    for (int v : cur.rest_indices()) {
      if (v != static_cast<int>(ids.size())) cur.fail("0-cells must be listed as 0..n-1");
      ids.push_back(v);
    }
    cur.end_line();
  }
  Complex2 k(static_cast<int>(ids.size()));
  cur.require_line();
  cur.expect("1CELLS");
  cur.end_line();
  const int n = k.zero_cell_count();
  auto check = [&](int v) {
    if (v >= n) cur.fail("0-cell " + std::to_string(v) + " out of range");
    return v;
  };
  while (!cur.at_end() && !cur.line_starts_with("2CELLS")) {
    int u = check(cur.index()), v = check(cur.index());
    if (u == v) cur.fail("degenerate 1-cell");
    k.add_one_cell(u, v);
    cur.end_line();
  }
  cur.require_line();
  cur.expect("2CELLS");
  cur.end_line();
  while (!cur.at_end()) {
    for (const auto& s : stop)
      if (cur.line_starts_with(s)) return k;
    int a = check(cur.index()), b = check(cur.index()), c = check(cur.index());
    if (a == b || b == c || a == c) cur.fail("degenerate 2-cell");
    k.add_two_cell(a, b, c);
    cur.end_line();
  }
  return k;
}

}  // namespace

std::string write_graph(const Graph& g) {
  std::ostringstream os;
  write_graph_body(os, g);
  return os.str();
}

Graph read_graph(std::string_view text) {
  Cursor cur(text);
  return read_graph_body(cur, {});
}

std::string write_clustering(const Clustering& c) {
  std::ostringstream os;
  for (const auto& cl : c.clusters) {
    for (std::size_t k = 0; k < cl.size(); ++k) os << (k ? " " : "") << cl[k];
    os << "\n";
  }
  return os.str();
}

Clustering read_clustering(std::string_view text) {
  Cursor cur(text);
  Clustering c;
  std::set<int> seen;
  while (!cur.at_end()) {
    std::vector<int> cl;
    while (!cur.line_done()) {
      int v = cur.index();
      if (!seen.insert(v).second) cur.fail("vertex " + std::to_string(v) + " in two clusters");
      cl.push_back(v);
    }
    c.clusters.push_back(std::move(cl));
    cur.end_line();
  }
  int n = seen.empty() ? 0 : *seen.rbegin() + 1;
  if (static_cast<int>(seen.size()) != n) throw ParseError(1, 1, "clusters do not cover 0..n-1");
  return c;
}

std::string write_complex(const Complex2& k) {
  std::ostringstream os;
  write_complex_body(os, k);
  return os.str();
}

Complex2 read_complex(std::string_view text) {
  Cursor cur(text);
  return read_complex_body(cur, {});
}

std::string write_map(const LocalizationMap& m) {
  std::ostringstream os;
  os << "SOURCE\n";
  write_complex_body(os, m.source);
  os << "TARGET\n";
  write_graph_body(os, m.target);
  for (std::size_t i = 0; i < m.vertex_image.size(); ++i) os << "VIMG " << i << "\xE2\x86\x92" << m.vertex_image[i] << "\n";
  for (const auto& [e, walk] : m.edge_path) {
    os << "EPATH (" << e.first << "," << e.second << "):";
    for (int a : walk) os << " " << a;
    os << "\n";
  }
  for (const auto& [t, a] : m.center_image)
    os << "CENTER (" << t[0] << "," << t[1] << "," << t[2] << ")\xE2\x86\x92" << a << "\n";
  os << "RANGE " << m.range << "\n";
  return os.str();
}

LocalizationMap read_map(std::string_view text) {
  Cursor cur(text);
  LocalizationMap m;
  cur.require_line();
  cur.expect("SOURCE");
  cur.end_line();
  m.source = read_complex_body(cur, {"TARGET"});
  cur.require_line();
  cur.expect("TARGET");
  cur.end_line();
  m.target = read_graph_body(cur, {"VIMG", "EPATH", "CENTER", "RANGE"});
  const int n = m.source.zero_cell_count(), nt = m.target.vertex_count();
  auto target_vertex = [&]() {
    int a = cur.index();
    if (a >= nt) cur.fail("target vertex out of range");
    return a;
  };
  m.vertex_image.assign(n, -1);
  while (!cur.at_end()) {
    std::string kw = cur.word();
    if (kw == "VIMG") {
      int i = cur.index();
      if (i >= n) cur.fail("source vertex out of range");
      cur.expect("->");
      m.vertex_image[i] = target_vertex();
    } else if (kw == "EPATH") {
      cur.expect("(");
      int u = cur.index();
      cur.expect(",");
      int v = cur.index();
      cur.expect(")");
      cur.expect(":");
      if (!m.source.has_one_cell(u, v) || u > v) cur.fail("EPATH for a missing or unordered 1-cell");
      std::vector<int> walk;
      while (!cur.line_done()) walk.push_back(target_vertex());
      if (walk.empty()) cur.fail("empty walk");
      m.edge_path[{u, v}] = walk;
    } else if (kw == "CENTER") {
      cur.expect("(");
      int a = cur.index();
      cur.expect(",");
      int b = cur.index();
      cur.expect(",");
      int c = cur.index();
      cur.expect(")");
      cur.expect("->");
      if (!m.source.has_two_cell(a, b, c)) cur.fail("CENTER for a missing 2-cell");
      m.center_image[make_triple(a, b, c)] = target_vertex();
    } else if (kw == "RANGE") {
      m.range = cur.index();
    } else {
      cur.fail("unknown keyword '" + kw + "'");
    }
    cur.end_line();
  }
  for (int i = 0; i < n; ++i)
    if (m.vertex_image[i] < 0) throw ParseError(cur.line_number(), 1, "no VIMG for source vertex " + std::to_string(i));
  return m;
}

std::string write_hamiltonian(const CommutingHamiltonian& h) {
  std::ostringstream os;
  os << "SITES";
  for (int d : h.site_dims) os << " " << d;
  os << "\n";
  for (const auto& t : h.terms) {
    os << "TERM";
    for (int s : t.support) os << " " << s;
    os << "\n";
    if (t.stabilizer) {
      // (1 - S)/2 = (1 + O)/2 with O = -S.
      os << "PAULI " << (t.stabilizer->sign() < 0 ? "+" : "-") << "," << t.stabilizer->str().substr(1) << "\n";
    } else if (!t.pauli_sum.empty()) {
      os << "PAULISUM " << t.pauli_sum.size() << "\n";
      for (const auto& e : t.pauli_sum) os << fmt_real(e.coeff) << " " << e.op.str() << "\n";
    } else {
      os << "DENSE\n";
      write_matrix(os, t.matrix);
    }
  }
  return os.str();
}

CommutingHamiltonian read_hamiltonian(std::string_view text) {
  Cursor cur(text);
  cur.require_line();
  cur.expect("SITES");
  std::vector<int> dims;
  while (!cur.line_done()) {
    int d = cur.index();
    if (d < 1) cur.fail("site dimension must be positive");
    dims.push_back(d);
  }
  cur.end_line();
  CommutingHamiltonian h(dims);
  while (!cur.at_end()) {
    cur.expect("TERM");
    auto support = cur.rest_indices();
    if (support.empty()) cur.fail("empty support");
    for (int s : support)
      if (s >= h.site_count()) cur.fail("site " + std::to_string(s) + " out of range");
    const int term_line = cur.line_number();
    cur.end_line();
    cur.require_line();
    std::string kind = cur.word();
    Term t;
    if (kind == "PAULI") {
      std::string sign = cur.word();
      if (sign != "+" && sign != "-") cur.fail("expected + or -");
      cur.expect(",");
      std::string letters = cur.peek();
      for (char ch : letters)
        if (std::string("IXYZ").find(ch) == std::string::npos) cur.fail("bad Pauli letter in '" + letters + "'");
      PauliString o = PauliString::parse("+" + letters);
      if (o.size() == 0 || static_cast<std::size_t>(o.size()) != support.size())
        cur.fail("Pauli string length does not match the support");
      cur.word();
      o.set_sign(sign == "+" ? -1 : 1);
      for (int s : support)
        if (h.site_dims[s] != 2) cur.fail("PAULI term on a non-qubit site");
      t = Term::stabilizer_projector(support, o);
      cur.end_line();
    } else if (kind == "PAULISUM") {
      long k = cur.integer();
      cur.end_line();
      std::vector<PauliSumEntry> entries;
      for (long e = 0; e < k; ++e) {
        cur.require_line();
        PauliSumEntry pe;
        pe.coeff = cur.real();
        pe.op = read_pauli(cur, support.size());
        entries.push_back(pe);
        cur.end_line();
      }
      try {
        t = Term::from_pauli_sum(support, entries);
      } catch (const std::exception& e) {
        throw ParseError(term_line, 1, e.what());
      }
    } else if (kind == "DENSE") {
      cur.end_line();
      long dim = 1;
      for (int s : support) dim *= h.site_dims[s];
      if (dim > kMaxTermDim) throw ParseError(term_line, 1, "term dimension above the cap");
      t = Term::dense(support, read_matrix(cur, dim));
    } else {
      cur.fail("expected PAULI, PAULISUM or DENSE");
    }
    try {
      h.add(std::move(t));
    } catch (const std::exception& e) {
      throw ParseError(term_line, 1, e.what());
    }
  }
  return h;
}

std::string write_circuit(const Circuit& c) {
  std::ostringstream os;
  os << "REGISTERS " << c.register_count() << "\n";
  for (const auto& r : c.registers) {
    os << "REG " << r.site << " " << r.copy << " " << r.dim;
    for (long k = 0; k < r.initial.size(); ++k) os << " " << fmt_complex(r.initial(k));
    os << "\n";
  }
  for (std::size_t k = 0; k < c.rounds.size(); ++k) {
    os << "ROUND " << k << "\n";
    for (const auto& g : c.rounds[k]) {
      os << "GATE";
      for (int r : g.support) os << " " << r;
      os << "\n";
      if (g.clifford) {
        os << "CLIFFORD\n";
        for (int q = 0; q < g.clifford->qubits(); ++q) os << g.clifford->x_image(q).str() << "\n";
        for (int q = 0; q < g.clifford->qubits(); ++q) os << g.clifford->z_image(q).str() << "\n";
      } else {
        os << "DENSE\n";
        write_matrix(os, g.unitary);
      }
    }
  }
  return os.str();
}

Circuit read_circuit(std::string_view text) {
  Cursor cur(text);
  cur.require_line();
  cur.expect("REGISTERS");
  const int n = cur.index();
  cur.end_line();
  Circuit c;
  for (int k = 0; k < n; ++k) {
    cur.require_line();
    cur.expect("REG");
    int site = cur.index(), copy = cur.index(), dim = cur.index();
    try {
      c.add_register(site, copy, dim);
    } catch (const std::invalid_argument& e) {
      cur.fail(e.what());
    }
    Eigen::VectorXcd init(dim);
    for (int a = 0; a < dim; ++a) {
      double re = cur.real();
      double im = cur.real();
      init(a) = {re, im};
    }
    if (std::abs(init.norm() - 1) > kNormTol) cur.fail("initial state is not normalised");
    c.registers.back().initial = init;
    cur.end_line();
  }
  int expected_round = 0;
  while (!cur.at_end()) {
    cur.expect("ROUND");
    if (cur.index() != expected_round) cur.fail("rounds must be numbered 0, 1, ...");
    cur.end_line();
    ++expected_round;
    std::vector<Gate> round;
    while (!cur.at_end() && !cur.line_starts_with("ROUND")) {
      const int gate_line = cur.line_number();
      cur.expect("GATE");
      auto support = cur.rest_indices();
      if (support.empty()) cur.fail("empty gate support");
      long dim = 1;
      for (int r : support) {
        if (r >= n) cur.fail("register out of range");
        dim *= c.registers[r].dim;
      }
      cur.end_line();
      cur.require_line();
      std::string kind = cur.word();
      cur.end_line();
      try {
        if (kind == "CLIFFORD") {
          std::vector<PauliString> xs, zs;
          for (std::size_t q = 0; q < 2 * support.size(); ++q) {
            cur.require_line();
            (q < support.size() ? xs : zs).push_back(read_pauli(cur, support.size()));
            cur.end_line();
          }
          round.push_back(Gate::from_clifford(support, Clifford::from_images(xs, zs)));
        } else if (kind == "DENSE") {
          round.push_back(Gate::dense(support, read_matrix(cur, dim)));
        } else {
          throw ParseError(gate_line + 1, 1, "expected CLIFFORD or DENSE");
        }
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception& e) {
        throw ParseError(gate_line, 1, e.what());
      }
    }
    c.rounds.push_back(std::move(round));
  }
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ParseError(1, 1, e.what());
  }
  return c;
}

FileKind parse_kind(const std::string& name) {
  if (name == "graph") return FileKind::graph;
  if (name == "clustering") return FileKind::clustering;
  if (name == "complex") return FileKind::complex;
  if (name == "map") return FileKind::map;
  if (name == "hamiltonian") return FileKind::hamiltonian;
  if (name == "circuit") return FileKind::circuit;
  throw std::invalid_argument("unknown file kind '" + name + "'");
}

FileKind detect_kind(std::string_view text) {
  auto lines = tokenize(text);
  if (lines.empty()) throw ParseError(1, 1, "empty input");
  const auto& first = lines[0].tokens[0].text;
  if (first == "SITES") return FileKind::hamiltonian;
  if (first == "REGISTERS") return FileKind::circuit;
  if (first == "0CELLS") return FileKind::complex;
  if (first == "SOURCE") return FileKind::map;
  if (lines[0].tokens.size() == 2) return FileKind::graph;
  return FileKind::clustering;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

bool roundtrip_text(std::string_view text, FileKind kind) {
  auto once = [&](std::string_view t) -> std::string {
    switch (kind) {
      case FileKind::graph: return write_graph(read_graph(t));
      case FileKind::clustering: return write_clustering(read_clustering(t));
      case FileKind::complex: return write_complex(read_complex(t));
      case FileKind::map: return write_map(read_map(t));
      case FileKind::hamiltonian: return write_hamiltonian(read_hamiltonian(t));
      case FileKind::circuit: return write_circuit(read_circuit(t));
    }
    return {};
  };
  const std::string a = once(text);
  return once(a) == a;
}

}  // namespace loctriv
