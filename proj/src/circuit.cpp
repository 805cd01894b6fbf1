#include "loctriv/circuit.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace loctriv {

Gate Gate::dense(std::vector<int> support, Eigen::MatrixXcd u) {
  Gate g;
  g.support = std::move(support);
  g.unitary = std::move(u);
  return g;
}

Gate Gate::from_clifford(std::vector<int> support, Clifford c) {
  if (static_cast<int>(support.size()) != c.qubits()) throw std::invalid_argument("Clifford gate width mismatch");
  Gate g;
  g.support = std::move(support);
  g.clifford = std::move(c);
  return g;
}

Eigen::MatrixXcd Gate::matrix() const {
  if (unitary.size() > 0) return unitary;
  if (clifford) return clifford->dense();
  throw std::logic_error("gate without a matrix");
}

Circuit Circuit::for_sites(const std::vector<int>& site_dims) {
  Circuit c;
  for (int s = 0; s < static_cast<int>(site_dims.size()); ++s) c.add_register(s, 0, site_dims[s]);
  return c;
}

int Circuit::add_register(int site, int copy, int dim) {
  if (dim < 1) throw std::invalid_argument("register dimension must be positive");
  if (find_register(site, copy) >= 0) throw std::invalid_argument("duplicate register");
  Register r;
  r.site = site;
  r.copy = copy;
  r.dim = dim;
  r.initial = Eigen::VectorXcd::Zero(dim);
  r.initial(0) = 1;
  registers.push_back(std::move(r));
  return register_count() - 1;
}

int Circuit::find_register(int site, int copy) const {
  for (int i = 0; i < register_count(); ++i) {
    if (registers[i].site == site && registers[i].copy == copy) return i;
  }
  return -1;
}

int Circuit::real_count() const {
  return static_cast<int>(std::count_if(registers.begin(), registers.end(), [](const Register& r) { return r.copy == 0; }));
}

int Circuit::depth() const {
  return static_cast<int>(std::count_if(rounds.begin(), rounds.end(), [](const auto& r) { return !r.empty(); }));
}

int Circuit::gate_count() const {
  int c = 0;
  for (const auto& r : rounds) c += static_cast<int>(r.size());
  return c;
}

int Circuit::max_gate_width() const {
  int w = 0;
  for (const auto& r : rounds) {
    for (const auto& g : r) w = std::max(w, static_cast<int>(g.support.size()));
  }
  return w;
}

bool Circuit::all_clifford() const {
  for (const auto& r : rounds) {
    for (const auto& g : r) {
      if (!g.is_clifford()) return false;
    }
  }
  return true;
}

void Circuit::validate() const {
  for (const auto& r : registers) {
    if (r.initial.size() != r.dim) throw std::invalid_argument("register initial state has wrong size");
    if (std::abs(r.initial.norm() - 1.0) > 1e-10) throw std::invalid_argument("register initial state not normalised");
  }
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    std::set<int> used;
    for (const auto& g : rounds[k]) {
      long dim = 1;
      for (int s : g.support) {
        if (s < 0 || s >= register_count()) throw std::invalid_argument("gate register out of range");
        if (!used.insert(s).second) {
          throw std::invalid_argument("overlapping gate supports in round " + std::to_string(k));
        }
        dim *= registers[s].dim;
      }
      if (g.is_clifford()) {
        for (int s : g.support) {
          if (registers[s].dim != 2) throw std::invalid_argument("Clifford gate on a non-qubit register");
        }
      } else if (g.unitary.rows() != dim || g.unitary.cols() != dim) {
        throw std::invalid_argument("gate matrix does not match its support");
      }
    }
  }
}

void Circuit::append_scheduled(const std::vector<Gate>& ordered) {
  // Gates go after everything already present.
  const int floor = static_cast<int>(rounds.size());
  std::vector<int> next_free(register_count(), floor);
  for (const auto& g : ordered) {
    int r = floor;
    for (int s : g.support) r = std::max(r, next_free.at(s));
    if (r >= static_cast<int>(rounds.size())) rounds.resize(r + 1);
    rounds[r].push_back(g);
    for (int s : g.support) next_free[s] = r + 1;
  }
}

void Circuit::drop_empty_rounds() {
  rounds.erase(std::remove_if(rounds.begin(), rounds.end(), [](const auto& r) { return r.empty(); }), rounds.end());
}

Eigen::MatrixXcd unitary_with_first_column(const Eigen::VectorXcd& v) {
  const long n = v.size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
  m.col(0) = v;
  // Householder QR of [v | I] gives an orthonormal basis starting along v.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  Eigen::MatrixXcd q = qr.householderQ();
  const std::complex<double> overlap = q.col(0).dot(v);
  q.col(0) *= overlap / std::abs(overlap);
  return q;
}

}  // namespace loctriv
