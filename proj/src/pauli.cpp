#include "loctriv/pauli.hpp"

#include <algorithm>
#include <bit>
#include <complex>
#include <stdexcept>

namespace loctriv {

void xor_into(Bits& dst, const Bits& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

bool is_zero(const Bits& b) {
  return std::all_of(b.begin(), b.end(), [](std::uint64_t w) { return w == 0; });
}

int first_set_bit(const Bits& b) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] != 0) return static_cast<int>(i * 64 + std::countr_zero(b[i]));
  }
  return -1;
}

namespace {

int popcount_and(const Bits& a, const Bits& b) {
  int c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) c += std::popcount(a[i] & b[i]);
  return c;
}

std::complex<double> ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

}  // namespace

PauliString::PauliString(int n) : n_(n), x_(bit_words(n), 0), z_(bit_words(n), 0) {}

PauliString PauliString::parse(std::string_view s) {
  int phase = 0;
  std::size_t pos = 0;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    if (s[pos] == '-') phase = 2;
    ++pos;
  }
  if (pos < s.size() && s[pos] == 'i') {
    phase += 1;
    ++pos;
  }
  PauliString p(static_cast<int>(s.size() - pos));
  for (int q = 0; pos < s.size(); ++pos, ++q) p.set_letter(q, s[pos]);
  p.set_phase(phase);
  return p;
}

PauliString PauliString::single(int n, int qubit, char letter) {
  PauliString p(n);
  p.set_letter(qubit, letter);
  return p;
}

void PauliString::set(int q, bool x, bool z) {
  set_bit(x_, q, x);
  set_bit(z_, q, z);
}

void PauliString::set_letter(int q, char letter) {
  switch (letter) {
    case 'I': set(q, false, false); break;
    case 'X': set(q, true, false); break;
    case 'Y': set(q, true, true); break;
    case 'Z': set(q, false, true); break;
    default: throw std::invalid_argument(std::string("bad Pauli letter '") + letter + "'");
  }
}

char PauliString::letter(int q) const {
  static const char kLetters[4] = {'I', 'X', 'Z', 'Y'};
  return kLetters[(x(q) ? 1 : 0) + (z(q) ? 2 : 0)];
}

int PauliString::sign() const {
  if (!hermitian()) throw std::logic_error("Pauli string has an imaginary phase");
  return phase_ == 0 ? 1 : -1;
}

PauliString PauliString::unsigned_copy() const {
  PauliString p = *this;
  p.phase_ = 0;
  return p;
}

bool PauliString::is_identity() const { return is_zero(x_) && is_zero(z_); }

int PauliString::weight() const {
  int w = 0;
  for (std::size_t i = 0; i < x_.size(); ++i) w += std::popcount(x_[i] | z_[i]);
  return w;
}

std::vector<int> PauliString::support() const {
  std::vector<int> s;
  for (int q = 0; q < n_; ++q) {
    if (x(q) || z(q)) s.push_back(q);
  }
  return s;
}

bool PauliString::commutes(const PauliString& o) const {
  if (o.n_ != n_) throw std::invalid_argument("Pauli strings on different qubit counts");
  return ((popcount_and(x_, o.z_) + popcount_and(z_, o.x_)) & 1) == 0;
}

PauliString& PauliString::operator*=(const PauliString& o) {
  if (o.n_ != n_) throw std::invalid_argument("Pauli strings on different qubit counts");
  int g = 0;
  for (std::size_t w = 0; w < x_.size(); ++w) {
    std::uint64_t active = (x_[w] | z_[w]) & (o.x_[w] | o.z_[w]);
    while (active != 0) {
      const int b = std::countr_zero(active);
      active &= active - 1;
      const int x1 = (x_[w] >> b) & 1, z1 = (z_[w] >> b) & 1;
      const int x2 = (o.x_[w] >> b) & 1, z2 = (o.z_[w] >> b) & 1;
      if (x1 && z1) {
        g += z2 - x2;
      } else if (x1) {
        g += z2 * (2 * x2 - 1);
      } else {
        g += x2 * (1 - 2 * z2);
      }
    }
    x_[w] ^= o.x_[w];
    z_[w] ^= o.z_[w];
  }
  set_phase(phase_ + o.phase_ + g);
  return *this;
}

PauliString PauliString::restricted(const std::vector<int>& qubits) const {
  PauliString p(static_cast<int>(qubits.size()));
  for (std::size_t k = 0; k < qubits.size(); ++k) p.set(static_cast<int>(k), x(qubits[k]), z(qubits[k]));
  return p;
}

PauliString PauliString::embedded(int n, const std::vector<int>& qubits) const {
  if (static_cast<int>(qubits.size()) != n_) throw std::invalid_argument("embedding size mismatch");
  PauliString p(n);
  for (int k = 0; k < n_; ++k) p.set(qubits[k], x(k), z(k));
  p.phase_ = phase_;
  return p;
}

Bits PauliString::symplectic() const {
  Bits v(bit_words(2 * n_), 0);
  for (int q = 0; q < n_; ++q) {
    if (x(q)) set_bit(v, q, true);
    if (z(q)) set_bit(v, n_ + q, true);
  }
  return v;
}

PauliString PauliString::from_symplectic(const Bits& v, int n) {
  PauliString p(n);
  for (int q = 0; q < n; ++q) p.set(q, get_bit(v, q), get_bit(v, n + q));
  return p;
}

Eigen::MatrixXcd PauliString::dense() const {
  if (n_ > 16) throw std::invalid_argument("dense Pauli matrix too large");
  const std::size_t dim = std::size_t{1} << n_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const std::uint64_t xm = n_ ? x_[0] : 0, zm = n_ ? z_[0] : 0;
  const auto base = ipow(phase_ + std::popcount(xm & zm));
  for (std::size_t c = 0; c < dim; ++c) {
    const double s = (std::popcount(zm & c) & 1) ? -1.0 : 1.0;
    m(c ^ xm, c) = base * s;
  }
  return m;
}

Eigen::VectorXcd PauliString::apply(const Eigen::VectorXcd& psi) const {
  const std::size_t dim = std::size_t{1} << n_;
  if (n_ > 30 || static_cast<std::size_t>(psi.size()) != dim) throw std::invalid_argument("state size mismatch");
  const std::uint64_t xm = n_ ? x_[0] : 0, zm = n_ ? z_[0] : 0;
  const auto base = ipow(phase_ + std::popcount(xm & zm));
  Eigen::VectorXcd out(psi.size());
  for (std::size_t c = 0; c < dim; ++c) {
    const double s = (std::popcount(zm & c) & 1) ? -1.0 : 1.0;
    out(c ^ xm) = base * s * psi(c);
  }
  return out;
}

std::string PauliString::str() const {
  std::string s = (phase_ == 0 || phase_ == 1) ? "+" : "-";
  if (phase_ % 2) s += 'i';
  for (int q = 0; q < n_; ++q) s += letter(q);
  return s;
}

bool PauliString::operator<(const PauliString& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  if (x_ != o.x_) return x_ < o.x_;
  if (z_ != o.z_) return z_ < o.z_;
  return phase_ < o.phase_;
}

// ---------------------------------------------------------------- GF(2)

void Gf2Basis::reduce(Bits& v, Bits& combo) const {
  for (const auto& r : rows_) {
    if (get_bit(v, r.pivot)) {
      xor_into(v, r.v);
      for (std::size_t i = 0; i < r.combo.size(); ++i) combo[i] ^= r.combo[i];
    }
  }
}

std::optional<std::vector<int>> Gf2Basis::insert(const Bits& v0) {
  const int id = inserted_++;
  Bits v = v0;
  v.resize(bit_words(nbits_), 0);
  Bits combo(bit_words(inserted_), 0);
  for (auto& r : rows_) r.combo.resize(combo.size(), 0);
  set_bit(combo, id, true);
  reduce(v, combo);
  const int pivot = first_set_bit(v);
  if (pivot < 0) {
    std::vector<int> dep;
    for (int i = 0; i < inserted_; ++i) {
      if (get_bit(combo, i)) dep.push_back(i);
    }
    return dep;
  }
  for (auto& r : rows_) {
    if (get_bit(r.v, pivot)) {
      xor_into(r.v, v);
      for (std::size_t i = 0; i < combo.size(); ++i) r.combo[i] ^= combo[i];
    }
  }
  rows_.push_back({std::move(v), std::move(combo), pivot});
  return std::nullopt;
}

std::optional<std::vector<int>> Gf2Basis::express(const Bits& v0) const {
  Bits v = v0;
  v.resize(bit_words(nbits_), 0);
  Bits combo(bit_words(std::max(inserted_, 1)), 0);
  for (const auto& r : rows_) {
    if (get_bit(v, r.pivot)) {
      xor_into(v, r.v);
      for (std::size_t i = 0; i < r.combo.size(); ++i) combo[i] ^= r.combo[i];
    }
  }
  if (!is_zero(v)) return std::nullopt;
  std::vector<int> out;
  for (int i = 0; i < inserted_; ++i) {
    if (get_bit(combo, i)) out.push_back(i);
  }
  return out;
}

std::optional<Gf2Solution> gf2_solve(const std::vector<Bits>& rows, const std::vector<int>& rhs, int nvars) {
  if (rows.size() != rhs.size()) throw std::invalid_argument("gf2_solve: rhs size mismatch");
  const int words = bit_words(nvars + 1);
  std::vector<Bits> m;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Bits row(words, 0);
    for (int c = 0; c < nvars; ++c) {
      if (get_bit(rows[r], c)) set_bit(row, c, true);
    }
    set_bit(row, nvars, rhs[r] & 1);
    m.push_back(std::move(row));
  }
  std::vector<int> pivot_col;
  int rank = 0;
  for (int c = 0; c < nvars && rank < static_cast<int>(m.size()); ++c) {
    int sel = -1;
    for (int r = rank; r < static_cast<int>(m.size()); ++r) {
      if (get_bit(m[r], c)) {
        sel = r;
        break;
      }
    }
    if (sel < 0) continue;
    std::swap(m[rank], m[sel]);
    for (int r = 0; r < static_cast<int>(m.size()); ++r) {
      if (r != rank && get_bit(m[r], c)) xor_into(m[r], m[rank]);
    }
    pivot_col.push_back(c);
    ++rank;
  }
  for (int r = rank; r < static_cast<int>(m.size()); ++r) {
    if (get_bit(m[r], nvars)) return std::nullopt;
  }
  Gf2Solution sol;
  sol.particular.assign(bit_words(nvars), 0);
  std::vector<bool> is_pivot(nvars, false);
  for (int r = 0; r < rank; ++r) {
    is_pivot[pivot_col[r]] = true;
    if (get_bit(m[r], nvars)) set_bit(sol.particular, pivot_col[r], true);
  }
  for (int f = 0; f < nvars; ++f) {
    if (is_pivot[f]) continue;
    Bits k(bit_words(nvars), 0);
    set_bit(k, f, true);
    for (int r = 0; r < rank; ++r) {
      if (get_bit(m[r], f)) set_bit(k, pivot_col[r], true);
    }
    sol.kernel.push_back(std::move(k));
  }
  return sol;
}

std::vector<std::vector<int>> gf2_nullspace(const std::vector<Bits>& cols, int nbits) {
  Gf2Basis b(nbits);
  std::vector<std::vector<int>> out;
  for (const auto& c : cols) {
    if (auto dep = b.insert(c)) out.push_back(std::move(*dep));
  }
  return out;
}

// ---------------------------------------------------------------- stabilizer group

namespace {

bool symplectic_bit(const PauliString& p, int b) { return b < p.size() ? p.x(b) : p.z(b - p.size()); }

int first_symplectic_bit(const PauliString& p) {
  const int fx = first_set_bit(p.x_bits());
  const int fz = first_set_bit(p.z_bits());
  if (fx >= 0 && fx < p.size()) return fx;
  if (fz >= 0 && fz < p.size()) return p.size() + fz;
  return -1;
}

}  // namespace

PauliString StabilizerGroup::reduce(const PauliString& p, bool& zero) const {
  PauliString r = p;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (symplectic_bit(r, pivots_[i])) r *= rows_[i];
  }
  zero = r.is_identity();
  return r;
}

bool StabilizerGroup::commutes_with_all(const PauliString& p) const {
  return std::all_of(rows_.begin(), rows_.end(), [&](const PauliString& r) { return r.commutes(p); });
}

bool StabilizerGroup::add(const PauliString& g) {
  if (g.size() != n_) throw std::invalid_argument("stabilizer qubit count mismatch");
  if (!g.hermitian()) throw std::invalid_argument("stabilizer must be Hermitian");
  if (!commutes_with_all(g)) throw std::invalid_argument("stabilizer anticommutes with the group");
  bool zero = false;
  PauliString r = reduce(g, zero);
  if (zero) {
    if (r.phase() == 0) return false;
    throw std::invalid_argument("stabilizer group would contain -I");
  }
  const int pivot = first_symplectic_bit(r);
  for (auto& row : rows_) {
    if (symplectic_bit(row, pivot)) row *= r;
  }
  rows_.push_back(r);
  pivots_.push_back(pivot);
  return true;
}

int StabilizerGroup::sign_of(const PauliString& p) const {
  if (!commutes_with_all(p)) return 0;
  bool zero = false;
  PauliString r = reduce(p, zero);
  if (!zero) return 0;
  return r.phase() == 0 ? 1 : -1;
}

// ---------------------------------------------------------------- symplectic frames

SymplecticSplit symplectic_split(const std::vector<PauliString>& gens, int n) {
  std::vector<PauliString> work;
  for (const auto& g : gens) {
    if (g.size() != n) throw std::invalid_argument("symplectic_split: size mismatch");
    if (!g.is_identity()) work.push_back(g.unsigned_copy());
  }
  SymplecticSplit out;
  std::vector<PauliString> iso;
  while (!work.empty()) {
    PauliString v = work.front();
    work.erase(work.begin());
    if (v.is_identity()) continue;
    auto it = std::find_if(work.begin(), work.end(), [&](const PauliString& w) { return !v.commutes(w); });
    if (it == work.end()) {
      iso.push_back(v);
      continue;
    }
    PauliString w = *it;
    work.erase(it);
    for (auto& u : work) {
      const bool aw = !u.commutes(w);
      const bool av = !u.commutes(v);
      if (aw) u *= v;
      if (av) u *= w;
      u.set_phase(0);
    }
    out.pairs.emplace_back(v, w);
  }
  Gf2Basis basis(2 * n);
  for (auto& v : iso) {
    if (!basis.insert(v.symplectic())) out.isotropic.push_back(v);
  }
  return out;
}

std::vector<PauliString> pauli_center(const std::vector<PauliString>& gens, int n) {
  return symplectic_split(gens, n).isotropic;
}

namespace {

// Linear functional d -> <u, d> as a bit row.
Bits form_row(const PauliString& u) {
  const int n = u.size();
  Bits r(bit_words(2 * n), 0);
  for (int q = 0; q < n; ++q) {
    if (u.z(q)) set_bit(r, q, true);
    if (u.x(q)) set_bit(r, n + q, true);
  }
  return r;
}

}  // namespace

std::vector<std::pair<PauliString, PauliString>> complete_symplectic_basis(
    const std::vector<std::pair<PauliString, PauliString>>& pairs, const std::vector<PauliString>& isotropic, int n) {
  std::vector<Bits> rows;
  for (const auto& [a, b] : pairs) {
    rows.push_back(form_row(a));
    rows.push_back(form_row(b));
  }
  for (const auto& c : isotropic) rows.push_back(form_row(c));
  const std::size_t base = 2 * pairs.size();
  std::vector<PauliString> partners;
  for (std::size_t j = 0; j < isotropic.size(); ++j) {
    std::vector<int> rhs(rows.size(), 0);
    rhs[base + j] = 1;
    auto sol = gf2_solve(rows, rhs, 2 * n);
    if (!sol) throw std::invalid_argument("complete_symplectic_basis: inputs are not independent");
    partners.push_back(PauliString::from_symplectic(sol->particular, n));
  }
  for (std::size_t j = 0; j < partners.size(); ++j) {
    for (std::size_t k = j + 1; k < partners.size(); ++k) {
      if (!partners[j].commutes(partners[k])) {
        partners[k] *= isotropic[j];
        partners[k].set_phase(0);
      }
    }
  }
  std::vector<std::pair<PauliString, PauliString>> out = pairs;
  for (auto& p : out) {
    p.first.set_phase(0);
    p.second.set_phase(0);
  }
  for (std::size_t j = 0; j < isotropic.size(); ++j) out.emplace_back(partners[j], isotropic[j].unsigned_copy());
  std::vector<Bits> all;
  for (const auto& [a, b] : out) {
    all.push_back(form_row(a));
    all.push_back(form_row(b));
  }
  auto sol = gf2_solve(all, std::vector<int>(all.size(), 0), 2 * n);
  std::vector<PauliString> rest;
  for (const auto& k : sol->kernel) rest.push_back(PauliString::from_symplectic(k, n));
  auto split = symplectic_split(rest, n);
  if (!split.isotropic.empty()) throw std::logic_error("complete_symplectic_basis: degenerate complement");
  for (auto& p : split.pairs) out.push_back(p);
  if (static_cast<int>(out.size()) != n) throw std::logic_error("complete_symplectic_basis: wrong basis size");
  return out;
}

// ---------------------------------------------------------------- Clifford

Clifford::Clifford(int n) : n_(n) {
  for (int q = 0; q < n; ++q) {
    xs_.push_back(PauliString::single(n, q, 'X'));
    zs_.push_back(PauliString::single(n, q, 'Z'));
  }
}

Clifford Clifford::from_images(std::vector<PauliString> x_images, std::vector<PauliString> z_images) {
  Clifford c;
  c.n_ = static_cast<int>(x_images.size());
  c.xs_ = std::move(x_images);
  c.zs_ = std::move(z_images);
  if (!c.valid()) throw std::invalid_argument("images do not define a Clifford unitary");
  return c;
}

Clifford Clifford::from_basis_map(const std::vector<PauliString>& basis, const std::vector<PauliString>& images) {
  if (basis.empty() || basis.size() != images.size() || basis.size() % 2) {
    throw std::invalid_argument("from_basis_map: need 2n basis elements and images");
  }
  const int n = static_cast<int>(basis.size() / 2);
  Gf2Basis b(2 * n);
  for (const auto& p : basis) {
    if (p.size() != n) throw std::invalid_argument("from_basis_map: size mismatch");
    if (b.insert(p.symplectic())) throw std::invalid_argument("from_basis_map: basis is dependent");
  }
  auto image_of = [&](const PauliString& target) {
    auto combo = b.express(target.symplectic());
    PauliString prod(n), img(n);
    for (int k : *combo) {
      prod *= basis[k];
      img *= images[k];
    }
    img.set_phase(img.phase() - prod.phase() + target.phase());
    return img;
  };
  std::vector<PauliString> xs, zs;
  for (int q = 0; q < n; ++q) {
    xs.push_back(image_of(PauliString::single(n, q, 'X')));
    zs.push_back(image_of(PauliString::single(n, q, 'Z')));
  }
  return from_images(std::move(xs), std::move(zs));
}

Clifford Clifford::hadamard(int n, int q) {
  Clifford c(n);
  std::swap(c.xs_[q], c.zs_[q]);
  return c;
}

Clifford Clifford::phase_gate(int n, int q) {
  Clifford c(n);
  c.xs_[q] = PauliString::single(n, q, 'Y');
  return c;
}

Clifford Clifford::cnot(int n, int control, int target) {
  Clifford c(n);
  c.xs_[control] *= PauliString::single(n, target, 'X');
  c.zs_[target] *= PauliString::single(n, control, 'Z');
  return c;
}

Clifford Clifford::pauli(const PauliString& p) {
  Clifford c(p.size());
  for (int q = 0; q < c.n_; ++q) {
    if (!c.xs_[q].commutes(p)) c.xs_[q].set_phase(2);
    if (!c.zs_[q].commutes(p)) c.zs_[q].set_phase(2);
  }
  return c;
}

PauliString Clifford::conjugate(const PauliString& p) const {
  if (p.size() != n_) throw std::invalid_argument("Clifford::conjugate: size mismatch");
  PauliString r(n_);
  int phase = p.phase();
  for (int q = 0; q < n_; ++q) {
    const bool x = p.x(q), z = p.z(q);
    if (x && z) {
      r *= xs_[q];
      r *= zs_[q];
      phase += 1;
    } else if (x) {
      r *= xs_[q];
    } else if (z) {
      r *= zs_[q];
    }
  }
  r.set_phase(r.phase() + phase);
  return r;
}

Clifford Clifford::then(const Clifford& next) const {
  if (next.n_ != n_) throw std::invalid_argument("Clifford::then: size mismatch");
  Clifford c;
  c.n_ = n_;
  for (int q = 0; q < n_; ++q) {
    c.xs_.push_back(next.conjugate(xs_[q]));
    c.zs_.push_back(next.conjugate(zs_[q]));
  }
  return c;
}

Clifford Clifford::inverse() const {
  std::vector<PauliString> basis, images;
  for (int q = 0; q < n_; ++q) {
    basis.push_back(xs_[q]);
    basis.push_back(zs_[q]);
    images.push_back(PauliString::single(n_, q, 'X'));
    images.push_back(PauliString::single(n_, q, 'Z'));
  }
  return from_basis_map(basis, images);
}

bool Clifford::is_identity() const { return *this == Clifford(n_); }

bool Clifford::valid() const {
  if (static_cast<int>(xs_.size()) != n_ || static_cast<int>(zs_.size()) != n_) return false;
  for (int i = 0; i < n_; ++i) {
    if (xs_[i].size() != n_ || zs_[i].size() != n_ || !xs_[i].hermitian() || !zs_[i].hermitian()) return false;
    for (int j = 0; j < n_; ++j) {
      if (xs_[i].commutes(zs_[j]) == (i == j)) return false;
      if (j > i && (!xs_[i].commutes(xs_[j]) || !zs_[i].commutes(zs_[j]))) return false;
    }
  }
  return true;
}

Eigen::MatrixXcd Clifford::dense() const {
  if (n_ > 12) throw std::invalid_argument("dense Clifford too large");
  const std::size_t dim = std::size_t{1} << n_;
  // Common +1 eigenvector of the Z images, obtained by projecting a fixed
  // generic vector.
  Eigen::VectorXcd psi(dim);
  for (std::size_t c = 0; c < dim; ++c) psi(c) = std::complex<double>(1.0 + 0.37 * c, 0.11 * (c % 7) - 0.5);
  for (int q = 0; q < n_; ++q) psi = 0.5 * (psi + zs_[q].apply(psi));
  // The generic vector can be orthogonal to the target; some basis state is not.
  for (std::size_t c = 0; c < dim && psi.norm() < 1e-6; ++c) {
    psi = Eigen::VectorXcd::Unit(dim, c);
    for (int q = 0; q < n_; ++q) psi = 0.5 * (psi + zs_[q].apply(psi));
  }
  psi.normalize();
  Eigen::MatrixXcd m(dim, dim);
  m.col(0) = psi;
  for (std::size_t c = 1; c < dim; ++c) {
    const int low = std::countr_zero(c);
    m.col(c) = xs_[low].apply(m.col(c ^ (std::size_t{1} << low)));
  }
  return m;
}

std::vector<PauliString> complete_stabilizers(const std::vector<PauliString>& stabilizers, int n) {
  auto basis = complete_symplectic_basis({}, stabilizers, n);
  std::vector<PauliString> out = stabilizers;
  for (std::size_t k = stabilizers.size(); k < basis.size(); ++k) out.push_back(basis[k].second);
  return out;
}

Clifford state_preparation(const std::vector<PauliString>& stabilizers, int n) {
  if (static_cast<int>(stabilizers.size()) != n) throw std::invalid_argument("state_preparation: need n stabilizers");
  auto basis = complete_symplectic_basis({}, stabilizers, n);
  std::vector<PauliString> xs, zs;
  for (int q = 0; q < n; ++q) {
    xs.push_back(basis[q].first);
    zs.push_back(stabilizers[q]);
  }
  return Clifford::from_images(std::move(xs), std::move(zs));
}

}  // namespace loctriv
