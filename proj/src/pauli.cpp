#include "decochain/pauli.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace decochain {

namespace {

// single-site product table: a*b = phase * c, with X=0, Y=1, Z=2.
// Identical operators square to identity (handled separately).
// For a != b: XY=iZ, YX=-iZ, YZ=iX, ZY=-iX, ZX=iY, XZ=-iY.
struct SiteProduct {
  PauliOp op;
  Complex phase;
};

SiteProduct site_product(PauliOp a, PauliOp b) {
  const int ia = static_cast<int>(a), ib = static_cast<int>(b);
  // remaining operator index: the one that is neither ia nor ib
  const int ic = 3 - ia - ib;
  // cyclic (X->Y->Z->X) gives +i, anticyclic -i
  const bool cyclic = (ib - ia + 3) % 3 == 1;
  return {static_cast<PauliOp>(ic), cyclic ? Complex(0, 1) : Complex(0, -1)};
}

char op_char(PauliOp op) {
  switch (op) {
    case PauliOp::X: return 'X';
    case PauliOp::Y: return 'Y';
    case PauliOp::Z: return 'Z';
  }
  return '?';
}

}  // namespace

PauliString PauliString::single(int site, PauliOp op, Complex coeff) {
  PauliString p(coeff);
  p.factors_[site] = op;
  return p;
}

int PauliString::min_site() const {
  if (factors_.empty()) throw std::logic_error("min_site on identity string");
  return factors_.begin()->first;
}

int PauliString::max_site() const {
  if (factors_.empty()) throw std::logic_error("max_site on identity string");
  return factors_.rbegin()->first;
}

bool PauliString::commutes_with(const PauliString& other) const {
  // strings commute iff the number of sites with distinct non-identity
  // operators is even
  int anti = 0;
  auto it = factors_.begin();
  auto jt = other.factors_.begin();
  while (it != factors_.end() && jt != other.factors_.end()) {
    if (it->first < jt->first) {
      ++it;
    } else if (jt->first < it->first) {
      ++jt;
    } else {
      if (it->second != jt->second) ++anti;
      ++it;
      ++jt;
    }
  }
  return anti % 2 == 0;
}

PauliString PauliString::conjugated() const {
  PauliString out = *this;
  out.coeff_ = std::conj(coeff_);
  int n_y = 0;
  for (const auto& [site, op] : factors_)
    if (op == PauliOp::Y) ++n_y;
  if (n_y % 2 == 1) out.coeff_ = -out.coeff_;
  return out;
}

PauliString PauliString::dagger() const {
  PauliString out = *this;
  out.coeff_ = std::conj(coeff_);
  return out;
}

PauliString operator*(const PauliString& a, const PauliString& b) {
  PauliString out(a.coeff_ * b.coeff_);
  auto it = a.factors_.begin();
  auto jt = b.factors_.begin();
  while (it != a.factors_.end() || jt != b.factors_.end()) {
    if (jt == b.factors_.end() || (it != a.factors_.end() && it->first < jt->first)) {
      out.factors_[it->first] = it->second;
      ++it;
    } else if (it == a.factors_.end() || jt->first < it->first) {
      out.factors_[jt->first] = jt->second;
      ++jt;
    } else {
      if (it->second == jt->second) {
        // P^2 = I, site drops out
      } else {
        auto [op, phase] = site_product(it->second, jt->second);
        out.factors_[it->first] = op;
        out.coeff_ *= phase;
      }
      ++it;
      ++jt;
    }
  }
  return out;
}

PauliString::Compiled PauliString::compile(int n_sites) const {
  if (n_sites < 1 || n_sites > 64)
    throw std::invalid_argument("compile: n_sites out of range");
  Compiled c;
  int n_y = 0;
  for (const auto& [site, op] : factors_) {
    if (site < 0 || site >= n_sites)
      throw std::out_of_range("compile: factor site outside lattice");
    const uint64_t bit = uint64_t(1) << site;
    switch (op) {
      case PauliOp::X: c.xmask |= bit; break;
      case PauliOp::Y: c.xmask |= bit; c.zmask |= bit; ++n_y; break;
      case PauliOp::Z: c.zmask |= bit; break;
    }
  }
  static const Complex i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  c.phase = coeff_ * i_pow[n_y % 4];
  return c;
}

Complex PauliString::external_phase() const {
  int n_y = 0;
  for (const auto& [site, op] : factors_)
    if (op == PauliOp::Y) ++n_y;
  static const Complex i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return coeff_ * i_pow[n_y % 4];
}

Eigen::Matrix2d PauliString::real_site_matrix(PauliOp op) {
  Eigen::Matrix2d m;
  switch (op) {
    case PauliOp::X: m << 0, 1, 1, 0; break;
    case PauliOp::Y: m << 0, -1, 1, 0; break;  // Y / i
    case PauliOp::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

void PauliString::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out,
                        int n_sites) const {
  if (n_sites > 24) throw std::invalid_argument("apply: n_sites > 24");
  const uint64_t dim = uint64_t(1) << n_sites;
  if (static_cast<uint64_t>(in.size()) != dim)
    throw std::invalid_argument("apply: state dimension mismatch");
  const Compiled c = compile(n_sites);
  out.resize(in.size());
  for (uint64_t b = 0; b < dim; ++b) {
    const double sign = parity64(b & c.zmask) ? -1.0 : 1.0;
    out[b ^ c.xmask] = c.phase * sign * in[b];
  }
}

Complex PauliString::expectation(const Eigen::VectorXcd& v, int n_sites) const {
  if (n_sites > 24) throw std::invalid_argument("expectation: n_sites > 24");
  const uint64_t dim = uint64_t(1) << n_sites;
  if (static_cast<uint64_t>(v.size()) != dim)
    throw std::invalid_argument("expectation: state dimension mismatch");
  const Compiled c = compile(n_sites);
  Complex acc = 0.0;
  for (uint64_t b = 0; b < dim; ++b) {
    const double sign = parity64(b & c.zmask) ? -1.0 : 1.0;
    acc += std::conj(v[b ^ c.xmask]) * (c.phase * sign) * v[b];
  }
  return acc;
}

Eigen::MatrixXcd PauliString::to_dense(int n_sites) const {
  if (n_sites > 14) throw std::invalid_argument("to_dense: n_sites > 14");
  const uint64_t dim = uint64_t(1) << n_sites;
  const Compiled c = compile(n_sites);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (uint64_t b = 0; b < dim; ++b) {
    const double sign = parity64(b & c.zmask) ? -1.0 : 1.0;
    m(b ^ c.xmask, b) = c.phase * sign;
  }
  return m;
}

std::string PauliString::str() const {
  std::ostringstream os;
  os << "(" << coeff_.real();
  if (coeff_.imag() != 0.0) os << (coeff_.imag() > 0 ? "+" : "") << coeff_.imag() << "i";
  os << ")";
  if (factors_.empty()) {
    os << " I";
  } else {
    for (const auto& [site, op] : factors_) os << " " << op_char(op) << site;
  }
  return os.str();
}

}  // namespace decochain
