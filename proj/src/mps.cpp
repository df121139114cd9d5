#include "decochain/mps.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace decochain {

namespace {

// squared-Schmidt-value floor below which levels are eigensolver noise
constexpr double kWeightFloor = 1e-14;

Eigen::VectorXd unit_schmidt(int k) {
  return Eigen::VectorXd::Constant(k, 1.0 / std::sqrt(double(k)));
}

void invalidate(MPSState& m, int bond) { m.schmidt[bond].resize(0); }

// one exact QR step moving the center right
void qr_step_right(MPSState& m) {
  const int c = m.center;
  const int dl = m.bond_dim(c), dr = m.bond_dim(c + 1);
  Eigen::MatrixXd theta(2 * dl, dr);
  for (int s = 0; s < 2; ++s) theta.block(s * dl, 0, dl, dr) = m.a[c][s];
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(theta);
  const int r = std::min(2 * dl, dr);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(2 * dl, r);
  Eigen::MatrixXd rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (int s = 0; s < 2; ++s) {
    m.a[c][s] = q.block(s * dl, 0, dl, r);
    m.a[c + 1][s] = rr * m.a[c + 1][s];
  }
  invalidate(m, c + 1);
  ++m.center;
}

// one exact LQ step moving the center left
void lq_step_left(MPSState& m) {
  const int c = m.center;
  const int dl = m.bond_dim(c), dr = m.bond_dim(c + 1);
  Eigen::MatrixXd theta(dl, 2 * dr);
  for (int s = 0; s < 2; ++s) theta.block(0, s * dr, dl, dr) = m.a[c][s];
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(theta.transpose());
  const int r = std::min(dl, 2 * dr);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(2 * dr, r);
  Eigen::MatrixXd rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (int s = 0; s < 2; ++s) {
    m.a[c][s] = q.transpose().block(0, s * dr, r, dr);
    m.a[c - 1][s] = m.a[c - 1][s] * rr.transpose();
  }
  invalidate(m, c);
  --m.center;
}

MPSState empty_state(const LatticeLayout& layout) {
  MPSState m{layout, {}, {}, 0, 0.0, 0.0, {}};
  m.a.resize(layout.sites());
  m.schmidt.assign(layout.sites() + 1, Eigen::VectorXd::Ones(1));
  return m;
}

}  // namespace

MPSState product_mps(const LatticeLayout& layout,
                     const std::vector<Eigen::Vector2d>& site_vectors) {
  if (static_cast<int>(site_vectors.size()) != layout.sites())
    throw std::invalid_argument("product_mps: one 2-vector per site expected");
  MPSState m = empty_state(layout);
  for (int i = 0; i < layout.sites(); ++i) {
    const double nrm = site_vectors[i].norm();
    if (nrm == 0.0) throw std::invalid_argument("product_mps: zero site vector");
    for (int s = 0; s < 2; ++s)
      m.a[i][s] = Eigen::MatrixXd::Constant(1, 1, site_vectors[i][s] / nrm);
  }
  return m;
}

MPSState random_product_mps(const LatticeLayout& layout, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Eigen::Vector2d> vecs(layout.sites());
  for (auto& v : vecs) {
    do {
      v = Eigen::Vector2d(g(rng), g(rng));
    } while (v.norm() < 1e-3);
  }
  return product_mps(layout, vecs);
}

MPSState random_mps(const LatticeLayout& layout, int chi, uint64_t seed) {
  if (chi < 1) throw std::invalid_argument("random_mps: chi must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MPSState m = empty_state(layout);
  const int n = layout.sites();
  for (int i = 0; i < n; ++i) {
    const int dl = i == 0 ? 1 : chi;
    const int dr = i == n - 1 ? 1 : chi;
    for (int s = 0; s < 2; ++s) {
      m.a[i][s].resize(dl, dr);
      for (int c = 0; c < dr; ++c)
        for (int r = 0; r < dl; ++r) m.a[i][s](r, c) = g(rng);
    }
  }
  for (int b = 1; b < n; ++b) invalidate(m, b);
  // two exact sweeps trim bonds to representable ranks and canonicalize
  move_center(m, n - 1);
  move_center(m, 0);
  renormalize(m);
  m.norm_log = 0.0;
  return m;
}

MPSState relative_state_mps(const LatticeLayout& doubled) {
  if (doubled.layers() != 2)
    throw std::invalid_argument("relative_state_mps: doubled layout expected");
  MPSState m = empty_state(doubled);
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  for (int r = 0; r < doubled.rungs(); ++r) {
    const int lo = 2 * r, hi = 2 * r + 1;
    for (int s = 0; s < 2; ++s) {
      m.a[lo][s] = Eigen::MatrixXd::Zero(1, 2);
      m.a[lo][s](0, s) = inv_rt2;
      m.a[hi][s] = Eigen::MatrixXd::Zero(2, 1);
      m.a[hi][s](s, 0) = 1.0;
    }
    m.schmidt[hi] = unit_schmidt(2);
    m.norm_log += 0.5 * std::log(2.0);
  }
  m.center = 0;
  return m;
}

void move_center(MPSState& m, int site) {
  if (site < 0 || site >= m.n_sites())
    throw std::invalid_argument("move_center: site out of range");
  while (m.center < site) qr_step_right(m);
  while (m.center > site) lq_step_left(m);
}

SplitResult svd_split(const Eigen::MatrixXd& theta, const TruncationPolicy* pol) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(theta,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  SplitResult out;
  out.theta_norm = sv.norm();
  if (out.theta_norm == 0.0)
    throw std::runtime_error("svd_split: zero matrix (state annihilated)");
  const double smax = sv(0);
  const double floor = (pol ? pol->sv_floor : 1e-14) * smax;
  int k = 0;
  while (k < sv.size() && sv(k) > floor) ++k;
  k = std::max(k, 1);
  if (pol) k = std::min(k, pol->max_bond);
  const double total = sv.squaredNorm();
  const double kept = sv.head(k).squaredNorm();
  out.discarded = std::max(0.0, 1.0 - kept / total);
  out.u = svd.matrixU().leftCols(k);
  out.s = sv.head(k) / std::sqrt(kept);
  out.vt = svd.matrixV().leftCols(k).transpose();
  return out;
}

double svd_shift_left(MPSState& m, const TruncationPolicy* pol) {
  const int c = m.center;
  const int dl = m.bond_dim(c), dr = m.bond_dim(c + 1);
  Eigen::MatrixXd theta(dl, 2 * dr);
  for (int s = 0; s < 2; ++s) theta.block(0, s * dr, dl, dr) = m.a[c][s];
  SplitResult sp = svd_split(theta, pol);
  const int k = static_cast<int>(sp.s.size());
  const double kept_scale = sp.theta_norm * std::sqrt(1.0 - sp.discarded);
  for (int s = 0; s < 2; ++s) m.a[c][s] = sp.vt.block(0, s * dr, k, dr);
  const Eigen::MatrixXd carry =
      sp.u * (sp.s * kept_scale).asDiagonal();
  for (int s = 0; s < 2; ++s) m.a[c - 1][s] = m.a[c - 1][s] * carry;
  m.schmidt[c] = sp.s;
  m.trunc_error += sp.discarded;
  --m.center;
  return sp.discarded;
}

double svd_shift_right(MPSState& m, const TruncationPolicy* pol) {
  const int c = m.center;
  const int dl = m.bond_dim(c), dr = m.bond_dim(c + 1);
  Eigen::MatrixXd theta(2 * dl, dr);
  for (int s = 0; s < 2; ++s) theta.block(s * dl, 0, dl, dr) = m.a[c][s];
  SplitResult sp = svd_split(theta, pol);
  const int k = static_cast<int>(sp.s.size());
  const double kept_scale = sp.theta_norm * std::sqrt(1.0 - sp.discarded);
  for (int s = 0; s < 2; ++s) m.a[c][s] = sp.u.block(s * dl, 0, dl, k);
  const Eigen::MatrixXd carry =
      (sp.s * kept_scale).asDiagonal() * sp.vt;
  for (int s = 0; s < 2; ++s) m.a[c + 1][s] = carry * m.a[c + 1][s];
  m.schmidt[c + 1] = sp.s;
  m.trunc_error += sp.discarded;
  ++m.center;
  return sp.discarded;
}

double renormalize(MPSState& m) {
  double sq = 0.0;
  for (int sp = 0; sp < 2; ++sp) sq += m.a[m.center][sp].squaredNorm();
  const double nrm = std::sqrt(sq);
  if (nrm == 0.0) throw std::runtime_error("renormalize: state annihilated");
  for (int sp = 0; sp < 2; ++sp) m.a[m.center][sp] /= nrm;
  m.norm_log += std::log(nrm);
  return std::log(nrm);
}

const Eigen::VectorXd& schmidt_spectrum(MPSState& m, int bond) {
  if (bond < 1 || bond >= m.n_sites())
    throw std::invalid_argument("schmidt_spectrum: internal bond expected");
  if (m.center >= bond) {
    move_center(m, bond);
    svd_shift_left(m, nullptr);
  } else {
    move_center(m, bond - 1);
    svd_shift_right(m, nullptr);
  }
  return m.schmidt[bond];
}

double entanglement_entropy(MPSState& m, int bond) {
  const Eigen::VectorXd& s = schmidt_spectrum(m, bond);
  double ee = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    const double w = s(i) * s(i);
    if (w > kWeightFloor) ee -= w * std::log(w);
  }
  return ee;
}

std::vector<double> entanglement_spectrum(MPSState& m, int bond, int levels) {
  const Eigen::VectorXd& s = schmidt_spectrum(m, bond);
  std::vector<double> out;
  for (int i = 0; i < s.size() && static_cast<int>(out.size()) < levels; ++i) {
    const double w = s(i) * s(i);
    if (w > kWeightFloor) out.push_back(-std::log(w));
  }
  return out;  // schmidt sorted descending => -ln ascending
}

namespace {

Complex transfer_contract(const MPSState& bra, const MPSState& ket,
                          const PauliString* p) {
  if (bra.n_sites() != ket.n_sites())
    throw std::invalid_argument("transfer_contract: size mismatch");
  const int n = bra.n_sites();
  Complex phase = 1.0;
  std::vector<const Eigen::Matrix2d*> site_ops(n, nullptr);
  Eigen::Matrix2d ops[3];
  if (p) {
    if (!p->factors().empty() && p->max_site() >= n)
      throw std::invalid_argument("transfer_contract: operator outside chain");
    ops[0] = PauliString::real_site_matrix(PauliOp::X);
    ops[1] = PauliString::real_site_matrix(PauliOp::Y);
    ops[2] = PauliString::real_site_matrix(PauliOp::Z);
    for (const auto& [site, op] : p->factors())
      site_ops[site] = &ops[static_cast<int>(op)];
    phase = p->external_phase();
  }
  Eigen::MatrixXd e = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd t0 = e * ket.a[i][0];
    const Eigen::MatrixXd t1 = e * ket.a[i][1];
    const int rb = static_cast<int>(bra.a[i][0].cols());
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(rb, t0.cols());
    if (!site_ops[i]) {
      next.noalias() = bra.a[i][0].transpose() * t0;
      next.noalias() += bra.a[i][1].transpose() * t1;
    } else {
      const Eigen::Matrix2d& mop = *site_ops[i];
      for (int sp = 0; sp < 2; ++sp) {
        if (mop(sp, 0) != 0.0)
          next.noalias() += mop(sp, 0) * (bra.a[i][sp].transpose() * t0);
        if (mop(sp, 1) != 0.0)
          next.noalias() += mop(sp, 1) * (bra.a[i][sp].transpose() * t1);
      }
    }
    e = std::move(next);
  }
  if (e.rows() != 1 || e.cols() != 1)
    throw std::logic_error("transfer_contract: open boundary bond != 1");
  return phase * e(0, 0);
}

}  // namespace

Complex expectation_pauli(const MPSState& m, const PauliString& p) {
  return transfer_contract(m, m, &p);
}

Complex cross_expectation(const MPSState& bra, const PauliString& p,
                          const MPSState& ket) {
  return transfer_contract(bra, ket, &p);
}

Complex overlap(const MPSState& bra, const MPSState& ket) {
  return transfer_contract(bra, ket, nullptr);
}

void apply_pauli_product(MPSState& m, const PauliString& p) {
  const Complex phase = p.external_phase();
  if (std::abs(phase.imag()) > 1e-12 * std::abs(phase))
    throw std::invalid_argument("apply_pauli_product: non-real phase");
  if (phase.real() == 0.0)
    throw std::invalid_argument("apply_pauli_product: zero coefficient");
  if (!p.factors().empty() && p.max_site() >= m.n_sites())
    throw std::invalid_argument("apply_pauli_product: operator outside chain");
  for (const auto& [site, op] : p.factors()) {
    const Eigen::Matrix2d mop = PauliString::real_site_matrix(op);
    std::array<Eigen::MatrixXd, 2> fresh;
    for (int sp = 0; sp < 2; ++sp) {
      fresh[sp] = mop(sp, 0) * m.a[site][0];
      fresh[sp] += mop(sp, 1) * m.a[site][1];
    }
    m.a[site] = std::move(fresh);
  }
  const double mag = std::abs(phase.real());
  if (phase.real() < 0.0)
    for (int sp = 0; sp < 2; ++sp) m.a[m.center][sp] *= -1.0;
  m.norm_log += std::log(mag);
}

Eigen::VectorXcd to_statevector(const MPSState& m) {
  const int n = m.n_sites();
  if (n > 20) throw std::invalid_argument("to_statevector: > 20 sites");
  Eigen::MatrixXd v = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 0; i < n; ++i) {
    const uint64_t rows = uint64_t(1) << i;
    Eigen::MatrixXd next(2 * rows, m.a[i][0].cols());
    next.topRows(rows) = v * m.a[i][0];
    next.bottomRows(rows) = v * m.a[i][1];
    v = std::move(next);
  }
  return v.col(0).cast<Complex>();
}

namespace {

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

constexpr char kMagic[8] = {'D', 'C', 'M', 'P', 'S', '1', 0, 0};

}  // namespace

void save_mps(const MPSState& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_mps: cannot open " + path);
  out.write(kMagic, sizeof(kMagic));
  put<int32_t>(out, m.layout.cells());
  put<int32_t>(out, m.layout.layers());
  put<int32_t>(out, m.layout.boundary() == Boundary::periodic ? 0 : 1);
  put<int32_t>(out, m.n_sites());
  put<int32_t>(out, m.center);
  put<double>(out, m.norm_log);
  put<double>(out, m.trunc_error);
  for (const auto& s : m.schmidt) {
    put<int32_t>(out, static_cast<int32_t>(s.size()));
    out.write(reinterpret_cast<const char*>(s.data()),
              static_cast<std::streamsize>(s.size() * sizeof(double)));
  }
  for (const auto& site : m.a) {
    put<int32_t>(out, static_cast<int32_t>(site[0].rows()));
    put<int32_t>(out, static_cast<int32_t>(site[0].cols()));
    for (int sp = 0; sp < 2; ++sp)
      out.write(reinterpret_cast<const char*>(site[sp].data()),
                static_cast<std::streamsize>(site[sp].size() * sizeof(double)));
  }
  put<int32_t>(out, static_cast<int32_t>(m.warnings.size()));
  for (const auto& w : m.warnings) {
    put<int32_t>(out, static_cast<int32_t>(w.size()));
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
  }
  if (!out) throw std::runtime_error("save_mps: write failed " + path);
}

MPSState load_mps(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_mps: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("load_mps: bad magic in " + path);
  const int cells = get<int32_t>(in);
  const int layers = get<int32_t>(in);
  const int bc = get<int32_t>(in);
  const LatticeLayout layout(cells, layers,
                             bc == 0 ? Boundary::periodic : Boundary::open);
  const int n = get<int32_t>(in);
  if (n != layout.sites()) throw std::runtime_error("load_mps: site count mismatch");
  MPSState m = empty_state(layout);
  m.center = get<int32_t>(in);
  m.norm_log = get<double>(in);
  m.trunc_error = get<double>(in);
  for (auto& s : m.schmidt) {
    const int len = get<int32_t>(in);
    s.resize(len);
    in.read(reinterpret_cast<char*>(s.data()),
            static_cast<std::streamsize>(size_t(len) * sizeof(double)));
  }
  for (auto& site : m.a) {
    const int dl = get<int32_t>(in);
    const int dr = get<int32_t>(in);
    for (int sp = 0; sp < 2; ++sp) {
      site[sp].resize(dl, dr);
      in.read(reinterpret_cast<char*>(site[sp].data()),
              static_cast<std::streamsize>(size_t(dl) * dr * sizeof(double)));
    }
  }
  const int nwarn = get<int32_t>(in);
  for (int i = 0; i < nwarn; ++i) {
    const int len = get<int32_t>(in);
    std::string w(size_t(len), '\0');
    in.read(w.data(), len);
    m.warnings.push_back(std::move(w));
  }
  if (!in) throw std::runtime_error("load_mps: truncated file " + path);
  return m;
}

}  // namespace decochain
