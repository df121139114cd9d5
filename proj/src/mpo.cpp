#include "decochain/mpo.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace decochain {

namespace {

double real_coefficient(const PauliString& p, const char* who) {
  const Complex phase = p.external_phase();
  if (std::abs(phase.imag()) > 1e-12 * std::max(1.0, std::abs(phase)))
    throw std::invalid_argument(std::string(who) + ": non-real operator");
  return phase.real();
}

Eigen::Matrix2d site_matrix_or_identity(const PauliString& p, int site) {
  auto it = p.factors().find(site);
  if (it == p.factors().end()) return Eigen::Matrix2d::Identity();
  return PauliString::real_site_matrix(it->second);
}

}  // namespace

MPO build_mpo(const HamiltonianTerms& h) {
  const int n = h.layout.sites();
  MPO out;
  out.sites.resize(n);

  // slot layout per bond: boundary bonds hold a single slot (ready at 0,
  // done at n); interior bonds use 0 = done, 1 = ready, 2+ = in flight
  std::vector<int> width(n + 1, 2);
  width[0] = width[n] = 1;
  const auto ready = [&](int b) { return b == 0 ? 0 : 1; };
  const int done = 0;

  struct Placed {
    const PauliString* term;
    int first, last;
    std::vector<int> slots;  // in-flight slot at bonds first+1..last
  };
  std::vector<Placed> placed;
  for (const auto& t : h.terms) {
    if (t.factors().empty())
      throw std::invalid_argument("build_mpo: constant term unsupported");
    Placed p{&t, t.min_site(), t.max_site(), {}};
    if (p.last >= n) throw std::invalid_argument("build_mpo: term outside chain");
    for (int b = p.first + 1; b <= p.last; ++b) p.slots.push_back(width[b]++);
    placed.push_back(std::move(p));
  }

  for (int i = 0; i < n; ++i) {
    out.sites[i].w_in = width[i];
    out.sites[i].w_out = width[i + 1];
    auto& e = out.sites[i].entries;
    if (i <= n - 2)
      e.push_back({ready(i), ready(i + 1), Eigen::Matrix2d::Identity()});
    if (i >= 1) e.push_back({done, done, Eigen::Matrix2d::Identity()});
  }

  for (const auto& p : placed) {
    const double coeff = real_coefficient(*p.term, "build_mpo");
    for (int i = p.first; i <= p.last; ++i) {
      Eigen::Matrix2d m = site_matrix_or_identity(*p.term, i);
      if (i == p.first) m *= coeff;
      const int in = (i == p.first) ? ready(i) : p.slots[i - p.first - 1];
      const int to = (i == p.last) ? done : p.slots[i - p.first];
      out.sites[i].entries.push_back({in, to, m});
    }
  }
  return out;
}

WindowMpo window_mpo(const PauliString& h, double w0, double w1, int n_sites) {
  if (h.factors().empty())
    throw std::invalid_argument("window_mpo: operator without support");
  WindowMpo w;
  w.lo = h.min_site();
  w.hi = h.max_site();
  if (w.hi >= n_sites)
    throw std::invalid_argument("window_mpo: support outside chain");
  const double coeff = real_coefficient(h, "window_mpo");
  const int len = w.hi - w.lo + 1;
  w.mpo.sites.resize(len);

  if (len == 1) {
    auto& s = w.mpo.sites[0];
    s.w_in = s.w_out = 1;
    Eigen::Matrix2d m = w0 * Eigen::Matrix2d::Identity() +
                        w1 * coeff * site_matrix_or_identity(h, w.lo);
    s.entries.push_back({0, 0, m});
    return w;
  }

  for (int j = 0; j < len; ++j) {
    auto& s = w.mpo.sites[j];
    s.w_in = (j == 0) ? 1 : 2;
    s.w_out = (j == len - 1) ? 1 : 2;
    const Eigen::Matrix2d m = site_matrix_or_identity(h, w.lo + j);
    if (j == 0) {
      s.entries.push_back({0, 0, w0 * Eigen::Matrix2d::Identity()});
      s.entries.push_back({0, 1, w1 * coeff * m});
    } else if (j == len - 1) {
      s.entries.push_back({0, 0, Eigen::Matrix2d::Identity()});
      s.entries.push_back({1, 0, m});
    } else {
      s.entries.push_back({0, 0, Eigen::Matrix2d::Identity()});
      s.entries.push_back({1, 1, m});
    }
  }
  return w;
}

double mpo_expectation(const MPSState& m, const MPO& op) {
  if (op.n_sites() != m.n_sites())
    throw std::invalid_argument("mpo_expectation: size mismatch");
  std::vector<Eigen::MatrixXd> env(1, Eigen::MatrixXd::Ones(1, 1));
  for (int i = 0; i < m.n_sites(); ++i) {
    const auto& ws = op.sites[i];
    const int dr = m.bond_dim(i + 1);
    std::vector<Eigen::MatrixXd> next(ws.w_out, Eigen::MatrixXd::Zero(dr, dr));
    for (const auto& en : ws.entries) {
      for (int sp = 0; sp < 2; ++sp) {
        for (int s = 0; s < 2; ++s) {
          if (en.op(sp, s) == 0.0) continue;
          next[en.out].noalias() +=
              en.op(sp, s) * (m.a[i][sp].transpose() * env[en.in] * m.a[i][s]);
        }
      }
    }
    env = std::move(next);
  }
  return env[0](0, 0);
}

double apply_window_mpo(MPSState& m, const WindowMpo& w, const TruncationPolicy& pol) {
  if (w.hi >= m.n_sites())
    throw std::invalid_argument("apply_window_mpo: window outside chain");
  move_center(m, w.lo);

  for (int j = 0; j <= w.hi - w.lo; ++j) {
    const int site = w.lo + j;
    const auto& ws = w.mpo.sites[j];
    const int dl = m.bond_dim(site), dr = m.bond_dim(site + 1);
    const int rows = dl * ws.w_in, cols = dr * ws.w_out;
    std::array<Eigen::MatrixXd, 2> fresh;
    for (int sp = 0; sp < 2; ++sp) fresh[sp] = Eigen::MatrixXd::Zero(rows, cols);
    using StridedMap =
        Eigen::Map<Eigen::MatrixXd, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
    for (const auto& en : ws.entries) {
      for (int sp = 0; sp < 2; ++sp) {
        for (int s = 0; s < 2; ++s) {
          if (en.op(sp, s) == 0.0) continue;
          StridedMap block(fresh[sp].data() + en.in + ptrdiff_t(en.out) * rows,
                           dl, dr,
                           Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(
                               ptrdiff_t(ws.w_out) * rows, ws.w_in));
          block += en.op(sp, s) * m.a[site][s];
        }
      }
    }
    // defer the write: entries read a[site] across iterations
    m.a[site] = std::move(fresh);
  }

  // a non-unitary gate shifts Schmidt spectra at every cut, not only inside
  // the window
  for (int b = 1; b < m.n_sites(); ++b) m.schmidt[b].resize(0);
  m.center = w.lo;
  move_center(m, w.hi);  // left-canonicalize the window at doubled bonds
  double discarded = 0.0;
  while (m.center > w.lo) discarded += svd_shift_left(m, &pol);
  renormalize(m);
  if (discarded > pol.gate_error_budget) {
    std::ostringstream msg;
    msg << "gate window [" << w.lo << "," << w.hi << "]: discarded " << discarded
        << " > budget " << pol.gate_error_budget;
    m.warnings.push_back(msg.str());
  }
  return discarded;
}

}  // namespace decochain
