#include "decochain/dmrg.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace decochain {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// env'[w'] = sum over entries (w,w',M) of M(s',s) a[s']^T env[w] a[s]
std::vector<MatrixXd> env_left_next(const std::vector<MatrixXd>& env,
                                    const MpoSite& ws,
                                    const std::array<MatrixXd, 2>& a) {
  const int dr = static_cast<int>(a[0].cols());
  std::vector<MatrixXd> out(ws.w_out, MatrixXd::Zero(dr, dr));
  for (const auto& en : ws.entries) {
    MatrixXd ea[2];
    for (int s = 0; s < 2; ++s) ea[s] = env[en.in] * a[s];
    for (int sp = 0; sp < 2; ++sp)
      for (int s = 0; s < 2; ++s)
        if (en.op(sp, s) != 0.0)
          out[en.out].noalias() += en.op(sp, s) * (a[sp].transpose() * ea[s]);
  }
  return out;
}

// env'[w] = sum over entries (w,w',M) of M(s',s) a[s'] env[w'] a[s]^T
std::vector<MatrixXd> env_right_next(const std::vector<MatrixXd>& env,
                                     const MpoSite& ws,
                                     const std::array<MatrixXd, 2>& a) {
  const int dl = static_cast<int>(a[0].rows());
  std::vector<MatrixXd> out(ws.w_in, MatrixXd::Zero(dl, dl));
  for (const auto& en : ws.entries) {
    MatrixXd ae[2];
    for (int s = 0; s < 2; ++s) ae[s] = env[en.out] * a[s].transpose();
    for (int sp = 0; sp < 2; ++sp)
      for (int s = 0; s < 2; ++s)
        if (en.op(sp, s) != 0.0)
          out[en.in].noalias() += en.op(sp, s) * (a[sp] * ae[s]);
  }
  return out;
}

// effective two-site Hamiltonian: EL . W[i] . W[i+1] . ER contracted with a
// (2 dl x 2 dr) theta whose row is al + dl*s1 and column ar + dr*s2
struct TwoSiteOp {
  const MpoSite& w1;
  const MpoSite& w2;
  const std::vector<MatrixXd>& el;
  const std::vector<MatrixXd>& er;
  int dl, dr;

  Eigen::Block<const MatrixXd> block(const MatrixXd& t, int s1, int s2) const {
    return t.block(s1 * dl, s2 * dr, dl, dr);
  }

  void apply(const MatrixXd& in, MatrixXd& out) const {
    out.setZero(2 * dl, 2 * dr);
    // stage 1: EB[w][s1][s2] = el[w] * in(s1,s2), computed on demand
    std::vector<std::array<std::array<MatrixXd, 2>, 2>> eb(el.size());
    std::vector<bool> have(el.size(), false);
    auto eb_of = [&](int w) -> const std::array<std::array<MatrixXd, 2>, 2>& {
      if (!have[w]) {
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s2 = 0; s2 < 2; ++s2)
            eb[w][s1][s2].noalias() = el[w] * block(in, s1, s2);
        have[w] = true;
      }
      return eb[w];
    };
    // stage 2: P[w2][s1'][s2] accumulates W[i] action
    std::vector<std::array<std::array<MatrixXd, 2>, 2>> p(w1.w_out);
    std::vector<bool> havep(w1.w_out, false);
    for (const auto& en : w1.entries) {
      const auto& e = eb_of(en.in);
      if (!havep[en.out]) {
        for (auto& row : p[en.out])
          for (auto& mm : row) mm = MatrixXd::Zero(dl, dr);
        havep[en.out] = true;
      }
      for (int sp = 0; sp < 2; ++sp)
        for (int s = 0; s < 2; ++s)
          if (en.op(sp, s) != 0.0)
            for (int s2 = 0; s2 < 2; ++s2)
              p[en.out][sp][s2].noalias() += en.op(sp, s) * e[s][s2];
    }
    // stage 3: W[i+1] action then the right environment
    for (const auto& en : w2.entries) {
      if (!havep[en.in]) continue;
      for (int sp = 0; sp < 2; ++sp)
        for (int s = 0; s < 2; ++s) {
          if (en.op(sp, s) == 0.0) continue;
          for (int s1 = 0; s1 < 2; ++s1)
            out.block(s1 * dl, sp * dr, dl, dr).noalias() +=
                en.op(sp, s) * (p[en.in][s1][s] * er[en.out].transpose());
        }
    }
  }
};

double vdot(const MatrixXd& a, const MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

// warm-started Lanczos with a stored fully reorthogonalized basis
double solve_two_site(const TwoSiteOp& op, MatrixXd& theta, int max_iters,
                      double tol) {
  const int n = static_cast<int>(theta.size());
  const int m = std::min(max_iters, n);
  theta /= theta.norm();
  std::vector<MatrixXd> basis{theta};
  VectorXd alpha(m), beta(m);
  MatrixXd hq;
  double value = 0.0;
  for (int k = 0; k < m; ++k) {
    op.apply(basis[k], hq);
    alpha[k] = vdot(basis[k], hq);
    hq -= alpha[k] * basis[k];
    if (k > 0) hq -= beta[k - 1] * basis[k - 1];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) hq -= vdot(b, hq) * b;
    beta[k] = hq.norm();
    const int steps = k + 1;
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(steps, steps);
    for (int i = 0; i < steps; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < steps) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    value = es.eigenvalues()(0);
    const double res_est = beta[k] * std::abs(es.eigenvectors()(k, 0));
    if (res_est < tol * std::max(1.0, std::abs(value)) || beta[k] < 1e-14 ||
        steps == m) {
      theta.setZero();
      for (int i = 0; i < steps; ++i)
        theta += es.eigenvectors()(i, 0) * basis[i];
      theta /= theta.norm();
      return value;
    }
    basis.push_back(hq / beta[k]);
  }
  return value;
}

MatrixXd merge_two_site(const MPSState& st, int i) {
  const int dl = st.bond_dim(i), dm = st.bond_dim(i + 1), dr = st.bond_dim(i + 2);
  MatrixXd theta(2 * dl, 2 * dr);
  (void)dm;
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      theta.block(s1 * dl, s2 * dr, dl, dr).noalias() =
          st.a[i][s1] * st.a[i + 1][s2];
  return theta;
}

}  // namespace

DmrgResult dmrg_ground_state(const HamiltonianTerms& h,
                             const TruncationPolicy& pol,
                             const DmrgOptions& opt) {
  const int n = h.layout.sites();
  if (n < 2) throw std::invalid_argument("dmrg_ground_state: need >= 2 sites");
  MPO mpo = build_mpo(h);

  DmrgResult res{random_mps(h.layout, opt.init_bond, opt.seed), 0.0, {}, false};
  MPSState& st = res.state;

  std::vector<std::vector<MatrixXd>> el(n + 1), er(n + 1);
  el[0] = {MatrixXd::Ones(1, 1)};
  er[n] = {MatrixXd::Ones(1, 1)};
  for (int i = n - 1; i >= 1; --i)
    er[i] = env_right_next(er[i + 1], mpo.sites[i], st.a[i]);

  double e_prev = std::numeric_limits<double>::infinity();
  double e_last = 0.0;
  double last_delta = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    for (int i = 0; i + 1 < n; ++i) {  // right pass
      MatrixXd theta = merge_two_site(st, i);
      const TwoSiteOp op{mpo.sites[i], mpo.sites[i + 1], el[i], er[i + 2],
                         st.bond_dim(i), st.bond_dim(i + 2)};
      e_last = solve_two_site(op, theta, opt.local_iters, opt.local_tol);
      SplitResult sp = svd_split(theta, &pol);
      const int k = static_cast<int>(sp.s.size());
      const int dl = st.bond_dim(i), dr = st.bond_dim(i + 2);
      for (int s = 0; s < 2; ++s) {
        st.a[i][s] = sp.u.block(s * dl, 0, dl, k);
        st.a[i + 1][s] = sp.s.asDiagonal() * sp.vt.block(0, s * dr, k, dr);
      }
      st.schmidt[i + 1] = sp.s;
      st.trunc_error += sp.discarded;
      st.center = i + 1;
      el[i + 1] = env_left_next(el[i], mpo.sites[i], st.a[i]);
    }
    for (int i = n - 2; i >= 0; --i) {  // left pass
      MatrixXd theta = merge_two_site(st, i);
      const TwoSiteOp op{mpo.sites[i], mpo.sites[i + 1], el[i], er[i + 2],
                         st.bond_dim(i), st.bond_dim(i + 2)};
      e_last = solve_two_site(op, theta, opt.local_iters, opt.local_tol);
      SplitResult sp = svd_split(theta, &pol);
      const int k = static_cast<int>(sp.s.size());
      const int dl = st.bond_dim(i), dr = st.bond_dim(i + 2);
      for (int s = 0; s < 2; ++s) {
        st.a[i][s] = sp.u.block(s * dl, 0, dl, k) * sp.s.asDiagonal();
        st.a[i + 1][s] = sp.vt.block(0, s * dr, k, dr);
      }
      st.schmidt[i + 1] = sp.s;
      st.trunc_error += sp.discarded;
      st.center = i;
      er[i + 1] = env_right_next(er[i + 2], mpo.sites[i + 1], st.a[i + 1]);
    }
    res.sweep_energies.push_back(e_last);
    last_delta = std::abs(e_last - e_prev);
    if (sweep >= 1 && last_delta < opt.tol) {
      res.converged = true;
      break;
    }
    e_prev = e_last;
  }
  if (!res.converged) {
    std::ostringstream msg;
    msg << "dmrg: |dE| still " << last_delta << " after "
        << res.sweep_energies.size() << " sweeps";
    st.warnings.push_back(msg.str());
  }
  // caches written mid-sweep describe superseded intermediate states
  for (int b = 1; b < n; ++b) st.schmidt[b].resize(0);
  res.energy = mpo_expectation(st, mpo);
  return res;
}

double apply_filter_gate(MPSState& m, const FilterGate& g,
                         const TruncationPolicy& pol) {
  if (g.w_h() == 0.0) return 0.0;  // p = 0: exact identity
  const WindowMpo w = window_mpo(g.h, g.w_identity(), g.w_h(), m.n_sites());
  return apply_window_mpo(m, w, pol);
}

void filter_mps(MPSState& m, const std::vector<FilterGate>& gates,
                const TruncationPolicy& pol) {
  for (const auto& g : gates) apply_filter_gate(m, g, pol);
}

DmrgResult ground_state_mps(int cells, double j_zz, const TruncationPolicy& pol,
                            const DmrgOptions& opt) {
  DmrgResult r = dmrg_ground_state(build_doubled_hamiltonian(cells, j_zz), pol, opt);
  MPSState& m = r.state;
  const Complex one_dot = overlap(relative_state_mps(m.layout), m);
  if (std::abs(one_dot) < 1e-12)
    throw std::runtime_error("ground_state_mps: <<1|rho_0>> vanished");
  if (one_dot.real() < 0.0)
    for (int s = 0; s < 2; ++s) m.a[m.center][s] *= -1.0;
  return r;
}

void apply_decoherence(MPSState& m, double j_zz, double p_zz, bool paired,
                       const TruncationPolicy& pol) {
  filter_mps(m, build_filter_gates({ChannelKind::zz_sigma, p_zz, 0, -1}, m.layout),
             pol);
  if (paired) {
    const double p_x = px_of_pzz(p_zz, j_zz);
    filter_mps(m, build_filter_gates({ChannelKind::tzxtz, p_x, 0, -1}, m.layout),
               pol);
  }
}

MPSState decohere_ground_mps(int cells, double j_zz, double p_zz, bool paired,
                             const TruncationPolicy& pol,
                             const DmrgOptions& opt) {
  MPSState m = std::move(ground_state_mps(cells, j_zz, pol, opt).state);
  apply_decoherence(m, j_zz, p_zz, paired, pol);
  return m;
}

}  // namespace decochain
