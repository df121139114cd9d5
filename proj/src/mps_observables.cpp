#include "decochain/mps_observables.hpp"

#include <cmath>
#include <stdexcept>

namespace decochain {

namespace {

Complex guarded_overlap(const MPSState& rel, const MPSState& m) {
  const Complex rel_dot = overlap(rel, m);
  if (std::abs(rel_dot) < 1e-300)
    throw std::runtime_error("mps_observables: <<1|rho>> vanished");
  return rel_dot;
}

}  // namespace

double renyi2_correlator(const MPSState& m, int i, int j) {
  return expectation_pauli(m, sigma_zz_pair(m.layout, i, j, true)).real();
}

double linear_correlator(const MPSState& m, const MPSState& rel, int i, int j) {
  const Complex rel_dot = guarded_overlap(rel, m);
  return std::real(
      cross_expectation(rel, sigma_zz_pair(m.layout, i, j, false), m) /
      rel_dot);
}

double string_renyi2(const MPSState& m, int k) {
  return expectation_pauli(m, tau_string(m.layout, k, true)).real();
}

double string_linear(const MPSState& m, const MPSState& rel, int k) {
  const Complex rel_dot = guarded_overlap(rel, m);
  return std::real(cross_expectation(rel, tau_string(m.layout, k, false), m) /
                   rel_dot);
}

ObservableRecord mps_observables(MPSState& m, const ObservableRequest& req) {
  const LatticeLayout& lat = m.layout;
  if (lat.layers() != 2)
    throw std::invalid_argument("mps_observables: doubled layout expected");
  const int L = lat.cells();

  MPSState rel = relative_state_mps(lat);
  const Complex rel_dot = guarded_overlap(rel, m);

  ObservableRecord rec;
  rec.solver = "mps";
  rec.bond_dim = m.max_bond_dim();
  rec.trunc_error = m.trunc_error;
  rec.purity_log = 2.0 * m.norm_log;
  rec.trace_ratio = std::real(rel_dot) * std::exp(rel.norm_log + m.norm_log);
  rec.chi_truncated = (L % 2 != 0);

  if (req.chi) {
    double chi2 = 0.0, chi1 = 0.0;
    for (int r = 1; r <= L / 2; ++r) {
      chi2 += expectation_pauli(m, sigma_zz_pair(lat, 0, r, true)).real();
      chi1 += std::real(
          cross_expectation(rel, sigma_zz_pair(lat, 0, r, false), m) / rel_dot);
    }
    rec.chi_renyi2 = 2.0 * chi2 / L;
    rec.chi_linear = 2.0 * chi1 / L;
  }

  for (int k : req.string_ks) {
    if (k < 1 || k > L)
      throw std::invalid_argument("mps_observables: string k out of range");
    rec.string_renyi2[k] = expectation_pauli(m, tau_string(lat, k, true)).real();
    rec.string_linear[k] = std::real(
        cross_expectation(rel, tau_string(lat, k, false), m) / rel_dot);
  }

  for (int x : req.ee_prefix_rungs) {
    if (x < 1 || x >= lat.rungs())
      throw std::invalid_argument("mps_observables: prefix cut out of range");
    rec.ee_rungs[x] = entanglement_entropy(m, 2 * x);
    rec.es_rungs[x] = entanglement_spectrum(m, 2 * x, req.es_levels);
  }
  return rec;
}

}  // namespace decochain
