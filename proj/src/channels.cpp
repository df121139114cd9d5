#include "decochain/channels.hpp"

#include <cmath>
#include <stdexcept>

#include "decochain/models.hpp"

namespace decochain {

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 0.5))
    throw std::invalid_argument("channel probability must lie in [0, 1/2]");
}

// spread the low bits of x to even positions (u layer at 2s, l layer at 2s+1)
uint64_t interleave_even(uint64_t x) {
  uint64_t out = 0;
  for (int s = 0; x >> s; ++s) out |= ((x >> s) & 1u) << (2 * s);
  return out;
}

}  // namespace

TauWeight tau_weight(double p) {
  check_probability(p);
  if (p == 0.5) return {0.0, true};
  return {std::atanh(p / (1.0 - p)), false};
}

double px_of_pzz(double p_zz, double j_zz) {
  check_probability(p_zz);
  if (j_zz <= 0.0) throw std::invalid_argument("px_of_pzz: J_zz must be positive");
  return 0.5 - 0.5 * std::pow(1.0 - 2.0 * p_zz, 1.0 / j_zz);
}

double norm_constant(double p_zz, double p_x, int cells) {
  return std::pow(1.0 - 2.0 * p_zz, cells / 2.0) *
         std::pow(1.0 - 2.0 * p_x, cells / 2.0);
}

PauliString channel_h(ChannelKind kind, const LatticeLayout& lat, int cell,
                      Layer layer) {
  switch (kind) {
    case ChannelKind::zz_sigma:
      return PauliString::single(lat.sigma(cell, layer), PauliOp::Z) *
             PauliString::single(lat.sigma(cell + 1, layer), PauliOp::Z);
    case ChannelKind::x_sigma:
      return PauliString::single(lat.sigma(cell, layer), PauliOp::X);
    case ChannelKind::tzxtz:
      return PauliString::single(lat.tau(cell - 1, layer), PauliOp::Z) *
             PauliString::single(lat.sigma(cell, layer), PauliOp::X) *
             PauliString::single(lat.tau(cell, layer), PauliOp::Z);
  }
  throw std::logic_error("channel_h: unknown kind");
}

Eigen::MatrixXcd apply_channel_to_density_matrix(const Eigen::MatrixXcd& rho,
                                                 const ChannelSpec& spec,
                                                 const LatticeLayout& lat) {
  check_probability(spec.p);
  const int n = lat.sites();
  if (lat.layers() != 1)
    throw std::invalid_argument("apply_channel_to_density_matrix: single-layer layout expected");
  if (n > 12)
    throw std::invalid_argument("apply_channel_to_density_matrix: > 12 path sites");
  const uint64_t dim = uint64_t(1) << n;
  if (static_cast<uint64_t>(rho.rows()) != dim || static_cast<uint64_t>(rho.cols()) != dim)
    throw std::invalid_argument("apply_channel_to_density_matrix: dimension mismatch");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + rho.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("apply_channel_to_density_matrix: non-Hermitian input");

  const int count = spec.n_cells < 0 ? lat.cells() : spec.n_cells;
  Eigen::MatrixXcd out = rho;
  for (int k = 0; k < count; ++k) {
    const int cell = lat.wrap(spec.first_cell + k);
    Eigen::MatrixXcd hm = channel_h(spec.kind, lat, cell).to_dense(n);
    out = (1.0 - spec.p) * out + spec.p * (hm * out * hm);
  }
  return out;
}

Eigen::VectorXcd choi_vectorize(const Eigen::MatrixXcd& rho, int n_single_sites) {
  if (n_single_sites > 12)
    throw std::invalid_argument("choi_vectorize: > 12 single-layer path sites");
  const uint64_t dim = uint64_t(1) << n_single_sites;
  if (static_cast<uint64_t>(rho.rows()) != dim || static_cast<uint64_t>(rho.cols()) != dim)
    throw std::invalid_argument("choi_vectorize: dimension mismatch");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim * dim);
  for (uint64_t m = 0; m < dim; ++m) {
    const uint64_t mu = interleave_even(m);
    for (uint64_t n = 0; n < dim; ++n)
      v[mu | (interleave_even(n) << 1)] = rho(n, m);
  }
  return v;
}

Eigen::MatrixXcd choi_devectorize(const Eigen::VectorXcd& v, int n_single_sites) {
  if (n_single_sites > 12)
    throw std::invalid_argument("choi_devectorize: > 12 single-layer path sites");
  const uint64_t dim = uint64_t(1) << n_single_sites;
  if (static_cast<uint64_t>(v.size()) != dim * dim)
    throw std::invalid_argument("choi_devectorize: dimension mismatch");
  Eigen::MatrixXcd rho(dim, dim);
  for (uint64_t m = 0; m < dim; ++m) {
    const uint64_t mu = interleave_even(m);
    for (uint64_t n = 0; n < dim; ++n)
      rho(n, m) = v[mu | (interleave_even(n) << 1)];
  }
  return rho;
}

std::vector<FilterGate> build_filter_gates(const ChannelSpec& spec,
                                           const LatticeLayout& doubled) {
  check_probability(spec.p);
  if (doubled.layers() != 2)
    throw std::invalid_argument("build_filter_gates: doubled layout expected");
  const TauWeight tw = tau_weight(spec.p);
  const int count = spec.n_cells < 0 ? doubled.cells() : spec.n_cells;

  std::vector<FilterGate> gates;
  gates.reserve(count);
  for (int k = 0; k < count; ++k) {
    const int cell = doubled.wrap(spec.first_cell + k);
    FilterGate g;
    // K acts as conj(K) on the u copy, K on the l copy
    g.h = channel_h(spec.kind, doubled, cell, Layer::u).conjugated() *
          channel_h(spec.kind, doubled, cell, Layer::l);
    g.p = spec.p;
    g.tau = tw.tau;
    g.projective = tw.projective;
    gates.push_back(std::move(g));
  }
  return gates;
}

void apply_filter_gate_dense(const FilterGate& g, Eigen::VectorXcd& v, int n_sites) {
  Eigen::VectorXcd hv;
  g.h.apply(v, hv, n_sites);
  v = g.w_identity() * v + g.w_h() * hv;
}

}  // namespace decochain
