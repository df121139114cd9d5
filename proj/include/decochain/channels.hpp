#pragma once

#include <vector>

#include <Eigen/Dense>

#include "decochain/lattice.hpp"
#include "decochain/pauli.hpp"

namespace decochain {

enum class ChannelKind { zz_sigma, x_sigma, tzxtz };

// Pauli dephasing channel rho -> (1-p) rho + p h rho h applied per cell.
struct ChannelSpec {
  ChannelKind kind = ChannelKind::zz_sigma;
  double p = 0.0;    // in [0, 1/2]
  int first_cell = 0;
  int n_cells = -1;  // -1 = every cell of the layout
};

struct TauWeight {
  double tau = 0.0;
  bool projective = false;  // p = 1/2: filter degenerates to (I + h)/2
};

// tau = atanh(p / (1-p)); flags the projective limit instead of diverging
TauWeight tau_weight(double p);

// locking curve p_x = 1/2 - (1/2)(1 - 2 p_zz)^(1/J_zz)
double px_of_pzz(double p_zz, double j_zz);

// C(p_zz, p_x, L) = (1-2p_zz)^{L/2} (1-2p_x)^{L/2}; log bookkeeping only
double norm_constant(double p_zz, double p_x, int cells);

// the per-cell involution h of a channel on one layer (coefficient +1)
PauliString channel_h(ChannelKind kind, const LatticeLayout& lat, int cell,
                      Layer layer = Layer::u);

// Kraus application on a dense single-layer density matrix (oracle path).
// Guards: Hermitian input, <= 12 path sites.
Eigen::MatrixXcd apply_channel_to_density_matrix(const Eigen::MatrixXcd& rho,
                                                 const ChannelSpec& spec,
                                                 const LatticeLayout& lat);

// Choi map: |rho>> amplitude at the doubled index interleaving (m_u, n_l)
// equals rho(n, m), i.e. |rho>> = sum_{mn} rho_{nm} |m>_u |n>_l. A Kraus
// operator K then acts as conj(K) on u and K on l.
Eigen::VectorXcd choi_vectorize(const Eigen::MatrixXcd& rho, int n_single_sites);
Eigen::MatrixXcd choi_devectorize(const Eigen::VectorXcd& v, int n_single_sites);

// One non-unitary gate of the Eq.-(13) filter: (1-p) I + p h on the doubled
// layout (or (I + h)/2 in the projective limit). The dropped scalar
// (1-2p)^{1/2} per gate is reported via log_scalar.
struct FilterGate {
  PauliString h;  // involution on the doubled layout
  double p = 0.0;
  double tau = 0.0;
  bool projective = false;

  double w_identity() const { return projective ? 0.5 : 1.0 - p; }
  double w_h() const { return projective ? 0.5 : p; }
  // log of the scalar relating (1-p)I + p h to e^{tau h}
  double log_scalar() const { return 0.5 * std::log(1.0 - 2.0 * p); }
};

// One gate per cell in the spec's range, h_u carrying the complex-conjugation
// hook of the Choi map.
std::vector<FilterGate> build_filter_gates(const ChannelSpec& spec,
                                           const LatticeLayout& doubled);

// dense application, ED scale: v -> w0 v + w1 h v
void apply_filter_gate_dense(const FilterGate& g, Eigen::VectorXcd& v, int n_sites);

}  // namespace decochain
