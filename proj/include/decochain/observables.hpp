#pragma once

#include <map>
#include <string>
#include <vector>

#include "decochain/lattice.hpp"
#include "decochain/pauli.hpp"

namespace decochain {

// what to measure on a (possibly decohered) doubled state
struct ObservableRequest {
  bool chi = true;                 // the chi sums dominate large-L cost;
                                   // entropy-only scans switch them off
  std::vector<int> string_ks;      // string lengths k (1 <= k <= L)
  std::vector<int> ee_prefix_rungs;  // prefix cuts, counted in rungs of the
                                     // doubled ladder (2 rungs per cell)
  int es_levels = 20;
};

struct ObservableRecord {
  double chi_renyi2 = 0.0;
  double chi_linear = 0.0;
  bool chi_truncated = false;  // odd L: chi sums stop at floor(L/2)

  std::map<int, double> string_renyi2;  // k -> S_t^(2)
  std::map<int, double> string_linear;  // k -> S_t^(1)

  std::map<int, double> ee_rungs;                   // prefix x -> S_A (nats)
  std::map<int, std::vector<double>> es_rungs;      // prefix x -> -ln(lambda^2)

  // bookkeeping: ln Tr[rho_D^2] relative to the pure input, and the
  // trace ratio Tr[rho_D]/Tr[rho_0] with dropped norms restored
  double purity_log = 0.0;
  double trace_ratio = 1.0;

  std::string solver;
  int bond_dim = 0;
  double trunc_error = 0.0;
};

// default string length used by scans; clamped into the valid range
inline int default_string_k(int cells) {
  int k = cells / 2 - 1;
  return k < 1 ? 1 : k;
}

// sigma^z_i sigma^z_j on the upper layer, optionally mirrored on the lower
// layer (the Renyi-2 correlator measures both copies at once)
PauliString sigma_zz_pair(const LatticeLayout& lat, int i, int j,
                          bool both_layers);

// tau^z_{1/2} sigma^x_1 ... sigma^x_k tau^z_{k+1/2} on the upper layer,
// optionally mirrored on the lower layer; k = cells wraps the tau anchors
// onto each other and leaves the global sigma-flip
PauliString tau_string(const LatticeLayout& lat, int k, bool both_layers);

}  // namespace decochain
