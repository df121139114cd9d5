#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decochain/lattice.hpp"
#include "decochain/pauli.hpp"

namespace decochain {

// Pauli-sum Hamiltonian together with the layout it lives on.
struct HamiltonianTerms {
  LatticeLayout layout;
  double j_zz = 0.0;
  std::string tag;  // "h0" | "h0_dw" | "doubled_dw"
  std::vector<PauliString> terms;
};

// Ordered list of CZ gates; all diagonal, hence mutually commuting and the
// circuit is its own inverse.
class CliffordCircuit {
public:
  struct Gate {
    int a, b;
  };

  void add_cz(int a, int b);
  const std::vector<Gate>& gates() const& { return gates_; }
  // rvalue access returns by value so iterating gates() of a temporary
  // circuit cannot dangle
  std::vector<Gate> gates() && { return std::move(gates_); }

  // append another circuit's gates
  void extend(const CliffordCircuit& other) {
    gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
  }

  // U P U^dagger, exact phase. CZ rule: X_a -> X_a Z_b, Z untouched; repeated
  // gates on a pair cancel mod 2.
  PauliString conjugate(const PauliString& p) const;

  // diagonal gate application, in place
  void apply_to_state(Eigen::VectorXcd& v, int n_sites) const;

private:
  std::vector<Gate> gates_;
};

// sigma-tau chain in a transverse field, Eq.-(1) form:
//   H0 = sum_j [ -tau^x_{j+1/2} - sigma^x_j - J_zz sigma^z_j sigma^z_{j+1} ]
// Terms are emitted on `layer` of `lat` (single- or double-layer layout).
// Open boundary drops the wrap ZZ bond and keeps all field terms.
HamiltonianTerms build_h0(const LatticeLayout& lat, double j_zz,
                          Layer layer = Layer::u);
HamiltonianTerms build_h0(int cells, double j_zz,
                          Boundary bc = Boundary::periodic);

// Domain-wall dual of H0:
//   H0_DW = sum_j [ -sigma^z_j tau^x_{j+1/2} sigma^z_{j+1}
//                   -tau^z_{j-1/2} sigma^x_j tau^z_{j+1/2}
//                   -J_zz sigma^z_j sigma^z_{j+1} ]
// Open boundary drops every term whose index range wraps; the wrap link then
// carries no terms at all.
HamiltonianTerms build_h0_dw(const LatticeLayout& lat, double j_zz,
                             Layer layer = Layer::u);
HamiltonianTerms build_h0_dw(int cells, double j_zz,
                             Boundary bc = Boundary::periodic);

// U_DW = prod_j CZ_{j-1,j-1/2} CZ_{j,j-1/2}: every tau link gets a CZ with
// both neighbouring sigma sites (full wrap-around under PBC).
CliffordCircuit build_u_dw(const LatticeLayout& lat, Layer layer = Layer::u);

// Decoupled two-layer ladder H0_DW,u* + H0_DW,l on the doubled layout. The
// upper layer passes through the complex-conjugation hook of the Choi map
// (a no-op for these real terms).
HamiltonianTerms build_doubled_hamiltonian(int cells, double j_zz,
                                           Boundary bc = Boundary::periodic);

// map a term built on a single-layer layout onto one layer of a doubled layout
PauliString embed_on_layer(const PauliString& p, const LatticeLayout& single_lat,
                           const LatticeLayout& doubled_lat, Layer layer);

// global spin-flip generator prod_j X over one species on one layer
PauliString global_flip(const LatticeLayout& lat, Species species,
                        Layer layer = Layer::u);

}  // namespace decochain
