#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decochain/channels.hpp"
#include "decochain/models.hpp"
#include "decochain/observables.hpp"

namespace decochain {

// statevector on the full path Hilbert space with norm bookkeeping
struct DenseState {
  LatticeLayout layout;
  Eigen::VectorXcd v;
  double norm_log = 0.0;  // accumulated ln of norms divided out
};

struct GroundResult {
  std::vector<Eigen::VectorXcd> basis;  // orthonormal ground space
  double energy = 0.0;
  double residual = 0.0;
  bool degenerate = false;
  std::string solver;  // "dense" or "lanczos"
};

// Lowest eigenpair(s): dense solver up to dense_max_sites path sites (hard
// cap 12); above that, matrix-free Lanczos with a stored fully
// reorthogonalized basis (thick restarts under a memory cap) up to 24.
// Degenerate ground spaces (split < 1e-9) return the full orthonormal basis
// with the flag set.
GroundResult exact_ground_state(const HamiltonianTerms& h, int dense_max_sites = 10);

// ground state wrapped as a DenseState (first basis vector)
DenseState make_dense_ground(const HamiltonianTerms& h);

// apply filter gates in order, renormalizing after each and accumulating the
// divided-out norm in norm_log
void filter_statevector(DenseState& s, const std::vector<FilterGate>& gates);

// |1>>: Choi vector of the identity, product of inter-layer Bell pairs over
// all rungs. Unnormalized (entries 0/1) by policy; every use is a ratio.
Eigen::VectorXcd dense_relative_state(const LatticeLayout& doubled);

// rotate away the eigensolver's arbitrary global phase so that <<1|v>> is
// real positive, as it must be for the Choi vector of a PSD operator
void fix_choi_phase(DenseState& s);

// rho_A of |v><v| / <v|v> for an arbitrary subset of path sites (<= 12)
Eigen::MatrixXcd reduced_density_matrix(const Eigen::VectorXcd& v, int n_sites,
                                        const std::vector<int>& subsystem);

// exact evaluation of every requested observable by direct contraction
ObservableRecord oracle_observables(const DenseState& s,
                                    const ObservableRequest& req);

// filter a prepared (phase-fixed) doubled ground state: ZZ channel at p_zz
// followed (in paired mode) by the tZ.sX.tZ channel at p_x = px_of_pzz
DenseState decohere_state_ed(const DenseState& ground, double j_zz, double p_zz,
                             bool paired);

// full ED pipeline: doubled DW ground at j_zz, phase-fixed, then filtered
DenseState decohere_ground_ed(int cells, double j_zz, double p_zz, bool paired);

// single-pair correlators on a dense doubled state
// C^II(i,j) = <sz_i,u sz_j,u sz_i,l sz_j,l> on the normalized state
double renyi2_correlator(const DenseState& s, int i, int j);
// C^I(i,j) = <<1| sz_i sz_j |rho>> / <<1|rho>>
double linear_correlator(const DenseState& s, int i, int j);

}  // namespace decochain
