#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decochain/lattice.hpp"
#include "decochain/pauli.hpp"

namespace decochain {

struct TruncationPolicy {
  int max_bond = 128;
  double sv_floor = 1e-6;           // relative singular-value cutoff
  double gate_error_budget = 1e-8;  // per-gate discarded-weight warning level
};

// Finite open-boundary MPS over the path sites, real tensors, physical dim 2.
// a[i][s] is the (bond i) x (bond i+1) matrix for physical index s. Tensors
// are kept at unit norm; divided-out scalars accumulate in norm_log. Sites
// left of center are left-isometries, sites right of it right-isometries.
struct MPSState {
  LatticeLayout layout;
  std::vector<std::array<Eigen::MatrixXd, 2>> a;
  std::vector<Eigen::VectorXd> schmidt;  // n+1 bonds; refreshed by SVD moves
  int center = 0;
  double norm_log = 0.0;
  double trunc_error = 0.0;  // accumulated discarded squared Schmidt weight
  std::vector<std::string> warnings;

  int n_sites() const { return static_cast<int>(a.size()); }
  int bond_dim(int b) const {
    return b == n_sites() ? static_cast<int>(a.back()[0].cols())
                          : static_cast<int>(a[b][0].rows());
  }
  int max_bond_dim() const {
    int d = 1;
    for (int b = 0; b <= n_sites(); ++b) d = std::max(d, bond_dim(b));
    return d;
  }
};

// product state from per-site 2-vectors (normalized internally)
MPSState product_mps(const LatticeLayout& layout,
                     const std::vector<Eigen::Vector2d>& site_vectors);
// seeded random product state (deterministic DMRG starting point)
MPSState random_product_mps(const LatticeLayout& layout, uint64_t seed);
// seeded random entangled state at bond dimension <= chi, canonical and unit
// norm. Product starts let environment factors of multi-site terms vanish
// exactly and strand the optimizer; an entangled start keeps them alive.
MPSState random_mps(const LatticeLayout& layout, int chi, uint64_t seed);
// |1>>: product of inter-layer Bell rungs. The Choi vector of the identity is
// unnormalized (entries 0/1); here tensors are unit-norm and the 2^L scale
// lives in norm_log, so every downstream ratio is exact.
MPSState relative_state_mps(const LatticeLayout& doubled);

// exact canonical-center moves (rank-revealing QR, no truncation)
void move_center(MPSState& m, int site);

// single-bond SVD center shifts; refresh the schmidt cache at the crossed
// bond and truncate when a policy is given. Discarded weight accumulates in
// trunc_error; the norm loss stays in the tensors until renormalize().
// Returns the discarded squared-weight fraction of that bond.
double svd_shift_left(MPSState& m, const TruncationPolicy* pol);
double svd_shift_right(MPSState& m, const TruncationPolicy* pol);

// scale the center tensor to unit norm, pushing ln(norm) to norm_log
double renormalize(MPSState& m);

// Schmidt values at an internal bond (sorted descending, unit 2-norm);
// moves the center and refreshes the cache as a side effect
const Eigen::VectorXd& schmidt_spectrum(MPSState& m, int bond);
// EE in nats at a bond cut
double entanglement_entropy(MPSState& m, int bond);
// lowest `levels` of -ln(lambda^2), ascending, eigenvalue floor 1e-14
std::vector<double> entanglement_spectrum(MPSState& m, int bond, int levels);

// <bra|P|ket> of the unit-norm tensors; norm_logs are the caller's business
Complex expectation_pauli(const MPSState& m, const PauliString& p);
Complex cross_expectation(const MPSState& bra, const PauliString& p,
                          const MPSState& ket);
Complex overlap(const MPSState& bra, const MPSState& ket);

// multiply a product of single-site Paulis into the tensors (no bond growth);
// the external phase must be real (+-1 after folding i^nY into real Y blocks)
void apply_pauli_product(MPSState& m, const PauliString& p);

// dense statevector of the unit-norm tensors (<= 24 sites)
Eigen::VectorXcd to_statevector(const MPSState& m);

// lossless binary checkpoint (raw doubles, little-endian)
void save_mps(const MPSState& m, const std::string& path);
MPSState load_mps(const std::string& path);

// truncated SVD split shared by DMRG and gate application: keeps at most
// max_bond values above sv_floor (relative), always at least one; returns
// the discarded squared weight fraction. Pass nullptr to keep everything
// above numerical rank.
struct SplitResult {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;  // unit 2-norm
  Eigen::MatrixXd vt;
  double discarded = 0.0;
  double theta_norm = 0.0;
};
SplitResult svd_split(const Eigen::MatrixXd& theta, const TruncationPolicy* pol);

}  // namespace decochain
