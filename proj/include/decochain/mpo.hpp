#pragma once

#include <vector>

#include <Eigen/Dense>

#include "decochain/models.hpp"
#include "decochain/mps.hpp"

namespace decochain {

// Sparse MPO in finite-state-automaton form. Bond slots: 0 = "done" (term
// fully emitted), 1 = "ready" (nothing emitted), 2+ = terms in flight. The
// leftmost bond holds only "ready", the rightmost only "done"; wrap terms of
// a periodic chain simply stay in flight across the interior.
struct MpoSite {
  struct Entry {
    int in = 0, out = 0;
    Eigen::Matrix2d op;
  };
  std::vector<Entry> entries;
  int w_in = 1, w_out = 1;
};

struct MPO {
  std::vector<MpoSite> sites;
  int n_sites() const { return static_cast<int>(sites.size()); }
  int max_width() const {
    int w = 1;
    for (const auto& s : sites) w = std::max(w, s.w_out);
    return w;
  }
};

// automaton compilation of a real Pauli-sum Hamiltonian
MPO build_mpo(const HamiltonianTerms& h);

// w0*I + w1*h as a bond-2 automaton covering [lo, hi] = the support interval
// of h; sites outside the window are untouched by application
struct WindowMpo {
  MPO mpo;  // sites indexed 0..hi-lo
  int lo = 0, hi = 0;
};
WindowMpo window_mpo(const PauliString& h, double w0, double w1, int n_sites);

// <m|MPO|m> of the unit-norm tensors
double mpo_expectation(const MPSState& m, const MPO& op);

// contract the window automaton into the tensors (bond dims multiply by the
// automaton width inside the window), then restore canonical form with a
// truncating sweep and renormalize. Returns the discarded weight.
double apply_window_mpo(MPSState& m, const WindowMpo& w, const TruncationPolicy& pol);

}  // namespace decochain
