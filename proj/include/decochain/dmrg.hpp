#pragma once

#include <cstdint>
#include <vector>

#include "decochain/channels.hpp"
#include "decochain/mpo.hpp"
#include "decochain/mps.hpp"

namespace decochain {

struct DmrgOptions {
  int max_sweeps = 40;
  double tol = 1e-8;       // inter-sweep |dE| stop
  int local_iters = 40;    // Lanczos cap per two-site solve
  double local_tol = 1e-10;
  uint64_t seed = 7;       // starting state
  // entangled start: product starts let environment factors of multi-site
  // terms vanish and strand the optimizer, and a bond below the doubled
  // ladder's half-cut rank (16) leaves plateau traps
  int init_bond = 16;
};

struct DmrgResult {
  MPSState state;
  double energy = 0.0;
  std::vector<double> sweep_energies;  // one per completed sweep
  bool converged = false;
};

// two-site DMRG on the automaton MPO of h, deterministic for fixed options
DmrgResult dmrg_ground_state(const HamiltonianTerms& h,
                             const TruncationPolicy& pol,
                             const DmrgOptions& opt = {});

// (1-p) I + p h as a window MPO; p = 0 gates are a no-op. Returns the
// discarded weight (also accumulated in the state).
double apply_filter_gate(MPSState& m, const FilterGate& g,
                         const TruncationPolicy& pol);
void filter_mps(MPSState& m, const std::vector<FilterGate>& gates,
                const TruncationPolicy& pol);

// DMRG ground state of the doubled DW model, sign-fixed so <<1|rho_0>> > 0
DmrgResult ground_state_mps(int cells, double j_zz, const TruncationPolicy& pol,
                            const DmrgOptions& opt = {});

// ZZ channel at p_zz, then (in paired mode) the tZ.sX.tZ channel at the
// locked p_x; scans reuse one solved ground across a probability grid
void apply_decoherence(MPSState& m, double j_zz, double p_zz, bool paired,
                       const TruncationPolicy& pol);

// full MPS pipeline mirroring decohere_ground_ed: the two stages above
MPSState decohere_ground_mps(int cells, double j_zz, double p_zz, bool paired,
                             const TruncationPolicy& pol,
                             const DmrgOptions& opt = {});

}  // namespace decochain
