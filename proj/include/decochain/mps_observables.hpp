#pragma once

#include "decochain/mps.hpp"
#include "decochain/observables.hpp"

namespace decochain {

// Single-pair correlators on a doubled MPS. `rel` is the relative (identity)
// state for the same layout; pass the one from relative_state_mps so repeated
// calls share it. Both are ratios of unit-tensor contractions, so neither
// depends on norm_log bookkeeping.
double renyi2_correlator(const MPSState& m, int i, int j);
double linear_correlator(const MPSState& m, const MPSState& rel, int i, int j);

// tau-string order parameters of length k (1..cells)
double string_renyi2(const MPSState& m, int k);
double string_linear(const MPSState& m, const MPSState& rel, int k);

// every requested observable measured on the MPS; mirrors oracle_observables
// field for field so records from either solver compare directly. Moves the
// canonical center while extracting Schmidt spectra but leaves the state
// physically unchanged.
ObservableRecord mps_observables(MPSState& m, const ObservableRequest& req);

}  // namespace decochain
