#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "decochain/analysis.hpp"
#include "decochain/dmrg.hpp"
#include "decochain/mps_observables.hpp"

namespace decochain {

// Everything a scan needs, in one reproducible bundle. The canonical
// key=value snapshot (config_to_ini) is embedded in every output file;
// config_hash covers the physics-shaping fields only, so moving output
// directories never changes row identity. Thread count is deliberately
// excluded from both: parallelism must not affect results, and it is set
// through the DECOCHAIN_THREADS environment variable alone.
struct ScanConfig {
  std::vector<int> cells = {3};
  double j_zz = 0.6;
  std::vector<double> p_grid = {0.0};
  std::string mode = "paired";  // "paired" locks p_x to p_zz; "simplified" is ZZ only

  int max_bond = 128;
  double sv_floor = 1e-9;
  double gate_budget = 1e-8;
  double dmrg_tol = 1e-8;
  int dmrg_sweeps = 40;
  int dmrg_local_iters = 40;
  uint64_t seed = 7;

  bool measure_chi = true;
  bool measure_strings = true;
  bool measure_ee = true;
  int string_k = 0;          // 0: floor(L/2) - 1, clamped to >= 1
  std::vector<int> ee_cuts;  // prefix cuts in rungs; empty: half cut only
  bool profile = false;      // measure every prefix cut (entropy profile)
  int es_levels = 20;

  double window_lo = 0.2;  // peak-fit window for the transition estimate
  double window_hi = 0.45;

  std::string out_dir = "out";
  std::string golden_dir = "data/golden";
  int threads = 1;  // env-controlled; never serialized
};

// sorts and dedupes the grids in place, then rejects values the pipeline
// cannot run (probabilities outside [0, 1/2], unknown mode, bad sizes)
void validate_config(ScanConfig& c);

// canonical snapshot: fixed key order, round-trips exactly
std::string config_to_ini(const ScanConfig& c);
ScanConfig config_from_ini(const std::string& text);
ScanConfig load_config_file(const std::string& path);

// FNV-1a 64 over the snapshot minus output-path lines, as 16 hex digits
std::string config_hash(const ScanConfig& c);

TruncationPolicy scan_policy(const ScanConfig& c);
DmrgOptions scan_dmrg_options(const ScanConfig& c);
// the per-size observable request a config implies
ObservableRequest scan_request(const ScanConfig& c, int cells);

struct GroundInfo {
  int cells = 0;
  double energy = 0.0;
  bool converged = false;
  int sweeps = 0;                 // 0 when reused from a checkpoint
  std::vector<int> bond_profile;  // interior bond dimensions
  std::string checkpoint;
  bool reused = false;
  bool ed_checked = false;  // independent sparse-eigensolver comparison
  double ed_energy = 0.0;
};

// checkpoint file a config maps to; encodes every state-shaping field
std::string ground_checkpoint_path(const ScanConfig& c, int cells);

// load the checkpoint if present, otherwise run DMRG and write it (plus a
// readable .json sidecar). Throws on non-convergence. `out` receives the
// state when non-null.
GroundInfo prepare_ground(const ScanConfig& c, int cells, MPSState* out = nullptr);

struct ScanRow {
  int cells = 0;
  double p_zz = 0.0;
  double p_x = 0.0;  // locked value in paired mode, 0 in simplified mode
  ObservableRecord obs;
  double seconds = 0.0;      // diagnostics only, kept out of the data files
  std::string status = "ok"; // or "failed: <reason>"
  bool ok() const { return status == "ok"; }
};

struct ScanResult {
  std::vector<ScanRow> rows;  // ordered by (cells, p_zz)
  int failed = 0;
  std::vector<std::string> files;
  int exit_code() const { return failed == 0 ? 0 : 2; }
};

// one row per (L, p_zz): CSV series + full-record JSON, rewritten atomically
// after every completed point; failures are flagged per row and never stop
// the scan
ScanResult run_scan(const ScanConfig& c);

// scan JSON document round trip (the reader tolerates flagged rows)
std::string scan_to_json(const ScanConfig& c, const std::vector<ScanRow>& rows);
std::vector<ScanRow> scan_rows_from_json(const std::string& text);

struct OracleResult {
  std::string report;
  bool clean = true;  // regenerated tables match and cross-checks passed
  std::vector<std::string> files;
};

// regenerate golden tables for the configured sizes (all <= 6) into
// out_dir, diff them against golden_dir, and cross-check the dense and
// Lanczos eigensolvers against each other (doubled L = 2 by default,
// L = 3 with deep = true)
OracleResult run_oracle(const ScanConfig& c, bool deep = false);

struct TransitionReport {
  struct PerSize {
    int cells = 0;
    double p_peak = 0.0;
    double residual = 0.0;
  };
  std::vector<PerSize> peaks;
  PcFit fit;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double reference = 0.297;  // infinite-size estimate the report compares against
  std::string mode;
};

// peak-fit the half-cut entropy curve of every size inside [lo, hi], then
// extrapolate the peak positions in 1/L; throws below 3 usable sizes
TransitionReport transition_from_rows(const std::vector<ScanRow>& rows,
                                      double lo, double hi,
                                      const std::string& mode);
// reads the scan JSON from c.out_dir and writes transition_<mode>.{json,md}
TransitionReport run_transition(const ScanConfig& c);

std::string transition_to_json(const TransitionReport& r);
std::string transition_to_markdown(const TransitionReport& r);

// write-to-temp + rename, so readers never observe a partial file
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace decochain
