#pragma once

#include <string>
#include <vector>

#include "decochain/ed.hpp"

namespace decochain {

// one grid point of reference observables
struct GoldenPoint {
  double p_zz = 0.0;
  double p_x = 0.0;  // locked value in paired mode, 0 in simplified mode
  ObservableRecord obs;
};

// reference table for one (L, mode): ground solved once, filtered per point
struct GoldenTable {
  int cells = 0;
  double j_zz = 0.6;
  std::string mode;  // "paired" or "simplified"
  std::vector<GoldenPoint> points;
  // ground-solve metadata (informational; excluded from diffs)
  std::string solver;
  double energy = 0.0;
  double residual = 0.0;
  bool degenerate = false;
};

// defaults shared by the committed files and the oracle subcommand
std::vector<double> golden_grid();
ObservableRequest golden_request(int cells);
std::string golden_filename(int cells, bool paired);

GoldenTable compute_golden_table(int cells, double j_zz,
                                 const std::vector<double>& grid, bool paired,
                                 int dense_max_sites = 10);

std::string golden_to_json(const GoldenTable& t);
GoldenTable golden_from_json(const std::string& text);
GoldenTable load_golden_file(const std::string& path);
void write_golden_file(const GoldenTable& t, const std::string& path);

// human-readable list of mismatches, empty when the tables agree. Scalars are
// compared as |a-b| <= tol*max(1,|a|); entanglement-spectrum levels are only
// compared while both sit well above the eigenvalue floor.
std::string diff_golden(const GoldenTable& a, const GoldenTable& b, double tol);

}  // namespace decochain
