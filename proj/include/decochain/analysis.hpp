#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace decochain {

// least-squares fit of S_x = (c_eff/3) ln(2 L_e sin(pi x / L_e)) + B over
// rung prefixes x; L_e is the total rung count of the doubled system
struct CcFit {
  double c_eff = 0.0;
  double b = 0.0;
  double residual = 0.0;  // ||model - data||_2
  int l_e = 0;
  int n_points = 0;
};
CcFit cc_fit(const std::vector<std::pair<int, double>>& samples, int l_e);

// degree-6 polynomial fit of a peak inside [lo, hi]; refuses curves whose
// fitted maximum sits on a window edge (widen the window instead)
struct PeakFit {
  double p_peak = 0.0;
  double value = 0.0;      // fitted height at the peak
  Eigen::VectorXd coeffs;  // ascending powers of the window-scaled variable
  double residual = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};
PeakFit peak_fit(const std::vector<std::pair<double, double>>& curve,
                 double lo, double hi);

// linear extrapolation p_peak(L) = a/L + p_c; standard error of the
// intercept estimated from the fit residuals
struct PcFit {
  double a = 0.0;
  double p_c = 0.0;
  double p_c_se = 0.0;
  double residual = 0.0;
  int n_sizes = 0;
};
PcFit extrapolate_pc(const std::vector<std::pair<int, double>>& peaks);

// multiplicity of the lowest cluster of an entanglement spectrum: walking
// the sorted levels, a new cluster starts when a gap exceeds
// tol * (max - min over the lowest <= 20 levels), floored at 1e-6 so an
// exactly degenerate window does not shatter on solver noise; such a window
// counts every level in it
int degeneracy_count(const std::vector<double>& es_levels, double tol = 0.1);

}  // namespace decochain
