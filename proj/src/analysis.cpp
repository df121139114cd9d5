#include "decochain/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace decochain {

CcFit cc_fit(const std::vector<std::pair<int, double>>& samples, int l_e) {
  if (l_e < 2) throw std::invalid_argument("cc_fit: L_e must be at least 2");
  std::set<int> distinct;
  for (const auto& [x, sx] : samples) {
    if (x < 1 || x >= l_e)
      throw std::invalid_argument("cc_fit: x outside 1..L_e-1");
    distinct.insert(x);
  }
  if (distinct.size() < 4)
    throw std::invalid_argument("cc_fit: need at least 4 distinct x values");

  const int n = static_cast<int>(samples.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double x = samples[i].first;
    a(i, 0) = std::log(2.0 * l_e * std::sin(std::numbers::pi * x / l_e)) / 3.0;
    a(i, 1) = 1.0;
    y(i) = samples[i].second;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 2) throw std::runtime_error("cc_fit: singular design matrix");
  Eigen::VectorXd theta = qr.solve(y);

  CcFit fit;
  fit.c_eff = theta(0);
  fit.b = theta(1);
  fit.residual = (a * theta - y).norm();
  fit.l_e = l_e;
  fit.n_points = n;
  return fit;
}

namespace {

double poly_eval(const Eigen::VectorXd& c, double t) {
  double v = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) v = v * t + c(k);
  return v;
}

// real roots of sum_k c_k t^k via the companion matrix, after trimming
// leading coefficients that are numerically zero relative to `scale`
std::vector<double> real_roots(const Eigen::VectorXd& c, double scale) {
  int deg = static_cast<int>(c.size()) - 1;
  while (deg > 0 && std::abs(c(deg)) <= 1e-12 * scale) --deg;
  std::vector<double> roots;
  if (deg < 1) return roots;  // constant: no roots
  if (deg == 1) {
    roots.push_back(-c(0) / c(1));
    return roots;
  }
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 0; i + 1 < deg; ++i) comp(i + 1, i) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c(i) / c(deg);
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
  for (int i = 0; i < deg; ++i) {
    const auto z = es.eigenvalues()(i);
    if (std::abs(z.imag()) <= 1e-8 * std::max(1.0, std::abs(z.real())))
      roots.push_back(z.real());
  }
  return roots;
}

}  // namespace

PeakFit peak_fit(const std::vector<std::pair<double, double>>& curve,
                 double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("peak_fit: empty window");

  std::vector<std::pair<double, double>> pts;
  for (const auto& pt : curve)
    if (pt.first >= lo && pt.first <= hi) pts.push_back(pt);
  if (pts.size() < 8)
    throw std::invalid_argument("peak_fit: need at least 8 points in window");

  // fit in t = (2p - lo - hi)/(hi - lo) in [-1, 1] for conditioning
  const int n = static_cast<int>(pts.size());
  constexpr int kDeg = 6;
  Eigen::MatrixXd a(n, kDeg + 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double t = (2.0 * pts[i].first - lo - hi) / (hi - lo);
    double tk = 1.0;
    for (int k = 0; k <= kDeg; ++k) {
      a(i, k) = tk;
      tk *= t;
    }
    y(i) = pts[i].second;
  }
  Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);

  Eigen::VectorXd d(kDeg);
  for (int k = 0; k < kDeg; ++k) d(k) = (k + 1) * c(k + 1);
  const double scale = c.cwiseAbs().maxCoeff();

  double best_t = 0.0, best_v = 0.0;
  bool interior = false;
  for (double t : real_roots(d, scale)) {
    if (std::abs(t) > 1.0 - 1e-7) continue;  // stationary point at the edge
    const double v = poly_eval(c, t);
    if (!interior || v > best_v) {
      best_t = t;
      best_v = v;
      interior = true;
    }
  }
  const double edge_v = std::max(poly_eval(c, -1.0), poly_eval(c, 1.0));
  if (!interior || edge_v >= best_v)
    throw std::runtime_error(
        "peak_fit: fitted maximum sits on the window edge; widen the window");

  PeakFit fit;
  fit.p_peak = 0.5 * (best_t * (hi - lo) + lo + hi);
  fit.value = best_v;
  fit.coeffs = c;
  fit.residual = (a * c - y).norm();
  fit.lo = lo;
  fit.hi = hi;
  return fit;
}

PcFit extrapolate_pc(const std::vector<std::pair<int, double>>& peaks) {
  const int n = static_cast<int>(peaks.size());
  if (n < 3)
    throw std::invalid_argument("extrapolate_pc: need at least 3 sizes");

  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    if (peaks[i].first < 2)
      throw std::invalid_argument("extrapolate_pc: system size below 2");
    a(i, 0) = 1.0 / peaks[i].first;
    a(i, 1) = 1.0;
    y(i) = peaks[i].second;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 2)
    throw std::runtime_error("extrapolate_pc: singular design matrix");
  Eigen::VectorXd theta = qr.solve(y);

  const Eigen::VectorXd r = a * theta - y;
  const double sigma2 = n > 2 ? r.squaredNorm() / (n - 2) : 0.0;
  const Eigen::Matrix2d cov = sigma2 * (a.transpose() * a).inverse();

  PcFit fit;
  fit.a = theta(0);
  fit.p_c = theta(1);
  fit.p_c_se = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.residual = r.norm();
  fit.n_sizes = n;
  return fit;
}

int degeneracy_count(const std::vector<double>& es_levels, double tol) {
  if (es_levels.empty())
    throw std::invalid_argument("degeneracy_count: no levels");
  std::vector<double> l = es_levels;
  std::sort(l.begin(), l.end());
  const int w = std::min<int>(20, static_cast<int>(l.size()));
  // levels closer than 1e-6 are numerically indistinguishable (solver noise
  // on an exactly degenerate multiplet), so the gap threshold never drops
  // below that; an all-degenerate window then counts as one cluster instead
  // of shattering on its own noise
  const double threshold = std::max(tol * (l[w - 1] - l[0]), 1e-6);
  int count = 1;
  for (int i = 1; i < w; ++i) {
    if (l[i] - l[i - 1] > threshold) break;
    ++count;
  }
  return count;
}

}  // namespace decochain
