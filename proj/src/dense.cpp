#include "decochain/dense.hpp"

#include <stdexcept>

namespace decochain {

Eigen::MatrixXcd dense_matrix(const HamiltonianTerms& h) {
  const int n = h.layout.sites();
  if (n > 14) throw std::invalid_argument("dense_matrix: layout > 14 path sites");
  const uint64_t dim = uint64_t(1) << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms) m += t.to_dense(n);
  return m;
}

Eigen::VectorXcd apply_terms(const HamiltonianTerms& h, const Eigen::VectorXcd& v) {
  const int n = h.layout.sites();
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(v.size());
  Eigen::VectorXcd tmp;
  for (const auto& t : h.terms) {
    t.apply(v, tmp, n);
    acc += tmp;
  }
  return acc;
}

double energy_expectation(const HamiltonianTerms& h, const Eigen::VectorXcd& v) {
  const Complex num = v.adjoint() * apply_terms(h, v);
  const double den = v.squaredNorm();
  return num.real() / den;
}

}  // namespace decochain
