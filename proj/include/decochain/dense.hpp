#pragma once

#include <Eigen/Dense>

#include "decochain/models.hpp"

namespace decochain {

// Sum of the term matrices on the full path Hilbert space. ED scale only.
Eigen::MatrixXcd dense_matrix(const HamiltonianTerms& h);

// P |v> accumulated matrix-free over all terms (n <= 24 path sites)
Eigen::VectorXcd apply_terms(const HamiltonianTerms& h, const Eigen::VectorXcd& v);

// <v| H |v> / <v|v>
double energy_expectation(const HamiltonianTerms& h, const Eigen::VectorXcd& v);

}  // namespace decochain
