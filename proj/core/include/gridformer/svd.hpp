#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gridformer {

/// Singular values of a complex matrix in descending order, all >= 0.
///
/// Computed from the Hermitian eigendecomposition of the smaller Gram
/// matrix (M^H M or M M^H). Matrices in this codebase stay small
/// (<= ~50x50), where this route is accurate to ~1e-12 and trivially
/// verifiable against an independent eigensolver.
std::vector<double> singular_values(const Eigen::MatrixXcd& M);

double sigma_max(const Eigen::MatrixXcd& M);
double sigma_min(const Eigen::MatrixXcd& M);

} // namespace gridformer
