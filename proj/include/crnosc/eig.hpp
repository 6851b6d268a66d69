#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace crnosc {

/// All eigenvalues of a small dense real matrix (dimension <= 16) via
/// Schur/QR iteration. Throws std::runtime_error on non-convergence rather
/// than returning silently wrong values. Sorted by (real, imag) so results
/// compare as multisets.
std::vector<std::complex<double>> eig(const Eigen::MatrixXd& a);

/// Multiset distance: max over a greedy matching of |a_i - b_i| after sort.
double eig_multiset_distance(std::vector<std::complex<double>> a,
                             std::vector<std::complex<double>> b);

}  // namespace crnosc
