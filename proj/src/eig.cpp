#include "crnosc/eig.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace crnosc {

std::vector<std::complex<double>> eig(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eig: square matrix required");
    if (a.rows() > 16) throw std::invalid_argument("eig: dimension <= 16 required");
    if (a.rows() == 0) return {};
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eig: QR iteration failed to converge");
    std::vector<std::complex<double>> out(a.rows());
    for (int i = 0; i < a.rows(); ++i) out[i] = solver.eigenvalues()(i);
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return out;
}

double eig_multiset_distance(std::vector<std::complex<double>> a,
                             std::vector<std::complex<double>> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    // greedy nearest matching; adequate for well-separated spectra
    double worst = 0;
    std::vector<bool> used(b.size(), false);
    for (const auto& x : a) {
        double best = std::numeric_limits<double>::infinity();
        int bi = -1;
        for (size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            double d = std::abs(x - b[j]);
            if (d < best) {
                best = d;
                bi = static_cast<int>(j);
            }
        }
        used[bi] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace crnosc
