#include "gridformer/svd.hpp"

#include <algorithm>
#include <cmath>

namespace gridformer {

std::vector<double> singular_values(const Eigen::MatrixXcd& M) {
    if (M.size() == 0)
        return {};
    // Use the smaller Gram matrix; its eigenvalues are the squared
    // singular values.
    Eigen::MatrixXcd gram;
    if (M.rows() <= M.cols())
        gram = M * M.adjoint();
    else
        gram = M.adjoint() * M;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues();

    std::vector<double> sv(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        sv[static_cast<std::size_t>(i)] = std::sqrt(std::max(ev[i], 0.0));
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

double sigma_max(const Eigen::MatrixXcd& M) {
    return singular_values(M).front();
}

double sigma_min(const Eigen::MatrixXcd& M) {
    return singular_values(M).back();
}

} // namespace gridformer
