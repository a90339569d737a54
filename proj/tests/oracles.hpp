// Test-only reference implementations, independent of the library's
// numerical kernels.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracles {

// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
// Deliberately avoids Eigen's solvers so it can cross-check the library's
// singular value route.
inline std::vector<double> jacobi_hermitian_eigenvalues(Eigen::MatrixXcd H) {
    using Complex = std::complex<double>;
    const Eigen::Index n = H.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q)
                off += std::norm(H(p, q));
        if (off < 1e-30)
            break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Complex hpq = H(p, q);
                if (std::abs(hpq) < 1e-300)
                    continue;
                const double app = H(p, p).real();
                const double aqq = H(q, q).real();
                // Unitary 2x2 rotation zeroing H(p,q): phase out the
                // off-diagonal, then a real Jacobi rotation.
                const Complex phase = hpq / std::abs(hpq);
                const double tau = (aqq - app) / (2.0 * std::abs(hpq));
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const Complex sp = s * phase;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex hkp = H(k, p);
                    const Complex hkq = H(k, q);
                    H(k, p) = c * hkp - std::conj(sp) * hkq;
                    H(k, q) = sp * hkp + c * hkq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex hpk = H(p, k);
                    const Complex hqk = H(q, k);
                    H(p, k) = c * hpk - sp * hqk;
                    H(q, k) = std::conj(sp) * hpk + c * hqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        ev[static_cast<std::size_t>(i)] = H(i, i).real();
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

// Singular values via the M^H M Gram matrix and the Jacobi eigensolver.
inline std::vector<double> gram_singular_values(const Eigen::MatrixXcd& M) {
    const Eigen::MatrixXcd gram = M.adjoint() * M;
    std::vector<double> ev = jacobi_hermitian_eigenvalues(gram);
    std::vector<double> sv;
    sv.reserve(ev.size());
    for (double v : ev)
        sv.push_back(std::sqrt(std::max(v, 0.0)));
    return sv;
}

inline Eigen::MatrixXcd random_complex(Eigen::Index rows, Eigen::Index cols,
                                       std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXcd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            out(i, j) = std::complex<double>(dist(rng), dist(rng));
    return out;
}

// Random stable strictly-proper 2x2 state-space matrices.
struct RandomDevice {
    Eigen::MatrixXd A, B, C, D;
};

inline RandomDevice random_stable_device(int nx, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::uniform_real_distribution<double> decay(0.5, 30.0);
    Eigen::MatrixXd skew(nx, nx);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j)
            skew(i, j) = 20.0 * dist(rng);
    skew = (skew - skew.transpose()).eval();
    Eigen::VectorXd damp(nx);
    for (int i = 0; i < nx; ++i)
        damp(i) = decay(rng);
    RandomDevice dev;
    dev.A = -Eigen::MatrixXd(damp.asDiagonal()) + skew;
    dev.B = Eigen::MatrixXd::NullaryExpr(nx, 2, [&] { return dist(rng); });
    dev.C = Eigen::MatrixXd::NullaryExpr(2, nx, [&] { return dist(rng); });
    dev.D = Eigen::MatrixXd::Zero(2, 2);
    return dev;
}

} // namespace oracles
