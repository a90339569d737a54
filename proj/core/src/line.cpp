#include "gridformer/line.hpp"

namespace gridformer {

void LineParams::validate() const {
    if (!(L_g > 0.0))
        throw DimensionMismatch("line inductance must be positive");
    if (tau < 0.0)
        throw NonpositiveTau("line R/L ratio must be nonnegative");
    if (!(omega0 > 0.0))
        throw DimensionMismatch("nominal frequency must be positive");
}

Eigen::Matrix2d rot90() {
    Eigen::Matrix2d j;
    j << 0.0, -1.0, 1.0, 0.0;
    return j;
}

Eigen::Matrix2d rotation(double theta) {
    Eigen::Matrix2d r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

StateSpaceModel line_gamma(double tau, double omega0) {
    if (!(tau > 0.0))
        throw NonpositiveTau("gamma(s) needs tau > 0 (poles at -w0 tau +/- j w0)");
    if (!(omega0 > 0.0))
        throw DimensionMismatch("nominal frequency must be positive");
    // gamma(s) u = x with x' = -w0 (tau I + J) x + w0 u.
    Eigen::Matrix2d K = tau * Eigen::Matrix2d::Identity() + rot90();
    return {-omega0 * K, omega0 * Eigen::Matrix2d::Identity(),
            Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Zero()};
}

Eigen::Matrix2d gamma_static(double tau) {
    Eigen::Matrix2d K = tau * Eigen::Matrix2d::Identity() + rot90();
    return K.inverse();
}

Eigen::Matrix2cd gamma_at(double tau, double omega0, std::complex<double> s) {
    const std::complex<double> z = s / omega0 + tau;
    Eigen::Matrix2cd m;
    m << z, std::complex<double>(-1.0, 0.0), std::complex<double>(1.0, 0.0), z;
    return m.inverse();
}

} // namespace gridformer
