#pragma once

#include <complex>

#include "gridformer/state_space.hpp"

namespace gridformer {

/// RL interconnection line in the rotating dq frame.
///   L_g   series inductance (pu)
///   tau   resistance-to-inductance ratio R/L (dimensionless)
///   omega0 nominal angular frequency (rad/s)
/// tau = 0 is accepted for static computations; the dynamic gamma model
/// requires tau > 0.
struct LineParams {
    double L_g = 0.3;
    double tau = 0.1;
    double omega0 = 2.0 * 3.14159265358979323846 * 50.0;

    void validate() const;
};

/// 90-degree rotation [[0,-1],[1,0]]; multiplication by j in dq vector form.
Eigen::Matrix2d rot90();

/// Rotation matrix e^{J theta}.
Eigen::Matrix2d rotation(double theta);

/// Line dynamic matrix gamma(s) = [[s/w0+tau, -1],[1, s/w0+tau]]^{-1} as a
/// 2-state model (2 inputs, 2 outputs). Throws NonpositiveTau for tau <= 0,
/// which would put the poles on the imaginary axis.
StateSpaceModel line_gamma(double tau, double omega0);

/// gamma(0) = (tau I + J)^{-1}; valid for tau >= 0.
Eigen::Matrix2d gamma_static(double tau);

/// Closed-form gamma evaluated at a complex frequency.
Eigen::Matrix2cd gamma_at(double tau, double omega0, std::complex<double> s);

} // namespace gridformer
