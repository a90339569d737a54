#pragma once

#include <Eigen/Dense>

#include "gridformer/line.hpp"

namespace gridformer {

/// Steady state a device is linearized about, in the global dq frame
/// (grid source angle = 0). Current is positive flowing INTO the
/// converter; P0/Q0 are converter OUTPUT powers, so
///   P0 = -(U_d I_d + U_q I_q),  Q0 = -(U_q I_d - U_d I_q).
struct OperatingPoint {
    Eigen::Vector2d U_dq0 = Eigen::Vector2d(1.0, 0.0);
    Eigen::Vector2d I_dq0 = Eigen::Vector2d::Zero();
    double theta0 = 0.0; // terminal voltage angle vs global frame
    double P0 = 0.0;
    double Q0 = 0.0;

    /// Derives theta0/P0/Q0 from the vectors and checks the magnitude window.
    static OperatingPoint from_terminal(const Eigen::Vector2d& U_dq0,
                                        const Eigen::Vector2d& I_into);

    Eigen::Vector2d output_current() const { return -I_dq0; }
    double voltage_magnitude() const { return U_dq0.norm(); }
    void validate() const;
};

enum class PowerRefMode {
    PQ, ///< regulate P and Q
    PV, ///< regulate P and terminal voltage magnitude
};

/// Steady state of a single converter feeding a stiff source U_grid
/// through (L_g, tau L_g). Newton iteration on the terminal voltage;
/// throws NoEquilibrium when the references exceed the static transfer
/// limit or the iteration fails to converge.
OperatingPoint solve_operating_point(double P_ref, double QV_ref, PowerRefMode mode,
                                     const LineParams& line, double U_grid);

} // namespace gridformer
