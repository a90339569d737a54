#include "gridformer/operating_point.hpp"

#include <cmath>

namespace gridformer {

OperatingPoint OperatingPoint::from_terminal(const Eigen::Vector2d& U_dq0,
                                             const Eigen::Vector2d& I_into) {
    OperatingPoint op;
    op.U_dq0 = U_dq0;
    op.I_dq0 = I_into;
    op.theta0 = std::atan2(U_dq0.y(), U_dq0.x());
    const Eigen::Vector2d io = -I_into;
    op.P0 = U_dq0.dot(io);
    op.Q0 = U_dq0.dot(rot90() * io);
    op.validate();
    return op;
}

void OperatingPoint::validate() const {
    const double mag = voltage_magnitude();
    if (!(mag > 0.5) || !(mag < 1.5))
        throw NoEquilibrium("terminal voltage magnitude " + std::to_string(mag) +
                            " outside the accepted (0.5, 1.5) pu window");
    const Eigen::Vector2d io = -I_dq0;
    if (std::abs(P0 - U_dq0.dot(io)) > 1e-9 ||
        std::abs(Q0 - U_dq0.dot(rot90() * io)) > 1e-9)
        throw DimensionMismatch("operating point P0/Q0 inconsistent with U, I");
}

OperatingPoint solve_operating_point(double P_ref, double QV_ref, PowerRefMode mode,
                                     const LineParams& line, double U_grid) {
    line.validate();
    if (!(U_grid > 0.0))
        throw NoEquilibrium("grid voltage must be positive");

    // Output current through the line: I_out = (1/L_g) gamma(0) (U - U_grid).
    const Eigen::Matrix2d G = gamma_static(line.tau) / line.L_g;
    const Eigen::Vector2d ug(U_grid, 0.0);
    const Eigen::Matrix2d J = rot90();

    const auto residual = [&](const Eigen::Vector2d& u) {
        const Eigen::Vector2d io = G * (u - ug);
        Eigen::Vector2d r;
        r.x() = u.dot(io) - P_ref;
        if (mode == PowerRefMode::PQ)
            r.y() = u.dot(J * io) - QV_ref;
        else
            r.y() = u.norm() - QV_ref;
        return r;
    };

    Eigen::Vector2d u(U_grid, 0.0);
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        const Eigen::Vector2d r = residual(u);
        if (r.norm() < 1e-10) {
            converged = true;
            break;
        }
        const Eigen::Vector2d io = G * (u - ug);
        Eigen::Matrix2d jac;
        // d(P)/du = io^T + u^T G
        jac.row(0) = io.transpose() + u.transpose() * G;
        if (mode == PowerRefMode::PQ)
            jac.row(1) = (J * io).transpose() + u.transpose() * J * G;
        else
            jac.row(1) = u.norm() > 0 ? (u / u.norm()).transpose().eval()
                                      : Eigen::RowVector2d(1.0, 0.0);
        Eigen::PartialPivLU<Eigen::Matrix2d> lu(jac);
        if (!(lu.rcond() > 1e-14))
            throw NoEquilibrium("power-flow Jacobian singular (at the transfer limit)");
        Eigen::Vector2d du = lu.solve(-r);
        // Damp large Newton steps; equilibria live near 1 pu.
        if (du.norm() > 0.5)
            du *= 0.5 / du.norm();
        u += du;
        if (!u.allFinite() || u.norm() > 10.0 || u.norm() < 1e-6)
            throw NoEquilibrium("Newton iteration diverged");
    }
    if (!converged)
        throw NoEquilibrium("no power-flow solution within 50 Newton iterations");

    const Eigen::Vector2d i_into = -G * (u - ug);
    return OperatingPoint::from_terminal(u, i_into);
}

} // namespace gridformer
