#include "gridformer/devices.hpp"

#include <cmath>

namespace gridformer {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_positive(double v, const char* what) {
    if (!(v > 0.0))
        throw DimensionMismatch(std::string(what) + " must be positive");
}

// Rows of intermediate signals are built over the extended vector [x; u]
// and split into (A, B) afterwards; keeps the frame and sign bookkeeping
// in one place per architecture.
struct RowSpace {
    Eigen::Index nx;
    Eigen::Index nu;

    Eigen::MatrixXd zeros(Eigen::Index rows) const {
        return Eigen::MatrixXd::Zero(rows, nx + nu);
    }
    Eigen::RowVectorXd state(Eigen::Index i) const {
        Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nx + nu);
        r(i) = 1.0;
        return r;
    }
    // 2xN block selecting two adjacent states.
    Eigen::MatrixXd state_pair(Eigen::Index i) const {
        Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2, nx + nu);
        r(0, i) = 1.0;
        r(1, i + 1) = 1.0;
        return r;
    }
    Eigen::MatrixXd input_pair() const {
        Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2, nx + nu);
        r(0, nx) = 1.0;
        r(1, nx + 1) = 1.0;
        return r;
    }
};

StateSpaceModel from_rows(const Eigen::MatrixXd& deriv_rows, const Eigen::MatrixXd& out_rows,
                          Eigen::Index nx, Eigen::Index nu) {
    return {deriv_rows.leftCols(nx), deriv_rows.rightCols(nu),
            out_rows.leftCols(nx), out_rows.rightCols(nu)};
}

// Phase-detector low-pass cutoff as a multiple of the PLL natural
// frequency (the in-loop filter of the SRF-PLL).
constexpr double kPdFilterRatio = 3.0;

// Shared layout for PLL-PQ and PLL-PV; only the second outer loop differs.
StateSpaceModel build_pll_follower(const OperatingPoint& op, double omega0,
                                   double pll_bw_hz, double zeta, double kp_p,
                                   double ki_p, double kp_2, double ki_2,
                                   double tau_i, bool volt_loop) {
    const Eigen::Matrix2d J = rot90();
    const Eigen::Matrix2d R0 = rotation(op.theta0);
    const Eigen::Matrix2d Rm0 = rotation(-op.theta0);
    const Eigen::Vector2d U_l0 = Rm0 * op.U_dq0;
    const Eigen::Vector2d I_ol0 = Rm0 * op.output_current();
    const double u0 = op.voltage_magnitude();
    const double w_pll = kTwoPi * pll_bw_hz;
    const double w_f = kPdFilterRatio * w_pll;

    // states: [theta_pll, x_i, x_f (pd filter), x_P, x_2, c_d, c_q]
    const RowSpace rs{7, 2};
    const Eigen::MatrixXd c_ext = rs.state_pair(5);

    Eigen::MatrixXd U_l = Rm0 * rs.input_pair();
    U_l.col(0) -= J * U_l0; // local frame rotates with the PLL angle

    const Eigen::RowVectorXd pd_raw = U_l.row(1) / u0;
    const Eigen::RowVectorXd pd = rs.state(2); // filtered phase detector
    const Eigen::RowVectorXd dP =
        I_ol0.transpose() * U_l + U_l0.transpose() * c_ext;
    const Eigen::RowVectorXd dQ =
        (J * I_ol0).transpose() * U_l + U_l0.transpose() * J * c_ext;
    const Eigen::RowVectorXd dUmag = U_l.row(0);
    const Eigen::RowVectorXd outer2 = volt_loop ? dUmag : dQ;

    // current references: d-axis from the P loop, q-axis from Q/V with the
    // sign that makes raising I_q lower Q (Q ~= -U0 I_q near alignment)
    const Eigen::RowVectorXd rd = -kp_p * dP + ki_p * rs.state(3);
    const Eigen::RowVectorXd rq = kp_2 * outer2 - ki_2 * rs.state(4);

    // SRF-PLL on the filtered detector: theta' = kp pd + x_i, x_i' = ki pd
    Eigen::MatrixXd deriv = rs.zeros(7);
    deriv.row(0) = 2.0 * zeta * w_pll * pd + rs.state(1);
    deriv.row(1) = w_pll * w_pll * pd;
    deriv.row(2) = w_f * (pd_raw - pd);
    deriv.row(3) = -dP;
    deriv.row(4) = -outer2;
    deriv.row(5) = (rd - rs.state(5)) / tau_i;
    deriv.row(6) = (rq - rs.state(6)) / tau_i;

    // dI (into converter) = -R0 (c + J I_ol0 theta_pll)
    Eigen::MatrixXd out = -R0 * c_ext;
    out.col(0) -= R0 * J * I_ol0;

    (void)omega0;
    return from_rows(deriv, out, 7, 2);
}

StateSpaceModel build_vsg(const VsgParams& p, const OperatingPoint& op, double omega0) {
    const Eigen::Matrix2d J = rot90();
    const Eigen::Vector2d U0g = op.U_dq0;
    const Eigen::Vector2d I_out0 = op.output_current();
    const Eigen::Matrix2d Kv = p.virtual_tau * Eigen::Matrix2d::Identity() + J;
    const Eigen::Vector2d E_g0 = U0g + p.virtual_l * Kv * I_out0;

    const bool has_inertia = p.inertia > 0.0;
    const Eigen::Index nx = has_inertia ? 4 : 3;
    // states: [xi_d, xi_q, theta, (omega)] with I_out = xi
    const RowSpace rs{nx, 2};
    const Eigen::MatrixXd xi = rs.state_pair(0);
    const Eigen::MatrixXd dU = rs.input_pair();

    const Eigen::MatrixXd dE = (J * E_g0) * rs.state(2); // constant EMF magnitude
    const Eigen::RowVectorXd dP = I_out0.transpose() * dU + U0g.transpose() * xi;

    Eigen::MatrixXd deriv = rs.zeros(nx);
    deriv.topRows(2) = -omega0 * Kv * xi + (omega0 / p.virtual_l) * (dE - dU);
    if (has_inertia) {
        deriv.row(2) = omega0 * rs.state(3);
        deriv.row(3) = (-dP - p.damping * rs.state(3)) / p.inertia;
    } else {
        deriv.row(2) = -(omega0 / p.damping) * dP;
    }

    const Eigen::MatrixXd out = -xi;
    return from_rows(deriv, out, nx, 2);
}

StateSpaceModel build_voc(const VocParams& p, const OperatingPoint& op, double omega0) {
    const Eigen::Matrix2d J = rot90();
    const Eigen::Vector2d U0g = op.U_dq0;
    const Eigen::Vector2d I_out0 = op.output_current();
    const double u0 = op.voltage_magnitude();
    const Eigen::Matrix2d Kf = p.filter_tau * Eigen::Matrix2d::Identity() + J;
    const Eigen::Vector2d E_g0 = U0g + p.filter_l * Kf * I_out0;
    const Eigen::Vector2d e_hat = E_g0.normalized();

    // states: [xi_d, xi_q, theta_v, e_mag]
    const RowSpace rs{4, 2};
    const Eigen::MatrixXd xi = rs.state_pair(0);
    const Eigen::MatrixXd dU = rs.input_pair();

    const Eigen::MatrixXd dE = (J * E_g0) * rs.state(2) + e_hat * rs.state(3);
    const Eigen::RowVectorXd dP = I_out0.transpose() * dU + U0g.transpose() * xi;
    const Eigen::RowVectorXd dQ =
        (J * I_out0).transpose() * dU + U0g.transpose() * J * xi;

    Eigen::MatrixXd deriv = rs.zeros(4);
    deriv.topRows(2) = -omega0 * Kf * xi + (omega0 / p.filter_l) * (dE - dU);
    deriv.row(2) = -(omega0 * p.eta / (u0 * u0)) * dP;
    deriv.row(3) = p.lambda_a * (-p.k_q * dQ - rs.state(3));

    const Eigen::MatrixXd out = -xi;
    return from_rows(deriv, out, 4, 2);
}

StateSpaceModel build_pll_gfm(const PllGfmParams& p, const OperatingPoint& op,
                              double omega0) {
    const Eigen::Matrix2d J = rot90();
    const Eigen::Matrix2d R0 = rotation(op.theta0);
    const Eigen::Matrix2d Rm0 = rotation(-op.theta0);
    const Eigen::Vector2d U_l0 = Rm0 * op.U_dq0;
    const Eigen::Vector2d I_ol0 = Rm0 * op.output_current();
    const double u0 = op.voltage_magnitude();
    const double w_pll = kTwoPi * p.pll_bw_hz;
    const double w_f = kPdFilterRatio * w_pll;
    const Eigen::Matrix2d Kv = p.virtual_tau * Eigen::Matrix2d::Identity() + J;
    const Eigen::Vector2d E_l0 = U_l0 + (Kv * I_ol0) / p.virtual_y;

    // states: [theta_pll, x_i, x_f, x_P, zeta_d, zeta_q, c_d, c_q]
    const RowSpace rs{8, 2};
    const Eigen::MatrixXd zeta_v = rs.state_pair(4);
    const Eigen::MatrixXd c_ext = rs.state_pair(6);

    Eigen::MatrixXd U_l = Rm0 * rs.input_pair();
    U_l.col(0) -= J * U_l0;

    const Eigen::RowVectorXd pd_raw = U_l.row(1) / u0;
    const Eigen::RowVectorXd pd = rs.state(2);
    const Eigen::RowVectorXd dP =
        I_ol0.transpose() * U_l + U_l0.transpose() * c_ext;
    // power PI adds a phase offset to the EMF inside the PLL frame
    const Eigen::RowVectorXd dPhi = -p.kp_p * dP + p.ki_p * rs.state(3);
    const Eigen::MatrixXd dE_l = (J * E_l0) * dPhi;

    Eigen::MatrixXd deriv = rs.zeros(8);
    deriv.row(0) = 2.0 * p.zeta * w_pll * pd + rs.state(1);
    deriv.row(1) = w_pll * w_pll * pd;
    deriv.row(2) = w_f * (pd_raw - pd);
    deriv.row(3) = -dP;
    deriv.middleRows(4, 2) =
        -omega0 * Kv * zeta_v + omega0 * p.virtual_y * (dE_l - U_l);
    deriv.row(6) = (zeta_v.row(0) - rs.state(6)) / p.tau_i;
    deriv.row(7) = (zeta_v.row(1) - rs.state(7)) / p.tau_i;

    Eigen::MatrixXd out = -R0 * c_ext;
    out.col(0) -= R0 * J * I_ol0;
    return from_rows(deriv, out, 8, 2);
}

} // namespace

std::string to_string(Architecture arch) {
    switch (arch) {
    case Architecture::PllPq: return "pll-pq";
    case Architecture::PllPv: return "pll-pv";
    case Architecture::Vsg: return "vsg";
    case Architecture::Droop: return "droop";
    case Architecture::Voc: return "voc";
    case Architecture::PllGfm: return "pll-gfm";
    case Architecture::None: return "none";
    }
    return "none";
}

Architecture architecture_from_string(const std::string& name) {
    if (name == "pll-pq") return Architecture::PllPq;
    if (name == "pll-pv") return Architecture::PllPv;
    if (name == "vsg") return Architecture::Vsg;
    if (name == "droop") return Architecture::Droop;
    if (name == "voc") return Architecture::Voc;
    if (name == "pll-gfm") return Architecture::PllGfm;
    if (name == "none") return Architecture::None;
    throw UnsupportedArchitecture("unknown architecture '" + name + "'");
}

Architecture DeviceSpec::arch() const {
    struct Visitor {
        Architecture operator()(const PllPqParams&) const { return Architecture::PllPq; }
        Architecture operator()(const PllPvParams&) const { return Architecture::PllPv; }
        Architecture operator()(const VsgParams&) const { return Architecture::Vsg; }
        Architecture operator()(const DroopParams&) const { return Architecture::Droop; }
        Architecture operator()(const VocParams&) const { return Architecture::Voc; }
        Architecture operator()(const PllGfmParams&) const { return Architecture::PllGfm; }
        Architecture operator()(const NoneParams&) const { return Architecture::None; }
    };
    return std::visit(Visitor{}, params);
}

void DeviceSpec::validate() const {
    require_positive(capacity, "device capacity");
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PllPqParams> || std::is_same_v<T, PllPvParams>) {
                require_positive(p.pll_bw_hz, "PLL bandwidth");
                require_positive(p.zeta, "PLL damping");
                require_positive(p.tau_i, "current-loop time constant");
            } else if constexpr (std::is_same_v<T, VsgParams>) {
                if (p.inertia < 0.0)
                    throw DimensionMismatch("VSG inertia must be nonnegative");
                require_positive(p.damping, "VSG damping");
                require_positive(p.virtual_l, "virtual inductance");
                require_positive(p.virtual_tau, "virtual impedance R/L ratio");
            } else if constexpr (std::is_same_v<T, DroopParams>) {
                require_positive(p.damping, "droop gain 1/K_P");
                require_positive(p.virtual_l, "virtual inductance");
                require_positive(p.virtual_tau, "virtual impedance R/L ratio");
            } else if constexpr (std::is_same_v<T, VocParams>) {
                require_positive(p.eta, "VOC synchronization gain");
                require_positive(p.lambda_a, "VOC amplitude gain");
                if (p.k_q < 0.0)
                    throw DimensionMismatch("VOC reactive droop must be nonnegative");
                require_positive(p.filter_l, "VOC filter inductance");
                require_positive(p.filter_tau, "VOC filter R/L ratio");
            } else if constexpr (std::is_same_v<T, PllGfmParams>) {
                require_positive(p.virtual_y, "virtual admittance");
                require_positive(p.virtual_tau, "virtual admittance R/L ratio");
                require_positive(p.pll_bw_hz, "PLL bandwidth");
                require_positive(p.zeta, "PLL damping");
                require_positive(p.tau_i, "current-loop time constant");
            }
        },
        params);
}

PowerRefMode DeviceSpec::ref_mode() const {
    return arch() == Architecture::PllPq ? PowerRefMode::PQ : PowerRefMode::PV;
}

StateSpaceModel pll_block(double pll_bw_hz, double zeta, double U0) {
    require_positive(pll_bw_hz, "PLL bandwidth");
    require_positive(U0, "phase-detector voltage");
    const double w = kTwoPi * pll_bw_hz;
    Eigen::Matrix2d A;
    A << 0.0, 1.0, 0.0, -2.0 * zeta * w;
    Eigen::Vector2d B(0.0, w * w / U0);
    Eigen::RowVector2d C(1.0, 0.0);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(1, 1);
    return {A, B, C, D};
}

StateSpaceModel build_admittance(const DeviceSpec& spec, const OperatingPoint& op,
                                 double omega0) {
    spec.validate();
    op.validate();
    require_positive(omega0, "nominal frequency");

    switch (spec.arch()) {
    case Architecture::None:
        return StateSpaceModel::zero(2, 2);
    case Architecture::PllPq: {
        const auto& p = std::get<PllPqParams>(spec.params);
        return build_pll_follower(op, omega0, p.pll_bw_hz, p.zeta, p.kp_p, p.ki_p,
                                  p.kp_q, p.ki_q, p.tau_i, /*volt_loop=*/false);
    }
    case Architecture::PllPv: {
        const auto& p = std::get<PllPvParams>(spec.params);
        return build_pll_follower(op, omega0, p.pll_bw_hz, p.zeta, p.kp_p, p.ki_p,
                                  p.kp_v, p.ki_v, p.tau_i, /*volt_loop=*/true);
    }
    case Architecture::Vsg:
        return build_vsg(std::get<VsgParams>(spec.params), op, omega0);
    case Architecture::Droop: {
        const auto& p = std::get<DroopParams>(spec.params);
        VsgParams v;
        v.inertia = 0.0;
        v.damping = p.damping;
        v.virtual_l = p.virtual_l;
        v.virtual_tau = p.virtual_tau;
        return build_vsg(v, op, omega0);
    }
    case Architecture::Voc:
        return build_voc(std::get<VocParams>(spec.params), op, omega0);
    case Architecture::PllGfm:
        return build_pll_gfm(std::get<PllGfmParams>(spec.params), op, omega0);
    }
    throw UnsupportedArchitecture("unhandled architecture tag");
}

} // namespace gridformer
