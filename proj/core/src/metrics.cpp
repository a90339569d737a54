#include "gridformer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gridformer/parallel.hpp"
#include "gridformer/svd.hpp"

namespace gridformer {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::string to_string(CurveKind kind) {
    switch (kind) {
    case CurveKind::FI: return "fi";
    case CurveKind::IN: return "in";
    case CurveKind::FS: return "fs";
    case CurveKind::Kappa: return "kappa";
    case CurveKind::Alpha: return "alpha";
    case CurveKind::Bus: return "bus";
    case CurveKind::Passivity: return "passivity";
    }
    return "curve";
}

double StrengthCurve::min_value() const {
    return *std::min_element(values.begin(), values.end());
}

double StrengthCurve::max_value() const {
    return *std::max_element(values.begin(), values.end());
}

StrengthCurve make_curve(CurveKind kind, const FrequencyGrid& grid,
                         std::vector<double> values,
                         const std::function<double(double)>& eval) {
    StrengthCurve curve{grid, std::move(values), kind, 0.0, 0.0, 0.0};
    if (curve.values.size() != grid.size())
        throw DimensionMismatch("curve values must match the grid");
    curve.dc = curve.values.front();
    const std::size_t k = static_cast<std::size_t>(
        std::max_element(curve.values.begin(), curve.values.end()) -
        curve.values.begin());
    curve.peak_omega = grid[k];
    curve.peak_value = curve.values[k];
    if (eval) {
        const double lo = grid[k > 0 ? k - 1 : k];
        const double hi = grid[k + 1 < grid.size() ? k + 1 : k];
        if (hi > lo) {
            PeakEstimate p = refine_peak(eval, lo, hi);
            if (p.value > curve.peak_value) {
                curve.peak_value = p.value;
                curve.peak_omega = p.omega;
            }
        }
    }
    return curve;
}

StateSpaceModel sensitivity(const StateSpaceModel& Y_de, const LineParams& line) {
    line.validate();
    if (!(line.tau >= 0.0))
        throw NonpositiveTau("line R/L ratio must be nonnegative");
    if (Y_de.n_u() != 2 || Y_de.n_y() != 2)
        throw DimensionMismatch("device admittance must be 2x2");

    const double w0 = line.omega0;
    const Eigen::Matrix2d K = line.tau * Eigen::Matrix2d::Identity() + rot90();
    const Eigen::Index n = Y_de.n_x();

    if (Y_de.strictly_proper()) {
        // Series connection: the line current equals the device current,
        // so the line state is slaved to the device states and the
        // terminal voltage follows from the differentiated current
        // balance. M = w0 I + L_g C B must be invertible.
        const Eigen::MatrixXd& Ay = Y_de.A();
        const Eigen::MatrixXd& By = Y_de.B();
        const Eigen::MatrixXd& Cy = Y_de.C();
        Eigen::Matrix2d M = w0 * Eigen::Matrix2d::Identity() + line.L_g * Cy * By;
        Eigen::PartialPivLU<Eigen::Matrix2d> lu(M);
        if (!(lu.rcond() > 1e-12))
            throw IllPosedLoop("sensitivity node matrix is singular");
        const Eigen::Matrix2d Minv = lu.inverse();
        const Eigen::MatrixXd W = line.L_g * (Cy * Ay + w0 * K * Cy);

        Eigen::MatrixXd A = Ay - By * Minv * W;
        Eigen::MatrixXd B = w0 * By * Minv;
        Eigen::MatrixXd C = -Minv * W;
        Eigen::Matrix2d D = w0 * Minv;
        return {A, B, C, D};
    }

    // Device with direct feedthrough: the terminal voltage resolves
    // algebraically from D_y, and the line keeps its own two states.
    Eigen::PartialPivLU<Eigen::Matrix2d> lu(Eigen::Matrix2d(Y_de.D()));
    if (!(lu.rcond() > 1e-12))
        throw IllPosedLoop("device feedthrough is singular but nonzero");
    const Eigen::Matrix2d Dinv = lu.inverse();

    // states: [nu (line current), x_y]; dU = Dinv (nu / L_g - C x)
    const Eigen::MatrixXd du_nu = Dinv / line.L_g;
    const Eigen::MatrixXd du_x = -Dinv * Y_de.C();

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 + n, 2 + n);
    A.topLeftCorner(2, 2) = -w0 * K - w0 * du_nu;
    A.topRightCorner(2, n) = -w0 * du_x;
    A.bottomLeftCorner(n, 2) = Y_de.B() * du_nu;
    A.bottomRightCorner(n, n) = Y_de.A() + Y_de.B() * du_x;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 + n, 2);
    B.topRows(2) = w0 * Eigen::Matrix2d::Identity();
    Eigen::MatrixXd C(2, 2 + n);
    C.leftCols(2) = du_nu;
    C.rightCols(n) = du_x;
    return {A, B, C, Eigen::Matrix2d::Zero()};
}

StrengthCurve forming_index(const StateSpaceModel& S_v, const FrequencyGrid& grid) {
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        values[i] = sigma_max(eval_at(S_v, {0.0, grid[i]}));
    });
    return make_curve(CurveKind::FI, grid, std::move(values), [&](double w) {
        return sigma_max(eval_at(S_v, {0.0, w}));
    });
}

GfmVerdict classify_gfm(const StrengthCurve& curve, double f_lo_hz, double f_hi_hz) {
    if (curve.kind != CurveKind::FI)
        throw DimensionMismatch("classify_gfm needs a Forming Index curve");
    const double w_lo = f_lo_hz * kTwoPi;
    const double w_hi = f_hi_hz * kTwoPi;
    if (w_lo < curve.grid.min_omega() || w_hi > curve.grid.max_omega() || w_lo >= w_hi)
        throw BandOutsideGrid("classification band must lie inside the sweep");

    GfmVerdict verdict;
    verdict.gfm = true;
    verdict.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        const double w = curve.grid[i];
        if (w < w_lo || w > w_hi)
            continue;
        verdict.margin = std::min(verdict.margin, std::abs(1.0 - curve.values[i]));
        if (!(curve.values[i] < 1.0)) {
            verdict.gfm = false;
            verdict.violation_omegas.push_back(w);
        }
    }
    return verdict;
}

StrengthCurve impedance_norm(const StateSpaceModel& Y_de, const FrequencyGrid& grid) {
    std::vector<double> values(grid.size());
    std::vector<char> singular(grid.size(), 0);
    parallel_for(grid.size(), [&](std::size_t i) {
        const auto sv = singular_values(eval_at(Y_de, {0.0, grid[i]}));
        if (!(sv.back() > 0.0) || sv.front() / sv.back() > 1e12)
            singular[i] = 1;
        else
            values[i] = 1.0 / sv.back();
    });
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (singular[i])
            throw SingularAdmittance("Y_de numerically singular at omega = " +
                                     std::to_string(grid[i]));
    return make_curve(CurveKind::IN, grid, std::move(values), [&](double w) {
        return 1.0 / singular_values(eval_at(Y_de, {0.0, w})).back();
    });
}

StrengthCurve frequency_smoothing(const StateSpaceModel& S_v, const OperatingPoint& op,
                                  const FrequencyGrid& grid) {
    const double u0 = op.voltage_magnitude();
    if (!(u0 > 0.0))
        throw DimensionMismatch("frequency_smoothing needs a nonzero voltage");
    const Eigen::Matrix2cd T =
        (rotation(op.theta0) / u0).cast<std::complex<double>>();
    const auto eval = [&](double w) {
        const Eigen::Matrix2cd m = T * eval_at(S_v, {0.0, w});
        return std::abs(m(1, 1));
    };
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { values[i] = eval(grid[i]); });
    return make_curve(CurveKind::FS, grid, std::move(values), eval);
}

void write_curve_csv(std::ostream& os, const StrengthCurve& curve) {
    os << "omega_rad_s,f_hz,value\n";
    char buf[96];
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        const double w = curve.grid[i];
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", w, w / kTwoPi,
                      curve.values[i]);
        os << buf;
    }
}

} // namespace gridformer
