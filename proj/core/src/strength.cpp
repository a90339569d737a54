#include "gridformer/strength.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "gridformer/parallel.hpp"
#include "gridformer/svd.hpp"

namespace gridformer {

namespace {

using Complex = std::complex<double>;

Eigen::MatrixXcd kron_with_2x2(const Eigen::MatrixXd& A, const Eigen::Matrix2cd& g) {
    Eigen::MatrixXcd out(2 * A.rows(), 2 * A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block<2, 2>(2 * i, 2 * j) = A(i, j) * g;
    return out;
}

Eigen::MatrixXcd device_blockdiag(const std::vector<StateSpaceModel>& devices,
                                  double omega) {
    Eigen::MatrixXcd out =
        Eigen::MatrixXcd::Zero(2 * static_cast<Eigen::Index>(devices.size()),
                               2 * static_cast<Eigen::Index>(devices.size()));
    for (std::size_t i = 0; i < devices.size(); ++i)
        out.block<2, 2>(2 * static_cast<Eigen::Index>(i),
                        2 * static_cast<Eigen::Index>(i)) =
            eval_at(devices[i], {0.0, omega});
    return out;
}

double sigma_max_device(const std::vector<StateSpaceModel>& devices, double omega) {
    double worst = 0.0;
    for (const auto& dev : devices)
        worst = std::max(worst, sigma_max(eval_at(dev, {0.0, omega})));
    return worst;
}

StrengthCurve min_curve(CurveKind kind, const FrequencyGrid& grid,
                        std::vector<double> values,
                        const std::function<double(double)>& eval) {
    // Curves carry max-peak metadata regardless of whether the metric's
    // interesting extremum is a minimum.
    return make_curve(kind, grid, std::move(values), eval);
}

} // namespace

std::vector<BoundCheck> make_bound_checks(const FrequencyGrid& grid,
                                          const std::vector<double>& lhs,
                                          const std::vector<double>& rhs) {
    if (lhs.size() != grid.size() || rhs.size() != grid.size())
        throw DimensionMismatch("bound check arrays must match the grid");
    std::vector<BoundCheck> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i].omega = grid[i];
        out[i].lhs = lhs[i];
        out[i].rhs = rhs[i];
        out[i].slack = lhs[i] - rhs[i];
        out[i].holds = out[i].slack >= -1e-10;
    }
    return out;
}

StrengthCurve system_strength(const std::vector<StateSpaceModel>& devices,
                              const ScaledGridOperator& netop,
                              const FrequencyGrid& grid) {
    std::vector<double> values(grid.size());
    std::vector<double> mismatch(grid.size(), 0.0);
    parallel_for(grid.size(), [&](std::size_t i) {
        const Eigen::MatrixXcd Y = closed_loop_admittance(devices, netop, grid[i]);
        const double k1 = sigma_min(Y);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Y);
        if (lu.rcond() > 1e-12) {
            const double k2 = 1.0 / sigma_max(Eigen::MatrixXcd(lu.inverse()));
            mismatch[i] = std::abs(k1 - k2);
        }
        values[i] = k1;
    });
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (mismatch[i] > 1e-9 * std::max(1.0, values[i]))
            throw Error("system_strength: dual kappa routes disagree at omega = " +
                        std::to_string(grid[i]));
    return min_curve(CurveKind::Kappa, grid, std::move(values), [&](double w) {
        return sigma_min(closed_loop_admittance(devices, netop, w));
    });
}

StrengthCurve grid_strength(const ScaledGridOperator& netop, const FrequencyGrid& grid) {
    const double tau0 = netop.tau0();
    const double w0 = netop.network().omega0();
    const auto eval = [&](double w) {
        const Eigen::MatrixXcd Y = netop.eval(w);
        // gamma_0^{-1} in closed form
        const Complex z = Complex(0.0, w) / w0 + tau0;
        Eigen::Matrix2cd ginv;
        ginv << z, Complex(-1.0, 0.0), Complex(1.0, 0.0), z;
        Eigen::MatrixXcd compensated(Y.rows(), Y.cols());
        for (Eigen::Index i = 0; i < Y.rows() / 2; ++i)
            for (Eigen::Index j = 0; j < Y.cols() / 2; ++j)
                compensated.block<2, 2>(2 * i, 2 * j) =
                    Y.block<2, 2>(2 * i, 2 * j) * ginv;
        return sigma_min(compensated);
    };
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { values[i] = eval(grid[i]); });
    return min_curve(CurveKind::Alpha, grid, std::move(values), eval);
}

std::vector<StrengthCurve> bus_strength(const std::vector<StateSpaceModel>& devices,
                                        const ScaledGridOperator& netop,
                                        const FrequencyGrid& grid) {
    const int n = netop.network().n_devices();
    const auto kappa_i_at = [&](double w) {
        const Eigen::MatrixXcd Z = closed_loop_impedance(devices, netop, w);
        std::vector<double> out(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            double row = 0.0, col = 0.0;
            for (int j = 0; j < n; ++j) {
                row += sigma_max(Z.block<2, 2>(2 * i, 2 * j));
                col += sigma_max(Z.block<2, 2>(2 * j, 2 * i));
            }
            out[static_cast<std::size_t>(i)] = 1.0 / std::max(row, col);
        }
        return out;
    };

    std::vector<std::vector<double>> values(static_cast<std::size_t>(n),
                                            std::vector<double>(grid.size()));
    parallel_for(grid.size(), [&](std::size_t k) {
        const auto at = kappa_i_at(grid[k]);
        for (int i = 0; i < n; ++i)
            values[static_cast<std::size_t>(i)][k] = at[static_cast<std::size_t>(i)];
    });

    std::vector<StrengthCurve> curves;
    curves.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        curves.push_back(min_curve(
            CurveKind::Bus, grid, std::move(values[static_cast<std::size_t>(i)]),
            [&, i](double w) { return kappa_i_at(w)[static_cast<std::size_t>(i)]; }));
    }
    return curves;
}

StrengthCurve passivity_margin(const std::vector<StateSpaceModel>& devices,
                               const ScaledGridOperator& netop,
                               const FrequencyGrid& grid) {
    const auto eval = [&](double w) {
        const Eigen::MatrixXcd Y = closed_loop_admittance(devices, netop, w);
        const Eigen::MatrixXcd herm = 0.5 * (Y + Y.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    };
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { values[i] = eval(grid[i]); });
    StrengthCurve curve{grid, std::move(values), CurveKind::Passivity, 0.0, 0.0, 0.0};
    curve.dc = curve.values.front();
    const std::size_t k = static_cast<std::size_t>(
        std::max_element(curve.values.begin(), curve.values.end()) -
        curve.values.begin());
    curve.peak_omega = grid[k];
    curve.peak_value = curve.values[k];
    return curve;
}

std::vector<double> escr(const NetworkModel& net) {
    const Eigen::MatrixXd B_red =
        kron_reduce(static_b_matrix(net), net.interior_buses());
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B_red);
    if (!(lu.rcond() > 1e-12))
        throw SingularBMatrix("static susceptance matrix is singular");
    const Eigen::MatrixXd Z = lu.inverse();
    std::vector<double> out(static_cast<std::size_t>(net.n_devices()));
    for (int i = 0; i < net.n_devices(); ++i) {
        double denom = 0.0;
        for (int j = 0; j < net.n_devices(); ++j)
            denom += net.capacities()[static_cast<std::size_t>(j)] * std::abs(Z(i, j));
        out[static_cast<std::size_t>(i)] = 1.0 / denom;
    }
    return out;
}

double gscr(const NetworkModel& net) {
    const Eigen::MatrixXd B_red =
        kron_reduce(static_b_matrix(net), net.interior_buses());
    Eigen::VectorXd s_inv_sqrt(net.n_devices());
    for (int i = 0; i < net.n_devices(); ++i)
        s_inv_sqrt(i) =
            1.0 / std::sqrt(net.capacities()[static_cast<std::size_t>(i)]);
    Eigen::MatrixXd sym = s_inv_sqrt.asDiagonal() * B_red * s_inv_sqrt.asDiagonal();
    sym = 0.5 * (sym + sym.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

namespace {

// Per-frequency quantities shared by the added-device strength and the
// enhancement bound chains.
struct AddedContext {
    Eigen::MatrixXd B_n;    // retained scaled block
    Eigen::VectorXd b;      // coupling column
    double beta = 0.0;      // scaled self-susceptance of the new bus
    Eigen::MatrixXd rank1;  // b b^T / beta
    double tau = 0.0;
    double w0 = 0.0;
    const std::vector<StateSpaceModel>* base_models = nullptr;
    const StateSpaceModel* extra_model = nullptr;
    const StateSpaceModel* extra_sv = nullptr;
};

struct AddedPoint {
    double kappa = 0.0;
    double alpha = 0.0;
    double fi = 0.0;
    double kappa_extra = 0.0;
    double bus_rhs = 0.0; // Eq.-chain lower bound for kappa_extra
};

AddedPoint eval_added_point(const AddedContext& ctx, double w) {
    const int n = static_cast<int>(ctx.B_n.rows());
    const Eigen::Matrix2cd g = gamma_at(ctx.tau, ctx.w0, {0.0, w});
    const Eigen::Matrix2cd Sv = eval_at(*ctx.extra_sv, {0.0, w});
    const Eigen::Matrix2cd Svg = Sv * g;
    const Eigen::Matrix2cd I2 = Eigen::Matrix2cd::Identity();

    AddedPoint out;
    out.fi = sigma_max(Sv);

    const Eigen::MatrixXcd Ygrid_corr =
        kron_with_2x2(ctx.B_n, g) - kron_with_2x2(ctx.rank1, Svg);
    Eigen::MatrixXcd Ycl = Ygrid_corr + device_blockdiag(*ctx.base_models, w);
    out.kappa = sigma_min(Ycl);

    out.alpha =
        sigma_min(kron_with_2x2(ctx.B_n, I2) - kron_with_2x2(ctx.rank1, Sv));

    // Partitioned-inverse route for the strength of the new bus. The
    // coupling blocks keep the signs of the scaled susceptance matrix;
    // A3 is built separately because gamma is not symmetric.
    Eigen::MatrixXcd A1 =
        device_blockdiag(*ctx.base_models, w) + kron_with_2x2(ctx.B_n, g);
    Eigen::MatrixXcd A2(2 * n, 2);
    Eigen::MatrixXcd A3(2, 2 * n);
    for (int j = 0; j < n; ++j) {
        A2.block<2, 2>(2 * j, 0) = ctx.b(j) * g;
        A3.block<2, 2>(0, 2 * j) = ctx.b(j) * g;
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu1(A1);
    if (!(lu1.rcond() > 1e-12))
        throw SingularBlock("retained closed-loop block singular");
    const Eigen::MatrixXcd A1invA2 = lu1.solve(A2);
    const Eigen::Matrix2cd T2 = A3 * A1invA2;

    const Eigen::Matrix2cd Ycl_extra =
        eval_at(*ctx.extra_model, {0.0, w}) + ctx.beta * g - T2;
    const double smin_extra = sigma_min(Ycl_extra);
    if (!(smin_extra > 1e-14))
        throw SingularBlock("added-bus closed-loop block singular");
    const Eigen::MatrixXcd Z_n1 = -A1invA2 * Ycl_extra.inverse();

    double sum_z = 0.0, sum_a = 0.0;
    for (int j = 0; j < n; ++j) {
        sum_z += sigma_max(Z_n1.block<2, 2>(2 * j, 0));
        sum_a += sigma_max(A1invA2.block<2, 2>(2 * j, 0));
    }
    out.kappa_extra = 1.0 / (sum_z + 1.0 / smin_extra);
    out.bus_rhs = (sigma_min(Eigen::Matrix2cd(ctx.beta * g)) / out.fi -
                   sigma_max(T2)) /
                  (sum_a + 1.0);
    return out;
}

AddedContext make_added_context(const SystemModel& base, int extra_interior_bus,
                                const DeviceSpec& extra,
                                const AddedDeviceOptions& opts,
                                StateSpaceModel& extra_model_out,
                                StateSpaceModel& extra_sv_out) {
    if (!base.net.uniform_tau(1e-12))
        throw DimensionMismatch(
            "added-device block formulas require a uniform branch tau");

    const NetworkModel net2 =
        base.net.with_device_bus(extra_interior_bus, extra.capacity);
    const ScaledGridOperator op2(net2);
    const Eigen::MatrixXd& B_full = op2.static_b();
    const int n = base.net.n_devices();

    AddedContext ctx;
    ctx.B_n = B_full.topLeftCorner(n, n);
    ctx.b = B_full.block(0, n, n, 1);
    ctx.beta = B_full(n, n);
    if (!(ctx.beta > 0.0))
        throw SingularBlock("new bus has no coupling to the network");
    ctx.rank1 = ctx.b * ctx.b.transpose() / ctx.beta;
    ctx.tau = base.net.branches().front().tau;
    ctx.w0 = base.net.omega0();

    LineParams line;
    line.L_g = 1.0 / ctx.beta;
    line.tau = ctx.tau;
    line.omega0 = ctx.w0;
    if (extra.arch() == Architecture::None) {
        extra_model_out = StateSpaceModel::zero(2, 2);
    } else {
        const OperatingPoint op = solve_operating_point(
            opts.p_ref, opts.qv_ref, extra.ref_mode(), line, 1.0);
        extra_model_out = build_admittance(extra, op, ctx.w0);
    }
    extra_sv_out = sensitivity(extra_model_out, line);
    return ctx;
}

} // namespace

AddedDeviceResult added_device_strength(const SystemModel& base, int extra_interior_bus,
                                        const DeviceSpec& extra, const FrequencyGrid& grid,
                                        const AddedDeviceOptions& opts) {
    AddedDeviceResult result;
    AddedContext ctx = make_added_context(base, extra_interior_bus, extra, opts,
                                          result.extra_admittance,
                                          result.extra_sensitivity);
    ctx.base_models = &base.models;
    ctx.extra_model = &result.extra_admittance;
    ctx.extra_sv = &result.extra_sensitivity;

    result.beta = ctx.beta;
    result.sigma_min_b_tilde =
        sigma_min((ctx.B_n - ctx.rank1).cast<Complex>());

    std::vector<double> kappa(grid.size()), alpha(grid.size()), bus(grid.size()),
        fi(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const AddedPoint p = eval_added_point(ctx, grid[i]);
        kappa[i] = p.kappa;
        alpha[i] = p.alpha;
        bus[i] = p.kappa_extra;
        fi[i] = p.fi;
    });

    result.kappa = make_curve(CurveKind::Kappa, grid, std::move(kappa), nullptr);
    result.alpha = make_curve(CurveKind::Alpha, grid, std::move(alpha), nullptr);
    result.bus_extra = make_curve(CurveKind::Bus, grid, std::move(bus), nullptr);
    result.fi = make_curve(CurveKind::FI, grid, std::move(fi), [&](double w) {
        return sigma_max(eval_at(result.extra_sensitivity, {0.0, w}));
    });
    return result;
}

std::vector<BoundCheck> check_prop1(const StrengthCurve& kappa, const StrengthCurve& alpha,
                                    const std::vector<StateSpaceModel>& devices,
                                    const ScaledGridOperator& netop) {
    if (kappa.grid.size() != alpha.grid.size())
        throw DimensionMismatch("kappa and alpha must share a grid");
    const double tau0 = netop.tau0();
    const double w0 = netop.network().omega0();
    std::vector<double> rhs(kappa.grid.size());
    for (std::size_t i = 0; i < kappa.grid.size(); ++i) {
        const double w = kappa.grid[i];
        const double sg = sigma_min(gamma_at(tau0, w0, {0.0, w}));
        rhs[i] = sg * alpha.values[i] - sigma_max_device(devices, w);
    }
    return make_bound_checks(kappa.grid, kappa.values, rhs);
}

Prop2Report check_prop2(const SystemModel& base, int extra_interior_bus,
                        const DeviceSpec& extra, const FrequencyGrid& grid,
                        const AddedDeviceOptions& opts) {
    Prop2Report report;
    report.added = added_device_strength(base, extra_interior_bus, extra, grid, opts);

    AddedContext ctx = make_added_context(base, extra_interior_bus, extra, opts,
                                          report.added.extra_admittance,
                                          report.added.extra_sensitivity);
    ctx.base_models = &base.models;
    ctx.extra_model = &report.added.extra_admittance;
    ctx.extra_sv = &report.added.extra_sensitivity;

    const double pre = report.added.sigma_min_b_tilde;
    const double rank1_min = sigma_min(ctx.rank1.cast<Complex>());

    std::vector<double> alpha_rhs(grid.size()), bus_rhs(grid.size());
    report.fi_below_one.resize(grid.size());
    report.alpha_enhanced.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double fi = report.added.fi.values[i];
        alpha_rhs[i] = pre + rank1_min * (1.0 - fi);
        const AddedPoint p = eval_added_point(ctx, grid[i]);
        bus_rhs[i] = p.bus_rhs;
        report.fi_below_one[i] = fi < 1.0;
        report.alpha_enhanced[i] = report.added.alpha.values[i] > pre;
    }
    report.alpha_chain = make_bound_checks(grid, report.added.alpha.values, alpha_rhs);
    report.bus_chain = make_bound_checks(grid, report.added.bus_extra.values, bus_rhs);
    return report;
}

bool closed_loop_stable_at_scr(const DeviceSpec& spec, double scr, double tau,
                               double omega0, double p_ref, double qv_ref) {
    try {
        LineParams line;
        line.L_g = 1.0 / scr;
        line.tau = tau;
        line.omega0 = omega0;
        const OperatingPoint op =
            solve_operating_point(p_ref, qv_ref, spec.ref_mode(), line, 1.0);
        const StateSpaceModel y = build_admittance(spec, op, omega0);
        return is_stable(sensitivity(y, line));
    } catch (const NoEquilibrium&) {
        return false;
    }
}

CscrResult compute_cscr(const DeviceSpec& spec, double tau, double omega0,
                        double p_ref, double qv_ref) {
    const double lo0 = 0.1, hi0 = 10.0;
    const bool stable_hi = closed_loop_stable_at_scr(spec, hi0, tau, omega0, p_ref, qv_ref);
    const bool stable_lo = closed_loop_stable_at_scr(spec, lo0, tau, omega0, p_ref, qv_ref);
    CscrResult result;
    if (stable_lo && stable_hi) {
        result.stable_everywhere = true;
        return result;
    }
    if (!stable_hi)
        return result; // no stable end; boundary not bracketed
    double lo = lo0, hi = hi0;
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (closed_loop_stable_at_scr(spec, mid, tau, omega0, p_ref, qv_ref))
            hi = mid;
        else
            lo = mid;
    }
    result.found = true;
    result.cscr = 0.5 * (lo + hi);
    return result;
}

std::string to_string(StrengthClass c) {
    switch (c) {
    case StrengthClass::VeryWeak: return "very_weak";
    case StrengthClass::Weak: return "weak";
    case StrengthClass::Strong: return "strong";
    }
    return "strong";
}

StrengthReport compute_strength_report(const SystemModel& sys, const FrequencyGrid& grid,
                                       const StrengthThresholds& thresholds) {
    const ScaledGridOperator netop(sys.net);
    StrengthReport report{
        system_strength(sys.models, netop, grid),
        grid_strength(netop, grid),
        passivity_margin(sys.models, netop, grid),
        bus_strength(sys.models, netop, grid),
        0.0,
        0.0,
        StrengthClass::Strong,
        escr(sys.net),
        gscr(sys.net),
        std::nullopt,
    };

    // Worst frequency: refined minimum of kappa.
    const auto kmin_it =
        std::min_element(report.kappa.values.begin(), report.kappa.values.end());
    const std::size_t k =
        static_cast<std::size_t>(kmin_it - report.kappa.values.begin());
    report.worst_omega = grid[k];
    report.kappa_min = *kmin_it;
    {
        const double lo = grid[k > 0 ? k - 1 : k];
        const double hi = grid[k + 1 < grid.size() ? k + 1 : k];
        if (hi > lo) {
            const PeakEstimate dip = refine_peak(
                [&](double w) {
                    return -sigma_min(closed_loop_admittance(sys.models, netop, w));
                },
                lo, hi);
            if (-dip.value < report.kappa_min) {
                report.kappa_min = -dip.value;
                report.worst_omega = dip.omega;
            }
        }
    }

    report.classification = report.kappa_min < thresholds.very_weak
                                ? StrengthClass::VeryWeak
                                : (report.kappa_min < thresholds.weak
                                       ? StrengthClass::Weak
                                       : StrengthClass::Strong);

    // Remark-1 self-check for homogeneous devices on a uniform-tau grid.
    const auto models_equal = [&] {
        for (std::size_t i = 1; i < sys.models.size(); ++i) {
            const auto& a = sys.models[0];
            const auto& b = sys.models[i];
            if (a.n_x() != b.n_x())
                return false;
            if ((a.A() - b.A()).cwiseAbs().maxCoeff() > 1e-12 ||
                (a.B() - b.B()).cwiseAbs().maxCoeff() > 1e-12 ||
                (a.C() - b.C()).cwiseAbs().maxCoeff() > 1e-12 ||
                (a.D() - b.D()).cwiseAbs().maxCoeff() > 1e-12)
                return false;
        }
        return true;
    };
    if (netop.uniform() && !sys.models.empty() && models_equal()) {
        const std::vector<double> sigmas =
            singular_values(netop.static_b().cast<Complex>());
        const double tau = sys.net.branches().front().tau;
        double max_dev = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double w = grid[i];
            const Eigen::Matrix2cd y = eval_at(sys.models[0], {0.0, w});
            const Eigen::Matrix2cd g = gamma_at(tau, sys.net.omega0(), {0.0, w});
            double best = std::numeric_limits<double>::infinity();
            for (double s : sigmas)
                best = std::min(best, sigma_min(Eigen::Matrix2cd(y + s * g)));
            max_dev = std::max(max_dev, std::abs(best - report.kappa.values[i]));
        }
        report.remark1_max_dev = max_dev;
    }
    return report;
}

std::vector<int> weak_bus_ranking(const StrengthReport& report, double omega) {
    const FrequencyGrid& grid = report.kappa.grid;
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = std::abs(std::log(grid[i] / omega));
        if (d < best) {
            best = d;
            nearest = i;
        }
    }
    std::vector<int> order(report.bus.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return report.bus[static_cast<std::size_t>(a)].values[nearest] <
               report.bus[static_cast<std::size_t>(b)].values[nearest];
    });
    return order;
}

namespace {

nlohmann::json curve_json(const StrengthCurve& curve) {
    nlohmann::json j;
    j["kind"] = to_string(curve.kind);
    j["omega_rad_s"] = curve.grid.omegas();
    j["value"] = curve.values;
    j["peak"] = {{"omega", curve.peak_omega}, {"value", curve.peak_value}};
    j["dc"] = curve.dc;
    return j;
}

} // namespace

std::string strength_report_json(const StrengthReport& report) {
    nlohmann::json j;
    j["kappa"] = curve_json(report.kappa);
    j["alpha"] = curve_json(report.alpha);
    j["passivity"] = curve_json(report.passivity);
    j["bus"] = nlohmann::json::array();
    for (const auto& curve : report.bus)
        j["bus"].push_back(curve_json(curve));
    j["worst_omega_rad_s"] = report.worst_omega;
    j["kappa_min"] = report.kappa_min;
    j["classification"] = to_string(report.classification);
    j["escr"] = report.escr_values;
    j["gscr"] = report.gscr_value;
    j["weakest_first"] = weak_bus_ranking(report, report.worst_omega);
    if (report.remark1_max_dev)
        j["self_check"] = {{"homogeneous_uniform_tau", true},
                           {"remark1_max_abs_dev", *report.remark1_max_dev}};
    else
        j["self_check"] = {{"homogeneous_uniform_tau", false}};
    return j.dump(2);
}

} // namespace gridformer
