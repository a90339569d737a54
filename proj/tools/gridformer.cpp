// gridformer: Forming Index and system-strength analysis of power
// converter cases. Subcommands: fi, strength, step, place, cscr.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "gridformer/casefile.hpp"
#include "gridformer/metrics.hpp"
#include "gridformer/placement.hpp"
#include "gridformer/strength.hpp"

namespace gf = gridformer;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit-code contract: 0 ok, 2 parse, 3 numeric, 4 unstable, 5 search
// space, 6 bracket.
enum ExitCode {
    kOk = 0,
    kParseError = 2,
    kNumericError = 3,
    kUnstable = 4,
    kSearchTooLarge = 5,
    kNoBracket = 6,
};

class Manifest {
public:
    Manifest(std::string command, std::string out_dir)
        : command_(std::move(command)), out_dir_(std::move(out_dir)),
          start_(std::chrono::steady_clock::now()) {}

    void set_case_path(const std::string& path) { case_path_ = path; }
    void set_config(json config) { config_ = std::move(config); }
    void add_output(const std::string& path) { outputs_.push_back(path); }

    // Atomic write: temp file then rename.
    void write_file(const std::string& name, const std::string& content) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir_);
        const fs::path target = fs::path(out_dir_) / name;
        const fs::path tmp = target.string() + ".tmp";
        {
            std::ofstream out(tmp);
            if (!out)
                throw gf::Error("cannot write " + tmp.string());
            out << content;
        }
        fs::rename(tmp, target);
        add_output(target.string());
    }

    void finalize() {
        json j;
        j["command"] = command_;
        j["case"] = case_path_ ? json(*case_path_) : json(nullptr);
        j["config"] = config_;
        j["outputs"] = outputs_;
        j["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start_)
                           .count();
        j["version"] = kVersion;
        j["seed"] = 0;
        write_file("manifest.json", j.dump(2));
    }

private:
    std::string command_;
    std::string out_dir_;
    std::optional<std::string> case_path_;
    json config_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

std::string curve_to_string(const gf::StrengthCurve& curve) {
    std::ostringstream os;
    gf::write_curve_csv(os, curve);
    return os.str();
}

std::string complex_matrix_csv(const Eigen::MatrixXcd& m) {
    // row-major, complex entries as re,im pairs
    std::ostringstream os;
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g", m(i, j).real(),
                          m(i, j).imag());
            os << buf;
            if (j + 1 < m.cols())
                os << ",";
        }
        os << "\n";
    }
    return os.str();
}

// Inline single-device options shared by `fi` and `cscr`.
struct InlineSpec {
    std::string arch = "vsg";
    double lg = 0.3;
    double tau = 0.1;
    double f0_hz = 50.0;
    double p0 = 0.5;
    std::optional<double> qv_opt; ///< Q (PQ mode, default 0) or V (default 1)
    // architecture knobs (applied when relevant)
    std::optional<double> fpll, zeta, inertia, damping, lv, kq, yv, tau_i;

    double qv() const {
        if (qv_opt)
            return *qv_opt;
        return spec().ref_mode() == gf::PowerRefMode::PQ ? 0.0 : 1.0;
    }

    gf::DeviceSpec spec() const {
        gf::DeviceSpec s;
        switch (gf::architecture_from_string(arch)) {
        case gf::Architecture::PllPq: {
            gf::PllPqParams p;
            if (fpll) p.pll_bw_hz = *fpll;
            if (zeta) p.zeta = *zeta;
            if (tau_i) p.tau_i = *tau_i;
            s.params = p;
            break;
        }
        case gf::Architecture::PllPv: {
            gf::PllPvParams p;
            if (fpll) p.pll_bw_hz = *fpll;
            if (zeta) p.zeta = *zeta;
            if (tau_i) p.tau_i = *tau_i;
            s.params = p;
            break;
        }
        case gf::Architecture::Vsg: {
            gf::VsgParams p;
            if (inertia) p.inertia = *inertia;
            if (damping) p.damping = *damping;
            if (lv) p.virtual_l = *lv;
            s.params = p;
            break;
        }
        case gf::Architecture::Droop: {
            gf::DroopParams p;
            if (damping) p.damping = *damping;
            if (lv) p.virtual_l = *lv;
            s.params = p;
            break;
        }
        case gf::Architecture::Voc: {
            gf::VocParams p;
            if (kq) p.k_q = *kq;
            if (lv) p.filter_l = *lv;
            s.params = p;
            break;
        }
        case gf::Architecture::PllGfm: {
            gf::PllGfmParams p;
            if (yv) p.virtual_y = *yv;
            if (fpll) p.pll_bw_hz = *fpll;
            if (zeta) p.zeta = *zeta;
            if (tau_i) p.tau_i = *tau_i;
            s.params = p;
            break;
        }
        case gf::Architecture::None:
            s.params = gf::NoneParams{};
            break;
        }
        return s;
    }

    gf::LineParams line() const {
        gf::LineParams l;
        l.L_g = lg;
        l.tau = tau;
        l.omega0 = 2.0 * 3.14159265358979323846 * f0_hz;
        return l;
    }
};

struct SweepParam {
    std::string key;
    double lo = 0.0, hi = 0.0;
    int count = 0;
};

SweepParam parse_sweep_param(const std::string& text) {
    // key=lo:hi:count
    SweepParam sp;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw CLI::ValidationError("--sweep-param expects key=lo:hi:count");
    sp.key = text.substr(0, eq);
    const std::string rest = text.substr(eq + 1);
    const auto c1 = rest.find(':');
    const auto c2 = rest.rfind(':');
    if (c1 == std::string::npos || c2 == c1)
        throw CLI::ValidationError("--sweep-param expects key=lo:hi:count");
    sp.lo = std::stod(rest.substr(0, c1));
    sp.hi = std::stod(rest.substr(c1 + 1, c2 - c1 - 1));
    sp.count = std::stoi(rest.substr(c2 + 1));
    if (sp.count < 1)
        throw CLI::ValidationError("--sweep-param count must be >= 1");
    return sp;
}

void apply_sweep_value(InlineSpec& inl, const std::string& key, double value) {
    if (key == "lg")
        inl.lg = value;
    else if (key == "fpll")
        inl.fpll = value;
    else if (key == "j" || key == "inertia")
        inl.inertia = value;
    else if (key == "d" || key == "damping")
        inl.damping = value;
    else if (key == "lv")
        inl.lv = value;
    else if (key == "kq")
        inl.kq = value;
    else if (key == "yv")
        inl.yv = value;
    else
        throw CLI::ValidationError("unknown sweep parameter '" + key + "'");
}

int run_fi(const std::string& case_path, int device_id, const InlineSpec& inline_spec,
           bool use_case, const std::optional<std::string>& sweep_text,
           double f_min, double f_max, int points, double band_lo, double band_hi,
           const std::string& out_dir) {
    Manifest manifest("fi", out_dir);
    const gf::FrequencyGrid grid = gf::FrequencyGrid::log_space(f_min, f_max, points);

    struct Run {
        std::string tag;
        gf::DeviceSpec spec;
        gf::LineParams line;
        gf::OperatingPoint op;
    };
    std::vector<Run> runs;

    if (use_case) {
        const gf::CaseFile cf = gf::CaseFile::load(case_path);
        manifest.set_case_path(case_path);
        const gf::SystemModel sys = cf.system();
        const int k = cf.internal_index(device_id);
        if (k >= sys.net.n_devices())
            throw gf::InvalidCaseFile("--device must name a device bus");
        Run run;
        run.tag = "bus" + std::to_string(device_id);
        run.spec = sys.devices[static_cast<std::size_t>(k)].spec;
        run.line = gf::thevenin_line(sys.net, k);
        run.op = sys.ops[static_cast<std::size_t>(k)];
        runs.push_back(run);
    } else {
        std::vector<InlineSpec> variants;
        if (sweep_text) {
            const SweepParam sp = parse_sweep_param(*sweep_text);
            for (int i = 0; i < sp.count; ++i) {
                InlineSpec v = inline_spec;
                const double value =
                    sp.count == 1
                        ? sp.lo
                        : sp.lo + (sp.hi - sp.lo) * static_cast<double>(i) /
                                      (sp.count - 1);
                apply_sweep_value(v, sp.key, value);
                variants.push_back(v);
            }
        } else {
            variants.push_back(inline_spec);
        }
        for (std::size_t i = 0; i < variants.size(); ++i) {
            const InlineSpec& v = variants[i];
            Run run;
            run.tag = variants.size() == 1 ? v.arch
                                           : v.arch + "_" + std::to_string(i + 1);
            run.spec = v.spec();
            run.line = v.line();
            if (run.spec.arch() == gf::Architecture::None)
                run.op = gf::OperatingPoint{};
            else
                run.op = gf::solve_operating_point(v.p0, v.qv(), run.spec.ref_mode(),
                                                   run.line, 1.0);
            runs.push_back(run);
        }
    }

    json config{{"f_min_hz", f_min}, {"f_max_hz", f_max},   {"points", points},
                {"band_lo_hz", band_lo}, {"band_hi_hz", band_hi}};
    manifest.set_config(config);

    for (const Run& run : runs) {
        const gf::StateSpaceModel y =
            gf::build_admittance(run.spec, run.op, run.line.omega0);
        const gf::StateSpaceModel sv = gf::sensitivity(y, run.line);
        const gf::StrengthCurve fi = gf::forming_index(sv, grid);
        const gf::GfmVerdict verdict = gf::classify_gfm(fi, band_lo, band_hi);

        manifest.write_file("fi_" + run.tag + ".csv", curve_to_string(fi));

        std::cout << run.tag << ": peak FI " << fi.peak_value << " at "
                  << fi.peak_omega / (2.0 * 3.14159265358979323846) << " Hz";
        if (gf::is_stable(sv)) {
            const gf::HinfResult margin = gf::hinf_norm(sv, grid);
            std::cout << ", robust margin (hinf) " << margin.value;
        } else {
            std::cout << ", closed loop UNSTABLE (no hinf margin)";
        }
        std::cout << ", verdict " << (verdict.gfm ? "GFM" : "GFL") << "\n";
        if (!verdict.violation_omegas.empty() && verdict.violation_omegas.size() < 8) {
            std::cout << "  FI >= 1 at";
            for (double w : verdict.violation_omegas)
                std::cout << " " << w / (2.0 * 3.14159265358979323846) << "Hz";
            std::cout << "\n";
        }
    }
    manifest.finalize();
    return kOk;
}

int run_strength(const std::string& case_path, bool dump_matrices,
                 const std::string& out_dir) {
    Manifest manifest("strength", out_dir);
    const gf::CaseFile cf = gf::CaseFile::load(case_path);
    manifest.set_case_path(case_path);
    manifest.set_config({{"dump_matrices", dump_matrices}});

    const gf::SystemModel sys = cf.system();
    const gf::FrequencyGrid grid = cf.sweep_grid();
    const gf::StrengthReport report = gf::compute_strength_report(sys, grid);

    manifest.write_file("strength_report.json", gf::strength_report_json(report));
    manifest.write_file("kappa.csv", curve_to_string(report.kappa));
    manifest.write_file("alpha.csv", curve_to_string(report.alpha));
    manifest.write_file("passivity.csv", curve_to_string(report.passivity));
    for (std::size_t i = 0; i < report.bus.size(); ++i)
        manifest.write_file("bus_" + std::to_string(cf.bus_id_of(static_cast<int>(i))) +
                                ".csv",
                            curve_to_string(report.bus[i]));

    if (dump_matrices) {
        const gf::ScaledGridOperator netop(sys.net);
        const Eigen::MatrixXcd Y =
            gf::closed_loop_admittance(sys.models, netop, report.worst_omega);
        const Eigen::MatrixXcd Z =
            gf::closed_loop_impedance(sys.models, netop, report.worst_omega);
        manifest.write_file("y_cl_worst.csv", complex_matrix_csv(Y));
        manifest.write_file("z_cl_worst.csv", complex_matrix_csv(Z));
    }

    std::cout << "system strength: min kappa " << report.kappa_min << " at "
              << report.worst_omega / (2.0 * 3.14159265358979323846)
              << " Hz -> " << gf::to_string(report.classification) << "\n";
    std::cout << "grid strength alpha: min " << report.alpha.min_value()
              << ", gSCR " << report.gscr_value << "\n";
    std::cout << "weakest buses first:";
    for (int i : gf::weak_bus_ranking(report, report.worst_omega))
        std::cout << " " << cf.bus_id_of(i);
    std::cout << "\n";
    if (report.remark1_max_dev)
        std::cout << "homogeneous self-check max deviation: "
                  << *report.remark1_max_dev << "\n";
    manifest.finalize();
    return kOk;
}

int run_step(const std::string& case_path, int bus_id, double amp, double t_end,
             double dt, const std::string& out_dir) {
    Manifest manifest("step", out_dir);
    const gf::CaseFile cf = gf::CaseFile::load(case_path);
    manifest.set_case_path(case_path);
    manifest.set_config({{"bus", bus_id}, {"amp", amp}, {"t_end", t_end}, {"dt", dt}});

    const gf::SystemModel sys = cf.system();
    const int k = cf.internal_index(bus_id);
    if (k >= sys.net.n_devices())
        throw gf::InvalidCaseFile("--bus must name a device bus");

    const gf::ClosedLoopSs loop = gf::assemble_closed_loop_ss(sys.models, sys.net);
    if (!gf::is_stable(loop.ss))
        throw gf::UnstableModel("closed loop is unstable; no step response");

    // scaled injection for a system-base step of `amp` at the bus
    const int n = sys.net.n_devices();
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(2 * n);
    u0(2 * k) = amp / std::sqrt(sys.net.capacities()[static_cast<std::size_t>(k)]);
    const gf::StepTrajectory traj = gf::step_response(loop.ss, u0, t_end, dt);

    std::ostringstream os;
    os << "t_s";
    for (int i = 0; i < n; ++i)
        os << ",du_norm_bus_" << cf.bus_id_of(i);
    os << "\n";
    char buf[64];
    for (std::size_t s = 0; s < traj.t.size(); ++s) {
        std::snprintf(buf, sizeof buf, "%.9g", traj.t[s]);
        os << buf;
        for (int i = 0; i < n; ++i) {
            // back to physical per-unit voltage
            const double scale =
                1.0 / std::sqrt(sys.net.capacities()[static_cast<std::size_t>(i)]);
            const double norm = scale * traj.y[s].segment<2>(2 * i).norm();
            std::snprintf(buf, sizeof buf, ",%.9g", norm);
            os << buf;
        }
        os << "\n";
    }
    manifest.write_file("step_bus_" + std::to_string(bus_id) + ".csv", os.str());

    std::cout << "step response written (" << traj.t.size() << " samples)\n";
    manifest.finalize();
    return kOk;
}

int run_place(const std::string& case_path, const std::vector<int>& candidate_ids,
              double budget, const std::vector<double>& sizes,
              const std::string& method, double p0, double qv,
              const std::string& out_dir) {
    Manifest manifest("place", out_dir);
    const gf::CaseFile cf = gf::CaseFile::load(case_path);
    manifest.set_case_path(case_path);
    manifest.set_config({{"candidates", candidate_ids},
                         {"budget", budget},
                         {"sizes", sizes},
                         {"method", method}});

    gf::PlacementProblem problem{cf.system(), {}, gf::DeviceSpec{}, sizes,
                                 budget,      p0, qv};
    for (int id : candidate_ids)
        problem.candidates.push_back(cf.internal_index(id));
    problem.device.params = gf::VsgParams{};

    const gf::FrequencyGrid grid = cf.sweep_grid();
    const gf::PlacementResult result = method == "greedy"
                                           ? gf::place_greedy(problem, grid)
                                           : gf::place_exhaustive(problem, grid);

    // single-bus ranking table: full first size level at each candidate
    std::cout << "bus   kappa_with_one_unit\n";
    struct Row {
        int id;
        double value;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < candidate_ids.size(); ++i) {
        std::map<int, double> one{{problem.candidates[i], sizes.front()}};
        rows.push_back({candidate_ids[i], gf::placement_objective(problem, one, grid)});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.value > b.value; });
    for (const Row& r : rows)
        std::cout << r.id << "    " << r.value << "\n";

    json out = json::parse(gf::placement_result_json(result));
    json assignment_ids = json::object();
    for (const auto& [bus, cap] : result.assignment)
        assignment_ids[std::to_string(cf.bus_id_of(bus))] = cap;
    out["assignment"] = assignment_ids;
    manifest.write_file("placement.json", out.dump(2));

    std::cout << "baseline kappa " << result.baseline << ", achieved "
              << result.achieved << " (" << result.evaluations << " evaluations)\n";
    std::cout << "assignment:";
    for (const auto& [bus, cap] : result.assignment)
        std::cout << " bus " << cf.bus_id_of(bus) << " -> " << cap << " pu";
    if (result.assignment.empty())
        std::cout << " (none)";
    std::cout << "\n";
    manifest.finalize();
    return kOk;
}

int run_cscr(const InlineSpec& inline_spec, const std::optional<std::string>& case_path,
             const std::string& out_dir) {
    Manifest manifest("cscr", out_dir);
    manifest.set_config({{"arch", inline_spec.arch},
                         {"tau", inline_spec.tau},
                         {"p0", inline_spec.p0}});
    const gf::DeviceSpec spec = inline_spec.spec();
    const double w0 = 2.0 * 3.14159265358979323846 * inline_spec.f0_hz;
    const gf::CscrResult result =
        gf::compute_cscr(spec, inline_spec.tau, w0, inline_spec.p0, inline_spec.qv());

    if (!result.found) {
        std::cout << "CSCR boundary not found in SCR bracket [0.1, 10]; "
                  << (result.stable_everywhere ? "stable everywhere"
                                               : "no stable endpoint")
                  << "\n";
        manifest.finalize();
        throw gf::NoBracket("no stability boundary inside the bracket");
    }
    std::cout << "CSCR = " << result.cscr << "\n";
    if (case_path) {
        const gf::CaseFile cf = gf::CaseFile::load(*case_path);
        manifest.set_case_path(*case_path);
        const double g = gf::gscr(cf.network());
        std::cout << "gSCR = " << g << ", stability margin (gSCR-CSCR)/CSCR = "
                  << (g - result.cscr) / result.cscr << "\n";
    }
    manifest.finalize();
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forming Index and system strength analysis for power converters"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir = ".";
    app.add_option("--out", out_dir, "output directory")->capture_default_str();

    // fi ---------------------------------------------------------------
    auto* fi = app.add_subcommand("fi", "Forming Index sweep of one device");
    std::string fi_case;
    int fi_device = -1;
    InlineSpec fi_inline;
    std::optional<std::string> fi_sweep;
    double fi_fmin = 0.05, fi_fmax = 2000.0;
    int fi_points = 500;
    double fi_band_lo = 5.0, fi_band_hi = 200.0;
    fi->add_option("--case", fi_case, "case file (with --device)");
    fi->add_option("--device", fi_device, "device bus id inside the case");
    fi->add_option("--arch", fi_inline.arch,
                   "inline architecture: pll-pq|pll-pv|vsg|droop|voc|pll-gfm|none");
    fi->add_option("--lg", fi_inline.lg, "line inductance (pu)");
    fi->add_option("--tau", fi_inline.tau, "line R/L ratio");
    fi->add_option("--f0", fi_inline.f0_hz, "nominal frequency (Hz)");
    fi->add_option("--p0", fi_inline.p0, "active power dispatch (pu)");
    fi->add_option_function<double>(
        "--qv", [&](double v) { fi_inline.qv_opt = v; }, "Q or V reference");
    double opt_holder;
    fi->add_option_function<double>(
        "--fpll", [&](double v) { fi_inline.fpll = v; }, "PLL bandwidth (Hz)");
    fi->add_option_function<double>(
        "--zeta", [&](double v) { fi_inline.zeta = v; }, "PLL damping");
    fi->add_option_function<double>(
        "--j", [&](double v) { fi_inline.inertia = v; }, "inertia (pu)");
    fi->add_option_function<double>(
        "--d", [&](double v) { fi_inline.damping = v; }, "damping (pu)");
    fi->add_option_function<double>(
        "--lv", [&](double v) { fi_inline.lv = v; }, "virtual/filter inductance (pu)");
    fi->add_option_function<double>(
        "--kq", [&](double v) { fi_inline.kq = v; }, "VOC reactive droop (pu)");
    fi->add_option_function<double>(
        "--yv", [&](double v) { fi_inline.yv = v; }, "virtual admittance (pu)");
    fi->add_option_function<double>(
        "--tau-i", [&](double v) { fi_inline.tau_i = v; }, "current lag (s)");
    (void)opt_holder;
    std::string fi_sweep_text;
    auto* sweep_opt = fi->add_option("--sweep-param", fi_sweep_text,
                                     "sweep one parameter, key=lo:hi:count");
    fi->add_option("--fmin", fi_fmin, "sweep start (Hz)");
    fi->add_option("--fmax", fi_fmax, "sweep end (Hz)");
    fi->add_option("--points", fi_points, "sweep points");
    fi->add_option("--band-lo", fi_band_lo, "GFM band start (Hz)");
    fi->add_option("--band-hi", fi_band_hi, "GFM band end (Hz)");

    // strength -----------------------------------------------------------
    auto* strength = app.add_subcommand("strength", "multi-bus strength report");
    std::string strength_case;
    bool dump_matrices = false;
    strength->add_option("--case", strength_case, "case file")->required();
    strength->add_flag("--dump-matrices", dump_matrices,
                       "write Y_Cl/Z_Cl at the worst frequency as CSV");

    // step ---------------------------------------------------------------
    auto* step = app.add_subcommand("step", "linear step-response of the closed loop");
    std::string step_case;
    int step_bus = 0;
    double step_amp = 1.0, step_tend = 2.0, step_dt = 1e-3;
    step->add_option("--case", step_case, "case file")->required();
    step->add_option("--bus", step_bus, "device bus id for the injection")->required();
    step->add_option("--amp", step_amp, "step amplitude (pu, system base)");
    step->add_option("--t-end", step_tend, "simulation horizon (s)");
    step->add_option("--dt", step_dt, "sample period (s)");

    // place --------------------------------------------------------------
    auto* place = app.add_subcommand("place", "grid-forming placement search");
    std::string place_case;
    std::vector<int> place_candidates;
    double place_budget = 1.0;
    std::vector<double> place_sizes{1.0};
    std::string place_method = "exhaustive";
    double place_p0 = 0.5, place_qv = 1.0;
    place->add_option("--case", place_case, "case file")->required();
    place->add_option("--candidates", place_candidates, "candidate interior bus ids")
        ->required()
        ->delimiter(',');
    place->add_option("--budget", place_budget, "total capacity budget (pu)");
    place->add_option("--sizes", place_sizes, "allowed capacity levels (pu)")
        ->delimiter(',');
    place->add_option("--method", place_method, "exhaustive|greedy")
        ->check(CLI::IsMember({"exhaustive", "greedy"}));
    place->add_option("--p0", place_p0, "dispatch of placed units (pu)");
    place->add_option("--qv", place_qv, "voltage setpoint of placed units");

    // cscr ---------------------------------------------------------------
    auto* cscr = app.add_subcommand("cscr", "critical SCR of a single converter");
    InlineSpec cscr_inline;
    cscr_inline.arch = "pll-pq";
    std::optional<std::string> cscr_case;
    std::string cscr_case_text;
    cscr->add_option("--arch", cscr_inline.arch, "architecture");
    cscr->add_option("--tau", cscr_inline.tau, "line R/L ratio");
    cscr->add_option("--f0", cscr_inline.f0_hz, "nominal frequency (Hz)");
    cscr->add_option("--p0", cscr_inline.p0, "active power dispatch (pu)");
    cscr->add_option_function<double>(
        "--qv", [&](double v) { cscr_inline.qv_opt = v; }, "Q or V reference");
    cscr->add_option_function<double>(
        "--fpll", [&](double v) { cscr_inline.fpll = v; }, "PLL bandwidth (Hz)");
    cscr->add_option_function<double>(
        "--zeta", [&](double v) { cscr_inline.zeta = v; }, "PLL damping");
    auto* cscr_case_opt = cscr->add_option("--case", cscr_case_text,
                                           "case file supplying gSCR for the margin");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help / --version
        std::cerr << e.what() << "\n";
        return kParseError;
    }

    try {
        if (fi->parsed()) {
            const bool use_case = !fi_case.empty();
            if (use_case && fi_device < 0)
                throw gf::InvalidCaseFile("--case requires --device");
            if (sweep_opt->count() > 0)
                fi_sweep = fi_sweep_text;
            return run_fi(fi_case, fi_device, fi_inline, use_case, fi_sweep, fi_fmin,
                          fi_fmax, fi_points, fi_band_lo, fi_band_hi, out_dir);
        }
        if (strength->parsed())
            return run_strength(strength_case, dump_matrices, out_dir);
        if (step->parsed())
            return run_step(step_case, step_bus, step_amp, step_tend, step_dt, out_dir);
        if (place->parsed())
            return run_place(place_case, place_candidates, place_budget, place_sizes,
                             place_method, place_p0, place_qv, out_dir);
        if (cscr->parsed()) {
            if (cscr_case_opt->count() > 0)
                cscr_case = cscr_case_text;
            return run_cscr(cscr_inline, cscr_case, out_dir);
        }
    } catch (const gf::InvalidCaseFile& e) {
        std::cerr << e.what() << "\n";
        return kParseError;
    } catch (const gf::UnstableModel& e) {
        std::cerr << e.what() << "\n";
        return kUnstable;
    } catch (const gf::SearchSpaceTooLarge& e) {
        std::cerr << e.what() << "\n";
        std::cerr << "hint: retry with --method greedy\n";
        return kSearchTooLarge;
    } catch (const gf::NoBracket& e) {
        std::cerr << e.what() << "\n";
        return kNoBracket;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kParseError;
    } catch (const gf::Error& e) {
        std::cerr << e.what() << "\n";
        return kNumericError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericError;
    }
    return kOk;
}
