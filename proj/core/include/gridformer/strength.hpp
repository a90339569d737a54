#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridformer/metrics.hpp"
#include "gridformer/system.hpp"

namespace gridformer {

/// One evaluated inequality instance: holds iff lhs >= rhs - 1e-10.
struct BoundCheck {
    double omega = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    double slack = 0.0;
};

std::vector<BoundCheck> make_bound_checks(const FrequencyGrid& grid,
                                          const std::vector<double>& lhs,
                                          const std::vector<double>& rhs);

/// System strength kappa(jw) = sigma_min[Y_Cl(jw)] = 1/sigma_max[Z_Cl(jw)];
/// both routes are evaluated and cross-checked to 1e-9.
StrengthCurve system_strength(const std::vector<StateSpaceModel>& devices,
                              const ScaledGridOperator& netop,
                              const FrequencyGrid& grid);

/// Grid strength alpha(jw) = sigma_min[Y_Grid^N(jw) (I (x) gamma_0^{-1}(jw))],
/// with gamma_0 built from the mean branch tau. Frequency-constant and
/// equal to sigma_min(B_Grid^N) = gSCR under a uniform tau.
StrengthCurve grid_strength(const ScaledGridOperator& netop, const FrequencyGrid& grid);

/// Bus strength kappa_i(w) = 1 / max(row, column) of the 2x2-block
/// sigma_max sums of Z_Cl.
std::vector<StrengthCurve> bus_strength(const std::vector<StateSpaceModel>& devices,
                                        const ScaledGridOperator& netop,
                                        const FrequencyGrid& grid);

/// Passivity margin: smallest eigenvalue of the Hermitian part of Y_Cl.
StrengthCurve passivity_margin(const std::vector<StateSpaceModel>& devices,
                               const ScaledGridOperator& netop,
                               const FrequencyGrid& grid);

/// ESCR_i = 1 / sum_j S_j |Z_ij| over device buses, Z = B_N^{-1}.
std::vector<double> escr(const NetworkModel& net);

/// gSCR = smallest eigenvalue of S^{-1} B_N, computed from the congruent
/// symmetric form S^{-1/2} B_N S^{-1/2}.
double gscr(const NetworkModel& net);

/// Strength of the system after an additional converter is connected at
/// an interior bus, computed with the explicit block formulas (network
/// correction (b b^T / beta) (x) S_v gamma absorbed into the grid; bus
/// strength of the new bus from the partitioned inverse). Requires a
/// uniform branch tau.
struct AddedDeviceOptions {
    double p_ref = 0.5;
    double qv_ref = 1.0;
};

struct AddedDeviceResult {
    StrengthCurve kappa;     ///< system strength with the converter absorbed
    StrengthCurve alpha;     ///< corrected grid strength
    StrengthCurve bus_extra; ///< bus strength of the new bus
    StrengthCurve fi;        ///< Forming Index of the added converter
    double beta = 0.0;                ///< scaled self-susceptance at the bus
    double sigma_min_b_tilde = 0.0;   ///< grid strength before connection
    StateSpaceModel extra_admittance = StateSpaceModel::zero(2, 2);
    StateSpaceModel extra_sensitivity = StateSpaceModel::identity(2);
};

AddedDeviceResult added_device_strength(const SystemModel& base, int extra_interior_bus,
                                        const DeviceSpec& extra, const FrequencyGrid& grid,
                                        const AddedDeviceOptions& opts = {});

/// kappa(jw) >= sigma_min[gamma_0(jw)] alpha(jw) - sigma_max[Y_de^N(jw)]
/// at every grid point.
std::vector<BoundCheck> check_prop1(const StrengthCurve& kappa, const StrengthCurve& alpha,
                                    const std::vector<StateSpaceModel>& devices,
                                    const ScaledGridOperator& netop);

/// Bound chains for the added-converter enhancement result: the grid
/// strength chain (alpha against the pre-connection strength plus the
/// (1 - FI) correction) and the bus strength chain.
struct Prop2Report {
    std::vector<BoundCheck> alpha_chain;
    std::vector<BoundCheck> bus_chain;
    std::vector<bool> fi_below_one;  ///< per grid point
    std::vector<bool> alpha_enhanced; ///< alpha > pre-connection strength
    AddedDeviceResult added;
};

Prop2Report check_prop2(const SystemModel& base, int extra_interior_bus,
                        const DeviceSpec& extra, const FrequencyGrid& grid,
                        const AddedDeviceOptions& opts = {});

/// Critical SCR of a single converter and grid: bisection on SCR = 1/L_g
/// of the closed-loop stability, bracket [0.1, 10], tolerance 1e-4.
/// An unsolvable operating point counts as unstable.
struct CscrResult {
    bool found = false;
    double cscr = 0.0;
    bool stable_everywhere = false;
};

bool closed_loop_stable_at_scr(const DeviceSpec& spec, double scr, double tau,
                               double omega0, double p_ref = 0.5, double qv_ref = 1.0);
CscrResult compute_cscr(const DeviceSpec& spec, double tau, double omega0,
                        double p_ref = 0.5, double qv_ref = 1.0);

enum class StrengthClass { VeryWeak, Weak, Strong };
std::string to_string(StrengthClass c);

struct StrengthThresholds {
    double very_weak = 0.5;
    double weak = 1.0;
};

struct StrengthReport {
    StrengthCurve kappa;
    StrengthCurve alpha;
    StrengthCurve passivity;
    std::vector<StrengthCurve> bus;
    double worst_omega = 0.0; ///< refined argmin of kappa
    double kappa_min = 0.0;
    StrengthClass classification = StrengthClass::Strong;
    std::vector<double> escr_values;
    double gscr_value = 0.0;
    /// max |kappa - min_i sigma_min(Y_de + sigma_i gamma)| when the case
    /// is homogeneous with uniform tau; empty otherwise.
    std::optional<double> remark1_max_dev;
};

StrengthReport compute_strength_report(const SystemModel& sys, const FrequencyGrid& grid,
                                       const StrengthThresholds& thresholds = {});

/// Buses ordered ascending by bus strength at the requested frequency
/// (nearest grid point); ties keep bus-index order.
std::vector<int> weak_bus_ranking(const StrengthReport& report, double omega);

/// JSON document with curves, rankings, classification and self-checks.
std::string strength_report_json(const StrengthReport& report);

} // namespace gridformer
