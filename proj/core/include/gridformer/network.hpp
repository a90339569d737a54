#pragma once

#include <optional>
#include <vector>

#include "gridformer/frequency.hpp"
#include "gridformer/line.hpp"
#include "gridformer/state_space.hpp"

namespace gridformer {

/// Branch between two buses; `to == ground index` models a shunt to the
/// common grounded bus.
struct Branch {
    int from = 0;
    int to = 0;
    double b = 1.0;    ///< susceptance (pu)
    double tau = 0.1;  ///< branch R/L ratio
};

/// Static description of the dynamic network: n device buses
/// {0..n-1}, m interior buses {n..n+m-1}, one grounded bus {n+m}.
class NetworkModel {
public:
    NetworkModel(int n_devices, int n_interior, std::vector<Branch> branches,
                 std::vector<double> capacities, double omega0);

    int n_devices() const { return n_devices_; }
    int n_interior() const { return n_interior_; }
    int n_buses() const { return n_devices_ + n_interior_; } ///< non-ground
    int ground_bus() const { return n_devices_ + n_interior_; }
    const std::vector<Branch>& branches() const { return branches_; }
    const std::vector<double>& capacities() const { return capacities_; }
    double omega0() const { return omega0_; }

    bool uniform_tau(double tol = 0.0) const;
    double mean_tau() const; ///< gamma_0 ratio: arithmetic mean of branch taus

    std::vector<int> interior_buses() const;

    /// Promotes an interior bus to a device bus (appended as device index
    /// n). Used when connecting an additional converter.
    NetworkModel with_device_bus(int interior_bus, double capacity) const;

    /// Promotes several interior buses at once; they become device
    /// indices n, n+1, ... in ascending old-index order.
    NetworkModel with_device_buses(const std::vector<int>& interior_buses,
                                   const std::vector<double>& capacities) const;

private:
    int n_devices_;
    int n_interior_;
    std::vector<Branch> branches_;
    std::vector<double> capacities_;
    double omega0_;
};

/// Static susceptance matrix over all non-ground buses: off-diagonal
/// -B_ij, diagonal row sums including ground shunts.
Eigen::MatrixXd static_b_matrix(const NetworkModel& net);

/// Full 2(n+m) dynamic admittance with blocks B_ij gamma_ij(jw).
Eigen::MatrixXcd assemble_dynamic_y(const NetworkModel& net, double omega);

/// Schur complement eliminating the listed buses (2x2 blocks per bus).
/// Throws SingularInteriorBlock if the interior block is near singular.
Eigen::MatrixXcd kron_reduce(const Eigen::MatrixXcd& Y_full,
                             const std::vector<int>& interior);
Eigen::MatrixXd kron_reduce(const Eigen::MatrixXd& B_full,
                            const std::vector<int>& interior);

/// Capacity-normalized reduced network admittance Y_Grid^N(jw)
///   S^{-1/2} (Y_1 - Y_2 Y_4^{-1} Y_3) S^{-1/2}.
/// Under a uniform branch tau this factors as B_Grid^N (x) gamma(jw),
/// kept as a static matrix plus the shared gamma (fast path).
class ScaledGridOperator {
public:
    explicit ScaledGridOperator(const NetworkModel& net);

    Eigen::MatrixXcd eval(double omega) const; ///< 2n x 2n
    bool uniform() const { return static_b_.has_value(); }
    /// B_Grid^N, available on the uniform-tau path.
    const Eigen::MatrixXd& static_b() const;
    const NetworkModel& network() const { return net_; }
    double tau0() const { return tau0_; }

private:
    NetworkModel net_;
    double tau0_;
    std::optional<Eigen::MatrixXd> static_b_;
};

/// Closed-loop admittance Y_Cl(jw) = Y_Grid^N(jw) + blockdiag(Y_de,i(jw)).
Eigen::MatrixXcd closed_loop_admittance(const std::vector<StateSpaceModel>& devices,
                                        const ScaledGridOperator& netop, double omega);

/// Z_Cl(jw) = Y_Cl(jw)^{-1}; throws SingularClosedLoop on a resonance
/// sitting numerically on the grid point.
Eigen::MatrixXcd closed_loop_impedance(const std::vector<StateSpaceModel>& devices,
                                       const ScaledGridOperator& netop, double omega);

/// Power-coordinate sensitivity U_0^N Z_Cl with the block-diagonal
/// [[U_d, U_q], [U_q, -U_d]] per device.
Eigen::MatrixXcd power_coordinate_sensitivity(const Eigen::MatrixXcd& Z_cl,
                                              const std::vector<Eigen::Vector2d>& U_dq0);

/// State-space closed loop from the scaled disturbance current (2n) to
/// the scaled bus voltages (2n). The exact transfer is
///   Z_Cl(s) = C (sI - A)^{-1} B + D + s E:
/// a purely inductive node driven by a current source has a derivative
/// feedthrough E, which no proper realization can absorb. For step
/// inputs E only contributes an impulse at t = 0, so `ss` is the right
/// model to integrate; frequency-domain comparisons must add jw E.
struct ClosedLoopSs {
    StateSpaceModel ss;
    Eigen::MatrixXd deriv_gain; ///< E

    Eigen::MatrixXcd transfer_at(std::complex<double> s) const;
};

/// Builds the closed loop from per-branch gamma states and the device
/// state-space models (which must be strictly proper; converter
/// architectures are). Throws IllPosedLoop when the node elimination is
/// singular.
ClosedLoopSs assemble_closed_loop_ss(const std::vector<StateSpaceModel>& devices,
                                     const NetworkModel& net);

} // namespace gridformer
