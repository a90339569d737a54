#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "gridformer/errors.hpp"

namespace gridformer {

/// Continuous-time LTI system  x' = A x + B u,  y = C x + D u.
///
/// n_x = 0 is a first-class citizen and models a static gain y = D u,
/// so purely algebraic blocks reuse the same machinery as dynamic ones.
/// Instances are immutable after construction and safe to share across
/// threads.
class StateSpaceModel {
public:
    StateSpaceModel(Eigen::MatrixXd A, Eigen::MatrixXd B,
                    Eigen::MatrixXd C, Eigen::MatrixXd D);

    /// Static gain y = D u (no states).
    static StateSpaceModel gain(const Eigen::MatrixXd& D);
    /// Identity passthrough of width n.
    static StateSpaceModel identity(Eigen::Index n);
    /// Zero system of the given output/input widths (no states).
    static StateSpaceModel zero(Eigen::Index n_y, Eigen::Index n_u);

    const Eigen::MatrixXd& A() const { return A_; }
    const Eigen::MatrixXd& B() const { return B_; }
    const Eigen::MatrixXd& C() const { return C_; }
    const Eigen::MatrixXd& D() const { return D_; }

    Eigen::Index n_x() const { return A_.rows(); }
    Eigen::Index n_u() const { return D_.cols(); }
    Eigen::Index n_y() const { return D_.rows(); }

    bool strictly_proper(double tol = 0.0) const;

private:
    Eigen::MatrixXd A_, B_, C_, D_;
};

/// Transfer matrix C (sI - A)^{-1} B + D at a point s of the complex plane.
/// Throws NearSingularResolvent when cond(sI - A) exceeds 1e12.
Eigen::MatrixXcd eval_at(const StateSpaceModel& model, std::complex<double> s);

/// Series interconnection u -> first -> second -> y.
StateSpaceModel series(const StateSpaceModel& first, const StateSpaceModel& second);

/// Parallel sum: y = g1(u) + g2(u).
StateSpaceModel parallel(const StateSpaceModel& g1, const StateSpaceModel& g2);

/// Diagonal append: inputs and outputs stacked, no coupling.
StateSpaceModel append(const StateSpaceModel& g1, const StateSpaceModel& g2);

/// Negative feedback y = g(u - h(y)). Throws IllPosedLoop when the
/// direct-feedthrough loop I + D_g D_h is singular.
StateSpaceModel feedback(const StateSpaceModel& g, const StateSpaceModel& h);

/// feedback(g, I).
StateSpaceModel unity_feedback(const StateSpaceModel& g);

/// All eigenvalues of A strictly left of -eps. Marginal poles count as
/// unstable. Models with no states are stable.
bool is_stable(const StateSpaceModel& model, double eps = 1e-9);

/// Eigenvalues of the state matrix.
Eigen::VectorXcd poles(const StateSpaceModel& model);

struct StepTrajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> y;
};

/// Response to the step input u0 * 1(t >= 0) from zero initial state,
/// sampled every dt on [0, t_end]. Uses the exact zero-order-hold
/// discretization of A per step, so the final value matches the DC gain
/// for any dt. Throws UnstableModel for unstable models.
StepTrajectory step_response(const StateSpaceModel& model,
                             const Eigen::VectorXd& u0,
                             double t_end, double dt);

} // namespace gridformer
