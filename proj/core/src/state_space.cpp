#include "gridformer/state_space.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <utility>

namespace gridformer {

namespace {

std::string dims(const Eigen::MatrixXd& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

} // namespace

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd A, Eigen::MatrixXd B,
                                 Eigen::MatrixXd C, Eigen::MatrixXd D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
    const Eigen::Index nx = A_.rows();
    if (A_.cols() != nx)
        throw DimensionMismatch("A must be square, got " + dims(A_));
    if (B_.rows() != nx)
        throw DimensionMismatch("B has " + std::to_string(B_.rows()) +
                                " rows, expected " + std::to_string(nx));
    if (C_.cols() != nx)
        throw DimensionMismatch("C has " + std::to_string(C_.cols()) +
                                " cols, expected " + std::to_string(nx));
    if (D_.rows() != C_.rows() || D_.cols() != B_.cols())
        throw DimensionMismatch("D is " + dims(D_) + ", expected " +
                                std::to_string(C_.rows()) + "x" +
                                std::to_string(B_.cols()));
    if (!A_.allFinite() || !B_.allFinite() || !C_.allFinite() || !D_.allFinite())
        throw DimensionMismatch("state-space matrices must be finite");
}

StateSpaceModel StateSpaceModel::gain(const Eigen::MatrixXd& D) {
    return {Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, D.cols()),
            Eigen::MatrixXd(D.rows(), 0), D};
}

StateSpaceModel StateSpaceModel::identity(Eigen::Index n) {
    return gain(Eigen::MatrixXd::Identity(n, n));
}

StateSpaceModel StateSpaceModel::zero(Eigen::Index n_y, Eigen::Index n_u) {
    return gain(Eigen::MatrixXd::Zero(n_y, n_u));
}

bool StateSpaceModel::strictly_proper(double tol) const {
    return D_.size() == 0 || D_.cwiseAbs().maxCoeff() <= tol;
}

Eigen::MatrixXcd eval_at(const StateSpaceModel& model, std::complex<double> s) {
    if (model.n_x() == 0)
        return model.D().cast<std::complex<double>>();
    Eigen::MatrixXcd resolvent =
        s * Eigen::MatrixXcd::Identity(model.n_x(), model.n_x()) -
        model.A().cast<std::complex<double>>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(resolvent);
    const double rc = lu.rcond();
    if (!(rc > 1e-12))
        throw NearSingularResolvent("cond(sI - A) >= 1e12 at s = (" +
                                    std::to_string(s.real()) + ", " +
                                    std::to_string(s.imag()) + ")");
    Eigen::MatrixXcd x = lu.solve(model.B().cast<std::complex<double>>());
    return model.C().cast<std::complex<double>>() * x +
           model.D().cast<std::complex<double>>();
}

StateSpaceModel series(const StateSpaceModel& first, const StateSpaceModel& second) {
    if (second.n_u() != first.n_y())
        throw DimensionMismatch("series: output width " + std::to_string(first.n_y()) +
                                " does not feed input width " + std::to_string(second.n_u()));
    const Eigen::Index n1 = first.n_x(), n2 = second.n_x();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    A.topLeftCorner(n1, n1) = first.A();
    A.bottomLeftCorner(n2, n1) = second.B() * first.C();
    A.bottomRightCorner(n2, n2) = second.A();
    Eigen::MatrixXd B(n1 + n2, first.n_u());
    B.topRows(n1) = first.B();
    B.bottomRows(n2) = second.B() * first.D();
    Eigen::MatrixXd C(second.n_y(), n1 + n2);
    C.leftCols(n1) = second.D() * first.C();
    C.rightCols(n2) = second.C();
    return {A, B, C, second.D() * first.D()};
}

StateSpaceModel parallel(const StateSpaceModel& g1, const StateSpaceModel& g2) {
    if (g1.n_u() != g2.n_u() || g1.n_y() != g2.n_y())
        throw DimensionMismatch("parallel: operands must share input/output widths");
    const Eigen::Index n1 = g1.n_x(), n2 = g2.n_x();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    A.topLeftCorner(n1, n1) = g1.A();
    A.bottomRightCorner(n2, n2) = g2.A();
    Eigen::MatrixXd B(n1 + n2, g1.n_u());
    B.topRows(n1) = g1.B();
    B.bottomRows(n2) = g2.B();
    Eigen::MatrixXd C(g1.n_y(), n1 + n2);
    C.leftCols(n1) = g1.C();
    C.rightCols(n2) = g2.C();
    return {A, B, C, g1.D() + g2.D()};
}

StateSpaceModel append(const StateSpaceModel& g1, const StateSpaceModel& g2) {
    const Eigen::Index n1 = g1.n_x(), n2 = g2.n_x();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    A.topLeftCorner(n1, n1) = g1.A();
    A.bottomRightCorner(n2, n2) = g2.A();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n1 + n2, g1.n_u() + g2.n_u());
    B.topLeftCorner(n1, g1.n_u()) = g1.B();
    B.bottomRightCorner(n2, g2.n_u()) = g2.B();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(g1.n_y() + g2.n_y(), n1 + n2);
    C.topLeftCorner(g1.n_y(), n1) = g1.C();
    C.bottomRightCorner(g2.n_y(), n2) = g2.C();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(g1.n_y() + g2.n_y(), g1.n_u() + g2.n_u());
    D.topLeftCorner(g1.n_y(), g1.n_u()) = g1.D();
    D.bottomRightCorner(g2.n_y(), g2.n_u()) = g2.D();
    return {A, B, C, D};
}

StateSpaceModel feedback(const StateSpaceModel& g, const StateSpaceModel& h) {
    if (g.n_u() != h.n_y() || g.n_y() != h.n_u())
        throw DimensionMismatch("feedback: loop widths do not close");
    const Eigen::Index n1 = g.n_x(), n2 = h.n_x();
    const Eigen::MatrixXd& D1 = g.D();
    const Eigen::MatrixXd& D2 = h.D();
    Eigen::MatrixXd loop = Eigen::MatrixXd::Identity(g.n_y(), g.n_y()) + D1 * D2;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(loop);
    if (!(lu.rcond() > 1e-12))
        throw IllPosedLoop("direct-feedthrough loop I + D_g D_h is singular");
    Eigen::MatrixXd M = lu.inverse();

    // y = M (C1 x1 - D1 C2 x2 + D1 u),  e = u - C2 x2 - D2 y
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    A.topLeftCorner(n1, n1) = g.A() - g.B() * D2 * M * g.C();
    A.topRightCorner(n1, n2) = -g.B() * h.C() + g.B() * D2 * M * D1 * h.C();
    A.bottomLeftCorner(n2, n1) = h.B() * M * g.C();
    A.bottomRightCorner(n2, n2) = h.A() - h.B() * M * D1 * h.C();
    Eigen::MatrixXd B(n1 + n2, g.n_u());
    B.topRows(n1) = g.B() - g.B() * D2 * M * D1;
    B.bottomRows(n2) = h.B() * M * D1;
    Eigen::MatrixXd C(g.n_y(), n1 + n2);
    C.leftCols(n1) = M * g.C();
    C.rightCols(n2) = -M * D1 * h.C();
    return {A, B, C, M * D1};
}

StateSpaceModel unity_feedback(const StateSpaceModel& g) {
    return feedback(g, StateSpaceModel::identity(g.n_y()));
}

Eigen::VectorXcd poles(const StateSpaceModel& model) {
    if (model.n_x() == 0)
        return Eigen::VectorXcd(0);
    Eigen::EigenSolver<Eigen::MatrixXd> es(model.A(), /*computeEigenvectors=*/false);
    return es.eigenvalues();
}

bool is_stable(const StateSpaceModel& model, double eps) {
    if (model.n_x() == 0)
        return true;
    const Eigen::VectorXcd lambda = poles(model);
    return lambda.real().maxCoeff() < -eps;
}

StepTrajectory step_response(const StateSpaceModel& model,
                             const Eigen::VectorXd& u0,
                             double t_end, double dt) {
    if (u0.size() != model.n_u())
        throw DimensionMismatch("step_response: input vector has wrong width");
    if (!(dt > 0.0) || !(t_end >= 0.0))
        throw DimensionMismatch("step_response: need dt > 0 and t_end >= 0");
    if (!is_stable(model))
        throw UnstableModel("step_response requires a stable model");

    const Eigen::Index nx = model.n_x();
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));

    StepTrajectory out;
    out.t.reserve(n_steps + 1);
    out.y.reserve(n_steps + 1);

    if (nx == 0) {
        for (std::size_t k = 0; k <= n_steps; ++k) {
            out.t.push_back(static_cast<double>(k) * dt);
            out.y.push_back(model.D() * u0);
        }
        return out;
    }

    // Exact zero-order-hold discretization via the augmented exponential
    // exp([A  B u0; 0 0] dt) = [Ad  bd; 0 1].
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(nx + 1, nx + 1);
    aug.topLeftCorner(nx, nx) = model.A();
    aug.topRightCorner(nx, 1) = model.B() * u0;
    Eigen::MatrixXd e = (aug * dt).exp();
    Eigen::MatrixXd Ad = e.topLeftCorner(nx, nx);
    Eigen::VectorXd bd = e.topRightCorner(nx, 1);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(nx);
    const Eigen::VectorXd du = model.D() * u0;
    for (std::size_t k = 0; k <= n_steps; ++k) {
        out.t.push_back(static_cast<double>(k) * dt);
        out.y.push_back(model.C() * x + du);
        x = Ad * x + bd;
    }
    return out;
}

} // namespace gridformer
