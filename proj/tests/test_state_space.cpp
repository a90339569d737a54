#include "doctest.h"

#include <random>

#include "gridformer/line.hpp"
#include "gridformer/state_space.hpp"

using namespace gridformer;
using Complex = std::complex<double>;

namespace {
StateSpaceModel scalar_lag() {
    // x' = -x + u, y = x: transfer 1/(s+1)
    Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1), d(1, 1);
    a << -1.0;
    b << 1.0;
    c << 1.0;
    d << 0.0;
    return {a, b, c, d};
}
} // namespace

TEST_CASE("constructor validates dimensions") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(StateSpaceModel(a, Eigen::MatrixXd::Zero(1, 1),
                                    Eigen::MatrixXd::Zero(1, 2),
                                    Eigen::MatrixXd::Zero(1, 1)),
                    DimensionMismatch);
    CHECK_NOTHROW(StateSpaceModel(a, Eigen::MatrixXd::Zero(2, 1),
                                  Eigen::MatrixXd::Zero(1, 2),
                                  Eigen::MatrixXd::Zero(1, 1)));
    CHECK(StateSpaceModel::identity(3).n_x() == 0);
}

TEST_CASE("eval_at: pure gain identity at any s") {
    const StateSpaceModel g = StateSpaceModel::identity(2);
    const Eigen::MatrixXcd v = eval_at(g, Complex(0.0, 123.4));
    CHECK((v - Eigen::Matrix2cd::Identity()).norm() == doctest::Approx(0.0));
}

TEST_CASE("eval_at: DC gain of 1/(s+1) is 1") {
    CHECK(eval_at(scalar_lag(), Complex(0.0, 0.0))(0, 0).real() ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eval_at: gamma model static value matches the closed form") {
    const double w0 = 2.0 * 3.14159265358979323846 * 50.0;
    const StateSpaceModel g = line_gamma(0.1, w0);
    const Eigen::MatrixXcd v = eval_at(g, Complex(0.0, 0.0));
    Eigen::Matrix2d expected;
    expected << 0.1, 1.0, -1.0, 0.1;
    expected /= 1.01;
    CHECK((v.real() - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(v.imag().cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("eval_at throws near a pole") {
    CHECK_THROWS_AS(eval_at(scalar_lag(), Complex(-1.0, 0.0)), NearSingularResolvent);
}

TEST_CASE("series of static gains multiplies") {
    const StateSpaceModel g =
        series(StateSpaceModel::gain(Eigen::MatrixXd::Constant(1, 1, 2.0)),
               StateSpaceModel::gain(Eigen::MatrixXd::Constant(1, 1, 3.0)));
    CHECK(g.D()(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("series transfer equals the product at random frequencies") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> freq(0.1, 1000.0);
    const double w0 = 2.0 * 3.14159265358979323846 * 50.0;
    const StateSpaceModel g1 = line_gamma(0.2, w0);
    const StateSpaceModel g2 = line_gamma(0.05, w0);
    const StateSpaceModel chain = series(g1, g2);
    for (int i = 0; i < 20; ++i) {
        const Complex s(0.0, freq(rng));
        const Eigen::MatrixXcd lhs = eval_at(chain, s);
        const Eigen::MatrixXcd rhs = eval_at(g2, s) * eval_at(g1, s);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("negative unity feedback around an integrator gives 1/(s+1)") {
    Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1), d(1, 1);
    a << 0.0;
    b << 1.0;
    c << 1.0;
    d << 0.0;
    const StateSpaceModel integrator{a, b, c, d};
    const StateSpaceModel loop = unity_feedback(integrator);
    CHECK(eval_at(loop, Complex(0.0, 0.0))(0, 0).real() == doctest::Approx(1.0));
    const Complex s(0.0, 3.0);
    const Complex expected = 1.0 / (s + 1.0);
    const Complex got = eval_at(loop, s)(0, 0);
    CHECK(std::abs(got - expected) < 1e-12);
}

TEST_CASE("feedback rejects a singular feedthrough loop") {
    // g = -I static gain, h = I: I + D_g D_h = 0
    const StateSpaceModel g = StateSpaceModel::gain(-Eigen::Matrix2d::Identity());
    CHECK_THROWS_AS(unity_feedback(g), IllPosedLoop);
}

TEST_CASE("parallel and append compose dimensions") {
    const StateSpaceModel sum = parallel(scalar_lag(), scalar_lag());
    CHECK(eval_at(sum, Complex(0.0, 0.0))(0, 0).real() == doctest::Approx(2.0));
    const StateSpaceModel diag = append(scalar_lag(), StateSpaceModel::identity(2));
    CHECK(diag.n_u() == 3);
    CHECK(diag.n_y() == 3);
}

TEST_CASE("is_stable basics") {
    CHECK(is_stable(scalar_lag()));
    const double w0 = 100.0 * 3.14159265358979323846;
    Eigen::Matrix2d a;
    a << 0.0, -w0, w0, 0.0;
    const StateSpaceModel marginal{a, Eigen::Matrix2d::Identity(),
                                   Eigen::Matrix2d::Identity(),
                                   Eigen::Matrix2d::Zero()};
    CHECK_FALSE(is_stable(marginal));
    CHECK(is_stable(StateSpaceModel::identity(2)));
}

TEST_CASE("step response of a lag settles at the DC gain") {
    const StepTrajectory traj =
        step_response(scalar_lag(), Eigen::VectorXd::Ones(1), 10.0, 0.01);
    CHECK(traj.y.back()(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(traj.y.front()(0) == doctest::Approx(0.0));
}

TEST_CASE("step response of a pure gain jumps immediately") {
    const StateSpaceModel g = StateSpaceModel::gain(Eigen::MatrixXd::Constant(1, 1, 2.5));
    const StepTrajectory traj = step_response(g, Eigen::VectorXd::Ones(1), 0.1, 0.01);
    for (const auto& y : traj.y)
        CHECK(y(0) == doctest::Approx(2.5));
}

TEST_CASE("step response refuses unstable models") {
    Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1), d(1, 1);
    a << 0.5;
    b << 1.0;
    c << 1.0;
    d << 0.0;
    CHECK_THROWS_AS(step_response({a, b, c, d}, Eigen::VectorXd::Ones(1), 1.0, 0.01),
                    UnstableModel);
}

TEST_CASE("step response final value matches eval_at(0) on random stable systems") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const int nx = 3;
        Eigen::MatrixXd skew(nx, nx);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j)
                skew(i, j) = 3.0 * dist(rng);
        skew = (skew - skew.transpose()).eval();
        Eigen::MatrixXd a = skew - 2.0 * Eigen::MatrixXd::Identity(nx, nx);
        Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(nx, 1, [&] { return dist(rng); });
        Eigen::MatrixXd c = Eigen::MatrixXd::NullaryExpr(1, nx, [&] { return dist(rng); });
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(1, 1);
        const StateSpaceModel sys{a, b, c, d};
        const Eigen::VectorXd u0 = Eigen::VectorXd::Ones(1);
        const StepTrajectory traj = step_response(sys, u0, 20.0, 0.02);
        const double expected = eval_at(sys, Complex(0.0, 0.0))(0, 0).real();
        CHECK(traj.y.back()(0) ==
              doctest::Approx(expected).epsilon(1e-6).scale(std::max(1.0, expected)));
    }
}
