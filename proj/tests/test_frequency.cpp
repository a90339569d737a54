#include "doctest.h"

#include "gridformer/frequency.hpp"
#include "gridformer/line.hpp"
#include "gridformer/svd.hpp"

using namespace gridformer;
using Complex = std::complex<double>;

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(FrequencyGrid({}), DimensionMismatch);
    CHECK_THROWS_AS(FrequencyGrid({1.0, 1.0}), DimensionMismatch);
    CHECK_THROWS_AS(FrequencyGrid({-1.0, 2.0}), DimensionMismatch);
    const FrequencyGrid g = FrequencyGrid::log_space(0.05, 2000.0, 500);
    CHECK(g.size() == 500);
    CHECK(g.min_omega() == doctest::Approx(2.0 * 3.14159265358979323846 * 0.05));
    CHECK(g.max_omega() == doctest::Approx(2.0 * 3.14159265358979323846 * 2000.0));
}

TEST_CASE("hinf of a first-order low-pass is its DC gain") {
    Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1), d(1, 1);
    a << -1.0;
    b << 1.0;
    c << 1.0;
    d << 0.0;
    const StateSpaceModel lag{a, b, c, d};
    const HinfResult r = hinf_norm(lag, FrequencyGrid::log_space(0.001, 100.0, 300));
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.peak_omega == doctest::Approx(2.0 * 3.14159265358979323846 * 0.001).epsilon(0.01));
}

TEST_CASE("hinf rejects unstable models") {
    Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1), d(1, 1);
    a << 1.0;
    b << 1.0;
    c << 1.0;
    d << 0.0;
    CHECK_THROWS_AS(hinf_norm({a, b, c, d}, FrequencyGrid::default_sweep()),
                    UnstableModel);
}

TEST_CASE("hinf of the gamma model matches a dense brute-force sweep") {
    const double w0 = 2.0 * 3.14159265358979323846 * 50.0;
    const StateSpaceModel g = line_gamma(0.1, w0);
    const HinfResult fast = hinf_norm(g, FrequencyGrid::default_sweep());

    // brute force on a 1e5-point grid
    const FrequencyGrid dense = FrequencyGrid::log_space(0.05, 2000.0, 100000);
    double best = 0.0;
    double best_w = dense[0];
    for (std::size_t i = 0; i < dense.size(); ++i) {
        const double v = sigma_max(eval_at(g, Complex(0.0, dense[i])));
        if (v > best) {
            best = v;
            best_w = dense[i];
        }
    }
    CHECK(std::abs(fast.value - best) / best < 1e-3);
    CHECK(fast.peak_omega == doctest::Approx(best_w).epsilon(0.01));
    // peak sits near the nominal frequency
    CHECK(fast.peak_omega == doctest::Approx(w0).epsilon(0.1));
}
