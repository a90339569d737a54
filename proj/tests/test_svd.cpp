#include "doctest.h"

#include <random>

#include "gridformer/svd.hpp"
#include "oracles.hpp"

using namespace gridformer;
using Complex = std::complex<double>;

TEST_CASE("singular values of a diagonal matrix") {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = 3.0;
    m(1, 1) = 4.0;
    const auto sv = singular_values(m);
    CHECK(sv.size() == 2);
    CHECK(sv[0] == doctest::Approx(4.0));
    CHECK(sv[1] == doctest::Approx(3.0));
}

TEST_CASE("singular values of the line matrix are |z +/- i|") {
    // [[z, -1], [1, z]] is normal; singular values are eigenvalue moduli.
    const double omega0 = 100.0 * 3.14159265358979323846;
    for (double f : {0.3, 5.0, 50.0, 700.0}) {
        const double w = 2.0 * 3.14159265358979323846 * f;
        const Complex z = Complex(0.0, w) / omega0 + 0.1;
        Eigen::Matrix2cd m;
        m << z, -1.0, 1.0, z;
        auto sv = singular_values(m);
        const double hi = std::max(std::abs(z + Complex(0, 1)), std::abs(z - Complex(0, 1)));
        const double lo = std::min(std::abs(z + Complex(0, 1)), std::abs(z - Complex(0, 1)));
        CHECK(sv[0] == doctest::Approx(hi).epsilon(1e-12));
        CHECK(sv[1] == doctest::Approx(lo).epsilon(1e-12));
    }
}

TEST_CASE("singular values match the independent Jacobi oracle") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> dim(1, 24);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = dim(rng);
        const int m = dim(rng);
        const Eigen::MatrixXcd M = oracles::random_complex(n, m, rng);
        const auto got = singular_values(M);
        const auto want = oracles::gram_singular_values(M);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(0).scale(1.0).epsilon(1e-10));
    }
}

TEST_CASE("sigma bounds are consistent") {
    std::mt19937 rng(5);
    const Eigen::MatrixXcd M = oracles::random_complex(6, 6, rng);
    const auto sv = singular_values(M);
    CHECK(sigma_max(M) == doctest::Approx(sv.front()));
    CHECK(sigma_min(M) == doctest::Approx(sv.back()));
    for (std::size_t i = 1; i < sv.size(); ++i)
        CHECK(sv[i - 1] >= sv[i]);
}
