#include "doctest.h"

#include <cmath>
#include <numbers>

#include "orthorand/quadrature.hpp"

using namespace orthorand;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    for (int m : {1, 2, 5, 16, 64}) {
        const auto& r = quad::gauss_legendre(m);
        CHECK(r.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
        for (int k = 0; k <= 2 * m - 1; ++k) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
            const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
            CHECK(std::abs(s - exact) < 1e-13);
        }
    }
}

TEST_CASE("large orders stay accurate") {
    const auto& r = quad::gauss_legendre(1 << 12);
    CHECK(r.weights.sum() == doctest::Approx(2.0).epsilon(1e-13));
    const double v = quad::fixed_legendre([](double x) { return std::cos(x); }, 0.0, 10.0, 1 << 12);
    CHECK(v == doctest::Approx(std::sin(10.0)).epsilon(1e-12));
}

TEST_CASE("doubling converges and reports order") {
    const auto r = quad::legendre_doubling([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-14, 1e-14);
    CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    CHECK(r.order >= 32);
}

TEST_CASE("doubling throws when the cap is hit") {
    auto f = [](double x) { return std::sin(1e6 * x); };
    CHECK_THROWS_AS(quad::legendre_doubling(f, 0.0, 1.0, 1e-14, 1e-14, 16, 64), AccuracyError);
}

TEST_CASE("adaptive handles endpoint singularities") {
    const auto r = quad::adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10, 1e-12, 10000);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
    const auto g = quad::adaptive_to_infinity([](double x) { return std::exp(-x * x); }, 0.0, 1e-12, 1e-12);
    CHECK(g.value == doctest::Approx(0.5 * std::sqrt(std::numbers::pi)).epsilon(1e-11));
}

TEST_CASE("compensated sum recovers cancelled terms") {
    quad::CompensatedSum s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i) s.add(1e-16);
    s.add(-1.0);
    CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-10));
}
