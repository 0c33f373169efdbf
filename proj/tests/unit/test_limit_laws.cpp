#include "doctest.h"

#include <cmath>
#include <numbers>

#include "orthorand/basis.hpp"
#include "orthorand/errors.hpp"
#include "orthorand/limit_laws.hpp"
#include "orthorand/mrs.hpp"
#include "orthorand/quadrature.hpp"

using namespace orthorand;

TEST_CASE("alpha = 2 is the semicircle") {
    CHECK(ullman_density(2.0, 0.0) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));
    CHECK(ullman_density(2.0, 0.6) == doctest::Approx(2.0 / std::numbers::pi * 0.8).epsilon(1e-12));
    CHECK(ullman_density(2.0, 1.0) == 0.0);
    CHECK_THROWS_AS(ullman_density(2.0, 1.01), DomainError);
    CHECK_THROWS_AS(ullman_density(1.0, 0.0), DomainError);
}

TEST_CASE("densities and CDF match extended-precision values") {
    struct Case {
        double alpha, x, u;
    };
    const Case cases[] = {{1.5, 0.0, 0.954929658551372}, {1.5, 0.3, 0.626834798774078}, {1.5, 0.9, 0.215427517051148},
                          {4, 0.0, 0.424413181578388},   {4, 0.3, 0.47773995837674},    {4, 0.9, 0.484693232227374},
                          {8, 0.0, 0.363782727067189},   {8, 0.3, 0.389812485847621},   {8, 0.9, 0.748822691615745}};
    for (const auto& c : cases) {
        CHECK(std::abs(ullman_density(c.alpha, c.x) - c.u) < 1e-12);
        CHECK(std::abs(ullman_density(c.alpha, -c.x) - c.u) < 1e-12);
    }
    CHECK(std::abs(UllmanDistribution(1.5).cdf(0.37) - 0.764727647213154) < 1e-12);
    CHECK(std::abs(UllmanDistribution(4).cdf(0.37) - 0.667100520405804) < 1e-12);
    CHECK(std::abs(UllmanDistribution(8).cdf(0.37) - 0.63943813108711) < 1e-12);
    // masses used by the local-law experiments
    CHECK(std::abs(UllmanDistribution(2).mass(0.0, 0.5) - 0.304498890522115) < 1e-12);
    CHECK(std::abs(UllmanDistribution(2).mass(0.5, 0.8) - 0.143457090146971) < 1e-12);
    CHECK(std::abs(UllmanDistribution(4).mass(0.0, 0.5) - 0.235582778594391) < 1e-12);
    CHECK(std::abs(UllmanDistribution(4).mass(0.5, 0.8) - 0.175703903186323) < 1e-12);
}

TEST_CASE("normalization, monotone CDF and moments") {
    for (double alpha : {1.5, 2.0, 4.0, 8.0}) {
        const UllmanDistribution mu(alpha);
        auto u = [&](double x) { return mu.density(x); };
        CHECK(std::abs(quad::adaptive(u, -1.0, 1.0, 1e-11, 1e-11).value - 1.0) < 1e-8);
        double prev = 0.0;
        for (double x = -1.0; x <= 1.0; x += 0.05) {
            const double c = mu.cdf(x);
            CHECK(c >= prev - 1e-14);
            prev = c;
        }
        CHECK(mu.cdf(-1.0) == 0.0);
        CHECK(mu.cdf(1.0) == 1.0);
        // CDF is the integral of the density
        CHECK(std::abs(mu.mass(0.1, 0.7) - quad::adaptive(u, 0.1, 0.7, 1e-12, 1e-12).value) < 1e-10);
        for (int m = 1; m <= 4; ++m) {
            auto g = [&](double x) { return std::pow(x, m) * mu.density(x); };
            CHECK(std::abs(quad::adaptive(g, -1.0, 1.0, 1e-11, 1e-11).value - mu.moment(m)) < 1e-9);
        }
    }
}

TEST_CASE("gamma constant dual computation") {
    CHECK(gamma_constant(1.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    CHECK(gamma_constant(2.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gamma_constant(4.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(std::abs(gamma_constant(3.3) - 0.74343889690026628211) < 1e-14);
    for (double alpha : {0.3, 0.5, 1.0, 1.5, 2.0, 3.3, 4.0, 8.0, 20.0}) {
        const auto f = gamma_constant_forms(alpha);
        CHECK(std::abs(f.quadrature_form / f.gamma_form - 1.0) <= 1e-10);
    }
}

TEST_CASE("Kac-Rice density for hermite") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 400);
    const int n = 200;
    const double a = std::sqrt(2.0 * n);
    const KacRiceDensity rho(t, h, n, a);
    CHECK(rho(0.3) == doctest::Approx(rho(-0.3)).epsilon(1e-12));
    // parity at 0: only the K11/K term survives
    const auto kv = kernel_at(t, h, n, 0.0);
    CHECK(rho(0.0) == doctest::Approx(a / std::numbers::pi * std::sqrt(kv.kt11 / kv.kt00)).epsilon(1e-12));
    CHECK(expected_count(rho, 0.0, 0.0) == 0.0);
    CHECK(expected_count(rho, -0.7, -0.2) == doctest::Approx(expected_count(rho, 0.2, 0.7)).epsilon(1e-10));

    const double target = 1.0 / std::sqrt(3.0);
    const double g200 = expected_count(rho, -1.2, 1.2) / n;
    CHECK(std::abs(g200 - target) <= 0.03 * target);
    const KacRiceDensity rho400(t, h, 400, std::sqrt(800.0));
    const double g400 = expected_count(rho400, -1.2, 1.2) / 400;
    CHECK(std::abs(g400 - target) < std::abs(g200 - target));
}

TEST_CASE("local Kac-Rice law approaches the Ullman masses") {
    for (const auto& spec : {WeightSpec::hermite(), WeightSpec::freud(1.0, 4.0)}) {
        const auto t = compute_recurrence(spec, 400);
        const UllmanDistribution mu(spec.alpha());
        for (const auto& [lo, hi] : {std::pair{0.0, 0.5}, std::pair{0.5, 0.8}}) {
            double prev = 1e9;
            for (int n : {100, 200, 400}) {
                const KacRiceDensity rho(t, spec, n, mrs_number(spec, n));
                const double err = std::abs(expected_count(rho, lo, hi) / n - mu.mass(lo, hi) / std::sqrt(3.0));
                CHECK(err < prev);
                prev = err;
            }
            CHECK(prev <= 0.01);
        }
    }
}

TEST_CASE("reweighting invariance at probe points") {
    const auto f = WeightSpec::freud(1.0, 4.0);
    const auto t = compute_recurrence(f, 300);
    const double a = mrs_number(f, 300);
    for (double s : {-1.1, -0.6, 0.0, 0.25, 0.9}) {
        const auto kv = kernel_at(t, f, 300, s * a);
        CHECK(std::abs(kv.weighted_discriminant() - kv.raw_discriminant()) <= 1e-9 * kv.k11 / kv.k00);
    }
}
