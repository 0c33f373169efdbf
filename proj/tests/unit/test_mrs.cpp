#include "doctest.h"

#include <cmath>
#include <numbers>

#include "orthorand/errors.hpp"
#include "orthorand/mrs.hpp"

using namespace orthorand;

TEST_CASE("hermite MRS numbers are sqrt(2n)") {
    const auto h = WeightSpec::hermite();
    for (int n = 1; n <= 256; n += (n < 16 ? 1 : 17)) {
        CHECK(std::abs(mrs_number(h, n) / std::sqrt(2.0 * n) - 1.0) < 1e-10);
    }
    CHECK(mrs_number(h, 2) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mrs_number(h, 8) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("freud MRS numbers match the closed-form oracle") {
    struct Case {
        double c, lambda;
        int n;
        double a;
    };
    // extended-precision values of (n pi / (c lambda I_lambda))^(1/lambda)
    const Case cases[] = {{1, 4, 1, 1.0745699318235419196},   {1, 4, 10, 1.9108855844087336207},
                          {1, 4, 100, 3.3980884896942450416}, {2, 3, 7, 1.7649374039901017663},
                          {0.5, 1.5, 33, 29.24518608578129125}, {1, 6, 50, 1.9401402308916007745}};
    for (const auto& c : cases) {
        const double a = mrs_number(WeightSpec::freud(c.c, c.lambda), c.n);
        CHECK(std::abs(a / c.a - 1.0) < 1e-8);
    }
}

TEST_CASE("MRS table is increasing with the doubling ratio 2^(1/lambda)") {
    const auto spec = WeightSpec::freud(1.0, 4.0);
    const auto t = MrsTable::build(spec, 64);
    for (int n = 2; n <= 64; ++n) CHECK(t(n) > t(n - 1));
    CHECK(t(64) / t(32) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-9));
    // log-log slope bounded by 1/Lambda
    const double slope = std::log(t(64) / t(1)) / std::log(64.0);
    CHECK(slope <= 0.25 + 0.05);
    nlohmann::json j = t;
    const auto back = j.get<MrsTable>();
    CHECK(back.a == t.a);
    CHECK(back.weight_id == spec.weight_id());
    CHECK_THROWS_AS(t(0), DomainError);
}

TEST_CASE("inadmissible Q has no bracket") {
    auto flat = WeightSpec::custom(
        "flat", [](double x) { return 1e-30 * x * x; }, [](double x) { return 2e-30 * x; },
        [](double) { return 2e-30; }, 2.0, 2.0);
    CHECK_THROWS_AS(mrs_number(flat, 10), SolverError);
}

TEST_CASE("hermite equilibrium density is the semicircle") {
    const auto h = WeightSpec::hermite();
    const auto s = equilibrium_density(h, 2, 2.0);
    CHECK(s(0.0) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));
    for (double x : {-1.9, -0.7, 0.3, 1.5})
        CHECK(s(x) == doctest::Approx(std::sqrt(4.0 - x * x) / std::numbers::pi).epsilon(1e-10));
    for (int n : {2, 8, 50}) {
        const double a = std::sqrt(2.0 * n);
        CHECK(equilibrium_density(h, n, a).total_mass() == doctest::Approx(n).epsilon(1e-9));
    }
    CHECK(s(2.5) == 0.0);
}

TEST_CASE("freud equilibrium densities carry mass n, are even and positive") {
    for (const auto& spec : {WeightSpec::freud(1.0, 4.0), WeightSpec::freud(1.0, 1.5), WeightSpec::freud(2.0, 3.0)}) {
        for (int n : {1, 10, 40}) {
            const double a = mrs_number(spec, n);
            const auto s = equilibrium_density(spec, n, a);
            CHECK(std::abs(s.total_mass() / n - 1.0) < 1e-6);
            for (double t : {0.0, 0.2, 0.55, 0.9, 0.999}) {
                CHECK(s(t * a) > 0.0);
                CHECK(s(t * a) == doctest::Approx(s(-t * a)).epsilon(1e-12));
            }
        }
    }
}
