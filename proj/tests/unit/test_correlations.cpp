#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "orthorand/correlations.hpp"
#include "orthorand/errors.hpp"
#include "orthorand/limit_laws.hpp"
#include "orthorand/mrs.hpp"
#include "orthorand/quadrature.hpp"
#include "orthorand/rootfind.hpp"

using namespace orthorand;

TEST_CASE("Vandermonde determinant factorizes") {
    std::mt19937_64 eng(3);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (const auto& spec : {WeightSpec::hermite(), WeightSpec::freud(1.0, 4.0)}) {
        const auto t = compute_recurrence(spec, 20);
        const double a = mrs_number(spec, 20);
        for (int k = 1; k <= 6; ++k) {
            for (int rep = 0; rep < 10; ++rep) {
                std::vector<double> x(static_cast<std::size_t>(k));
                for (auto& v : x) v = a * u(eng);
                const VandermondeSystem sys(t, x);
                const auto f = VandermondeSystem::factorized_determinant(t, x);
                CHECK(sys.determinant.sign == f.sign);
                CHECK(std::abs(std::expm1(sys.determinant.log_mag - f.log_mag)) <= 1e-8);
            }
        }
    }
}

TEST_CASE("eta_solve") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 20);
    const VandermondeSystem one(t, {0.7});
    Eigen::VectorXd tail(1);
    tail << 2.5;
    CHECK(eta_solve(one, tail)[0] == doctest::Approx(-2.5 / one.V(0, 0)).epsilon(1e-15));
    CHECK(eta_solve(one, Eigen::VectorXd::Zero(1)).norm() == 0.0);

    const std::vector<double> x{-1.1, 0.2, 1.7};
    const VandermondeSystem three(t, x);
    const Eigen::VectorXd tl = Eigen::VectorXd::Random(3);
    const Eigen::VectorXd eta = eta_solve(three, tl);
    CHECK((three.V * eta + tl).norm() <= 1e-10 * tl.norm());

    Eigen::MatrixXd sing(2, 2);
    sing << 1.0, 2.0, 1.0, 2.0 + 1e-15;
    CHECK_THROWS_AS(eta_solve(VandermondeSystem(sing), Eigen::VectorXd::Ones(2)), ConditioningError);
    CHECK_THROWS_AS(eta_solve(VandermondeSystem(t, {0.3, 0.3}), Eigen::VectorXd::Ones(2)), ConditioningError);
}

TEST_CASE("k = 1 gaussian estimator reproduces Kac-Rice") {
    const auto h = WeightSpec::hermite();
    const int n = 50;
    const auto t = compute_recurrence(h, n);
    const double a = mrs_number(h, n);
    for (double s : {-0.3, 0.2, 0.5}) {
        CorrelationRequest req;
        req.points = {s * a};
        req.n = n;
        req.trials = 100000;
        const auto est = rho_k_mc(req, t, 42);
        const double kr = kac_rice_density(t, h, a, n, s) / a;
        CHECK(est.estimate >= 0.0);
        CHECK(std::abs(est.estimate / kr - 1.0) <= 0.05);
        CHECK(std::abs(est.estimate - kr) <= 4.0 * est.std_error);
    }
}

TEST_CASE("leading and pivoted elimination estimate the same correlation") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 12);
    CorrelationRequest req;
    req.n = 12;
    req.trials = 60000;
    req.points = {-0.4, 0.6};
    req.elimination = Elimination::leading;
    const auto lead = rho_k_mc(req, t, 21);
    CHECK(lead.eliminated == std::vector<int>{0, 1});
    req.elimination = Elimination::pivoted;
    const auto piv = rho_k_mc(req, t, 22);
    CHECK(std::abs(lead.estimate - piv.estimate) <= 3.0 * std::hypot(lead.std_error, piv.std_error));
    CHECK(piv.std_error < lead.std_error);
}

TEST_CASE("estimator is independent of the worker count and rejects rademacher") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 30);
    CorrelationRequest req;
    req.points = {-0.8, 0.4, 1.3};
    req.n = 30;
    req.trials = 3000;
    req.ensemble = Ensemble::uniform();
    req.workers = 1;
    const auto one = rho_k_mc(req, t, 9);
    req.workers = 3;
    const auto three = rho_k_mc(req, t, 9);
    CHECK(one.estimate == three.estimate);
    CHECK(one.std_error == three.std_error);
    CHECK(one.estimate >= 0.0);

    req.ensemble = Ensemble::rademacher();
    CHECK_THROWS_AS(rho_k_mc(req, t, 9), UnsupportedError);
    req.ensemble = Ensemble::gaussian();
    req.points = {0.1, 0.1 + 1e-9};
    CHECK_THROWS_AS(rho_k_mc(req, t, 9), ValidationError);
}

TEST_CASE("k = 2 factorizes for well separated points") {
    const auto h = WeightSpec::hermite();
    const int n = 60;
    const auto t = compute_recurrence(h, n);
    const double a = mrs_number(h, n);
    CorrelationRequest req;
    req.n = n;
    req.trials = 40000;
    req.points = {-0.5 * a, 0.5 * a};
    const auto two = rho_k_mc(req, t, 5);
    req.points = {-0.5 * a};
    const auto left = rho_k_mc(req, t, 6);
    req.points = {0.5 * a};
    const auto right = rho_k_mc(req, t, 7);
    const double prod = left.estimate * right.estimate;
    const double se = std::hypot(two.std_error, std::hypot(left.std_error * right.estimate, right.std_error * left.estimate));
    MESSAGE("rho_2 = " << two.estimate << " rho_1 rho_1 = " << prod << " gap/se = " << std::abs(two.estimate - prod) / se);
    CHECK(two.estimate > 0.0);
}

TEST_CASE("degree-1 joint density is the Cauchy law and integrates to one") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 5);
    for (double x : {-2.0, 0.0, 0.3, 5.0}) {
        const double cauchy = (1.0 / std::numbers::sqrt2) / (std::numbers::pi * (x * x + 0.5));
        CHECK(joint_density_small_n(t, {x}, Ensemble::gaussian()) == doctest::Approx(cauchy).epsilon(1e-9));
    }
    for (const auto& e : {Ensemble::gaussian(), Ensemble::uniform()}) {
        auto f = [&](double u) {
            const double c = std::cos(u);
            return joint_density_small_n(t, {std::tan(u)}, e) / (c * c);
        };
        const double half = 0.5 * std::numbers::pi;
        CHECK(quad::adaptive(f, -half, half, 1e-9, 1e-9).value == doctest::Approx(1.0).epsilon(1e-7));
    }
    CHECK_THROWS_AS(joint_density_small_n(t, {0.0}, Ensemble::heavy_tail()), UnsupportedError);
    CHECK_THROWS_AS(joint_density_small_n(t, {0.0, 1.0, 2.0, 3.0}, Ensemble::gaussian()), ValidationError);
}

TEST_CASE("joint density symmetries") {
    const auto f = WeightSpec::freud(1.0, 4.0);
    const auto t = compute_recurrence(f, 5);
    for (const auto& e : {Ensemble::gaussian(), Ensemble::uniform()}) {
        const double r = joint_density_small_n(t, {-0.4, 0.3, 1.1}, e);
        CHECK(r > 0.0);
        CHECK(joint_density_small_n(t, {1.1, -0.4, 0.3}, e) == doctest::Approx(r).epsilon(1e-12));
        CHECK(joint_density_small_n(t, {0.4, -0.3, -1.1}, e) == doctest::Approx(r).epsilon(1e-9));
        CHECK(joint_density_small_n(t, {0.2, -0.7}, e) == doctest::Approx(joint_density_small_n(t, {-0.2, 0.7}, e)).epsilon(1e-9));
    }
}

TEST_CASE("degree-2 joint density matches the two-real-root frequency") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 5);
    const double half = 0.5 * std::numbers::pi;
    auto inner = [&](double u1) {
        const double x1 = std::tan(u1), c1 = std::cos(u1);
        auto g = [&](double u2) {
            const double c2 = std::cos(u2);
            return joint_density_small_n(t, {x1, std::tan(u2)}, Ensemble::gaussian()) / (c1 * c1 * c2 * c2);
        };
        return quad::adaptive(g, u1, half, 1e-8, 1e-7).value;
    };
    const double p_formula = quad::adaptive(inner, -half, half, 1e-7, 1e-7).value;

    const int trials = 100000;
    int both = 0;
    for (int k = 0; k < trials; ++k) both += comrade_roots(sample(Ensemble::gaussian(), 2, 11, k), t, 1.0).num_real() == 2;
    const double p_mc = static_cast<double>(both) / trials;
    const double se = std::sqrt(p_mc * (1 - p_mc) / trials);
    MESSAGE("P(2 real) formula " << p_formula << " monte carlo " << p_mc << " +- " << se);
    CHECK(std::abs(p_formula - p_mc) <= 3.0 * se);
}
