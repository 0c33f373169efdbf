#include "doctest.h"

#include <cmath>
#include <numbers>

#include "orthorand/basis.hpp"
#include "orthorand/mrs.hpp"

using namespace orthorand;

TEST_CASE("hermite values at the origin") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 50);
    const auto b = eval_weighted(t, h, 50, 0.0);
    CHECK(b.q(0).value() == doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-15));
    for (int k = 1; k <= 50; k += 2) {
        CHECK(b.q(k).sign == 0);
        CHECK(std::isinf(b.q(k).log_mag));
    }
    // p_2(0) = -1/(sqrt(2) pi^{1/4}) for e^{-x^2}
    CHECK(b.q(2).value() == doctest::Approx(-std::pow(std::numbers::pi, -0.25) / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("no overflow at high degree and large x") {
    const auto h = WeightSpec::hermite();
    const int n = 100000;
    const auto t = compute_recurrence(h, n);
    const double a = std::sqrt(2.0 * n);
    for (double s : {0.0, 0.37, 0.99, 1.5, 2.0}) {
        const auto b = eval_weighted(t, h, n, s * a, true);
        CHECK(b.mant.allFinite());
        CHECK(b.dmant.allFinite());
        CHECK(std::isfinite(b.log_norm()));
        const auto kv = kernel_at(t, h, n, s * a);
        CHECK(kv.kt00 > 0.0);
        CHECK(std::isfinite(kv.log_scale));
        CHECK(kv.kt11 * kv.kt00 >= kv.kt01 * kv.kt01 * (1 - 1e-12));
    }
    // bulk magnitude: K~(x,x) ~ sigma_n(x) = sqrt(2n - x^2)/pi
    const auto kv = kernel_at(t, h, n, 0.0);
    CHECK(kv.Kt00() == doctest::Approx(std::sqrt(2.0 * n) / std::numbers::pi).epsilon(0.01));
}

TEST_CASE("sum of squares agrees with the kernel") {
    const auto f = WeightSpec::freud(1.0, 4.0);
    const auto t = compute_recurrence(f, 300);
    for (double x : {-2.7, -0.4, 0.0, 1.1, 3.3, 4.5}) {
        const auto b = eval_weighted(t, f, 300, x);
        const auto kv = kernel_at(t, f, 300, x);
        CHECK(std::abs(2.0 * b.log_norm() - (std::log(kv.kt00) + kv.log_scale)) < 1e-12);
        const Eigen::VectorXd row = b.normalized();
        CHECK(row.norm() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("kernel identities") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 400);
    const auto k0 = kernel_at(t, h, 399, 0.0);
    CHECK(k0.kt01 == 0.0);
    for (double x : {-20.0, -3.0, 0.5, 7.0, 25.0}) {
        const auto kv = kernel_at(t, h, 400, x);
        CHECK(std::abs(kv.weighted_discriminant() - kv.raw_discriminant()) <= 1e-9 * kv.k11 / kv.k00);
    }
}

TEST_CASE("kernel approaches the equilibrium density in the bulk") {
    for (const auto& spec : {WeightSpec::hermite(), WeightSpec::freud(1.0, 4.0)}) {
        const int n = 200;
        const auto t = compute_recurrence(spec, n);
        const double a = mrs_number(spec, n);
        const auto sigma = equilibrium_density(spec, n, a);
        for (double s = -0.8; s <= 0.8001; s += 0.1) {
            const double ratio = kernel_at(t, spec, n, s * a).Kt00() / sigma(s * a);
            CHECK(std::abs(ratio - 1.0) <= 0.1);
        }
    }
}

TEST_CASE("derivative values agree with finite differences") {
    const auto f = WeightSpec::freud(1.0, 4.0);
    const auto t = compute_recurrence(f, 30);
    Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(31, -1.0, 1.0);
    const double x = 0.83, h = 1e-6;
    const auto v = eval_combination(t, c, x);
    const auto vp = eval_combination(t, c, x + h);
    const auto vm = eval_combination(t, c, x - h);
    CHECK(v.derivative == doctest::Approx((vp.value - vm.value) / (2 * h)).epsilon(1e-7));
    const auto b = eval_weighted(t, f, 30, x, true);
    const auto bp = eval_weighted(t, f, 30, x + h);
    const auto bm = eval_weighted(t, f, 30, x - h);
    for (int k = 0; k <= 30; ++k)
        CHECK(b.dq(k).value() == doctest::Approx((bp.q(k).value() - bm.q(k).value()) / (2 * h)).epsilon(1e-6).scale(1e-6));
}
