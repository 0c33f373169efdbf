#include "doctest.h"

#include <cmath>
#include <numbers>

#include "orthorand/ensembles.hpp"
#include "orthorand/errors.hpp"
#include "orthorand/quadrature.hpp"

using namespace orthorand;

namespace {

struct Moments {
    double mean, var, m4, small;  // small = fraction with |x| <= 0.2
};

Moments moments(const Ensemble& e, long draws, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    double s1 = 0, s2 = 0, s4 = 0;
    long small = 0;
    for (long i = 0; i < draws; ++i) {
        const double x = e.draw(eng);
        s1 += x;
        s2 += x * x;
        s4 += x * x * x * x;
        small += std::abs(x) <= 0.2;
    }
    const double mean = s1 / draws;
    return {mean, s2 / draws - mean * mean, s4 / draws, static_cast<double>(small) / draws};
}

}  // namespace

TEST_CASE("unit mean-zero moments over 1e6 draws") {
    for (const auto& e : {Ensemble::gaussian(), Ensemble::rademacher(), Ensemble::uniform()}) {
        const auto m = moments(e, 1000000, 2024);
        CHECK(std::abs(m.mean) <= 0.005);
        CHECK(std::abs(m.var - 1.0) <= 0.01);
    }
    const auto g = moments(Ensemble::gaussian(), 1000000, 77);
    CHECK(std::abs(g.m4 - 3.0) <= 0.05);
}

TEST_CASE("heavy tail has unit variance and a bounded 2+eps0/2 moment") {
    // kurtosis is 70 for eps0 = 0.5, so the variance check needs 1e7 draws;
    // 0.013 is five standard errors of the sample variance
    const auto e = Ensemble::heavy_tail(0.5);
    const auto m = moments(e, 10000000, 99);
    CHECK(std::abs(m.mean) <= 0.005);
    CHECK(std::abs(m.var - 1.0) <= 0.013);
    std::mt19937_64 eng(5);
    double s = 0.0;
    for (int i = 0; i < 1000000; ++i) s += std::pow(std::abs(e.draw(eng)), 2.25);
    // E|X|^2.25 = 1.306 for this law
    CHECK(s / 1e6 < 2.0);
}

TEST_CASE("anti-concentration at a = 0.2") {
    for (const auto& e : {Ensemble::gaussian(), Ensemble::rademacher(), Ensemble::uniform(), Ensemble::heavy_tail()}) {
        const auto m = moments(e, 1000000, 31);
        const double slack = 3.0 * std::sqrt(0.8 * 0.2 / 1e6);
        CHECK(m.small <= 0.8 + slack);
    }
}

TEST_CASE("rademacher draws are signs") {
    std::mt19937_64 eng(1);
    const auto e = Ensemble::rademacher();
    for (int i = 0; i < 1000; ++i) {
        const double x = e.draw(eng);
        CHECK((x == 1.0 || x == -1.0));
    }
}

TEST_CASE("densities") {
    CHECK(density_at(Ensemble::gaussian(), 0.0) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-15));
    CHECK(density_at(Ensemble::uniform(), 2.0) == 0.0);
    CHECK(density_at(Ensemble::uniform(), 0.0) == doctest::Approx(0.5 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK_THROWS_AS(density_at(Ensemble::rademacher(), 0.0), UnsupportedError);
    for (const auto& e : {Ensemble::gaussian(), Ensemble::heavy_tail(0.5), Ensemble::heavy_tail(2.0)}) {
        auto f = [&](double v) { return e.density(v); };
        const double mass = 2.0 * quad::adaptive_to_infinity(f, 0.0, 1e-12, 1e-12).value;
        CHECK(std::abs(mass - 1.0) <= 1e-8);
        auto g = [&](double v) { return v * v * e.density(v); };
        CHECK(2.0 * quad::adaptive_to_infinity(g, 0.0, 1e-11, 1e-11).value == doctest::Approx(1.0).epsilon(1e-8));
    }
    auto u = [](double v) { return density_at(Ensemble::uniform(), v); };
    CHECK(quad::adaptive(u, -std::sqrt(3.0), std::sqrt(3.0), 1e-12, 1e-12).value == doctest::Approx(1.0));
}

TEST_CASE("sampling is reproducible and order independent") {
    const auto e = Ensemble::gaussian();
    const auto a = sample(e, 50, 42, 7);
    const auto b = sample(e, 50, 42, 7);
    CHECK(a.xi == b.xi);
    CHECK(a.xi.size() == 51);
    CHECK(sample(e, 50, 42, 8).xi != a.xi);
    CHECK(sample(e, 50, 43, 7).xi != a.xi);
    // reference splitmix64 output for state 0 guards the documented mixing
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("parse") {
    CHECK(Ensemble::parse("heavy:0.5").kind() == EnsembleKind::heavy_tail);
    CHECK(Ensemble::parse("heavy:0.5").eps0() == 0.5);
    CHECK(Ensemble::parse("uniform").id() == "uniform");
    CHECK_THROWS_AS(Ensemble::parse("cauchy"), ValidationError);
    CHECK_THROWS_AS(Ensemble::parse("heavy:-1"), ValidationError);
}
