#include "doctest.h"

#include <cmath>

#include "orthorand/errors.hpp"
#include "orthorand/mrs.hpp"
#include "orthorand/probes.hpp"

using namespace orthorand;

namespace {

std::vector<double> grid(double lim, int count) {
    std::vector<double> g;
    for (int i = 0; i < count; ++i) g.push_back(-lim + 2.0 * lim * i / (count - 1));
    return g;
}

}  // namespace

TEST_CASE("log-log slope") {
    CHECK(loglog_slope({10, 20, 40}, {1.0, 0.5, 0.25}) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK_THROWS_AS(loglog_slope({10, 20}, {1.0, 2.0}), ValidationError);
}

TEST_CASE("Parseval probe") {
    for (const auto& spec : {WeightSpec::hermite(), WeightSpec::freud(1.0, 4.0)}) {
        const auto t = compute_recurrence(spec, 200);
        const auto r = probe_parseval(t, {10, 100, 200}, 3);
        CHECK(r.pass);
        for (double v : r.statistic) CHECK(v <= 1e-10);
    }
}

TEST_CASE("delocalization slope and trivial bounds") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 512);
    const std::vector<int> ns{64, 128, 256, 512};
    const auto r = probe_delocalization(t, h, default_mrs(h), ns, grid(0.9, 91));
    MESSAGE("delocalization slope " << r.slope);
    CHECK(r.pass);
    CHECK(r.slope <= -0.05);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        CHECK(r.statistic[i] <= 1.0);
        CHECK(r.statistic[i] >= 1.0 / std::sqrt(ns[i] + 1.0));
    }
    CHECK_THROWS_AS(probe_delocalization(t, h, default_mrs(h), ns, {0.95}), DomainError);
}

TEST_CASE("derivative growth stays bounded") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 512);
    const auto r = probe_derivative_growth(t, h, default_mrs(h), {64, 128, 256, 512}, grid(0.8, 81));
    CHECK(r.pass);
    for (double v : r.statistic) CHECK(v > 0.0);
    for (const auto& w : r.details["argmax"])
        CHECK(w["max_left"].get<double>() == doctest::Approx(w["max_right"].get<double>()).epsilon(1e-9));
    CHECK(r.secondary.size() == 4);
}

TEST_CASE("anti-concentration observes no failures") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 200);
    for (const auto& e : {Ensemble::gaussian(), Ensemble::rademacher()}) {
        const auto r = probe_anticoncentration(t, h, default_mrs(h), e, 200, 8, 0.5, 2000, 4);
        CHECK(r.pass);
        CHECK(r.statistic[0] == 0.0);
    }
    CHECK_THROWS_AS(probe_anticoncentration(t, h, default_mrs(h), Ensemble::gaussian(), 200, 8, 0.5, 10, 4),
                    ValidationError);
}

TEST_CASE("boundedness does not grow and is reproducible") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 400);
    const auto r = probe_boundedness(t, h, default_mrs(h), Ensemble::gaussian(), {100, 200, 400}, 100, 8, 1);
    CHECK(r.pass);
    const auto again = probe_boundedness(t, h, default_mrs(h), Ensemble::gaussian(), {100, 200, 400}, 100, 8, 3);
    CHECK(nlohmann::json(r).dump() == nlohmann::json(again).dump());
    for (double v : r.statistic) CHECK(std::isfinite(v));
}

TEST_CASE("leading coefficient limit") {
    const auto h = WeightSpec::hermite();
    const auto th = compute_recurrence(h, 512);
    const auto rh = probe_leading_coeff(th, h, default_mrs(h), {64, 128, 256, 512});
    CHECK(rh.details["target"].get<double>() == doctest::Approx(2.0 * std::sqrt(std::exp(1.0))).epsilon(1e-15));
    CHECK(rh.pass);
    // closed form: gamma_n^2 = 2^n / (sqrt(pi) n!)
    for (int n : {10, 50}) {
        const double lg = 0.5 * (n * std::log(2.0) - 0.5 * std::log(M_PI) - std::lgamma(n + 1.0));
        CHECK(th.log_gamma[n] == doctest::Approx(lg).epsilon(1e-13));
    }
    const auto f = WeightSpec::freud(1.0, 4.0);
    const auto tf = compute_recurrence(f, 512);
    const auto rf = probe_leading_coeff(tf, f, default_mrs(f), {64, 128, 256, 512});
    MESSAGE("freud4 leading-coefficient errors " << nlohmann::json(rf.secondary).dump());
    CHECK(rf.pass);
    for (double v : rf.statistic) CHECK(v > 0.0);
}

TEST_CASE("run_probe gates on Parseval and serializes") {
    const auto h = WeightSpec::hermite();
    const auto t = compute_recurrence(h, 256);
    ProbeRequest req;
    req.kind = parse_probe_kind("leading");
    req.n_values = {64, 128, 256};
    const auto r = run_probe(req, t, h, default_mrs(h));
    CHECK(r.credited);
    CHECK(r.details["parseval"]["pass"].get<bool>());
    const nlohmann::json j = r;
    CHECK(j["probe_id"] == "leading");
    CHECK_FALSE(j.contains("thresholds"));
    CHECK(j["details"]["thresholds"]["leading_coeff_final_rel"].get<double>() == 0.05);

    req.thresholds.parseval_rel = 0.0;
    CHECK_FALSE(run_probe(req, t, h, default_mrs(h)).credited);
    CHECK_THROWS_AS(parse_probe_kind("nope"), ValidationError);

    ProbeThresholds th;
    th.derivative_ratio_max = 3.5;
    const ProbeThresholds back = nlohmann::json(th).get<ProbeThresholds>();
    CHECK(back.derivative_ratio_max == 3.5);
}
