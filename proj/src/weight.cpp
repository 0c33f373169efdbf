#include "orthorand/weight.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

#include "orthorand/errors.hpp"

namespace orthorand {

namespace {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_number(std::string_view s) {
    // from_chars for double is available in libstdc++ 11
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    while (first != last && *first == ' ') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ValidationError("cannot parse number '" + std::string(s) + "'");
    return v;
}

}  // namespace

WeightSpec WeightSpec::hermite() {
    WeightSpec w;
    w.family_ = WeightFamily::hermite;
    w.c_ = 1.0;
    w.lambda_ = 2.0;
    w.alpha_ = 2.0;
    w.lambda_floor_ = 2.0;
    w.canonical_ = "hermite";
    return w;
}

WeightSpec WeightSpec::freud(double c, double lambda) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("freud weight needs c > 0");
    if (!(lambda > 1.0) || !std::isfinite(lambda)) throw ValidationError("freud weight needs lambda > 1");
    WeightSpec w;
    w.family_ = WeightFamily::freud;
    w.c_ = c;
    w.lambda_ = lambda;
    w.alpha_ = lambda;
    w.lambda_floor_ = lambda;
    w.canonical_ = "freud:" + format_number(c) + "," + format_number(lambda);
    return w;
}

WeightSpec WeightSpec::custom(std::string name, RealFn q, RealFn dq, RealFn d2q, double alpha,
                              double lambda_floor) {
    if (!q || !dq || !d2q) throw ValidationError("custom weight must supply Q, Q' and Q''");
    if (name.empty()) throw ValidationError("custom weight needs a name");
    WeightSpec w;
    w.family_ = WeightFamily::custom;
    w.alpha_ = alpha;
    w.lambda_floor_ = lambda_floor;
    w.canonical_ = "custom:" + name;
    w.q_ = std::move(q);
    w.dq_ = std::move(dq);
    w.d2q_ = std::move(d2q);
    return w;
}

WeightSpec WeightSpec::parse(std::string_view text) {
    if (text == "hermite") return hermite();
    if (text.substr(0, 6) == "freud:") {
        const std::string_view params = text.substr(6);
        const auto comma = params.find(',');
        if (comma == std::string_view::npos)
            throw ValidationError("freud weight expects 'freud:c,lambda'");
        return freud(parse_number(params.substr(0, comma)), parse_number(params.substr(comma + 1)));
    }
    throw ValidationError("unknown weight '" + std::string(text) + "' (expected hermite or freud:c,lambda)");
}

double WeightSpec::Q(double x) const {
    switch (family_) {
        case WeightFamily::hermite: return 0.5 * x * x;
        case WeightFamily::freud: return 0.5 * c_ * std::pow(std::abs(x), lambda_);
        case WeightFamily::custom: return q_(x);
    }
    return 0.0;
}

double WeightSpec::dQ(double x) const {
    switch (family_) {
        case WeightFamily::hermite: return x;
        case WeightFamily::freud: {
            if (x == 0.0) return 0.0;
            const double mag = 0.5 * c_ * lambda_ * std::pow(std::abs(x), lambda_ - 1.0);
            return x > 0.0 ? mag : -mag;
        }
        case WeightFamily::custom: return dq_(x);
    }
    return 0.0;
}

double WeightSpec::d2Q(double x) const {
    switch (family_) {
        case WeightFamily::hermite: return 1.0;
        case WeightFamily::freud: {
            if (x == 0.0) {
                if (lambda_ < 2.0) return std::numeric_limits<double>::infinity();
                return lambda_ == 2.0 ? c_ : 0.0;
            }
            return 0.5 * c_ * lambda_ * (lambda_ - 1.0) * std::pow(std::abs(x), lambda_ - 2.0);
        }
        case WeightFamily::custom: return d2q_(x);
    }
    return 0.0;
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string WeightSpec::weight_id() const { return fnv1a_hex(canonical_); }

bool AdmissibilityReport::admissible() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.pass; });
}

const ClauseResult& AdmissibilityReport::clause(char id) const {
    for (const auto& c : clauses)
        if (c.clause == id) return c;
    throw ValidationError(std::string("no clause '") + id + "' in report");
}

std::vector<double> symmetric_log_grid(double lo, double hi, int count) {
    std::vector<double> grid;
    grid.reserve(2 * static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        const double x = lo * std::pow(hi / lo, t);
        grid.push_back(-x);
        grid.push_back(x);
    }
    std::sort(grid.begin(), grid.end());
    return grid;
}

AdmissibilityReport check_admissibility(const WeightSpec& spec, const std::vector<double>& grid) {
    if (grid.empty()) throw ValidationError("admissibility grid is empty");

    // positive half, sorted, zero excluded
    std::vector<double> pos;
    for (double x : grid) {
        if (!std::isfinite(x)) throw ValidationError("admissibility grid contains a non-finite point");
        if (x != 0.0) pos.push_back(std::abs(x));
    }
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    if (pos.empty()) throw ValidationError("admissibility grid has no nonzero point");

    struct Sample {
        double x, q, dq, d2q;
    };
    auto eval = [&](double x) {
        Sample s{x, spec.Q(x), spec.dQ(x), spec.d2Q(x)};
        if (!std::isfinite(s.q)) throw EvaluationError("non-finite Q", x);
        if (!std::isfinite(s.dq)) throw EvaluationError("non-finite Q'", x);
        if (!std::isfinite(s.d2q)) throw EvaluationError("non-finite Q''", x);
        return s;
    };
    std::vector<Sample> right, left;
    for (double x : pos) {
        right.push_back(eval(x));
        left.push_back(eval(-x));
    }
    const double q0 = spec.Q(0.0);
    const double dq0 = spec.dQ(0.0);
    if (!std::isfinite(q0)) throw EvaluationError("non-finite Q", 0.0);
    if (!std::isfinite(dq0)) throw EvaluationError("non-finite Q'", 0.0);

    AdmissibilityReport rep{};
    constexpr double kTol = 1e-12;

    // (a) Q(0) = 0 and Q' continuous at 0 (one-sided values approach Q'(0))
    {
        const double jump = std::max(std::abs(right.front().dq - dq0), std::abs(left.front().dq - dq0));
        const double scale = std::max(1.0, std::abs(right.back().dq)) * kTol;
        const bool ok = std::abs(q0) <= kTol && jump <= std::max(scale, 10.0 * std::abs(right.front().d2q * pos.front()) + scale);
        rep.clauses.push_back({'a', "Q(0) = 0, Q' continuous", ok, 0.0, std::abs(q0)});
    }
    // (b) Q' non-decreasing over the whole sorted grid
    {
        std::vector<Sample> line(left.rbegin(), left.rend());
        line.push_back({0.0, q0, dq0, 0.0});
        line.insert(line.end(), right.begin(), right.end());
        bool ok = true;
        double witness = 0.0, worst = 0.0;
        for (std::size_t i = 1; i < line.size(); ++i) {
            const double drop = line[i - 1].dq - line[i].dq;
            const double tol = kTol * std::max(1.0, std::abs(line[i].dq));
            if (drop > tol && drop > worst) {
                ok = false;
                worst = drop;
                witness = line[i].x;
            }
        }
        rep.clauses.push_back({'b', "Q' non-decreasing, Q'' exists off 0", ok, witness, worst});
    }
    // (c) Q -> infinity: Q increases toward both grid endpoints
    {
        const double qmax = std::max(right.back().q, left.back().q);
        const double mid = right[right.size() / 2].q;
        const bool ok = right.back().q > right.front().q && left.back().q > left.front().q &&
                        right.back().q >= mid && qmax > 0.0;
        rep.clauses.push_back({'c', "Q(t) -> infinity", ok, pos.back(), std::min(right.back().q, left.back().q)});
    }
    // (d) T quasi-increasing and T >= Lambda > 1
    {
        double min_t = std::numeric_limits<double>::infinity(), witness = 0.0;
        double quasi = 0.0;
        for (const auto* side : {&right, &left}) {
            double running_max = 0.0;
            for (const Sample& s : *side) {
                const double t = s.x * s.dq / s.q;
                if (!std::isfinite(t)) throw EvaluationError("non-finite T", s.x);
                if (t < min_t) {
                    min_t = t;
                    witness = s.x;
                }
                running_max = std::max(running_max, t);
                quasi = std::max(quasi, running_max / t);
            }
        }
        rep.quasi_increasing_constant = quasi;
        const double floor = spec.lambda_floor();
        const bool ok = min_t > 1.0 + kTol && floor > 1.0 && min_t >= floor * (1.0 - 1e-10) && std::isfinite(quasi);
        rep.clauses.push_back({'d', "T quasi-increasing, T >= Lambda > 1", ok, witness, min_t});
    }
    // (e) Q''/|Q'| <= C2 |Q'|/Q, reported as the constant C2
    {
        double worst = 0.0, witness = 0.0;
        for (const auto* side : {&right, &left}) {
            for (const Sample& s : *side) {
                if (s.dq == 0.0) continue;
                const double ratio = s.d2q * s.q / (s.dq * s.dq);
                if (ratio > worst) {
                    worst = ratio;
                    witness = s.x;
                }
            }
        }
        rep.clause_e_constant = worst;
        rep.clauses.push_back({'e', "Q''/|Q'| <= C2 |Q'|/Q", std::isfinite(worst), witness, worst});
    }
    // evenness, assumed by every limit theorem
    {
        double worst = 0.0, witness = 0.0;
        for (std::size_t i = 0; i < right.size(); ++i) {
            const double d = std::abs(right[i].q - left[i].q) / std::max(1.0, std::abs(right[i].q));
            if (d > worst) {
                worst = d;
                witness = right[i].x;
            }
        }
        rep.clauses.push_back({'s', "Q even", worst <= 1e-12, witness, worst});
    }

    const double xl = pos.back();
    rep.t_limit_estimate = 0.5 * (spec.T(xl) + spec.T(-xl));
    rep.alpha_consistent = std::abs(rep.t_limit_estimate - spec.alpha()) <= 0.05 * spec.alpha();
    return rep;
}

}  // namespace orthorand
