#include "orthorand/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orthorand/basis.hpp"
#include "orthorand/errors.hpp"
#include "orthorand/mrs.hpp"
#include "orthorand/parallel.hpp"
#include "orthorand/quadrature.hpp"

namespace orthorand {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_n_values(const std::vector<int>& n_values, const RecurrenceTable& table) {
    if (n_values.empty()) throw ValidationError("probe needs at least one n");
    for (int n : n_values)
        if (n < 1 || n > table.N) throw DomainError("probe n outside the recurrence table");
}

void check_grid(const std::vector<double>& s_grid, double bound) {
    if (s_grid.empty()) throw ValidationError("probe s-grid is empty");
    for (double s : s_grid)
        if (!(std::abs(s) <= bound)) throw DomainError("probe s-grid must lie in the bulk");
}

double slope_or_nan(const std::vector<int>& n, const std::vector<double>& y) {
    return n.size() >= 3 ? loglog_slope(n, y) : kNaN;
}

// unit-norm rows q_k / sqrt(K~) at the given x values
Eigen::MatrixXd normalized_rows(const RecurrenceTable& table, const WeightSpec& spec, int n,
                                const std::vector<double>& xs) {
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(xs.size()), n + 1);
    for (std::size_t i = 0; i < xs.size(); ++i)
        rows.row(static_cast<Eigen::Index>(i)) = eval_weighted(table, spec, n, xs[i]).normalized().transpose();
    return rows;
}

}  // namespace

void to_json(nlohmann::json& j, const ProbeThresholds& t) {
    j = nlohmann::json{{"parseval_rel", t.parseval_rel},
                       {"delocalization_slope_max", t.delocalization_slope_max},
                       {"derivative_ratio_max", t.derivative_ratio_max},
                       {"anticoncentration_failures_max", t.anticoncentration_failures_max},
                       {"boundedness_ratio_max", t.boundedness_ratio_max},
                       {"leading_coeff_final_rel", t.leading_coeff_final_rel}};
}

void from_json(const nlohmann::json& j, ProbeThresholds& t) {
    const ProbeThresholds d;
    t.parseval_rel = j.value("parseval_rel", d.parseval_rel);
    t.delocalization_slope_max = j.value("delocalization_slope_max", d.delocalization_slope_max);
    t.derivative_ratio_max = j.value("derivative_ratio_max", d.derivative_ratio_max);
    t.anticoncentration_failures_max = j.value("anticoncentration_failures_max", d.anticoncentration_failures_max);
    t.boundedness_ratio_max = j.value("boundedness_ratio_max", d.boundedness_ratio_max);
    t.leading_coeff_final_rel = j.value("leading_coeff_final_rel", d.leading_coeff_final_rel);
}

void to_json(nlohmann::json& j, const ProbeReport& r) {
    j = nlohmann::json{{"probe_id", r.probe_id}, {"header", r.header},   {"n_values", r.n_values},
                       {"statistic", r.statistic}, {"slope", r.slope},   {"pass", r.pass},
                       {"credited", r.credited}, {"details", r.details}};
    if (!r.secondary.empty()) j["secondary"] = r.secondary;
}

MrsFunction default_mrs(const WeightSpec& spec) {
    return [spec](int n) { return mrs_number(spec, n); };
}

double loglog_slope(const std::vector<int>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3) throw ValidationError("log-log slope needs at least 3 points");
    const auto m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0.0)) throw DomainError("log-log slope needs positive data");
        const double lx = std::log(static_cast<double>(x[i])), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = m * sxx - sx * sx;
    if (den == 0.0) throw DomainError("log-log slope needs distinct n values");
    return (m * sxy - sx * sy) / den;
}

ProbeReport probe_parseval(const RecurrenceTable& table, const std::vector<int>& n_values, std::uint64_t seed,
                           int vectors, const ProbeThresholds& th) {
    check_n_values(n_values, table);
    ProbeReport r;
    r.probe_id = "parseval";
    r.n_values = n_values;
    for (int n : n_values) {
        const GaussRule rule = gauss_rule(table, n + 1);
        double worst = 0.0;
        for (int v = 0; v < vectors; ++v) {
            const Eigen::VectorXd xi = sample(Ensemble::gaussian(), n, seed, static_cast<std::uint64_t>(v)).xi;
            quad::CompensatedSum sum;
            for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
                const CombinationValue c = eval_combination(table, xi, rule.nodes[i]);
                if (c.value == 0.0) continue;
                sum.add(std::exp(std::log(rule.weights[i]) + 2.0 * (std::log(std::abs(c.value)) + c.log_scale)));
            }
            const double norm2 = xi.squaredNorm();
            worst = std::max(worst, std::abs(sum.value() - norm2) / norm2);
        }
        r.statistic.push_back(worst);
    }
    r.slope = kNaN;
    r.pass = *std::max_element(r.statistic.begin(), r.statistic.end()) <= th.parseval_rel;
    r.details["vectors"] = vectors;
    r.details["tolerance"] = th.parseval_rel;
    r.header = "Parseval identity with the (n+1)-point Gauss rule";
    return r;
}

ProbeReport probe_delocalization(const RecurrenceTable& table, const WeightSpec& spec, const MrsFunction& mrs,
                                 const std::vector<int>& n_values, const std::vector<double>& s_grid,
                                 const ProbeThresholds& th) {
    check_n_values(n_values, table);
    check_grid(s_grid, 0.9);
    if (n_values.size() < 3) throw ValidationError("delocalization probe needs at least 3 n values");
    ProbeReport r;
    r.probe_id = "delocalization";
    r.n_values = n_values;
    nlohmann::json where = nlohmann::json::array();
    for (int n : n_values) {
        const double a = mrs(n);
        double best = 0.0, best_s = 0.0;
        Eigen::Index best_k = 0;
        for (double s : s_grid) {
            const Eigen::VectorXd v = eval_weighted(table, spec, n, a * s).normalized();
            Eigen::Index k;
            const double m = v.cwiseAbs().maxCoeff(&k);
            if (m > best) {
                best = m;
                best_s = s;
                best_k = k;
            }
        }
        r.statistic.push_back(best);
        where.push_back({{"n", n}, {"s", best_s}, {"k", best_k}, {"lower_bound", 1.0 / std::sqrt(n + 1.0)}});
    }
    r.slope = loglog_slope(r.n_values, r.statistic);
    r.pass = r.slope <= th.delocalization_slope_max;
    r.details["argmax"] = where;
    r.details["slope_max"] = th.delocalization_slope_max;
    return r;
}

ProbeReport probe_derivative_growth(const RecurrenceTable& table, const WeightSpec& spec, const MrsFunction& mrs,
                                    const std::vector<int>& n_values, const std::vector<double>& s_grid,
                                    const ProbeThresholds& th) {
    check_n_values(n_values, table);
    check_grid(s_grid, 0.95);
    ProbeReport r;
    r.probe_id = "derivative";
    r.n_values = n_values;
    nlohmann::json where = nlohmann::json::array();
    for (int n : n_values) {
        const double a = mrs(n);
        const double nn = static_cast<double>(n);
        double best = 0.0, best_s = 0.0, second = 0.0, left = 0.0, right = 0.0;
        for (double s : s_grid) {
            const KernelValues kv = kernel_at(table, spec, n, a * s);
            const double v = a * a * (kv.kt11 / kv.kt00) / (nn * nn);
            const double v2 = std::pow(a / nn, 4) * (kv.kt22 / kv.kt00);
            if (v > best) {
                best = v;
                best_s = s;
            }
            second = std::max(second, v2);
            (s < 0.0 ? left : right) = std::max(s < 0.0 ? left : right, v);
        }
        r.statistic.push_back(best);
        r.secondary.push_back(second);
        where.push_back({{"n", n}, {"s", best_s}, {"max_left", left}, {"max_right", right}});
    }
    r.slope = slope_or_nan(r.n_values, r.statistic);
    const double ratio = r.statistic.back() / r.statistic.front();
    r.pass = r.statistic.front() > 0.0 && ratio <= th.derivative_ratio_max;
    r.details["ratio_last_first"] = ratio;
    r.details["ratio_max"] = th.derivative_ratio_max;
    r.details["argmax"] = where;
    r.details["secondary"] = "a_n^4 (K~22/K~) / n^4";
    return r;
}

ProbeReport probe_anticoncentration(const RecurrenceTable& table, const WeightSpec& spec, const MrsFunction& mrs,
                                    const Ensemble& ensemble, int n, int interval_count, double c1, long trials,
                                    std::uint64_t seed, int workers, const ProbeThresholds& th) {
    check_n_values({n}, table);
    if (interval_count < 1) throw ValidationError("anti-concentration needs at least one interval");
    if (trials < 1000) throw ValidationError("anti-concentration needs at least 1000 trials");
    if (!(c1 > 0.0)) throw ValidationError("anti-concentration exponent c1 must be positive");
    constexpr int kSub = 16;
    const double a = mrs(n);
    const double len = 1.0 / n;
    const double lo = -0.9, hi = 0.9 - len;
    std::vector<double> starts(static_cast<std::size_t>(interval_count));
    for (int j = 0; j < interval_count; ++j)
        starts[static_cast<std::size_t>(j)] = interval_count == 1 ? lo : lo + (hi - lo) * j / (interval_count - 1);
    std::vector<double> xs;
    for (double s0 : starts)
        for (int i = 0; i < kSub; ++i) xs.push_back(a * (s0 + len * i / (kSub - 1)));
    const Eigen::MatrixXd rows = normalized_rows(table, spec, n, xs);
    const double log_thr = -std::pow(static_cast<double>(n), c1);

    // per (trial, interval): log of the largest |F| on the subgrid
    std::vector<double> peak(static_cast<std::size_t>(trials) * static_cast<std::size_t>(interval_count));
    parallel_shards(static_cast<std::size_t>(trials), workers, [&](std::size_t begin, std::size_t end) {
        Eigen::VectorXd f;
        for (std::size_t t = begin; t < end; ++t) {
            const Eigen::VectorXd xi = sample(ensemble, n, seed, t).xi;
            f.noalias() = rows * xi;
            for (int j = 0; j < interval_count; ++j) {
                const double m = f.segment(static_cast<Eigen::Index>(j) * kSub, kSub).cwiseAbs().maxCoeff();
                peak[t * static_cast<std::size_t>(interval_count) + static_cast<std::size_t>(j)] = std::log(m);
            }
        }
    });

    ProbeReport r;
    r.probe_id = "anticoncentration";
    r.n_values = {n};
    std::vector<long> failures(static_cast<std::size_t>(interval_count), 0);
    std::vector<double> lowest(static_cast<std::size_t>(interval_count), std::numeric_limits<double>::infinity());
    for (long t = 0; t < trials; ++t)
        for (int j = 0; j < interval_count; ++j) {
            const double v = peak[static_cast<std::size_t>(t) * static_cast<std::size_t>(interval_count) +
                                  static_cast<std::size_t>(j)];
            if (v <= log_thr) ++failures[static_cast<std::size_t>(j)];
            lowest[static_cast<std::size_t>(j)] = std::min(lowest[static_cast<std::size_t>(j)], v);
        }
    const long worst = *std::max_element(failures.begin(), failures.end());
    r.statistic = {static_cast<double>(worst) / static_cast<double>(trials)};
    r.slope = kNaN;
    r.pass = static_cast<double>(worst) <= th.anticoncentration_failures_max;
    r.details["log_threshold"] = log_thr;
    r.details["c1"] = c1;
    r.details["trials"] = trials;
    r.details["ensemble"] = ensemble.id();
    r.details["interval_starts"] = starts;
    r.details["interval_length"] = len;
    r.details["failures"] = failures;
    r.details["min_log_peak"] = lowest;
    r.details["note"] = "no observed failures certifies only P <= ~3/trials, not the all-A polynomial bound";
    return r;
}

ProbeReport probe_boundedness(const RecurrenceTable& table, const WeightSpec& spec, const MrsFunction& mrs,
                              const Ensemble& ensemble, const std::vector<int>& n_values, long trials,
                              std::uint64_t seed, int workers, const ProbeThresholds& th) {
    check_n_values(n_values, table);
    if (trials < 100) throw ValidationError("boundedness probe needs at least 100 trials");
    ProbeReport r;
    r.probe_id = "boundedness";
    r.n_values = n_values;
    for (int n : n_values) {
        const double a = mrs(n);
        const int G = 8 * n + 1;
        Eigen::MatrixXd rows(G, n + 1);
        for (int i = 0; i < G; ++i) {
            const double s = -1.2 + 2.4 * i / (G - 1);
            const WeightedBasis b = eval_weighted(table, spec, n, a * s);
            for (int k = 0; k <= n; ++k) rows(i, k) = b.q(k).value();
        }
        std::vector<double> per_trial(static_cast<std::size_t>(trials));
        parallel_shards(per_trial.size(), workers, [&](std::size_t begin, std::size_t end) {
            Eigen::VectorXd f;
            for (std::size_t t = begin; t < end; ++t) {
                const Eigen::VectorXd xi = sample(ensemble, n, seed, t).xi;
                f.noalias() = rows * xi;
                per_trial[t] = f.cwiseAbs().maxCoeff() / (n * xi.norm());
            }
        });
        double mx = 0.0, mean = 0.0;
        for (double v : per_trial) {
            mx = std::max(mx, v);
            mean += v;
        }
        r.statistic.push_back(mx);
        r.secondary.push_back(mean / static_cast<double>(trials));
        if (!std::isfinite(mx)) throw NumericError("boundedness statistic is not finite");
    }
    r.slope = slope_or_nan(r.n_values, r.statistic);
    const double ratio = r.statistic.back() / r.statistic.front();
    r.pass = ratio <= th.boundedness_ratio_max;
    r.details["ratio_last_first"] = ratio;
    r.details["ratio_max"] = th.boundedness_ratio_max;
    r.details["secondary"] = "mean over trials of the per-trial maximum";
    r.details["s_range"] = {-1.2, 1.2};
    r.details["ensemble"] = ensemble.id();
    r.details["trials"] = trials;
    return r;
}

ProbeReport probe_leading_coeff(const RecurrenceTable& table, const WeightSpec& spec, const MrsFunction& mrs,
                                const std::vector<int>& n_values, const ProbeThresholds& th) {
    check_n_values(n_values, table);
    const double target = 2.0 * std::exp(1.0 / spec.alpha());
    ProbeReport r;
    r.probe_id = "leading";
    r.n_values = n_values;
    bool decreasing = true;
    for (int n : n_values) {
        const double v = std::exp(std::log(mrs(n)) + table.log_gamma[n] / n);
        const double err = std::abs(v - target) / target;
        if (!r.secondary.empty() && err >= r.secondary.back()) decreasing = false;
        r.statistic.push_back(v);
        r.secondary.push_back(err);
    }
    r.slope = slope_or_nan(r.n_values, r.secondary);
    r.pass = decreasing && r.secondary.back() <= th.leading_coeff_final_rel;
    r.details["target"] = target;
    r.details["alpha"] = spec.alpha();
    r.details["secondary"] = "relative error to 2 e^(1/alpha)";
    r.details["final_rel_max"] = th.leading_coeff_final_rel;
    r.header = "exact: uses the stored leading coefficients, no grid";
    return r;
}

ProbeKind parse_probe_kind(std::string_view text) {
    if (text == "delocalization") return ProbeKind::delocalization;
    if (text == "derivative") return ProbeKind::derivative;
    if (text == "anticoncentration") return ProbeKind::anticoncentration;
    if (text == "boundedness") return ProbeKind::boundedness;
    if (text == "leading") return ProbeKind::leading;
    throw ValidationError("unknown probe '" + std::string(text) +
                          "' (expected delocalization, derivative, anticoncentration, boundedness or leading)");
}

const char* to_string(ProbeKind k) {
    switch (k) {
        case ProbeKind::delocalization: return "delocalization";
        case ProbeKind::derivative: return "derivative";
        case ProbeKind::anticoncentration: return "anticoncentration";
        case ProbeKind::boundedness: return "boundedness";
        case ProbeKind::leading: return "leading";
    }
    return "?";
}

ProbeReport run_probe(const ProbeRequest& req, const RecurrenceTable& table, const WeightSpec& spec,
                      const MrsFunction& mrs) {
    check_n_values(req.n_values, table);
    std::vector<int> pn;
    for (int n : req.n_values) pn.push_back(std::min({n, 200, table.N}));
    std::sort(pn.begin(), pn.end());
    pn.erase(std::unique(pn.begin(), pn.end()), pn.end());
    const ProbeReport parseval = probe_parseval(table, pn, req.seed, 8, req.thresholds);

    auto grid = [](double lim, int count) {
        std::vector<double> g(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = -lim + 2.0 * lim * i / (count - 1);
        return g;
    };
    ProbeReport r;
    switch (req.kind) {
        case ProbeKind::delocalization:
            r = probe_delocalization(table, spec, mrs, req.n_values, grid(0.9, 181), req.thresholds);
            break;
        case ProbeKind::derivative:
            r = probe_derivative_growth(table, spec, mrs, req.n_values, grid(0.8, 161), req.thresholds);
            break;
        case ProbeKind::anticoncentration:
            r = probe_anticoncentration(table, spec, mrs, req.ensemble, req.n_values.back(), req.interval_count,
                                        req.c1, req.trials, req.seed, req.workers, req.thresholds);
            break;
        case ProbeKind::boundedness:
            r = probe_boundedness(table, spec, mrs, req.ensemble, req.n_values, req.trials, req.seed, req.workers,
                                  req.thresholds);
            break;
        case ProbeKind::leading:
            r = probe_leading_coeff(table, spec, mrs, req.n_values, req.thresholds);
            break;
    }
    r.credited = parseval.pass && r.pass;
    r.details["parseval"] = parseval;
    r.details["weight"] = spec.canonical();
    r.details["seed"] = req.seed;
    r.details["thresholds"] = req.thresholds;
    return r;
}

}  // namespace orthorand
