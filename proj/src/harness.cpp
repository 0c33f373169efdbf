#include "orthorand/harness.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include "orthorand/ensembles.hpp"
#include "orthorand/errors.hpp"
#include "orthorand/limit_laws.hpp"
#include "orthorand/parallel.hpp"
#include "orthorand/quadrature.hpp"
#include "orthorand/rootfind.hpp"

namespace orthorand {

namespace {

constexpr double kHistLo = -1.5, kHistHi = 1.5;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// mu_alpha([a, b]); closed form for the semicircle, density quadrature otherwise
double interval_mass(double alpha, double a, double b) {
    if (alpha == 2.0) {
        auto F = [](double x) { return (x * std::sqrt(1.0 - x * x) + std::asin(x)) / std::numbers::pi; };
        return F(b) - F(a);
    }
    return quad::adaptive([&](double x) { return ullman_density(alpha, x); }, a, b, 1e-12, 1e-11).value;
}

struct Moments {
    long count = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double v) {
        ++count;
        const double d = v - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (v - mean);
    }
    double se() const {
        return count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
    }
};

void fill_histogram(TrialRow& row, const std::vector<double>& roots) {
    row.histogram.assign(kHistBins, 0);
    for (double s : roots) {
        if (s < kHistLo || s >= kHistHi) continue;
        const int b = static_cast<int>((s - kHistLo) / (kHistHi - kHistLo) * kHistBins);
        ++row.histogram[static_cast<std::size_t>(std::clamp(b, 0, kHistBins - 1))];
    }
}

// master seed of the trials at degree n
std::uint64_t degree_seed(std::uint64_t seed, int n) { return trial_seed(seed, static_cast<std::uint64_t>(n)); }

ExperimentReport run_core(const ExperimentConfig& config, const TableCache& cache) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const WeightSpec spec = WeightSpec::parse(config.weight);
    const Ensemble ensemble = Ensemble::parse(config.ensemble);
    const bool measure = config.kind == ExperimentKind::measure;
    const RootMethod method = measure ? RootMethod::comrade : parse_root_method(config.method);

    ExperimentReport report;
    report.config = config;
    report.config_hash = config.hash();
    report.inv_sqrt3 = 1.0 / std::sqrt(3.0);
    report.alpha = spec.alpha();
    const UllmanDistribution mu(spec.alpha());

    const int n_max = *std::max_element(config.n_values.begin(), config.n_values.end());
    const RecurrenceTable table = cache.recurrence(spec, n_max);
    const auto [lo, hi] = config.scan_interval;

    for (int n : config.n_values) {
        const double a_n = cache.mrs(spec, n);
        std::optional<ScanPlan> plan;
        if (method == RootMethod::scan) {
            ScanOptions opts;
            opts.oversample = config.oversample;
            plan.emplace(table, spec, n, a_n, lo, hi, opts);
        }
        const bool comrade = method == RootMethod::comrade || (config.cross_check && n <= config.comrade_cap);
        const std::uint64_t master = degree_seed(config.seed, n);

        std::vector<TrialRow> rows(static_cast<std::size_t>(config.trials));
        std::vector<char> done(rows.size(), 0);
        std::atomic<bool> abort{false};
        std::mutex err_guard;
        std::string first_error;
        parallel_shards(rows.size(), config.workers, [&](std::size_t begin, std::size_t end) {
            for (std::size_t t = begin; t < end && !abort.load(); ++t) {
                try {
                    const auto started = std::chrono::steady_clock::now();
                    const RandomPolynomial poly = sample(ensemble, n, master, t);
                    TrialRow row;
                    row.n = n;
                    row.trial = static_cast<long>(t);
                    RootSet primary;
                    if (plan) {
                        primary = scan_real_roots(poly, *plan);
                        row.real_count = primary.num_real();
                        row.suspicious = static_cast<int>(primary.suspicious_intervals.size());
                        row.refined_pairs = primary.refined_pairs;
                    }
                    if (comrade) {
                        ComradeOptions co;
                        co.cap = config.comrade_cap;
                        RootSet cr = comrade_roots(poly, table, a_n, co);
                        row.comrade_count = cr.count_in(lo, hi);
                        row.comrade_total = cr.num_real();
                        if (measure) {
                            const MeasureDistance md = counting_measure_distance(cr, mu);
                            row.sup_cdf = md.sup_cdf;
                            row.moment_gaps = md.signed_moments;
                        }
                        if (!plan) {
                            row.real_count = row.comrade_count;
                            primary = std::move(cr);
                        }
                    }
                    for (const auto& [a, b] : config.intervals) row.interval_counts.push_back(primary.count_in(a, b));
                    fill_histogram(row, primary.scaled_real_roots);
                    if (config.record_timing)
                        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
                    rows[t] = std::move(row);
                    done[t] = 1;
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(err_guard);
                    if (first_error.empty())
                        first_error = "n=" + std::to_string(n) + " trial " + std::to_string(t) + ": " + e.what();
                    abort = true;
                }
            }
        });
        for (std::size_t t = 0; t < rows.size(); ++t)
            if (done[t]) report.rows.push_back(std::move(rows[t]));

        NAggregate ref;
        ref.n = n;
        ref.a_n = a_n;
        if (ensemble.kind() == EnsembleKind::gaussian) {
            const KacRiceDensity rho(table, spec, n, a_n);
            ref.kac_rice_ratio = expected_count(rho, lo, hi) / n;
            for (const auto& [a, b] : config.intervals) ref.interval_kac_rice.push_back(expected_count(rho, a, b) / n);
        }
        for (const auto& [a, b] : config.intervals)
            ref.interval_target.push_back(report.inv_sqrt3 * interval_mass(spec.alpha(), a, b));
        report.aggregates.push_back(std::move(ref));

        if (!first_error.empty()) {
            report.complete = false;
            report.error = first_error;
            break;
        }
    }
    aggregate(report);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace

const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::global_count: return "global";
        case ExperimentKind::local_count: return "local";
        case ExperimentKind::measure: return "measure";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
    if (text == "global") return ExperimentKind::global_count;
    if (text == "local") return ExperimentKind::local_count;
    if (text == "measure") return ExperimentKind::measure;
    throw ValidationError("unknown experiment kind '" + std::string(text) + "' (expected global, local or measure)");
}

void ExperimentConfig::validate() const {
    (void)WeightSpec::parse(weight);
    (void)Ensemble::parse(ensemble);
    (void)parse_root_method(method);
    if (n_values.empty()) throw ValidationError("n list is empty");
    for (int n : n_values)
        if (n < 1) throw ValidationError("every n must be at least 1");
    if (trials < 1) throw ValidationError("trials must be at least 1");
    if (!(scan_interval.first < scan_interval.second) || scan_interval.first < -3.0 || scan_interval.second > 3.0)
        throw ValidationError("scan interval must be an increasing pair inside [-3, 3]");
    if (oversample < 4) throw ValidationError("oversample must be at least 4");
    if (comrade_cap < 1) throw ValidationError("comrade cap must be positive");
    for (const auto& [a, b] : intervals)
        if (!(a < b) || a < scan_interval.first || b > scan_interval.second)
            throw ValidationError("intervals must be increasing pairs inside the scan interval");
    if (kind == ExperimentKind::local_count) {
        if (intervals.empty()) throw ValidationError("local counts need at least one interval");
        for (const auto& [a, b] : intervals)
            if (!(a > -1.0 && b < 1.0)) throw ValidationError("local-count intervals must lie inside (-1, 1)");
    }
    const bool needs_comrade = kind == ExperimentKind::measure || method == "comrade";
    if (needs_comrade)
        for (int n : n_values)
            if (n > comrade_cap) throw ValidationError("n exceeds the comrade cap for a comrade run");
}

std::string ExperimentConfig::hash() const {
    nlohmann::json j = *this;
    for (const char* k : {"out_csv", "out_json", "out_density", "workers", "record_timing"}) j.erase(k);
    return fnv1a_hex(j.dump());
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    nlohmann::json iv = nlohmann::json::array();
    for (const auto& [a, b] : c.intervals) iv.push_back({a, b});
    j = nlohmann::json{{"schema_version", ExperimentConfig::kSchemaVersion},
                       {"kind", to_string(c.kind)},
                       {"weight", c.weight},
                       {"ensemble", c.ensemble},
                       {"n_values", c.n_values},
                       {"trials", c.trials},
                       {"intervals", iv},
                       {"method", c.method},
                       {"seed", c.seed},
                       {"scan_interval", {c.scan_interval.first, c.scan_interval.second}},
                       {"oversample", c.oversample},
                       {"comrade_cap", c.comrade_cap},
                       {"cross_check", c.cross_check},
                       {"workers", c.workers},
                       {"record_timing", c.record_timing},
                       {"out_csv", c.out_csv},
                       {"out_json", c.out_json},
                       {"out_density", c.out_density}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    if (!j.is_object()) throw ValidationError("experiment config must be a JSON object");
    try {
        const ExperimentConfig d;
        if (j.contains("schema_version") && j.at("schema_version").get<int>() != ExperimentConfig::kSchemaVersion)
            throw ValidationError("unsupported experiment config schema_version");
        c.kind = parse_experiment_kind(j.value("kind", std::string(to_string(d.kind))));
        c.weight = j.value("weight", d.weight);
        c.ensemble = j.value("ensemble", d.ensemble);
        if (j.contains("n_values")) {
            c.n_values = j.at("n_values").get<std::vector<int>>();
        } else if (j.contains("n")) {
            c.n_values = {j.at("n").get<int>()};
        } else {
            c.n_values = d.n_values;
        }
        c.trials = j.value("trials", d.trials);
        c.intervals.clear();
        if (j.contains("intervals"))
            for (const auto& p : j.at("intervals")) c.intervals.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        c.method = j.value("method", d.method);
        c.seed = j.value("seed", d.seed);
        if (j.contains("scan_interval"))
            c.scan_interval = {j.at("scan_interval").at(0).get<double>(), j.at("scan_interval").at(1).get<double>()};
        else
            c.scan_interval = d.scan_interval;
        c.oversample = j.value("oversample", d.oversample);
        c.comrade_cap = j.value("comrade_cap", d.comrade_cap);
        c.cross_check = j.value("cross_check", d.cross_check);
        c.workers = j.value("workers", d.workers);
        c.record_timing = j.value("record_timing", d.record_timing);
        c.out_csv = j.value("out_csv", d.out_csv);
        c.out_json = j.value("out_json", d.out_json);
        c.out_density = j.value("out_density", d.out_density);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed experiment config: ") + e.what());
    }
}

const NAggregate& ExperimentReport::at(int n) const {
    for (const auto& a : aggregates)
        if (a.n == n) return a;
    throw ValidationError("no aggregate for n = " + std::to_string(n));
}

void aggregate(ExperimentReport& report) {
    std::vector<NAggregate> out;
    for (const NAggregate& ref : report.aggregates) {
        NAggregate g;
        g.n = ref.n;
        g.a_n = ref.a_n;
        g.kac_rice_ratio = ref.kac_rice_ratio;
        g.interval_target = ref.interval_target;
        g.interval_kac_rice = ref.interval_kac_rice;
        const std::size_t ni = report.config.intervals.size();
        Moments ratio, sup;
        std::vector<Moments> iv(ni);
        std::vector<double> gap_sum;
        long agree = 0, compared = 0;
        for (const TrialRow& r : report.rows) {
            if (r.n != g.n) continue;
            ratio.add(static_cast<double>(r.real_count) / g.n);
            for (std::size_t i = 0; i < ni && i < r.interval_counts.size(); ++i)
                iv[i].add(static_cast<double>(r.interval_counts[i]) / g.n);
            if (r.comrade_count >= 0) {
                ++compared;
                agree += r.comrade_count == r.real_count;
            }
            if (r.sup_cdf >= 0.0) sup.add(r.sup_cdf);
            if (gap_sum.size() < r.moment_gaps.size()) gap_sum.resize(r.moment_gaps.size(), 0.0);
            for (std::size_t m = 0; m < r.moment_gaps.size(); ++m) gap_sum[m] += std::abs(r.moment_gaps[m]);
        }
        g.trials = ratio.count;
        g.mean_ratio = ratio.mean;
        g.se_ratio = ratio.se();
        if (g.trials >= 30) g.ci95 = std::make_pair(g.mean_ratio - 1.96 * g.se_ratio, g.mean_ratio + 1.96 * g.se_ratio);
        if (compared > 0 && compared == g.trials) g.agreement = static_cast<double>(agree) / static_cast<double>(compared);
        for (const auto& m : iv) {
            g.interval_mean.push_back(m.mean);
            g.interval_se.push_back(m.se());
        }
        if (sup.count > 0) {
            g.mean_sup_cdf = sup.mean;
            g.se_sup_cdf = sup.se();
            for (double s : gap_sum) g.mean_moment_gap.push_back(s / static_cast<double>(sup.count));
        }
        out.push_back(std::move(g));
    }
    report.aggregates = std::move(out);
}

void to_json(nlohmann::json& j, const NAggregate& a) {
    j = nlohmann::json{{"n", a.n},
                       {"trials", a.trials},
                       {"a_n", a.a_n},
                       {"mean_real_over_n", a.mean_ratio},
                       {"se_real_over_n", a.se_ratio},
                       {"ci95", a.ci95 ? nlohmann::json{a.ci95->first, a.ci95->second} : nlohmann::json()},
                       {"kac_rice_over_n", optional_json(a.kac_rice_ratio)},
                       {"scan_comrade_agreement", optional_json(a.agreement)}};
    if (!a.interval_target.empty()) {
        j["interval_mean_over_n"] = a.interval_mean;
        j["interval_se_over_n"] = a.interval_se;
        j["interval_target"] = a.interval_target;
        if (!a.interval_kac_rice.empty()) j["interval_kac_rice_over_n"] = a.interval_kac_rice;
    }
    if (a.mean_sup_cdf) {
        j["mean_sup_cdf"] = *a.mean_sup_cdf;
        j["se_sup_cdf"] = optional_json(a.se_sup_cdf);
        j["mean_abs_moment_gap"] = a.mean_moment_gap;
    }
}

void to_json(nlohmann::json& j, const ExperimentReport& r) {
    j = nlohmann::json{{"schema_version", 1},
                       {"versions",
                        {{"orthorand", kVersion},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                       "." + std::to_string(EIGEN_MINOR_VERSION)}}},
                       {"config", [&] {
                            // worker count is an execution detail; leaving it out keeps
                            // reports byte-identical across machines
                            nlohmann::json c = r.config;
                            c.erase("workers");
                            return c;
                        }()},
                       {"config_hash", r.config_hash},
                       {"seed", r.config.seed},
                       {"status", r.complete ? "complete" : "incomplete"},
                       {"theory", {{"inv_sqrt3", r.inv_sqrt3}, {"alpha", r.alpha}}},
                       {"aggregates", r.aggregates}};
    if (!r.complete) j["error"] = r.error;
    if (r.config.record_timing) j["wall_seconds"] = r.wall_seconds;

    // trends along the n list
    nlohmann::json trends = nlohmann::json::object();
    if (r.aggregates.size() >= 2) {
        bool toward = true, sup_down = true;
        for (std::size_t i = 1; i < r.aggregates.size(); ++i) {
            const auto &p = r.aggregates[i - 1], &c = r.aggregates[i];
            toward = toward && std::abs(c.mean_ratio - r.inv_sqrt3) < std::abs(p.mean_ratio - r.inv_sqrt3);
            if (p.mean_sup_cdf && c.mean_sup_cdf) sup_down = sup_down && *c.mean_sup_cdf < *p.mean_sup_cdf;
        }
        trends["real_fraction_approaches_inv_sqrt3"] = toward;
        if (r.aggregates.front().mean_sup_cdf) trends["sup_cdf_decreasing"] = sup_down;
    }
    j["trends"] = trends;
}

std::string report_csv(const ExperimentReport& report) {
    std::ostringstream os;
    os << "trial,n,method,num_real,num_suspicious,seconds,config_hash,comrade_count,comrade_total,refined_pairs";
    for (std::size_t i = 0; i < report.config.intervals.size(); ++i) os << ",interval_" << i;
    const bool measure = report.config.kind == ExperimentKind::measure;
    if (measure) os << ",sup_cdf,gap_m1,gap_m2,gap_m3,gap_m4";
    os << '\n';
    for (const TrialRow& r : report.rows) {
        os << r.trial << ',' << r.n << ',' << report.config.method << ',' << r.real_count << ',' << r.suspicious << ','
           << (r.seconds >= 0.0 ? fmt_double(r.seconds) : "") << ',' << report.config_hash << ',' << r.comrade_count
           << ',' << r.comrade_total << ',' << r.refined_pairs;
        for (int c : r.interval_counts) os << ',' << c;
        if (measure) {
            os << ',' << fmt_double(r.sup_cdf);
            for (std::size_t m = 0; m < 4; ++m) os << ',' << (m < r.moment_gaps.size() ? fmt_double(r.moment_gaps[m]) : "");
        }
        os << '\n';
    }
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory (" + ec.message() + ")", path.string());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing", path.string());
    f << text;
    f.close();
    if (!f) throw IoError("write failed", path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read", path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void emit_report(const ExperimentReport& report) {
    const ExperimentConfig& c = report.config;
    if (!c.out_csv.empty()) write_text_file(c.out_csv, report_csv(report));
    if (!c.out_json.empty()) write_text_file(c.out_json, nlohmann::json(report).dump(2) + "\n");
    if (!c.out_density.empty()) {
        std::ostringstream os;
        os << "# per n block: s, empirical real-root density / n, (1/sqrt3) u_alpha(s)\n";
        const double width = (kHistHi - kHistLo) / kHistBins;
        for (const NAggregate& g : report.aggregates) {
            std::vector<long> total(kHistBins, 0);
            for (const TrialRow& r : report.rows)
                if (r.n == g.n)
                    for (int b = 0; b < kHistBins && b < static_cast<int>(r.histogram.size()); ++b)
                        total[static_cast<std::size_t>(b)] += r.histogram[static_cast<std::size_t>(b)];
            os << "# n = " << g.n << "\n";
            for (int b = 0; b < kHistBins; ++b) {
                const double s = kHistLo + (b + 0.5) * width;
                const double emp = g.trials > 0 ? static_cast<double>(total[static_cast<std::size_t>(b)]) /
                                                       (static_cast<double>(g.trials) * g.n * width)
                                                 : 0.0;
                const double ref = std::abs(s) < 1.0 ? report.inv_sqrt3 * ullman_density(report.alpha, s) : 0.0;
                os << fmt_double(s) << ' ' << fmt_double(emp) << ' ' << fmt_double(ref) << '\n';
            }
            os << "\n\n";
        }
        write_text_file(c.out_density, os.str());
    }
}

TableCache::TableCache() {
    const char* env = std::getenv("ORTHORAND_CACHE_DIR");
    if (env != nullptr && *env != '\0') dir_ = std::filesystem::path(env);
}

TableCache::TableCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

RecurrenceTable TableCache::recurrence(const WeightSpec& spec, int N) const {
    if (!dir_) return compute_recurrence(spec, N);
    const auto path = *dir_ / ("recurrence_" + spec.weight_id() + "_N" + std::to_string(N) + ".json");
    if (std::filesystem::exists(path)) {
        try {
            RecurrenceTable t = nlohmann::json::parse(read_text_file(path)).get<RecurrenceTable>();
            if (t.weight_id == spec.weight_id() && t.N == N) return t;
        } catch (const nlohmann::json::exception&) {
            // unreadable cache entries are recomputed and overwritten
        } catch (const ValidationError&) {
        }
    }
    RecurrenceTable t = compute_recurrence(spec, N);
    // write-then-rename so concurrent readers never see a partial file
    const auto tmp = path.string() + ".tmp" + std::to_string(reinterpret_cast<std::uintptr_t>(&t));
    write_text_file(tmp, nlohmann::json(t).dump());
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move cache file into place (" + ec.message() + ")", path.string());
    return t;
}

double TableCache::mrs(const WeightSpec& spec, int n) const {
    if (!dir_) return mrs_number(spec, n);
    const auto path = *dir_ / ("mrs_" + spec.weight_id() + ".json");
    nlohmann::json j = nlohmann::json::object();
    if (std::filesystem::exists(path)) {
        try {
            j = nlohmann::json::parse(read_text_file(path));
        } catch (const nlohmann::json::exception&) {
            j = nlohmann::json::object();
        }
    }
    const std::string key = std::to_string(n);
    if (j.is_object() && j.contains("values") && j["values"].contains(key) && j.value("weight_id", "") == spec.weight_id())
        return j["values"][key].get<double>();
    const double a = mrs_number(spec, n);
    if (!j.is_object() || j.value("weight_id", "") != spec.weight_id())
        j = nlohmann::json{{"weight_id", spec.weight_id()}, {"weight", spec.canonical()}, {"values", nlohmann::json::object()}};
    j["values"][key] = a;
    const auto tmp = path.string() + ".tmp" + std::to_string(reinterpret_cast<std::uintptr_t>(&j));
    write_text_file(tmp, j.dump(1));
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move cache file into place (" + ec.message() + ")", path.string());
    return a;
}

ExperimentReport run_global_count(const ExperimentConfig& config, const TableCache& cache) {
    ExperimentConfig c = config;
    c.kind = ExperimentKind::global_count;
    return run_core(c, cache);
}

ExperimentReport run_local_count(const ExperimentConfig& config, const TableCache& cache) {
    ExperimentConfig c = config;
    c.kind = ExperimentKind::local_count;
    return run_core(c, cache);
}

ExperimentReport run_measure_convergence(const ExperimentConfig& config, const TableCache& cache) {
    ExperimentConfig c = config;
    c.kind = ExperimentKind::measure;
    c.method = "comrade";
    return run_core(c, cache);
}

ExperimentReport run_experiment(const ExperimentConfig& config, const TableCache& cache) {
    switch (config.kind) {
        case ExperimentKind::global_count: return run_global_count(config, cache);
        case ExperimentKind::local_count: return run_local_count(config, cache);
        case ExperimentKind::measure: return run_measure_convergence(config, cache);
    }
    throw ValidationError("unknown experiment kind");
}

}  // namespace orthorand
