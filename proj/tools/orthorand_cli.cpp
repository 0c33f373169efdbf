// orthorand command line: one subcommand per experiment family.
//
// Every subcommand reads its settings from three layers: built-in defaults,
// then `--config file.json` (flat keys, or a section named after the
// subcommand), then explicit flags. Exit codes: 0 ok, 2 validation,
// 3 numeric, 4 IO.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "orthorand/orthorand.hpp"

using nlohmann::json;
using namespace orthorand;

namespace {

enum class Kind { str, integer, uinteger, real, boolean, int_list, real_list, pair, pair_list, object };

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

double to_real(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("--" + key + ": '" + s + "' is not a number");
}

long long to_int(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("--" + key + ": '" + s + "' is not an integer");
}

json convert(Kind kind, const std::string& s, const std::string& key) {
    switch (kind) {
        case Kind::str: return s;
        case Kind::integer: return to_int(s, key);
        case Kind::uinteger: {
            if (!s.empty() && s[0] == '-') throw ValidationError("--" + key + " must be non-negative");
            try {
                std::size_t used = 0;
                const unsigned long long v = std::stoull(s, &used);
                if (used == s.size()) return v;
            } catch (const std::exception&) {
            }
            throw ValidationError("--" + key + ": '" + s + "' is not an unsigned integer");
        }
        case Kind::real: return to_real(s, key);
        case Kind::boolean:
            if (s == "true" || s == "1" || s == "yes") return true;
            if (s == "false" || s == "0" || s == "no") return false;
            throw ValidationError("--" + key + " expects true or false");
        case Kind::int_list: {
            json a = json::array();
            for (const auto& p : split(s, ',')) a.push_back(to_int(p, key));
            return a;
        }
        case Kind::real_list: {
            json a = json::array();
            for (const auto& p : split(s, ',')) a.push_back(to_real(p, key));
            return a;
        }
        case Kind::pair: {
            auto ab = split(s, ',');
            if (ab.size() == 1) ab = split(s, ':');
            if (ab.size() != 2) throw ValidationError("--" + key + " expects a,b");
            return json::array({to_real(ab[0], key), to_real(ab[1], key)});
        }
        case Kind::pair_list: {
            json a = json::array();
            for (const auto& p : split(s, ',')) {
                const auto ab = split(p, ':');
                if (ab.size() != 2) throw ValidationError("--" + key + " expects a:b pairs separated by commas");
                a.push_back({to_real(ab[0], key), to_real(ab[1], key)});
            }
            return a;
        }
        case Kind::object: break;
    }
    throw ValidationError("--" + key + " cannot be set from the command line");
}

/// Defaults, then the config file, then flags.
class Settings {
public:
    Settings(CLI::App* app, std::string section) : app_(app), section_(std::move(section)) {
        app_->add_option("--config", config_path_, "JSON settings file (flags take precedence)");
    }

    void add(const std::string& key, Kind kind, json def, const std::string& help, std::string flag = "") {
        if (flag.empty()) {
            flag = key;
            for (auto& c : flag)
                if (c == '_') c = '-';
        }
        auto slot = std::make_unique<std::string>();
        CLI::Option* opt = nullptr;
        if (kind != Kind::object) opt = app_->add_option("--" + flag, *slot, help);
        entries_[key] = Entry{kind, std::move(def), opt, std::move(slot), flag};
    }

    json resolve() const {
        json out = json::object();
        for (const auto& [k, e] : entries_) out[k] = e.def;
        if (!config_path_.empty()) {
            json file;
            try {
                file = json::parse(read_text_file(config_path_));
            } catch (const json::parse_error& e) {
                throw ValidationError("config " + config_path_ + " is not valid JSON: " + e.what());
            }
            if (!file.is_object()) throw ValidationError("config " + config_path_ + " must be a JSON object");
            if (file.contains(section_) && file[section_].is_object()) file = file[section_];
            for (const auto& [k, v] : file.items()) {
                if (k == "schema_version") continue;
                // per-subcommand sections of a shared file are skipped
                if (v.is_object() && !entries_.count(k)) continue;
                if (!entries_.count(k)) throw ValidationError("config key '" + k + "' is not used by " + section_);
                out[k] = v;
            }
        }
        for (const auto& [k, e] : entries_)
            if (e.opt != nullptr && e.opt->count() > 0) out[k] = convert(e.kind, *e.slot, e.flag);
        return out;
    }

private:
    struct Entry {
        Kind kind;
        json def;
        CLI::Option* opt;
        std::unique_ptr<std::string> slot;
        std::string flag;
    };
    CLI::App* app_;
    std::string section_;
    std::string config_path_;
    std::map<std::string, Entry> entries_;
};

template <typename T>
T get(const json& s, const char* key) {
    try {
        return s.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("setting '") + key + "' has the wrong type");
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON to stdout, or to the file when out is set
void deliver(const std::string& out, const std::string& text) {
    if (out.empty())
        std::cout << text;
    else
        write_text_file(out, text);
}

// ---------------------------------------------------------------- recurrence

void add_recurrence(Settings& s) {
    s.add("weight", Kind::str, "hermite", "hermite or freud:c,lambda");
    s.add("n_max", Kind::integer, 200, "highest degree N");
    s.add("method", Kind::str, "auto", "auto (closed form when known) or stieltjes");
    s.add("out", Kind::str, "", "output JSON (stdout when empty)");
}

int run_recurrence(const json& s) {
    const WeightSpec spec = WeightSpec::parse(get<std::string>(s, "weight"));
    const int N = get<int>(s, "n_max");
    const std::string method = get<std::string>(s, "method");
    RecurrenceTable t;
    if (method == "auto")
        t = TableCache().recurrence(spec, N);
    else if (method == "stieltjes")
        t = stieltjes_recurrence(spec, N);
    else
        throw ValidationError("--method must be auto or stieltjes");
    deliver(get<std::string>(s, "out"), json(t).dump(1) + "\n");
    return 0;
}

// ---------------------------------------------------------------------- mrs

void add_mrs(Settings& s) {
    s.add("weight", Kind::str, "hermite", "hermite or freud:c,lambda");
    s.add("n_max", Kind::integer, 0, "emit n = 1..N (overrides --n)");
    s.add("n", Kind::int_list, json::array({100, 200, 400}), "degrees, comma separated");
    s.add("mass", Kind::boolean, false, "also integrate the equilibrium density (true/false)");
    s.add("out", Kind::str, "", "CSV n,a_n (stdout when empty)");
}

int run_mrs(const json& s) {
    const WeightSpec spec = WeightSpec::parse(get<std::string>(s, "weight"));
    std::vector<int> ns = get<std::vector<int>>(s, "n");
    if (const int n_max = get<int>(s, "n_max"); n_max > 0) {
        ns.clear();
        for (int n = 1; n <= n_max; ++n) ns.push_back(n);
    }
    const bool mass = get<bool>(s, "mass");
    const TableCache cache;
    std::ostringstream csv;
    csv << "n,a_n" << (mass ? ",equilibrium_mass" : "") << '\n';
    for (int n : ns) {
        if (n < 1) throw ValidationError("--n values must be positive");
        const double a = cache.mrs(spec, n);
        csv << n << ',' << fmt(a);
        if (mass) csv << ',' << fmt(equilibrium_density(spec, n, a).total_mass());
        csv << '\n';
    }
    deliver(get<std::string>(s, "out"), csv.str());
    return 0;
}

// ------------------------------------------------------ simulate and measure

void add_experiment(Settings& s, bool measure) {
    const ExperimentConfig d;
    if (!measure) s.add("kind", Kind::str, "global", "global or local");
    s.add("weight", Kind::str, d.weight, "hermite or freud:c,lambda");
    s.add("ensemble", Kind::str, d.ensemble, "gaussian, rademacher, uniform or heavy:eps0");
    s.add("n_values", Kind::int_list, measure ? json::array({100, 200, 400}) : json(d.n_values), "degrees", "n");
    s.add("trials", Kind::integer, measure ? 100 : d.trials, "trials per degree");
    s.add("intervals", Kind::pair_list, json::array(), "s-intervals a:b,c:d for local counts");
    if (!measure) s.add("method", Kind::str, d.method, "scan or comrade");
    s.add("seed", Kind::uinteger, d.seed, "master seed");
    s.add("scan_interval", Kind::pair, json::array({d.scan_interval.first, d.scan_interval.second}),
          "scan interval a,b in s-units", "interval");
    s.add("oversample", Kind::integer, d.oversample, "scan grid points per unit s per degree");
    s.add("comrade_cap", Kind::integer, d.comrade_cap, "largest n for comrade roots");
    s.add("cross_check", Kind::boolean, d.cross_check, "comrade count next to the scan (true/false)");
    s.add("workers", Kind::integer, d.workers, "threads (0 = all cores)");
    s.add("record_timing", Kind::boolean, false, "wall-clock in the JSON (true/false)");
    s.add("out", Kind::str, "", "per-trial CSV; the JSON report goes next to it (prefix when no .csv)");
    s.add("out_csv", Kind::str, "", "per-trial CSV");
    s.add("out_json", Kind::str, "", "aggregate JSON");
    s.add("out_density", Kind::str, "", "gnuplot density table");
}

ExperimentConfig experiment_from(const json& s, bool measure) {
    json j = s;
    j.erase("out");
    if (measure) {
        j["kind"] = "measure";
        j["method"] = "comrade";
    }
    ExperimentConfig c = j.get<ExperimentConfig>();
    std::string prefix = get<std::string>(s, "out");
    if (prefix.size() > 4 && prefix.ends_with(".csv")) prefix.resize(prefix.size() - 4);
    if (!prefix.empty()) {
        if (c.out_csv.empty()) c.out_csv = prefix + ".csv";
        if (c.out_json.empty()) c.out_json = prefix + ".json";
    }
    return c;
}

int run_experiment_cmd(const json& s, bool measure) {
    const ExperimentConfig c = experiment_from(s, measure);
    const ExperimentReport r = run_experiment(c);
    emit_report(r);
    for (const NAggregate& g : r.aggregates) {
        std::cout << "n=" << g.n << " trials=" << g.trials << " mean N/n=" << fmt(g.mean_ratio)
                  << " se=" << fmt(g.se_ratio);
        if (g.kac_rice_ratio) std::cout << " kac_rice=" << fmt(*g.kac_rice_ratio);
        if (g.agreement) std::cout << " scan/comrade agreement=" << fmt(*g.agreement);
        if (g.mean_sup_cdf) std::cout << " sup_cdf=" << fmt(*g.mean_sup_cdf);
        for (std::size_t i = 0; i < g.interval_mean.size(); ++i)
            std::cout << " [" << c.intervals[i].first << "," << c.intervals[i].second << "]: " << fmt(g.interval_mean[i])
                      << " vs " << fmt(g.interval_target[i]);
        std::cout << "\n";
    }
    std::cout << "1/sqrt(3)=" << fmt(r.inv_sqrt3) << " config_hash=" << r.config_hash << "\n";
    if (c.out_json.empty() && c.out_csv.empty()) std::cout << json(r).dump(2) << "\n";
    if (!r.complete) {
        std::cerr << "orthorand: run incomplete: " << r.error << "\n";
        return 3;
    }
    return 0;
}

// ------------------------------------------------------------------ kacrice

void add_kacrice(Settings& s) {
    s.add("weight", Kind::str, "hermite", "hermite or freud:c,lambda");
    s.add("n", Kind::integer, 200, "degree");
    s.add("s", Kind::real_list, json::array(), "s values (default: a grid over [a, b])");
    s.add("grid", Kind::integer, 2001, "grid size when --s is not given");
    s.add("a", Kind::real, -1.5, "left end (s-units)");
    s.add("b", Kind::real, 1.5, "right end (s-units)");
    s.add("out", Kind::str, "", "CSV of the density (stdout when empty)");
}

int run_kacrice(const json& s) {
    const WeightSpec spec = WeightSpec::parse(get<std::string>(s, "weight"));
    const int n = get<int>(s, "n");
    if (n < 1) throw ValidationError("--n must be positive");
    const double a = get<double>(s, "a"), b = get<double>(s, "b");
    const TableCache cache;
    const RecurrenceTable t = cache.recurrence(spec, n);
    const double a_n = cache.mrs(spec, n);
    const KacRiceDensity rho(t, spec, n, a_n);
    std::vector<double> grid = get<std::vector<double>>(s, "s");
    if (grid.empty()) {
        const int g = get<int>(s, "grid");
        if (g < 2) throw ValidationError("--grid must be at least 2");
        for (int i = 0; i < g; ++i) grid.push_back(a + (b - a) * i / (g - 1));
    }
    std::ostringstream csv;
    csv << "s,rho_scaled,u_alpha_over_sqrt3,rho_star\n";
    for (double x : grid) {
        const double r = rho(x);
        const double ref = std::abs(x) < 1.0 ? ullman_density(spec.alpha(), x) / std::sqrt(3.0) : 0.0;
        csv << fmt(x) << ',' << fmt(r / n) << ',' << fmt(ref) << ',' << fmt(r) << '\n';
    }
    const double count = expected_count(rho, a, b);
    const std::string out = get<std::string>(s, "out");
    if (out.empty()) {
        std::cout << csv.str();
    } else {
        write_text_file(out, csv.str());
    }
    const json summary{{"weight", spec.canonical()}, {"n", n}, {"a_n", a_n}, {"interval", {a, b}},
                       {"expected_count", count}, {"expected_count_over_n", count / n},
                       {"inv_sqrt3", 1.0 / std::sqrt(3.0)}};
    (out.empty() ? std::cerr : std::cout) << summary.dump() << "\n";
    return 0;
}

// ------------------------------------------------------------------- ullman

void add_ullman(Settings& s) {
    s.add("alpha", Kind::real, 2.0, "Ullman index alpha > 1");
    s.add("grid", Kind::integer, 1001, "grid size over [-1, 1] when --x is not given");
    s.add("x", Kind::real_list, json::array(), "points in [-1, 1]");
    s.add("out", Kind::str, "", "CSV of density and CDF (stdout when empty)");
}

int run_ullman(const json& s) {
    const double alpha = get<double>(s, "alpha");
    const UllmanDistribution mu(alpha);
    std::vector<double> xs = get<std::vector<double>>(s, "x");
    if (xs.empty()) {
        const int g = get<int>(s, "grid");
        if (g < 2) throw ValidationError("--grid must be at least 2");
        for (int i = 0; i < g; ++i) xs.push_back(-1.0 + 2.0 * i / (g - 1));
    }
    std::ostringstream csv;
    csv << "x,density,cdf\n";
    for (double x : xs) csv << fmt(x) << ',' << fmt(mu.density(x)) << ',' << fmt(mu.cdf(x)) << '\n';
    const auto forms = gamma_constant_forms(alpha);
    json moments = json::array();
    for (int m = 0; m <= 6; ++m) moments.push_back(mu.moment(m));
    const json summary{{"alpha", alpha},
                       {"gamma_constant", forms.gamma_form},
                       {"gamma_quadrature", forms.quadrature_form},
                       {"moments", moments},
                       {"total_mass", mu.mass(-1.0, 1.0)}};
    const std::string out = get<std::string>(s, "out");
    if (out.empty()) {
        std::cout << csv.str();
    } else {
        write_text_file(out, csv.str());
    }
    (out.empty() ? std::cerr : std::cout) << summary.dump() << "\n";
    (void)gamma_constant(alpha);  // AccuracyError when the two forms disagree
    return 0;
}

// -------------------------------------------------------------------- probe

void add_probe(Settings& s) {
    const ProbeRequest d;
    s.add("which", Kind::str, "delocalization", "delocalization|derivative|anticoncentration|boundedness|leading");
    s.add("weight", Kind::str, "hermite", "hermite or freud:c,lambda");
    s.add("n", Kind::int_list, json(d.n_values), "degrees (the largest is used by anticoncentration)");
    s.add("ensemble", Kind::str, "gaussian", "coefficient ensemble");
    s.add("trials", Kind::integer, d.trials, "Monte Carlo trials");
    s.add("seed", Kind::uinteger, d.seed, "master seed");
    s.add("c1", Kind::real, d.c1, "anti-concentration exponent");
    s.add("interval_count", Kind::integer, d.interval_count, "anti-concentration intervals");
    s.add("workers", Kind::integer, 0, "threads (0 = all cores)");
    s.add("thresholds", Kind::object, json(d.thresholds), "pass thresholds (config file only)");
    s.add("out", Kind::str, "", "output JSON (stdout when empty)");
}

int run_probe_cmd(const json& s) {
    const WeightSpec spec = WeightSpec::parse(get<std::string>(s, "weight"));
    ProbeRequest req;
    req.kind = parse_probe_kind(get<std::string>(s, "which"));
    req.n_values = get<std::vector<int>>(s, "n");
    if (req.n_values.empty()) throw ValidationError("--n needs at least one degree");
    req.ensemble = Ensemble::parse(get<std::string>(s, "ensemble"));
    req.trials = get<long>(s, "trials");
    req.seed = get<std::uint64_t>(s, "seed");
    req.c1 = get<double>(s, "c1");
    req.interval_count = get<int>(s, "interval_count");
    req.workers = get<int>(s, "workers");
    try {
        req.thresholds = s.at("thresholds").get<ProbeThresholds>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad thresholds block: ") + e.what());
    }
    const int n_max = *std::max_element(req.n_values.begin(), req.n_values.end());
    const TableCache cache;
    const RecurrenceTable t = cache.recurrence(spec, n_max);
    const MrsFunction mrs = [&](int n) { return cache.mrs(spec, n); };
    const ProbeReport r = run_probe(req, t, spec, mrs);
    const std::string out = get<std::string>(s, "out");
    deliver(out, json(r).dump(2) + "\n");
    if (!out.empty())
        std::cout << r.probe_id << " pass=" << (r.pass ? "true" : "false") << " credited=" << (r.credited ? "true" : "false")
                  << "\n";
    return 0;
}

// ---------------------------------------------------------------- correlate

void add_correlate(Settings& s) {
    s.add("k", Kind::integer, 1, "correlation order (must equal the number of points)");
    s.add("points", Kind::real_list, json::array({0.5}), "x points, comma separated");
    s.add("scaled", Kind::boolean, false, "points are in s-units (multiplied by a_n)");
    s.add("n", Kind::integer, 50, "degree");
    s.add("trials", Kind::integer, 100000, "Monte Carlo trials");
    s.add("ensemble", Kind::str, "gaussian", "coefficient ensemble with a density");
    s.add("weight", Kind::str, "hermite", "hermite or freud:c,lambda");
    s.add("seed", Kind::uinteger, 1, "master seed");
    s.add("elimination", Kind::str, "pivoted", "pivoted or leading");
    s.add("workers", Kind::integer, 0, "threads (0 = all cores)");
    s.add("out", Kind::str, "", "CSV output (stdout when empty)");
}

int run_correlate(const json& s) {
    const WeightSpec spec = WeightSpec::parse(get<std::string>(s, "weight"));
    CorrelationRequest req;
    req.n = get<int>(s, "n");
    if (req.n < 1) throw ValidationError("--n must be positive");
    req.points = get<std::vector<double>>(s, "points");
    if (get<int>(s, "k") != req.k()) throw ValidationError("--k must equal the number of --points");
    req.trials = get<long>(s, "trials");
    req.ensemble = Ensemble::parse(get<std::string>(s, "ensemble"));
    req.workers = get<int>(s, "workers");
    const std::string elim = get<std::string>(s, "elimination");
    if (elim == "pivoted")
        req.elimination = Elimination::pivoted;
    else if (elim == "leading")
        req.elimination = Elimination::leading;
    else
        throw ValidationError("--elimination must be pivoted or leading");
    const TableCache cache;
    const RecurrenceTable t = cache.recurrence(spec, req.n);
    const double a_n = cache.mrs(spec, req.n);
    if (get<bool>(s, "scaled"))
        for (double& x : req.points) x *= a_n;

    const CorrelationEstimate est = rho_k_mc(req, t, get<std::uint64_t>(s, "seed"));
    const bool kr = req.k() == 1 && req.ensemble.kind() == EnsembleKind::gaussian;
    const bool joint = req.k() == req.n && req.n <= 3 &&
                       (req.ensemble.kind() == EnsembleKind::gaussian || req.ensemble.kind() == EnsembleKind::uniform);
    std::ostringstream csv;
    for (int i = 0; i < req.k(); ++i) csv << "x" << i + 1 << ',';
    csv << "estimate,std_error";
    if (kr) csv << ",kacrice_reference";
    if (joint) csv << ",joint_density";
    csv << '\n';
    for (double x : req.points) csv << fmt(x) << ',';
    csv << fmt(est.estimate) << ',' << fmt(est.std_error);
    if (kr) csv << ',' << fmt(kac_rice_density(t, spec, a_n, req.n, req.points[0] / a_n) / a_n);
    if (joint) csv << ',' << fmt(joint_density_small_n(t, req.points, req.ensemble));
    csv << '\n';
    deliver(get<std::string>(s, "out"), csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orthorand: random orthogonal polynomial root statistics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("orthorand ") + kVersion);

    struct Command {
        CLI::App* app;
        std::unique_ptr<Settings> settings;
        int (*run)(const json&);
    };
    std::vector<Command> commands;
    auto make = [&](const char* name, const char* help, void (*add)(Settings&), int (*run)(const json&)) {
        CLI::App* sub = app.add_subcommand(name, help);
        auto s = std::make_unique<Settings>(sub, name);
        add(*s);
        commands.push_back({sub, std::move(s), run});
    };
    make("recurrence", "recurrence coefficients A_m and log leading coefficients", add_recurrence, run_recurrence);
    make("mrs", "Mhaskar-Rakhmanov-Saff numbers a_n", add_mrs, run_mrs);
    make("simulate", "Monte Carlo real-root counts (global or local)", [](Settings& s) { add_experiment(s, false); },
         [](const json& s) { return run_experiment_cmd(s, false); });
    make("kacrice", "Kac-Rice density and expected count", add_kacrice, run_kacrice);
    make("ullman", "Ullman density, CDF, moments and gamma constant", add_ullman, run_ullman);
    make("measure", "zero-counting measure distance to the Ullman law", [](Settings& s) { add_experiment(s, true); },
         [](const json& s) { return run_experiment_cmd(s, true); });
    make("probe", "numerical condition probes", add_probe, run_probe_cmd);
    make("correlate", "k-point real-root correlation by Monte Carlo", add_correlate, run_correlate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        for (auto& c : commands)
            if (c.app->parsed()) return c.run(c.settings->resolve());
    } catch (const Error& e) {
        std::cerr << "orthorand: " << e.what() << "\n";
        return e.exit_code();
    } catch (const json::exception& e) {
        std::cerr << "orthorand: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "orthorand: unexpected error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
