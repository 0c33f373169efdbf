#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orthorand/mrs.hpp"
#include "orthorand/recurrence.hpp"
#include "orthorand/weight.hpp"

namespace orthorand {

inline constexpr const char* kVersion = "1.0.0";

enum class ExperimentKind { global_count, local_count, measure };

const char* to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view text);

struct ExperimentConfig {
    static constexpr int kSchemaVersion = 1;

    ExperimentKind kind = ExperimentKind::global_count;
    std::string weight = "hermite";   ///< WeightSpec::parse form
    std::string ensemble = "gaussian";  ///< Ensemble::parse form
    std::vector<int> n_values{200};
    long trials = 500;
    std::vector<std::pair<double, double>> intervals;  ///< s-units, local counts
    std::string method = "scan";        ///< root method for the primary count
    std::uint64_t seed = 20240601;
    std::pair<double, double> scan_interval{-1.5, 1.5};
    int oversample = 20;
    int comrade_cap = 512;
    bool cross_check = true;  ///< comrade count alongside the scan when n <= comrade_cap
    int workers = 0;          ///< 0 = hardware concurrency; never affects results
    bool record_timing = false;  ///< wall-clock in the JSON (breaks byte-stability)
    std::string out_csv;
    std::string out_json;
    std::string out_density;  ///< optional gnuplot table of root densities

    /// Throws ValidationError on inconsistent settings.
    void validate() const;
    /// FNV-1a over the result-determining fields (outputs, workers and
    /// record_timing excluded), 16 hex digits.
    std::string hash() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

struct TrialRow {
    int n = 0;
    long trial = 0;
    int real_count = 0;      ///< primary method, inside scan_interval
    int comrade_count = -1;  ///< comrade real roots inside scan_interval, -1 if not run
    int comrade_total = -1;  ///< all comrade real roots
    int suspicious = 0;
    int refined_pairs = 0;
    std::vector<int> interval_counts;
    double sup_cdf = -1.0;     ///< measure runs only
    std::vector<double> moment_gaps;  ///< signed, m = 1..4
    std::vector<int> histogram;  ///< scaled real roots in kHistBins bins over [-1.5, 1.5]
    double seconds = -1.0;       ///< wall time of the trial, only with record_timing
};

struct NAggregate {
    int n = 0;
    long trials = 0;
    double a_n = 0.0;
    double mean_ratio = 0.0;  ///< mean real_count / n
    double se_ratio = 0.0;
    std::optional<std::pair<double, double>> ci95;  ///< needs >= 30 trials
    std::optional<double> kac_rice_ratio;  ///< int rho*_n over scan_interval / n, gaussian only
    std::optional<double> agreement;       ///< fraction of trials with scan == comrade count
    std::vector<double> interval_mean;     ///< per interval mean count / n
    std::vector<double> interval_se;
    std::vector<double> interval_target;   ///< (1/sqrt3) mu_alpha([a, b])
    std::vector<double> interval_kac_rice;  ///< int_a^b rho*_n / n, gaussian only
    std::optional<double> mean_sup_cdf, se_sup_cdf;
    std::vector<double> mean_moment_gap;  ///< mean |gap_m|
};

struct ExperimentReport {
    ExperimentConfig config;
    std::string config_hash;
    bool complete = true;
    std::string error;
    double inv_sqrt3 = 0.0;
    double alpha = 0.0;
    std::vector<TrialRow> rows;  ///< ordered by (n, trial)
    std::vector<NAggregate> aggregates;
    double wall_seconds = 0.0;

    const NAggregate& at(int n) const;
};

void to_json(nlohmann::json& j, const NAggregate& a);
/// Aggregates, config, hash and versions; rows go to the CSV.
void to_json(nlohmann::json& j, const ExperimentReport& r);

inline constexpr int kHistBins = 60;

/// Recomputes the aggregates from rows (the report's config decides which).
void aggregate(ExperimentReport& report);

/// Recurrence tables and MRS numbers, cached as JSON under
/// ORTHORAND_CACHE_DIR when that variable is set. Tables are keyed by the
/// exact N because the discretization depends on it.
class TableCache {
public:
    /// Uses ORTHORAND_CACHE_DIR, or no disk cache when unset or empty.
    TableCache();
    explicit TableCache(std::filesystem::path dir);

    const std::optional<std::filesystem::path>& dir() const { return dir_; }
    RecurrenceTable recurrence(const WeightSpec& spec, int N) const;
    double mrs(const WeightSpec& spec, int n) const;

private:
    std::optional<std::filesystem::path> dir_;
};

/// Real-root counts per trial; the report carries mean N/n with a normal 95%
/// CI and, for gaussian coefficients, the Kac-Rice reference.
ExperimentReport run_global_count(const ExperimentConfig& config, const TableCache& cache = TableCache());

/// As run_global_count plus per-interval counts against (1/sqrt3) mu_alpha.
ExperimentReport run_local_count(const ExperimentConfig& config, const TableCache& cache = TableCache());

/// Comrade roots per trial compared with mu_alpha (sup-CDF and moments).
ExperimentReport run_measure_convergence(const ExperimentConfig& config, const TableCache& cache = TableCache());

/// Dispatches on config.kind.
ExperimentReport run_experiment(const ExperimentConfig& config, const TableCache& cache = TableCache());

/// Per-trial CSV text, byte-stable for identical inputs.
std::string report_csv(const ExperimentReport& report);

/// Writes config.out_csv, config.out_json and config.out_density when set.
/// Throws IoError naming the path on failure.
void emit_report(const ExperimentReport& report);

/// Writes text to path, creating parent directories; IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
/// IoError when missing or unreadable.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace orthorand
