#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orthorand/ensembles.hpp"
#include "orthorand/recurrence.hpp"
#include "orthorand/weight.hpp"

namespace orthorand {

/// Calibration constants for the pass rules. These are desk-scale choices,
/// not constants from the theory.
struct ProbeThresholds {
    double parseval_rel = 1e-10;
    double delocalization_slope_max = -0.05;
    double derivative_ratio_max = 2.0;
    double anticoncentration_failures_max = 10.0;  ///< per interval, i.e. probability <= this / trials
    double boundedness_ratio_max = 2.0;
    double leading_coeff_final_rel = 0.05;
};

void to_json(nlohmann::json& j, const ProbeThresholds& t);
void from_json(const nlohmann::json& j, ProbeThresholds& t);

/// Written into every report: the conditions are stated with suprema over
/// complex neighbourhoods, the probes take suprema over real grids.
inline constexpr const char* kProbeSubstitution =
    "real-line probe: suprema over complex discs replaced by suprema over a real s-grid";

struct ProbeReport {
    std::string probe_id;
    std::string header = kProbeSubstitution;
    std::vector<int> n_values;
    std::vector<double> statistic;
    std::vector<double> secondary;  ///< probe-specific second statistic, may be empty
    double slope = 0.0;             ///< least-squares slope of log statistic on log n (>= 3 points)
    bool pass = false;
    /// pass && the Parseval probe passed; set by run_probe
    bool credited = false;
    nlohmann::json details = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const ProbeReport& r);

/// a_n as a function of n; mrs_number by default.
using MrsFunction = std::function<double(int)>;
MrsFunction default_mrs(const WeightSpec& spec);

/// Least-squares slope of log y on log x.
double loglog_slope(const std::vector<int>& x, const std::vector<double>& y);

/// Parseval on random coefficient vectors with the (n+1)-point Gauss rule:
/// statistic(n) = max relative error of int (sum xi_k p_k)^2 w against |xi|^2.
ProbeReport probe_parseval(const RecurrenceTable& table, const std::vector<int>& n_values, std::uint64_t seed,
                           int vectors = 8, const ProbeThresholds& th = {});

/// max over s_grid and k <= n of |q_k(a_n s)| / sqrt(sum_j q_j(a_n s)^2);
/// passes when the log-log slope is at most the threshold.
ProbeReport probe_delocalization(const RecurrenceTable& table, const WeightSpec& spec, const MrsFunction& mrs,
                                 const std::vector<int>& n_values, const std::vector<double>& s_grid,
                                 const ProbeThresholds& th = {});

/// max over s_grid of a_n^2 (K~11/K~)(a_n s) / n^2 with the weighted kernels;
/// secondary is a_n^4 (K~22/K~) / n^4. Passes when the statistic at the
/// largest n is at most ratio_max times the one at the smallest n.
ProbeReport probe_derivative_growth(const RecurrenceTable& table, const WeightSpec& spec, const MrsFunction& mrs,
                                    const std::vector<int>& n_values, const std::vector<double>& s_grid,
                                    const ProbeThresholds& th = {});

/// `interval_count` intervals of length 1/n (s-units) spread over [-0.9, 0.9];
/// per interval the fraction of trials with max over 16 points of
/// |W P| / sqrt(K~) <= exp(-n^c1). Passes when no interval exceeds
/// failures_max / trials.
ProbeReport probe_anticoncentration(const RecurrenceTable& table, const WeightSpec& spec, const MrsFunction& mrs,
                                    const Ensemble& ensemble, int n, int interval_count, double c1, long trials,
                                    std::uint64_t seed, int workers = 0, const ProbeThresholds& th = {});

/// max over trials and s in [-1.2, 1.2] of |W P_n(a_n s)| / (n |xi|). The
/// sup-norm scaling bounds this by a constant, so the statistic must not grow:
/// passes when statistic(n_max) <= ratio_max * statistic(n_min).
ProbeReport probe_boundedness(const RecurrenceTable& table, const WeightSpec& spec, const MrsFunction& mrs,
                              const Ensemble& ensemble, const std::vector<int>& n_values, long trials,
                              std::uint64_t seed, int workers = 0, const ProbeThresholds& th = {});

/// a_n gamma_n^(1/n) against 2 e^(1/alpha); passes when the relative error
/// decreases along n_values and ends below the threshold.
ProbeReport probe_leading_coeff(const RecurrenceTable& table, const WeightSpec& spec, const MrsFunction& mrs,
                                const std::vector<int>& n_values, const ProbeThresholds& th = {});

enum class ProbeKind { delocalization, derivative, anticoncentration, boundedness, leading };

ProbeKind parse_probe_kind(std::string_view text);
const char* to_string(ProbeKind k);

struct ProbeRequest {
    ProbeKind kind = ProbeKind::delocalization;
    std::vector<int> n_values{64, 128, 256, 512};
    Ensemble ensemble = Ensemble::gaussian();
    long trials = 1000;
    std::uint64_t seed = 1;
    double c1 = 0.5;
    int interval_count = 20;
    int workers = 0;
    ProbeThresholds thresholds;
};

/// Runs the Parseval probe on min(n, 200) for each n, then the requested
/// probe; the returned report is credited only when both pass. The Parseval
/// report is attached under details["parseval"].
ProbeReport run_probe(const ProbeRequest& req, const RecurrenceTable& table, const WeightSpec& spec,
                      const MrsFunction& mrs);

}  // namespace orthorand
