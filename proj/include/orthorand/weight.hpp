#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace orthorand {

enum class WeightFamily { hermite, freud, custom };

/// An exponential weight W = exp(-Q). The orthogonality measure is
/// w = W^2 = exp(-2Q); freud(c, lambda) therefore means w = exp(-c|x|^lambda)
/// and Q = (c/2)|x|^lambda, hermite means w = exp(-x^2) and Q = x^2/2.
///
/// Immutable after construction; safe to share between threads.
class WeightSpec {
public:
    using RealFn = std::function<double(double)>;

    static WeightSpec hermite();
    static WeightSpec freud(double c, double lambda);
    /// Custom even weight. `name` identifies it in caches and reports, so two
    /// different Q's must not share a name. Q'' is mandatory.
    static WeightSpec custom(std::string name, RealFn q, RealFn dq, RealFn d2q, double alpha,
                             double lambda_floor);

    /// Parses "hermite" or "freud:c,lambda" (e.g. "freud:1,4").
    static WeightSpec parse(std::string_view text);

    WeightFamily family() const { return family_; }
    double c() const { return c_; }
    double lambda() const { return lambda_; }
    double alpha() const { return alpha_; }
    double lambda_floor() const { return lambda_floor_; }

    double Q(double x) const;
    double dQ(double x) const;
    double d2Q(double x) const;
    /// T(t) = t Q'(t) / Q(t), t != 0.
    double T(double t) const { return t * dQ(t) / Q(t); }

    /// Canonical text form, round-trips through parse() for built-in families.
    const std::string& canonical() const { return canonical_; }
    /// 16 hex digit FNV-1a hash of canonical().
    std::string weight_id() const;

private:
    WeightSpec() = default;

    WeightFamily family_ = WeightFamily::hermite;
    double c_ = 1.0;
    double lambda_ = 2.0;
    double alpha_ = 2.0;
    double lambda_floor_ = 2.0;
    std::string canonical_;
    RealFn q_, dq_, d2q_;
};

/// 64-bit FNV-1a of text as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// One clause of the admissibility definition, (a) through (e), plus the
/// evenness requirement the limit theorems add.
struct ClauseResult {
    char clause;          ///< 'a'..'e', or 's' for symmetry
    std::string name;
    bool pass;
    double witness;       ///< grid point attaining the worst value
    double worst_value;   ///< the statistic at the witness (clause specific)
};

struct AdmissibilityReport {
    std::vector<ClauseResult> clauses;
    double t_limit_estimate;  ///< T at the largest |grid point|
    bool alpha_consistent;    ///< |t_limit_estimate - alpha| within 5% of alpha
    double quasi_increasing_constant;  ///< max_{0<x<y} T(x)/T(y) on the grid
    double clause_e_constant;          ///< max Q''Q/Q'^2 on the grid

    bool admissible() const;
    const ClauseResult& clause(char id) const;
};

/// Numerical check of the weight-class conditions on `grid`. Points are used
/// as given and mirrored for the evenness check; Q'' is only evaluated away
/// from zero. Throws EvaluationError naming the first non-finite point.
AdmissibilityReport check_admissibility(const WeightSpec& spec, const std::vector<double>& grid);

/// Symmetric grid +-[lo..hi] with `count` points per side, geometrically spaced.
std::vector<double> symmetric_log_grid(double lo, double hi, int count);

}  // namespace orthorand
