#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "orthorand/weight.hpp"

namespace orthorand {

/// Mhaskar-Rakhmanov-Saff number a_n of an even weight: the positive root of
///   n = (2/pi) int_0^1 a t Q'(a t) / sqrt(1 - t^2) dt.
/// Solved by bracketing plus safeguarded Newton to `rel_tol`. Throws
/// SolverError when no bracket exists inside [1e-8, 1e8].
double mrs_number(const WeightSpec& spec, double n, double rel_tol = 1e-10);

/// a_1..a_N for one weight. Immutable once built.
struct MrsTable {
    static constexpr int kSchemaVersion = 1;

    std::string weight_id;
    double tol = 1e-10;
    std::vector<double> a;  ///< a[n-1] = a_n

    static MrsTable build(const WeightSpec& spec, int n_max, double tol = 1e-10);

    int n_max() const { return static_cast<int>(a.size()); }
    double operator()(int n) const;
};

void to_json(nlohmann::json& j, const MrsTable& t);
void from_json(const nlohmann::json& j, MrsTable& t);

/// Density of the weighted equilibrium measure on [-a_n, a_n] (total mass n),
///   sigma_n(x) = sqrt(a^2 - x^2)/pi^2 int_{-a}^{a} (Q'(s) - Q'(x))/(s - x) ds/sqrt(a^2 - s^2).
/// Each evaluation integrates in s = a sin(phi) with Gauss-Legendre order
/// doubling on the two halves phi < 0, phi > 0.
class EquilibriumDensity {
public:
    EquilibriumDensity(WeightSpec spec, int n, double a_n);

    int n() const { return n_; }
    double a_n() const { return a_n_; }
    /// Order reached at the last probe evaluation done during construction.
    int quadrature_order() const { return order_; }

    /// sigma_n(x); zero outside (-a_n, a_n). Throws AccuracyError when the
    /// inner quadrature fails to settle.
    double operator()(double x) const;

    /// int sigma_n over (-a_n, a_n).
    double total_mass() const;

private:
    WeightSpec spec_;
    int n_;
    double a_n_;
    int order_ = 0;
};

EquilibriumDensity equilibrium_density(const WeightSpec& spec, int n, double a_n);

}  // namespace orthorand
