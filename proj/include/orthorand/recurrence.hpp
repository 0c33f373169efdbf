#pragma once

#include <Eigen/Core>

#include <string>

#include <nlohmann/json.hpp>

#include "orthorand/weight.hpp"

namespace orthorand {

enum class RecurrenceMethod { stieltjes, closed_form };

/// Orthonormal three-term recurrence
///   x p_m = A_m p_{m+1} + B_m p_m + A_{m-1} p_{m-1},   p_0 = 1/sqrt(mu0),
/// for m = 0..N. Leading coefficients are kept as logarithms because they
/// leave double range long before the recurrence itself does.
struct RecurrenceTable {
    static constexpr int kSchemaVersion = 1;

    std::string weight_id;
    int N = 0;
    Eigen::VectorXd A;          ///< A_0..A_N, all positive
    Eigen::VectorXd B;          ///< B_0..B_N, exactly zero for even weights
    Eigen::VectorXd log_gamma;  ///< log of the leading coefficient of p_0..p_N
    double mu0 = 0.0;           ///< int w dx
    RecurrenceMethod method = RecurrenceMethod::closed_form;

    double gamma(int k) const;
};

void to_json(nlohmann::json& j, const RecurrenceTable& t);
void from_json(const nlohmann::json& j, RecurrenceTable& t);

struct StieltjesOptions {
    /// total discretization nodes >= nodes_per_degree * (N + 1)
    int nodes_per_degree = 8;
    int panel_order = 16;
    /// geometric panels between 0 and the first uniform panel
    int grading_levels = 20;
};

/// Recurrence coefficients up to degree N. Hermite uses the closed form
/// A_m = sqrt((m+1)/2); every other weight runs a discretized Stieltjes
/// procedure on composite Gauss-Legendre panels over [0, R], mirrored.
/// Throws StabilityError if orthogonality against p_{m-2} degrades past 1e-8.
RecurrenceTable compute_recurrence(const WeightSpec& spec, int N, const StieltjesOptions& opts = {});

/// Always runs the discretized Stieltjes procedure, even for hermite.
RecurrenceTable stieltjes_recurrence(const WeightSpec& spec, int N, const StieltjesOptions& opts = {});

struct GaussRule {
    Eigen::VectorXd nodes;    ///< ascending
    Eigen::VectorXd weights;  ///< positive, summing to mu0
};

/// m-point Gauss rule for the table's measure, 1 <= m <= N+1. Nodes are the
/// Jacobi matrix eigenvalues (implicit QL); weights are the Christoffel
/// numbers, identical to mu0 * (first eigenvector component)^2.
GaussRule gauss_rule(const RecurrenceTable& table, int m);

/// p_{m+k} = U(x) p_m + V(x) p_{m-1}; coefficients in ascending powers of x.
struct JumpCoefficients {
    Eigen::VectorXd U;  ///< degree k
    Eigen::VectorXd V;  ///< degree k-1
};

/// Iterates the recurrence symbolically on coefficient arrays. Requires
/// m >= 1, 1 <= k <= 64, m + k <= N; throws RangeError on overflow.
JumpCoefficients jump_recurrence_coeffs(const RecurrenceTable& table, int m, int k);

/// Matrix of <x^i, p_l> for 0 <= i <= i_max, 0 <= l <= l_max, integrated by
/// a Gauss rule of the table's measure. Verifies orthogonality (entries with
/// i < l vanish) and the diagonal 1/gamma_l; throws NumericError otherwise.
Eigen::MatrixXd moment_inner_products(const RecurrenceTable& table, int i_max, int l_max);

}  // namespace orthorand
