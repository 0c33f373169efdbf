#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <cstdint>
#include <vector>

#include "orthorand/basis.hpp"
#include "orthorand/ensembles.hpp"
#include "orthorand/recurrence.hpp"

namespace orthorand {

/// Which k coefficients are solved for. `leading` eliminates xi_0..xi_{k-1}
/// as in the Vandermonde form; `pivoted` eliminates the k indices picked by
/// column-pivoted QR of [p_j(x_i)], which keeps eta of order one when the
/// low-degree p_j are tiny next to the kernel (any interior point at
/// moderate n). Both estimate the same rho_k; the prefactor is 1/|det V_J|.
enum class Elimination { leading, pivoted };

struct CorrelationRequest {
    std::vector<double> points;  ///< unscaled x; pairwise gaps > 1e-8
    int n = 0;
    Ensemble ensemble = Ensemble::gaussian();
    long trials = 0;
    int workers = 0;  ///< 0 = hardware concurrency
    Elimination elimination = Elimination::pivoted;

    int k() const { return static_cast<int>(points.size()); }
};

/// V(i, j) = p_j(x_i), i, j < k.
struct VandermondeSystem {
    Eigen::MatrixXd V;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    ScaledValue determinant;  ///< from the LU factors
    double row_norm_product = 0.0;

    VandermondeSystem(const RecurrenceTable& table, const std::vector<double>& points);
    explicit VandermondeSystem(Eigen::MatrixXd v);

    /// prod_{m<k} gamma_m * prod_{i<j} (x_j - x_i) in log form.
    static ScaledValue factorized_determinant(const RecurrenceTable& table, const std::vector<double>& points);
};

/// eta = -V^{-1} tail by partial-pivot LU. Throws ConditioningError when
/// |det V| <= 1e-12 * prod of row norms or the residual exceeds 1e-10 ||tail||.
Eigen::VectorXd eta_solve(const VandermondeSystem& system, const Eigen::VectorXd& tail);

struct CorrelationEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    long trials = 0;
    std::vector<int> eliminated;  ///< the index set J
};

/// Monte Carlo rho_k(x_1..x_k): the coefficients outside J are drawn and
/// xi_J is replaced by eta, weighted by its densities. The
/// per-trial product uses p_j' (the Jacobian of eta) and is accumulated in
/// logs. Trials are seeded by index, so the result does not depend on the
/// worker count. k <= 6.
CorrelationEstimate rho_k_mc(const CorrelationRequest& req, const RecurrenceTable& table, std::uint64_t seed);

/// rho_n(x_1..x_n) for a degree-n polynomial with all n roots real, n <= 3,
/// gaussian or uniform coefficients:
///   prod_{m<=n} gamma_m^{-1} prod_{i<j} |x_i - x_j| int prod_l f(c_l t) |t|^n dt
/// with c_l = sum_{i>=l} (-1)^{n-i} sigma_{n-i}(x) <x^i, p_l>.
double joint_density_small_n(const RecurrenceTable& table, const std::vector<double>& points,
                             const Ensemble& ensemble);

}  // namespace orthorand
