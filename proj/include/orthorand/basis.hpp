#pragma once

// Overflow-safe evaluation of the orthonormal basis. Values are carried as
// mantissas with a shared power-of-two exponent: whenever the running pair
// leaves [2^-500, 2^500] it is rescaled by 2^(-+500) and the exponent is
// tracked, so degrees up to 1e5 and |x| up to a few a_n stay finite.

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "orthorand/recurrence.hpp"
#include "orthorand/weight.hpp"

namespace orthorand {

inline constexpr int kRescaleBits = 500;
inline const double kRescaleLog = kRescaleBits * std::numbers::ln2;
inline const double kRescaleUp = std::ldexp(1.0, kRescaleBits);
inline const double kRescaleDown = std::ldexp(1.0, -kRescaleBits);

/// sign * exp(log_mag); sign == 0 exactly when log_mag == -inf.
struct ScaledValue {
    int sign = 0;
    double log_mag = -std::numeric_limits<double>::infinity();

    static ScaledValue from(double mantissa, double log_scale) {
        if (mantissa == 0.0 || !std::isfinite(mantissa)) return {};
        return {mantissa > 0.0 ? 1 : -1, std::log(std::abs(mantissa)) + log_scale};
    }
    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_mag); }
    bool is_zero() const { return sign == 0; }
};

/// Runs the recurrence for p_0..p_n at x (and p', p'' when Deriv >= 1, 2).
/// visit(k, p, dp, d2p) receives mantissas in the current units; rescale(d)
/// is called with d = +1 (values were divided by 2^500) or d = -1 (multiplied)
/// before the next visit. Returns the final shift count.
template <int Deriv, typename Visit, typename Rescale>
int walk_basis(const RecurrenceTable& t, int n, double x, Visit&& visit, Rescale&& rescale) {
    static_assert(Deriv >= 0 && Deriv <= 2);
    double p_prev = 0.0, p = std::exp(-0.5 * std::log(t.mu0));
    double d_prev = 0.0, d = 0.0;
    double dd_prev = 0.0, dd = 0.0;
    int shift = 0;
    visit(0, p, d, dd);
    for (int m = 0; m < n; ++m) {
        const double a = t.A[m], b = t.B[m];
        const double a_prev = m > 0 ? t.A[m - 1] : 0.0;
        const double inv = 1.0 / a;
        const double p_next = ((x - b) * p - a_prev * p_prev) * inv;
        double d_next = 0.0, dd_next = 0.0;
        if constexpr (Deriv >= 1) d_next = ((x - b) * d + p - a_prev * d_prev) * inv;
        if constexpr (Deriv >= 2) dd_next = ((x - b) * dd + 2.0 * d - a_prev * dd_prev) * inv;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        dd_prev = dd;
        dd = dd_next;
        double mag = std::max(std::abs(p), std::abs(p_prev));
        if constexpr (Deriv >= 1) mag = std::max({mag, std::abs(d), std::abs(d_prev)});
        if constexpr (Deriv >= 2) mag = std::max({mag, std::abs(dd), std::abs(dd_prev)});
        if (mag > kRescaleUp) {
            p *= kRescaleDown, p_prev *= kRescaleDown;
            d *= kRescaleDown, d_prev *= kRescaleDown;
            dd *= kRescaleDown, dd_prev *= kRescaleDown;
            ++shift;
            rescale(+1);
        } else if (mag < kRescaleDown && mag > 0.0) {
            p *= kRescaleUp, p_prev *= kRescaleUp;
            d *= kRescaleUp, d_prev *= kRescaleUp;
            dd *= kRescaleUp, dd_prev *= kRescaleUp;
            --shift;
            rescale(-1);
        }
        visit(m + 1, p, d, dd);
    }
    return shift;
}

/// q_k = W(x) p_k(x) for k = 0..n, with optional derivatives (W p_k)'.
struct WeightedBasis {
    double x = 0.0;
    int n = 0;
    double q_at_x = 0.0;       ///< Q(x)
    Eigen::VectorXd mant;      ///< p_k mantissa
    Eigen::VectorXd dmant;     ///< (p_k' - Q'(x) p_k) mantissa, empty without derivatives
    Eigen::VectorXi shift;     ///< per-entry exponent count

    double log_unit(int k) const { return shift[k] * kRescaleLog - q_at_x; }
    ScaledValue q(int k) const { return ScaledValue::from(mant[k], log_unit(k)); }
    ScaledValue dq(int k) const { return ScaledValue::from(dmant[k], log_unit(k)); }
    std::vector<ScaledValue> values() const;
    /// All q_k on the common scale of the last entry, divided by
    /// sqrt(sum q_j^2); the returned row has unit Euclidean norm.
    Eigen::VectorXd normalized() const;
    /// log sqrt(sum_k q_k^2) = log sqrt(K~_n(x,x)).
    double log_norm() const;
};

WeightedBasis eval_weighted(const RecurrenceTable& table, const WeightSpec& spec, int n, double x,
                            bool with_derivatives = false);

/// Weighted reproducing kernels on the diagonal,
///   K~^{(k,l)}(x,x) = sum_j (W p_j)^{(k)}(x) (W p_j)^{(l)}(x),
/// plus their unweighted counterparts. Both groups are stored as compensated
/// mantissa sums with a common log scale.
struct KernelValues {
    double x = 0.0;
    int n = 0;
    double log_scale = 0.0;      ///< weighted sums = mantissa * exp(log_scale)
    double log_raw_scale = 0.0;  ///< unweighted sums = mantissa * exp(log_raw_scale)
    double kt00 = 0.0, kt01 = 0.0, kt11 = 0.0, kt22 = 0.0;
    double k00 = 0.0, k01 = 0.0, k11 = 0.0, k22 = 0.0;

    double Kt00() const { return kt00 * std::exp(log_scale); }
    double Kt01() const { return kt01 * std::exp(log_scale); }
    double Kt11() const { return kt11 * std::exp(log_scale); }
    double Kt22() const { return kt22 * std::exp(log_scale); }

    /// K~11/K~ - (K~01/K~)^2, the Kac-Rice discriminant from weighted kernels.
    double weighted_discriminant() const {
        const double r = kt01 / kt00;
        return kt11 / kt00 - r * r;
    }
    /// K11/K - (K01/K)^2 from unweighted kernels; equal to the weighted one
    /// in exact arithmetic because the Q' cross terms cancel.
    double raw_discriminant() const {
        const double r = k01 / k00;
        return k11 / k00 - r * r;
    }
};

KernelValues kernel_at(const RecurrenceTable& table, const WeightSpec& spec, int n, double x);

/// Value of P(x) = sum_k c_k p_k(x) and P'(x) on a shared log scale
/// (unweighted; W(x) only rescales, never changes sign).
struct CombinationValue {
    double value = 0.0;
    double derivative = 0.0;
    double log_scale = 0.0;
};

CombinationValue eval_combination(const RecurrenceTable& table, const Eigen::VectorXd& coeffs, double x);

/// Unweighted p_k(x), p_k'(x) for k = 0..n on one common scale
/// (p = p_row * exp(log_scale)); entries far below the final scale underflow.
struct BasisRow {
    Eigen::VectorXd p;
    Eigen::VectorXd dp;
    double log_scale = 0.0;
};

BasisRow basis_row(const RecurrenceTable& table, int n, double x);

}  // namespace orthorand
