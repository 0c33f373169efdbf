#include "orthorand/basis.hpp"

#include <algorithm>

#include "orthorand/errors.hpp"
#include "orthorand/quadrature.hpp"

namespace orthorand {

namespace {

void check_degree(const RecurrenceTable& t, int n) {
    if (n < 0 || n > t.N) throw DomainError("degree " + std::to_string(n) + " outside the recurrence table");
}

struct RawWalk {
    Eigen::VectorXd p, dp, ddp;
    Eigen::VectorXi shift;
    int max_shift = 0;
};

template <int Deriv>
RawWalk raw_walk(const RecurrenceTable& t, int n, double x) {
    RawWalk r;
    r.p.resize(n + 1);
    if constexpr (Deriv >= 1) r.dp.resize(n + 1);
    if constexpr (Deriv >= 2) r.ddp.resize(n + 1);
    r.shift.resize(n + 1);
    int shift = 0;
    walk_basis<Deriv>(
        t, n, x,
        [&](int k, double p, double d, double dd) {
            r.p[k] = p;
            if constexpr (Deriv >= 1) r.dp[k] = d;
            if constexpr (Deriv >= 2) r.ddp[k] = dd;
            r.shift[k] = shift;
        },
        [&](int dir) { shift += dir; });
    r.max_shift = r.shift.maxCoeff();
    return r;
}

// 2^(500 (s - ref)) for the exponent gap between an entry and the reference
inline double unit_factor(int s, int ref) {
    return std::ldexp(1.0, kRescaleBits * (s - ref));
}

}  // namespace

std::vector<ScaledValue> WeightedBasis::values() const {
    std::vector<ScaledValue> out(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = q(k);
    return out;
}

Eigen::VectorXd WeightedBasis::normalized() const {
    const int ref = shift.maxCoeff();
    Eigen::VectorXd row(n + 1);
    for (int k = 0; k <= n; ++k) row[k] = mant[k] * unit_factor(shift[k], ref);
    const double norm = row.norm();
    return norm > 0.0 ? Eigen::VectorXd(row / norm) : row;
}

double WeightedBasis::log_norm() const {
    const int ref = shift.maxCoeff();
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double v = mant[k] * unit_factor(shift[k], ref);
        s += v * v;
    }
    return 0.5 * std::log(s) + ref * kRescaleLog - q_at_x;
}

WeightedBasis eval_weighted(const RecurrenceTable& table, const WeightSpec& spec, int n, double x,
                            bool with_derivatives) {
    check_degree(table, n);
    WeightedBasis b;
    b.x = x;
    b.n = n;
    b.q_at_x = spec.Q(x);
    if (with_derivatives) {
        RawWalk r = raw_walk<1>(table, n, x);
        const double dq = spec.dQ(x);
        b.mant = std::move(r.p);
        b.dmant = r.dp - dq * b.mant;
        b.shift = std::move(r.shift);
    } else {
        RawWalk r = raw_walk<0>(table, n, x);
        b.mant = std::move(r.p);
        b.shift = std::move(r.shift);
    }
    return b;
}

KernelValues kernel_at(const RecurrenceTable& table, const WeightSpec& spec, int n, double x) {
    check_degree(table, n);
    const RawWalk r = raw_walk<2>(table, n, x);
    const double q1 = spec.dQ(x);
    double q2 = spec.d2Q(x);
    if (!std::isfinite(q2)) q2 = 0.0;  // kink of |x|^lambda at 0 only affects K~22
    const int ref = r.max_shift;

    quad::CompensatedSum s00, s01, s11, s22, r00, r01, r11, r22;
    for (int k = 0; k <= n; ++k) {
        const double f = unit_factor(r.shift[k], ref);
        const double p = r.p[k] * f, d = r.dp[k] * f, dd = r.ddp[k] * f;
        const double w1 = d - q1 * p;
        const double w2 = dd - 2.0 * q1 * d + (q1 * q1 - q2) * p;
        s00.add(p * p);
        s01.add(p * w1);
        s11.add(w1 * w1);
        s22.add(w2 * w2);
        r00.add(p * p);
        r01.add(p * d);
        r11.add(d * d);
        r22.add(dd * dd);
    }
    KernelValues kv;
    kv.x = x;
    kv.n = n;
    kv.log_raw_scale = 2.0 * ref * kRescaleLog;
    kv.log_scale = kv.log_raw_scale - 2.0 * spec.Q(x);
    kv.kt00 = s00.value();
    kv.kt01 = s01.value();
    kv.kt11 = s11.value();
    kv.kt22 = s22.value();
    kv.k00 = r00.value();
    kv.k01 = r01.value();
    kv.k11 = r11.value();
    kv.k22 = r22.value();
    return kv;
}

CombinationValue eval_combination(const RecurrenceTable& table, const Eigen::VectorXd& coeffs, double x) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    check_degree(table, n);
    double value = 0.0, deriv = 0.0;
    int shift = 0;
    walk_basis<1>(
        table, n, x,
        [&](int k, double p, double d, double) {
            value += coeffs[k] * p;
            deriv += coeffs[k] * d;
        },
        [&](int dir) {
            const double f = dir > 0 ? kRescaleDown : kRescaleUp;
            value *= f;
            deriv *= f;
            shift += dir;
        });
    return {value, deriv, shift * kRescaleLog};
}

BasisRow basis_row(const RecurrenceTable& table, int n, double x) {
    check_degree(table, n);
    const RawWalk r = raw_walk<1>(table, n, x);
    BasisRow row;
    row.p.resize(n + 1);
    row.dp.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double f = unit_factor(r.shift[k], r.max_shift);
        row.p[k] = r.p[k] * f;
        row.dp[k] = r.dp[k] * f;
    }
    row.log_scale = r.max_shift * kRescaleLog;
    return row;
}

}  // namespace orthorand
