#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "orthorand/errors.hpp"

namespace orthorand::quad {

/// Gauss-Legendre rule on [-1, 1].
struct Rule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// Gauss-Legendre rule of order m, computed once per order and cached.
/// Thread-safe; the returned reference stays valid for the program lifetime.
const Rule& gauss_legendre(int m);

/// Integrates f over [a, b] with the m-point Gauss-Legendre rule.
template <typename F>
double fixed_legendre(F&& f, double a, double b, int m) {
    const Rule& rule = gauss_legendre(m);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

struct DoublingResult {
    double value;
    int order;
};

/// Gauss-Legendre on [a, b] with order doubling from `start` until two
/// successive estimates differ by at most abs_tol + rel_tol*|estimate|.
/// Throws AccuracyError when the cap is reached first.
template <typename F>
DoublingResult legendre_doubling(F&& f, double a, double b, double abs_tol, double rel_tol,
                                 int start = 16, int cap = 1 << 14) {
    double prev = fixed_legendre(f, a, b, start);
    for (int m = 2 * start; m <= cap; m *= 2) {
        const double cur = fixed_legendre(f, a, b, m);
        if (std::abs(cur - prev) <= abs_tol + rel_tol * std::abs(cur)) return {cur, m};
        prev = cur;
    }
    throw AccuracyError("Gauss-Legendre order doubling did not converge by order " +
                        std::to_string(cap));
}

namespace detail {

// Kronrod extension of the 7-point Gauss rule.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
void gk15(F& f, double a, double b, double& result, double& error) {
    const double center = 0.5 * (a + b), half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx), f2 = f(center + dx);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    result = resk * half;
    error = std::abs((resk - resg) * half);
}

}  // namespace detail

struct AdaptiveResult {
    double value;
    double error;
    int intervals;
};

/// Globally adaptive Gauss-Kronrod (7/15) on a finite interval. The interval
/// with the largest error estimate is bisected until the summed estimate
/// meets max(abs_tol, rel_tol*|I|).
template <typename F>
AdaptiveResult adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                        int max_intervals = 4000) {
    if (a == b) return {0.0, 0.0, 0};
    struct Piece {
        double a, b, value, error;
    };
    std::vector<Piece> pieces;
    pieces.reserve(64);
    Piece first{a, b, 0.0, 0.0};
    detail::gk15(f, a, b, first.value, first.error);
    pieces.push_back(first);
    auto by_error = [](const Piece& x, const Piece& y) { return x.error < y.error; };
    double total = first.value, err = first.error;
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (static_cast<int>(pieces.size()) >= max_intervals)
            throw AccuracyError("adaptive Gauss-Kronrod exceeded interval budget");
        std::pop_heap(pieces.begin(), pieces.end(), by_error);
        Piece worst = pieces.back();
        pieces.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            throw AccuracyError("adaptive Gauss-Kronrod reached machine resolution");
        Piece left{worst.a, mid, 0.0, 0.0}, right{mid, worst.b, 0.0, 0.0};
        detail::gk15(f, left.a, left.b, left.value, left.error);
        detail::gk15(f, right.a, right.b, right.value, right.error);
        pieces.push_back(left);
        std::push_heap(pieces.begin(), pieces.end(), by_error);
        pieces.push_back(right);
        std::push_heap(pieces.begin(), pieces.end(), by_error);
        total = 0.0;
        err = 0.0;
        for (const Piece& p : pieces) {
            total += p.value;
            err += p.error;
        }
    }
    return {total, err, static_cast<int>(pieces.size())};
}

/// Adaptive integration over [a, inf) via t = a + u/(1-u).
template <typename F>
AdaptiveResult adaptive_to_infinity(F&& f, double a, double abs_tol, double rel_tol) {
    auto g = [&](double u) {
        if (u >= 1.0) return 0.0;
        const double one_minus = 1.0 - u;
        const double v = f(a + u / one_minus);
        return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
    };
    return adaptive(g, 0.0, 1.0, abs_tol, rel_tol);
}

/// Neumaier compensated sum. scale() rescales the running total in place.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    void scale(double f) {
        sum *= f;
        comp *= f;
    }
    double value() const { return sum + comp; }
};

}  // namespace orthorand::quad
