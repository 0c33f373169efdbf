#include "orthorand/correlations.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>

#include "orthorand/errors.hpp"
#include "orthorand/parallel.hpp"
#include "orthorand/quadrature.hpp"

namespace orthorand {

namespace {

constexpr double kMinGap = 1e-8;

void check_points(const std::vector<double>& x) {
    for (double v : x)
        if (!std::isfinite(v)) throw ValidationError("correlation points must be finite");
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            if (!(std::abs(x[i] - x[j]) > kMinGap))
                throw ValidationError("correlation points must be pairwise distinct (gap > 1e-8)");
}

// p_0..p_n and p_0'..p_n' at each point, unscaled
void basis_rows(const RecurrenceTable& table, int n, const std::vector<double>& x, Eigen::MatrixXd& p,
                Eigen::MatrixXd& dp) {
    const auto k = static_cast<Eigen::Index>(x.size());
    p.resize(k, n + 1);
    dp.resize(k, n + 1);
    for (Eigen::Index i = 0; i < k; ++i) {
        const BasisRow r = basis_row(table, n, x[static_cast<std::size_t>(i)]);
        const double s = std::exp(r.log_scale);
        if (!std::isfinite(s) || s == 0.0) throw RangeError("basis values at a correlation point leave double range");
        p.row(i) = r.p.transpose() * s;
        dp.row(i) = r.dp.transpose() * s;
    }
}

double log_abs_vandermonde(const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) s += std::log(std::abs(x[j] - x[i]));
    return s;
}

}  // namespace

VandermondeSystem::VandermondeSystem(Eigen::MatrixXd v) : V(std::move(v)) {
    if (V.rows() != V.cols() || V.rows() == 0) throw ValidationError("Vandermonde system must be square");
    lu.compute(V);
    const Eigen::MatrixXd& f = lu.matrixLU();
    int sign = lu.permutationP().determinant();
    double log_mag = 0.0;
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        const double d = f(i, i);
        if (d == 0.0) {
            sign = 0;
            log_mag = -std::numeric_limits<double>::infinity();
            break;
        }
        if (d < 0.0) sign = -sign;
        log_mag += std::log(std::abs(d));
    }
    determinant = {sign, log_mag};
    row_norm_product = 1.0;
    for (Eigen::Index i = 0; i < V.rows(); ++i) row_norm_product *= V.row(i).norm();
}

VandermondeSystem::VandermondeSystem(const RecurrenceTable& table, const std::vector<double>& points)
    : VandermondeSystem([&] {
          if (points.empty()) throw ValidationError("Vandermonde system needs at least one point");
          const int k = static_cast<int>(points.size());
          if (k - 1 > table.N) throw DomainError("Vandermonde order exceeds the recurrence table");
          Eigen::MatrixXd p, dp;
          basis_rows(table, k - 1, points, p, dp);
          return p;
      }()) {}

ScaledValue VandermondeSystem::factorized_determinant(const RecurrenceTable& table,
                                                      const std::vector<double>& points) {
    const int k = static_cast<int>(points.size());
    double log_mag = 0.0;
    for (int m = 0; m < k; ++m) log_mag += table.log_gamma[m];
    int sign = 1;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double d = points[j] - points[i];
            if (d == 0.0) return {};
            if (d < 0.0) sign = -sign;
        }
    return {sign, log_mag + log_abs_vandermonde(points)};
}

Eigen::VectorXd eta_solve(const VandermondeSystem& system, const Eigen::VectorXd& tail) {
    if (tail.size() != system.V.rows()) throw ValidationError("tail length does not match the Vandermonde system");
    if (system.determinant.is_zero() ||
        system.determinant.log_mag <= std::log(1e-12) + std::log(system.row_norm_product))
        throw ConditioningError("Vandermonde system is numerically singular (points too close)");
    Eigen::VectorXd eta = -system.lu.solve(tail);
    const double resid = (system.V * eta + tail).norm();
    if (resid > 1e-10 * tail.norm()) throw ConditioningError("Vandermonde solve residual too large");
    return eta;
}

CorrelationEstimate rho_k_mc(const CorrelationRequest& req, const RecurrenceTable& table, std::uint64_t seed) {
    const int k = req.k();
    const int n = req.n;
    if (k < 1 || k > 6) throw ValidationError("rho_k_mc supports 1 <= k <= 6");
    if (n < k || n > table.N) throw DomainError("rho_k_mc degree must satisfy k <= n <= table.N");
    if (req.trials < 1) throw ValidationError("rho_k_mc needs at least one trial");
    if (!req.ensemble.has_density())
        throw UnsupportedError("ensemble '" + req.ensemble.id() + "' has no density; correlations need one");
    check_points(req.points);

    Eigen::MatrixXd p, dp;
    basis_rows(table, n, req.points, p, dp);

    std::vector<int> J(static_cast<std::size_t>(k));
    std::iota(J.begin(), J.end(), 0);
    if (req.elimination == Elimination::pivoted) {
        // row scaling does not change which column sets are well conditioned,
        // but keeps the pivoting from being driven by one large row
        Eigen::MatrixXd scaled = p;
        for (Eigen::Index i = 0; i < k; ++i) scaled.row(i) /= scaled.row(i).norm();
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
        for (int i = 0; i < k; ++i) J[static_cast<std::size_t>(i)] = qr.colsPermutation().indices()[i];
        std::sort(J.begin(), J.end());
    }
    std::vector<int> rest;
    rest.reserve(static_cast<std::size_t>(n + 1 - k));
    for (int j = 0, c = 0; j <= n; ++j) {
        if (c < k && J[static_cast<std::size_t>(c)] == j)
            ++c;
        else
            rest.push_back(j);
    }

    const VandermondeSystem sys(p(Eigen::all, J));
    // fails early on a singular system
    (void)eta_solve(sys, Eigen::VectorXd::Ones(k));

    double log_pref = 0.0;
    if (req.elimination == Elimination::leading) {
        log_pref = -log_abs_vandermonde(req.points);
        for (int m = 0; m < k; ++m) log_pref -= table.log_gamma[m];
    } else {
        log_pref = -sys.determinant.log_mag;
    }

    const Eigen::MatrixXd p_tail = p(Eigen::all, rest);
    const Eigen::MatrixXd dp_head = dp(Eigen::all, J), dp_tail = dp(Eigen::all, rest);
    const Eigen::VectorXi rest_idx = Eigen::Map<const Eigen::VectorXi>(rest.data(), static_cast<Eigen::Index>(rest.size()));
    std::vector<double> values(static_cast<std::size_t>(req.trials));
    parallel_shards(values.size(), req.workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const RandomPolynomial poly = sample(req.ensemble, n, seed, t);
            const Eigen::VectorXd xi_tail = poly.xi(rest_idx);
            const Eigen::VectorXd eta = eta_solve(sys, p_tail * xi_tail);
            const Eigen::VectorXd deriv = dp_head * eta + dp_tail * xi_tail;
            double log_term = log_pref;
            bool zero = false;
            for (int i = 0; i < k && !zero; ++i) {
                const double f = req.ensemble.density(eta[i]);
                zero = f == 0.0 || deriv[i] == 0.0;
                if (!zero) log_term += std::log(std::abs(deriv[i])) + std::log(f);
            }
            values[t] = zero ? 0.0 : std::exp(log_term);
        }
    });

    // aggregated in trial order, independent of the sharding
    double mean = 0.0, m2 = 0.0;
    long count = 0;
    for (double v : values) {
        ++count;
        const double d = v - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (v - mean);
    }
    const double var = count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(count)), count, J};
}

double joint_density_small_n(const RecurrenceTable& table, const std::vector<double>& points,
                             const Ensemble& ensemble) {
    const int n = static_cast<int>(points.size());
    if (n < 1 || n > 3) throw ValidationError("joint_density_small_n supports 1 <= n <= 3");
    if (n > table.N) throw DomainError("joint density degree exceeds the recurrence table");
    const auto kind = ensemble.kind();
    if (kind != EnsembleKind::gaussian && kind != EnsembleKind::uniform)
        throw UnsupportedError("joint density needs gaussian or uniform coefficients");
    check_points(points);

    // sigma[j] = e_j(x)
    std::vector<double> sigma(static_cast<std::size_t>(n + 1), 0.0);
    sigma[0] = 1.0;
    for (double x : points)
        for (int j = n; j >= 1; --j) sigma[static_cast<std::size_t>(j)] += x * sigma[static_cast<std::size_t>(j - 1)];

    const Eigen::MatrixXd M = moment_inner_products(table, n, n);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
    for (int l = 0; l <= n; ++l)
        for (int i = l; i <= n; ++i)
            c[l] += ((n - i) % 2 == 0 ? 1.0 : -1.0) * sigma[static_cast<std::size_t>(n - i)] * M(i, l);
    const double cmax = c.cwiseAbs().maxCoeff();
    if (cmax == 0.0) throw DomainError("degenerate joint density: all c_l vanish");

    auto integrand = [&](double t) {
        double v = std::pow(std::abs(t), n);
        for (int l = 0; l <= n && v != 0.0; ++l) v *= ensemble.density(c[l] * t);
        return v;
    };
    double integral = 0.0;
    if (kind == EnsembleKind::uniform) {
        const double T = std::sqrt(3.0) / cmax;
        integral = quad::adaptive(integrand, -T, 0.0, 0.0, 1e-9).value + quad::adaptive(integrand, 0.0, T, 0.0, 1e-9).value;
    } else {
        // t = tau / |c| puts the gaussian bulk at tau ~ 1
        const double scale = 1.0 / c.norm();
        auto pos = [&](double tau) { return integrand(tau * scale) * scale; };
        auto neg = [&](double tau) { return integrand(-tau * scale) * scale; };
        integral = quad::adaptive_to_infinity(pos, 0.0, 0.0, 1e-9).value +
                   quad::adaptive_to_infinity(neg, 0.0, 0.0, 1e-9).value;
    }

    double log_pref = log_abs_vandermonde(points);
    for (int m = 0; m <= n; ++m) log_pref -= table.log_gamma[m];
    return std::exp(log_pref) * integral;
}

}  // namespace orthorand
