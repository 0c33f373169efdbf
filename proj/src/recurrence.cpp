#include "orthorand/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orthorand/basis.hpp"
#include "orthorand/errors.hpp"
#include "orthorand/linalg.hpp"
#include "orthorand/quadrature.hpp"

namespace orthorand {

namespace {

const char* method_name(RecurrenceMethod m) {
    return m == RecurrenceMethod::stieltjes ? "stieltjes" : "closed_form";
}

void fill_log_gamma(RecurrenceTable& t) {
    t.log_gamma.resize(t.N + 1);
    t.log_gamma[0] = -0.5 * std::log(t.mu0);
    for (int k = 0; k < t.N; ++k) t.log_gamma[k + 1] = t.log_gamma[k] - std::log(t.A[k]);
}

// Right end of the discretization: the point past the maximum of
// (2N+2) log x - 2Q(x) where it has dropped by 300 decades.
double truncation_point(const WeightSpec& spec, int N) {
    const double power = 2.0 * N + 2.0;
    auto f = [&](double x) { return power * std::log(x) - 2.0 * spec.Q(x); };
    // maximiser solves power = 2 x Q'(x); x Q'(x) is increasing for admissible Q
    double lo = 1e-8, hi = 1.0;
    while (2.0 * hi * spec.dQ(hi) < power) {
        hi *= 2.0;
        if (hi > 1e12) throw SolverError("Stieltjes truncation point not found");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (2.0 * mid * spec.dQ(mid) < power ? lo : hi) = mid;
    }
    const double peak = hi;
    const double target = f(peak) - 300.0 * std::numbers::ln10;
    double r = 2.0 * peak;
    while (f(r) > target) {
        r *= 1.5;
        if (r > 1e12) throw SolverError("Stieltjes truncation point not found");
    }
    return r;
}

struct Discretization {
    Eigen::VectorXd x;  // nodes in (0, R]
    Eigen::VectorXd w;  // 2 * omega_i * w(x_i), the mirrored half accounted for
};

Discretization half_line_rule(const WeightSpec& spec, int N, const StieltjesOptions& opts) {
    if (opts.panel_order < 2 || opts.nodes_per_degree < 1 || opts.grading_levels < 0)
        throw ValidationError("invalid Stieltjes options");
    const double R = truncation_point(spec, N);
    const long want = static_cast<long>(opts.nodes_per_degree) * (N + 1);
    const int uniform = static_cast<int>(std::max<long>(4, (want + opts.panel_order - 1) / opts.panel_order));
    const double h = R / uniform;

    std::vector<std::pair<double, double>> panels;
    // geometric grading toward 0 inside the first uniform panel
    double left = h * std::ldexp(1.0, -opts.grading_levels);
    panels.emplace_back(0.0, left);
    for (int l = opts.grading_levels; l >= 1; --l) {
        const double right = h * std::ldexp(1.0, -(l - 1));
        panels.emplace_back(left, right);
        left = right;
    }
    for (int p = 1; p < uniform; ++p) panels.emplace_back(p * h, p + 1 == uniform ? R : (p + 1) * h);

    const quad::Rule& rule = quad::gauss_legendre(opts.panel_order);
    const Eigen::Index m = rule.nodes.size();
    Discretization d;
    d.x.resize(static_cast<Eigen::Index>(panels.size()) * m);
    d.w.resize(d.x.size());
    Eigen::Index k = 0;
    for (const auto& [a, b] : panels) {
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (Eigen::Index i = 0; i < m; ++i, ++k) {
            const double x = mid + half * rule.nodes[i];
            d.x[k] = x;
            d.w[k] = 2.0 * half * rule.weights[i] * std::exp(-2.0 * spec.Q(x));
        }
    }
    return d;
}

RecurrenceTable hermite_closed_form(const WeightSpec& spec, int N) {
    RecurrenceTable t;
    t.weight_id = spec.weight_id();
    t.N = N;
    t.A.resize(N + 1);
    for (int m = 0; m <= N; ++m) t.A[m] = std::sqrt(0.5 * (m + 1));
    t.B = Eigen::VectorXd::Zero(N + 1);
    t.mu0 = std::sqrt(std::numbers::pi);
    t.method = RecurrenceMethod::closed_form;
    fill_log_gamma(t);
    return t;
}

}  // namespace

double RecurrenceTable::gamma(int k) const {
    if (k < 0 || k > N) throw DomainError("no leading coefficient for degree " + std::to_string(k));
    return std::exp(log_gamma[k]);
}

void to_json(nlohmann::json& j, const RecurrenceTable& t) {
    j = nlohmann::json{{"schema_version", RecurrenceTable::kSchemaVersion},
                       {"weight_id", t.weight_id},
                       {"method", method_name(t.method)},
                       {"N", t.N},
                       {"mu0", t.mu0},
                       {"A", std::vector<double>(t.A.data(), t.A.data() + t.A.size())},
                       {"B", std::vector<double>(t.B.data(), t.B.data() + t.B.size())},
                       {"log_gamma", std::vector<double>(t.log_gamma.data(), t.log_gamma.data() + t.log_gamma.size())}};
}

void from_json(const nlohmann::json& j, RecurrenceTable& t) {
    if (j.at("schema_version").get<int>() != RecurrenceTable::kSchemaVersion)
        throw ValidationError("unsupported recurrence table schema version");
    j.at("weight_id").get_to(t.weight_id);
    const auto method = j.at("method").get<std::string>();
    if (method == "stieltjes")
        t.method = RecurrenceMethod::stieltjes;
    else if (method == "closed_form")
        t.method = RecurrenceMethod::closed_form;
    else
        throw ValidationError("unknown recurrence method '" + method + "'");
    j.at("N").get_to(t.N);
    j.at("mu0").get_to(t.mu0);
    auto vec = [&](const char* key) {
        const auto v = j.at(key).get<std::vector<double>>();
        if (static_cast<int>(v.size()) != t.N + 1)
            throw ValidationError(std::string("recurrence table field '") + key + "' has wrong length");
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    t.A = vec("A");
    t.B = vec("B");
    t.log_gamma = vec("log_gamma");
}

RecurrenceTable stieltjes_recurrence(const WeightSpec& spec, int N, const StieltjesOptions& opts) {
    if (N < 1) throw DomainError("recurrence needs N >= 1");
    const Discretization d = half_line_rule(spec, N, opts);
    const Eigen::ArrayXd x = d.x.array();

    RecurrenceTable t;
    t.weight_id = spec.weight_id();
    t.N = N;
    t.method = RecurrenceMethod::stieltjes;
    t.A.resize(N + 1);
    t.B = Eigen::VectorXd::Zero(N + 1);
    t.mu0 = d.w.sum();

    // v_m = sqrt(W_i) p_m(x_i) on the half line; same-parity inner products
    // are complete there, opposite-parity ones vanish by symmetry.
    Eigen::ArrayXd prev = Eigen::ArrayXd::Zero(x.size());
    Eigen::ArrayXd cur = d.w.array().sqrt() / std::sqrt(t.mu0);
    double a_prev = 0.0;
    for (int m = 0; m <= N; ++m) {
        Eigen::ArrayXd next = x * cur - a_prev * prev;
        const double a = std::sqrt(next.square().sum());
        if (!(a > 0.0) || !std::isfinite(a)) throw StabilityError("Stieltjes norm collapsed", m);
        next /= a;
        if (m >= 1) {
            const double overlap = (next * prev).sum();
            if (std::abs(overlap) > 1e-8)
                throw StabilityError("orthogonality lost against p_{m-1}", m + 1);
        }
        t.A[m] = a;
        a_prev = a;
        prev = std::move(cur);
        cur = std::move(next);
    }
    fill_log_gamma(t);
    return t;
}

RecurrenceTable compute_recurrence(const WeightSpec& spec, int N, const StieltjesOptions& opts) {
    if (N < 1) throw DomainError("recurrence needs N >= 1");
    if (spec.family() == WeightFamily::hermite) return hermite_closed_form(spec, N);
    return stieltjes_recurrence(spec, N, opts);
}

GaussRule gauss_rule(const RecurrenceTable& table, int m) {
    if (m < 1 || m > table.N + 1)
        throw DomainError("Gauss rule size must lie in [1, N+1]");
    const Eigen::VectorXd diag = table.B.head(m);
    const Eigen::VectorXd off = table.A.head(std::max(m - 1, 0));
    const auto eig = linalg::symmetric_tridiagonal_ql<double>(diag, off);
    GaussRule r;
    r.nodes = eig.values;
    // Christoffel numbers 1/K_{m-1}(x_i, x_i) equal mu0 * z_i^2 but keep full
    // relative accuracy at the outer nodes where z_i is tiny.
    r.weights.resize(m);
    for (int i = 0; i < m; ++i) {
        const BasisRow row = basis_row(table, m - 1, r.nodes[i]);
        r.weights[i] = std::exp(-2.0 * row.log_scale) / row.p.squaredNorm();
    }
    return r;
}

JumpCoefficients jump_recurrence_coeffs(const RecurrenceTable& table, int m, int k) {
    if (m < 1 || k < 1 || m + k > table.N)
        throw DomainError("jump recurrence needs m >= 1, k >= 1, m + k <= N");
    if (k > 64) throw RangeError("jump recurrence coefficients are only supported for k <= 64");
    // p_{m+j} = U_j p_m + V_j p_{m-1}, started from (U_{-1}, V_{-1}) = (0, 1)
    Eigen::VectorXd u_prev = Eigen::VectorXd::Zero(k + 1), v_prev = Eigen::VectorXd::Zero(k + 1);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(k + 1), v = Eigen::VectorXd::Zero(k + 1);
    v_prev[0] = 1.0;
    u[0] = 1.0;
    for (int j = 0; j < k; ++j) {
        const double a = table.A[m + j], b = table.B[m + j], a_back = table.A[m + j - 1];
        Eigen::VectorXd u_next = Eigen::VectorXd::Zero(k + 1), v_next = Eigen::VectorXd::Zero(k + 1);
        u_next.tail(k) = u.head(k);
        v_next.tail(k) = v.head(k);
        u_next = (u_next - b * u - a_back * u_prev) / a;
        v_next = (v_next - b * v - a_back * v_prev) / a;
        u_prev = std::move(u);
        v_prev = std::move(v);
        u = std::move(u_next);
        v = std::move(v_next);
        if (!u.allFinite() || !v.allFinite())
            throw RangeError("jump recurrence coefficients overflowed at step " + std::to_string(j + 1));
    }
    return {u, v.head(k)};
}

Eigen::MatrixXd moment_inner_products(const RecurrenceTable& table, int i_max, int l_max) {
    if (i_max < 0 || l_max < 0 || l_max > table.N)
        throw DomainError("moment inner products need 0 <= l_max <= N and i_max >= 0");
    const int g = (i_max + l_max + 2) / 2;
    if (g > table.N + 1)
        throw AccuracyError("Gauss rule of size " + std::to_string(g) + " exceeds the recurrence table");
    const GaussRule rule = gauss_rule(table, g);

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(i_max + 1, l_max + 1);
    Eigen::VectorXd norms = Eigen::VectorXd::Zero(i_max + 1);  // ||x^i||
    for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
        const double x = rule.nodes[q], w = rule.weights[q];
        const BasisRow row = basis_row(table, l_max, x);
        const Eigen::VectorXd p = row.p * std::exp(row.log_scale);
        double xi = 1.0;
        for (int i = 0; i <= i_max; ++i, xi *= x) {
            M.row(i) += w * xi * p.transpose();
            norms[i] += w * xi * xi;
        }
    }
    norms = norms.cwiseSqrt();
    for (int l = 0; l <= l_max; ++l) {
        for (int i = 0; i < std::min(l, i_max + 1); ++i)
            if (std::abs(M(i, l)) > 1e-10 * std::max(norms[i], 1.0))
                throw NumericError("moment inner products lost orthogonality at (i, l) = (" +
                                   std::to_string(i) + ", " + std::to_string(l) + ")");
        if (l <= i_max) {
            const double dev = std::abs(M(l, l) * table.gamma(l) - 1.0);
            if (dev > 1e-8)
                throw NumericError("moment inner product <x^l, p_l> disagrees with 1/gamma_l at l = " +
                                   std::to_string(l));
        }
    }
    return M;
}

}  // namespace orthorand
