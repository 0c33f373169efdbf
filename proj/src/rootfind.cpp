#include "orthorand/rootfind.hpp"

#include <algorithm>
#include <cmath>

#include "orthorand/basis.hpp"
#include "orthorand/errors.hpp"
#include "orthorand/linalg.hpp"

namespace orthorand {

namespace {

constexpr double kBisectTol = 1e-13;
constexpr double kDedupTol = 1e-12;

// log |P(x)| including the exponent carried by the walker
double log_abs(const CombinationValue& v) {
    return v.value == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(v.value)) + v.log_scale;
}

struct Refiner {
    const RecurrenceTable& table;
    const WeightSpec& spec;
    const Eigen::VectorXd& xi;
    double a_n;

    CombinationValue at(double s) const { return eval_combination(table, xi, a_n * s); }
    int sign_p(double s) const {
        const double v = at(s).value;
        return (v > 0.0) - (v < 0.0);
    }
    // sign of (W P)' = W (P' - Q' P)
    int sign_dw(double s) const {
        const auto v = at(s);
        const double d = v.derivative - spec.dQ(a_n * s) * v.value;
        return (d > 0.0) - (d < 0.0);
    }
    // log |F| / sqrt(K~) at s
    double normalized_log(double s) const {
        const double x = a_n * s;
        const auto v = at(s);
        return log_abs(v) - spec.Q(x) - eval_weighted(table, spec, xi.size() - 1, x).log_norm();
    }

    // bisection on a bracket with sign(P(lo)) = slo != 0, then Newton polish
    double root(double lo, double hi, int slo) const {
        while (hi - lo > kBisectTol) {
            const double mid = 0.5 * (lo + hi);
            const int sm = sign_p(mid);
            if (sm == 0) return mid;
            (sm == slo ? lo : hi) = mid;
        }
        return polish(0.5 * (lo + hi));
    }

    double polish(double s) const {
        const auto v0 = at(s);
        if (v0.value == 0.0 || v0.derivative == 0.0) return s;
        const double x1 = a_n * s - v0.value / v0.derivative;
        const double s1 = x1 / a_n;
        if (!std::isfinite(s1) || std::abs(s1 - s) > 1e-9) return s;
        return log_abs(at(s1)) <= log_abs(v0) ? s1 : s;
    }

    // zero of sign_dw in (lo, hi) given opposite signs at the ends
    double extremum(double lo, double hi, int sdlo) const {
        for (int it = 0; it < 60 && hi - lo > kBisectTol; ++it) {
            const double mid = 0.5 * (lo + hi);
            const int sm = sign_dw(mid);
            if (sm == 0) return mid;
            (sm == sdlo ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
};

void sort_dedup(std::vector<double>& r) {
    std::sort(r.begin(), r.end());
    std::vector<double> out;
    out.reserve(r.size());
    for (double v : r)
        if (out.empty() || v - out.back() > kDedupTol) out.push_back(v);
    r.swap(out);
}

}  // namespace

const char* to_string(RootMethod m) { return m == RootMethod::scan ? "scan" : "comrade"; }

RootMethod parse_root_method(std::string_view text) {
    if (text == "scan") return RootMethod::scan;
    if (text == "comrade") return RootMethod::comrade;
    throw ValidationError("unknown root method '" + std::string(text) + "' (expected scan or comrade)");
}

int RootSet::count_in(double s_lo, double s_hi) const {
    const auto lo = std::lower_bound(scaled_real_roots.begin(), scaled_real_roots.end(), s_lo);
    const auto hi = std::upper_bound(scaled_real_roots.begin(), scaled_real_roots.end(), s_hi);
    return static_cast<int>(hi - lo);
}

ScanPlan::ScanPlan(const RecurrenceTable& table, const WeightSpec& spec, int n, double a_n, double s_lo,
                   double s_hi, const ScanOptions& opts)
    : table_(&table), spec_(&spec), n_(n), a_n_(a_n), s_lo_(s_lo), s_hi_(s_hi), opts_(opts) {
    if (!(s_lo < s_hi) || s_lo < -3.0 || s_hi > 3.0) throw DomainError("scan interval must be inside [-3, 3]");
    if (opts.oversample < 4) throw DomainError("scan oversampling g must be at least 4");
    if (n < 1 || n > table.N) throw DomainError("scan degree outside the recurrence table");
    if (!(a_n > 0.0)) throw DomainError("scan needs a_n > 0");
    const long cells = static_cast<long>(std::ceil(opts.oversample * static_cast<double>(n) * (s_hi - s_lo)));
    grid_ = Eigen::VectorXd::LinSpaced(cells + 1, s_lo, s_hi);
    const double bytes = 2.0 * static_cast<double>(grid_.size()) * (n + 1) * sizeof(double);
    precomputed_ = bytes <= static_cast<double>(opts.memory_cap);
    if (!precomputed_) return;
    rows_.resize(grid_.size(), n + 1);
    drows_.resize(grid_.size(), n + 1);
    for (Eigen::Index i = 0; i < grid_.size(); ++i) {
        const WeightedBasis b = eval_weighted(table, spec, n, a_n * grid_[i], true);
        const int ref = b.shift.maxCoeff();
        Eigen::VectorXd v(n + 1), d(n + 1);
        for (int k = 0; k <= n; ++k) {
            const double f = std::ldexp(1.0, kRescaleBits * (b.shift[k] - ref));
            v[k] = b.mant[k] * f;
            d[k] = b.dmant[k] * f;
        }
        const double norm = v.norm();
        rows_.row(i) = v / norm;
        drows_.row(i) = d / norm;
    }
}

void ScanPlan::evaluate(const Eigen::VectorXd& xi, Eigen::VectorXd& f, Eigen::VectorXd& df) const {
    if (xi.size() != n_ + 1) throw DomainError("coefficient vector does not match the scan plan degree");
    if (precomputed_) {
        f.noalias() = rows_ * xi;
        df.noalias() = drows_ * xi;
        return;
    }
    f.resize(grid_.size());
    df.resize(grid_.size());
    for (Eigen::Index i = 0; i < grid_.size(); ++i) {
        const WeightedBasis b = eval_weighted(*table_, *spec_, n_, a_n_ * grid_[i], true);
        const int ref = b.shift.maxCoeff();
        double s2 = 0.0, fv = 0.0, dv = 0.0;
        for (int k = 0; k <= n_; ++k) {
            const double scale = std::ldexp(1.0, kRescaleBits * (b.shift[k] - ref));
            const double v = b.mant[k] * scale;
            s2 += v * v;
            fv += xi[k] * v;
            dv += xi[k] * b.dmant[k] * scale;
        }
        const double norm = std::sqrt(s2);
        f[i] = fv / norm;
        df[i] = dv / norm;
    }
}

RootSet scan_real_roots(const RandomPolynomial& poly, const ScanPlan& plan) {
    const Eigen::VectorXd& s = plan.grid();
    Eigen::VectorXd f, df;
    plan.evaluate(poly.xi, f, df);
    const Refiner ref{plan.table(), plan.spec(), poly.xi, plan.a_n()};
    const double dip = std::exp(plan.options().dip_log_threshold);

    RootSet out;
    out.n = poly.n;
    out.a_n = plan.a_n();
    out.method = RootMethod::scan;
    const Eigen::Index G = s.size();
    std::vector<char> cell_has_root(static_cast<std::size_t>(G), 0);

    for (Eigen::Index i = 0; i < G; ++i) {
        if (f[i] == 0.0) {
            out.scaled_real_roots.push_back(ref.polish(s[i]));
            if (i > 0) cell_has_root[static_cast<std::size_t>(i - 1)] = 1;
            if (i + 1 < G) cell_has_root[static_cast<std::size_t>(i)] = 1;
        }
    }
    for (Eigen::Index i = 0; i + 1 < G; ++i) {
        const double fl = f[i], fr = f[i + 1];
        if (fl == 0.0 || fr == 0.0) continue;
        if ((fl < 0.0) != (fr < 0.0)) {
            cell_has_root[static_cast<std::size_t>(i)] = 1;
            out.scaled_real_roots.push_back(ref.root(s[i], s[i + 1], fl > 0.0 ? 1 : -1));
            continue;
        }
        // F heads toward zero at the left end and away from it at the right:
        // an interior extremum that may cross zero twice
        if (fl * df[i] < 0.0 && fr * df[i + 1] > 0.0) {
            const int sd = df[i] > 0.0 ? 1 : -1;
            const double m = ref.extremum(s[i], s[i + 1], sd);
            const int sp = ref.sign_p(m);
            const int sl = fl > 0.0 ? 1 : -1;
            if (sp == -sl) {
                out.scaled_real_roots.push_back(ref.root(s[i], m, sl));
                out.scaled_real_roots.push_back(ref.root(m, s[i + 1], sp));
                cell_has_root[static_cast<std::size_t>(i)] = 1;
                ++out.refined_pairs;
            } else if (sp == 0) {
                out.scaled_real_roots.push_back(m);
                cell_has_root[static_cast<std::size_t>(i)] = 1;
            } else if (std::min(std::abs(fl), std::abs(fr)) < 1.0 &&
                       ref.normalized_log(m) < plan.options().dip_log_threshold) {
                out.suspicious_intervals.emplace_back(s[i], s[i + 1]);
            }
        }
    }
    for (Eigen::Index i = 1; i + 1 < G; ++i) {
        if (std::abs(f[i]) >= dip || f[i] == 0.0) continue;
        if (cell_has_root[static_cast<std::size_t>(i - 1)] || cell_has_root[static_cast<std::size_t>(i)]) continue;
        out.suspicious_intervals.emplace_back(s[i - 1], s[i + 1]);
    }
    sort_dedup(out.scaled_real_roots);
    std::sort(out.suspicious_intervals.begin(), out.suspicious_intervals.end());
    out.suspicious_intervals.erase(std::unique(out.suspicious_intervals.begin(), out.suspicious_intervals.end()),
                                   out.suspicious_intervals.end());
    return out;
}

RootSet scan_real_roots(const RandomPolynomial& poly, const RecurrenceTable& table, const WeightSpec& spec,
                        double a_n, std::pair<double, double> interval, int oversample) {
    ScanOptions opts;
    opts.oversample = oversample;
    const ScanPlan plan(table, spec, poly.n, a_n, interval.first, interval.second, opts);
    return scan_real_roots(poly, plan);
}

RootSet comrade_roots(const RandomPolynomial& poly, const RecurrenceTable& table, double a_n,
                      const ComradeOptions& opts) {
    const int n = poly.n;
    if (n < 1 || n > table.N) throw DomainError("comrade degree outside the recurrence table");
    if (n > opts.cap)
        throw ValidationError("comrade method is capped at degree " + std::to_string(opts.cap));
    const Eigen::VectorXd& c = poly.xi;
    if (!(std::abs(c[n]) > 1e-300 * c.norm())) throw DomainError("degenerate leading coefficient");

    // transpose of the comrade matrix: tridiagonal plus a full last column
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        H(i, i) = table.B[i];
        if (i + 1 < n) H(i, i + 1) = H(i + 1, i) = table.A[i];
    }
    const double f = table.A[n - 1] / c[n];
    for (int j = 0; j < n; ++j) H(j, n - 1) -= f * c[j];
    linalg::balance(H);
    const auto eig = linalg::hessenberg_eigenvalues<double>(std::move(H));

    RootSet out;
    out.n = n;
    out.a_n = a_n;
    out.method = RootMethod::comrade;
    out.has_complex = true;
    out.complex_roots.reserve(eig.size());
    // polishing only touches P itself, so any weight will do here
    const WeightSpec unused = WeightSpec::hermite();
    const Refiner ref{table, unused, poly.xi, 1.0};
    for (const auto& z : eig) {
        if (std::abs(z.imag()) <= opts.real_tol * (1.0 + std::abs(z.real()))) {
            const double x = ref.polish(z.real());
            out.scaled_real_roots.push_back(x / a_n);
            out.complex_roots.emplace_back(x / a_n, 0.0);
        } else {
            out.complex_roots.emplace_back(z / a_n);
        }
    }
    std::sort(out.scaled_real_roots.begin(), out.scaled_real_roots.end());
    std::sort(out.complex_roots.begin(), out.complex_roots.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

MeasureDistance counting_measure_distance(const RootSet& roots, const UllmanDistribution& mu) {
    if (!roots.has_complex || roots.complex_roots.empty())
        throw ValidationError("counting measure distance needs all roots (comrade method)");
    std::vector<double> re;
    re.reserve(roots.complex_roots.size());
    for (const auto& z : roots.complex_roots) re.push_back(z.real());
    std::sort(re.begin(), re.end());
    const double N = static_cast<double>(re.size());
    MeasureDistance d;
    for (std::size_t i = 0; i < re.size(); ++i) {
        const double F = mu.cdf(re[i]);
        d.sup_cdf = std::max({d.sup_cdf, F - i / N, (i + 1) / N - F});
    }
    for (int m = 1; m <= 4; ++m) {
        double s = 0.0;
        for (double x : re) s += std::pow(x, m);
        const double gap = s / N - mu.moment(m);
        d.signed_moments.push_back(gap);
        d.moments.push_back(std::abs(gap));
    }
    return d;
}

}  // namespace orthorand
