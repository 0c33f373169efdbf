#include "orthorand/limit_laws.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

#include "orthorand/basis.hpp"
#include "orthorand/errors.hpp"
#include "orthorand/quadrature.hpp"

namespace orthorand {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 1.0) || !std::isfinite(alpha)) throw DomainError("Ullman distribution needs alpha > 1");
}

}  // namespace

double ullman_density(double alpha, double x) {
    check_alpha(alpha);
    if (!(std::abs(x) <= 1.0)) throw DomainError("Ullman density is defined on [-1, 1]");
    const double x2 = x * x;
    const double top = std::sqrt(1.0 - x2);
    if (top == 0.0) return 0.0;
    const double e = 0.5 * (alpha - 2.0);
    double integral;
    if (alpha < 2.0) {
        const double p = 1.0 / (alpha - 1.0);
        auto f = [&](double v) {
            if (v <= 0.0) return x2 == 0.0 ? p : 0.0;
            const double s = std::pow(v, p);
            return std::pow(x2 + s * s, e) * p * std::pow(v, p - 1.0);
        };
        integral = quad::adaptive(f, 0.0, std::pow(top, 1.0 / p), 1e-12, 1e-13).value;
    } else {
        auto f = [&](double s) { return std::pow(x2 + s * s, e); };
        integral = quad::adaptive(f, 0.0, top, 1e-12, 1e-13).value;
    }
    return alpha / std::numbers::pi * integral;
}

UllmanDistribution::UllmanDistribution(double alpha) : alpha_(alpha) { check_alpha(alpha); }

double UllmanDistribution::cdf(double x) const {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ax = std::abs(x);
    if (ax == 0.0) return 0.5;
    // mu([0, |x|]) = |x|^alpha/2 + (alpha/pi) int_{|x|}^1 t^(alpha-1) asin(|x|/t) dt,
    // with t = |x| + (1 - |x|) w^2 to absorb the square-root edge of asin
    const double a = alpha_;
    auto f = [&](double w) {
        const double t = ax + (1.0 - ax) * w * w;
        return std::pow(t, a - 1.0) * std::asin(std::min(1.0, ax / t)) * 2.0 * (1.0 - ax) * w;
    };
    const double tail = quad::adaptive(f, 0.0, 1.0, 1e-13, 1e-13).value;
    const double half = 0.5 * std::pow(ax, a) + a / std::numbers::pi * tail;
    return x > 0.0 ? 0.5 + half : 0.5 - half;
}

double UllmanDistribution::moment(int m) const {
    if (m < 0) throw DomainError("moment order must be non-negative");
    if (m % 2 == 1) return 0.0;
    double ratio = 1.0;  // (m-1)!!/m!!
    for (int k = 2; k <= m; k += 2) ratio *= (k - 1.0) / k;
    return alpha_ / (alpha_ + m) * ratio;
}

GammaConstantForms gamma_constant_forms(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("gamma constant needs alpha > 0");
    const double g = 0.5 * std::exp(std::lgamma(0.5 * alpha) + std::lgamma(0.5) - std::lgamma(0.5 * alpha + 0.5));
    // t = sin(theta), then theta = (pi/2) v^(1/alpha) removes sin^(alpha-1) at 0
    const double p = 1.0 / alpha;
    const double h = 0.5 * std::numbers::pi;
    auto f = [&](double v) {
        const double theta = h * std::pow(v, p);
        const double ratio = theta == 0.0 ? 1.0 : std::sin(theta) / theta;
        // sin^(alpha-1)(theta) dtheta = ratio^(alpha-1) theta^(alpha-1) h p v^(p-1) dv
        return std::pow(ratio, alpha - 1.0) * std::pow(h, alpha) * p;
    };
    const double q = quad::adaptive(f, 0.0, 1.0, 1e-15, 1e-14).value;
    return {g, q};
}

double gamma_constant(double alpha) {
    const auto forms = gamma_constant_forms(alpha);
    if (std::abs(forms.quadrature_form / forms.gamma_form - 1.0) > 1e-10)
        throw AccuracyError("gamma constant forms disagree");
    return forms.gamma_form;
}

KacRiceDensity::KacRiceDensity(RecurrenceTable table, WeightSpec spec, int n, double a_n)
    : table_(std::move(table)), spec_(std::move(spec)), n_(n), a_n_(a_n) {
    if (n < 1 || n > table_.N) throw DomainError("Kac-Rice degree outside the recurrence table");
    if (!(a_n > 0.0)) throw DomainError("Kac-Rice density needs a_n > 0");
}

double KacRiceDensity::operator()(double s) const { return kac_rice_density(table_, spec_, a_n_, n_, s); }

double kac_rice_density(const RecurrenceTable& table, const WeightSpec& spec, double a_n, int n, double s) {
    const KernelValues kv = kernel_at(table, spec, n, a_n * s);
    double disc = kv.raw_discriminant();
    assert(std::abs(disc - kv.weighted_discriminant()) <= 1e-9 * kv.k11 / kv.k00);
    if (disc < 0.0) {
        if (disc < -1e-12 * kv.k11 / kv.k00) throw NumericError("negative Kac-Rice discriminant");
        disc = 0.0;
    }
    return a_n / std::numbers::pi * std::sqrt(disc);
}

double expected_count(const KacRiceDensity& rho, double a, double b) {
    if (!(a >= -3.0 && b <= 3.0)) throw DomainError("expected_count interval must lie in [-3, 3]");
    if (a == b) return 0.0;
    return quad::adaptive([&](double s) { return rho(s); }, a, b, 1e-8, 0.0, 20000).value;
}

}  // namespace orthorand
