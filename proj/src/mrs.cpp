#include "orthorand/mrs.hpp"

#include <cmath>
#include <numbers>

#include "orthorand/errors.hpp"
#include "orthorand/quadrature.hpp"

namespace orthorand {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

struct MrsEval {
    double value;       // (2/pi) int_0^{pi/2} a sin(phi) Q'(a sin(phi)) dphi
    double derivative;  // d value / d a
};

MrsEval mrs_integral(const WeightSpec& spec, double a) {
    auto f = [&](double phi) {
        const double t = std::sin(phi);
        return a * t * spec.dQ(a * t);
    };
    auto df = [&](double phi) {
        const double t = std::sin(phi);
        const double x = a * t;
        return t * spec.dQ(x) + x * t * spec.d2Q(x);
    };
    const auto v = quad::legendre_doubling(f, 0.0, kHalfPi, 1e-14, 1e-14);
    const auto d = quad::legendre_doubling(df, 0.0, kHalfPi, 1e-12, 1e-10);
    return {v.value / kHalfPi, d.value / kHalfPi};
}

// I_lambda = int_0^1 t^lambda / sqrt(1 - t^2) dt
double chebyshev_moment(double lambda) {
    return 0.5 * std::exp(std::lgamma(0.5 * (lambda + 1.0)) + std::lgamma(0.5) -
                          std::lgamma(0.5 * lambda + 1.0));
}

// int_0^{pi/2} f(phi) dphi with phi = (pi/2) u^4, which smooths the |s|^(lambda-1)
// kink of Q' at s = 0 for lambda < 2.
template <typename F>
quad::DoublingResult graded_half(F&& f, double sign, double tol = 1e-12) {
    auto g = [&](double u) {
        const double u3 = u * u * u;
        return f(sign * kHalfPi * u3 * u) * 4.0 * kHalfPi * u3;
    };
    return quad::legendre_doubling(g, 0.0, 1.0, tol, tol);
}

}  // namespace

double mrs_number(const WeightSpec& spec, double n, double rel_tol) {
    if (!(n > 0.0)) throw DomainError("MRS number needs n > 0");
    constexpr double kLo = 1e-8, kHi = 1e8;

    // Guess from the Freud closed form with Q = |x|^alpha / 2.
    const double alpha = spec.alpha() > 1.0 && std::isfinite(spec.alpha()) ? spec.alpha() : 2.0;
    double guess = std::pow(n * std::numbers::pi / (alpha * chebyshev_moment(alpha)), 1.0 / alpha);
    guess = std::clamp(guess, kLo, kHi);

    double lo = guess, hi = guess;
    MrsEval at_lo = mrs_integral(spec, lo);
    while (at_lo.value > n) {
        if (lo <= kLo) throw SolverError("MRS bracket not found below 1e-8 (inadmissible Q?)");
        lo = std::max(kLo, lo * 0.5);
        at_lo = mrs_integral(spec, lo);
    }
    MrsEval at_hi = at_lo;
    while (at_hi.value < n) {
        if (hi >= kHi) throw SolverError("MRS bracket not found below 1e8 (inadmissible Q?)");
        hi = std::min(kHi, hi * 2.0);
        at_hi = mrs_integral(spec, hi);
    }
    if (!std::isfinite(at_lo.value) || !std::isfinite(at_hi.value))
        throw SolverError("MRS integral is not finite");

    double a = std::clamp(guess, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const MrsEval e = mrs_integral(spec, a);
        const double g = e.value - n;
        if (g == 0.0) return a;
        if (g < 0.0)
            lo = a;
        else
            hi = a;
        double next = a - g / e.derivative;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - a);
        a = next;
        if (step <= 1e-3 * rel_tol * a || (hi - lo) <= 1e-3 * rel_tol * a) return a;
    }
    throw SolverError("MRS Newton iteration did not converge");
}

MrsTable MrsTable::build(const WeightSpec& spec, int n_max, double tol) {
    if (n_max < 1) throw DomainError("MRS table needs n_max >= 1");
    MrsTable t;
    t.weight_id = spec.weight_id();
    t.tol = tol;
    t.a.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) t.a.push_back(mrs_number(spec, n, tol));
    return t;
}

double MrsTable::operator()(int n) const {
    if (n < 1 || n > n_max()) throw DomainError("MRS table has no entry for n = " + std::to_string(n));
    return a[static_cast<std::size_t>(n - 1)];
}

void to_json(nlohmann::json& j, const MrsTable& t) {
    j = nlohmann::json{{"schema_version", MrsTable::kSchemaVersion},
                       {"weight_id", t.weight_id},
                       {"tol", t.tol},
                       {"a", t.a}};
}

void from_json(const nlohmann::json& j, MrsTable& t) {
    if (j.at("schema_version").get<int>() != MrsTable::kSchemaVersion)
        throw ValidationError("unsupported MRS table schema version");
    j.at("weight_id").get_to(t.weight_id);
    j.at("tol").get_to(t.tol);
    j.at("a").get_to(t.a);
}

EquilibriumDensity::EquilibriumDensity(WeightSpec spec, int n, double a_n)
    : spec_(std::move(spec)), n_(n), a_n_(a_n) {
    if (n < 1) throw DomainError("equilibrium density needs n >= 1");
    if (!(a_n > 0.0)) throw DomainError("equilibrium density needs a_n > 0");
    // probe at the centre to record the order the quadrature needs there
    const double a = a_n_;
    auto integrand = [&](double phi) {
        const double s = a * std::sin(phi);
        return s == 0.0 ? spec_.d2Q(0.0) : spec_.dQ(s) / s;
    };
    order_ = graded_half(integrand, 1.0).order;
}

double EquilibriumDensity::operator()(double x) const {
    const double a = a_n_;
    if (!(std::abs(x) < a)) return 0.0;
    const double dqx = spec_.dQ(x);
    const double d2qx = spec_.d2Q(x);
    // Q'' varies on the scale |x| near a kink at 0, so the guard shrinks there
    const double guard = 1e-8 * std::min(a, std::abs(x));
    auto divided = [&](double phi) {
        const double s = a * std::sin(phi);
        const double h = s - x;
        if (std::abs(h) < guard || h == 0.0) return std::isfinite(d2qx) ? d2qx : 0.0;
        return (spec_.dQ(s) - dqx) / h;
    };
    const double integral = graded_half(divided, -1.0).value + graded_half(divided, 1.0).value;
    return std::sqrt((a - x) * (a + x)) / (std::numbers::pi * std::numbers::pi) * integral;
}

double EquilibriumDensity::total_mass() const {
    const double a = a_n_;
    auto f = [&](double psi) { return (*this)(a * std::sin(psi)) * a * std::cos(psi); };
    return 2.0 * graded_half(f, 1.0, 1e-10).value;
}

EquilibriumDensity equilibrium_density(const WeightSpec& spec, int n, double a_n) {
    return EquilibriumDensity(spec, n, a_n);
}

}  // namespace orthorand
