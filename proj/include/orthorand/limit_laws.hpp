#pragma once

#include "orthorand/recurrence.hpp"
#include "orthorand/weight.hpp"

namespace orthorand {

/// u_alpha(x) = (alpha/pi) int_{|x|}^1 t^(alpha-1) / sqrt(t^2 - x^2) dt on [-1, 1].
/// Computed in s = sqrt(t^2 - x^2), plus s = v^(1/(alpha-1)) when alpha < 2 so
/// the integrand stays bounded at x = 0. Throws DomainError for |x| > 1.
double ullman_density(double alpha, double x);

class UllmanDistribution {
public:
    explicit UllmanDistribution(double alpha);

    double alpha() const { return alpha_; }
    double density(double x) const { return ullman_density(alpha_, x); }
    /// mu_alpha([-1, x]); 0 below -1, 1 above 1.
    double cdf(double x) const;
    double mass(double a, double b) const { return cdf(b) - cdf(a); }
    /// int x^m d mu_alpha, closed form.
    double moment(int m) const;

private:
    double alpha_;
};

/// gamma_alpha = Gamma(alpha/2) Gamma(1/2) / (2 Gamma(alpha/2 + 1/2))
///             = int_0^1 t^(alpha-1) / sqrt(1 - t^2) dt.
struct GammaConstantForms {
    double gamma_form;
    double quadrature_form;
};

GammaConstantForms gamma_constant_forms(double alpha);

/// Gamma-function form; throws AccuracyError if the quadrature form
/// disagrees by more than 1e-10 relative.
double gamma_constant(double alpha);

/// Expected number of real roots per unit s of P_n(a_n s) for gaussian
/// coefficients: a_n/pi * sqrt(K11/K - (K01/K)^2) at x = a_n s.
class KacRiceDensity {
public:
    KacRiceDensity(RecurrenceTable table, WeightSpec spec, int n, double a_n);

    int n() const { return n_; }
    double a_n() const { return a_n_; }
    double operator()(double s) const;

private:
    RecurrenceTable table_;
    WeightSpec spec_;
    int n_;
    double a_n_;
};

/// rho*_n(s). The discriminant is taken from the unweighted kernels, equal to
/// the weighted one with the Q' cross terms cancelled; debug builds assert the
/// two agree to 1e-9. Negative discriminants beyond round-off throw NumericError.
double kac_rice_density(const RecurrenceTable& table, const WeightSpec& spec, double a_n, int n, double s);

/// int_a^b rho*_n(s) ds by adaptive Gauss-Kronrod, 1e-8 absolute.
double expected_count(const KacRiceDensity& rho, double a, double b);

}  // namespace orthorand
