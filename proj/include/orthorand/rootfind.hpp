#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "orthorand/ensembles.hpp"
#include "orthorand/limit_laws.hpp"
#include "orthorand/recurrence.hpp"
#include "orthorand/weight.hpp"

namespace orthorand {

enum class RootMethod { scan, comrade };

const char* to_string(RootMethod m);
RootMethod parse_root_method(std::string_view text);

struct RootSet {
    int n = 0;
    double a_n = 0.0;
    RootMethod method = RootMethod::scan;
    std::vector<double> scaled_real_roots;  ///< ascending, s = x / a_n
    bool has_complex = false;
    /// every root (s-coordinates) for the comrade method; real ones have Im = 0
    std::vector<std::complex<double>> complex_roots;
    std::vector<std::pair<double, double>> suspicious_intervals;
    int refined_pairs = 0;  ///< root pairs recovered inside a single grid cell

    int num_real() const { return static_cast<int>(scaled_real_roots.size()); }
    int count_in(double s_lo, double s_hi) const;
};

struct ScanOptions {
    int oversample = 20;              ///< g: grid points per unit s per degree
    double dip_log_threshold = -20.0;  ///< log of |F| / sqrt(K~) that counts as a dip
    std::size_t memory_cap = std::size_t{1} << 30;  ///< bytes for the precomputed grid rows
};

/// Precomputed normalized basis rows q_k(a_n s_i)/sqrt(K~(a_n s_i)) and their
/// derivatives on the scan grid. One plan serves every trial with the same
/// (table, weight, n, interval); a trial then costs two matrix-vector products.
/// Falls back to per-point evaluation when the rows would exceed memory_cap.
class ScanPlan {
public:
    ScanPlan(const RecurrenceTable& table, const WeightSpec& spec, int n, double a_n, double s_lo, double s_hi,
             const ScanOptions& opts = {});

    int n() const { return n_; }
    double a_n() const { return a_n_; }
    double s_lo() const { return s_lo_; }
    double s_hi() const { return s_hi_; }
    const Eigen::VectorXd& grid() const { return grid_; }
    bool precomputed() const { return precomputed_; }
    const ScanOptions& options() const { return opts_; }
    const RecurrenceTable& table() const { return *table_; }
    const WeightSpec& spec() const { return *spec_; }

    /// Normalized F and F' on the grid for coefficients xi.
    void evaluate(const Eigen::VectorXd& xi, Eigen::VectorXd& f, Eigen::VectorXd& df) const;

private:
    const RecurrenceTable* table_;
    const WeightSpec* spec_;
    int n_;
    double a_n_, s_lo_, s_hi_;
    ScanOptions opts_;
    Eigen::VectorXd grid_;
    bool precomputed_ = false;
    Eigen::MatrixXd rows_, drows_;
};

/// Real roots of P_n(a_n s) in [s_lo, s_hi] by sign changes on the plan's grid,
/// bisection to 1e-13 in s and a Newton polish that is only accepted when it
/// lowers |P_n|. Cells where F and F' show an extremum toward zero without a
/// sign change are searched for a hidden root pair; dips below the threshold
/// that still show no root are reported as suspicious intervals.
RootSet scan_real_roots(const RandomPolynomial& poly, const ScanPlan& plan);

/// Convenience overload that builds a one-off plan (interval within [-3, 3], g >= 4).
RootSet scan_real_roots(const RandomPolynomial& poly, const RecurrenceTable& table, const WeightSpec& spec,
                        double a_n, std::pair<double, double> interval, int oversample = 20);

struct ComradeOptions {
    int cap = 512;
    double real_tol = 1e-8;  ///< |Im| <= real_tol (1 + |Re|) counts as real
};

/// All roots of sum c_k p_k from the eigenvalues of the comrade matrix
/// J_n - (A_{n-1}/c_n) e_{n-1} c^T, whose transpose is already upper Hessenberg.
/// Throws DomainError when |c_n| <= 1e-300 ||c|| and ValidationError above the cap.
RootSet comrade_roots(const RandomPolynomial& poly, const RecurrenceTable& table, double a_n,
                      const ComradeOptions& opts = {});

struct MeasureDistance {
    double sup_cdf = 0.0;          ///< Kolmogorov distance of Re(roots) to mu_alpha
    std::vector<double> moments;   ///< |mean Re(z)^m - int x^m d mu_alpha|, m = 1..4
    std::vector<double> signed_moments;  ///< same without the absolute value
};

/// Compares the empirical measure of all (scaled) roots with mu_alpha.
/// Requires complex roots, i.e. the comrade method.
MeasureDistance counting_measure_distance(const RootSet& roots, const UllmanDistribution& mu);

}  // namespace orthorand
