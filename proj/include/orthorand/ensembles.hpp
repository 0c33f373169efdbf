#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace orthorand {

enum class EnsembleKind { gaussian, rademacher, uniform, heavy_tail };

/// Coefficient law with mean 0 and variance 1.
///
/// heavy_tail(eps0) is a symmetric Lomax (Pareto II) law with tail index
/// beta = 4 + eps0, scaled to unit variance: |X| = Y / sigma_Y where
/// P(Y > y) = (1 + y)^(-beta) and sigma_Y^2 = 2 / ((beta - 1)(beta - 2)).
/// Moments of order < beta are finite, so (2 + eps0)-moments are bounded.
class Ensemble {
public:
    static Ensemble gaussian();
    static Ensemble rademacher();
    static Ensemble uniform();
    static Ensemble heavy_tail(double eps0 = 0.5);
    /// "gaussian", "rademacher", "uniform", "heavy:<eps0>".
    static Ensemble parse(std::string_view text);

    EnsembleKind kind() const { return kind_; }
    double eps0() const { return eps0_; }
    bool has_density() const { return kind_ != EnsembleKind::rademacher; }
    const std::string& id() const { return id_; }

    /// f(v); throws UnsupportedError for rademacher.
    double density(double v) const;

    /// One draw from the per-trial engine.
    double draw(std::mt19937_64& eng) const;

private:
    Ensemble(EnsembleKind k, double eps0, std::string id) : kind_(k), eps0_(eps0), id_(std::move(id)) {}

    EnsembleKind kind_;
    double eps0_ = 0.0;
    std::string id_;
};

double density_at(const Ensemble& e, double v);

/// splitmix64 finaliser; also used to mix (master_seed, trial_index).
std::uint64_t splitmix64(std::uint64_t x);

/// Per-trial engine seed: splitmix64(master_seed ^ splitmix64(trial_index + golden)).
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

/// Uniform double in [0, 1) from the top 53 bits of one engine output.
double uniform01(std::mt19937_64& eng);

struct RandomPolynomial {
    int n = 0;
    Eigen::VectorXd xi;  ///< n + 1 coefficients in the orthonormal basis
    std::string ensemble;
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;
};

/// Bit-identical for identical (ensemble, n, master_seed, trial_index); the
/// transforms are written out here rather than taken from <random>'s
/// distributions, whose algorithms differ between standard libraries.
RandomPolynomial sample(const Ensemble& e, int n, std::uint64_t master_seed, std::uint64_t trial_index);

}  // namespace orthorand
