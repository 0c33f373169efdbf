#include "orthorand/ensembles.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "orthorand/errors.hpp"

namespace orthorand {

namespace {

const double kSqrt3 = std::sqrt(3.0);

double lomax_beta(double eps0) { return 4.0 + eps0; }

double lomax_sigma(double eps0) {
    const double b = lomax_beta(eps0);
    return std::sqrt(2.0 / ((b - 1.0) * (b - 2.0)));
}

}  // namespace

Ensemble Ensemble::gaussian() { return {EnsembleKind::gaussian, 0.0, "gaussian"}; }
Ensemble Ensemble::rademacher() { return {EnsembleKind::rademacher, 0.0, "rademacher"}; }
Ensemble Ensemble::uniform() { return {EnsembleKind::uniform, 0.0, "uniform"}; }

Ensemble Ensemble::heavy_tail(double eps0) {
    if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw ValidationError("heavy-tail ensemble needs eps0 > 0");
    char buf[64];
    std::snprintf(buf, sizeof buf, "heavy:%.17g", eps0);
    return {EnsembleKind::heavy_tail, eps0, buf};
}

Ensemble Ensemble::parse(std::string_view text) {
    if (text == "gaussian") return gaussian();
    if (text == "rademacher") return rademacher();
    if (text == "uniform") return uniform();
    if (text == "heavy") return heavy_tail();
    if (text.substr(0, 6) == "heavy:") {
        const auto rest = text.substr(6);
        double eps = 0.0;
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), eps);
        if (ec != std::errc() || ptr != rest.data() + rest.size())
            throw ValidationError("cannot parse heavy-tail parameter '" + std::string(rest) + "'");
        return heavy_tail(eps);
    }
    throw ValidationError("unknown ensemble '" + std::string(text) +
                          "' (expected gaussian, rademacher, uniform or heavy:<eps0>)");
}

double Ensemble::density(double v) const {
    switch (kind_) {
        case EnsembleKind::gaussian: return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
        case EnsembleKind::uniform: return std::abs(v) <= kSqrt3 ? 0.5 / kSqrt3 : 0.0;
        case EnsembleKind::heavy_tail: {
            const double b = lomax_beta(eps0_), s = lomax_sigma(eps0_);
            return s * 0.5 * b * std::pow(1.0 + s * std::abs(v), -b - 1.0);
        }
        case EnsembleKind::rademacher: break;
    }
    throw UnsupportedError("the rademacher ensemble has no density");
}

double density_at(const Ensemble& e, double v) { return e.density(v); }

double uniform01(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

double Ensemble::draw(std::mt19937_64& eng) const {
    switch (kind_) {
        case EnsembleKind::gaussian: {
            // Marsaglia polar method, one value per accepted pair
            for (;;) {
                const double u = 2.0 * uniform01(eng) - 1.0;
                const double v = 2.0 * uniform01(eng) - 1.0;
                const double s = u * u + v * v;
                if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
            }
        }
        case EnsembleKind::rademacher: return (eng() >> 63) ? 1.0 : -1.0;
        case EnsembleKind::uniform: return kSqrt3 * (2.0 * uniform01(eng) - 1.0);
        case EnsembleKind::heavy_tail: {
            const std::uint64_t bits = eng();
            const double sign = (bits >> 63) ? 1.0 : -1.0;
            // inverse CDF on 1 - U in (0, 1]
            const double u = 1.0 - uniform01(eng);
            const double y = std::pow(u, -1.0 / lomax_beta(eps0_)) - 1.0;
            return sign * y / lomax_sigma(eps0_);
        }
    }
    return 0.0;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return splitmix64(master_seed ^ splitmix64(trial_index + 0x9e3779b97f4a7c15ULL));
}

RandomPolynomial sample(const Ensemble& e, int n, std::uint64_t master_seed, std::uint64_t trial_index) {
    if (n < 1) throw DomainError("random polynomial needs n >= 1");
    std::mt19937_64 eng(trial_seed(master_seed, trial_index));
    RandomPolynomial p;
    p.n = n;
    p.xi.resize(n + 1);
    for (int k = 0; k <= n; ++k) p.xi[k] = e.draw(eng);
    p.ensemble = e.id();
    p.master_seed = master_seed;
    p.trial_index = trial_index;
    return p;
}

}  // namespace orthorand
