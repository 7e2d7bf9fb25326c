#include "simstudy/stats/samplers.hpp"

#include <cmath>

#include "simstudy/errors.hpp"

namespace simstudy::stats {

Matrix sample_normal(Rng& rng, double mean, double sd, std::size_t rows, std::size_t cols) {
    if (!(sd > 0.0)) throw DomainError("sample_normal needs sd > 0");
    Matrix out(rows, cols);
    for (double& v : out.data()) v = mean + sd * rng.normal();
    return out;
}

Vector sample_normal(Rng& rng, double mean, double sd, std::size_t n) {
    if (!(sd > 0.0)) throw DomainError("sample_normal needs sd > 0");
    Vector out(n);
    for (double& v : out) v = mean + sd * rng.normal();
    return out;
}

Vector sample_lognormal(Rng& rng, std::size_t n) {
    Vector out(n);
    for (double& v : out) v = std::exp(rng.normal());
    return out;
}

double sample_gamma(Rng& rng, double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) throw DomainError("sample_gamma needs shape > 0");
    if (shape < 1.0) {
        const double g = sample_gamma(rng, shape + 1.0);
        return g * std::pow(rng.uniform_open(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_beta(Rng& rng, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("sample_beta needs a, b > 0");
    const double x = sample_gamma(rng, a);
    const double y = sample_gamma(rng, b);
    return x / (x + y);
}

Vector sample_beta(Rng& rng, double a, double b, std::size_t n) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("sample_beta needs a, b > 0");
    Vector out(n);
    for (double& v : out) v = sample_beta(rng, a, b);
    return out;
}

}  // namespace simstudy::stats
