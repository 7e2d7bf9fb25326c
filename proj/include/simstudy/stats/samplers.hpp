#pragma once

#include <cstddef>

#include "simstudy/stats/matrix.hpp"
#include "simstudy/stats/rng.hpp"

namespace simstudy::stats {

/// i.i.d. N(mean, sd²) draws filling a rows×cols matrix in row-major order.
/// `sd` is the standard deviation.
Matrix sample_normal(Rng& rng, double mean, double sd, std::size_t rows, std::size_t cols);
Vector sample_normal(Rng& rng, double mean, double sd, std::size_t n);

/// exp of standard normal draws.
Vector sample_lognormal(Rng& rng, std::size_t n);

/// Gamma(shape, 1) by Marsaglia–Tsang squeeze/rejection; shape < 1 is
/// boosted as Gamma(shape + 1)·U^{1/shape}.
double sample_gamma(Rng& rng, double shape);

/// Beta(a, b) = X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
double sample_beta(Rng& rng, double a, double b);
Vector sample_beta(Rng& rng, double a, double b, std::size_t n);

}  // namespace simstudy::stats
