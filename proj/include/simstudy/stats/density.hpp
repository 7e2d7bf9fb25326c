#pragma once

#include <functional>
#include <span>
#include <vector>

#include "simstudy/stats/matrix.hpp"
#include "simstudy/stats/rng.hpp"

namespace simstudy::stats {

/// Gaussian kernel density estimate f̂(x) = (1/(n·h)) Σ φ((x − xᵢ)/h).
class KdeModel {
public:
    KdeModel(Vector train, double bandwidth);

    double bandwidth() const noexcept { return h_; }
    const Vector& points() const noexcept { return train_; }

    double pdf(double x) const;
    /// Σ log f̂(xᵢ) over `held_out`; −∞ when any density underflows to 0.
    double log_likelihood(std::span<const double> held_out) const;

private:
    Vector train_;
    double h_;
};

KdeModel kde_fit(std::span<const double> train, double bandwidth);
inline double kde_pdf(const KdeModel& model, double x) { return model.pdf(x); }

/// 0.9 · min(sd, IQR/1.34) · n^(−1/5).
double silverman_bandwidth(std::span<const double> data);

/// `count` log-spaced values on [0.3·h_s, 3·h_s], h_s the Silverman bandwidth.
Vector default_bandwidth_grid(std::span<const double> data, std::size_t count = 30);

struct BandwidthChoice {
    double bandwidth = 0.0;
    double held_out_log_likelihood = 0.0;
    /// Every candidate scored −∞; the widest was taken.
    bool degenerate = false;
    /// The half every candidate was fitted on.
    Vector train;
};

/// Random 50/50 split: fit on the first half for each candidate, keep the
/// bandwidth maximizing the held-out log-likelihood (first one on ties).
BandwidthChoice select_bandwidth(std::span<const double> data, Rng& rng, std::span<const double> grid);

struct BetaComponent {
    double alpha;
    double beta;
    double weight;
};

/// Finite mixture of Beta densities on [0, 1].
class BetaMixture {
public:
    explicit BetaMixture(std::vector<BetaComponent> components);

    const std::vector<BetaComponent>& components() const noexcept { return components_; }

    /// 0 outside [0, 1].
    double pdf(double x) const;
    double sample(Rng& rng) const;
    Vector sample(Rng& rng, std::size_t n) const;

private:
    std::vector<BetaComponent> components_;
    std::vector<double> log_norm_;  // −log B(α, β)
};

inline double beta_mixture_pdf(const BetaMixture& mix, double x) { return mix.pdf(x); }

/// Weights .2/.25/.35/.2 over Beta(1.3,1.3), Beta(1.1,3), Beta(5,1), Beta(1.5,4).
BetaMixture reference_mixture();

/// ∫₀¹ (f − g)² dx by the composite trapezoid rule on `grid_points` equally
/// spaced nodes (at least 512).
double integrated_squared_loss(const std::function<double(double)>& f, const std::function<double(double)>& g,
                               std::size_t grid_points = 2048);

}  // namespace simstudy::stats
