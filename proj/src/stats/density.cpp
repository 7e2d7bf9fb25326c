#include "simstudy/stats/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "simstudy/errors.hpp"
#include "simstudy/stats/samplers.hpp"
#include "simstudy/stats/special.hpp"

namespace simstudy::stats {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

double quantile_sorted(const Vector& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

KdeModel::KdeModel(Vector train, double bandwidth) : train_(std::move(train)), h_(bandwidth) {
    if (!(h_ > 0.0) || !std::isfinite(h_)) throw DomainError("kde bandwidth must be > 0");
    if (train_.empty()) throw DomainError("kde needs at least one training point");
}

double KdeModel::pdf(double x) const {
    double s = 0.0;
    for (double xi : train_) {
        const double u = (x - xi) / h_;
        s += std::exp(-0.5 * u * u);
    }
    return s * kInvSqrt2Pi / (static_cast<double>(train_.size()) * h_);
}

double KdeModel::log_likelihood(std::span<const double> held_out) const {
    double ll = 0.0;
    for (double x : held_out) {
        const double f = pdf(x);
        if (!(f > 0.0)) return -std::numeric_limits<double>::infinity();
        ll += std::log(f);
    }
    return ll;
}

KdeModel kde_fit(std::span<const double> train, double bandwidth) {
    return KdeModel(Vector(train.begin(), train.end()), bandwidth);
}

double silverman_bandwidth(std::span<const double> data) {
    if (data.size() < 2) throw DomainError("silverman bandwidth needs at least two points");
    Vector sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double sd = std::sqrt(variance(data));
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    if (!(spread > 0.0)) throw DomainError("silverman bandwidth undefined for constant data");
    return 0.9 * spread * std::pow(static_cast<double>(data.size()), -0.2);
}

Vector default_bandwidth_grid(std::span<const double> data, std::size_t count) {
    if (count == 0) throw DomainError("bandwidth grid needs at least one value");
    const double hs = silverman_bandwidth(data);
    const double lo = std::log(0.3 * hs), hi = std::log(3.0 * hs);
    Vector grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        grid[i] = std::exp(lo + t * (hi - lo));
    }
    return grid;
}

BandwidthChoice select_bandwidth(std::span<const double> data, Rng& rng, std::span<const double> grid) {
    if (data.size() < 4) throw DomainError("select_bandwidth needs at least four points");
    if (grid.empty()) throw DomainError("select_bandwidth needs a non-empty grid");
    for (double h : grid)
        if (!(h > 0.0)) throw DomainError("bandwidth candidates must be > 0");

    Vector shuffled(data.begin(), data.end());
    rng.shuffle(std::span<double>(shuffled));
    const std::size_t half = shuffled.size() / 2;
    const Vector train(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(half));
    const std::span<const double> held_out(shuffled.data() + half, shuffled.size() - half);

    BandwidthChoice best{0.0, -std::numeric_limits<double>::infinity(), true, {}};
    for (double h : grid) {
        const double ll = KdeModel(train, h).log_likelihood(held_out);
        if (ll > best.held_out_log_likelihood) best = {h, ll, false, {}};
    }
    if (best.degenerate) best.bandwidth = *std::max_element(grid.begin(), grid.end());
    best.train = train;
    return best;
}

BetaMixture::BetaMixture(std::vector<BetaComponent> components) : components_(std::move(components)) {
    if (components_.empty()) throw DomainError("mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.alpha > 0.0) || !(c.beta > 0.0) || !(c.weight > 0.0))
            throw DomainError("mixture parameters and weights must be > 0");
        total += c.weight;
        log_norm_.push_back(-log_beta(c.alpha, c.beta));
    }
    if (std::fabs(total - 1.0) > 1e-12) throw DomainError("mixture weights must sum to 1");
}

double BetaMixture::pdf(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) return 0.0;
    double f = 0.0;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const auto& c = components_[i];
        f += c.weight * std::exp(log_norm_[i]) * std::pow(x, c.alpha - 1.0) * std::pow(1.0 - x, c.beta - 1.0);
    }
    return f;
}

double BetaMixture::sample(Rng& rng) const {
    const double u = rng.uniform();
    double cum = 0.0;
    const BetaComponent* pick = &components_.back();
    for (const auto& c : components_) {
        cum += c.weight;
        if (u < cum) {
            pick = &c;
            break;
        }
    }
    return sample_beta(rng, pick->alpha, pick->beta);
}

Vector BetaMixture::sample(Rng& rng, std::size_t n) const {
    Vector out(n);
    for (double& v : out) v = sample(rng);
    return out;
}

BetaMixture reference_mixture() {
    return BetaMixture({{1.3, 1.3, 0.2}, {1.1, 3.0, 0.25}, {5.0, 1.0, 0.35}, {1.5, 4.0, 0.2}});
}

double integrated_squared_loss(const std::function<double(double)>& f, const std::function<double(double)>& g,
                               std::size_t grid_points) {
    if (grid_points < 512) throw DomainError("integrated_squared_loss needs at least 512 grid points");
    const double step = 1.0 / static_cast<double>(grid_points - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double x = i + 1 == grid_points ? 1.0 : static_cast<double>(i) * step;
        const double d = f(x) - g(x);
        const double w = (i == 0 || i + 1 == grid_points) ? 0.5 : 1.0;
        sum += w * d * d;
    }
    return sum * step;
}

}  // namespace simstudy::stats
