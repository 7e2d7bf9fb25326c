#include "simstudy/stats/regression.hpp"

#include <algorithm>
#include <cmath>

#include "simstudy/errors.hpp"

namespace simstudy::stats {

namespace {

struct Centered {
    Matrix x;
    Vector y;
    Vector x_mean;
    double y_mean = 0.0;
};

Centered center(const Matrix& x, std::span<const double> y) {
    if (x.rows() != y.size()) throw DomainError("design rows and response length differ");
    if (x.rows() == 0) throw DomainError("empty design");
    const std::size_t n = x.rows(), p = x.cols();
    Centered c{x, Vector(y.begin(), y.end()), Vector(p, 0.0), 0.0};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) c.x_mean[j] += x(i, j);
    for (double& m : c.x_mean) m /= static_cast<double>(n);
    c.y_mean = mean(y);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) c.x(i, j) -= c.x_mean[j];
        c.y[i] -= c.y_mean;
    }
    return c;
}

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

double finish_intercept(const Centered& c, const Vector& coef) {
    double b = c.y_mean;
    for (std::size_t j = 0; j < coef.size(); ++j) b -= c.x_mean[j] * coef[j];
    return b;
}

// g = Xᶜᵀ(yᶜ − Xᶜw)/n
Vector centered_gradient(const Centered& c, const Vector& w) {
    const std::size_t n = c.x.rows(), p = c.x.cols();
    Vector g(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = c.x.row(i);
        double r = c.y[i];
        for (std::size_t j = 0; j < p; ++j) r -= row[j] * w[j];
        for (std::size_t j = 0; j < p; ++j) g[j] += row[j] * r;
    }
    for (double& v : g) v /= static_cast<double>(n);
    return g;
}

}  // namespace

LinearModel ols_fit(const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.rows(), p = x.cols();
    if (n <= p) throw SolverError("ols_fit needs more rows than columns");
    Centered c = center(x, y);

    // Householder QR in place on the centered design; qty tracks Qᵀy.
    Matrix& a = c.x;
    Vector qty = c.y;
    Vector diag(p, 0.0);
    double max_diag = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += a(i, k) * a(i, k);
        norm = std::sqrt(norm);
        const double alpha = a(k, k) > 0 ? -norm : norm;
        diag[k] = alpha;
        max_diag = std::max(max_diag, std::fabs(alpha));
        if (norm == 0.0) continue;
        a(k, k) -= alpha;  // v = x − αe₁ stored in column k
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) vnorm2 += a(i, k) * a(i, k);
        if (vnorm2 == 0.0) continue;
        for (std::size_t j = k + 1; j < p; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += a(i, k) * a(i, j);
            const double f = 2.0 * s / vnorm2;
            for (std::size_t i = k; i < n; ++i) a(i, j) -= f * a(i, k);
        }
        double s = 0.0;
        for (std::size_t i = k; i < n; ++i) s += a(i, k) * qty[i];
        const double f = 2.0 * s / vnorm2;
        for (std::size_t i = k; i < n; ++i) qty[i] -= f * a(i, k);
    }
    const double tol = 1e-10 * max_diag;
    for (std::size_t k = 0; k < p; ++k)
        if (std::fabs(diag[k]) <= tol)
            throw SolverError("ols_fit: design is rank-deficient (column " + std::to_string(k) + ")");

    Vector coef(p, 0.0);
    for (std::size_t kk = p; kk-- > 0;) {
        double s = qty[kk];
        for (std::size_t j = kk + 1; j < p; ++j) s -= a(kk, j) * coef[j];
        coef[kk] = s / diag[kk];
    }
    LinearModel m;
    m.intercept = finish_intercept(c, coef);
    m.coef = std::move(coef);
    return m;
}

LinearModel lasso_fit(const Matrix& x, std::span<const double> y, double alpha, LassoOptions opts) {
    if (!(alpha >= 0.0)) throw DomainError("lasso alpha must be >= 0");
    const std::size_t n = x.rows(), p = x.cols();
    const Centered c = center(x, y);
    const double inv_n = 1.0 / static_cast<double>(n);

    // Gram form: gram = XᶜᵀXᶜ/n, xty = Xᶜᵀyᶜ/n; each coordinate step is O(p).
    Matrix gram(p, p);
    Vector xty(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = c.x.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            xty[j] += row[j] * c.y[i];
            for (std::size_t k = j; k < p; ++k) gram(j, k) += row[j] * row[k];
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        xty[j] *= inv_n;
        for (std::size_t k = j; k < p; ++k) {
            gram(j, k) *= inv_n;
            gram(k, j) = gram(j, k);
        }
    }

    Vector w(p, 0.0);
    Vector gw(p, 0.0);  // gram·w
    LinearModel m;
    m.converged = false;
    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double gjj = gram(j, j);
            const double old = w[j];
            double updated = 0.0;
            if (gjj > 0.0) {
                const double rho = xty[j] - gw[j] + gjj * old;
                updated = soft_threshold(rho, alpha) / gjj;
            }
            const double delta = updated - old;
            if (delta != 0.0) {
                for (std::size_t k = 0; k < p; ++k) gw[k] += gram(k, j) * delta;
                w[j] = updated;
                max_change = std::max(max_change, std::fabs(delta));
            }
        }
        m.sweeps = sweep;
        if (max_change < opts.tolerance) {
            m.converged = true;
            break;
        }
    }
    m.intercept = finish_intercept(c, w);
    m.coef = std::move(w);
    return m;
}

double lasso_objective(const Matrix& x, std::span<const double> y, const LinearModel& model, double alpha) {
    const Vector pred = predict(model, x);
    double rss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) rss += (y[i] - pred[i]) * (y[i] - pred[i]);
    double l1 = 0.0;
    for (double v : model.coef) l1 += std::fabs(v);
    return rss / (2.0 * static_cast<double>(y.size())) + alpha * l1;
}

double lasso_kkt_residual(const Matrix& x, std::span<const double> y, const LinearModel& model, double alpha) {
    const Centered c = center(x, y);
    const Vector g = centered_gradient(c, model.coef);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double w = model.coef[j];
        const double v = w != 0.0 ? std::fabs(g[j] - alpha * (w > 0 ? 1.0 : -1.0)) : std::max(0.0, std::fabs(g[j]) - alpha);
        worst = std::max(worst, v);
    }
    return worst;
}

double lasso_alpha_max(const Matrix& x, std::span<const double> y) {
    const Centered c = center(x, y);
    const double inv_n = 1.0 / static_cast<double>(x.rows());
    // same accumulation order as lasso_fit, so α = alpha_max yields exact zeros
    Vector xty(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto row = c.x.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) xty[j] += row[j] * c.y[i];
    }
    double m = 0.0;
    for (double v : xty) m = std::max(m, std::fabs(v * inv_n));
    return m;
}

Vector predict(const LinearModel& model, const Matrix& x) {
    Vector out = matvec(x, model.coef);
    for (double& v : out) v += model.intercept;
    return out;
}

double r2_score(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty()) throw DomainError("r2_score needs equal, non-empty inputs");
    const double m = mean(y_true);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
        ss_tot += (y_true[i] - m) * (y_true[i] - m);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

}  // namespace simstudy::stats
