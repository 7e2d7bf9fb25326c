#pragma once

#include <span>

#include "simstudy/stats/matrix.hpp"

namespace simstudy::stats {

struct LinearModel {
    Vector coef;
    double intercept = 0.0;
    /// Lasso only: false when the sweep budget ran out before the tolerance
    /// was met; the best iterate is still returned.
    bool converged = true;
    int sweeps = 0;
};

/// Least squares with an unpenalized intercept, via Householder QR of the
/// centered design. Throws SolverError when rows ≤ cols or the centered
/// design is rank-deficient.
LinearModel ols_fit(const Matrix& x, std::span<const double> y);

struct LassoOptions {
    double tolerance = 1e-7;  // max coefficient change over a sweep
    int max_sweeps = 10'000;
};

/// Minimizes (1/(2n))‖y − Xw − b‖² + α‖w‖₁ by cyclic coordinate descent on
/// the Gram matrix of the centered design; b is unpenalized.
LinearModel lasso_fit(const Matrix& x, std::span<const double> y, double alpha, LassoOptions opts = {});

/// The lasso objective above evaluated at `model`.
double lasso_objective(const Matrix& x, std::span<const double> y, const LinearModel& model, double alpha);

/// Largest violation of the lasso subgradient conditions:
///   w_j ≠ 0: |g_j − α·sign(w_j)|,  w_j = 0: max(0, |g_j| − α),
/// with g = Xᶜᵀ(yᶜ − Xᶜw)/n on centered data.
double lasso_kkt_residual(const Matrix& x, std::span<const double> y, const LinearModel& model, double alpha);

/// max_j |Xᶜⱼᵀ yᶜ| / n: the smallest α whose lasso solution is all zeros.
double lasso_alpha_max(const Matrix& x, std::span<const double> y);

Vector predict(const LinearModel& model, const Matrix& x);

/// Coefficient of determination 1 − SS_res/SS_tot. When y_true is constant:
/// 1 for a perfect prediction, else 0.
double r2_score(std::span<const double> y_true, std::span<const double> y_pred);

}  // namespace simstudy::stats
