#pragma once

#include <span>

namespace simstudy::stats {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Welch's unequal-variance t-test, two-sided. Degrees of freedom by
/// Welch–Satterthwaite, not rounded. When both variances are zero the
/// p-value is 1 for equal means and 0 otherwise.
TestResult welch_t_test(std::span<const double> x, std::span<const double> y);

/// Welch–Satterthwaite degrees of freedom.
double welch_df(std::span<const double> x, std::span<const double> y);

/// Mann–Whitney U test, two-sided. Statistic is U for `x` (rank sum of x
/// minus nx(nx+1)/2, midranks for ties). The p-value uses the normal
/// approximation with continuity correction and tie-corrected variance.
TestResult mann_whitney_test(std::span<const double> x, std::span<const double> y);

/// Two-sample Kolmogorov–Smirnov test. Statistic D = sup|F̂x − F̂y|; p-value
/// from the limiting distribution at λ = D·√(nx·ny/(nx+ny)).
TestResult ks_test(std::span<const double> x, std::span<const double> y);

}  // namespace simstudy::stats
