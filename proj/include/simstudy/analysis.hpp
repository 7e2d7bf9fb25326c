#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "simstudy/paramspace.hpp"
#include "simstudy/schema.hpp"

namespace simstudy {

struct MeanSe {
    double mean = 0.0;
    /// Sample standard deviation (n − 1) over √n; 0 when n = 1.
    double std_error = 0.0;
};

/// Mean and standard error of `values`. Throws on empty input.
MeanSe mean_and_se(std::span<const double> values);

/// "0.803 (0.035)" for the default three decimals.
std::string format_mean_se(const MeanSe& m, int decimals = 3);

struct AggregateSummary {
    Configuration group;
    std::int64_t n = 0;
    /// Per numeric outcome (float and integer kinds); blobs and text skipped.
    std::map<std::string, MeanSe> outcomes;
};

/// One summary per distinct value of the `group_axes` projection, ordered by
/// group values (axis by axis). Every record is included, so configurations
/// that overshot max_count report their true n.
std::vector<AggregateSummary> aggregate(const std::vector<ResultRecord>& records,
                                        const std::vector<std::string>& group_axes);

struct RateEstimate {
    double rate = 0.0;
    double std_error = 0.0;
};

/// #{p ≤ α}/n with binomial standard error √(rate(1 − rate)/n).
RateEstimate rejection_rate(std::span<const double> pvalues, double alpha);

/// Right-continuous empirical CDF with a ±2·SE pointwise band.
class EcdfCurve {
public:
    struct Point {
        double x;
        double f;
    };

    explicit EcdfCurve(std::vector<double> values);

    std::size_t n() const noexcept { return sorted_.size(); }
    /// Jump points (distinct sample values) with F̂ at each.
    const std::vector<Point>& points() const noexcept { return points_; }

    double operator()(double x) const;
    /// 2·√(F̂(x)(1 − F̂(x))/n)
    double band_halfwidth(double x) const;
    double lower(double x) const;
    double upper(double x) const;

private:
    std::vector<double> sorted_;
    std::vector<Point> points_;
};

/// Throws on empty input or values outside [0, 1].
EcdfCurve ecdf(std::span<const double> pvalues);

struct RejectionRateRow {
    Configuration group;
    std::int64_t n = 0;
    MeanSe avg_p;
    RateEstimate rate_1pct;
    RateEstimate rate_5pct;
};

/// Type-I error / power table: per group, mean p-value and rejection rates
/// at α = 0.01 and 0.05, read from the float outcome `pvalue_field`.
std::vector<RejectionRateRow> rejection_table(const std::vector<ResultRecord>& records,
                                              const std::vector<std::string>& group_axes,
                                              const std::string& pvalue_field = "p_value");

/// Float values of a numeric outcome for records matching `selection`.
std::vector<double> outcome_values(const std::vector<ResultRecord>& records, const std::string& field,
                                   const Configuration& selection = {});

}  // namespace simstudy
