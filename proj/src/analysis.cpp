#include "simstudy/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "simstudy/errors.hpp"

namespace simstudy {

namespace {

std::optional<double> numeric(const Outcome& o) {
    if (const auto* d = std::get_if<double>(&o)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&o)) return static_cast<double>(*i);
    return std::nullopt;
}

std::vector<Value> group_key(const ResultRecord& r, const std::vector<std::string>& axes) {
    std::vector<Value> key;
    key.reserve(axes.size());
    for (const auto& a : axes) key.push_back(r.config.at(a));
    return key;
}

Configuration key_to_config(const std::vector<std::string>& axes, const std::vector<Value>& key) {
    std::vector<Configuration::Assignment> items;
    for (std::size_t i = 0; i < axes.size(); ++i) items.emplace_back(axes[i], key[i]);
    return Configuration(std::move(items));
}

}  // namespace

MeanSe mean_and_se(std::span<const double> values) {
    if (values.empty()) throw Error("mean of an empty sample");
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, sd / std::sqrt(n)};
}

std::string format_mean_se(const MeanSe& m, int decimals) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.*f (%.*f)", decimals, m.mean, decimals, m.std_error);
    return buf;
}

std::vector<AggregateSummary> aggregate(const std::vector<ResultRecord>& records,
                                        const std::vector<std::string>& group_axes) {
    struct Acc {
        std::int64_t n = 0;
        std::map<std::string, std::vector<double>> values;
    };
    std::map<std::vector<Value>, Acc> groups;
    for (const auto& r : records) {
        Acc& acc = groups[group_key(r, group_axes)];
        ++acc.n;
        for (const auto& [name, o] : r.outcomes)
            if (auto v = numeric(o)) acc.values[name].push_back(*v);
    }
    std::vector<AggregateSummary> out;
    out.reserve(groups.size());
    for (const auto& [key, acc] : groups) {
        AggregateSummary s;
        s.group = key_to_config(group_axes, key);
        s.n = acc.n;
        for (const auto& [name, vals] : acc.values) s.outcomes[name] = mean_and_se(vals);
        out.push_back(std::move(s));
    }
    return out;
}

RateEstimate rejection_rate(std::span<const double> pvalues, double alpha) {
    if (pvalues.empty()) throw Error("rejection rate of an empty sample is undefined");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
    const auto hits = std::count_if(pvalues.begin(), pvalues.end(), [&](double p) { return p <= alpha; });
    const double n = static_cast<double>(pvalues.size());
    const double rate = static_cast<double>(hits) / n;
    return {rate, std::sqrt(rate * (1.0 - rate) / n)};
}

EcdfCurve::EcdfCurve(std::vector<double> values) : sorted_(std::move(values)) {
    if (sorted_.empty()) throw Error("ECDF of an empty sample");
    for (double v : sorted_)
        if (!(v >= 0.0 && v <= 1.0)) throw Error("ECDF values must lie in [0, 1]");
    std::sort(sorted_.begin(), sorted_.end());
    const double n = static_cast<double>(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
        if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
        points_.push_back({sorted_[i], static_cast<double>(i + 1) / n});
    }
}

double EcdfCurve::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EcdfCurve::band_halfwidth(double x) const {
    const double f = (*this)(x);
    return 2.0 * std::sqrt(f * (1.0 - f) / static_cast<double>(sorted_.size()));
}

double EcdfCurve::lower(double x) const { return std::max(0.0, (*this)(x) - band_halfwidth(x)); }

double EcdfCurve::upper(double x) const { return std::min(1.0, (*this)(x) + band_halfwidth(x)); }

EcdfCurve ecdf(std::span<const double> pvalues) { return EcdfCurve(std::vector<double>(pvalues.begin(), pvalues.end())); }

std::vector<RejectionRateRow> rejection_table(const std::vector<ResultRecord>& records,
                                              const std::vector<std::string>& group_axes,
                                              const std::string& pvalue_field) {
    std::map<std::vector<Value>, std::vector<double>> groups;
    for (const auto& r : records) {
        auto it = r.outcomes.find(pvalue_field);
        if (it == r.outcomes.end()) throw Error("record has no outcome '" + pvalue_field + "'");
        const auto p = numeric(it->second);
        if (!p) throw Error("outcome '" + pvalue_field + "' is not numeric");
        groups[group_key(r, group_axes)].push_back(*p);
    }
    std::vector<RejectionRateRow> out;
    for (const auto& [key, ps] : groups) {
        RejectionRateRow row;
        row.group = key_to_config(group_axes, key);
        row.n = static_cast<std::int64_t>(ps.size());
        row.avg_p = mean_and_se(ps);
        row.rate_1pct = rejection_rate(ps, 0.01);
        row.rate_5pct = rejection_rate(ps, 0.05);
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<double> outcome_values(const std::vector<ResultRecord>& records, const std::string& field,
                                   const Configuration& selection) {
    std::vector<double> out;
    for (const auto& r : records) {
        if (!r.config.matches(selection)) continue;
        auto it = r.outcomes.find(field);
        if (it == r.outcomes.end()) continue;
        if (auto v = numeric(it->second)) out.push_back(*v);
    }
    return out;
}

}  // namespace simstudy
