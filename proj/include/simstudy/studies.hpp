#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simstudy/paramspace.hpp"
#include "simstudy/runner.hpp"
#include "simstudy/schema.hpp"

namespace simstudy {

/// Everything needed to run and report one study.
struct StudyDefinition {
    std::string name;
    ParamSpace space;
    FilterPredicate filter;
    ResultSchema schema;
    SimulationFn fn;
    std::int64_t default_max_count = 0;
    /// Axes that key the summary tables, in report order.
    std::vector<std::string> group_axes;
    /// Float outcome holding a p-value, when the study produces one.
    std::optional<std::string> pvalue_outcome;
};

/// OLS vs lasso (α = 0.1) on a Gaussian linear model with 10 predictors.
/// X ~ N(0, 2²), β ~ N(0, 2²), ε ~ N(0, 5²); "sparse" uses only the first
/// five predictors. Trains on the first n rows, scores R² on the next 10000.
/// `include_large` adds n = 10000.
StudyDefinition regression_study(bool include_large = false);

/// Welch, Mann–Whitney and Kolmogorov–Smirnov on two standard log-normal
/// samples of size n; under "alternative" the second sample is shifted by 0.1.
StudyDefinition hypothesis_study();

/// Gaussian KDE with bandwidth chosen by a random half split; the estimate is
/// the fit on the training half, scored by integrated squared loss against the
/// reference Beta mixture.
StudyDefinition density_study();

std::vector<std::string> study_names();

/// Throws Error for an unknown name. `full` enables optional large configurations.
StudyDefinition find_study(std::string_view name, bool full = false);

}  // namespace simstudy
