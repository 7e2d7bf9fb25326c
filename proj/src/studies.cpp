#include "simstudy/studies.hpp"

#include <chrono>

#include "simstudy/errors.hpp"
#include "simstudy/stats/density.hpp"
#include "simstudy/stats/hypothesis_tests.hpp"
#include "simstudy/stats/regression.hpp"
#include "simstudy/stats/samplers.hpp"

namespace simstudy {

namespace {

constexpr std::size_t kTestRows = 10'000;
constexpr std::size_t kPredictors = 10;
constexpr std::size_t kSparsePredictors = 5;
constexpr double kLassoAlpha = 0.1;
constexpr double kShift = 0.1;
constexpr std::size_t kLossGrid = 2048;

OutcomeMap regression_replication(const Configuration& c, std::uint64_t seed) {
    using namespace stats;
    const auto& distribution = c.at("data_distribution").as_text();
    const auto n = static_cast<std::size_t>(c.at("no_instances").as_integer());
    const auto& method = c.at("method").as_text();

    Rng rng(seed);
    const std::size_t rows = n + kTestRows;
    const Matrix x = sample_normal(rng, 0.0, 2.0, rows, kPredictors);
    const Vector beta = sample_normal(rng, 0.0, 2.0, kPredictors);
    const Vector eps = sample_normal(rng, 0.0, 5.0, rows);

    std::size_t used;
    if (distribution == "complete") used = kPredictors;
    else if (distribution == "sparse") used = kSparsePredictors;
    else throw DomainError("unknown data_distribution '" + distribution + "'");

    Vector y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        double s = eps[i];
        for (std::size_t j = 0; j < used; ++j) s += x(i, j) * beta[j];
        y[i] = s;
    }
    const Matrix x_train = x.slice_rows(0, n);
    const Matrix x_test = x.slice_rows(n, kTestRows);
    const std::span<const double> y_train(y.data(), n);
    const std::span<const double> y_test(y.data() + n, kTestRows);

    const auto start = std::chrono::steady_clock::now();
    LinearModel model;
    if (method == "ols") model = ols_fit(x_train, y_train);
    else if (method == "lasso") model = lasso_fit(x_train, y_train, kLassoAlpha);
    else throw DomainError("unknown method '" + method + "'");
    const double score = r2_score(y_test, predict(model, x_test));
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    return {{"score", score}, {kElapsedTimeKey, elapsed}};
}

OutcomeMap hypothesis_replication(const Configuration& c, std::uint64_t seed) {
    using namespace stats;
    const auto& method = c.at("method").as_text();
    const auto n = static_cast<std::size_t>(c.at("n_instances").as_integer());
    const auto& hypothesis = c.at("hypothesis").as_text();

    double shift;
    if (hypothesis == "null") shift = 0.0;
    else if (hypothesis == "alternative") shift = kShift;
    else throw DomainError("unknown hypothesis '" + hypothesis + "'");

    Rng rng(seed);
    const Vector a = sample_lognormal(rng, n);
    Vector b = sample_lognormal(rng, n);
    for (double& v : b) v += shift;

    TestResult r;
    if (method == "welch") r = welch_t_test(a, b);
    else if (method == "mwhitney") r = mann_whitney_test(a, b);
    else if (method == "ks") r = ks_test(a, b);
    else throw DomainError("unknown method '" + method + "'");
    return {{"p_value", r.p_value}};
}

OutcomeMap density_replication(const Configuration& c, std::uint64_t seed) {
    using namespace stats;
    const auto n = static_cast<std::size_t>(c.at("no_instances").as_integer());
    const auto& method = c.at("method").as_text();
    if (method != "kde") throw DomainError("unknown method '" + method + "'");

    static const BetaMixture truth = reference_mixture();
    Rng rng(seed);
    const Vector data = truth.sample(rng, n);
    const Vector grid = default_bandwidth_grid(data);
    const BandwidthChoice choice = select_bandwidth(data, rng, grid);
    const KdeModel model = kde_fit(choice.train, choice.bandwidth);
    const double loss = integrated_squared_loss([&](double x) { return truth.pdf(x); },
                                                [&](double x) { return model.pdf(x); }, kLossGrid);
    return {{"loss", loss}};
}

}  // namespace

StudyDefinition regression_study(bool include_large) {
    std::vector<Value> sizes{100, 1000};
    if (include_large) sizes.emplace_back(10000);
    ParamSpace space{
        {"data_distribution", {"complete", "sparse"}},
        {"no_instances", sizes},
        {"method", {"ols", "lasso"}},
    };
    auto schema = ResultSchema::for_space("regression_results", space, {{"score", FieldKind::real, FieldRole::outcome}});
    return {"regression", space,   nullptr, std::move(schema), regression_replication, 200,
            {"data_distribution", "no_instances", "method"}, std::nullopt};
}

StudyDefinition hypothesis_study() {
    ParamSpace space{
        {"method", {"welch", "mwhitney", "ks"}},
        {"n_instances", {1000, 2000}},
        {"hypothesis", {"null", "alternative"}},
    };
    auto schema =
        ResultSchema::for_space("hypothesis_results", space, {{"p_value", FieldKind::real, FieldRole::outcome}});
    return {"hypothesis", space, nullptr, std::move(schema), hypothesis_replication, 1000,
            {"hypothesis", "method", "n_instances"}, "p_value"};
}

StudyDefinition density_study() {
    ParamSpace space{
        {"no_instances", {100, 200}},
        {"method", {"kde"}},
    };
    auto schema = ResultSchema::for_space("density_results", space, {{"loss", FieldKind::real, FieldRole::outcome}});
    return {"density", space, nullptr, std::move(schema), density_replication, 300,
            {"no_instances", "method"}, std::nullopt};
}

std::vector<std::string> study_names() { return {"regression", "hypothesis", "density"}; }

StudyDefinition find_study(std::string_view name, bool full) {
    if (name == "regression") return regression_study(full);
    if (name == "hypothesis") return hypothesis_study();
    if (name == "density") return density_study();
    throw Error("unknown study '" + std::string(name) + "' (expected regression, hypothesis or density)");
}

}  // namespace simstudy
