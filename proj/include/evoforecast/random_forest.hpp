#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace evoforecast::ensemble {

// Regression meta-learner interface, so the stacking stage can swap
// implementations.
class MetaRegressor {
  public:
    virtual ~MetaRegressor() = default;

    virtual double predict(const std::vector<double>& inputs) const = 0;
    virtual std::string kind() const = 0;
    virtual nlohmann::json to_json() const = 0;

    static std::unique_ptr<MetaRegressor> from_json(const nlohmann::json& j);
};

// CART regression tree stored as parallel arrays. feature[i] < 0 marks a
// leaf whose prediction is value[i].
struct RegressionTree {
    std::vector<int> feature;
    std::vector<double> threshold;
    std::vector<int> left;
    std::vector<int> right;
    std::vector<double> value;

    double predict(const std::vector<double>& x) const;
};

struct ForestConfig {
    std::size_t trees = 100;
    std::size_t mtry = 0;      // 0: max(1, ceil(features / 3))
    std::size_t min_leaf = 5;
    std::uint64_t seed = 0;
};

// Bagged CART regression forest. Each tree is fit on a bootstrap sample
// (with replacement, size = rows); at each node mtry features are sampled
// without replacement and the split minimizing the children's summed
// squared error is taken; recursion stops at min_leaf or zero variance.
// Prediction is the mean over trees.
class RandomForestRegressor : public MetaRegressor {
  public:
    RandomForestRegressor() = default;

    // rows: r x m feature matrix (base-model outputs), targets: length r.
    void fit(const std::vector<std::vector<double>>& rows, const std::vector<double>& targets,
             const ForestConfig& config);

    double predict(const std::vector<double>& inputs) const override;
    std::string kind() const override { return "random_forest"; }
    nlohmann::json to_json() const override;
    static std::unique_ptr<RandomForestRegressor> tree_from_json(const nlohmann::json& j);

    bool trained() const { return !trees_.empty(); }
    const std::vector<RegressionTree>& trees() const { return trees_; }

  private:
    std::vector<RegressionTree> trees_;
    ForestConfig config_;
};

// Ordinary least squares with intercept; the trivially verifiable
// meta-learner used for oracle-style checks.
class OlsRegressor : public MetaRegressor {
  public:
    void fit(const std::vector<std::vector<double>>& rows, const std::vector<double>& targets);

    double predict(const std::vector<double>& inputs) const override;
    std::string kind() const override { return "ols"; }
    nlohmann::json to_json() const override;
    static std::unique_ptr<OlsRegressor> coeffs_from_json(const nlohmann::json& j);

    const std::vector<double>& coefficients() const { return coefficients_; }

  private:
    std::vector<double> coefficients_;  // intercept first
};

}  // namespace evoforecast::ensemble
