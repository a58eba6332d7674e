#include "evoforecast/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evoforecast/errors.hpp"
#include "evoforecast/parallel.hpp"
#include "evoforecast/rng.hpp"

namespace evoforecast::ensemble {

namespace {

struct TreeBuilder {
    const std::vector<std::vector<double>>& rows;
    const std::vector<double>& targets;
    std::size_t mtry;
    std::size_t min_leaf;
    Rng& rng;
    RegressionTree tree;

    int make_leaf(const std::vector<std::size_t>& idx) {
        double mean = 0.0;
        for (std::size_t i : idx) mean += targets[i];
        mean /= static_cast<double>(idx.size());
        tree.feature.push_back(-1);
        tree.threshold.push_back(0.0);
        tree.left.push_back(-1);
        tree.right.push_back(-1);
        tree.value.push_back(mean);
        return static_cast<int>(tree.feature.size()) - 1;
    }

    int build(const std::vector<std::size_t>& idx) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t i : idx) {
            sum += targets[i];
            sum_sq += targets[i] * targets[i];
        }
        const double n = static_cast<double>(idx.size());
        const double node_sse = sum_sq - sum * sum / n;
        if (idx.size() < 2 * min_leaf || node_sse <= 0.0) return make_leaf(idx);

        // Sample mtry candidate features without replacement.
        const std::size_t n_features = rows[0].size();
        std::vector<std::size_t> features(n_features);
        std::iota(features.begin(), features.end(), 0);
        const std::size_t tries = std::min(mtry, n_features);
        for (std::size_t k = 0; k < tries; ++k) {
            const std::size_t pick = k + rng.uniform_index(n_features - k);
            std::swap(features[k], features[pick]);
        }

        double best_cost = node_sse;
        int best_feature = -1;
        double best_threshold = 0.0;
        bool found = false;

        std::vector<std::size_t> sorted = idx;
        for (std::size_t k = 0; k < tries; ++k) {
            const std::size_t f = features[k];
            std::sort(sorted.begin(), sorted.end(), [this, f](std::size_t a, std::size_t b) {
                if (rows[a][f] != rows[b][f]) return rows[a][f] < rows[b][f];
                return a < b;
            });
            double left_sum = 0.0;
            double left_sq = 0.0;
            for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
                const double y = targets[sorted[pos]];
                left_sum += y;
                left_sq += y * y;
                const std::size_t left_n = pos + 1;
                const std::size_t right_n = sorted.size() - left_n;
                if (left_n < min_leaf || right_n < min_leaf) continue;
                const double x_here = rows[sorted[pos]][f];
                const double x_next = rows[sorted[pos + 1]][f];
                if (x_here == x_next) continue;
                const double right_sum = sum - left_sum;
                const double right_sq = sum_sq - left_sq;
                const double cost =
                    (left_sq - left_sum * left_sum / static_cast<double>(left_n)) +
                    (right_sq - right_sum * right_sum / static_cast<double>(right_n));
                if (cost < best_cost) {
                    best_cost = cost;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (x_here + x_next);
                    found = true;
                }
            }
        }

        if (!found) return make_leaf(idx);

        std::vector<std::size_t> left_idx;
        std::vector<std::size_t> right_idx;
        for (std::size_t i : idx) {
            if (rows[i][static_cast<std::size_t>(best_feature)] <= best_threshold) {
                left_idx.push_back(i);
            } else {
                right_idx.push_back(i);
            }
        }

        const int node = static_cast<int>(tree.feature.size());
        tree.feature.push_back(best_feature);
        tree.threshold.push_back(best_threshold);
        tree.left.push_back(-1);
        tree.right.push_back(-1);
        tree.value.push_back(0.0);
        tree.left[static_cast<std::size_t>(node)] = build(left_idx);
        tree.right[static_cast<std::size_t>(node)] = build(right_idx);
        return node;
    }
};

}  // namespace

double RegressionTree::predict(const std::vector<double>& x) const {
    int node = 0;
    while (feature[static_cast<std::size_t>(node)] >= 0) {
        const std::size_t n = static_cast<std::size_t>(node);
        node = (x[static_cast<std::size_t>(feature[n])] <= threshold[n]) ? left[n] : right[n];
    }
    return value[static_cast<std::size_t>(node)];
}

void RandomForestRegressor::fit(const std::vector<std::vector<double>>& rows,
                                const std::vector<double>& targets, const ForestConfig& config) {
    if (config.trees == 0) {
        throw UsageError("random forest: trees must be >= 1");
    }
    if (rows.size() < 2) {
        throw UsageError("random forest: need at least 2 training rows");
    }
    if (rows.size() != targets.size()) {
        throw DimensionError("random forest: rows and targets disagree in length");
    }
    if (config.min_leaf == 0) {
        throw UsageError("random forest: min_leaf must be >= 1");
    }

    config_ = config;
    const std::size_t n_features = rows[0].size();
    const std::size_t mtry =
        config.mtry > 0
            ? config.mtry
            : std::max<std::size_t>(
                  1, static_cast<std::size_t>(
                         std::ceil(static_cast<double>(n_features) / 3.0)));

    trees_.assign(config.trees, RegressionTree{});
    parallel_for(config.trees, [&](std::size_t t) {
        // Per-tree stream so the forest is identical at any thread count.
        Rng rng(Rng::derive_seed(config.seed, t));
        std::vector<std::size_t> sample(rows.size());
        for (auto& s : sample) s = rng.uniform_index(rows.size());
        TreeBuilder builder{rows, targets, mtry, config.min_leaf, rng, {}};
        builder.build(sample);
        trees_[t] = std::move(builder.tree);
    });
}

double RandomForestRegressor::predict(const std::vector<double>& inputs) const {
    if (trees_.empty()) {
        throw UsageError("random forest: predict called before fit");
    }
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict(inputs);
    return sum / static_cast<double>(trees_.size());
}

nlohmann::json RandomForestRegressor::to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) {
        trees.push_back({{"feature", t.feature},
                         {"threshold", t.threshold},
                         {"left", t.left},
                         {"right", t.right},
                         {"value", t.value}});
    }
    return {{"kind", kind()},
            {"trees", trees},
            {"mtry", config_.mtry},
            {"min_leaf", config_.min_leaf},
            {"seed", config_.seed}};
}

std::unique_ptr<RandomForestRegressor> RandomForestRegressor::tree_from_json(
    const nlohmann::json& j) {
    auto forest = std::make_unique<RandomForestRegressor>();
    forest->config_.mtry = j.at("mtry").get<std::size_t>();
    forest->config_.min_leaf = j.at("min_leaf").get<std::size_t>();
    forest->config_.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jt : j.at("trees")) {
        RegressionTree t;
        t.feature = jt.at("feature").get<std::vector<int>>();
        t.threshold = jt.at("threshold").get<std::vector<double>>();
        t.left = jt.at("left").get<std::vector<int>>();
        t.right = jt.at("right").get<std::vector<int>>();
        t.value = jt.at("value").get<std::vector<double>>();
        forest->trees_.push_back(std::move(t));
    }
    forest->config_.trees = forest->trees_.size();
    return forest;
}

void OlsRegressor::fit(const std::vector<std::vector<double>>& rows,
                       const std::vector<double>& targets) {
    if (rows.empty() || rows.size() != targets.size()) {
        throw UsageError("ols: invalid training data");
    }
    const std::size_t m = rows[0].size() + 1;  // intercept first
    std::vector<std::vector<double>> xtx(m, std::vector<double>(m, 0.0));
    std::vector<double> xty(m, 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<double> x(m);
        x[0] = 1.0;
        for (std::size_t f = 0; f + 1 < m; ++f) x[f + 1] = rows[r][f];
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) xtx[i][j] += x[i] * x[j];
            xty[i] += x[i] * targets[r];
        }
    }

    // Gaussian elimination with partial pivoting; tiny ridge on a singular
    // pivot keeps degenerate stacking matrices (duplicate base models) solvable.
    for (std::size_t i = 0; i < m; ++i) xtx[i][i] += 1e-12;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::abs(xtx[r][col]) > std::abs(xtx[pivot][col])) pivot = r;
        }
        std::swap(xtx[col], xtx[pivot]);
        std::swap(xty[col], xty[pivot]);
        const double d = xtx[col][col];
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col || xtx[r][col] == 0.0) continue;
            const double factor = xtx[r][col] / d;
            for (std::size_t c = col; c < m; ++c) xtx[r][c] -= factor * xtx[col][c];
            xty[r] -= factor * xty[col];
        }
    }
    coefficients_.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) coefficients_[i] = xty[i] / xtx[i][i];
}

double OlsRegressor::predict(const std::vector<double>& inputs) const {
    if (coefficients_.empty()) {
        throw UsageError("ols: predict called before fit");
    }
    double y = coefficients_[0];
    for (std::size_t f = 0; f < inputs.size(); ++f) y += coefficients_[f + 1] * inputs[f];
    return y;
}

nlohmann::json OlsRegressor::to_json() const {
    return {{"kind", kind()}, {"coefficients", coefficients_}};
}

std::unique_ptr<OlsRegressor> OlsRegressor::coeffs_from_json(const nlohmann::json& j) {
    auto ols = std::make_unique<OlsRegressor>();
    ols->coefficients_ = j.at("coefficients").get<std::vector<double>>();
    return ols;
}

std::unique_ptr<MetaRegressor> MetaRegressor::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "random_forest") return RandomForestRegressor::tree_from_json(j);
    if (kind == "ols") return OlsRegressor::coeffs_from_json(j);
    throw DataError("unknown meta-regressor kind '" + kind + "'");
}

}  // namespace evoforecast::ensemble
