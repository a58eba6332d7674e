#include "evoforecast/ensemble.hpp"

#include <string>

#include "evoforecast/data.hpp"
#include "evoforecast/errors.hpp"
#include "evoforecast/version.hpp"

namespace evoforecast::ensemble {

std::vector<std::vector<double>> StackingDataset::features() const {
    std::vector<std::vector<double>> out;
    out.reserve(matrix.size());
    for (const auto& row : matrix) out.emplace_back(row.begin(), row.end() - 1);
    return out;
}

std::vector<double> StackingDataset::observations() const {
    std::vector<double> out;
    out.reserve(matrix.size());
    for (const auto& row : matrix) out.push_back(row.back());
    return out;
}

void EnsembleModel::ensure_states() {
    if (states_.size() != base_models_.size()) {
        states_.clear();
        states_.reserve(base_models_.size());
        for (const auto& model : base_models_) states_.push_back(lstm::zero_state(model.params.u));
    }
}

double EnsembleModel::predict_next(const std::vector<double>& row) {
    if (!meta_) {
        throw UsageError("ensemble: predict called before the meta-regressor was trained");
    }
    if (base_models_.empty()) {
        throw UsageError("ensemble: no base models");
    }
    ensure_states();
    std::vector<double> outputs(base_models_.size());
    for (std::size_t j = 0; j < base_models_.size(); ++j) {
        outputs[j] = lstm::step(base_models_[j].params, base_models_[j].mask, row, states_[j]);
    }
    return meta_->predict(outputs);
}

std::vector<double> EnsembleModel::snapshot() const {
    std::vector<double> flat;
    for (const auto& state : states_) {
        flat.insert(flat.end(), state.h.begin(), state.h.end());
        flat.insert(flat.end(), state.c.begin(), state.c.end());
    }
    return flat;
}

void EnsembleModel::restore(const std::vector<double>& state) {
    if (state.empty()) {
        reset_state();
        return;
    }
    ensure_states();
    std::size_t cursor = 0;
    for (auto& s : states_) {
        const std::size_t u = s.h.size();
        if (cursor + 2 * u > state.size()) {
            throw DimensionError("ensemble: state snapshot has the wrong length");
        }
        for (std::size_t r = 0; r < u; ++r) s.h[r] = state[cursor + r];
        cursor += u;
        for (std::size_t r = 0; r < u; ++r) s.c[r] = state[cursor + r];
        cursor += u;
    }
    if (cursor != state.size()) {
        throw DimensionError("ensemble: state snapshot has the wrong length");
    }
}

nlohmann::json EnsembleModel::to_json() const {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& model : base_models_) {
        models.push_back({{"mask", model.mask},
                          {"weights", lstm::flatten(model.params)},
                          {"q", model.params.q},
                          {"u", model.params.u}});
    }
    nlohmann::json j{{"schema_version", kSchemaVersion},
                     {"base_models", models},
                     {"feature_names", feature_names},
                     {"importance", importance}};
    if (meta_) j["meta"] = meta_->to_json();
    return j;
}

EnsembleModel EnsembleModel::from_json(const nlohmann::json& j) {
    EnsembleModel out;
    for (const auto& jm : j.at("base_models")) {
        BaseModel model;
        model.mask = jm.at("mask").get<std::vector<bool>>();
        model.params = lstm::convert(jm.at("weights").get<std::vector<double>>(),
                                     jm.at("q").get<std::size_t>(),
                                     jm.at("u").get<std::size_t>());
        out.base_models_.push_back(std::move(model));
    }
    out.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    out.importance = j.at("importance").get<std::vector<double>>();
    if (j.contains("meta")) out.meta_ = MetaRegressor::from_json(j.at("meta"));
    return out;
}

std::vector<BaseModel> decode_front(const moea::ParetoFront& front, std::size_t q,
                                    std::size_t hidden_units) {
    std::vector<BaseModel> models;
    models.reserve(front.size());
    for (const auto& member : front.members) {
        BaseModel model;
        model.params = lstm::convert(member.genome.weights, q, hidden_units);
        model.mask = member.genome.mask;
        models.push_back(std::move(model));
    }
    return models;
}

StackingDataset build_stacking_dataset(const std::vector<BaseModel>& models,
                                       const data::WindowedDataset& dataset) {
    if (models.empty()) {
        throw UsageError("build_stacking_dataset: no base models");
    }
    const std::size_t rows = dataset.row_count();
    if (rows == 0) {
        throw UsageError("build_stacking_dataset: dataset is empty");
    }
    for (const auto& model : models) {
        if (model.params.q != dataset.feature_count() ||
            model.mask.size() != dataset.feature_count()) {
            throw DimensionError("build_stacking_dataset: model expects " +
                                 std::to_string(model.params.q) + " features, dataset has " +
                                 std::to_string(dataset.feature_count()));
        }
    }

    StackingDataset out;
    out.matrix.assign(rows, std::vector<double>(models.size() + 1, 0.0));
    for (std::size_t j = 0; j < models.size(); ++j) {
        const std::vector<double> column =
            lstm::forward_pass(models[j].params, models[j].mask, dataset.rows);
        for (std::size_t t = 0; t < rows; ++t) out.matrix[t][j] = column[t];
    }
    for (std::size_t t = 0; t < rows; ++t) out.matrix[t].back() = dataset.targets[t];
    return out;
}

RandomForestRegressor train_forest(const StackingDataset& ds, const ForestConfig& config) {
    if (ds.matrix.size() < 2) {
        throw UsageError("train_forest: stacking dataset needs at least 2 rows");
    }
    RandomForestRegressor forest;
    forest.fit(ds.features(), ds.observations(), config);
    return forest;
}

std::vector<double> feature_importance(const moea::ParetoFront& front, std::size_t q) {
    if (front.members.empty()) {
        throw UsageError("feature_importance: empty front");
    }
    std::vector<double> importance(q, 0.0);
    for (const auto& member : front.members) {
        if (member.genome.mask.size() != q) {
            throw DimensionError("feature_importance: mask length mismatch");
        }
        for (std::size_t i = 0; i < q; ++i) {
            if (member.genome.mask[i]) importance[i] += 1.0;
        }
    }
    const double m = static_cast<double>(front.members.size());
    for (auto& v : importance) v /= m;
    return importance;
}

}  // namespace evoforecast::ensemble
