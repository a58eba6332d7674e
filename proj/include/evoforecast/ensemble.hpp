#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "evoforecast/lstm.hpp"
#include "evoforecast/moea.hpp"
#include "evoforecast/predictor.hpp"
#include "evoforecast/random_forest.hpp"

namespace evoforecast::data {
struct WindowedDataset;
}

namespace evoforecast::ensemble {

// Stacked regression table: columns 0..m-1 are base-model outputs over the
// dataset, the last column is the observed target.
struct StackingDataset {
    std::vector<std::vector<double>> matrix;  // rows x (m + 1)

    std::size_t base_model_count() const {
        return matrix.empty() ? 0 : matrix[0].size() - 1;
    }
    std::vector<std::vector<double>> features() const;
    std::vector<double> observations() const;
};

// One decoded Pareto-front member.
struct BaseModel {
    lstm::LstmParams params;
    std::vector<bool> mask;
};

// Pareto-front base models plus the trained meta-regressor. Prediction is
// stateful: each base model carries its own recurrent state across
// predict_next() calls, reset by reset_state().
class EnsembleModel : public StepPredictor {
  public:
    EnsembleModel() = default;

    std::vector<BaseModel>& base_models() { return base_models_; }
    const std::vector<BaseModel>& base_models() const { return base_models_; }
    void set_meta(std::unique_ptr<MetaRegressor> meta) { meta_ = std::move(meta); }
    const MetaRegressor* meta() const { return meta_.get(); }

    std::vector<std::string> feature_names;
    std::vector<double> importance;  // length q, each in [0, 1]

    void reset_state() { states_.clear(); }
    // Advances every base model's state by one sample and feeds the
    // m-vector of their outputs to the meta-regressor.
    double predict_next(const std::vector<double>& row);

    // StepPredictor interface
    void reset() override { reset_state(); }
    double step(const std::vector<double>& row) override { return predict_next(row); }
    std::vector<double> snapshot() const override;
    void restore(const std::vector<double>& state) override;

    nlohmann::json to_json() const;
    static EnsembleModel from_json(const nlohmann::json& j);

  private:
    void ensure_states();

    std::vector<BaseModel> base_models_;
    std::unique_ptr<MetaRegressor> meta_;
    std::vector<lstm::LstmState> states_;
};

// Decodes the front's genomes into base models.
std::vector<BaseModel> decode_front(const moea::ParetoFront& front, std::size_t q,
                                    std::size_t hidden_units);

// Column j is base model j's full forward pass over the dataset (state
// reset per model); the last column holds the observations.
StackingDataset build_stacking_dataset(const std::vector<BaseModel>& models,
                                       const data::WindowedDataset& dataset);

// Fits the forest meta-learner on a stacking dataset.
RandomForestRegressor train_forest(const StackingDataset& ds, const ForestConfig& config);

// Per-feature selection frequency over the front: count selected / m.
std::vector<double> feature_importance(const moea::ParetoFront& front, std::size_t q);

}  // namespace evoforecast::ensemble
