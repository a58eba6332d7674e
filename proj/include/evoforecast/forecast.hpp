#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evoforecast/predictor.hpp"

namespace evoforecast::data {
struct WindowedDataset;
}

namespace evoforecast::forecast {

// Recursive multi-step forecasts. predictions[s-1][t] is the step-s
// prediction made from origin row t, scored against the target at row
// t+s-1, so step s has rows-(s-1) entries.
struct HorizonForecast {
    std::size_t horizon = 0;
    std::vector<std::vector<double>> predictions;  // per step
    std::vector<double> step_rmse;
    std::vector<double> step_mae;
};

enum class DmWinner { kModelA, kModelB, kTie };

struct DmResult {
    double statistic = 0.0;
    double p_value = 1.0;
    DmWinner winner = DmWinner::kTie;
    bool degenerate = false;  // zero-variance loss differential
};

// One pairwise comparison cell for the win-loss table.
struct PairwiseDm {
    std::string method_a;
    std::string method_b;
    std::size_t step = 1;
    DmResult result;
};

struct RankingRow {
    std::string method;
    double wins = 0.0;
    double losses = 0.0;

    double margin() const { return wins - losses; }
};

double rmse(const std::vector<double>& predictions, const std::vector<double>& observations);
double mae(const std::vector<double>& predictions, const std::vector<double>& observations);

// Training RMSE over test RMSE; values well below 1 indicate overfitting.
double overfitting_ratio(double train_rmse, double test_rmse);

// Recursive strategy: step 1 uses row t as stored; step s > 1 rebuilds the
// row at offset s-1 by substituting the fed-back predictions into the
// target's own lag features while exogenous lags keep their observed
// values. The predictor's recurrent state advances along the actual path
// between origins; hypothetical steps run on a branched state.
HorizonForecast recursive_forecast(StepPredictor& model, const data::WindowedDataset& dataset,
                                   std::size_t horizon);

// Diebold-Mariano test on two forecast-error sequences with squared-error
// loss, truncated long-run variance with lags 0..h-1, Harvey-Leybourne-
// Newbold small-sample correction, and a two-sided p-value from the
// t distribution with T-1 degrees of freedom. A positive statistic means
// model A carries the larger loss, so B wins when significant.
DmResult diebold_mariano(const std::vector<double>& errors_a,
                         const std::vector<double>& errors_b, std::size_t h, double alpha);

// Tallies one win and one loss per significant pairwise result; rows are
// sorted by wins - losses, descending.
std::vector<RankingRow> win_loss_ranking(const std::vector<PairwiseDm>& results);

}  // namespace evoforecast::forecast
