#include "evoforecast/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/students_t.hpp>

#include "evoforecast/data.hpp"
#include "evoforecast/errors.hpp"

namespace evoforecast::forecast {

namespace {

void check_pair(const std::vector<double>& a, const std::vector<double>& b,
                const char* who) {
    if (a.empty() || a.size() != b.size()) {
        throw UsageError(std::string(who) + ": sequences must be nonempty and equal length");
    }
}

// Lag index of each feature that is a lag of the dataset's own target,
// parsed from the Lag_<attr>_<k> naming; 0 for exogenous features.
std::vector<std::size_t> target_lag_of_feature(const data::WindowedDataset& ds) {
    std::vector<std::size_t> lag(ds.feature_count(), 0);
    const std::string prefix = "Lag_" + ds.target_name + "_";
    for (std::size_t f = 0; f < ds.feature_count(); ++f) {
        const std::string& name = ds.feature_names[f];
        if (name.rfind(prefix, 0) != 0) continue;
        const std::string suffix = name.substr(prefix.size());
        if (suffix.empty() ||
            !std::all_of(suffix.begin(), suffix.end(),
                         [](unsigned char c) { return std::isdigit(c); })) {
            continue;
        }
        lag[f] = static_cast<std::size_t>(std::stoul(suffix));
    }
    return lag;
}

}  // namespace

double rmse(const std::vector<double>& predictions, const std::vector<double>& observations) {
    check_pair(predictions, observations, "rmse");
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - observations[i];
        sum_sq += e * e;
    }
    return std::sqrt(sum_sq / static_cast<double>(predictions.size()));
}

double mae(const std::vector<double>& predictions, const std::vector<double>& observations) {
    check_pair(predictions, observations, "mae");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        sum += std::abs(predictions[i] - observations[i]);
    }
    return sum / static_cast<double>(predictions.size());
}

double overfitting_ratio(double train_rmse, double test_rmse) {
    if (!(test_rmse > 0.0)) {
        throw UsageError("overfitting_ratio: test RMSE must be positive");
    }
    return train_rmse / test_rmse;
}

HorizonForecast recursive_forecast(StepPredictor& model, const data::WindowedDataset& dataset,
                                   std::size_t horizon) {
    if (horizon == 0) {
        throw UsageError("recursive_forecast: horizon must be >= 1");
    }
    const std::size_t rows = dataset.row_count();
    if (horizon >= rows) {
        throw UsageError("recursive_forecast: horizon " + std::to_string(horizon) +
                         " must be below the row count " + std::to_string(rows));
    }

    const std::vector<std::size_t> target_lag = target_lag_of_feature(dataset);

    HorizonForecast out;
    out.horizon = horizon;
    out.predictions.assign(horizon, {});
    for (std::size_t s = 0; s < horizon; ++s) out.predictions[s].reserve(rows - s);

    model.reset();
    for (std::size_t origin = 0; origin < rows; ++origin) {
        const std::vector<double> branch_state = model.snapshot();

        std::vector<double> fed_back;  // fed_back[j] predicts row origin+j
        const std::size_t max_step = std::min(horizon, rows - origin);
        for (std::size_t s = 1; s <= max_step; ++s) {
            std::vector<double> row = dataset.rows[origin + s - 1];
            for (std::size_t f = 0; f < row.size(); ++f) {
                const std::size_t k = target_lag[f];
                if (k == 0 || k > s - 1) continue;  // exogenous or still observed
                row[f] = fed_back[s - 1 - k];
            }
            const double prediction = model.step(row);
            fed_back.push_back(prediction);
            out.predictions[s - 1].push_back(prediction);
        }

        // Advance the actual one-step path for the next origin.
        model.restore(branch_state);
        model.step(dataset.rows[origin]);
    }

    out.step_rmse.resize(horizon);
    out.step_mae.resize(horizon);
    for (std::size_t s = 1; s <= horizon; ++s) {
        std::vector<double> observed(dataset.targets.begin() + static_cast<std::ptrdiff_t>(s - 1),
                                     dataset.targets.end());
        out.step_rmse[s - 1] = rmse(out.predictions[s - 1], observed);
        out.step_mae[s - 1] = mae(out.predictions[s - 1], observed);
    }
    return out;
}

DmResult diebold_mariano(const std::vector<double>& errors_a,
                         const std::vector<double>& errors_b, std::size_t h, double alpha) {
    check_pair(errors_a, errors_b, "diebold_mariano");
    const std::size_t t_count = errors_a.size();
    if (t_count < 10) {
        throw UsageError("diebold_mariano: need at least 10 observations");
    }
    if (h == 0) {
        throw UsageError("diebold_mariano: h must be >= 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw UsageError("diebold_mariano: alpha must be in (0, 1)");
    }

    const double n = static_cast<double>(t_count);
    std::vector<double> d(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        d[t] = errors_a[t] * errors_a[t] - errors_b[t] * errors_b[t];
    }
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= n;

    // Long-run variance of d from the truncated autocovariance sum.
    double long_run = 0.0;
    for (std::size_t k = 0; k < h; ++k) {
        double gamma = 0.0;
        for (std::size_t t = k; t < t_count; ++t) {
            gamma += (d[t] - mean) * (d[t - k] - mean);
        }
        gamma /= n;
        long_run += (k == 0) ? gamma : 2.0 * gamma;
    }

    DmResult result;
    if (!(long_run > 0.0)) {
        result.degenerate = true;
        return result;
    }

    const double dm = mean / std::sqrt(long_run / n);
    const double hh = static_cast<double>(h);
    const double correction = std::sqrt((n + 1.0 - 2.0 * hh + hh * (hh - 1.0) / n) / n);
    result.statistic = dm * correction;

    const boost::math::students_t dist(n - 1.0);
    result.p_value = 2.0 * boost::math::cdf(dist, -std::abs(result.statistic));
    if (result.p_value < alpha) {
        result.winner = (mean > 0.0) ? DmWinner::kModelB : DmWinner::kModelA;
    }
    return result;
}

std::vector<RankingRow> win_loss_ranking(const std::vector<PairwiseDm>& results) {
    std::map<std::string, RankingRow> table;
    auto row = [&table](const std::string& method) -> RankingRow& {
        auto [it, inserted] = table.try_emplace(method);
        if (inserted) it->second.method = method;
        return it->second;
    };

    for (const auto& cell : results) {
        row(cell.method_a);
        row(cell.method_b);
        if (cell.result.winner == DmWinner::kModelA) {
            row(cell.method_a).wins += 1.0;
            row(cell.method_b).losses += 1.0;
        } else if (cell.result.winner == DmWinner::kModelB) {
            row(cell.method_b).wins += 1.0;
            row(cell.method_a).losses += 1.0;
        }
    }

    std::vector<RankingRow> rows;
    rows.reserve(table.size());
    for (auto& [name, entry] : table) rows.push_back(entry);
    std::sort(rows.begin(), rows.end(), [](const RankingRow& a, const RankingRow& b) {
        if (a.margin() != b.margin()) return a.margin() > b.margin();
        return a.method < b.method;
    });
    return rows;
}

}  // namespace evoforecast::forecast
