#include "evoforecast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "json.hpp"

#include "evoforecast/data.hpp"
#include "evoforecast/ensemble.hpp"
#include "evoforecast/errors.hpp"
#include "evoforecast/forecast.hpp"
#include "evoforecast/lstm.hpp"
#include "evoforecast/moea.hpp"
#include "evoforecast/rng.hpp"
#include "evoforecast/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace evoforecast::pipeline {

namespace {

const char* const kRunFiles[] = {
    "pareto_front.json",   "ensemble_model.json",   "importance.csv",
    "hypervolume.csv",     "front_objectives.csv",  "predictions_train.csv",
    "predictions_test.csv", "metrics.json",         "run_manifest.json",
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Tracks files written by one run so a failure can remove partial output.
class OutputTracker {
  public:
    explicit OutputTracker(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& content) {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw DataError("cannot write '" + path.string() + "'");
        }
        out << content;
        out.close();
        written_.push_back(path);
    }

    void remove_all() {
        for (const auto& path : written_) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        written_.clear();
    }

  private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

template <typename F>
auto stage(const std::string& name, F&& fn) {
    try {
        return fn();
    } catch (const UsageError& e) {
        throw UsageError("stage '" + name + "': " + e.what());
    } catch (const DataError& e) {
        throw DataError("stage '" + name + "': " + e.what());
    } catch (const DimensionError& e) {
        throw DimensionError("stage '" + name + "': " + e.what());
    } catch (const NumericError& e) {
        throw NumericError("stage '" + name + "': " + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error("stage '" + name + "': " + e.what());
    }
}

json config_to_json(const RunConfig& c) {
    return json{{"data", c.data_path},
                {"target", c.target_column},
                {"out", c.output_dir},
                {"window", c.window},
                {"test_fraction", c.test_fraction},
                {"include_target_lags", c.include_target_lags},
                {"delimiter", std::string(1, c.delimiter)},
                {"use_missing_sentinel", c.use_missing_sentinel},
                {"missing_sentinel", c.missing_sentinel},
                {"timestamp_column", c.timestamp_column},
                {"normalization", to_string(c.normalization)},
                {"partitions", c.partitions},
                {"hidden_units", c.hidden_units},
                {"population", c.population},
                {"generations", c.generations},
                {"crossover_prob", c.crossover_prob},
                {"mutation_prob", c.mutation_prob},
                {"seed", c.seed},
                {"sbx_eta", c.sbx_eta},
                {"pm_eta", c.pm_eta},
                {"weight_low", c.weight_low},
                {"weight_high", c.weight_high},
                {"meta", to_string(c.meta)},
                {"trees", c.trees},
                {"mtry", c.mtry},
                {"min_leaf", c.min_leaf},
                {"horizon", c.horizon},
                {"log_interval", c.log_interval}};
}

std::string predictions_csv(const forecast::HorizonForecast& fc,
                            const std::vector<double>& targets) {
    std::ostringstream out;
    out << "origin,step,prediction,observation\n";
    for (std::size_t origin = 0; origin < fc.predictions[0].size(); ++origin) {
        for (std::size_t s = 1; s <= fc.horizon; ++s) {
            if (origin >= fc.predictions[s - 1].size()) continue;
            out << origin << ',' << s << ',' << fmt(fc.predictions[s - 1][origin]) << ','
                << fmt(targets[origin + s - 1]) << '\n';
        }
    }
    return out.str();
}

double mean(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

// Square-root of the pooled mean squared error across all steps.
double pooled_rmse(const forecast::HorizonForecast& fc, const std::vector<double>& targets) {
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 1; s <= fc.horizon; ++s) {
        for (std::size_t origin = 0; origin < fc.predictions[s - 1].size(); ++origin) {
            const double e = fc.predictions[s - 1][origin] - targets[origin + s - 1];
            sum_sq += e * e;
            ++count;
        }
    }
    return std::sqrt(sum_sq / static_cast<double>(count));
}

json forecast_to_json(const forecast::HorizonForecast& fc, const std::vector<double>& targets) {
    return json{{"step_rmse", fc.step_rmse},
                {"step_mae", fc.step_mae},
                {"rmse_mean_of_steps", mean(fc.step_rmse)},
                {"mae_mean_of_steps", mean(fc.step_mae)},
                {"rmse_pooled", pooled_rmse(fc, targets)}};
}

json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("cannot parse '" + path.string() + "': " + e.what());
    }
    return j;
}

void check_schema_version(const json& j, const fs::path& path) {
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
        throw DataError("'" + path.string() + "' lacks a schema_version field");
    }
    if (j["schema_version"].get<int>() != kSchemaVersion) {
        throw DataError("'" + path.string() + "' has schema_version " +
                        j["schema_version"].dump() + ", expected " +
                        std::to_string(kSchemaVersion));
    }
}

struct StepSeries {
    std::vector<double> predictions;
    std::vector<double> observations;
};

// predictions_test.csv of one run, grouped by step.
std::vector<StepSeries> load_predictions(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("'" + path.string() + "' is empty");
    }
    std::vector<StepSeries> steps;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t step = 0;
        double prediction = 0.0;
        double observation = 0.0;
        std::size_t origin = 0;
        if (std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf", &origin, &step, &prediction,
                        &observation) != 4 ||
            step == 0) {
            throw DataError("'" + path.string() + "' line " + std::to_string(line_no) +
                            ": malformed row");
        }
        if (step > steps.size()) steps.resize(step);
        steps[step - 1].predictions.push_back(prediction);
        steps[step - 1].observations.push_back(observation);
    }
    if (steps.empty()) {
        throw DataError("'" + path.string() + "' has no prediction rows");
    }
    return steps;
}

std::string winner_label(const forecast::PairwiseDm& cell) {
    switch (cell.result.winner) {
        case forecast::DmWinner::kModelA: return cell.method_a;
        case forecast::DmWinner::kModelB: return cell.method_b;
        default: return "tie";
    }
}

}  // namespace

NormalizationMode normalization_mode_from_string(const std::string& s) {
    if (s == "per_partition") return NormalizationMode::kPerPartition;
    if (s == "train_stats") return NormalizationMode::kTrainStats;
    throw UsageError("unknown normalization mode '" + s + "' (use per_partition or train_stats)");
}

std::string to_string(NormalizationMode mode) {
    return mode == NormalizationMode::kPerPartition ? "per_partition" : "train_stats";
}

MetaKind meta_kind_from_string(const std::string& s) {
    if (s == "forest" || s == "random_forest") return MetaKind::kRandomForest;
    if (s == "ols") return MetaKind::kOls;
    throw UsageError("unknown meta-learner '" + s + "' (use forest or ols)");
}

std::string to_string(MetaKind kind) {
    return kind == MetaKind::kRandomForest ? "forest" : "ols";
}

void RunConfig::validate() const {
    std::vector<std::string> problems;
    if (data_path.empty()) problems.emplace_back("data path is required");
    if (target_column.empty()) problems.emplace_back("target column is required");
    if (window < 1) problems.emplace_back("window must be >= 1");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        problems.emplace_back("test_fraction must be in (0, 1)");
    }
    if (partitions < 2) problems.emplace_back("partitions must be >= 2");
    if (hidden_units < 1) problems.emplace_back("hidden_units must be >= 1");
    if (population < 2) problems.emplace_back("population must be > 1");
    if (population % 2 != 0) problems.emplace_back("population must be even");
    if (generations < 1) problems.emplace_back("generations must be >= 1");
    if (crossover_prob < 0.0 || crossover_prob > 1.0) {
        problems.emplace_back("crossover_prob must be in [0, 1]");
    }
    if (mutation_prob < 0.0 || mutation_prob > 1.0) {
        problems.emplace_back("mutation_prob must be in [0, 1]");
    }
    if (!(sbx_eta > 0.0)) problems.emplace_back("sbx_eta must be positive");
    if (!(pm_eta > 0.0)) problems.emplace_back("pm_eta must be positive");
    if (!(weight_low < weight_high)) problems.emplace_back("weight bounds must satisfy low < high");
    if (trees < 1) problems.emplace_back("trees must be >= 1");
    if (min_leaf < 1) problems.emplace_back("min_leaf must be >= 1");
    if (horizon < 1) problems.emplace_back("horizon must be >= 1");

    if (!problems.empty()) {
        std::string message = "invalid config: ";
        for (std::size_t i = 0; i < problems.size(); ++i) {
            if (i > 0) message += "; ";
            message += problems[i];
        }
        throw UsageError(message);
    }
}

RunReport run_pipeline(const RunConfig& config) {
    stage("config", [&config] { config.validate(); return 0; });

    fs::create_directories(config.output_dir);
    OutputTracker outputs{fs::path(config.output_dir)};

    try {
        data::CsvOptions csv_options;
        csv_options.delimiter = config.delimiter;
        csv_options.timestamp_column = config.timestamp_column;
        if (config.use_missing_sentinel) {
            csv_options.missing_sentinel = config.missing_sentinel;
        } else {
            csv_options.missing_sentinel.reset();
        }

        const data::RawSeries raw = stage("load", [&] {
            return data::read_csv(config.data_path, config.target_column, csv_options);
        });
        const data::RawSeries filled =
            stage("interpolate", [&] { return data::interpolate_missing(raw); });
        const data::WindowedDataset windowed = stage("window", [&] {
            return data::sliding_window(filled, config.window, config.include_target_lags);
        });
        const auto [train_raw, test_raw] = stage("split", [&] {
            return data::split_train_test(windowed, config.test_fraction);
        });

        const data::WindowedDataset train =
            stage("normalize", [&] { return data::normalize(train_raw); });
        const data::WindowedDataset test =
            stage("normalize", [&] {
                return config.normalization == NormalizationMode::kPerPartition
                           ? data::normalize(test_raw)
                           : data::normalize(test_raw, *train.norm_stats);
            });

        const data::PartitionSet parts = stage("partition", [&] {
            return data::partition_training(train, config.partitions);
        });

        moea::MoeaConfig moea_config;
        moea_config.population_size = config.population;
        moea_config.generations = config.generations;
        moea_config.crossover_prob = config.crossover_prob;
        moea_config.mutation_prob = config.mutation_prob;
        moea_config.n_objectives = config.partitions;
        moea_config.seed = config.seed;
        moea_config.sbx_eta = config.sbx_eta;
        moea_config.pm_eta = config.pm_eta;
        moea_config.real_bounds = {config.weight_low, config.weight_high};

        moea::ProgressFn progress;
        if (config.log_interval > 0) {
            progress = [&config](std::size_t gen, double hv,
                                 const moea::ObjectiveVector& best) {
                if (gen % config.log_interval != 0 && gen != config.generations) return;
                std::cout << "[moea] generation " << gen << "/" << config.generations
                          << " hypervolume=" << hv << " best=[";
                for (std::size_t k = 0; k < best.size(); ++k) {
                    if (k > 0) std::cout << ", ";
                    std::cout << best[k];
                }
                std::cout << "]\n";
            };
        }

        const moea::MoeaResult evolved = stage("moea", [&] {
            return moea::run_moea(parts.partitions, config.hidden_units, moea_config, progress);
        });

        const std::size_t q = train.feature_count();
        ensemble::EnsembleModel model;
        const ensemble::StackingDataset stack_train =
            stage("ensemble_train", [&] {
                model.base_models() =
                    ensemble::decode_front(evolved.front, q, config.hidden_units);
                model.feature_names = train.feature_names;
                model.importance = ensemble::feature_importance(evolved.front, q);
                const ensemble::StackingDataset ds =
                    ensemble::build_stacking_dataset(model.base_models(), train);
                if (config.meta == MetaKind::kRandomForest) {
                    ensemble::ForestConfig forest_config;
                    forest_config.trees = config.trees;
                    forest_config.mtry = config.mtry;
                    forest_config.min_leaf = config.min_leaf;
                    forest_config.seed = Rng::derive_seed(config.seed, 1);
                    model.set_meta(std::make_unique<ensemble::RandomForestRegressor>(
                        ensemble::train_forest(ds, forest_config)));
                } else {
                    auto ols = std::make_unique<ensemble::OlsRegressor>();
                    ols->fit(ds.features(), ds.observations());
                    model.set_meta(std::move(ols));
                }
                return ds;
            });

        const forecast::HorizonForecast train_fc =
            stage("forecast_train", [&] {
                return forecast::recursive_forecast(model, train, config.horizon);
            });
        const forecast::HorizonForecast test_fc = stage("forecast_test", [&] {
            return forecast::recursive_forecast(model, test, config.horizon);
        });

        RunReport report;
        json metrics = stage("metrics", [&] {
            const double train_rmse = mean(train_fc.step_rmse);
            const double test_rmse = mean(test_fc.step_rmse);
            const double ratio = forecast::overfitting_ratio(train_rmse, test_rmse);

            double selected = 0.0;
            for (const auto& member : evolved.front.members) {
                for (bool bit : member.genome.mask) selected += bit ? 1.0 : 0.0;
            }
            selected /= static_cast<double>(evolved.front.size());

            std::vector<double> per_step_ratio(config.horizon);
            for (std::size_t s = 0; s < config.horizon; ++s) {
                per_step_ratio[s] =
                    forecast::overfitting_ratio(train_fc.step_rmse[s], test_fc.step_rmse[s]);
            }

            report.front_size = evolved.front.size();
            report.train_rmse_mean_of_steps = train_rmse;
            report.test_rmse_mean_of_steps = test_rmse;
            report.overfitting_ratio = ratio;
            report.avg_selected_attributes = selected;
            report.feature_count = q;

            return json{{"schema_version", kSchemaVersion},
                        {"front_size", evolved.front.size()},
                        {"avg_selected_attributes", selected},
                        {"selected_attributes_pct",
                         100.0 * selected / static_cast<double>(q)},
                        {"final_hypervolume", evolved.hypervolume_trace.back()},
                        {"train", forecast_to_json(train_fc, train.targets)},
                        {"test", forecast_to_json(test_fc, test.targets)},
                        {"overfitting_ratio", ratio},
                        {"overfitting_ratio_pooled",
                         forecast::overfitting_ratio(pooled_rmse(train_fc, train.targets),
                                                     pooled_rmse(test_fc, test.targets))},
                        {"per_step_overfitting_ratio", per_step_ratio}};
        });

        stage("write", [&] {
            json front_json{{"schema_version", kSchemaVersion},
                            {"q", q},
                            {"u", config.hidden_units},
                            {"n_objectives", config.partitions},
                            {"feature_names", train.feature_names},
                            {"members", json::array()}};
            for (const auto& member : evolved.front.members) {
                front_json["members"].push_back({{"mask", member.genome.mask},
                                                 {"weights", member.genome.weights},
                                                 {"objectives", member.objectives}});
            }
            outputs.write("pareto_front.json", front_json.dump(2) + "\n");

            json model_json = model.to_json();
            outputs.write("ensemble_model.json", model_json.dump(2) + "\n");

            std::ostringstream importance_csv;
            importance_csv << "feature,importance\n";
            for (std::size_t f = 0; f < q; ++f) {
                importance_csv << train.feature_names[f] << ',' << fmt(model.importance[f])
                               << '\n';
            }
            outputs.write("importance.csv", importance_csv.str());

            std::ostringstream hv_csv;
            hv_csv << "generation,hypervolume\n";
            for (std::size_t g = 0; g < evolved.hypervolume_trace.size(); ++g) {
                hv_csv << (g + 1) << ',' << fmt(evolved.hypervolume_trace[g]) << '\n';
            }
            outputs.write("hypervolume.csv", hv_csv.str());

            // one row per front member, one column per objective; feeds a
            // parallel-coordinates plot directly
            std::ostringstream front_csv;
            for (std::size_t k = 0; k < config.partitions; ++k) {
                front_csv << (k ? "," : "") << "objective_" << (k + 1);
            }
            front_csv << '\n';
            for (const auto& member : evolved.front.members) {
                for (std::size_t k = 0; k < member.objectives.size(); ++k) {
                    front_csv << (k ? "," : "") << fmt(member.objectives[k]);
                }
                front_csv << '\n';
            }
            outputs.write("front_objectives.csv", front_csv.str());

            outputs.write("predictions_train.csv", predictions_csv(train_fc, train.targets));
            outputs.write("predictions_test.csv", predictions_csv(test_fc, test.targets));
            outputs.write("metrics.json", metrics.dump(2) + "\n");

            json manifest{{"schema_version", kSchemaVersion},
                          {"version", kVersion},
                          {"config", config_to_json(config)},
                          {"data", json{{"rows_raw", raw.length()},
                                        {"rows_windowed", windowed.row_count()},
                                        {"train_rows", train.row_count()},
                                        {"test_rows", test.row_count()},
                                        {"q", q},
                                        {"z", lstm::weight_count(q, config.hidden_units)}}},
                          {"outputs", json::array()}};
            for (const char* name : kRunFiles) manifest["outputs"].push_back(name);
            outputs.write("run_manifest.json", manifest.dump(2) + "\n");
            return 0;
        });

        stage("validate_outputs", [&config] {
            validate_run_dir(config.output_dir);
            return 0;
        });

        report.output_dir = config.output_dir;
        return report;
    } catch (...) {
        outputs.remove_all();
        throw;
    }
}

RunConfig config_from_manifest(const std::string& manifest_path) {
    const json manifest = load_json(manifest_path);
    check_schema_version(manifest, manifest_path);
    if (!manifest.contains("config")) {
        throw DataError("'" + manifest_path + "' has no config object");
    }
    const json& c = manifest["config"];
    RunConfig out;
    out.data_path = c.at("data").get<std::string>();
    out.target_column = c.at("target").get<std::string>();
    out.output_dir = c.at("out").get<std::string>();
    out.window = c.at("window").get<std::size_t>();
    out.test_fraction = c.at("test_fraction").get<double>();
    out.include_target_lags = c.at("include_target_lags").get<bool>();
    out.delimiter = c.at("delimiter").get<std::string>().at(0);
    out.use_missing_sentinel = c.at("use_missing_sentinel").get<bool>();
    out.missing_sentinel = c.at("missing_sentinel").get<double>();
    out.timestamp_column = c.at("timestamp_column").get<std::string>();
    out.normalization = normalization_mode_from_string(c.at("normalization").get<std::string>());
    out.partitions = c.at("partitions").get<std::size_t>();
    out.hidden_units = c.at("hidden_units").get<std::size_t>();
    out.population = c.at("population").get<std::size_t>();
    out.generations = c.at("generations").get<std::size_t>();
    out.crossover_prob = c.at("crossover_prob").get<double>();
    out.mutation_prob = c.at("mutation_prob").get<double>();
    out.seed = c.at("seed").get<std::uint64_t>();
    out.sbx_eta = c.at("sbx_eta").get<double>();
    out.pm_eta = c.at("pm_eta").get<double>();
    out.weight_low = c.at("weight_low").get<double>();
    out.weight_high = c.at("weight_high").get<double>();
    out.meta = meta_kind_from_string(c.at("meta").get<std::string>());
    out.trees = c.at("trees").get<std::size_t>();
    out.mtry = c.at("mtry").get<std::size_t>();
    out.min_leaf = c.at("min_leaf").get<std::size_t>();
    out.horizon = c.at("horizon").get<std::size_t>();
    out.log_interval = c.at("log_interval").get<std::size_t>();
    return out;
}

void compare_runs(const std::vector<std::string>& run_dirs, double alpha,
                  const std::string& output_dir) {
    if (run_dirs.size() < 2) {
        throw UsageError("compare: need at least 2 run directories");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw UsageError("compare: alpha must be in (0, 1)");
    }

    std::vector<std::string> labels;
    std::vector<std::vector<StepSeries>> runs;
    for (const auto& dir : run_dirs) {
        validate_run_dir(dir);
        labels.push_back(fs::path(dir).filename().string());
        runs.push_back(load_predictions(fs::path(dir) / "predictions_test.csv"));
    }

    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].size() != runs[0].size()) {
            throw UsageError("compare: '" + labels[i] + "' has a different horizon than '" +
                             labels[0] + "'");
        }
        for (std::size_t s = 0; s < runs[0].size(); ++s) {
            if (runs[i][s].observations != runs[0][s].observations) {
                throw UsageError("compare: test sets of '" + labels[i] + "' and '" + labels[0] +
                                 "' do not match at step " + std::to_string(s + 1));
            }
        }
    }

    std::vector<forecast::PairwiseDm> cells;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            for (std::size_t s = 0; s < runs[0].size(); ++s) {
                auto errors = [&](std::size_t r) {
                    std::vector<double> e(runs[r][s].predictions.size());
                    for (std::size_t t = 0; t < e.size(); ++t) {
                        e[t] = runs[r][s].observations[t] - runs[r][s].predictions[t];
                    }
                    return e;
                };
                forecast::PairwiseDm cell;
                cell.method_a = labels[i];
                cell.method_b = labels[j];
                cell.step = s + 1;
                cell.result = forecast::diebold_mariano(errors(i), errors(j), s + 1, alpha);
                cells.push_back(std::move(cell));
            }
        }
    }

    const std::vector<forecast::RankingRow> ranking = forecast::win_loss_ranking(cells);

    fs::create_directories(output_dir);
    std::ostringstream dm_csv;
    dm_csv << "method_a,method_b,step,statistic,p_value,winner\n";
    for (const auto& cell : cells) {
        dm_csv << cell.method_a << ',' << cell.method_b << ',' << cell.step << ','
               << fmt(cell.result.statistic) << ',' << fmt(cell.result.p_value) << ','
               << winner_label(cell) << '\n';
    }
    std::ofstream(fs::path(output_dir) / "dm_tests.csv") << dm_csv.str();

    std::ostringstream ranking_csv;
    ranking_csv << "method,wins,losses,win_minus_loss\n";
    for (const auto& row : ranking) {
        ranking_csv << row.method << ',' << fmt(row.wins) << ',' << fmt(row.losses) << ','
                    << fmt(row.margin()) << '\n';
    }
    std::ofstream(fs::path(output_dir) / "ranking.csv") << ranking_csv.str();

    std::cout << "Win-loss ranking (alpha=" << alpha << ", " << cells.size()
              << " pairwise tests):\n";
    std::cout << "  method  wins  losses  win-loss\n";
    for (const auto& row : ranking) {
        std::cout << "  " << row.method << "  " << row.wins << "  " << row.losses << "  "
                  << row.margin() << "\n";
    }
}

void multi_seed(const RunConfig& config, const std::vector<std::uint64_t>& seeds,
                const std::string& output_dir) {
    if (seeds.empty()) {
        throw UsageError("multi-seed: need at least 1 seed");
    }

    fs::create_directories(output_dir);
    std::vector<RunReport> reports;
    std::vector<std::uint64_t> completed;
    for (const std::uint64_t seed : seeds) {
        RunConfig sub = config;
        sub.seed = seed;
        sub.output_dir = (fs::path(output_dir) / ("seed_" + std::to_string(seed))).string();
        try {
            reports.push_back(run_pipeline(sub));
        } catch (const std::exception& e) {
            std::string note = "multi-seed: seed " + std::to_string(seed) + " failed";
            if (!completed.empty()) {
                note += " (completed seeds:";
                for (auto s : completed) note += " " + std::to_string(s);
                note += ")";
            }
            throw std::runtime_error(note + ": " + e.what());
        }
        completed.push_back(seed);
    }

    auto aggregate = [&reports](auto getter) {
        std::vector<double> values;
        values.reserve(reports.size());
        for (const auto& r : reports) values.push_back(getter(r));
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        return json{{"average", mean(values)}, {"min", *lo}, {"max", *hi}};
    };

    json per_seed = json::array();
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        per_seed.push_back({{"seed", seeds[i]},
                            {"train_rmse", reports[i].train_rmse_mean_of_steps},
                            {"test_rmse", reports[i].test_rmse_mean_of_steps},
                            {"overfitting_ratio", reports[i].overfitting_ratio},
                            {"avg_selected_attributes", reports[i].avg_selected_attributes}});
    }
    const double q = static_cast<double>(reports.front().feature_count);
    json summary{
        {"schema_version", kSchemaVersion},
        {"per_seed", per_seed},
        {"train_rmse", aggregate([](const RunReport& r) { return r.train_rmse_mean_of_steps; })},
        {"test_rmse", aggregate([](const RunReport& r) { return r.test_rmse_mean_of_steps; })},
        {"overfitting_ratio", aggregate([](const RunReport& r) { return r.overfitting_ratio; })},
        {"avg_selected_attributes",
         aggregate([](const RunReport& r) { return r.avg_selected_attributes; })},
        {"avg_selected_attributes_pct",
         aggregate([q](const RunReport& r) { return 100.0 * r.avg_selected_attributes / q; })}};

    std::ofstream(fs::path(output_dir) / "aggregate.json") << summary.dump(2) << "\n";

    std::ostringstream csv;
    csv << "seed,train_rmse,test_rmse,overfitting_ratio,avg_selected_attributes\n";
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        csv << seeds[i] << ',' << fmt(reports[i].train_rmse_mean_of_steps) << ','
            << fmt(reports[i].test_rmse_mean_of_steps) << ','
            << fmt(reports[i].overfitting_ratio) << ','
            << fmt(reports[i].avg_selected_attributes) << '\n';
    }
    std::ofstream(fs::path(output_dir) / "aggregate.csv") << csv.str();

    std::cout << "multi-seed aggregate over " << seeds.size() << " seeds:\n";
    for (const char* key : {"train_rmse", "test_rmse", "overfitting_ratio",
                            "avg_selected_attributes", "avg_selected_attributes_pct"}) {
        std::cout << "  " << key << ": average=" << summary[key]["average"].get<double>()
                  << " min=" << summary[key]["min"].get<double>()
                  << " max=" << summary[key]["max"].get<double>() << "\n";
    }
}

void inspect_run(const std::string& run_dir) {
    const fs::path path = fs::path(run_dir) / "run_manifest.json";
    const json manifest = load_json(path);
    check_schema_version(manifest, path);
    std::cout << "run directory: " << run_dir << "\n";
    std::cout << manifest.dump(2) << "\n";
}

void validate_run_dir(const std::string& run_dir) {
    const fs::path dir(run_dir);
    if (!fs::is_directory(dir)) {
        throw DataError("'" + run_dir + "' is not a directory");
    }
    for (const char* name : kRunFiles) {
        const fs::path path = dir / name;
        if (!fs::is_regular_file(path)) {
            throw DataError("run directory is missing '" + std::string(name) + "'");
        }
        const std::string ext = path.extension().string();
        if (ext == ".json") {
            check_schema_version(load_json(path), path);
        } else {
            std::ifstream in(path);
            std::string header;
            if (!std::getline(in, header) || header.find(',') == std::string::npos) {
                throw DataError("'" + path.string() + "' lacks a CSV header");
            }
        }
    }
}

}  // namespace evoforecast::pipeline
