#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace evoforecast::pipeline {

enum class NormalizationMode { kPerPartition, kTrainStats };
enum class MetaKind { kRandomForest, kOls };

NormalizationMode normalization_mode_from_string(const std::string& s);
std::string to_string(NormalizationMode mode);
MetaKind meta_kind_from_string(const std::string& s);
std::string to_string(MetaKind kind);

struct RunConfig {
    std::string data_path;
    std::string target_column;
    std::string output_dir = "run_out";

    // preprocessing
    std::size_t window = 3;
    double test_fraction = 0.2;
    bool include_target_lags = true;
    char delimiter = ',';
    bool use_missing_sentinel = true;
    double missing_sentinel = -200.0;
    std::string timestamp_column;  // empty: first column
    NormalizationMode normalization = NormalizationMode::kPerPartition;

    // problem
    std::size_t partitions = 5;
    std::size_t hidden_units = 2;

    // evolution
    std::size_t population = 50;
    std::size_t generations = 100;
    double crossover_prob = 1.0;
    double mutation_prob = 1.0;
    std::uint64_t seed = 42;
    double sbx_eta = 15.0;
    double pm_eta = 20.0;
    double weight_low = -5.0;
    double weight_high = 5.0;

    // stacking
    MetaKind meta = MetaKind::kRandomForest;
    std::size_t trees = 100;
    std::size_t mtry = 0;  // 0: auto
    std::size_t min_leaf = 5;

    // evaluation
    std::size_t horizon = 3;

    // reporting
    std::size_t log_interval = 100;  // generations between progress lines; 0 = silent

    // Throws UsageError listing every violated constraint; runs before any
    // data is read.
    void validate() const;
};

// Headline results of one pipeline run, as written to metrics.json.
struct RunReport {
    std::string output_dir;
    std::size_t front_size = 0;
    double train_rmse_mean_of_steps = 0.0;
    double test_rmse_mean_of_steps = 0.0;
    double overfitting_ratio = 0.0;
    double avg_selected_attributes = 0.0;
    std::size_t feature_count = 0;
};

// Executes the full pipeline: ingest, window, split, normalize, partition,
// evolve, stack, forecast, evaluate; writes pareto_front.json,
// ensemble_model.json, importance.csv, hypervolume.csv,
// front_objectives.csv (parallel-coordinates matrix), predictions_train.csv,
// predictions_test.csv, metrics.json and run_manifest.json into
// config.output_dir. Errors are rethrown with the failing stage named and
// any partially written outputs removed.
RunReport run_pipeline(const RunConfig& config);

// Rebuilds a RunConfig from a manifest's "config" object, so a run
// directory can be reproduced from its manifest alone.
RunConfig config_from_manifest(const std::string& manifest_path);

// Pairwise Diebold-Mariano comparison of completed run directories; the
// ranking goes to stdout and, with dm_tests.csv, into output_dir.
// Runs whose test observations differ are a UsageError.
void compare_runs(const std::vector<std::string>& run_dirs, double alpha,
                  const std::string& output_dir);

// Runs the pipeline once per seed (outputs under output_dir/seed_<s>) and
// writes an aggregate table (average/min/max of train RMSE, test RMSE,
// selected-attribute count) to stdout and output_dir/aggregate.{json,csv}.
void multi_seed(const RunConfig& config, const std::vector<std::uint64_t>& seeds,
                const std::string& output_dir);

// Pretty-prints a run directory's manifest to stdout.
void inspect_run(const std::string& run_dir);

// Checks that a run directory contains every expected artifact with a
// readable schema; throws DataError on the first violation.
void validate_run_dir(const std::string& run_dir);

}  // namespace evoforecast::pipeline
