#include <cctype>
#include <cstdint>
#include <memory>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "evoforecast/errors.hpp"
#include "evoforecast/pipeline.hpp"
#include "evoforecast/version.hpp"

namespace {

using evoforecast::pipeline::RunConfig;

// Registers the run-configuration flags shared by `run` and `multi-seed`.
// String holders for enum-ish options live in the returned struct.
struct ConfigBinding {
    std::string normalization = "per_partition";
    std::string meta = "forest";
    std::string delimiter = ",";
    std::string config_path;  // consumed before CLI11 parsing
};

std::unique_ptr<ConfigBinding> bind_config(CLI::App* cmd, RunConfig& config) {
    auto holder = std::make_unique<ConfigBinding>();
    // config-file tokens precede command-line flags; the last value wins
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--data", config.data_path, "Input CSV path")->required();
    cmd->add_option("--target", config.target_column, "Target column name")->required();
    cmd->add_option("--out", config.output_dir, "Output directory");
    cmd->add_option("--window", config.window, "Sliding-window size");
    cmd->add_option("--test-fraction", config.test_fraction, "Held-out tail fraction");
    cmd->add_option("--partitions", config.partitions, "Training partitions (objectives)");
    cmd->add_option("--hidden-units", config.hidden_units, "LSTM hidden units");
    cmd->add_option("--population", config.population, "Population size (even)");
    cmd->add_option("--generations", config.generations, "Generations");
    cmd->add_option("--crossover-prob", config.crossover_prob, "Crossover probability");
    cmd->add_option("--mutation-prob", config.mutation_prob, "Mutation probability");
    cmd->add_option("--seed", config.seed, "Random seed");
    cmd->add_option("--sbx-eta", config.sbx_eta, "SBX distribution index");
    cmd->add_option("--pm-eta", config.pm_eta, "Polynomial-mutation distribution index");
    cmd->add_option("--weight-low", config.weight_low, "Weight gene lower bound");
    cmd->add_option("--weight-high", config.weight_high, "Weight gene upper bound");
    cmd->add_option("--meta", holder->meta, "Meta-learner: forest or ols");
    cmd->add_option("--trees", config.trees, "Forest size");
    cmd->add_option("--mtry", config.mtry, "Features tried per split (0 = auto)");
    cmd->add_option("--min-leaf", config.min_leaf, "Minimum rows per leaf");
    cmd->add_option("--horizon", config.horizon, "Forecast horizon");
    cmd->add_option("--normalization", holder->normalization,
                    "Normalization mode: per_partition or train_stats");
    cmd->add_option("--delimiter", holder->delimiter, "CSV delimiter");
    cmd->add_option("--timestamp-column", config.timestamp_column,
                    "Timestamp column (default: first)");
    cmd->add_option("--missing-sentinel", config.missing_sentinel,
                    "Numeric value treated as missing");
    cmd->add_flag("!--no-missing-sentinel", config.use_missing_sentinel,
                  "Disable the missing-value sentinel");
    cmd->add_flag("!--no-target-lags", config.include_target_lags,
                  "Exclude the target's own lags from the features");
    cmd->add_option("--log-interval", config.log_interval,
                    "Generations between progress lines (0 = silent)");
    cmd->add_option("--config", holder->config_path,
                    "Read options from a flat key=value file; command-line flags override")
        ->expected(1);
    return holder;
}

void finish_config(const ConfigBinding& holder, RunConfig& config) {
    config.normalization =
        evoforecast::pipeline::normalization_mode_from_string(holder.normalization);
    config.meta = evoforecast::pipeline::meta_kind_from_string(holder.meta);
    if (holder.delimiter.size() != 1) {
        throw evoforecast::UsageError("delimiter must be a single character");
    }
    config.delimiter = holder.delimiter[0];
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// key=value lines become --key=value tokens; # starts a comment.
std::vector<std::string> config_file_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw evoforecast::UsageError("cannot open config file '" + path + "'");
    }
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw evoforecast::UsageError("config line '" + line + "' is not key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw evoforecast::UsageError("config line '" + line + "' has an empty key");
        }
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

// Splices config-file tokens right after the subcommand name so that any
// flag given on the command line wins (CLI11 keeps the last occurrence).
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

    std::string config_path;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    if (config_path.empty()) return args;

    const std::vector<std::string> tokens = config_file_tokens(config_path);
    std::size_t insert_at = args.empty() ? 0 : 1;  // right after the subcommand
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at), tokens.begin(),
                tokens.end());
    return args;
}

std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
    std::vector<std::uint64_t> seeds;
    std::size_t begin = 0;
    while (begin <= csv.size()) {
        const std::size_t comma = csv.find(',', begin);
        const std::string token =
            csv.substr(begin, comma == std::string::npos ? std::string::npos : comma - begin);
        if (!token.empty()) seeds.push_back(std::stoull(token));
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    return seeds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolutionary LSTM forecasting: multi-objective neuroevolution with "
                 "embedded feature selection, Pareto-front stacking and multi-step "
                 "evaluation"};
    app.set_version_flag("--version", evoforecast::kVersion);
    app.require_subcommand(1);

    RunConfig run_config;
    auto* run_cmd = app.add_subcommand("run", "Run the full pipeline on one CSV");
    auto run_holder = bind_config(run_cmd, run_config);

    RunConfig ms_config;
    std::string seeds_csv = "1,2,3,4,5";
    auto* ms_cmd = app.add_subcommand("multi-seed", "Run the pipeline once per seed");
    auto ms_holder = bind_config(ms_cmd, ms_config);
    ms_cmd->add_option("--seeds", seeds_csv, "Comma-separated seed list");

    std::vector<std::string> compare_dirs;
    double alpha = 0.05;
    std::string compare_out = "compare_report";
    auto* compare_cmd =
        app.add_subcommand("compare", "Pairwise Diebold-Mariano comparison of run directories");
    compare_cmd->add_option("--runs", compare_dirs, "Run directories")->required()
        ->expected(2, -1);
    compare_cmd->add_option("--alpha", alpha, "Significance level");
    compare_cmd->add_option("--out", compare_out, "Report directory");

    std::string inspect_dir;
    auto* inspect_cmd = app.add_subcommand("inspect", "Pretty-print a run manifest");
    inspect_cmd->add_option("--run", inspect_dir, "Run directory")->required();

    std::vector<std::string> args;
    try {
        args = expand_config_args(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        std::vector<const char*> argv2;
        argv2.push_back(argv[0]);
        for (const auto& a : args) argv2.push_back(a.c_str());
        app.parse(static_cast<int>(argv2.size()), argv2.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (run_cmd->parsed()) {
            finish_config(*run_holder, run_config);
            const auto report = evoforecast::pipeline::run_pipeline(run_config);
            std::cout << "run complete: " << report.output_dir
                      << " (front size " << report.front_size
                      << ", test RMSE " << report.test_rmse_mean_of_steps << ")\n";
        } else if (ms_cmd->parsed()) {
            finish_config(*ms_holder, ms_config);
            evoforecast::pipeline::multi_seed(ms_config, parse_seeds(seeds_csv),
                                              ms_config.output_dir);
        } else if (compare_cmd->parsed()) {
            evoforecast::pipeline::compare_runs(compare_dirs, alpha, compare_out);
        } else if (inspect_cmd->parsed()) {
            evoforecast::pipeline::inspect_run(inspect_dir);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
