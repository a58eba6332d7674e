#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace evoforecast::data {

// A raw multivariate series as read from CSV. Missing entries are NaN.
struct RawSeries {
    std::vector<std::string> timestamps;          // strictly increasing
    std::vector<std::string> column_names;        // attribute columns, CSV order
    std::vector<std::vector<double>> columns;     // column-major, equal lengths
    std::string target_name;

    std::size_t length() const { return timestamps.size(); }
    const std::vector<double>& column(const std::string& name) const;
};

// Per-column (min, max) used for min-max scaling and its inverse.
struct NormStats {
    std::vector<std::pair<double, double>> features;  // one per feature column
    std::pair<double, double> target{0.0, 0.0};
};

// Sliding-window samples: q lagged features per row and one target.
// Feature k for attribute a and lag g is named Lag_<a>_<g> and holds the
// attribute's value g steps before the row's target time.
struct WindowedDataset {
    std::vector<std::string> feature_names;       // size q
    std::vector<std::vector<double>> rows;        // l x q
    std::vector<double> targets;                  // length l
    std::string target_name;
    std::size_t window = 0;
    std::optional<NormStats> norm_stats;          // set once normalized

    std::size_t row_count() const { return rows.size(); }
    std::size_t feature_count() const { return feature_names.size(); }
};

// Contiguous, time-ordered blocks of a training set; block k strictly
// precedes block k+1.
struct PartitionSet {
    std::vector<WindowedDataset> partitions;
};

// Options for CSV ingestion. Cells that are empty, "NaN" (case-insensitive)
// or equal to missing_sentinel are treated as missing.
struct CsvOptions {
    char delimiter = ',';
    std::optional<double> missing_sentinel = -200.0;
    std::string timestamp_column;  // empty: first column
};

RawSeries read_csv(const std::string& path, const std::string& target_name,
                   const CsvOptions& options = {});

// Fills every gap linearly between the nearest present neighbors;
// leading/trailing gaps take the nearest present value. A column with no
// present value at all is a DataError naming the column.
RawSeries interpolate_missing(const RawSeries& series);

// Lag features for every attribute (optionally excluding the target's own
// lags) over lags 1..window; lag 1 is the most recent observation.
// Row count is series length minus window.
WindowedDataset sliding_window(const RawSeries& series, std::size_t window,
                               bool include_target_lags = true);

// Test set is the final floor(test_fraction * rows) rows, no shuffling.
std::pair<WindowedDataset, WindowedDataset> split_train_test(const WindowedDataset& ds,
                                                             double test_fraction);

// Min-max scales every feature column and the target to [0, 1] using the
// dataset's own statistics; a constant column maps to all 0.5. The stats
// are recorded in norm_stats.
WindowedDataset normalize(const WindowedDataset& ds);

// Same scaling but with supplied statistics (e.g. training stats applied
// to a test set). Values outside the stats' range fall outside [0, 1].
WindowedDataset normalize(const WindowedDataset& ds, const NormStats& stats);

// Inverse of normalize() given the recorded stats.
WindowedDataset denormalize(const WindowedDataset& ds);

// n contiguous time-ordered blocks; when rows % n != 0 the earliest block
// absorbs the remainder so all later blocks have exactly floor(rows/n) rows.
PartitionSet partition_training(const WindowedDataset& train, std::size_t n);

}  // namespace evoforecast::data
