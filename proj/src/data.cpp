#include "evoforecast/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "evoforecast/errors.hpp"

namespace evoforecast::data {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, delimiter)) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == delimiter) cells.emplace_back();
    return cells;
}

bool iequals_nan(const std::string& s) {
    if (s.size() != 3) return false;
    return std::tolower(static_cast<unsigned char>(s[0])) == 'n' &&
           std::tolower(static_cast<unsigned char>(s[1])) == 'a' &&
           std::tolower(static_cast<unsigned char>(s[2])) == 'n';
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

void check_timestamps_increasing(const std::vector<std::string>& ts) {
    bool all_numeric = true;
    std::vector<double> numeric(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto v = parse_number(ts[i]);
        if (!v) {
            all_numeric = false;
            break;
        }
        numeric[i] = *v;
    }
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const bool increasing = all_numeric ? numeric[i - 1] < numeric[i] : ts[i - 1] < ts[i];
        if (!increasing) {
            throw DataError("timestamps not strictly increasing at row " + std::to_string(i) +
                            " (" + ts[i - 1] + " -> " + ts[i] + ")");
        }
    }
}

std::pair<double, double> column_stats(const std::vector<double>& values) {
    double lo = values[0];
    double hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

double scale(double v, const std::pair<double, double>& stats) {
    const auto [lo, hi] = stats;
    if (hi == lo) return 0.5;
    return (v - lo) / (hi - lo);
}

double unscale(double v, const std::pair<double, double>& stats) {
    const auto [lo, hi] = stats;
    if (hi == lo) return lo;
    return lo + v * (hi - lo);
}

WindowedDataset apply_stats(const WindowedDataset& ds, const NormStats& stats) {
    if (stats.features.size() != ds.feature_count()) {
        throw DimensionError("normalize: stats cover " + std::to_string(stats.features.size()) +
                             " features, dataset has " + std::to_string(ds.feature_count()));
    }
    WindowedDataset out = ds;
    for (auto& row : out.rows) {
        for (std::size_t f = 0; f < row.size(); ++f) row[f] = scale(row[f], stats.features[f]);
    }
    for (auto& t : out.targets) t = scale(t, stats.target);
    out.norm_stats = stats;
    return out;
}

}  // namespace

const std::vector<double>& RawSeries::column(const std::string& name) const {
    for (std::size_t i = 0; i < column_names.size(); ++i) {
        if (column_names[i] == name) return columns[i];
    }
    throw DataError("no column named '" + name + "'");
}

RawSeries read_csv(const std::string& path, const std::string& target_name,
                   const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open CSV file '" + path + "'");
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("CSV file '" + path + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_line(line, options.delimiter);
    if (header.size() < 2) {
        throw DataError("CSV header needs a timestamp column and at least one attribute");
    }

    std::size_t ts_index = 0;
    if (!options.timestamp_column.empty()) {
        const auto it = std::find(header.begin(), header.end(), options.timestamp_column);
        if (it == header.end()) {
            throw DataError("timestamp column '" + options.timestamp_column + "' not in header");
        }
        ts_index = static_cast<std::size_t>(it - header.begin());
    }

    RawSeries series;
    series.target_name = target_name;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i != ts_index) series.column_names.push_back(header[i]);
    }
    series.columns.assign(series.column_names.size(), {});

    if (std::find(series.column_names.begin(), series.column_names.end(), target_name) ==
        series.column_names.end()) {
        throw DataError("target column '" + target_name + "' not in CSV header");
    }

    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line, options.delimiter);
        if (cells.size() != header.size()) {
            throw DataError("CSV row " + std::to_string(row_number) + " has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header.size()));
        }
        series.timestamps.push_back(cells[ts_index]);
        std::size_t col = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i == ts_index) continue;
            const std::string& cell = cells[i];
            double value = kNaN;
            if (!cell.empty() && !iequals_nan(cell)) {
                const auto parsed = parse_number(cell);
                if (!parsed) {
                    throw DataError("CSV row " + std::to_string(row_number) + ", column '" +
                                    series.column_names[col] + "': cannot parse '" + cell + "'");
                }
                value = *parsed;
                if (options.missing_sentinel && value == *options.missing_sentinel) {
                    value = kNaN;
                }
            }
            series.columns[col].push_back(value);
            ++col;
        }
    }

    if (series.timestamps.empty()) {
        throw DataError("CSV file '" + path + "' has no data rows");
    }
    check_timestamps_increasing(series.timestamps);
    return series;
}

RawSeries interpolate_missing(const RawSeries& series) {
    RawSeries out = series;
    for (std::size_t c = 0; c < out.columns.size(); ++c) {
        auto& col = out.columns[c];
        std::vector<std::size_t> present;
        for (std::size_t i = 0; i < col.size(); ++i) {
            if (!std::isnan(col[i])) present.push_back(i);
        }
        if (present.empty()) {
            throw DataError("column '" + out.column_names[c] + "' has no present values");
        }

        for (std::size_t i = 0; i < present.front(); ++i) col[i] = col[present.front()];
        for (std::size_t i = present.back() + 1; i < col.size(); ++i) col[i] = col[present.back()];
        for (std::size_t k = 0; k + 1 < present.size(); ++k) {
            const std::size_t a = present[k];
            const std::size_t b = present[k + 1];
            const double step = (col[b] - col[a]) / static_cast<double>(b - a);
            for (std::size_t i = a + 1; i < b; ++i) {
                col[i] = col[a] + step * static_cast<double>(i - a);
            }
        }
    }
    return out;
}

WindowedDataset sliding_window(const RawSeries& series, std::size_t window,
                               bool include_target_lags) {
    if (window == 0) {
        throw UsageError("sliding_window: window must be >= 1");
    }
    if (series.length() <= window) {
        throw UsageError("sliding_window: series length " + std::to_string(series.length()) +
                         " must exceed window " + std::to_string(window));
    }

    WindowedDataset ds;
    ds.window = window;
    ds.target_name = series.target_name;

    std::vector<std::size_t> used_columns;
    for (std::size_t c = 0; c < series.column_names.size(); ++c) {
        if (!include_target_lags && series.column_names[c] == series.target_name) continue;
        used_columns.push_back(c);
        for (std::size_t lag = 1; lag <= window; ++lag) {
            ds.feature_names.push_back("Lag_" + series.column_names[c] + "_" +
                                       std::to_string(lag));
        }
    }

    const auto& target = series.column(series.target_name);
    const std::size_t rows = series.length() - window;
    ds.rows.reserve(rows);
    ds.targets.reserve(rows);
    for (std::size_t t = window; t < series.length(); ++t) {
        std::vector<double> row;
        row.reserve(ds.feature_names.size());
        for (std::size_t c : used_columns) {
            for (std::size_t lag = 1; lag <= window; ++lag) {
                row.push_back(series.columns[c][t - lag]);
            }
        }
        ds.rows.push_back(std::move(row));
        ds.targets.push_back(target[t]);
    }
    return ds;
}

std::pair<WindowedDataset, WindowedDataset> split_train_test(const WindowedDataset& ds,
                                                             double test_fraction) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw UsageError("split_train_test: test_fraction must be in (0, 1)");
    }
    const std::size_t rows = ds.row_count();
    const std::size_t test_rows =
        static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(rows)));
    const std::size_t train_rows = rows - test_rows;
    if (test_rows == 0 || train_rows == 0) {
        throw UsageError("split_train_test: split leaves an empty side (" +
                         std::to_string(train_rows) + " train / " + std::to_string(test_rows) +
                         " test)");
    }

    auto slice = [&ds](std::size_t begin, std::size_t end) {
        WindowedDataset part;
        part.feature_names = ds.feature_names;
        part.target_name = ds.target_name;
        part.window = ds.window;
        part.rows.assign(ds.rows.begin() + static_cast<std::ptrdiff_t>(begin),
                         ds.rows.begin() + static_cast<std::ptrdiff_t>(end));
        part.targets.assign(ds.targets.begin() + static_cast<std::ptrdiff_t>(begin),
                            ds.targets.begin() + static_cast<std::ptrdiff_t>(end));
        return part;
    };
    return {slice(0, train_rows), slice(train_rows, rows)};
}

WindowedDataset normalize(const WindowedDataset& ds) {
    if (ds.row_count() == 0) {
        throw UsageError("normalize: dataset is empty");
    }
    NormStats stats;
    stats.features.reserve(ds.feature_count());
    for (std::size_t f = 0; f < ds.feature_count(); ++f) {
        std::vector<double> column(ds.row_count());
        for (std::size_t r = 0; r < ds.row_count(); ++r) column[r] = ds.rows[r][f];
        stats.features.push_back(column_stats(column));
    }
    stats.target = column_stats(ds.targets);
    return apply_stats(ds, stats);
}

WindowedDataset normalize(const WindowedDataset& ds, const NormStats& stats) {
    if (ds.row_count() == 0) {
        throw UsageError("normalize: dataset is empty");
    }
    return apply_stats(ds, stats);
}

WindowedDataset denormalize(const WindowedDataset& ds) {
    if (!ds.norm_stats) {
        throw UsageError("denormalize: dataset has no recorded normalization stats");
    }
    WindowedDataset out = ds;
    const NormStats& stats = *ds.norm_stats;
    for (auto& row : out.rows) {
        for (std::size_t f = 0; f < row.size(); ++f) row[f] = unscale(row[f], stats.features[f]);
    }
    for (auto& t : out.targets) t = unscale(t, stats.target);
    out.norm_stats.reset();
    return out;
}

PartitionSet partition_training(const WindowedDataset& train, std::size_t n) {
    if (n < 2) {
        throw UsageError("partition_training: n must be >= 2 (multi-objective problem)");
    }
    const std::size_t rows = train.row_count();
    if (n > rows) {
        throw UsageError("partition_training: n=" + std::to_string(n) + " exceeds " +
                         std::to_string(rows) + " rows");
    }

    const std::size_t base = rows / n;
    const std::size_t remainder = rows % n;

    PartitionSet set;
    set.partitions.reserve(n);
    std::size_t begin = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t size = base + (k == 0 ? remainder : 0);
        WindowedDataset part;
        part.feature_names = train.feature_names;
        part.target_name = train.target_name;
        part.window = train.window;
        part.norm_stats = train.norm_stats;
        part.rows.assign(train.rows.begin() + static_cast<std::ptrdiff_t>(begin),
                         train.rows.begin() + static_cast<std::ptrdiff_t>(begin + size));
        part.targets.assign(train.targets.begin() + static_cast<std::ptrdiff_t>(begin),
                            train.targets.begin() + static_cast<std::ptrdiff_t>(begin + size));
        set.partitions.push_back(std::move(part));
        begin += size;
    }
    return set;
}

}  // namespace evoforecast::data
