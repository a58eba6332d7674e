#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"

#include "evoforecast/data.hpp"
#include "evoforecast/errors.hpp"

using namespace evoforecast;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

data::RawSeries make_series(std::vector<std::string> names,
                            std::vector<std::vector<double>> columns,
                            const std::string& target) {
    data::RawSeries s;
    s.column_names = std::move(names);
    s.columns = std::move(columns);
    s.target_name = target;
    for (std::size_t i = 0; i < s.columns[0].size(); ++i) {
        s.timestamps.push_back(std::to_string(i));
    }
    return s;
}

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& content) {
        path = fs::temp_directory_path() /
               ("evoforecast_data_test_" + std::to_string(counter++) + ".csv");
        std::ofstream(path) << content;
    }
    ~TempFile() { fs::remove(path); }
    static int counter;
};
int TempFile::counter = 0;

}  // namespace

TEST_CASE("linear interpolation fills gaps and extends edges") {
    SUBCASE("midpoint") {
        auto s = make_series({"a"}, {{1.0, kNaN, 3.0}}, "a");
        CHECK(data::interpolate_missing(s).columns[0] == std::vector<double>{1.0, 2.0, 3.0});
    }

    SUBCASE("constant extension") {
        auto s = make_series({"a"}, {{kNaN, 5.0, kNaN}}, "a");
        CHECK(data::interpolate_missing(s).columns[0] == std::vector<double>{5.0, 5.0, 5.0});
    }

    SUBCASE("two-step linear fill") {
        auto s = make_series({"a"}, {{0.0, kNaN, kNaN, 6.0}}, "a");
        CHECK(data::interpolate_missing(s).columns[0] ==
              std::vector<double>{0.0, 2.0, 4.0, 6.0});
    }

    SUBCASE("all-missing column names the column") {
        auto s = make_series({"a", "bad"}, {{1.0, 2.0}, {kNaN, kNaN}}, "a");
        CHECK_THROWS_WITH_AS(data::interpolate_missing(s), doctest::Contains("bad"), DataError);
    }

    SUBCASE("idempotent on complete series") {
        auto s = make_series({"a"}, {{1.0, 4.0, 2.0, 8.0}}, "a");
        const auto once = data::interpolate_missing(s);
        const auto twice = data::interpolate_missing(once);
        CHECK(once.columns == twice.columns);
    }
}

TEST_CASE("sliding window builds lagged rows, most recent first") {
    auto s = make_series({"y"}, {{1.0, 2.0, 3.0, 4.0, 5.0}}, "y");
    const auto ds = data::sliding_window(s, 3);

    CHECK(ds.feature_names == std::vector<std::string>{"Lag_y_1", "Lag_y_2", "Lag_y_3"});
    REQUIRE(ds.row_count() == 2);
    CHECK(ds.rows[0] == std::vector<double>{3.0, 2.0, 1.0});
    CHECK(ds.targets[0] == 4.0);
    CHECK(ds.rows[1] == std::vector<double>{4.0, 3.0, 2.0});
    CHECK(ds.targets[1] == 5.0);
}

TEST_CASE("windowing preserves counts and produces q = attributes x window") {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (int a = 0; a < 12; ++a) {
        names.push_back("attr" + std::to_string(a));
        std::vector<double> col(50);
        for (int t = 0; t < 50; ++t) col[t] = a + 0.1 * t;
        cols.push_back(col);
    }
    auto s = make_series(names, cols, "attr0");
    const auto ds = data::sliding_window(s, 3);
    CHECK(ds.feature_count() == 36);
    CHECK(ds.row_count() == 47);
}

TEST_CASE("window errors") {
    auto s = make_series({"y"}, {{1.0, 2.0, 3.0}}, "y");
    CHECK_THROWS_AS(data::sliding_window(s, 0), UsageError);
    CHECK_THROWS_AS(data::sliding_window(s, 3), UsageError);  // window >= length
    CHECK_THROWS_AS(data::sliding_window(s, 7), UsageError);
}

TEST_CASE("no leakage: every feature predates the row's target") {
    // Column values equal the time index, so any feature value >= target
    // would expose a leak.
    std::vector<double> idx(30);
    for (std::size_t t = 0; t < idx.size(); ++t) idx[t] = static_cast<double>(t);
    auto s = make_series({"y", "x"}, {idx, idx}, "y");
    const auto ds = data::sliding_window(s, 4);
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        for (double f : ds.rows[r]) CHECK(f < ds.targets[r]);
    }
}

TEST_CASE("target lags can be excluded") {
    auto s = make_series({"y", "x"}, {{1, 2, 3, 4}, {5, 6, 7, 8}}, "y");
    const auto ds = data::sliding_window(s, 2, false);
    CHECK(ds.feature_names == std::vector<std::string>{"Lag_x_1", "Lag_x_2"});
    CHECK(ds.targets == std::vector<double>{3.0, 4.0});
}

TEST_CASE("train/test split takes the final fraction, in time order") {
    data::WindowedDataset ds;
    ds.feature_names = {"f"};
    for (int t = 0; t < 1000; ++t) {
        ds.rows.push_back({static_cast<double>(t)});
        ds.targets.push_back(static_cast<double>(t));
    }

    SUBCASE("1000 rows at 0.2") {
        const auto [train, test] = data::split_train_test(ds, 0.2);
        CHECK(train.row_count() == 800);
        CHECK(test.row_count() == 200);
        CHECK(test.targets.front() == 800.0);
        CHECK(train.targets.back() < test.targets.front());
    }

    SUBCASE("10 rows at 0.2") {
        data::WindowedDataset small;
        small.feature_names = {"f"};
        for (int t = 0; t < 10; ++t) {
            small.rows.push_back({0.0});
            small.targets.push_back(static_cast<double>(t));
        }
        const auto [train, test] = data::split_train_test(small, 0.2);
        CHECK(train.row_count() == 8);
        CHECK(test.row_count() == 2);
    }

    SUBCASE("fraction bounds") {
        CHECK_THROWS_AS(data::split_train_test(ds, 0.0), UsageError);
        CHECK_THROWS_AS(data::split_train_test(ds, 1.0), UsageError);
    }
}

TEST_CASE("min-max normalization") {
    data::WindowedDataset ds;
    ds.feature_names = {"a", "b"};
    ds.rows = {{0.0, 7.0}, {5.0, 7.0}, {10.0, 7.0}};
    ds.targets = {2.0, 4.0, 6.0};

    const auto norm = data::normalize(ds);
    CHECK(norm.rows[0][0] == 0.0);
    CHECK(norm.rows[1][0] == 0.5);
    CHECK(norm.rows[2][0] == 1.0);
    for (const auto& row : norm.rows) CHECK(row[1] == 0.5);  // constant column
    CHECK(norm.targets == std::vector<double>{0.0, 0.5, 1.0});
    REQUIRE(norm.norm_stats.has_value());

    SUBCASE("denormalize is the inverse") {
        const auto back = data::denormalize(norm);
        for (std::size_t r = 0; r < ds.row_count(); ++r) {
            CHECK(back.rows[r][0] == doctest::Approx(ds.rows[r][0]).epsilon(1e-12));
            CHECK(back.rows[r][1] == doctest::Approx(ds.rows[r][1]).epsilon(1e-12));
            CHECK(back.targets[r] == doctest::Approx(ds.targets[r]).epsilon(1e-12));
        }
    }

    SUBCASE("supplied stats are applied verbatim") {
        data::WindowedDataset test = ds;
        test.rows = {{20.0, 7.0}};
        test.targets = {8.0};
        const auto scaled = data::normalize(test, *norm.norm_stats);
        CHECK(scaled.rows[0][0] == 2.0);  // outside [0,1] under train stats
        CHECK(scaled.targets[0] == doctest::Approx(1.5).epsilon(1e-12));
    }
}

TEST_CASE("partitioning into contiguous time-ordered blocks") {
    auto make = [](std::size_t rows) {
        data::WindowedDataset ds;
        ds.feature_names = {"f"};
        for (std::size_t t = 0; t < rows; ++t) {
            ds.rows.push_back({static_cast<double>(t)});
            ds.targets.push_back(static_cast<double>(t));
        }
        return ds;
    };

    SUBCASE("800 rows into 5 equal blocks") {
        const auto parts = data::partition_training(make(800), 5);
        REQUIRE(parts.partitions.size() == 5);
        for (const auto& p : parts.partitions) CHECK(p.row_count() == 160);
        for (std::size_t k = 1; k < 5; ++k) {
            CHECK(parts.partitions[k - 1].targets.back() <
                  parts.partitions[k].targets.front());
        }
    }

    SUBCASE("remainder goes to the earliest block") {
        const auto parts = data::partition_training(make(10), 3);
        REQUIRE(parts.partitions.size() == 3);
        CHECK(parts.partitions[0].row_count() == 4);
        CHECK(parts.partitions[1].row_count() == 3);
        CHECK(parts.partitions[2].row_count() == 3);
    }

    SUBCASE("concatenating partitions reproduces the training set") {
        const auto train = make(23);
        const auto parts = data::partition_training(train, 4);
        std::vector<double> rebuilt;
        for (const auto& p : parts.partitions) {
            rebuilt.insert(rebuilt.end(), p.targets.begin(), p.targets.end());
        }
        CHECK(rebuilt == train.targets);
    }

    SUBCASE("usage errors") {
        CHECK_THROWS_AS(data::partition_training(make(10), 1), UsageError);
        CHECK_THROWS_AS(data::partition_training(make(10), 11), UsageError);
    }
}

TEST_CASE("CSV ingestion") {
    SUBCASE("sentinel, empty and NaN cells are missing") {
        TempFile file("t,a,b\n0,1.0,10\n1,-200,20\n2,,30\n3,nan,40\n4,5.0,50\n");
        data::CsvOptions options;
        const auto s = data::read_csv(file.path.string(), "a", options);
        CHECK(s.length() == 5);
        CHECK(s.column_names == std::vector<std::string>{"a", "b"});
        CHECK(s.columns[0][0] == 1.0);
        CHECK(std::isnan(s.columns[0][1]));
        CHECK(std::isnan(s.columns[0][2]));
        CHECK(std::isnan(s.columns[0][3]));
        CHECK(s.columns[0][4] == 5.0);
    }

    SUBCASE("sentinel can be disabled") {
        TempFile file("t,a\n0,-200\n1,1\n");
        data::CsvOptions options;
        options.missing_sentinel.reset();
        const auto s = data::read_csv(file.path.string(), "a", options);
        CHECK(s.columns[0][0] == -200.0);
    }

    SUBCASE("custom delimiter and timestamp column") {
        TempFile file("a;when;b\n1;2020-01-01T00:00;4\n2;2020-01-01T01:00;5\n");
        data::CsvOptions options;
        options.delimiter = ';';
        options.timestamp_column = "when";
        const auto s = data::read_csv(file.path.string(), "b", options);
        CHECK(s.column_names == std::vector<std::string>{"a", "b"});
        CHECK(s.timestamps[0] == "2020-01-01T00:00");
    }

    SUBCASE("non-increasing timestamps are rejected") {
        TempFile file("t,a\n5,1\n3,2\n");
        CHECK_THROWS_AS(data::read_csv(file.path.string(), "a", {}), DataError);
    }

    SUBCASE("unknown target column is rejected") {
        TempFile file("t,a\n0,1\n1,2\n");
        CHECK_THROWS_WITH_AS(data::read_csv(file.path.string(), "zzz", {}),
                             doctest::Contains("zzz"), DataError);
    }

    SUBCASE("unparseable cell is rejected") {
        TempFile file("t,a\n0,abc\n");
        CHECK_THROWS_AS(data::read_csv(file.path.string(), "a", {}), DataError);
    }

    SUBCASE("missing file is rejected") {
        CHECK_THROWS_AS(data::read_csv("/nonexistent/nope.csv", "a", {}), DataError);
    }
}
