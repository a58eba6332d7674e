#pragma once

// Deterministic synthetic CSV fixtures shared by the pipeline tests and
// the acceptance suite.

#include <cmath>
#include <fstream>
#include <string>

#include "evoforecast/rng.hpp"

namespace fixtures {

// Smooth sine target with two exogenous companions.
inline void write_sine_csv(const std::string& path, std::size_t rows) {
    std::ofstream out(path);
    out << "t,y,x,z\n";
    for (std::size_t t = 0; t < rows; ++t) {
        const double ft = static_cast<double>(t);
        const double y = std::sin(0.12 * ft) + 0.25 * std::sin(0.043 * ft + 0.8);
        const double x = std::cos(0.12 * ft);
        const double z = 0.5 * std::sin(0.021 * ft + 2.0);
        out << t << ',' << y << ',' << x << ',' << z << '\n';
    }
}

// Planted AR(2) target, y_t = -0.5 y_{t-1} + 0.3 y_{t-2} + eps, plus
// pure-noise exogenous columns. The negative lag-1 coefficient makes the
// persistence baseline (predict the previous value) distinctly poor.
inline void write_ar2_csv(const std::string& path, std::size_t rows, std::size_t noise_columns,
                          std::uint64_t seed) {
    evoforecast::Rng rng(seed);
    std::ofstream out(path);
    out << "t,y";
    for (std::size_t c = 0; c < noise_columns; ++c) out << ",n" << c;
    out << "\n";

    double prev1 = 0.1;
    double prev2 = -0.05;
    for (std::size_t t = 0; t < rows; ++t) {
        const double eps = 0.05 * (2.0 * rng.uniform01() - 1.0);
        const double y = (t < 2) ? (t == 0 ? prev2 : prev1)
                                 : -0.5 * prev1 + 0.3 * prev2 + eps;
        if (t >= 2) {
            prev2 = prev1;
            prev1 = y;
        }
        out << t << ',' << y;
        for (std::size_t c = 0; c < noise_columns; ++c) {
            out << ',' << (2.0 * rng.uniform01() - 1.0);
        }
        out << '\n';
    }
}

}  // namespace fixtures
