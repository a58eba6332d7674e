#include "evoforecast/lstm.hpp"

#include <cmath>
#include <string>

#include "evoforecast/data.hpp"
#include "evoforecast/errors.hpp"

namespace evoforecast::lstm {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Consumes count values from weights starting at cursor.
std::vector<double> extract(const std::vector<double>& weights, std::size_t& cursor,
                            std::size_t count) {
    std::vector<double> out(weights.begin() + static_cast<std::ptrdiff_t>(cursor),
                            weights.begin() + static_cast<std::ptrdiff_t>(cursor + count));
    cursor += count;
    return out;
}

void append(std::vector<double>& out, const std::vector<double>& block) {
    out.insert(out.end(), block.begin(), block.end());
}

}  // namespace

std::size_t weight_count(std::size_t q, std::size_t u) {
    return 4 * (q * u + u * u + 2 * u) + u + 1;
}

LstmParams convert(const std::vector<double>& weights, std::size_t q, std::size_t u) {
    const std::size_t expected = weight_count(q, u);
    if (weights.size() != expected) {
        throw DimensionError("convert: weight vector has length " +
                             std::to_string(weights.size()) + ", expected " +
                             std::to_string(expected) + " for q=" + std::to_string(q) +
                             ", u=" + std::to_string(u));
    }

    LstmParams p;
    p.q = q;
    p.u = u;

    std::size_t cursor = 0;
    p.wxi = extract(weights, cursor, u * q);
    p.wxf = extract(weights, cursor, u * q);
    p.wxl = extract(weights, cursor, u * q);
    p.wxo = extract(weights, cursor, u * q);
    p.bxi = extract(weights, cursor, u);
    p.bxf = extract(weights, cursor, u);
    p.bxl = extract(weights, cursor, u);
    p.bxo = extract(weights, cursor, u);
    p.whi = extract(weights, cursor, u * u);
    p.whf = extract(weights, cursor, u * u);
    p.whl = extract(weights, cursor, u * u);
    p.who = extract(weights, cursor, u * u);
    p.bhi = extract(weights, cursor, u);
    p.bhf = extract(weights, cursor, u);
    p.bhl = extract(weights, cursor, u);
    p.bho = extract(weights, cursor, u);
    p.wo = extract(weights, cursor, u);
    p.bo = weights[cursor];
    return p;
}

std::vector<double> flatten(const LstmParams& p) {
    std::vector<double> out;
    out.reserve(weight_count(p.q, p.u));
    append(out, p.wxi);
    append(out, p.wxf);
    append(out, p.wxl);
    append(out, p.wxo);
    append(out, p.bxi);
    append(out, p.bxf);
    append(out, p.bxl);
    append(out, p.bxo);
    append(out, p.whi);
    append(out, p.whf);
    append(out, p.whl);
    append(out, p.who);
    append(out, p.bhi);
    append(out, p.bhf);
    append(out, p.bhl);
    append(out, p.bho);
    append(out, p.wo);
    out.push_back(p.bo);
    return out;
}

LstmState zero_state(std::size_t u) {
    return LstmState{std::vector<double>(u, 0.0), std::vector<double>(u, 0.0)};
}

double step(const LstmParams& p, const std::vector<bool>& mask,
            const std::vector<double>& input, LstmState& state) {
    const std::size_t q = p.q;
    const std::size_t u = p.u;
    if (mask.size() != q) {
        throw DimensionError("step: mask has length " + std::to_string(mask.size()) +
                             ", expected " + std::to_string(q));
    }
    if (input.size() != q) {
        throw DimensionError("step: input row has length " + std::to_string(input.size()) +
                             ", expected " + std::to_string(q));
    }

    // The mask zeroes an attribute before every event-weight product,
    // equivalent to zeroing that column of each event-weight matrix.
    std::vector<double> md(q);
    for (std::size_t a = 0; a < q; ++a) md[a] = mask[a] ? input[a] : 0.0;

    std::vector<double> f(u), in_gate(u), new_c(u), new_h(u);
    for (std::size_t r = 0; r < u; ++r) {
        double zf = p.bhf[r] + p.bxf[r];
        double zi = p.bhi[r] + p.bxi[r];
        double zl = p.bhl[r] + p.bxl[r];
        double zo = p.bho[r] + p.bxo[r];
        const std::size_t hrow = r * u;
        for (std::size_t k = 0; k < u; ++k) {
            const double hk = state.h[k];
            zf += p.whf[hrow + k] * hk;
            zi += p.whi[hrow + k] * hk;
            zl += p.whl[hrow + k] * hk;
            zo += p.who[hrow + k] * hk;
        }
        const std::size_t xrow = r * q;
        for (std::size_t a = 0; a < q; ++a) {
            const double xa = md[a];
            zf += p.wxf[xrow + a] * xa;
            zi += p.wxi[xrow + a] * xa;
            zl += p.wxl[xrow + a] * xa;
            zo += p.wxo[xrow + a] * xa;
        }
        f[r] = sigmoid(zf) * state.c[r];
        in_gate[r] = sigmoid(zi) * std::tanh(zl);
        new_c[r] = f[r] + in_gate[r];
        new_h[r] = sigmoid(zo) * std::tanh(new_c[r]);
    }

    state.c = std::move(new_c);
    state.h = std::move(new_h);

    double y = p.bo;
    for (std::size_t r = 0; r < u; ++r) y += p.wo[r] * state.h[r];
    return y;
}

std::vector<double> forward_pass(const LstmParams& p, const std::vector<bool>& mask,
                                 const std::vector<std::vector<double>>& inputs) {
    LstmState state = zero_state(p.u);
    std::vector<double> outputs;
    outputs.reserve(inputs.size());
    for (std::size_t j = 0; j < inputs.size(); ++j) {
        const double y = step(p, mask, inputs[j], state);
        bool finite = std::isfinite(y);
        for (std::size_t r = 0; finite && r < p.u; ++r) {
            finite = std::isfinite(state.c[r]) && std::isfinite(state.h[r]);
        }
        if (!finite) {
            throw NumericError("forward_pass: non-finite value at sample " + std::to_string(j));
        }
        outputs.push_back(y);
    }
    return outputs;
}

double evaluate_objective(const Genome& genome, const data::WindowedDataset& partition,
                          std::size_t hidden_units) {
    if (partition.row_count() == 0) {
        throw UsageError("evaluate_objective: partition is empty");
    }
    const std::size_t q = partition.feature_count();
    if (genome.mask.size() != q) {
        throw DimensionError("evaluate_objective: mask has length " +
                             std::to_string(genome.mask.size()) + ", expected " +
                             std::to_string(q));
    }
    const LstmParams params = convert(genome.weights, q, hidden_units);
    const std::vector<double> predictions = forward_pass(params, genome.mask, partition.rows);

    double sum_sq = 0.0;
    for (std::size_t j = 0; j < predictions.size(); ++j) {
        const double e = predictions[j] - partition.targets[j];
        sum_sq += e * e;
    }
    return std::sqrt(sum_sq / static_cast<double>(predictions.size()));
}

ObjectiveVector evaluate_all(const Genome& genome,
                             const std::vector<data::WindowedDataset>& partitions,
                             std::size_t hidden_units) {
    if (partitions.size() < 2) {
        throw UsageError("evaluate_all: need at least 2 partitions, got " +
                         std::to_string(partitions.size()));
    }
    ObjectiveVector values;
    values.reserve(partitions.size());
    for (const auto& partition : partitions) {
        values.push_back(evaluate_objective(genome, partition, hidden_units));
    }
    return values;
}

}  // namespace evoforecast::lstm
