#pragma once

#include <cstddef>
#include <vector>

namespace evoforecast::data {
struct WindowedDataset;
}

namespace evoforecast::lstm {

// One MOEA individual: a binary feature mask over the q input attributes
// plus the flat vector of LSTM weights and biases.
struct Genome {
    std::vector<bool> mask;        // q bits, true = attribute selected
    std::vector<double> weights;   // z reals, layout as decoded by convert()
};

// RMSE per training partition, one entry per objective.
using ObjectiveVector = std::vector<double>;

// The 18 named weight/bias blocks of a single-hidden-layer LSTM with a
// scalar output head. Matrices are row-major.
struct LstmParams {
    std::size_t q = 0;  // input attributes
    std::size_t u = 0;  // hidden units

    std::vector<double> wxi, wxf, wxl, wxo;  // event weights, u x q
    std::vector<double> bxi, bxf, bxl, bxo;  // event biases, length u
    std::vector<double> whi, whf, whl, who;  // hidden-state weights, u x u
    std::vector<double> bhi, bhf, bhl, bho;  // hidden-state biases, length u
    std::vector<double> wo;                  // output-layer weights, length u
    double bo = 0.0;                         // output-layer bias
};

// Recurrent state, carried across samples within one sequence.
struct LstmState {
    std::vector<double> h;  // hidden state, length u
    std::vector<double> c;  // cell state, length u
};

// Flat weight-vector length for a (q, u) architecture:
// 4*(q*u + u^2 + 2u) + u + 1.
std::size_t weight_count(std::size_t q, std::size_t u);

// Decodes a flat weight vector into the named blocks by consecutive
// extraction: wxi, wxf, wxl, wxo, bxi, bxf, bxl, bxo, whi, whf, whl, who,
// bhi, bhf, bhl, bho, wo, bo. Each matrix is filled row-major from its
// slice. Throws DimensionError when weights.size() != weight_count(q, u).
LstmParams convert(const std::vector<double>& weights, std::size_t q, std::size_t u);

// Inverse of convert(): reproduces the source weight vector exactly.
std::vector<double> flatten(const LstmParams& params);

LstmState zero_state(std::size_t u);

// Advances the recurrent state by one sample and returns the model output.
// A false mask bit zeroes that input attribute before every event-weight
// product. Gate order and arithmetic:
//   f = sigmoid(whf*h + bhf + wxf*(mask.d) + bxf) .* c
//   i = sigmoid(whi*h + bhi + wxi*(mask.d) + bxi)
//       .* tanh(whl*h + bhl + wxl*(mask.d) + bxl)
//   c = f + i
//   h = sigmoid(who*h + bho + wxo*(mask.d) + bxo) .* tanh(c)
//   y = wo.h + bo
// The forget product folds in the previous cell state and the new cell
// state is the plain sum f + i; this is the model this project evolves,
// not the textbook LSTM cell.
double step(const LstmParams& params, const std::vector<bool>& mask,
            const std::vector<double>& input, LstmState& state);

// Runs the full sequence from a zero state; state carries across samples,
// no reset mid-sequence. inputs is row-major l x q. Throws NumericError
// naming the sample index if a non-finite value appears.
std::vector<double> forward_pass(const LstmParams& params, const std::vector<bool>& mask,
                                 const std::vector<std::vector<double>>& inputs);

// RMSE of the genome's forward pass against the partition's targets.
double evaluate_objective(const Genome& genome, const data::WindowedDataset& partition,
                          std::size_t hidden_units);

// One RMSE per partition; hidden/cell state resets between partitions.
ObjectiveVector evaluate_all(const Genome& genome,
                             const std::vector<data::WindowedDataset>& partitions,
                             std::size_t hidden_units);

}  // namespace evoforecast::lstm
