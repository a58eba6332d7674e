#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "evoforecast/lstm.hpp"
#include "evoforecast/rng.hpp"

namespace evoforecast::data {
struct WindowedDataset;
}

namespace evoforecast::moea {

using lstm::Genome;
using lstm::ObjectiveVector;

struct MoeaConfig {
    std::size_t population_size = 50;   // P, even and > 1
    std::size_t generations = 100;      // G
    double crossover_prob = 1.0;        // p_c, genome-level gate
    double mutation_prob = 1.0;         // p_m, genome-level gate
    std::size_t n_objectives = 2;       // must match the partition count
    std::uint64_t seed = 42;
    double sbx_eta = 15.0;
    double pm_eta = 20.0;
    std::pair<double, double> real_bounds{-5.0, 5.0};

    // Throws UsageError on any violated constraint, before any evaluation.
    void validate() const;
};

struct FrontMember {
    Genome genome;
    ObjectiveVector objectives;
};

// Nondominated set: no member strictly dominates another.
struct ParetoFront {
    std::vector<FrontMember> members;

    std::size_t size() const { return members.size(); }
};

struct MoeaResult {
    ParetoFront front;                    // final population's first front
    std::vector<double> hypervolume_trace;  // one value per generation
};

// A generic problem for the NSGA-II driver: genomes have mask_bits binary
// genes and real_genes weight genes; evaluate must be pure and thread-safe.
struct MoeaProblem {
    std::size_t mask_bits = 0;
    std::size_t real_genes = 0;
    std::function<ObjectiveVector(const Genome&)> evaluate;
};

// True when a is no worse than b in every objective and strictly better
// in at least one (minimization).
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// Fast nondominated sort: front 0 is the nondominated set, front k the
// nondominated set after removing fronts < k. Index lists refer to points.
// Mixed vector lengths are a UsageError.
std::vector<std::vector<std::size_t>> nondominated_sort(
    const std::vector<ObjectiveVector>& points);

// Deb's crowding distance for one front, aligned with the input order.
// Boundary members per objective get +infinity; a degenerate objective
// (max == min) contributes 0.
std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front);

// SBX child pair for one gene given the uniform draw in (0,1). swap_children
// mirrors the conventional post-hoc child swap. Children are clipped to
// [lo, hi].
std::pair<double, double> sbx_children(double x1, double x2, double lo, double hi,
                                       double eta, double u, bool swap_children);

// Bounded polynomial mutation of one gene given the uniform draw in [0,1).
double polynomial_mutation_value(double x, double lo, double hi, double eta, double u);

// With probability p_c: mask children via HUX (exactly half of the
// differing bits swapped, rounding down) and weight children via SBX;
// otherwise the parents are copied.
std::pair<Genome, Genome> crossover(const Genome& parent_a, const Genome& parent_b,
                                    const MoeaConfig& config, Rng& rng);

// With probability p_m: each mask bit flips with probability 1/q and each
// weight gene mutates polynomially with probability 1/z.
Genome mutate(const Genome& genome, const MoeaConfig& config, Rng& rng);

// Exact Lebesgue measure of the union of boxes [point, reference]. Points
// that do not strictly dominate the reference in every coordinate are
// excluded; an empty effective front has measure 0.
double hypervolume(const std::vector<ObjectiveVector>& front,
                   const ObjectiveVector& reference);

// Called after each generation with the archive hypervolume and the
// population's componentwise-best objective values.
using ProgressFn = std::function<void(std::size_t generation, double hypervolume,
                                      const ObjectiveVector& best_per_objective)>;

// NSGA-II: binary tournament selection by rank then crowding distance,
// elitist (mu+lambda) survival by nondominated sorting then crowding
// distance. The hypervolume trace is measured per generation over the
// nondominated archive of every point evaluated so far, against the fixed
// reference (1,...,1); it is therefore nondecreasing.
MoeaResult run_nsga2(const MoeaProblem& problem, const MoeaConfig& config,
                     const ProgressFn& progress = {});

// Binds the driver to LSTM genome evaluation over the training partitions.
MoeaResult run_moea(const std::vector<data::WindowedDataset>& partitions,
                    std::size_t hidden_units, const MoeaConfig& config,
                    const ProgressFn& progress = {});

}  // namespace evoforecast::moea
