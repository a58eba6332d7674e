#include "evoforecast/moea.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "evoforecast/data.hpp"
#include "evoforecast/errors.hpp"
#include "evoforecast/parallel.hpp"

namespace evoforecast::moea {

namespace {

constexpr double kSbxEpsilon = 1e-14;

double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// Keeps only the nondominated members of points, deduplicated.
std::vector<ObjectiveVector> nondominated_subset(const std::vector<ObjectiveVector>& points) {
    std::vector<ObjectiveVector> kept;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool drop = false;
        for (std::size_t j = 0; j < points.size() && !drop; ++j) {
            if (j != i && dominates(points[j], points[i])) drop = true;
        }
        if (!drop && std::find(kept.begin(), kept.end(), points[i]) == kept.end()) {
            kept.push_back(points[i]);
        }
    }
    return kept;
}

// Union measure of boxes [point, ref] by slicing along the last objective.
// Points must strictly dominate ref and be mutually nondominated.
double hv_recursive(std::vector<ObjectiveVector> points, const ObjectiveVector& ref) {
    const std::size_t d = ref.size();
    if (points.empty()) return 0.0;

    if (d == 1) {
        double best = points[0][0];
        for (const auto& p : points) best = std::min(best, p[0]);
        return ref[0] - best;
    }

    if (d == 2) {
        std::sort(points.begin(), points.end());
        double area = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double next_x = (i + 1 < points.size()) ? points[i + 1][0] : ref[0];
            area += (next_x - points[i][0]) * (ref[1] - points[i][1]);
        }
        return area;
    }

    // Slabs between consecutive distinct values of the last objective; the
    // cross-section of each slab is a (d-1)-dimensional hypervolume of the
    // points active below it.
    std::sort(points.begin(), points.end(),
              [d](const ObjectiveVector& a, const ObjectiveVector& b) {
                  return a[d - 1] < b[d - 1];
              });

    double volume = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i + 1 < points.size() && points[i + 1][d - 1] == points[i][d - 1]) continue;
        const double depth =
            ((i + 1 < points.size()) ? points[i + 1][d - 1] : ref[d - 1]) - points[i][d - 1];
        if (depth <= 0.0) continue;

        std::vector<ObjectiveVector> active;
        active.reserve(i + 1);
        for (std::size_t j = 0; j <= i; ++j) {
            active.emplace_back(points[j].begin(), points[j].end() - 1);
        }
        ObjectiveVector sub_ref(ref.begin(), ref.end() - 1);
        volume += depth * hv_recursive(nondominated_subset(active), sub_ref);
    }
    return volume;
}

struct RankedPopulation {
    std::vector<std::size_t> rank;       // per individual
    std::vector<double> crowding;        // per individual, within its front
};

RankedPopulation rank_and_crowd(const std::vector<ObjectiveVector>& objectives) {
    RankedPopulation out;
    out.rank.assign(objectives.size(), 0);
    out.crowding.assign(objectives.size(), 0.0);
    const auto fronts = nondominated_sort(objectives);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        std::vector<ObjectiveVector> front_points;
        front_points.reserve(fronts[f].size());
        for (std::size_t idx : fronts[f]) front_points.push_back(objectives[idx]);
        const std::vector<double> dist = crowding_distance(front_points);
        for (std::size_t k = 0; k < fronts[f].size(); ++k) {
            out.rank[fronts[f][k]] = f;
            out.crowding[fronts[f][k]] = dist[k];
        }
    }
    return out;
}

// Rank first, then crowding; ties keep the first candidate.
std::size_t tournament(const RankedPopulation& ranked, std::size_t a, std::size_t b) {
    if (ranked.rank[a] < ranked.rank[b]) return a;
    if (ranked.rank[b] < ranked.rank[a]) return b;
    if (ranked.crowding[a] > ranked.crowding[b]) return a;
    if (ranked.crowding[b] > ranked.crowding[a]) return b;
    return a;
}

// Archive of the nondominated objective vectors seen so far.
class HypervolumeArchive {
  public:
    void merge(const std::vector<ObjectiveVector>& candidates) {
        for (const auto& c : candidates) {
            bool dominated = false;
            for (const auto& kept : points_) {
                if (kept == c || dominates(kept, c)) {
                    dominated = true;
                    break;
                }
            }
            if (dominated) continue;
            std::erase_if(points_, [&c](const ObjectiveVector& p) { return dominates(c, p); });
            points_.push_back(c);
        }
    }

    double volume(const ObjectiveVector& ref) const { return hypervolume(points_, ref); }

  private:
    std::vector<ObjectiveVector> points_;
};

}  // namespace

void MoeaConfig::validate() const {
    if (population_size < 2) {
        throw UsageError("moea config: population_size must be > 1");
    }
    if (population_size % 2 != 0) {
        throw UsageError("moea config: population_size must be even");
    }
    if (generations < 1) {
        throw UsageError("moea config: generations must be >= 1");
    }
    if (crossover_prob < 0.0 || crossover_prob > 1.0) {
        throw UsageError("moea config: crossover_prob must be in [0, 1]");
    }
    if (mutation_prob < 0.0 || mutation_prob > 1.0) {
        throw UsageError("moea config: mutation_prob must be in [0, 1]");
    }
    if (n_objectives < 2) {
        throw UsageError("moea config: n_objectives must be >= 2");
    }
    if (!(sbx_eta > 0.0) || !(pm_eta > 0.0)) {
        throw UsageError("moea config: operator etas must be positive");
    }
    if (!(real_bounds.first < real_bounds.second)) {
        throw UsageError("moea config: real_bounds must satisfy low < high");
    }
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly_better = true;
    }
    return strictly_better;
}

std::vector<std::vector<std::size_t>> nondominated_sort(
    const std::vector<ObjectiveVector>& points) {
    const std::size_t n = points.size();
    for (const auto& p : points) {
        if (p.size() != points[0].size()) {
            throw UsageError("nondominated_sort: mixed objective-vector lengths");
        }
    }

    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts;

    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dominates(points[p], points[q])) {
                dominated_by[p].push_back(q);
            } else if (dominates(points[q], points[p])) {
                ++domination_count[p];
            }
        }
        if (domination_count[p] == 0) current.push_back(p);
    }

    while (!current.empty()) {
        fronts.push_back(current);
        std::vector<std::size_t> next;
        for (std::size_t p : fronts.back()) {
            for (std::size_t q : dominated_by[p]) {
                if (--domination_count[q] == 0) next.push_back(q);
            }
        }
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front) {
    const std::size_t n = front.size();
    if (n == 0) {
        throw UsageError("crowding_distance: empty front");
    }
    const std::size_t n_obj = front[0].size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, 0.0);

    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < n_obj; ++m) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&front, m](std::size_t a, std::size_t b) {
            if (front[a][m] != front[b][m]) return front[a][m] < front[b][m];
            return a < b;
        });
        const double range = front[order.back()][m] - front[order.front()][m];
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        if (range == 0.0) continue;
        for (std::size_t k = 1; k + 1 < n; ++k) {
            dist[order[k]] += (front[order[k + 1]][m] - front[order[k - 1]][m]) / range;
        }
    }
    return dist;
}

std::pair<double, double> sbx_children(double x1, double x2, double lo, double hi,
                                       double eta, double u, bool swap_children) {
    if (std::abs(x1 - x2) <= kSbxEpsilon) return {x1, x2};

    const double y1 = std::min(x1, x2);
    const double y2 = std::max(x1, x2);
    const double exponent = 1.0 / (eta + 1.0);

    auto spread = [&](double beta) {
        const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
        if (u <= 1.0 / alpha) return std::pow(u * alpha, exponent);
        return std::pow(1.0 / (2.0 - u * alpha), exponent);
    };

    const double beta_lo = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
    const double beta_hi = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
    double c1 = 0.5 * ((y1 + y2) - spread(beta_lo) * (y2 - y1));
    double c2 = 0.5 * ((y1 + y2) + spread(beta_hi) * (y2 - y1));
    c1 = clip(c1, lo, hi);
    c2 = clip(c2, lo, hi);
    if (swap_children) std::swap(c1, c2);
    return {c1, c2};
}

double polynomial_mutation_value(double x, double lo, double hi, double eta, double u) {
    const double range = hi - lo;
    const double exponent = 1.0 / (eta + 1.0);
    double delta;
    if (u < 0.5) {
        const double away = 1.0 - (x - lo) / range;
        const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(away, eta + 1.0);
        delta = std::pow(val, exponent) - 1.0;
    } else {
        const double away = 1.0 - (hi - x) / range;
        const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(away, eta + 1.0);
        delta = 1.0 - std::pow(val, exponent);
    }
    return clip(x + delta * range, lo, hi);
}

std::pair<Genome, Genome> crossover(const Genome& parent_a, const Genome& parent_b,
                                    const MoeaConfig& config, Rng& rng) {
    if (parent_a.mask.size() != parent_b.mask.size() ||
        parent_a.weights.size() != parent_b.weights.size()) {
        throw DimensionError("crossover: parents have incompatible dimensions");
    }

    Genome child_a = parent_a;
    Genome child_b = parent_b;
    if (!rng.bernoulli(config.crossover_prob)) return {child_a, child_b};

    // HUX on the mask: swap exactly floor(differing/2) of the differing bits.
    std::vector<std::size_t> differing;
    for (std::size_t i = 0; i < child_a.mask.size(); ++i) {
        if (child_a.mask[i] != child_b.mask[i]) differing.push_back(i);
    }
    const std::size_t swaps = differing.size() / 2;
    for (std::size_t k = 0; k < swaps; ++k) {
        const std::size_t pick = k + rng.uniform_index(differing.size() - k);
        std::swap(differing[k], differing[pick]);
        const std::size_t bit = differing[k];
        const bool tmp = child_a.mask[bit];
        child_a.mask[bit] = child_b.mask[bit];
        child_b.mask[bit] = tmp;
    }

    // SBX on the weights, applied per gene with probability 0.5.
    const auto [lo, hi] = config.real_bounds;
    for (std::size_t i = 0; i < child_a.weights.size(); ++i) {
        if (!rng.bernoulli(0.5)) continue;
        const double u = rng.uniform01();
        const bool swap_children = rng.bernoulli(0.5);
        const auto [c1, c2] =
            sbx_children(child_a.weights[i], child_b.weights[i], lo, hi, config.sbx_eta, u,
                         swap_children);
        child_a.weights[i] = c1;
        child_b.weights[i] = c2;
    }
    return {child_a, child_b};
}

Genome mutate(const Genome& genome, const MoeaConfig& config, Rng& rng) {
    Genome out = genome;
    if (!rng.bernoulli(config.mutation_prob)) return out;

    const double bit_rate = out.mask.empty() ? 0.0 : 1.0 / static_cast<double>(out.mask.size());
    for (std::size_t i = 0; i < out.mask.size(); ++i) {
        if (rng.bernoulli(bit_rate)) out.mask[i] = !out.mask[i];
    }

    const double gene_rate =
        out.weights.empty() ? 0.0 : 1.0 / static_cast<double>(out.weights.size());
    const auto [lo, hi] = config.real_bounds;
    for (std::size_t i = 0; i < out.weights.size(); ++i) {
        if (!rng.bernoulli(gene_rate)) continue;
        const double u = rng.uniform01();
        out.weights[i] = polynomial_mutation_value(out.weights[i], lo, hi, config.pm_eta, u);
    }
    return out;
}

double hypervolume(const std::vector<ObjectiveVector>& front, const ObjectiveVector& reference) {
    std::vector<ObjectiveVector> inside;
    for (const auto& p : front) {
        if (p.size() != reference.size()) {
            throw UsageError("hypervolume: point dimension does not match reference");
        }
        bool strict = true;
        for (std::size_t i = 0; i < p.size() && strict; ++i) {
            if (!(p[i] < reference[i])) strict = false;
        }
        if (strict) inside.push_back(p);
    }
    if (inside.empty()) return 0.0;
    return hv_recursive(nondominated_subset(inside), reference);
}

MoeaResult run_nsga2(const MoeaProblem& problem, const MoeaConfig& config,
                     const ProgressFn& progress) {
    config.validate();
    if (!problem.evaluate) {
        throw UsageError("run_nsga2: problem has no evaluate function");
    }

    const std::size_t pop_size = config.population_size;
    Rng rng(config.seed);

    const auto [lo, hi] = config.real_bounds;
    std::vector<Genome> population(pop_size);
    for (auto& genome : population) {
        genome.mask.resize(problem.mask_bits);
        for (std::size_t i = 0; i < problem.mask_bits; ++i) genome.mask[i] = rng.bernoulli(0.5);
        genome.weights.resize(problem.real_genes);
        for (auto& w : genome.weights) w = rng.uniform(lo, hi);
    }

    auto evaluate_batch = [&problem](const std::vector<Genome>& genomes) {
        std::vector<ObjectiveVector> objectives(genomes.size());
        parallel_for(genomes.size(),
                     [&](std::size_t i) { objectives[i] = problem.evaluate(genomes[i]); });
        return objectives;
    };

    std::vector<ObjectiveVector> objectives = evaluate_batch(population);
    for (const auto& v : objectives) {
        if (v.size() != config.n_objectives) {
            throw UsageError("run_nsga2: evaluate returned " + std::to_string(v.size()) +
                             " objectives, config says " + std::to_string(config.n_objectives));
        }
    }

    const ObjectiveVector reference(config.n_objectives, 1.0);
    HypervolumeArchive archive;
    MoeaResult result;
    result.hypervolume_trace.reserve(config.generations);

    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        const RankedPopulation ranked = rank_and_crowd(objectives);

        std::vector<Genome> offspring;
        offspring.reserve(pop_size);
        while (offspring.size() < pop_size) {
            const std::size_t a = tournament(ranked, rng.uniform_index(pop_size),
                                             rng.uniform_index(pop_size));
            const std::size_t b = tournament(ranked, rng.uniform_index(pop_size),
                                             rng.uniform_index(pop_size));
            auto [child_a, child_b] = crossover(population[a], population[b], config, rng);
            offspring.push_back(mutate(child_a, config, rng));
            offspring.push_back(mutate(child_b, config, rng));
        }

        std::vector<ObjectiveVector> offspring_objectives = evaluate_batch(offspring);

        // mu+lambda pool
        std::vector<Genome> pool = std::move(population);
        pool.insert(pool.end(), std::make_move_iterator(offspring.begin()),
                    std::make_move_iterator(offspring.end()));
        std::vector<ObjectiveVector> pool_objectives = std::move(objectives);
        pool_objectives.insert(pool_objectives.end(), offspring_objectives.begin(),
                               offspring_objectives.end());

        const auto fronts = nondominated_sort(pool_objectives);

        std::vector<std::size_t> survivors;
        survivors.reserve(pop_size);
        for (const auto& front : fronts) {
            if (survivors.size() + front.size() <= pop_size) {
                survivors.insert(survivors.end(), front.begin(), front.end());
                if (survivors.size() == pop_size) break;
                continue;
            }
            std::vector<ObjectiveVector> front_points;
            front_points.reserve(front.size());
            for (std::size_t idx : front) front_points.push_back(pool_objectives[idx]);
            const std::vector<double> dist = crowding_distance(front_points);
            std::vector<std::size_t> order(front.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&dist](std::size_t x, std::size_t y) {
                if (dist[x] != dist[y]) return dist[x] > dist[y];
                return x < y;
            });
            for (std::size_t k = 0; survivors.size() < pop_size; ++k) {
                survivors.push_back(front[order[k]]);
            }
            break;
        }

        population.clear();
        population.reserve(pop_size);
        objectives.clear();
        objectives.reserve(pop_size);
        for (std::size_t idx : survivors) {
            population.push_back(pool[idx]);
            objectives.push_back(pool_objectives[idx]);
        }

        std::vector<ObjectiveVector> pool_front;
        pool_front.reserve(fronts[0].size());
        for (std::size_t idx : fronts[0]) pool_front.push_back(pool_objectives[idx]);
        archive.merge(pool_front);
        result.hypervolume_trace.push_back(archive.volume(reference));

        if (progress) {
            ObjectiveVector best = objectives[0];
            for (const auto& v : objectives) {
                for (std::size_t k = 0; k < best.size(); ++k) best[k] = std::min(best[k], v[k]);
            }
            progress(gen + 1, result.hypervolume_trace.back(), best);
        }
    }

    const auto final_fronts = nondominated_sort(objectives);
    for (std::size_t idx : final_fronts[0]) {
        result.front.members.push_back(FrontMember{population[idx], objectives[idx]});
    }
    return result;
}

MoeaResult run_moea(const std::vector<data::WindowedDataset>& partitions,
                    std::size_t hidden_units, const MoeaConfig& config,
                    const ProgressFn& progress) {
    config.validate();
    if (partitions.size() != config.n_objectives) {
        throw UsageError("run_moea: config has n_objectives=" +
                         std::to_string(config.n_objectives) + " but " +
                         std::to_string(partitions.size()) + " partitions were given");
    }
    if (hidden_units == 0) {
        throw UsageError("run_moea: hidden_units must be >= 1");
    }
    for (const auto& partition : partitions) {
        if (partition.row_count() == 0) {
            throw UsageError("run_moea: empty training partition");
        }
        if (partition.feature_count() != partitions[0].feature_count()) {
            throw UsageError("run_moea: partitions disagree on feature count");
        }
    }

    const std::size_t q = partitions[0].feature_count();
    MoeaProblem problem;
    problem.mask_bits = q;
    problem.real_genes = lstm::weight_count(q, hidden_units);
    problem.evaluate = [&partitions, hidden_units](const Genome& genome) {
        return lstm::evaluate_all(genome, partitions, hidden_units);
    };
    return run_nsga2(problem, config, progress);
}

}  // namespace evoforecast::moea
