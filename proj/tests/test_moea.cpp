#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <vector>

#include "doctest.h"

#include "evoforecast/errors.hpp"
#include "evoforecast/moea.hpp"
#include "evoforecast/rng.hpp"
#include "support/oracles.hpp"

using namespace evoforecast;
using moea::Genome;
using moea::MoeaConfig;
using moea::ObjectiveVector;

namespace {

std::vector<ObjectiveVector> random_points(std::size_t count, std::size_t n_obj, Rng& rng) {
    std::vector<ObjectiveVector> points(count);
    for (auto& p : points) {
        p.resize(n_obj);
        for (auto& v : p) v = rng.uniform01();
    }
    return points;
}

std::set<std::set<std::size_t>> as_sets(const std::vector<std::vector<std::size_t>>& fronts) {
    std::set<std::set<std::size_t>> out;
    for (const auto& f : fronts) out.insert(std::set<std::size_t>(f.begin(), f.end()));
    return out;
}

MoeaConfig small_config() {
    MoeaConfig config;
    config.population_size = 8;
    config.generations = 5;
    config.n_objectives = 2;
    config.seed = 99;
    config.real_bounds = {0.0, 1.0};
    return config;
}

}  // namespace

TEST_CASE("nondominated_sort worked example") {
    const std::vector<ObjectiveVector> points{{1, 2}, {2, 1}, {3, 3}};
    const auto fronts = moea::nondominated_sort(points);
    REQUIRE(fronts.size() == 2);
    CHECK(fronts[0] == std::vector<std::size_t>{0, 1});
    CHECK(fronts[1] == std::vector<std::size_t>{2});
}

TEST_CASE("identical points share one front") {
    const std::vector<ObjectiveVector> points{{1, 1}, {1, 1}, {1, 1}};
    const auto fronts = moea::nondominated_sort(points);
    REQUIRE(fronts.size() == 1);
    CHECK(fronts[0].size() == 3);
}

TEST_CASE("nondominated_sort rejects mixed lengths") {
    CHECK_THROWS_AS(moea::nondominated_sort({{1, 2}, {1, 2, 3}}), UsageError);
}

TEST_CASE("nondominated_sort matches the brute-force oracle") {
    Rng rng(41);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t count = 1 + rng.uniform_index(20);
        const std::size_t n_obj = 2 + rng.uniform_index(4);  // up to 5
        const auto points = random_points(count, n_obj, rng);
        CHECK(as_sets(moea::nondominated_sort(points)) ==
              as_sets(oracle::brute_force_sort(points)));
    }
}

TEST_CASE("crowding distance boundary and worked example") {
    const double inf = std::numeric_limits<double>::infinity();

    SUBCASE("two-point front is all infinite") {
        const auto d = moea::crowding_distance({{0, 1}, {1, 0}});
        CHECK(d == std::vector<double>{inf, inf});
    }

    SUBCASE("middle of a three-point line") {
        const auto d = moea::crowding_distance({{0, 1}, {0.5, 0.5}, {1, 0}});
        CHECK(d[0] == inf);
        CHECK(d[2] == inf);
        CHECK(d[1] == doctest::Approx(2.0).epsilon(1e-12));
    }

    SUBCASE("degenerate objective contributes zero") {
        const auto d = moea::crowding_distance({{0, 5}, {0.5, 5}, {1, 5}});
        CHECK(d[1] == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("empty front is a usage error") {
        CHECK_THROWS_AS(moea::crowding_distance({}), UsageError);
    }
}

TEST_CASE("crowding distance matches the reference procedure") {
    Rng rng(43);
    for (int iter = 0; iter < 50; ++iter) {
        const std::size_t count = 3 + rng.uniform_index(8);
        const auto points = random_points(count, 2 + rng.uniform_index(3), rng);
        const auto got = moea::crowding_distance(points);
        const auto expected = oracle::crowding_reference(points);
        for (std::size_t i = 0; i < count; ++i) {
            if (std::isinf(expected[i])) {
                CHECK(std::isinf(got[i]));
            } else {
                CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("SBX kernel matches the formula oracle") {
    Rng rng(47);
    for (int iter = 0; iter < 100; ++iter) {
        const double u = rng.uniform01();
        const auto [g1, g2] = moea::sbx_children(0.2, 0.8, 0.0, 1.0, 15.0, u, false);
        const auto [e1, e2] = oracle::sbx_reference(0.2, 0.8, 0.0, 1.0, 15.0, u);
        CHECK(g1 == doctest::Approx(e1).epsilon(1e-12));
        CHECK(g2 == doctest::Approx(e2).epsilon(1e-12));
    }
}

TEST_CASE("polynomial mutation kernel matches the formula oracle") {
    Rng rng(53);
    for (int iter = 0; iter < 100; ++iter) {
        const double u = rng.uniform01();
        const double x = rng.uniform01();
        CHECK(moea::polynomial_mutation_value(x, 0.0, 1.0, 20.0, u) ==
              doctest::Approx(oracle::polynomial_mutation_reference(x, 0.0, 1.0, 20.0, u))
                  .epsilon(1e-12));
    }
}

TEST_CASE("crossover copies identical parents regardless of p_c") {
    MoeaConfig config = small_config();
    config.crossover_prob = 1.0;
    Rng rng(59);
    Genome parent;
    parent.mask = {true, false, true};
    parent.weights = {0.25, 0.75};
    const auto [a, b] = moea::crossover(parent, parent, config, rng);
    CHECK(a.mask == parent.mask);
    CHECK(b.mask == parent.mask);
    CHECK(a.weights == parent.weights);
    CHECK(b.weights == parent.weights);
}

TEST_CASE("HUX swaps exactly half of the differing bits") {
    MoeaConfig config = small_config();
    config.crossover_prob = 1.0;
    Genome zeros;
    zeros.mask = {false, false, false, false};
    Genome ones;
    ones.mask = {true, true, true, true};

    Rng rng(61);
    for (int iter = 0; iter < 20; ++iter) {
        const auto [a, b] = moea::crossover(zeros, ones, config, rng);
        std::size_t diff_a = 0;
        std::size_t diff_b = 0;
        for (std::size_t i = 0; i < 4; ++i) {
            if (a.mask[i] != zeros.mask[i]) ++diff_a;
            if (b.mask[i] != ones.mask[i]) ++diff_b;
        }
        CHECK(diff_a == 2);
        CHECK(diff_b == 2);
    }
}

TEST_CASE("crossover draw order is reproducible against a scripted oracle") {
    // One weight gene, no mask: replay the operator's RNG consumption and
    // recompute the SBX children with the independent formula.
    MoeaConfig config = small_config();
    config.crossover_prob = 1.0;
    config.sbx_eta = 15.0;
    config.real_bounds = {0.0, 1.0};

    Genome pa;
    pa.weights = {0.2};
    Genome pb;
    pb.weights = {0.8};

    Rng rng(67);
    const auto [ca, cb] = moea::crossover(pa, pb, config, rng);

    Rng replay(67);
    REQUIRE(replay.bernoulli(config.crossover_prob));  // genome gate
    double e1 = 0.2;
    double e2 = 0.8;
    if (replay.bernoulli(0.5)) {  // per-gene gate
        const double u = replay.uniform01();
        const bool swap_children = replay.bernoulli(0.5);
        auto pair = oracle::sbx_reference(0.2, 0.8, 0.0, 1.0, 15.0, u);
        e1 = pair.first;
        e2 = pair.second;
        if (swap_children) std::swap(e1, e2);
    }
    CHECK(ca.weights[0] == doctest::Approx(e1).epsilon(1e-12));
    CHECK(cb.weights[0] == doctest::Approx(e2).epsilon(1e-12));
}

TEST_CASE("mutation gates") {
    MoeaConfig config = small_config();
    Genome genome;
    genome.mask = {true};
    genome.weights = {0.5};

    SUBCASE("p_m = 0 leaves the genome unchanged") {
        config.mutation_prob = 0.0;
        Rng rng(71);
        const Genome out = moea::mutate(genome, config, rng);
        CHECK(out.mask == genome.mask);
        CHECK(out.weights == genome.weights);
    }

    SUBCASE("q = 1 with p_m = 1 always flips the bit") {
        config.mutation_prob = 1.0;
        Rng rng(73);
        for (int iter = 0; iter < 10; ++iter) {
            const Genome out = moea::mutate(genome, config, rng);
            CHECK(out.mask[0] == false);
        }
    }
}

TEST_CASE("hypervolume worked examples") {
    SUBCASE("single box") {
        CHECK(moea::hypervolume({{0.5, 0.5}}, {1, 1}) == doctest::Approx(0.25).epsilon(1e-12));
    }

    SUBCASE("three-point staircase") {
        const std::vector<ObjectiveVector> front{{0.2, 0.8}, {0.5, 0.5}, {0.8, 0.2}};
        CHECK(moea::hypervolume(front, {1, 1}) == doctest::Approx(0.37).epsilon(1e-12));
    }

    SUBCASE("duplicates do not change the measure") {
        const std::vector<ObjectiveVector> front{{0.2, 0.8}, {0.5, 0.5}, {0.8, 0.2}};
        std::vector<ObjectiveVector> doubled = front;
        doubled.insert(doubled.end(), front.begin(), front.end());
        CHECK(moea::hypervolume(doubled, {1, 1}) ==
              doctest::Approx(moea::hypervolume(front, {1, 1})).epsilon(1e-12));
    }

    SUBCASE("points outside the reference are excluded") {
        CHECK(moea::hypervolume({{1.5, 0.2}}, {1, 1}) == 0.0);
        CHECK(moea::hypervolume({{1.0, 0.2}}, {1, 1}) == 0.0);  // not strictly inside
        CHECK(moea::hypervolume({}, {1, 1}) == 0.0);
        CHECK(moea::hypervolume({{1.5, 0.2}, {0.5, 0.5}}, {1, 1}) ==
              doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("hypervolume agrees with the Monte-Carlo oracle in 3 and 5 objectives") {
    Rng rng(79);
    for (std::size_t n_obj : {3u, 5u}) {
        const auto cloud = random_points(15, n_obj, rng);
        std::vector<ObjectiveVector> front;
        for (const auto& p : cloud) {
            bool dominated = false;
            for (const auto& q : cloud) {
                if (&p != &q && oracle::dominates(q, p)) dominated = true;
            }
            if (!dominated) front.push_back(p);
        }
        const ObjectiveVector ref(n_obj, 1.0);
        const double exact = moea::hypervolume(front, ref);
        const auto mc = oracle::mc_hypervolume(front, ref, 1000000, 1234);
        CHECK(std::abs(exact - mc.value) <= 4.0 * mc.sigma + 1e-9);
    }
}

TEST_CASE("hypervolume is monotone under adding and removing points") {
    Rng rng(83);
    for (int iter = 0; iter < 20; ++iter) {
        auto front = random_points(6, 3, rng);
        const ObjectiveVector ref(3, 1.0);
        const double base = moea::hypervolume(front, ref);

        auto extended = front;
        extended.push_back(random_points(1, 3, rng)[0]);
        CHECK(moea::hypervolume(extended, ref) >= base - 1e-12);

        auto reduced = front;
        reduced.pop_back();
        CHECK(moea::hypervolume(reduced, ref) <= base + 1e-12);
    }
}

TEST_CASE("config validation rejects bad settings before evaluation") {
    MoeaConfig config = small_config();
    config.population_size = 7;
    CHECK_THROWS_AS(config.validate(), UsageError);
    config.population_size = 1;
    CHECK_THROWS_AS(config.validate(), UsageError);
    config = small_config();
    config.crossover_prob = 1.5;
    CHECK_THROWS_AS(config.validate(), UsageError);
    config = small_config();
    config.real_bounds = {1.0, 1.0};
    CHECK_THROWS_AS(config.validate(), UsageError);
    config = small_config();
    config.n_objectives = 1;
    CHECK_THROWS_AS(config.validate(), UsageError);

    moea::MoeaProblem problem;
    config = small_config();
    CHECK_THROWS_AS(moea::run_nsga2(problem, config), UsageError);
}

TEST_CASE("single generation returns the nondominated subset of the pool") {
    // Perfectly correlated objectives: the pool's nondominated set is the
    // argmin alone (ties aside), so it must survive into the final front.
    std::mutex log_mutex;
    std::vector<ObjectiveVector> evaluated;

    moea::MoeaProblem problem;
    problem.mask_bits = 0;
    problem.real_genes = 1;
    problem.evaluate = [&](const Genome& g) {
        const double v = std::abs(g.weights[0] - 0.3);
        ObjectiveVector out{v, v + 0.1};
        std::lock_guard<std::mutex> lock(log_mutex);
        evaluated.push_back(out);
        return out;
    };

    MoeaConfig config = small_config();
    config.population_size = 4;
    config.generations = 1;

    const auto result = moea::run_nsga2(problem, config);
    const auto pool_fronts = oracle::brute_force_sort(evaluated);

    std::multiset<std::vector<double>> expected;
    for (std::size_t idx : pool_fronts[0]) expected.insert(evaluated[idx]);
    std::multiset<std::vector<double>> got;
    for (const auto& member : result.front.members) got.insert(member.objectives);
    CHECK(got == expected);
    CHECK(evaluated.size() == 8);  // P initial + P offspring
}

TEST_CASE("fixed seed reproduces fronts and traces bitwise") {
    moea::MoeaProblem problem;
    problem.mask_bits = 3;
    problem.real_genes = 4;
    problem.evaluate = [](const Genome& g) {
        double a = 0.0;
        double b = 0.0;
        for (std::size_t i = 0; i < g.weights.size(); ++i) {
            a += (g.weights[i] - 0.2) * (g.weights[i] - 0.2);
            b += (g.weights[i] - 0.8) * (g.weights[i] - 0.8);
        }
        for (std::size_t i = 0; i < g.mask.size(); ++i) {
            if (g.mask[i]) b += 0.01;
        }
        return ObjectiveVector{a, b};
    };

    MoeaConfig config = small_config();
    config.generations = 10;

    const auto r1 = moea::run_nsga2(problem, config);
    const auto r2 = moea::run_nsga2(problem, config);
    CHECK(r1.hypervolume_trace == r2.hypervolume_trace);
    REQUIRE(r1.front.size() == r2.front.size());
    for (std::size_t i = 0; i < r1.front.size(); ++i) {
        CHECK(r1.front.members[i].objectives == r2.front.members[i].objectives);
        CHECK(r1.front.members[i].genome.weights == r2.front.members[i].genome.weights);
        CHECK(r1.front.members[i].genome.mask == r2.front.members[i].genome.mask);
    }
}

TEST_CASE("run-level invariants: elitism, trace monotonicity, front validity") {
    moea::MoeaProblem problem;
    problem.mask_bits = 2;
    problem.real_genes = 3;
    problem.evaluate = [](const Genome& g) {
        // Two conflicting bowls plus a mask penalty; values stay in (0, 1)
        // for fronts that can dominate the (1, 1) reference.
        double a = 0.0;
        double b = 0.0;
        for (double w : g.weights) {
            a += (w - 0.25) * (w - 0.25);
            b += (w - 0.75) * (w - 0.75);
        }
        a = a / (1.0 + a);
        b = b / (1.0 + b);
        return ObjectiveVector{a, b};
    };

    MoeaConfig config = small_config();
    config.population_size = 12;
    config.generations = 30;

    std::vector<ObjectiveVector> best_history;
    const auto result = moea::run_nsga2(problem, config,
                                        [&](std::size_t, double, const ObjectiveVector& best) {
                                            best_history.push_back(best);
                                        });

    REQUIRE(best_history.size() == 30);
    for (std::size_t g = 1; g < best_history.size(); ++g) {
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(best_history[g][k] <= best_history[g - 1][k]);
        }
    }

    REQUIRE(result.hypervolume_trace.size() == 30);
    for (std::size_t g = 1; g < result.hypervolume_trace.size(); ++g) {
        CHECK(result.hypervolume_trace[g] >= result.hypervolume_trace[g - 1] - 1e-12);
    }

    REQUIRE(result.front.size() >= 1);
    for (const auto& a : result.front.members) {
        for (const auto& b : result.front.members) {
            CHECK_FALSE(moea::dominates(a.objectives, b.objectives));
        }
    }
}
