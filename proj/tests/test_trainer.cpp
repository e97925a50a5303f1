#include <doctest.h>

#include <cmath>

#include "shiftfuzz/scenario_io.hpp"
#include "shiftfuzz/trainer.hpp"

using namespace shiftfuzz;

namespace {

// One worker on duty per slot. Worker A can only work Mon and Tue 8:30-11:30,
// worker B never; the schedule is forced whatever the model says.
Scenario forced_scenario(int a_weekly, int a_shift, int b_weekly, int a_limit = 25) {
    Scenario s;
    s.coverage_required = 1;
    s.workers = {{"A", a_weekly, a_shift, a_limit}, {"B", b_weekly, 3, 25}};
    AvailabilityRow a{}, b{};
    for (std::size_t h = 0; h < 3; ++h) {
        a[h] = 1;
        a[11 + h] = 1;
    }
    s.availability = {a, b};
    return s;
}

// Worker A works every slot of the week.
Scenario always_on(int limit) {
    Scenario s;
    s.coverage_required = 1;
    s.workers = {{"A", 20, 10, limit}};
    AvailabilityRow row{};
    row.fill(1);
    s.availability = {row};
    return s;
}

double brute_rms(const std::vector<double>& v) {
    if (v.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        acc = acc + v[i] * v[i];
    }
    acc = acc / static_cast<double>(v.size());
    return std::sqrt(acc);
}

}  // namespace

TEST_CASE("chromosome layout constants") {
    CHECK(kChromosomeLength == 34);
    CHECK(kRuleCount == 25);
    CHECK(kMfGenes == 9);
}

TEST_CASE("decode uniform rules") {
    Chromosome c;
    c.rules.fill(3);
    c.mf = {0.25, 0.5, 0.75, 1.0, 0.25, 0.25, 0.25, 0.25, 0.25};
    const FisPair pair = decode(c);
    CHECK(pair.weekly.rules == RuleTable(4, 4, 2));
    CHECK(pair.daily.rules == RuleTable(3, 3, 2));
    CHECK(pair.weekly.output == standard_output_partition());
    CHECK(pair.daily.output == pair.weekly.output);
    CHECK_NOTHROW(pair.validate());
}

TEST_CASE("decode sorts peaks and is stable under re-encoding") {
    Chromosome c;
    c.rules.fill(1);
    c.mf = {0.9, 0.1, 0.6, 0.3, 0.1, 0.2, 0.3, 0.4, 0.5};
    const FisPair pair = decode(c);
    for (std::size_t k = 1; k < kOutputLevels; ++k) {
        CHECK(pair.weekly.output.mfs[k - 1].peak <= pair.weekly.output.mfs[k].peak);
    }

    Rng rng(99);
    for (int i = 0; i < 500; ++i) {
        Chromosome r = random_chromosome(rng);
        for (double& g : r.mf) {
            g = rng.uniform(-0.5, 1.5);  // repair brings these back
        }
        const FisPair once = decode(r);
        const FisPair twice = decode(encode(once));
        CHECK(once.weekly.rules == twice.weekly.rules);
        CHECK(once.daily.rules == twice.daily.rules);
        for (std::size_t k = 0; k < kOutputLevels; ++k) {
            const auto& a = once.weekly.output.mfs[k];
            const auto& b = twice.weekly.output.mfs[k];
            CHECK(std::abs(a.left - b.left) <= 1e-12);
            CHECK(a.peak == b.peak);
            CHECK(std::abs(a.right - b.right) <= 1e-12);
        }
        CHECK_NOTHROW(once.validate());
    }
}

TEST_CASE("offspring stay valid") {
    Rng rng(5);
    GaConfig cfg;
    cfg.mf_mutation_sigma = 0.8;
    for (int i = 0; i < 300; ++i) {
        const Chromosome a = random_chromosome(rng);
        const Chromosome b = random_chromosome(rng);
        CHECK(crossover(a, b, rng).valid());
        CHECK(mutate(a, cfg, rng).valid());
    }
    Chromosome broken;
    broken.rules.fill(9);
    broken.mf.fill(std::nan(""));
    broken.repair();
    CHECK(broken.valid());
}

TEST_CASE("rms") {
    const std::vector<double> v{3, 4};
    CHECK(rms(v) == doctest::Approx(std::sqrt(12.5)));
    CHECK(rms(std::vector<double>{0, 0, 0}) == 0.0);
    CHECK(rms(std::vector<double>{}) == 0.0);

    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x(static_cast<std::size_t>(rng.uniform_int(0, 40)));
        for (double& e : x) {
            e = rng.uniform(-30, 30);
        }
        CHECK(std::abs(rms(x) - brute_rms(x)) <= 1e-12);
    }
}

TEST_CASE("deltas") {
    // A prefers 6 hours a week in 3-hour shifts and gets exactly that.
    const Scenario exact = forced_scenario(6, 3, 0);
    Rng rng(1);
    const Schedule s = build_schedule(exact, decode(Chromosome{}), {}, rng);
    const ScenarioDeltas d = deltas(s, exact);
    CHECK(d.shift == std::vector<double>{0, 0});
    CHECK(d.weekly == std::vector<double>{0, 0});
    CHECK(d.excess == std::vector<double>{0, 0});
    CHECK(d.cost() == 0.0);

    const Scenario over = forced_scenario(4, 3, 2);
    const ScenarioDeltas d2 = deltas(build_schedule(over, decode(Chromosome{}), {}, rng), over);
    CHECK(d2.weekly == std::vector<double>{2, -2});
    CHECK(d2.excess == std::vector<double>{0, 0});

    const Scenario heavy = always_on(25);
    const ScenarioDeltas d3 = deltas(build_schedule(heavy, decode(Chromosome{}), {}, rng), heavy);
    CHECK(d3.weekly == std::vector<double>{31});
    CHECK(d3.excess == std::vector<double>{26});
    CHECK(d3.shift == std::vector<double>{1, 1, 1, 1, -3});
}

TEST_CASE("fitness on hand-built scenarios") {
    Rng rng(3);
    const Chromosome c = random_chromosome(rng);
    const std::vector<Scenario> two_off{forced_scenario(4, 3, 2)};
    CHECK(fitness(c, two_off, {}, 1) == 2.0);
    const std::vector<Scenario> perfect{forced_scenario(6, 3, 0)};
    CHECK(fitness(c, perfect, {}, 1) == 0.0);

    ScenarioDeltas four, six;
    four.rms_weekly = 4.0;
    six.rms_shift = 1.0;
    six.rms_weekly = 5.0;
    const std::vector<ScenarioDeltas> both{four, six};
    CHECK(aggregate_cost(both) == 5.0);
}

TEST_CASE("weekly limit violations strictly raise fitness") {
    Rng rng(4);
    const Chromosome c = random_chromosome(rng);
    const std::vector<Scenario> within{always_on(51)};
    const std::vector<Scenario> over{always_on(25)};
    CHECK(fitness(c, over, {}, 1) > fitness(c, within, {}, 1));
}

TEST_CASE("fitness is deterministic") {
    Rng pool_rng(12);
    const AvailabilityPool pool = generate_pool(40, kDefaultDensityLo, kDefaultDensityHi, pool_rng);
    std::vector<Scenario> batch;
    for (int i = 0; i < 3; ++i) {
        Rng r(static_cast<std::uint64_t>(i));
        batch.push_back(generate_scenario(pool, 20, r));
    }
    Rng rng(8);
    const Chromosome c = random_chromosome(rng);
    CHECK(fitness(c, batch, {}, 17) == fitness(c, batch, {}, 17));
}

TEST_CASE("ga config") {
    GaConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.crossover_children() == 152);
    CHECK(cfg.mutation_children() == 38);
    cfg.elite_count = 200;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.crossover_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("rank weights and roulette") {
    const auto w = rank_weights(4);
    CHECK(w[0] > w[1]);
    CHECK(w[1] / w[3] == doctest::Approx(std::sqrt(4.0 / 2.0)));
    std::vector<double> cumulative{w[0], w[0] + w[1], w[0] + w[1] + w[2], 1.0};
    Rng rng(2);
    std::array<int, 4> hits{};
    for (int i = 0; i < 40000; ++i) {
        ++hits[roulette_pick(cumulative, rng)];
    }
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(hits[i] / 40000.0 == doctest::Approx(w[i]).epsilon(0.05));
    }
}

TEST_CASE("evolve honours generation and stall limits") {
    Rng pool_rng(21);
    const AvailabilityPool pool = generate_pool(30, kDefaultDensityLo, kDefaultDensityHi, pool_rng);
    std::vector<Scenario> batch;
    for (int i = 0; i < 2; ++i) {
        Rng r(static_cast<std::uint64_t>(i) + 50);
        batch.push_back(generate_scenario(pool, 20, r));
    }

    GaConfig cfg;
    cfg.population_size = 12;
    cfg.elite_count = 2;
    cfg.max_generations = 1;
    cfg.threads = 1;
    CHECK(evolve(cfg, batch, {}).history.size() == 1);

    cfg.max_generations = 6;
    Rng seed_rng(4);
    const Chromosome anchor = random_chromosome(seed_rng);
    const double anchor_cost = fitness(anchor, batch, {}, training_fitness_seed(cfg.seed));
    const std::vector<Chromosome> seeds{anchor};
    const TrainingResult run = evolve(cfg, batch, {}, seeds);
    REQUIRE(run.history.size() >= 1);
    for (std::size_t g = 0; g < run.history.size(); ++g) {
        CHECK(run.history[g].best <= anchor_cost);
        if (g > 0) {
            CHECK(run.history[g].best <= run.history[g - 1].best);
        }
    }
    CHECK(run.best_fitness == run.history.back().best);

    cfg.threads = 3;
    const TrainingResult threaded = evolve(cfg, batch, {}, seeds);
    CHECK(threaded.best == run.best);
    CHECK(threaded.history == run.history);

    // Every chromosome costs the same on forced scenarios, so nothing improves.
    const std::vector<Scenario> flat{forced_scenario(4, 3, 2)};
    cfg.max_generations = 50;
    cfg.stall_generations = 3;
    const TrainingResult stalled = evolve(cfg, flat, {});
    CHECK(stalled.stalled);
    CHECK(stalled.history.size() == 4);
}
