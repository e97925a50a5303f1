#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "shiftfuzz/assignment.hpp"
#include "shiftfuzz/fuzzy.hpp"
#include "shiftfuzz/rng.hpp"
#include "shiftfuzz/scenario.hpp"

namespace shiftfuzz {

// Output-MF genes: peaks of Low..Very High (Very Low sits at 0), then the
// half-widths of Very Low..Very High.
inline constexpr std::size_t kPeakGenes = kOutputLevels - 1;
inline constexpr std::size_t kMfGenes = kPeakGenes + kOutputLevels;
inline constexpr std::size_t kChromosomeLength = kRuleCount + kMfGenes;
inline constexpr double kMinHalfWidth = 0.02;

static_assert(kMfGenes == 9);
static_assert(kChromosomeLength == 34);

struct Chromosome {
    /// 1-based output levels; weekly table row-major first, then daily.
    std::array<int, kRuleCount> rules{};
    std::array<double, kMfGenes> mf{};

    /// Clamps every gene into its legal range.
    void repair();
    bool valid() const;
    bool operator==(const Chromosome&) const = default;
};

FisPair decode(const Chromosome& c);
/// Inverse of decode for pairs built on the default input partitions; the
/// result decodes back to the same pair.
Chromosome encode(const FisPair& pair);

Chromosome random_chromosome(Rng& rng);

struct ScenarioDeltas {
    std::vector<double> shift;   // assigned day minus preferred shift length, worked days only
    std::vector<double> weekly;  // assigned week minus preferred weekly hours
    std::vector<double> excess;  // hours above the weekly limit, else 0
    double rms_shift = 0.0;
    double rms_weekly = 0.0;
    double rms_excess = 0.0;

    double cost() const { return rms_shift + rms_weekly + rms_excess; }
};

/// Root mean square; 0 for an empty list.
double rms(std::span<const double> values);

ScenarioDeltas deltas(const Schedule& schedule, const Scenario& scenario);

/// RMS(shift) + RMS(weekly) + RMS(excess) of a single schedule.
double schedule_cost(const Schedule& schedule, const Scenario& scenario);

struct FitnessReport {
    std::vector<ScenarioDeltas> scenarios;
    double cost = 0.0;
};

/// Mean per-scenario cost.
double aggregate_cost(std::span<const ScenarioDeltas> scenarios);

/// Tie-breaking stream for scenario `index` of a fitness evaluation.
std::uint64_t scenario_stream_seed(std::uint64_t base_seed, std::size_t index);

FitnessReport evaluate(const Chromosome& c, std::span<const Scenario> scenarios,
                       const ScheduleOptions& options, std::uint64_t seed);
double fitness(const Chromosome& c, std::span<const Scenario> scenarios,
               const ScheduleOptions& options, std::uint64_t seed);

struct GaConfig {
    std::size_t population_size = 200;
    std::size_t max_generations = 50;
    std::size_t stall_generations = 10;
    std::size_t elite_count = 10;
    double crossover_fraction = 0.8;
    std::size_t n_scenarios = 30;
    double rule_mutation_rate = 0.1;
    double mf_mutation_sigma = 0.1;
    std::uint64_t seed = 1;
    /// 0 picks std::thread::hardware_concurrency().
    std::size_t threads = 0;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
    std::size_t crossover_children() const;
    std::size_t mutation_children() const;
    bool operator==(const GaConfig&) const = default;
};

struct GenerationStats {
    std::size_t generation = 0;
    double best = 0.0;
    double mean = 0.0;
    bool operator==(const GenerationStats&) const = default;
};

struct TrainingResult {
    Chromosome best;
    double best_fitness = 0.0;
    std::vector<GenerationStats> history;
    bool stalled = false;
};

/// Tie-breaking seed shared by every fitness evaluation of a training run.
std::uint64_t training_fitness_seed(std::uint64_t config_seed);

using GenerationCallback = std::function<void(const GenerationStats&)>;

/// Generational GA over a fixed scenario batch. `seeds` pre-populate the
/// first slots of the initial population.
TrainingResult evolve(const GaConfig& config, std::span<const Scenario> scenarios,
                      const ScheduleOptions& options, std::span<const Chromosome> seeds = {},
                      const GenerationCallback& on_generation = {});

/// Uniform crossover: each gene from either parent with equal odds.
Chromosome crossover(const Chromosome& a, const Chromosome& b, Rng& rng);
Chromosome mutate(const Chromosome& parent, const GaConfig& config, Rng& rng);

/// Selection weights 1/sqrt(rank) for costs sorted ascending, normalised.
std::vector<double> rank_weights(std::size_t count);
std::size_t roulette_pick(std::span<const double> cumulative, Rng& rng);

}  // namespace shiftfuzz
