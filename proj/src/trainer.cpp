#include "shiftfuzz/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "shiftfuzz/parallel.hpp"

namespace shiftfuzz {

namespace {

constexpr int kMinLevel = 1;
constexpr int kMaxLevel = static_cast<int>(kOutputLevels);

double clamp_gene(double value, double lo, double hi) {
    if (!std::isfinite(value)) {
        return 0.5 * (lo + hi);
    }
    return std::clamp(value, lo, hi);
}

bool is_peak_gene(std::size_t i) { return i < kPeakGenes; }

double gene_lo(std::size_t i) { return is_peak_gene(i) ? 0.0 : kMinHalfWidth; }

}  // namespace

void Chromosome::repair() {
    for (int& r : rules) {
        r = std::clamp(r, kMinLevel, kMaxLevel);
    }
    for (std::size_t i = 0; i < mf.size(); ++i) {
        mf[i] = clamp_gene(mf[i], gene_lo(i), 1.0);
    }
}

bool Chromosome::valid() const {
    const bool rules_ok = std::all_of(rules.begin(), rules.end(),
                                      [](int r) { return r >= kMinLevel && r <= kMaxLevel; });
    for (std::size_t i = 0; i < mf.size(); ++i) {
        if (!std::isfinite(mf[i]) || mf[i] < gene_lo(i) || mf[i] > 1.0) {
            return false;
        }
    }
    return rules_ok;
}

FisPair decode(const Chromosome& raw) {
    Chromosome c = raw;
    c.repair();

    std::array<double, kOutputLevels> peaks{};
    peaks[0] = 0.0;
    std::copy(c.mf.begin(), c.mf.begin() + kPeakGenes, peaks.begin() + 1);
    std::sort(peaks.begin(), peaks.end());

    OutputPartition output;
    for (std::size_t k = 0; k < kOutputLevels; ++k) {
        const double width = c.mf[kPeakGenes + k];
        output.mfs[k] = {std::max(0.0, peaks[k] - width), peaks[k], std::min(1.0, peaks[k] + width)};
    }

    RuleTable weekly(kWeeklyLevels, kWeeklyLevels);
    RuleTable daily(kDailyLevels, kDailyLevels);
    for (std::size_t i = 0; i < kWeeklyRuleCount; ++i) {
        weekly.consequents[i] = c.rules[i] - 1;
    }
    for (std::size_t i = 0; i < kDailyRuleCount; ++i) {
        daily.consequents[i] = c.rules[kWeeklyRuleCount + i] - 1;
    }
    return make_fis_pair(weekly, daily, output);
}

Chromosome encode(const FisPair& pair) {
    Chromosome c;
    for (std::size_t i = 0; i < kWeeklyRuleCount; ++i) {
        c.rules[i] = pair.weekly.rules.consequents.at(i) + 1;
    }
    for (std::size_t i = 0; i < kDailyRuleCount; ++i) {
        c.rules[kWeeklyRuleCount + i] = pair.daily.rules.consequents.at(i) + 1;
    }
    const auto& mfs = pair.weekly.output.mfs;
    for (std::size_t k = 1; k < kOutputLevels; ++k) {
        c.mf[k - 1] = mfs[k].peak;
    }
    for (std::size_t k = 0; k < kOutputLevels; ++k) {
        c.mf[kPeakGenes + k] = std::max(mfs[k].peak - mfs[k].left, mfs[k].right - mfs[k].peak);
    }
    c.repair();
    return c;
}

Chromosome random_chromosome(Rng& rng) {
    Chromosome c;
    for (int& r : c.rules) {
        r = static_cast<int>(rng.uniform_int(kMinLevel, kMaxLevel));
    }
    for (std::size_t i = 0; i < c.mf.size(); ++i) {
        c.mf[i] = rng.uniform(gene_lo(i), 1.0);
    }
    return c;
}

double rms(std::span<const double> values) {
    if (values.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v * v;
    }
    return std::sqrt(sum / static_cast<double>(values.size()));
}

ScenarioDeltas deltas(const Schedule& schedule, const Scenario& scenario) {
    ScenarioDeltas d;
    for (std::size_t w = 0; w < scenario.worker_count(); ++w) {
        const WorkerSpec& spec = scenario.workers[w];
        for (int hours : schedule.daily_hours[w]) {
            if (hours > 0) {
                d.shift.push_back(static_cast<double>(hours - spec.preferred_shift_length));
            }
        }
        const int week = schedule.weekly_hours[w];
        d.weekly.push_back(static_cast<double>(week - spec.preferred_weekly_hours));
        d.excess.push_back(static_cast<double>(std::max(0, week - spec.weekly_limit)));
    }
    d.rms_shift = rms(d.shift);
    d.rms_weekly = rms(d.weekly);
    d.rms_excess = rms(d.excess);
    return d;
}

double schedule_cost(const Schedule& schedule, const Scenario& scenario) {
    return deltas(schedule, scenario).cost();
}

double aggregate_cost(std::span<const ScenarioDeltas> scenarios) {
    if (scenarios.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (const auto& s : scenarios) {
        total += s.cost();
    }
    return total / static_cast<double>(scenarios.size());
}

std::uint64_t scenario_stream_seed(std::uint64_t base_seed, std::size_t index) {
    return derive_seed(base_seed, 0x5c3e'0a10ULL, index);
}

FitnessReport evaluate(const Chromosome& c, std::span<const Scenario> scenarios,
                       const ScheduleOptions& options, std::uint64_t seed) {
    if (scenarios.empty()) {
        throw std::invalid_argument("fitness needs at least one scenario");
    }
    LikelihoodCache likelihoods(decode(c));
    FitnessReport report;
    report.scenarios.reserve(scenarios.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        Rng rng(scenario_stream_seed(seed, i));
        const Schedule schedule = build_schedule(scenarios[i], likelihoods, options, rng);
        report.scenarios.push_back(deltas(schedule, scenarios[i]));
    }
    report.cost = aggregate_cost(report.scenarios);
    return report;
}

double fitness(const Chromosome& c, std::span<const Scenario> scenarios,
               const ScheduleOptions& options, std::uint64_t seed) {
    return evaluate(c, scenarios, options, seed).cost;
}

void GaConfig::validate() const {
    if (population_size < 2) {
        throw std::invalid_argument("population_size must be at least 2");
    }
    if (elite_count >= population_size) {
        throw std::invalid_argument("elite_count must be smaller than population_size");
    }
    if (!(crossover_fraction >= 0.0 && crossover_fraction <= 1.0)) {
        throw std::invalid_argument("crossover_fraction must lie in [0, 1]");
    }
    if (max_generations < 1) {
        throw std::invalid_argument("max_generations must be at least 1");
    }
    if (stall_generations < 1) {
        throw std::invalid_argument("stall_generations must be at least 1");
    }
    if (n_scenarios < 1) {
        throw std::invalid_argument("n_scenarios must be at least 1");
    }
    if (!(rule_mutation_rate >= 0.0 && rule_mutation_rate <= 1.0)) {
        throw std::invalid_argument("rule_mutation_rate must lie in [0, 1]");
    }
    if (!(mf_mutation_sigma >= 0.0) || !std::isfinite(mf_mutation_sigma)) {
        throw std::invalid_argument("mf_mutation_sigma must be finite and non-negative");
    }
}

std::size_t GaConfig::crossover_children() const {
    return static_cast<std::size_t>(
        std::round(crossover_fraction * static_cast<double>(population_size - elite_count)));
}

std::size_t GaConfig::mutation_children() const {
    return population_size - elite_count - crossover_children();
}

Chromosome crossover(const Chromosome& a, const Chromosome& b, Rng& rng) {
    Chromosome child;
    for (std::size_t i = 0; i < child.rules.size(); ++i) {
        child.rules[i] = rng.bernoulli(0.5) ? a.rules[i] : b.rules[i];
    }
    for (std::size_t i = 0; i < child.mf.size(); ++i) {
        child.mf[i] = rng.bernoulli(0.5) ? a.mf[i] : b.mf[i];
    }
    child.repair();
    return child;
}

Chromosome mutate(const Chromosome& parent, const GaConfig& config, Rng& rng) {
    Chromosome child = parent;
    for (int& r : child.rules) {
        if (rng.bernoulli(config.rule_mutation_rate)) {
            r = static_cast<int>(rng.uniform_int(kMinLevel, kMaxLevel));
        }
    }
    for (double& g : child.mf) {
        g += rng.normal(0.0, config.mf_mutation_sigma);
    }
    child.repair();
    return child;
}

std::vector<double> rank_weights(std::size_t count) {
    std::vector<double> w(count);
    for (std::size_t r = 0; r < count; ++r) {
        w[r] = 1.0 / std::sqrt(static_cast<double>(r + 1));
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) {
        x /= total;
    }
    return w;
}

std::size_t roulette_pick(std::span<const double> cumulative, Rng& rng) {
    const double u = rng.uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                 cumulative.size() - 1);
}

std::uint64_t training_fitness_seed(std::uint64_t config_seed) {
    return derive_seed(config_seed, 0x6a'0002ULL);
}

TrainingResult evolve(const GaConfig& config, std::span<const Scenario> scenarios,
                      const ScheduleOptions& options, std::span<const Chromosome> seeds,
                      const GenerationCallback& on_generation) {
    config.validate();
    if (scenarios.empty()) {
        throw std::invalid_argument("training needs at least one scenario");
    }
    const std::size_t n = config.population_size;
    Rng rng(derive_seed(config.seed, 0x6a'0001ULL));
    // One tie-breaking seed for every individual: fitness is then a pure
    // function of the chromosome, so elites keep their cost.
    const std::uint64_t fitness_seed = training_fitness_seed(config.seed);

    std::vector<Chromosome> population;
    population.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < seeds.size()) {
            Chromosome c = seeds[i];
            c.repair();
            population.push_back(c);
        } else {
            population.push_back(random_chromosome(rng));
        }
    }
    std::vector<double> costs(n, 0.0);
    auto evaluate_range = [&](std::size_t first) {
        parallel_for(n - first, config.threads, [&](std::size_t i) {
            costs[first + i] = fitness(population[first + i], scenarios, options, fitness_seed);
        });
    };
    evaluate_range(0);

    TrainingResult result;
    std::size_t last_improvement = 0;
    bool have_best = false;
    const std::vector<double> weights = rank_weights(n);
    std::vector<double> cumulative(n);
    std::partial_sum(weights.begin(), weights.end(), cumulative.begin());

    for (std::size_t gen = 0;; ++gen) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });

        GenerationStats stats;
        stats.generation = gen;
        stats.best = costs[order.front()];
        stats.mean = std::accumulate(costs.begin(), costs.end(), 0.0) / static_cast<double>(n);
        result.history.push_back(stats);
        if (on_generation) {
            on_generation(stats);
        }
        if (!have_best || stats.best < result.best_fitness) {
            result.best = population[order.front()];
            result.best_fitness = stats.best;
            last_improvement = gen;
            have_best = true;
        }

        if (gen + 1 >= config.max_generations) {
            break;
        }
        if (gen - last_improvement >= config.stall_generations) {
            result.stalled = true;
            break;
        }

        std::vector<Chromosome> next;
        std::vector<double> next_costs;
        next.reserve(n);
        for (std::size_t e = 0; e < config.elite_count; ++e) {
            next.push_back(population[order[e]]);
            next_costs.push_back(costs[order[e]]);
        }
        auto pick = [&] { return population[order[roulette_pick(cumulative, rng)]]; };
        for (std::size_t i = 0; i < config.crossover_children(); ++i) {
            const Chromosome a = pick();
            const Chromosome b = pick();
            next.push_back(crossover(a, b, rng));
        }
        for (std::size_t i = 0; i < config.mutation_children(); ++i) {
            next.push_back(mutate(pick(), config, rng));
        }
        population = std::move(next);
        std::copy(next_costs.begin(), next_costs.end(), costs.begin());
        evaluate_range(config.elite_count);
    }
    return result;
}

}  // namespace shiftfuzz
