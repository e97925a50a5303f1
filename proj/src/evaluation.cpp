#include "shiftfuzz/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "shiftfuzz/parallel.hpp"
#include "shiftfuzz/trainer.hpp"

namespace shiftfuzz {

namespace {

double interpolated_quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::size_t lower_median_index(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("median of an empty list");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return order[(values.size() - 1) / 2];
}

FiveNumberSummary summarize(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("summary of an empty list");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    FiveNumberSummary s;
    s.min = sorted.front();
    s.max = sorted.back();
    s.median = sorted[(sorted.size() - 1) / 2];
    s.q1 = interpolated_quantile(sorted, 0.25);
    s.q3 = interpolated_quantile(sorted, 0.75);
    return s;
}

double sample_variance(std::span<const double> values) {
    if (values.size() < 2) {
        return 0.0;
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return ss / static_cast<double>(values.size() - 1);
}

CostDistribution run_batch(const ModelFile& model, const AvailabilityPool& pool, const BatchOptions& options) {
    if (options.batch_size < 1) {
        throw std::invalid_argument("batch_size must be at least 1");
    }
    if (options.worker_count > pool.size()) {
        throw std::invalid_argument("cannot draw " + std::to_string(options.worker_count) +
                                    " workers from a pool of " + std::to_string(pool.size()));
    }
    const std::size_t n = options.batch_size;
    std::vector<Scenario> scenarios(n);
    std::vector<Schedule> schedules(n);
    std::vector<double> costs(n, 0.0);

    parallel_for(n, options.threads, [&](std::size_t i) {
        Rng scenario_rng(derive_seed(options.seed, options.worker_count, 2 * i));
        Rng schedule_rng(derive_seed(options.seed, options.worker_count, 2 * i + 1));
        scenarios[i] = generate_scenario(pool, options.worker_count, scenario_rng);
        LikelihoodCache likelihoods(model.fis);
        schedules[i] = build_schedule(scenarios[i], likelihoods, model.options, schedule_rng);
        costs[i] = schedule_cost(schedules[i], scenarios[i]);
    });

    CostDistribution d;
    d.worker_count = options.worker_count;
    d.costs = costs;
    for (std::size_t i = 0; i < n; ++i) {
        d.understaffed.push_back(scenarios[i].understaffed());
        for (std::size_t w = 0; w < scenarios[i].worker_count(); ++w) {
            ++d.worker_instances;
            if (schedules[i].weekly_hours[w] > scenarios[i].workers[w].weekly_limit) {
                ++d.weekly_limit_violations;
            }
        }
    }
    d.summary = summarize(costs);
    d.variance = sample_variance(costs);
    d.median_index = lower_median_index(costs);
    d.median_scenario = scenarios[d.median_index];
    d.median_schedule = schedules[d.median_index];
    return d;
}

StaffingReport compare_staffing(const ModelFile& model, const AvailabilityPool& pool,
                                std::span<const std::size_t> counts, std::size_t batch_size,
                                std::uint64_t seed, std::size_t threads) {
    if (counts.empty()) {
        throw std::invalid_argument("compare_staffing needs at least one workforce size");
    }
    StaffingReport report;
    for (std::size_t count : counts) {
        report.distributions.push_back(run_batch(model, pool, {count, batch_size, seed, threads}));
    }
    for (std::size_t i = 0; i < report.distributions.size(); ++i) {
        for (std::size_t j = i + 1; j < report.distributions.size(); ++j) {
            const auto& a = report.distributions[i];
            const auto& b = report.distributions[j];
            report.comparisons.push_back({a.worker_count, b.worker_count, a.summary.median < b.summary.median,
                                          b.variance > a.variance});
        }
    }
    return report;
}

nlohmann::ordered_json distribution_to_json(const CostDistribution& d) {
    std::size_t understaffed = 0;
    for (bool u : d.understaffed) {
        understaffed += u ? 1U : 0U;
    }
    return {{"workers", d.worker_count},
            {"scenarios", d.costs.size()},
            {"summary",
             {{"min", d.summary.min},
              {"q1", d.summary.q1},
              {"median", d.summary.median},
              {"q3", d.summary.q3},
              {"max", d.summary.max}}},
            {"variance", d.variance},
            {"median_index", d.median_index},
            {"understaffed_scenarios", understaffed},
            {"weekly_limit_violations", d.weekly_limit_violations},
            {"worker_instances", d.worker_instances},
            {"costs", d.costs},
            {"understaffed", d.understaffed}};
}

nlohmann::ordered_json staffing_to_json(const StaffingReport& report) {
    nlohmann::ordered_json dists = nlohmann::ordered_json::array();
    for (const auto& d : report.distributions) {
        dists.push_back(distribution_to_json(d));
    }
    nlohmann::ordered_json comps = nlohmann::ordered_json::array();
    for (const auto& c : report.comparisons) {
        comps.push_back({{"a", c.a}, {"b", c.b}, {"median_a_lower", c.median_lower},
                         {"variance_b_higher", c.variance_higher}});
    }
    return {{"distributions", dists}, {"comparisons", comps}};
}

std::string boxplot_csv(const StaffingReport& report) {
    std::string out = "workers,n,min,q1,median,q3,max,variance\n";
    for (const auto& d : report.distributions) {
        const auto& s = d.summary;
        out += std::to_string(d.worker_count) + ',' + std::to_string(d.costs.size()) + ',' + format_real(s.min) +
               ',' + format_real(s.q1) + ',' + format_real(s.median) + ',' + format_real(s.q3) + ',' +
               format_real(s.max) + ',' + format_real(d.variance) + '\n';
    }
    return out;
}

}  // namespace shiftfuzz
