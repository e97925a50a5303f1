#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "shiftfuzz/assignment.hpp"
#include "shiftfuzz/scenario.hpp"
#include "shiftfuzz/scenario_io.hpp"

namespace shiftfuzz {

struct FiveNumberSummary {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

/// Quartiles by linear interpolation between order statistics; the median is
/// the lower median so that it is always an observed cost.
FiveNumberSummary summarize(std::span<const double> values);
std::size_t lower_median_index(std::span<const double> values);
/// Unbiased sample variance; 0 for fewer than two values.
double sample_variance(std::span<const double> values);

struct CostDistribution {
    std::size_t worker_count = 0;
    std::vector<double> costs;
    std::vector<bool> understaffed;
    FiveNumberSummary summary;
    double variance = 0.0;
    std::size_t weekly_limit_violations = 0;  // worker-instances above their limit
    std::size_t worker_instances = 0;

    std::size_t median_index = 0;
    Scenario median_scenario;
    Schedule median_schedule;
};

struct BatchOptions {
    std::size_t worker_count = 20;
    std::size_t batch_size = 200;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
};

/// Generates batch_size scenarios from the pool, schedules each with the
/// model and collects their costs. Scenario i and its tie-breaking stream
/// depend only on (seed, worker_count, i).
CostDistribution run_batch(const ModelFile& model, const AvailabilityPool& pool, const BatchOptions& options);

struct StaffingComparison {
    std::size_t a = 0;  // worker counts
    std::size_t b = 0;
    bool median_lower = false;    // median(a) < median(b)
    bool variance_higher = false; // variance(b) > variance(a)
};

struct StaffingReport {
    std::vector<CostDistribution> distributions;
    std::vector<StaffingComparison> comparisons;
};

StaffingReport compare_staffing(const ModelFile& model, const AvailabilityPool& pool,
                                std::span<const std::size_t> counts, std::size_t batch_size,
                                std::uint64_t seed, std::size_t threads = 0);

nlohmann::ordered_json distribution_to_json(const CostDistribution& d);
nlohmann::ordered_json staffing_to_json(const StaffingReport& report);
/// One row per workforce size: count,n,min,q1,median,q3,max,variance.
std::string boxplot_csv(const StaffingReport& report);

}  // namespace shiftfuzz
