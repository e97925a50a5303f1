#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "shiftfuzz/fuzzy.hpp"
#include "shiftfuzz/rng.hpp"
#include "shiftfuzz/scenario.hpp"

namespace shiftfuzz {

struct ScheduleOptions {
    /// Multiplier applied to workers who held the previous slot of the same day.
    double gamma = 3.0;
    /// Zero the score of anyone already at their weekly limit.
    bool hard_weekly_limit = false;
    bool operator==(const ScheduleOptions&) const = default;
};

struct CoverageShortfall {
    std::size_t slot = 0;
    std::size_t assigned = 0;
    int required = 0;

    bool operator==(const CoverageShortfall&) const = default;
};

struct Schedule {
    std::vector<AvailabilityRow> assigned;           // workers x slots
    std::vector<int> weekly_hours;                   // per worker
    std::vector<std::array<int, kDays>> daily_hours; // per worker, per day
    std::vector<CoverageShortfall> shortfalls;

    std::size_t worker_count() const { return assigned.size(); }

    /// Derives tallies and shortfalls from a raw assignment matrix.
    static Schedule from_assignment(const Scenario& scenario, std::vector<AvailabilityRow> assigned);
    bool operator==(const Schedule&) const = default;
};

/// Human-readable descriptions of every broken schedule invariant; empty when
/// the schedule is consistent with the scenario.
std::vector<std::string> check_schedule(const Schedule& schedule, const Scenario& scenario);

/// Running tallies while the week is filled slot by slot.
struct AssignmentState {
    std::vector<int> weekly_hours;
    std::vector<int> daily_hours;
    std::vector<bool> assigned_previous_slot;
    std::size_t current_day = 0;

    explicit AssignmentState(std::size_t workers = 0)
        : weekly_hours(workers, 0), daily_hours(workers, 0), assigned_previous_slot(workers, false) {}

    bool operator==(const AssignmentState&) const = default;
};

/// Resets daily tallies and adjacency flags when `slot` belongs to a new day.
void enter_slot(AssignmentState& state, const Slot& slot);

/// State after `selected` work `slot`.
AssignmentState advance_state(AssignmentState state, std::span<const std::size_t> selected,
                              const Slot& slot);

/// The product operator: availability x min(likelihoods) x adjacency factor.
/// Scores are ranking keys and may exceed 1.
double combine_score(bool available, double weekly_likelihood, double daily_likelihood,
                     bool adjacent, double gamma);

/// Memoised inference for the integer-valued inputs that occur while
/// scheduling. Not thread-safe; give each thread its own.
class LikelihoodCache {
public:
    explicit LikelihoodCache(const FisPair& pair);

    double weekly(double preferred_hours, double assigned_hours);
    double daily(double preferred_length, double assigned_hours);

    const FisPair& fis_pair() const { return pair_; }

private:
    static constexpr int kSpan = 64;
    double lookup(std::vector<double>& table, const Fis& fis, double x1, double x2);

    FisPair pair_;
    std::vector<double> weekly_;
    std::vector<double> daily_;
};

double assignment_score(const WorkerSpec& worker, const AssignmentState& state, std::size_t index,
                        bool available, const FisPair& pair, double gamma);

struct Selection {
    std::vector<std::size_t> workers;
    std::size_t shortfall = 0;
};

/// The k best strictly positive scores. Ties are broken uniformly at random:
/// candidates are shuffled before a stable sort by score.
Selection select_top_k(std::span<const double> scores, std::size_t k, Rng& rng);

Schedule build_schedule(const Scenario& scenario, const FisPair& pair,
                        const ScheduleOptions& options, Rng& rng);
Schedule build_schedule(const Scenario& scenario, LikelihoodCache& likelihoods,
                        const ScheduleOptions& options, Rng& rng);

}  // namespace shiftfuzz
