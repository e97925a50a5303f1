#include "shiftfuzz/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace shiftfuzz {

Schedule Schedule::from_assignment(const Scenario& scenario, std::vector<AvailabilityRow> assigned) {
    Schedule s;
    s.assigned = std::move(assigned);
    const std::size_t n = s.assigned.size();
    s.weekly_hours.assign(n, 0);
    s.daily_hours.assign(n, std::array<int, kDays>{});
    for (std::size_t w = 0; w < n; ++w) {
        for (const Slot& slot : week_slots()) {
            if (s.assigned[w][slot.index] != 0) {
                ++s.weekly_hours[w];
                ++s.daily_hours[w][slot.day];
            }
        }
    }
    for (const Slot& slot : week_slots()) {
        std::size_t on_duty = 0;
        for (std::size_t w = 0; w < n; ++w) {
            on_duty += s.assigned[w][slot.index] != 0 ? 1U : 0U;
        }
        if (on_duty < static_cast<std::size_t>(scenario.coverage_required)) {
            s.shortfalls.push_back({slot.index, on_duty, scenario.coverage_required});
        }
    }
    return s;
}

std::vector<std::string> check_schedule(const Schedule& schedule, const Scenario& scenario) {
    std::vector<std::string> problems;
    const std::size_t n = scenario.worker_count();
    if (schedule.worker_count() != n || schedule.weekly_hours.size() != n ||
        schedule.daily_hours.size() != n) {
        problems.push_back("schedule dimensions do not match scenario");
        return problems;
    }
    for (const Slot& slot : week_slots()) {
        const std::size_t t = slot.index;
        std::size_t on_duty = 0;
        for (std::size_t w = 0; w < n; ++w) {
            if (schedule.assigned[w][t] > 1) {
                problems.push_back("non-binary assignment for worker " + std::to_string(w + 1) +
                                   " at slot " + std::to_string(t + 1));
            }
            if (schedule.assigned[w][t] != 0 && scenario.availability[w][t] == 0) {
                problems.push_back("worker " + std::to_string(w + 1) +
                                   " assigned while unavailable at slot " + std::to_string(t + 1));
            }
            on_duty += schedule.assigned[w][t] != 0 ? 1U : 0U;
        }
        const std::size_t expected =
            std::min(static_cast<std::size_t>(scenario.coverage_required), scenario.available_count(t));
        if (on_duty != expected) {
            problems.push_back("slot " + std::to_string(t + 1) + " has " + std::to_string(on_duty) +
                               " on duty, expected " + std::to_string(expected));
        }
    }
    for (std::size_t w = 0; w < n; ++w) {
        int week = 0;
        for (std::size_t d = 0; d < kDays; ++d) {
            int day = 0;
            for (const Slot& slot : week_slots()) {
                if (slot.day == d) {
                    day += schedule.assigned[w][slot.index] != 0 ? 1 : 0;
                }
            }
            if (day != schedule.daily_hours[w][d]) {
                problems.push_back("daily tally mismatch for worker " + std::to_string(w + 1) +
                                   " on day " + std::to_string(d + 1));
            }
            week += schedule.daily_hours[w][d];
        }
        if (week != schedule.weekly_hours[w]) {
            problems.push_back("weekly tally is not the sum of daily tallies for worker " +
                               std::to_string(w + 1));
        }
    }
    return problems;
}

void enter_slot(AssignmentState& state, const Slot& slot) {
    if (slot.day != state.current_day) {
        std::fill(state.daily_hours.begin(), state.daily_hours.end(), 0);
        std::fill(state.assigned_previous_slot.begin(), state.assigned_previous_slot.end(), false);
        state.current_day = slot.day;
    }
}

namespace {

void apply_selection(AssignmentState& state, std::span<const std::size_t> selected, const Slot& slot) {
    enter_slot(state, slot);
    std::fill(state.assigned_previous_slot.begin(), state.assigned_previous_slot.end(), false);
    for (std::size_t w : selected) {
        ++state.weekly_hours[w];
        ++state.daily_hours[w];
        state.assigned_previous_slot[w] = true;
    }
}

}  // namespace

AssignmentState advance_state(AssignmentState state, std::span<const std::size_t> selected,
                              const Slot& slot) {
    apply_selection(state, selected, slot);
    return state;
}

double combine_score(bool available, double weekly_likelihood, double daily_likelihood,
                     bool adjacent, double gamma) {
    if (!available) {
        return 0.0;
    }
    return std::min(weekly_likelihood, daily_likelihood) * (adjacent ? gamma : 1.0);
}

LikelihoodCache::LikelihoodCache(const FisPair& pair)
    : pair_(pair),
      weekly_(kSpan * kSpan, std::numeric_limits<double>::quiet_NaN()),
      daily_(kSpan * kSpan, std::numeric_limits<double>::quiet_NaN()) {}

double LikelihoodCache::lookup(std::vector<double>& table, const Fis& fis, double x1, double x2) {
    const bool integral = x1 >= 0.0 && x2 >= 0.0 && x1 < kSpan && x2 < kSpan &&
                          std::floor(x1) == x1 && std::floor(x2) == x2;
    if (!integral) {
        return infer(fis, x1, x2);
    }
    double& slot = table[static_cast<std::size_t>(x1) * kSpan + static_cast<std::size_t>(x2)];
    if (std::isnan(slot)) {
        slot = infer(fis, x1, x2);
    }
    return slot;
}

double LikelihoodCache::weekly(double preferred_hours, double assigned_hours) {
    return lookup(weekly_, pair_.weekly, preferred_hours, assigned_hours);
}

double LikelihoodCache::daily(double preferred_length, double assigned_hours) {
    return lookup(daily_, pair_.daily, preferred_length, assigned_hours);
}

double assignment_score(const WorkerSpec& worker, const AssignmentState& state, std::size_t index,
                        bool available, const FisPair& pair, double gamma) {
    if (!available) {
        return 0.0;
    }
    const double weekly = infer(pair.weekly, worker.preferred_weekly_hours, state.weekly_hours[index]);
    const double daily = infer(pair.daily, worker.preferred_shift_length, state.daily_hours[index]);
    return combine_score(true, weekly, daily, state.assigned_previous_slot[index], gamma);
}

Selection select_top_k(std::span<const double> scores, std::size_t k, Rng& rng) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > 0.0) {
            candidates.push_back(i);
        }
    }
    for (std::size_t i = candidates.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)));
        std::swap(candidates[i - 1], candidates[j]);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    Selection out;
    if (candidates.size() > k) {
        candidates.resize(k);
    }
    out.shortfall = k - candidates.size();
    out.workers = std::move(candidates);
    std::sort(out.workers.begin(), out.workers.end());
    return out;
}

Schedule build_schedule(const Scenario& scenario, const FisPair& pair,
                        const ScheduleOptions& options, Rng& rng) {
    LikelihoodCache cache(pair);
    return build_schedule(scenario, cache, options, rng);
}

Schedule build_schedule(const Scenario& scenario, LikelihoodCache& likelihoods,
                        const ScheduleOptions& options, Rng& rng) {
    const std::size_t n = scenario.worker_count();
    const auto k = static_cast<std::size_t>(scenario.coverage_required);
    AssignmentState state(n);
    std::vector<AvailabilityRow> assigned(n, AvailabilityRow{});
    std::vector<double> scores(n, 0.0);

    for (const Slot& slot : week_slots()) {
        enter_slot(state, slot);
        for (std::size_t w = 0; w < n; ++w) {
            const WorkerSpec& spec = scenario.workers[w];
            const bool available = scenario.availability[w][slot.index] != 0;
            if (!available ||
                (options.hard_weekly_limit && state.weekly_hours[w] >= spec.weekly_limit)) {
                scores[w] = 0.0;
                continue;
            }
            const double weekly = likelihoods.weekly(spec.preferred_weekly_hours, state.weekly_hours[w]);
            const double daily = likelihoods.daily(spec.preferred_shift_length, state.daily_hours[w]);
            // Available workers stay eligible even if every rule says "no".
            scores[w] = std::max(std::numeric_limits<double>::min(),
                                 combine_score(true, weekly, daily, state.assigned_previous_slot[w],
                                               options.gamma));
        }
        const Selection chosen = select_top_k(scores, k, rng);
        for (std::size_t w : chosen.workers) {
            assigned[w][slot.index] = 1;
        }
        apply_selection(state, chosen.workers, slot);
    }
    return Schedule::from_assignment(scenario, std::move(assigned));
}

}  // namespace shiftfuzz
