#include "shiftfuzz/scenario.hpp"

#include <numeric>
#include <stdexcept>

namespace shiftfuzz {

const std::array<Slot, kSlotCount>& week_slots() {
    static const std::array<Slot, kSlotCount> slots = [] {
        std::array<Slot, kSlotCount> out{};
        std::size_t index = 0;
        for (std::size_t day = 0; day < kDays; ++day) {
            for (std::size_t hour = 0; hour < kDayLengths[day]; ++hour) {
                out[index] = {index, day, hour};
                ++index;
            }
        }
        return out;
    }();
    return slots;
}

std::string day_label(std::size_t day) {
    static const std::array<const char*, kDays> names = {"Mon", "Tue", "Wed", "Thu", "Fri"};
    return day < kDays ? names[day] : "Day" + std::to_string(day + 1);
}

std::string hour_label(std::size_t hour) {
    auto clock = [](std::size_t h24) {
        const std::size_t h12 = h24 % 12 == 0 ? 12 : h24 % 12;
        return std::to_string(h12) + ":30 " + (h24 < 12 ? "AM" : "PM");
    };
    return clock(8 + hour) + " - " + clock(9 + hour);
}

std::size_t Scenario::available_count(std::size_t slot) const {
    std::size_t count = 0;
    for (const auto& row : availability) {
        count += row[slot];
    }
    return count;
}

int Scenario::total_requested_hours() const {
    return std::accumulate(workers.begin(), workers.end(), 0,
                           [](int acc, const WorkerSpec& w) { return acc + w.preferred_weekly_hours; });
}

bool Scenario::understaffed() const {
    return total_requested_hours() < static_cast<int>(kSlotCount) * coverage_required;
}

void Scenario::validate() const {
    if (coverage_required < 1) {
        throw std::invalid_argument("coverage_required must be at least 1");
    }
    if (availability.size() != workers.size()) {
        throw std::invalid_argument("availability has " + std::to_string(availability.size()) +
                                    " rows for " + std::to_string(workers.size()) + " workers");
    }
    for (std::size_t w = 0; w < workers.size(); ++w) {
        const auto& spec = workers[w];
        const std::string where = "worker " + std::to_string(w + 1) + " ('" + spec.id + "')";
        if (spec.preferred_shift_length < 1) {
            throw std::invalid_argument(where + ": preferred_shift_length must be >= 1");
        }
        if (spec.weekly_limit < 0) {
            throw std::invalid_argument(where + ": weekly_limit must be >= 0");
        }
        if (spec.preferred_weekly_hours < 0 || spec.preferred_weekly_hours > spec.weekly_limit) {
            throw std::invalid_argument(where + ": preferred_weekly_hours must lie in [0, weekly_limit]");
        }
        for (std::size_t t = 0; t < kSlotCount; ++t) {
            if (availability[w][t] > 1) {
                throw std::invalid_argument(where + ", slot " + std::to_string(t + 1) +
                                            ": availability must be 0 or 1");
            }
        }
    }
}

}  // namespace shiftfuzz
