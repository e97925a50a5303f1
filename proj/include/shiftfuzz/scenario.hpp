#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace shiftfuzz {

// Weekly calendar: four 11-hour days, then a 7-hour day.
inline constexpr std::size_t kDays = 5;
inline constexpr std::array<std::size_t, kDays> kDayLengths = {11, 11, 11, 11, 7};
inline constexpr std::size_t kSlotCount = 51;
inline constexpr std::size_t kMaxDayLength = 11;
inline constexpr int kDefaultCoverage = 4;
inline constexpr int kDefaultWeeklyLimit = 25;

static_assert(kDayLengths[0] + kDayLengths[1] + kDayLengths[2] + kDayLengths[3] +
                  kDayLengths[4] ==
              kSlotCount);
static_assert(kSlotCount * kDefaultCoverage == 204);

struct Slot {
    std::size_t index = 0;  // 0..50 in calendar order
    std::size_t day = 0;    // 0..4
    std::size_t hour = 0;   // 0-based hour within the day

    bool starts_day() const { return hour == 0; }
};

/// All 51 slots in calendar order.
const std::array<Slot, kSlotCount>& week_slots();

std::string day_label(std::size_t day);
/// "8:30 AM - 9:30 AM" style label; every day opens at 8:30.
std::string hour_label(std::size_t hour);

using AvailabilityRow = std::array<std::uint8_t, kSlotCount>;

struct WorkerSpec {
    std::string id;
    int preferred_weekly_hours = 0;
    int preferred_shift_length = 1;
    int weekly_limit = kDefaultWeeklyLimit;

    bool operator==(const WorkerSpec&) const = default;
};

struct Scenario {
    std::vector<WorkerSpec> workers;
    std::vector<AvailabilityRow> availability;  // one row per worker
    int coverage_required = kDefaultCoverage;

    std::size_t worker_count() const { return workers.size(); }
    std::size_t available_count(std::size_t slot) const;
    int total_requested_hours() const;
    /// Total requested hours fall short of slots x coverage.
    bool understaffed() const;
    /// Throws std::invalid_argument naming the offending worker/slot.
    void validate() const;
    bool operator==(const Scenario&) const = default;
};

}  // namespace shiftfuzz
