#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shiftfuzz/assignment.hpp"
#include "shiftfuzz/fuzzy.hpp"
#include "shiftfuzz/rng.hpp"
#include "shiftfuzz/scenario.hpp"
#include "shiftfuzz/trainer.hpp"

namespace shiftfuzz {

/// Malformed or out-of-contract file content. The message names the
/// offending file position (row/column, worker, or JSON path).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kScenarioFormatVersion = 1;
inline constexpr int kModelFormatVersion = 1;

/// Shortest decimal that reads back to the same double.
std::string format_real(double value);

// --- availability pools -----------------------------------------------------

struct AvailabilityPool {
    std::vector<std::string> ids;
    std::vector<AvailabilityRow> rows;

    std::size_t size() const { return rows.size(); }
    bool operator==(const AvailabilityPool&) const = default;
};

/// Each synthetic worker draws a density d ~ U[lo, hi]; every slot is then
/// available independently with probability d.
AvailabilityPool generate_pool(std::size_t size, double density_lo, double density_hi, Rng& rng);

inline constexpr double kDefaultDensityLo = 0.55;
inline constexpr double kDefaultDensityHi = 0.95;

/// worker_count workers drawn without replacement, weekly preference
/// U{5..15}, shift length U{3..8}, weekly limit 25.
Scenario generate_scenario(const AvailabilityPool& pool, std::size_t worker_count, Rng& rng);

inline constexpr int kMinSampledWeekly = 5;
inline constexpr int kMaxSampledWeekly = 15;
inline constexpr int kMinSampledShift = 3;
inline constexpr int kMaxSampledShift = 8;

// --- CSV files ----------------------------------------------------------------
//
// Availability CSV: header "day,hour,<id>,<id>,..." then 51 rows, one per
// slot in calendar order, of 0/1 cells. Preferences CSV: header
// "id,preferred_weekly_hours,preferred_shift_length,weekly_limit".

void save_pool(const AvailabilityPool& pool, const std::filesystem::path& path);
AvailabilityPool load_pool(const std::filesystem::path& path);

void save_scenario_csv(const Scenario& scenario, const std::filesystem::path& availability_path,
                       const std::filesystem::path& prefs_path);
Scenario load_scenario_csv(const std::filesystem::path& availability_path,
                           const std::filesystem::path& prefs_path, int coverage_required = kDefaultCoverage);

// --- scenario bundle (JSON) -----------------------------------------------------

nlohmann::ordered_json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
/// Reads a JSON bundle.
Scenario load_scenario(const std::filesystem::path& path);

// --- configuration ------------------------------------------------------------

nlohmann::ordered_json ga_config_to_json(const GaConfig& config);
/// Applies the keys present in `doc` on top of `base`; unknown keys throw.
GaConfig ga_config_from_json(const nlohmann::json& doc, GaConfig base = {});

// --- models -------------------------------------------------------------------

struct TrainingMetadata {
    GaConfig config;
    std::uint64_t seed = 0;
    double final_fitness = 0.0;
    std::vector<GenerationStats> history;
    bool operator==(const TrainingMetadata&) const = default;
};

struct ModelFile {
    int version = kModelFormatVersion;
    FisPair fis;
    ScheduleOptions options;
    std::optional<Chromosome> chromosome;
    std::optional<TrainingMetadata> training;
    /// Free-form timestamp; the only field allowed to differ between reruns.
    std::string created;

    bool operator==(const ModelFile&) const = default;
};

/// Model from a chromosome on the default input partitions.
ModelFile make_model(const Chromosome& c, const ScheduleOptions& options);

nlohmann::ordered_json model_to_json(const ModelFile& model);
ModelFile model_from_json(const nlohmann::json& doc);
void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

// --- schedules ----------------------------------------------------------------

/// One row per worker: availability, requested vs assigned weekly hours,
/// their difference, requested shift length and hours on each day.
struct ScheduleReportRow {
    std::string id;
    double availability_pct = 0.0;
    int requested_weekly = 0;
    int assigned_weekly = 0;
    int difference = 0;
    int abs_difference = 0;
    int requested_shift = 0;
    std::array<int, kDays> daily{};

    bool operator==(const ScheduleReportRow&) const = default;
};

struct ScheduleReport {
    std::vector<ScheduleReportRow> rows;
    bool operator==(const ScheduleReport&) const = default;
};

ScheduleReport make_schedule_report(const Schedule& schedule, const Scenario& scenario);
void save_schedule_report(const ScheduleReport& report, const std::filesystem::path& path);
ScheduleReport load_schedule_report(const std::filesystem::path& path);
void save_schedule(const Schedule& schedule, const Scenario& scenario, const std::filesystem::path& path);

/// Slot-level assignment in the availability CSV layout (1 = on duty).
void save_assignment_csv(const Schedule& schedule, const Scenario& scenario,
                         const std::filesystem::path& path);

// --- helpers shared with the CLI --------------------------------------------------

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

}  // namespace shiftfuzz
