#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace shiftfuzz {

/// Triangle (left, peak, right). Degree is 1 at the peak, 0 outside
/// [left, right] and linear in between. left == peak or peak == right gives a
/// shoulder; all three equal is a spike.
struct TriangularMf {
    double left = 0.0;
    double peak = 0.0;
    double right = 0.0;

    bool valid() const { return left <= peak && peak <= right; }
    bool operator==(const TriangularMf&) const = default;
};

double membership(const TriangularMf& mf, double x);

struct LabeledMf {
    std::string label;
    TriangularMf mf;

    bool operator==(const LabeledMf&) const = default;
};

struct InputPartition {
    std::string name;
    double domain_min = 0.0;
    double domain_max = 1.0;
    std::vector<LabeledMf> mfs;

    double clamp(double x) const;
    /// Throws std::invalid_argument if peaks are unordered, a triangle is
    /// malformed, or some point of the domain has zero total membership.
    void validate() const;
    bool operator==(const InputPartition&) const = default;
};

/// Degrees of every MF at x, after clamping x into the domain.
std::vector<double> fuzzify(const InputPartition& partition, double x);

/// Evenly spaced triangles with 50% overlap; the outermost MFs are shoulders
/// anchored at the domain edges.
InputPartition even_partition(std::string name, double domain_min, double domain_max,
                              std::vector<std::string> labels);

inline constexpr std::size_t kOutputLevels = 5;
inline constexpr std::array<const char*, kOutputLevels> kOutputLabels = {
    "Very Low", "Low", "Medium", "High", "Very High"};

struct OutputPartition {
    std::array<TriangularMf, kOutputLevels> mfs{};

    void validate() const;
    bool operator==(const OutputPartition&) const = default;
};

/// Five triangles peaked at 0, .25, .5, .75, 1 with half-width .25.
OutputPartition standard_output_partition();

/// Consequents stored row-major as 0-based output levels; row = input-1 level.
struct RuleTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<int> consequents;

    RuleTable() = default;
    RuleTable(std::size_t rows, std::size_t cols, int fill = 0);

    int at(std::size_t row, std::size_t col) const { return consequents[row * cols + col]; }
    int& at(std::size_t row, std::size_t col) { return consequents[row * cols + col]; }
    void validate() const;
    bool operator==(const RuleTable&) const = default;
};

struct Fis {
    InputPartition input1;
    InputPartition input2;
    OutputPartition output;
    RuleTable rules;

    void validate() const;
    bool operator==(const Fis&) const = default;
};

/// Uniform samples over [0, 1] used for defuzzification.
inline constexpr std::size_t kDefaultGridPoints = 1001;

/// Neutral likelihood returned when nothing fires.
inline constexpr double kEmptyAggregateCentroid = 0.5;

/// Centroid of the sampled aggregate with trapezoid weights; grid point i
/// sits at i / (n - 1).
double centroid(std::span<const double> aggregate);

/// Mamdani inference: min firing, clipping implication, max aggregation,
/// centroid on a uniform grid of `grid_points` samples.
double infer(const Fis& fis, double x1, double x2, std::size_t grid_points = kDefaultGridPoints);

/// The two systems driving assignment. Both share one output partition.
struct FisPair {
    Fis weekly;  // preferred hours per week x assigned hours per week
    Fis daily;   // preferred shift length x assigned hours per day

    void validate() const;
    bool operator==(const FisPair&) const = default;
};

InputPartition default_preferred_weekly_partition();
InputPartition default_assigned_weekly_partition();
InputPartition default_preferred_shift_partition();
InputPartition default_assigned_daily_partition();

inline constexpr std::size_t kWeeklyLevels = 4;
inline constexpr std::size_t kDailyLevels = 3;
inline constexpr std::size_t kWeeklyRuleCount = kWeeklyLevels * kWeeklyLevels;
inline constexpr std::size_t kDailyRuleCount = kDailyLevels * kDailyLevels;
inline constexpr std::size_t kRuleCount = kWeeklyRuleCount + kDailyRuleCount;

static_assert(kWeeklyRuleCount == 16);
static_assert(kDailyRuleCount == 9);

/// FisPair over the default input partitions with the given rules and output.
FisPair make_fis_pair(const RuleTable& weekly_rules, const RuleTable& daily_rules,
                      const OutputPartition& output);

}  // namespace shiftfuzz
