#include "shiftfuzz/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace shiftfuzz {

double membership(const TriangularMf& mf, double x) {
    if (x < mf.left || x > mf.right) {
        return 0.0;
    }
    if (x == mf.peak) {
        return 1.0;
    }
    if (x < mf.peak) {
        return (x - mf.left) / (mf.peak - mf.left);
    }
    return (mf.right - x) / (mf.right - mf.peak);
}

double InputPartition::clamp(double x) const { return std::clamp(x, domain_min, domain_max); }

void InputPartition::validate() const {
    if (!(domain_min < domain_max)) {
        throw std::invalid_argument("partition '" + name + "': empty domain");
    }
    if (mfs.empty()) {
        throw std::invalid_argument("partition '" + name + "': no membership functions");
    }
    for (std::size_t i = 0; i < mfs.size(); ++i) {
        if (!mfs[i].mf.valid()) {
            throw std::invalid_argument("partition '" + name + "': malformed triangle '" +
                                        mfs[i].label + "'");
        }
        if (i > 0 && mfs[i].mf.peak < mfs[i - 1].mf.peak) {
            throw std::invalid_argument("partition '" + name + "': peaks out of order at '" +
                                        mfs[i].label + "'");
        }
    }

    // Positivity of each MF is constant between consecutive corners, so the
    // corners and the midpoints between them are enough to check coverage.
    std::vector<double> points{domain_min, domain_max};
    for (const auto& m : mfs) {
        for (double c : {m.mf.left, m.mf.peak, m.mf.right}) {
            if (c > domain_min && c < domain_max) {
                points.push_back(c);
            }
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    const std::size_t corners = points.size();
    for (std::size_t i = 0; i + 1 < corners; ++i) {
        points.push_back(0.5 * (points[i] + points[i + 1]));
    }
    for (double x : points) {
        const bool covered = std::any_of(mfs.begin(), mfs.end(),
                                         [x](const LabeledMf& m) { return membership(m.mf, x) > 0.0; });
        if (!covered) {
            throw std::invalid_argument("partition '" + name + "': no coverage at x=" +
                                        std::to_string(x));
        }
    }
}

std::vector<double> fuzzify(const InputPartition& partition, double x) {
    const double clamped = partition.clamp(x);
    std::vector<double> degrees;
    degrees.reserve(partition.mfs.size());
    for (const auto& m : partition.mfs) {
        degrees.push_back(membership(m.mf, clamped));
    }
    return degrees;
}

InputPartition even_partition(std::string name, double domain_min, double domain_max,
                              std::vector<std::string> labels) {
    if (labels.size() < 2) {
        throw std::invalid_argument("even_partition needs at least two levels");
    }
    InputPartition p;
    p.name = std::move(name);
    p.domain_min = domain_min;
    p.domain_max = domain_max;
    const std::size_t n = labels.size();
    const double step = (domain_max - domain_min) / static_cast<double>(n - 1);
    auto peak_at = [&](std::size_t i) {
        return i + 1 == n ? domain_max : domain_min + step * static_cast<double>(i);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const double peak = peak_at(i);
        const double left = i == 0 ? peak : peak_at(i - 1);
        const double right = i + 1 == n ? peak : peak_at(i + 1);
        p.mfs.push_back({std::move(labels[i]), {left, peak, right}});
    }
    return p;
}

void OutputPartition::validate() const {
    for (std::size_t i = 0; i < mfs.size(); ++i) {
        const auto& mf = mfs[i];
        if (!mf.valid() || mf.left < 0.0 || mf.right > 1.0) {
            throw std::invalid_argument(std::string("output MF '") + kOutputLabels[i] +
                                        "' is not a triangle inside [0, 1]");
        }
        if (i > 0 && mf.peak < mfs[i - 1].peak) {
            throw std::invalid_argument(std::string("output MF '") + kOutputLabels[i] +
                                        "' peak is below its predecessor");
        }
    }
}

OutputPartition standard_output_partition() {
    OutputPartition out;
    for (std::size_t i = 0; i < kOutputLevels; ++i) {
        const double peak = 0.25 * static_cast<double>(i);
        out.mfs[i] = {std::max(0.0, peak - 0.25), peak, std::min(1.0, peak + 0.25)};
    }
    return out;
}

RuleTable::RuleTable(std::size_t r, std::size_t c, int fill)
    : rows(r), cols(c), consequents(r * c, fill) {}

void RuleTable::validate() const {
    if (consequents.size() != rows * cols) {
        throw std::invalid_argument("rule table is incomplete");
    }
    for (std::size_t i = 0; i < consequents.size(); ++i) {
        const int level = consequents[i];
        if (level < 0 || level >= static_cast<int>(kOutputLevels)) {
            throw std::invalid_argument("rule (" + std::to_string(i / cols + 1) + ", " +
                                        std::to_string(i % cols + 1) +
                                        ") has no valid output level");
        }
    }
}

void Fis::validate() const {
    input1.validate();
    input2.validate();
    output.validate();
    rules.validate();
    if (rules.rows != input1.mfs.size() || rules.cols != input2.mfs.size()) {
        throw std::invalid_argument("rule table dimensions do not match input partitions");
    }
}

double centroid(std::span<const double> aggregate) {
    const std::size_t n = aggregate.size();
    if (n < 2) {
        return kEmptyAggregateCentroid;
    }
    const double step = 1.0 / static_cast<double>(n - 1);
    double mass = 0.0;
    double moment = 0.0;
    // Trapezoid weights: endpoint samples count half.
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 * aggregate[i] : aggregate[i];
        mass += w;
        moment += static_cast<double>(i) * step * w;
    }
    if (mass <= 0.0) {
        return kEmptyAggregateCentroid;
    }
    return moment / mass;
}

double infer(const Fis& fis, double x1, double x2, std::size_t grid_points) {
    const auto d1 = fuzzify(fis.input1, x1);
    const auto d2 = fuzzify(fis.input2, x2);

    // max over rules sharing a consequent; max-of-clips only depends on it.
    std::array<double, kOutputLevels> strength{};
    for (std::size_t r = 0; r < fis.rules.rows; ++r) {
        for (std::size_t c = 0; c < fis.rules.cols; ++c) {
            const double firing = std::min(d1[r], d2[c]);
            auto& s = strength[static_cast<std::size_t>(fis.rules.at(r, c))];
            s = std::max(s, firing);
        }
    }

    std::vector<double> aggregate(grid_points, 0.0);
    const double step = 1.0 / static_cast<double>(grid_points - 1);
    for (std::size_t k = 0; k < kOutputLevels; ++k) {
        if (strength[k] <= 0.0) {
            continue;
        }
        const auto& mf = fis.output.mfs[k];
        const auto first = static_cast<std::size_t>(std::max(0.0, std::floor(mf.left / step)));
        const auto last = std::min(grid_points - 1,
                                   static_cast<std::size_t>(std::ceil(mf.right / step)));
        for (std::size_t i = first; i <= last; ++i) {
            const double clipped = std::min(strength[k], membership(mf, static_cast<double>(i) * step));
            aggregate[i] = std::max(aggregate[i], clipped);
        }
    }
    return centroid(aggregate);
}

void FisPair::validate() const {
    weekly.validate();
    daily.validate();
    if (weekly.output != daily.output) {
        throw std::invalid_argument("weekly and daily systems must share one output partition");
    }
    if (weekly.rules.rows != kWeeklyLevels || weekly.rules.cols != kWeeklyLevels) {
        throw std::invalid_argument("weekly rule table must be 4x4");
    }
    if (daily.rules.rows != kDailyLevels || daily.rules.cols != kDailyLevels) {
        throw std::invalid_argument("daily rule table must be 3x3");
    }
}

InputPartition default_preferred_weekly_partition() {
    return even_partition("preferred hours per week", 0.0, 25.0,
                          {"Very Low", "Low", "High", "Very High"});
}

InputPartition default_assigned_weekly_partition() {
    return even_partition("assigned hours per week", 0.0, 25.0,
                          {"Very Low", "Low", "High", "Very High"});
}

InputPartition default_preferred_shift_partition() {
    return even_partition("preferred shift length", 1.0, 8.0, {"Low", "Medium", "High"});
}

InputPartition default_assigned_daily_partition() {
    return even_partition("assigned hours per day", 0.0, 11.0, {"Low", "Medium", "High"});
}

FisPair make_fis_pair(const RuleTable& weekly_rules, const RuleTable& daily_rules,
                      const OutputPartition& output) {
    FisPair pair;
    pair.weekly = {default_preferred_weekly_partition(), default_assigned_weekly_partition(),
                   output, weekly_rules};
    pair.daily = {default_preferred_shift_partition(), default_assigned_daily_partition(), output,
                  daily_rules};
    return pair;
}

}  // namespace shiftfuzz
