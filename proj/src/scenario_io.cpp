#include "shiftfuzz/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace shiftfuzz {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kScenarioFormat = "shiftfuzz-scenario";
constexpr const char* kModelFormat = "shiftfuzz-model";
constexpr const char* kReportHeader =
    "worker_id,availability_pct,requested_weekly,assigned_weekly,difference,abs_difference,"
    "requested_shift,day1,day2,day3,day4,day5";
constexpr const char* kPrefsHeader = "id,preferred_weekly_hours,preferred_shift_length,weekly_limit";

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t");
        const auto last = cell.find_last_not_of(" \t\r");
        cells.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) {
        lines.pop_back();
    }
    return lines;
}

std::string where(const std::filesystem::path& path, std::size_t row, std::size_t col) {
    return path.string() + ": row " + std::to_string(row) + ", column " + std::to_string(col);
}

int parse_int(const std::string& text, const std::string& context) {
    int value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw FormatError(context + ": expected an integer, got '" + text + "'");
    }
    return value;
}

double parse_real(const std::string& text, const std::string& context) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw FormatError(context + ": expected a number, got '" + text + "'");
    }
    return value;
}

void check_id(const std::string& id, const std::string& context) {
    if (id.empty() || id.find_first_of(",\"\n\r") != std::string::npos) {
        throw FormatError(context + ": worker id '" + id + "' is empty or contains CSV metacharacters");
    }
}

std::uint8_t parse_bit(const std::string& text, const std::string& context) {
    if (text == "0") {
        return 0;
    }
    if (text == "1") {
        return 1;
    }
    throw FormatError(context + ": availability must be 0 or 1, got '" + text + "'");
}

std::string availability_csv(const std::vector<std::string>& ids, const std::vector<AvailabilityRow>& rows) {
    std::string out = "day,hour";
    for (const auto& id : ids) {
        out += ',' + id;
    }
    out += '\n';
    for (const Slot& slot : week_slots()) {
        out += day_label(slot.day) + ',' + hour_label(slot.hour);
        for (const auto& row : rows) {
            out += row[slot.index] != 0 ? ",1" : ",0";
        }
        out += '\n';
    }
    return out;
}

AvailabilityPool parse_availability_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) {
        throw FormatError(path.string() + ": empty availability file");
    }
    const auto header = split_csv(lines[0]);
    if (header.size() < 2 || header[0] != "day" || header[1] != "hour") {
        throw FormatError(path.string() + ": row 1: header must start with 'day,hour'");
    }
    AvailabilityPool pool;
    for (std::size_t c = 2; c < header.size(); ++c) {
        check_id(header[c], where(path, 1, c + 1));
        pool.ids.push_back(header[c]);
    }
    if (lines.size() - 1 != kSlotCount) {
        throw FormatError(path.string() + ": expected " + std::to_string(kSlotCount) +
                          " slot rows, found " + std::to_string(lines.size() - 1));
    }
    pool.rows.assign(pool.ids.size(), AvailabilityRow{});
    for (std::size_t t = 0; t < kSlotCount; ++t) {
        const std::size_t row = t + 2;
        const auto cells = split_csv(lines[t + 1]);
        if (cells.size() != header.size()) {
            throw FormatError(path.string() + ": row " + std::to_string(row) + ": expected " +
                              std::to_string(header.size()) + " columns, found " +
                              std::to_string(cells.size()));
        }
        for (std::size_t w = 0; w < pool.ids.size(); ++w) {
            pool.rows[w][t] = parse_bit(cells[w + 2], where(path, row, w + 3));
        }
    }
    return pool;
}

// Typed access into a JSON document with the path in every error.
const json& member(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) {
        throw FormatError(path + ": expected an object");
    }
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw FormatError(path + "." + key + ": missing");
    }
    return *it;
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) {
        throw FormatError(path + ": expected an integer");
    }
    return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw FormatError(path + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::size_t as_size(const json& v, const std::string& path) {
    return static_cast<std::size_t>(as_u64(v, path));
}

double as_real(const json& v, const std::string& path) {
    if (!v.is_number()) {
        throw FormatError(path + ": expected a number");
    }
    return v.get<double>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) {
        throw FormatError(path + ": expected true or false");
    }
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) {
        throw FormatError(path + ": expected a string");
    }
    return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
    if (!v.is_array()) {
        throw FormatError(path + ": expected an array");
    }
    return v;
}

void check_header(const json& doc, const char* format, int version, const std::string& what) {
    if (!doc.is_object()) {
        throw FormatError(what + ": top level must be an object");
    }
    const std::string found = as_string(member(doc, "format", what), what + ".format");
    if (found != format) {
        throw FormatError(what + ": format is '" + found + "', expected '" + format + "'");
    }
    const int v = as_int(member(doc, "version", what), what + ".version");
    if (v != version) {
        throw FormatError(what + ": unsupported format version " + std::to_string(v) +
                          " (this build reads version " + std::to_string(version) + ")");
    }
}

ordered_json mf_to_json(const TriangularMf& mf) {
    return {{"left", mf.left}, {"peak", mf.peak}, {"right", mf.right}};
}

TriangularMf mf_from_json(const json& v, const std::string& path) {
    return {as_real(member(v, "left", path), path + ".left"),
            as_real(member(v, "peak", path), path + ".peak"),
            as_real(member(v, "right", path), path + ".right")};
}

ordered_json partition_to_json(const InputPartition& p) {
    ordered_json mfs = ordered_json::array();
    for (const auto& m : p.mfs) {
        ordered_json entry = {{"label", m.label}};
        entry.update(mf_to_json(m.mf));
        mfs.push_back(entry);
    }
    return {{"name", p.name}, {"domain", {p.domain_min, p.domain_max}}, {"mfs", mfs}};
}

InputPartition partition_from_json(const json& v, const std::string& path) {
    InputPartition p;
    p.name = as_string(member(v, "name", path), path + ".name");
    const json& domain = as_array(member(v, "domain", path), path + ".domain");
    if (domain.size() != 2) {
        throw FormatError(path + ".domain: expected [min, max]");
    }
    p.domain_min = as_real(domain[0], path + ".domain[0]");
    p.domain_max = as_real(domain[1], path + ".domain[1]");
    const json& mfs = as_array(member(v, "mfs", path), path + ".mfs");
    for (std::size_t i = 0; i < mfs.size(); ++i) {
        const std::string at = path + ".mfs[" + std::to_string(i) + "]";
        p.mfs.push_back({as_string(member(mfs[i], "label", at), at + ".label"), mf_from_json(mfs[i], at)});
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(path + ": " + e.what());
    }
    return p;
}

ordered_json rules_to_json(const RuleTable& table) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < table.rows; ++r) {
        ordered_json row = ordered_json::array();
        for (std::size_t c = 0; c < table.cols; ++c) {
            row.push_back(kOutputLabels[static_cast<std::size_t>(table.at(r, c))]);
        }
        rows.push_back(row);
    }
    return rows;
}

RuleTable rules_from_json(const json& v, std::size_t rows, std::size_t cols, const std::string& path) {
    as_array(v, path);
    if (v.size() > rows) {
        throw FormatError(path + ": expected " + std::to_string(rows) + " rows, found " +
                          std::to_string(v.size()));
    }
    RuleTable table(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string row_path = path + "[" + std::to_string(r) + "]";
        if (r >= v.size()) {
            throw FormatError(row_path + ": missing rule row");
        }
        const json& row = as_array(v[r], row_path);
        if (row.size() > cols) {
            throw FormatError(row_path + ": expected " + std::to_string(cols) + " cells, found " +
                              std::to_string(row.size()));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            const std::string cell = row_path + "[" + std::to_string(c) + "]";
            if (c >= row.size()) {
                throw FormatError(cell + ": missing rule cell");
            }
            const std::string label = as_string(row[c], cell);
            const auto it = std::find(kOutputLabels.begin(), kOutputLabels.end(), label);
            if (it == kOutputLabels.end()) {
                throw FormatError(cell + ": unknown output level '" + label + "'");
            }
            table.at(r, c) = static_cast<int>(it - kOutputLabels.begin());
        }
    }
    return table;
}

ordered_json fis_to_json(const Fis& fis) {
    return {{"input1", partition_to_json(fis.input1)},
            {"input2", partition_to_json(fis.input2)},
            {"rules", rules_to_json(fis.rules)}};
}

Fis fis_from_json(const json& v, const OutputPartition& output, std::size_t levels, const std::string& path) {
    Fis fis;
    fis.input1 = partition_from_json(member(v, "input1", path), path + ".input1");
    fis.input2 = partition_from_json(member(v, "input2", path), path + ".input2");
    if (fis.input1.mfs.size() != levels || fis.input2.mfs.size() != levels) {
        throw FormatError(path + ": both inputs need exactly " + std::to_string(levels) +
                          " membership functions");
    }
    fis.output = output;
    fis.rules = rules_from_json(member(v, "rules", path), levels, levels, path + ".rules");
    return fis;
}

}  // namespace

std::string format_real(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

json read_json(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const ordered_json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

AvailabilityPool generate_pool(std::size_t size, double density_lo, double density_hi, Rng& rng) {
    if (!(density_lo >= 0.0 && density_lo <= density_hi && density_hi <= 1.0)) {
        throw std::invalid_argument("density range must satisfy 0 <= lo <= hi <= 1");
    }
    AvailabilityPool pool;
    const int digits = size < 1000 ? 3 : static_cast<int>(std::to_string(size).size());
    for (std::size_t i = 0; i < size; ++i) {
        std::string id = std::to_string(i + 1);
        id.insert(0, static_cast<std::size_t>(std::max(0, digits - static_cast<int>(id.size()))), '0');
        pool.ids.push_back("P" + id);
        const double density = rng.uniform(density_lo, density_hi);
        AvailabilityRow row{};
        for (auto& cell : row) {
            cell = rng.uniform() < density ? 1 : 0;
        }
        pool.rows.push_back(row);
    }
    return pool;
}

Scenario generate_scenario(const AvailabilityPool& pool, std::size_t worker_count, Rng& rng) {
    if (worker_count > pool.size()) {
        throw std::invalid_argument("cannot draw " + std::to_string(worker_count) + " workers from a pool of " +
                                    std::to_string(pool.size()));
    }
    std::vector<std::size_t> index(pool.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        index[i] = i;
    }
    Scenario s;
    for (std::size_t i = 0; i < worker_count; ++i) {
        const auto j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(index.size() - 1)));
        std::swap(index[i], index[j]);
        WorkerSpec w;
        w.id = pool.ids[index[i]];
        w.preferred_weekly_hours = static_cast<int>(rng.uniform_int(kMinSampledWeekly, kMaxSampledWeekly));
        w.preferred_shift_length = static_cast<int>(rng.uniform_int(kMinSampledShift, kMaxSampledShift));
        w.weekly_limit = kDefaultWeeklyLimit;
        s.workers.push_back(w);
        s.availability.push_back(pool.rows[index[i]]);
    }
    return s;
}

void save_pool(const AvailabilityPool& pool, const std::filesystem::path& path) {
    for (const auto& id : pool.ids) {
        check_id(id, path.string());
    }
    write_text(path, availability_csv(pool.ids, pool.rows));
}

AvailabilityPool load_pool(const std::filesystem::path& path) { return parse_availability_csv(path); }

void save_scenario_csv(const Scenario& scenario, const std::filesystem::path& availability_path,
                       const std::filesystem::path& prefs_path) {
    std::vector<std::string> ids;
    std::string prefs = std::string(kPrefsHeader) + "\n";
    for (const auto& w : scenario.workers) {
        check_id(w.id, prefs_path.string());
        ids.push_back(w.id);
        prefs += w.id + ',' + std::to_string(w.preferred_weekly_hours) + ',' +
                 std::to_string(w.preferred_shift_length) + ',' + std::to_string(w.weekly_limit) + '\n';
    }
    write_text(availability_path, availability_csv(ids, scenario.availability));
    write_text(prefs_path, prefs);
}

Scenario load_scenario_csv(const std::filesystem::path& availability_path,
                           const std::filesystem::path& prefs_path, int coverage_required) {
    const AvailabilityPool pool = parse_availability_csv(availability_path);
    const auto lines = read_lines(prefs_path);
    if (lines.empty() || lines[0] != kPrefsHeader) {
        throw FormatError(prefs_path.string() + ": row 1: header must be '" + kPrefsHeader + "'");
    }
    std::map<std::string, WorkerSpec> prefs;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split_csv(lines[r]);
        if (cells.size() != 4) {
            throw FormatError(prefs_path.string() + ": row " + std::to_string(r + 1) +
                              ": expected 4 columns, found " + std::to_string(cells.size()));
        }
        WorkerSpec w;
        w.id = cells[0];
        w.preferred_weekly_hours = parse_int(cells[1], where(prefs_path, r + 1, 2));
        w.preferred_shift_length = parse_int(cells[2], where(prefs_path, r + 1, 3));
        w.weekly_limit = parse_int(cells[3], where(prefs_path, r + 1, 4));
        if (w.weekly_limit < 0) {
            throw FormatError(where(prefs_path, r + 1, 4) + ": weekly_limit must be >= 0");
        }
        if (w.preferred_weekly_hours < 0 || w.preferred_weekly_hours > w.weekly_limit) {
            throw FormatError(where(prefs_path, r + 1, 2) + ": preferred_weekly_hours must lie in [0, " +
                              std::to_string(w.weekly_limit) + "]");
        }
        if (w.preferred_shift_length < 1) {
            throw FormatError(where(prefs_path, r + 1, 3) + ": preferred_shift_length must be >= 1");
        }
        if (!prefs.emplace(w.id, w).second) {
            throw FormatError(prefs_path.string() + ": row " + std::to_string(r + 1) + ": duplicate id '" +
                              w.id + "'");
        }
    }
    Scenario s;
    s.coverage_required = coverage_required;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto it = prefs.find(pool.ids[i]);
        if (it == prefs.end()) {
            throw FormatError(prefs_path.string() + ": no preferences for worker '" + pool.ids[i] + "'");
        }
        s.workers.push_back(it->second);
        s.availability.push_back(pool.rows[i]);
    }
    if (prefs.size() != pool.size()) {
        throw FormatError(prefs_path.string() + ": preferences list workers absent from " +
                          availability_path.string());
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(prefs_path.string() + ": " + e.what());
    }
    return s;
}

ordered_json scenario_to_json(const Scenario& scenario) {
    ordered_json workers = ordered_json::array();
    for (std::size_t w = 0; w < scenario.worker_count(); ++w) {
        const auto& spec = scenario.workers[w];
        std::string bits;
        for (auto cell : scenario.availability[w]) {
            bits += cell != 0 ? '1' : '0';
        }
        workers.push_back({{"id", spec.id},
                           {"preferred_weekly_hours", spec.preferred_weekly_hours},
                           {"preferred_shift_length", spec.preferred_shift_length},
                           {"weekly_limit", spec.weekly_limit},
                           {"availability", bits}});
    }
    return {{"format", kScenarioFormat},
            {"version", kScenarioFormatVersion},
            {"slots", kSlotCount},
            {"coverage_required", scenario.coverage_required},
            {"workers", workers}};
}

Scenario scenario_from_json(const json& doc) {
    const std::string root = "scenario";
    check_header(doc, kScenarioFormat, kScenarioFormatVersion, root);
    Scenario s;
    if (doc.contains("slots") && as_size(doc["slots"], root + ".slots") != kSlotCount) {
        throw FormatError(root + ".slots: expected " + std::to_string(kSlotCount));
    }
    if (doc.contains("coverage_required")) {
        s.coverage_required = as_int(doc["coverage_required"], root + ".coverage_required");
    }
    const json& workers = as_array(member(doc, "workers", root), root + ".workers");
    for (std::size_t i = 0; i < workers.size(); ++i) {
        const std::string at = root + ".workers[" + std::to_string(i) + "]";
        const json& w = workers[i];
        WorkerSpec spec;
        spec.id = as_string(member(w, "id", at), at + ".id");
        check_id(spec.id, at + ".id");
        spec.preferred_weekly_hours = as_int(member(w, "preferred_weekly_hours", at), at + ".preferred_weekly_hours");
        spec.preferred_shift_length = as_int(member(w, "preferred_shift_length", at), at + ".preferred_shift_length");
        spec.weekly_limit = w.contains("weekly_limit") ? as_int(w["weekly_limit"], at + ".weekly_limit")
                                                       : kDefaultWeeklyLimit;
        const json& avail = member(w, "availability", at);
        const std::string apath = at + ".availability";
        AvailabilityRow row{};
        std::vector<std::string> cells;
        if (avail.is_string()) {
            for (char ch : avail.get<std::string>()) {
                cells.emplace_back(1, ch);
            }
        } else {
            for (const auto& v : as_array(avail, apath)) {
                cells.push_back(v.is_number_integer() ? std::to_string(v.get<long long>()) : v.dump());
            }
        }
        if (cells.size() != kSlotCount) {
            throw FormatError(apath + ": expected " + std::to_string(kSlotCount) + " slots, found " +
                              std::to_string(cells.size()));
        }
        for (std::size_t t = 0; t < kSlotCount; ++t) {
            row[t] = parse_bit(cells[t], apath + "[" + std::to_string(t) + "]");
        }
        s.workers.push_back(spec);
        s.availability.push_back(row);
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(root + ": " + e.what());
    }
    return s;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    write_json(path, scenario_to_json(scenario));
}

Scenario load_scenario(const std::filesystem::path& path) {
    const json doc = read_json(path);
    try {
        return scenario_from_json(doc);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

ordered_json ga_config_to_json(const GaConfig& c) {
    return {{"population_size", c.population_size},
            {"max_generations", c.max_generations},
            {"stall_generations", c.stall_generations},
            {"elite_count", c.elite_count},
            {"crossover_fraction", c.crossover_fraction},
            {"n_scenarios", c.n_scenarios},
            {"rule_mutation_rate", c.rule_mutation_rate},
            {"mf_mutation_sigma", c.mf_mutation_sigma},
            {"seed", c.seed},
            {"threads", c.threads}};
}

GaConfig ga_config_from_json(const json& doc, GaConfig c) {
    const std::string root = "ga";
    if (!doc.is_object()) {
        throw FormatError(root + ": expected an object");
    }
    for (const auto& [key, value] : doc.items()) {
        const std::string at = root + "." + key;
        if (key == "population_size") {
            c.population_size = as_size(value, at);
        } else if (key == "max_generations") {
            c.max_generations = as_size(value, at);
        } else if (key == "stall_generations") {
            c.stall_generations = as_size(value, at);
        } else if (key == "elite_count") {
            c.elite_count = as_size(value, at);
        } else if (key == "crossover_fraction") {
            c.crossover_fraction = as_real(value, at);
        } else if (key == "n_scenarios") {
            c.n_scenarios = as_size(value, at);
        } else if (key == "rule_mutation_rate") {
            c.rule_mutation_rate = as_real(value, at);
        } else if (key == "mf_mutation_sigma") {
            c.mf_mutation_sigma = as_real(value, at);
        } else if (key == "seed") {
            c.seed = as_u64(value, at);
        } else if (key == "threads") {
            c.threads = as_size(value, at);
        } else {
            throw FormatError(at + ": unknown key");
        }
    }
    return c;
}

ModelFile make_model(const Chromosome& c, const ScheduleOptions& options) {
    ModelFile m;
    m.fis = decode(c);
    m.options = options;
    Chromosome repaired = c;
    repaired.repair();
    m.chromosome = repaired;
    return m;
}

ordered_json model_to_json(const ModelFile& model) {
    ordered_json output = ordered_json::array();
    for (std::size_t k = 0; k < kOutputLevels; ++k) {
        ordered_json entry = {{"label", kOutputLabels[k]}};
        entry.update(mf_to_json(model.fis.weekly.output.mfs[k]));
        output.push_back(entry);
    }
    ordered_json doc = {{"format", kModelFormat},
                        {"version", model.version},
                        {"schedule",
                         {{"gamma", model.options.gamma}, {"hard_weekly_limit", model.options.hard_weekly_limit}}},
                        {"output", output},
                        {"weekly", fis_to_json(model.fis.weekly)},
                        {"daily", fis_to_json(model.fis.daily)}};
    if (model.chromosome) {
        doc["chromosome"] = {{"rules", model.chromosome->rules}, {"mf", model.chromosome->mf}};
    }
    if (model.training) {
        ordered_json history = ordered_json::array();
        for (const auto& h : model.training->history) {
            history.push_back({{"generation", h.generation}, {"best", h.best}, {"mean", h.mean}});
        }
        doc["training"] = {{"seed", model.training->seed},
                           {"final_fitness", model.training->final_fitness},
                           {"config", ga_config_to_json(model.training->config)},
                           {"history", history}};
    }
    doc["metadata"] = {{"created", model.created}};
    return doc;
}

ModelFile model_from_json(const json& doc) {
    const std::string root = "model";
    check_header(doc, kModelFormat, kModelFormatVersion, root);
    ModelFile m;
    m.version = as_int(doc["version"], root + ".version");

    const json& sched = member(doc, "schedule", root);
    m.options.gamma = as_real(member(sched, "gamma", root + ".schedule"), root + ".schedule.gamma");
    if (!(m.options.gamma >= 1.0) || !std::isfinite(m.options.gamma)) {
        throw FormatError(root + ".schedule.gamma: must be a finite value >= 1");
    }
    m.options.hard_weekly_limit =
        as_bool(member(sched, "hard_weekly_limit", root + ".schedule"), root + ".schedule.hard_weekly_limit");

    const json& out = as_array(member(doc, "output", root), root + ".output");
    if (out.size() != kOutputLevels) {
        throw FormatError(root + ".output: expected " + std::to_string(kOutputLevels) + " membership functions");
    }
    OutputPartition output;
    for (std::size_t k = 0; k < kOutputLevels; ++k) {
        const std::string at = root + ".output[" + std::to_string(k) + "]";
        const std::string label = as_string(member(out[k], "label", at), at + ".label");
        if (label != kOutputLabels[k]) {
            throw FormatError(at + ".label: expected '" + kOutputLabels[k] + "', found '" + label + "'");
        }
        output.mfs[k] = mf_from_json(out[k], at);
    }
    try {
        output.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(root + ".output: " + e.what());
    }
    m.fis.weekly = fis_from_json(member(doc, "weekly", root), output, kWeeklyLevels, root + ".weekly");
    m.fis.daily = fis_from_json(member(doc, "daily", root), output, kDailyLevels, root + ".daily");

    if (doc.contains("chromosome")) {
        const std::string at = root + ".chromosome";
        const json& rules = as_array(member(doc["chromosome"], "rules", at), at + ".rules");
        const json& mf = as_array(member(doc["chromosome"], "mf", at), at + ".mf");
        if (rules.size() != kRuleCount || mf.size() != kMfGenes) {
            throw FormatError(at + ": expected " + std::to_string(kRuleCount) + " rule genes and " +
                              std::to_string(kMfGenes) + " membership genes");
        }
        Chromosome c;
        for (std::size_t i = 0; i < kRuleCount; ++i) {
            c.rules[i] = as_int(rules[i], at + ".rules[" + std::to_string(i) + "]");
        }
        for (std::size_t i = 0; i < kMfGenes; ++i) {
            c.mf[i] = as_real(mf[i], at + ".mf[" + std::to_string(i) + "]");
        }
        if (!c.valid()) {
            throw FormatError(at + ": genes out of range");
        }
        m.chromosome = c;
    }
    if (doc.contains("training")) {
        const std::string at = root + ".training";
        const json& t = doc["training"];
        TrainingMetadata meta;
        meta.seed = as_u64(member(t, "seed", at), at + ".seed");
        meta.final_fitness = as_real(member(t, "final_fitness", at), at + ".final_fitness");
        meta.config = ga_config_from_json(member(t, "config", at));
        const json& history = as_array(member(t, "history", at), at + ".history");
        for (std::size_t i = 0; i < history.size(); ++i) {
            const std::string hp = at + ".history[" + std::to_string(i) + "]";
            meta.history.push_back({as_size(member(history[i], "generation", hp), hp + ".generation"),
                                    as_real(member(history[i], "best", hp), hp + ".best"),
                                    as_real(member(history[i], "mean", hp), hp + ".mean")});
        }
        m.training = meta;
    }
    if (doc.contains("metadata") && doc["metadata"].contains("created")) {
        m.created = as_string(doc["metadata"]["created"], root + ".metadata.created");
    }
    try {
        m.fis.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(root + ": " + e.what());
    }
    return m;
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
    write_json(path, model_to_json(model));
}

ModelFile load_model(const std::filesystem::path& path) {
    const json doc = read_json(path);
    try {
        return model_from_json(doc);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

ScheduleReport make_schedule_report(const Schedule& schedule, const Scenario& scenario) {
    ScheduleReport report;
    for (std::size_t w = 0; w < scenario.worker_count(); ++w) {
        const auto& spec = scenario.workers[w];
        ScheduleReportRow row;
        row.id = spec.id;
        int open = 0;
        for (auto cell : scenario.availability[w]) {
            open += cell;
        }
        row.availability_pct = 100.0 * static_cast<double>(open) / static_cast<double>(kSlotCount);
        row.requested_weekly = spec.preferred_weekly_hours;
        row.assigned_weekly = schedule.weekly_hours[w];
        row.difference = row.assigned_weekly - row.requested_weekly;
        row.abs_difference = std::abs(row.difference);
        row.requested_shift = spec.preferred_shift_length;
        row.daily = schedule.daily_hours[w];
        report.rows.push_back(row);
    }
    return report;
}

void save_schedule_report(const ScheduleReport& report, const std::filesystem::path& path) {
    std::string out = std::string(kReportHeader) + "\n";
    for (const auto& r : report.rows) {
        check_id(r.id, path.string());
        out += r.id + ',' + format_real(r.availability_pct) + ',' + std::to_string(r.requested_weekly) + ',' +
               std::to_string(r.assigned_weekly) + ',' + std::to_string(r.difference) + ',' +
               std::to_string(r.abs_difference) + ',' + std::to_string(r.requested_shift);
        for (int d : r.daily) {
            out += ',' + std::to_string(d);
        }
        out += '\n';
    }
    write_text(path, out);
}

ScheduleReport load_schedule_report(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != kReportHeader) {
        throw FormatError(path.string() + ": row 1: header must be '" + kReportHeader + "'");
    }
    ScheduleReport report;
    constexpr std::size_t kColumns = 7 + kDays;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split_csv(lines[r]);
        if (cells.size() != kColumns) {
            throw FormatError(path.string() + ": row " + std::to_string(r + 1) + ": expected " +
                              std::to_string(kColumns) + " columns, found " + std::to_string(cells.size()));
        }
        ScheduleReportRow row;
        row.id = cells[0];
        row.availability_pct = parse_real(cells[1], where(path, r + 1, 2));
        row.requested_weekly = parse_int(cells[2], where(path, r + 1, 3));
        row.assigned_weekly = parse_int(cells[3], where(path, r + 1, 4));
        row.difference = parse_int(cells[4], where(path, r + 1, 5));
        row.abs_difference = parse_int(cells[5], where(path, r + 1, 6));
        row.requested_shift = parse_int(cells[6], where(path, r + 1, 7));
        int total = 0;
        for (std::size_t d = 0; d < kDays; ++d) {
            row.daily[d] = parse_int(cells[7 + d], where(path, r + 1, 8 + d));
            total += row.daily[d];
        }
        if (total != row.assigned_weekly || row.difference != row.assigned_weekly - row.requested_weekly ||
            row.abs_difference != std::abs(row.difference)) {
            throw FormatError(path.string() + ": row " + std::to_string(r + 1) + ": inconsistent hour totals");
        }
        report.rows.push_back(row);
    }
    return report;
}

void save_schedule(const Schedule& schedule, const Scenario& scenario, const std::filesystem::path& path) {
    save_schedule_report(make_schedule_report(schedule, scenario), path);
}

void save_assignment_csv(const Schedule& schedule, const Scenario& scenario, const std::filesystem::path& path) {
    std::vector<std::string> ids;
    for (const auto& w : scenario.workers) {
        ids.push_back(w.id);
    }
    write_text(path, availability_csv(ids, schedule.assigned));
}

}  // namespace shiftfuzz
