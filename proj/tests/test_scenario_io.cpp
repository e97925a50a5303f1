#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include "shiftfuzz/scenario_io.hpp"
#include "temp_dir.hpp"

using namespace shiftfuzz;

namespace {

Scenario sample_scenario(std::uint64_t seed, std::size_t workers = 20) {
    Rng pool_rng(seed);
    const AvailabilityPool pool = generate_pool(40, kDefaultDensityLo, kDefaultDensityHi, pool_rng);
    Rng rng(seed + 1);
    return generate_scenario(pool, workers, rng);
}

std::string error_of(auto&& fn) {
    try {
        fn();
    } catch (const FormatError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

// Replaces line `index` (0-based) of a text file.
void rewrite_line(const std::filesystem::path& path, std::size_t index, const std::string& replacement) {
    std::string text = read_text(path);
    std::size_t start = 0;
    for (std::size_t i = 0; i < index; ++i) {
        start = text.find('\n', start) + 1;
    }
    const std::size_t end = text.find('\n', start);
    text.replace(start, end - start, replacement);
    write_text(path, text);
}

ModelFile trained_looking_model() {
    Rng rng(31);
    ModelFile m = make_model(random_chromosome(rng), {2.5, false});
    TrainingMetadata t;
    t.config.population_size = 30;
    t.config.elite_count = 3;
    t.seed = 99;
    t.final_fitness = 1.0 / 3.0;
    t.history = {{0, 2.0 / 3.0, 0.9}, {1, 1.0 / 3.0, 0.7000000000000001}};
    m.training = t;
    m.created = "2026-01-01T00:00:00Z";
    return m;
}

}  // namespace

TEST_CASE("generate_pool") {
    Rng rng(1);
    const AvailabilityPool full = generate_pool(5, 1.0, 1.0, rng);
    for (const auto& row : full.rows) {
        CHECK(std::all_of(row.begin(), row.end(), [](auto v) { return v == 1; }));
    }
    const AvailabilityPool empty = generate_pool(5, 0.0, 0.0, rng);
    for (const auto& row : empty.rows) {
        CHECK(std::all_of(row.begin(), row.end(), [](auto v) { return v == 0; }));
    }
    CHECK(full.ids.front() == "P001");
    CHECK_THROWS_AS(generate_pool(5, 0.7, 0.6, rng), std::invalid_argument);
    CHECK_THROWS_AS(generate_pool(5, -0.1, 0.6, rng), std::invalid_argument);

    // 51 Bernoulli draws: 4 standard deviations at p = 0.5 is about 0.28.
    const AvailabilityPool pool = generate_pool(40, kDefaultDensityLo, kDefaultDensityHi, rng);
    double total = 0.0;
    for (const auto& row : pool.rows) {
        const double mean = static_cast<double>(std::count(row.begin(), row.end(), 1)) / kSlotCount;
        CHECK(mean >= kDefaultDensityLo - 0.28);
        CHECK(mean <= kDefaultDensityHi + 0.28);
        total += mean;
    }
    CHECK(total / 40.0 == doctest::Approx(0.75).epsilon(0.1));
}

TEST_CASE("generate_scenario") {
    Rng pool_rng(3);
    const AvailabilityPool pool = generate_pool(40, kDefaultDensityLo, kDefaultDensityHi, pool_rng);
    Rng a(7), b(7);
    const Scenario s = generate_scenario(pool, 20, a);
    CHECK(s == generate_scenario(pool, 20, b));
    CHECK(s.worker_count() == 20);
    CHECK_NOTHROW(s.validate());
    std::set<std::string> ids;
    for (std::size_t w = 0; w < s.worker_count(); ++w) {
        const auto& spec = s.workers[w];
        ids.insert(spec.id);
        CHECK(spec.preferred_weekly_hours >= 5);
        CHECK(spec.preferred_weekly_hours <= 15);
        CHECK(spec.preferred_shift_length >= 3);
        CHECK(spec.preferred_shift_length <= 8);
        CHECK(spec.weekly_limit == 25);
        const auto at = std::find(pool.ids.begin(), pool.ids.end(), spec.id);
        REQUIRE(at != pool.ids.end());
        CHECK(s.availability[w] == pool.rows[static_cast<std::size_t>(at - pool.ids.begin())]);
    }
    CHECK(ids.size() == 20);

    Rng c(7);
    CHECK(generate_scenario(pool, 16, c).worker_count() == 16);
    CHECK_THROWS_AS(generate_scenario(pool, 41, c), std::invalid_argument);
}

TEST_CASE("scenario CSV round trip and errors") {
    TempDir dir("csv");
    const Scenario s = sample_scenario(5);
    const auto avail = dir / "availability.csv";
    const auto prefs = dir / "prefs.csv";
    save_scenario_csv(s, avail, prefs);
    const Scenario back = load_scenario_csv(avail, prefs);
    CHECK(back == s);
    CHECK(back.worker_count() == 20);

    const std::string first_avail = read_text(avail);
    const std::string first_prefs = read_text(prefs);
    save_scenario_csv(back, avail, prefs);
    CHECK(read_text(avail) == first_avail);
    CHECK(read_text(prefs) == first_prefs);
    CHECK(first_avail.rfind("day,hour,", 0) == 0);
    CHECK(contains(first_avail, "\nMon,8:30 AM - 9:30 AM,"));

    SUBCASE("short row") {
        // Row 4 of the file is slot 3; drop its last cell.
        std::string line = "Mon,10:30 AM - 11:30 AM";
        for (std::size_t w = 0; w + 1 < s.worker_count(); ++w) {
            line += ",1";
        }
        rewrite_line(avail, 3, line);
        const std::string msg = error_of([&] { load_scenario_csv(avail, prefs); });
        CHECK(contains(msg, "row 4"));
        CHECK(contains(msg, "expected 22 columns, found 21"));
    }
    SUBCASE("non-binary value") {
        std::string line = "Mon,10:30 AM - 11:30 AM,1,2";
        for (std::size_t w = 2; w < s.worker_count(); ++w) {
            line += ",0";
        }
        rewrite_line(avail, 3, line);
        const std::string msg = error_of([&] { load_scenario_csv(avail, prefs); });
        CHECK(contains(msg, "row 4, column 4"));
        CHECK(contains(msg, "got '2'"));
    }
    SUBCASE("out-of-range preference") {
        rewrite_line(prefs, 2, s.workers[1].id + ",30,4,25");
        const std::string msg = error_of([&] { load_scenario_csv(avail, prefs); });
        CHECK(contains(msg, "row 3, column 2"));
        CHECK(contains(msg, "preferred_weekly_hours"));
    }
    SUBCASE("missing slot row") {
        std::string text = read_text(avail);
        text.erase(text.rfind('\n', text.size() - 2) + 1);
        write_text(avail, text);
        CHECK(contains(error_of([&] { load_scenario_csv(avail, prefs); }), "expected 51 slot rows, found 50"));
    }
}

TEST_CASE("scenario bundle round trip and errors") {
    TempDir dir("bundle");
    const Scenario s = sample_scenario(9);
    const auto path = dir / "scenario.json";
    save_scenario(s, path);
    const std::string first = read_text(path);
    const Scenario back = load_scenario(path);
    CHECK(back == s);
    save_scenario(back, dir / "again.json");
    CHECK(read_text(dir / "again.json") == first);

    nlohmann::json doc = nlohmann::json::parse(first);
    SUBCASE("array availability is accepted") {
        nlohmann::json bits = nlohmann::json::array();
        for (auto v : s.availability[0]) {
            bits.push_back(static_cast<int>(v));
        }
        doc["workers"][0]["availability"] = bits;
        CHECK(scenario_from_json(doc) == s);
    }
    SUBCASE("50 slots") {
        doc["workers"][2]["availability"] = std::string(50, '1');
        const std::string msg = error_of([&] { scenario_from_json(doc); });
        CHECK(contains(msg, "scenario.workers[2].availability: expected 51 slots, found 50"));
    }
    SUBCASE("value 2") {
        std::string bits(51, '0');
        bits[17] = '2';
        doc["workers"][1]["availability"] = bits;
        const std::string msg = error_of([&] { scenario_from_json(doc); });
        CHECK(contains(msg, "scenario.workers[1].availability[17]"));
        CHECK(contains(msg, "got '2'"));
    }
    SUBCASE("preference out of range") {
        doc["workers"][0]["preferred_weekly_hours"] = 26;
        CHECK(contains(error_of([&] { scenario_from_json(doc); }), "preferred_weekly_hours"));
    }
    SUBCASE("future version") {
        doc["version"] = 7;
        CHECK(contains(error_of([&] { scenario_from_json(doc); }), "unsupported format version 7"));
    }
}

TEST_CASE("pool round trip") {
    TempDir dir("pool");
    Rng rng(2);
    const AvailabilityPool pool = generate_pool(12, 0.3, 0.9, rng);
    save_pool(pool, dir / "pool.csv");
    CHECK(load_pool(dir / "pool.csv") == pool);
}

TEST_CASE("model round trip") {
    TempDir dir("model");
    const ModelFile m = trained_looking_model();
    const auto path = dir / "model.json";
    save_model(m, path);
    const std::string first = read_text(path);
    const ModelFile back = load_model(path);
    CHECK(back == m);
    CHECK(back.training->history[1].mean == 0.7000000000000001);
    save_model(back, dir / "again.json");
    CHECK(read_text(dir / "again.json") == first);

    // A model without a chromosome or training block still loads.
    ModelFile bare = make_model(Chromosome{}, {});
    bare.chromosome.reset();
    save_model(bare, dir / "bare.json");
    CHECK(load_model(dir / "bare.json") == bare);

    nlohmann::json doc = nlohmann::json::parse(first);
    SUBCASE("missing rule cell") {
        doc["daily"]["rules"][1].erase(2);
        CHECK(contains(error_of([&] { model_from_json(doc); }), "model.daily.rules[1][2]: missing rule cell"));
    }
    SUBCASE("unknown label") {
        doc["weekly"]["rules"][0][0] = "Huge";
        CHECK(contains(error_of([&] { model_from_json(doc); }), "model.weekly.rules[0][0]"));
    }
    SUBCASE("future version") {
        doc["version"] = 2;
        CHECK(contains(error_of([&] { model_from_json(doc); }), "unsupported format version 2"));
    }
    SUBCASE("wrong format tag") {
        doc["format"] = "something-else";
        CHECK_THROWS_AS(model_from_json(doc), FormatError);
    }
    SUBCASE("bad gamma") {
        doc["schedule"]["gamma"] = 0.5;
        CHECK_THROWS_AS(model_from_json(doc), FormatError);
    }
}

TEST_CASE("ga config json") {
    GaConfig cfg;
    cfg.population_size = 64;
    cfg.mf_mutation_sigma = 0.3;
    const GaConfig back = ga_config_from_json(nlohmann::json::parse(ga_config_to_json(cfg).dump()));
    CHECK(back == cfg);
    const GaConfig partial = ga_config_from_json(nlohmann::json{{"max_generations", 7}});
    CHECK(partial.max_generations == 7);
    CHECK(partial.population_size == GaConfig{}.population_size);
    CHECK_THROWS_AS(ga_config_from_json(nlohmann::json{{"populaton_size", 7}}), FormatError);
}

TEST_CASE("schedule report") {
    TempDir dir("report");
    const Scenario s = sample_scenario(13);
    Rng rng(4);
    const Schedule sched = build_schedule(s, make_model(Chromosome{}, {}).fis, {}, rng);
    const auto path = dir / "schedule.csv";
    save_schedule(sched, s, path);
    const ScheduleReport report = load_schedule_report(path);
    REQUIRE(report.rows.size() == 20);
    for (std::size_t w = 0; w < 20; ++w) {
        const auto& row = report.rows[w];
        int total = 0;
        for (int d : row.daily) {
            total += d;
        }
        CHECK(total == row.assigned_weekly);
        CHECK(row.assigned_weekly == sched.weekly_hours[w]);
        CHECK(row.difference == row.assigned_weekly - row.requested_weekly);
    }
    const std::string first = read_text(path);
    save_schedule_report(report, dir / "again.csv");
    CHECK(read_text(dir / "again.csv") == first);

    // Nobody available: all assigned columns are zero.
    Scenario idle = s;
    for (auto& row : idle.availability) {
        row.fill(0);
    }
    Rng rng2(4);
    const ScheduleReport empty = make_schedule_report(build_schedule(idle, make_model(Chromosome{}, {}).fis, {}, rng2), idle);
    for (const auto& row : empty.rows) {
        CHECK(row.assigned_weekly == 0);
        CHECK(row.availability_pct == 0.0);
        CHECK(row.daily == std::array<int, kDays>{});
    }

    // 6 requested and 6 assigned gives difference 0.
    ScheduleReportRow six{"X", 50.0, 6, 6, 0, 0, 3, {3, 3, 0, 0, 0}};
    save_schedule_report({{six}}, dir / "six.csv");
    CHECK(load_schedule_report(dir / "six.csv").rows[0].difference == 0);

    rewrite_line(dir / "six.csv", 1, "X,50,6,7,1,1,3,3,3,0,0,0");
    CHECK(contains(error_of([&] { load_schedule_report(dir / "six.csv"); }), "inconsistent hour totals"));
}

TEST_CASE("fuzzed valid scenarios survive save and load") {
    TempDir dir("fuzz");
    Rng rng(77);
    for (int i = 0; i < 30; ++i) {
        const std::size_t size = static_cast<std::size_t>(rng.uniform_int(1, 30));
        const double lo = rng.uniform();
        const AvailabilityPool pool = generate_pool(size, lo, rng.uniform(lo, 1.0), rng);
        Scenario s = generate_scenario(pool, static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(size))), rng);
        s.coverage_required = static_cast<int>(rng.uniform_int(1, 6));
        save_scenario(s, dir / "s.json");
        CHECK(load_scenario(dir / "s.json") == s);
        save_scenario_csv(s, dir / "a.csv", dir / "p.csv");
        CHECK(load_scenario_csv(dir / "a.csv", dir / "p.csv", s.coverage_required) == s);
    }
}

TEST_CASE("format_real round trips") {
    Rng rng(8);
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.uniform(-1e3, 1e3) * std::pow(10.0, static_cast<double>(rng.uniform_int(-12, 12)));
        CHECK(std::stod(format_real(x)) == x);
    }
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(3.0) == "3");
}
