#include "shiftfuzz/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "shiftfuzz/evaluation.hpp"
#include "shiftfuzz/scenario_io.hpp"
#include "shiftfuzz/trainer.hpp"

namespace shiftfuzz {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kSeedEnv = "SHIFTFUZZ_SEED";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
        try {
            std::size_t used = 0;
            const auto value = std::stoull(env, &used);
            if (used == std::string(env).size()) {
                return value;
            }
        } catch (const std::exception&) {
        }
        throw UsageError(std::string(kSeedEnv) + " must be a non-negative integer");
    }
    return fallback;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
    }
}

std::string numbered(const std::string& stem, std::size_t i, const std::string& ext) {
    std::string n = std::to_string(i);
    if (n.size() < 3) {
        n.insert(0, 3 - n.size(), '0');
    }
    return stem + "_" + n + ext;
}

// Settings a config file (or key=value list) may carry.
struct ResolvedConfig {
    GaConfig ga;
    ScheduleOptions schedule;
};

void apply_config_json(const json& doc, ResolvedConfig& cfg) {
    if (!doc.is_object()) {
        throw FormatError("config: expected an object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "ga") {
            cfg.ga = ga_config_from_json(value, cfg.ga);
        } else if (key == "schedule") {
            for (const auto& [k, v] : value.items()) {
                if (k == "gamma" && v.is_number()) {
                    cfg.schedule.gamma = v.get<double>();
                } else if (k == "hard_weekly_limit" && v.is_boolean()) {
                    cfg.schedule.hard_weekly_limit = v.get<bool>();
                } else {
                    throw FormatError("config.schedule." + k + ": unknown key or wrong type");
                }
            }
        } else if (key == "format" || key == "version" || key == "metadata") {
            continue;
        } else {
            throw FormatError("config." + key + ": unknown key");
        }
    }
}

// "pop=50,gens=20,n=5" shorthand.
void apply_config_pairs(const std::string& text, ResolvedConfig& cfg) {
    static const std::vector<std::pair<std::string, std::string>> aliases = {
        {"pop", "population_size"}, {"gens", "max_generations"}, {"stall", "stall_generations"},
        {"elite", "elite_count"},   {"xover", "crossover_fraction"}, {"n", "n_scenarios"},
    };
    json ga = json::object();
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw UsageError("--config: expected key=value, got '" + item + "'");
        }
        std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        for (const auto& [alias, full] : aliases) {
            if (key == alias) {
                key = full;
            }
        }
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::parse_error&) {
            throw UsageError("--config: value for '" + key + "' is not a number or boolean");
        }
        if (key == "gamma") {
            if (!parsed.is_number()) {
                throw UsageError("--config: gamma must be a number");
            }
            cfg.schedule.gamma = parsed.get<double>();
        } else if (key == "hard_weekly_limit") {
            if (!parsed.is_boolean()) {
                throw UsageError("--config: hard_weekly_limit must be true or false");
            }
            cfg.schedule.hard_weekly_limit = parsed.get<bool>();
        } else {
            ga[key] = parsed;
        }
    }
    try {
        cfg.ga = ga_config_from_json(ga, cfg.ga);
    } catch (const FormatError& e) {
        throw UsageError(std::string("--config: ") + e.what());
    }
}

void check_gamma(double gamma) {
    if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
        throw UsageError("gamma must be a finite value >= 1");
    }
}

std::vector<fs::path> expand_scenarios(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(p)) {
                const auto name = entry.path().filename().string();
                if (entry.is_regular_file() && entry.path().extension() == ".json" && name.rfind("scenario", 0) == 0) {
                    found.push_back(entry.path());
                }
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw std::runtime_error("scenario path not found: " + p.string());
        }
    }
    if (files.empty()) {
        throw std::runtime_error("no scenario files found");
    }
    return files;
}

ordered_json run_record(const std::string& command, ordered_json settings) {
    return {{"command", command}, {"settings", std::move(settings)}, {"metadata", {{"created", utc_timestamp()}}}};
}

// --- generate ---------------------------------------------------------------------

struct GenerateArgs {
    std::size_t pool_size = 40;
    std::string pool_path;
    double density_lo = kDefaultDensityLo;
    double density_hi = kDefaultDensityHi;
    std::size_t workers = 20;
    std::size_t count = 30;
    std::optional<std::uint64_t> seed;
    std::string out = "scenarios";
    bool csv = false;
};

int cmd_generate(const GenerateArgs& a) {
    const std::uint64_t seed = resolve_seed(a.seed, 1);
    if (!(a.density_lo >= 0.0 && a.density_lo <= a.density_hi && a.density_hi <= 1.0)) {
        throw UsageError("density range must satisfy 0 <= lo <= hi <= 1");
    }
    const fs::path out(a.out);
    ensure_dir(out);
    AvailabilityPool pool;
    if (!a.pool_path.empty()) {
        pool = load_pool(a.pool_path);
    } else {
        Rng pool_rng(derive_seed(seed, 0x9001));
        pool = generate_pool(a.pool_size, a.density_lo, a.density_hi, pool_rng);
        save_pool(pool, out / "pool.csv");
    }
    if (a.workers > pool.size()) {
        throw UsageError("--workers " + std::to_string(a.workers) + " exceeds the pool size " +
                         std::to_string(pool.size()));
    }
    for (std::size_t i = 0; i < a.count; ++i) {
        Rng rng(derive_seed(seed, 0x9002, i));
        const Scenario s = generate_scenario(pool, a.workers, rng);
        save_scenario(s, out / numbered("scenario", i, ".json"));
        if (a.csv) {
            save_scenario_csv(s, out / numbered("scenario", i, "_availability.csv"),
                              out / numbered("scenario", i, "_prefs.csv"));
        }
    }
    write_json(out / "run.json",
               run_record("generate", {{"seed", seed},
                                       {"pool", a.pool_path.empty() ? std::string("generated") : a.pool_path},
                                       {"pool_size", pool.size()},
                                       {"density", {a.density_lo, a.density_hi}},
                                       {"workers", a.workers},
                                       {"count", a.count}}));
    std::cerr << "wrote " << a.count << " scenarios of " << a.workers << " workers to " << out.string() << "\n";
    return 0;
}

// --- train --------------------------------------------------------------------------

struct TrainArgs {
    std::vector<std::string> scenarios;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> gamma;
    bool hard_limit = false;
    std::optional<std::size_t> threads;
    std::string out = "model";
    bool quiet = false;
};

int cmd_train(const TrainArgs& a) {
    ResolvedConfig cfg;
    if (!a.config.empty()) {
        if (fs::exists(a.config)) {
            apply_config_json(read_json(a.config), cfg);
        } else if (a.config.find('=') != std::string::npos) {
            apply_config_pairs(a.config, cfg);
        } else {
            throw std::runtime_error("config file not found: " + a.config);
        }
    }
    cfg.ga.seed = resolve_seed(a.seed, cfg.ga.seed);
    if (a.gamma) {
        cfg.schedule.gamma = *a.gamma;
    }
    if (a.hard_limit) {
        cfg.schedule.hard_weekly_limit = true;
    }
    if (a.threads) {
        cfg.ga.threads = *a.threads;
    }
    check_gamma(cfg.schedule.gamma);
    try {
        cfg.ga.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("invalid configuration: ") + e.what());
    }

    const auto files = expand_scenarios(a.scenarios);
    std::vector<Scenario> scenarios;
    std::vector<std::string> used;
    for (const auto& f : files) {
        if (scenarios.size() == cfg.ga.n_scenarios) {
            break;
        }
        scenarios.push_back(load_scenario(f));
        used.push_back(f.string());
    }
    if (scenarios.size() < cfg.ga.n_scenarios) {
        std::cerr << "warning: n_scenarios=" << cfg.ga.n_scenarios << " but only " << scenarios.size()
                  << " scenario files given; training on all of them\n";
    }

    const fs::path out(a.out);
    ensure_dir(out);
    const auto start = std::chrono::steady_clock::now();
    const TrainingResult result =
        evolve(cfg.ga, scenarios, cfg.schedule, {}, [&](const GenerationStats& g) {
            if (!a.quiet) {
                std::cerr << "generation " << g.generation << ": best " << format_real(g.best) << ", mean "
                          << format_real(g.mean) << "\n";
            }
        });
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ModelFile model = make_model(result.best, cfg.schedule);
    model.training = TrainingMetadata{cfg.ga, cfg.ga.seed, result.best_fitness, result.history};
    model.created = utc_timestamp();
    save_model(model, out / "model.json");

    std::string history = "generation,best,mean\n";
    for (const auto& g : result.history) {
        history += std::to_string(g.generation) + ',' + format_real(g.best) + ',' + format_real(g.mean) + '\n';
    }
    write_text(out / "history.csv", history);
    write_json(out / "config.json",
               run_record("train", {{"ga", ga_config_to_json(cfg.ga)},
                                    {"schedule",
                                     {{"gamma", cfg.schedule.gamma},
                                      {"hard_weekly_limit", cfg.schedule.hard_weekly_limit}}},
                                    {"scenarios", used},
                                    {"generations", result.history.size()},
                                    {"stalled", result.stalled},
                                    {"final_fitness", result.best_fitness}}));
    std::cerr << "best fitness " << format_real(result.best_fitness) << " after " << result.history.size()
              << " generations (" << (result.stalled ? "stalled" : "generation limit") << ", "
              << static_cast<long>(seconds) << " s)\n";
    return 0;
}

// --- schedule -----------------------------------------------------------------------

struct ScheduleArgs {
    std::string model;
    std::string scenario;
    std::string availability;
    std::string prefs;
    std::optional<double> gamma;
    std::optional<std::uint64_t> seed;
    std::string out = "schedule.csv";
};

int cmd_schedule(const ScheduleArgs& a) {
    const ModelFile model = load_model(a.model);
    Scenario scenario;
    if (!a.scenario.empty()) {
        scenario = load_scenario(a.scenario);
    } else if (!a.availability.empty() && !a.prefs.empty()) {
        scenario = load_scenario_csv(a.availability, a.prefs);
    } else {
        throw UsageError("give --scenario, or both --availability and --prefs");
    }
    ScheduleOptions options = model.options;
    if (a.gamma) {
        options.gamma = *a.gamma;
    }
    check_gamma(options.gamma);
    const std::uint64_t seed = resolve_seed(a.seed, 1);
    Rng rng(seed);
    const Schedule schedule = build_schedule(scenario, model.fis, options, rng);

    const fs::path out(a.out);
    if (out.has_parent_path()) {
        ensure_dir(out.parent_path());
    }
    save_schedule(schedule, scenario, out);
    fs::path slots = out;
    slots.replace_filename(out.stem().string() + "_slots.csv");
    save_assignment_csv(schedule, scenario, slots);
    fs::path record = out;
    record.replace_filename(out.stem().string() + ".run.json");
    const double cost = schedule_cost(schedule, scenario);
    write_json(record, run_record("schedule", {{"model", a.model},
                                               {"scenario", a.scenario.empty() ? a.availability : a.scenario},
                                               {"gamma", options.gamma},
                                               {"hard_weekly_limit", options.hard_weekly_limit},
                                               {"seed", seed},
                                               {"cost", cost},
                                               {"shortfall_slots", schedule.shortfalls.size()}}));

    for (const auto& s : schedule.shortfalls) {
        const Slot& slot = week_slots()[s.slot];
        std::cerr << "shortfall: " << day_label(slot.day) << ' ' << hour_label(slot.hour) << " has " << s.assigned
                  << " of " << s.required << " required workers\n";
    }
    for (std::size_t w = 0; w < scenario.worker_count(); ++w) {
        if (schedule.weekly_hours[w] > scenario.workers[w].weekly_limit) {
            std::cerr << "weekly limit exceeded: " << scenario.workers[w].id << " assigned "
                      << schedule.weekly_hours[w] << " h (limit " << scenario.workers[w].weekly_limit << ")\n";
        }
    }
    std::cerr << "schedule cost " << format_real(cost) << ", " << schedule.shortfalls.size()
              << " shortfall slots\n";
    return 0;
}

// --- evaluate ------------------------------------------------------------------------

struct EvaluateArgs {
    std::string model;
    std::string pool;
    std::size_t pool_size = 30;
    double density_lo = kDefaultDensityLo;
    double density_hi = kDefaultDensityHi;
    std::vector<std::size_t> workers;
    std::size_t batch = 200;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::string out = "evaluation";
};

int cmd_evaluate(const EvaluateArgs& a) {
    const ModelFile model = load_model(a.model);
    const std::uint64_t seed = resolve_seed(a.seed, 1);
    AvailabilityPool pool;
    if (!a.pool.empty()) {
        pool = load_pool(a.pool);
    } else {
        Rng pool_rng(derive_seed(seed, 0x9003));
        pool = generate_pool(a.pool_size, a.density_lo, a.density_hi, pool_rng);
    }
    const std::vector<std::size_t> counts = a.workers.empty() ? std::vector<std::size_t>{20, 16} : a.workers;
    for (std::size_t c : counts) {
        if (c > pool.size()) {
            throw UsageError("--workers " + std::to_string(c) + " exceeds the pool size " + std::to_string(pool.size()));
        }
    }
    const StaffingReport report = compare_staffing(model, pool, counts, a.batch, seed, a.threads.value_or(0));

    const fs::path out(a.out);
    ensure_dir(out);
    ordered_json doc = staffing_to_json(report);
    doc["settings"] = {{"model", a.model},
                       {"pool", a.pool.empty() ? std::string("generated") : a.pool},
                       {"pool_size", pool.size()},
                       {"batch", a.batch},
                       {"seed", seed},
                       {"gamma", model.options.gamma},
                       {"hard_weekly_limit", model.options.hard_weekly_limit}};
    doc["metadata"] = {{"created", utc_timestamp()}};
    write_json(out / "distribution.json", doc);
    write_text(out / "boxplot.csv", boxplot_csv(report));
    for (const auto& d : report.distributions) {
        save_schedule(d.median_schedule, d.median_scenario,
                      out / ("median_schedule_" + std::to_string(d.worker_count) + ".csv"));
        std::cerr << d.worker_count << " workers: median cost " << format_real(d.summary.median) << ", variance "
                  << format_real(d.variance) << ", weekly-limit violations " << d.weekly_limit_violations << "/"
                  << d.worker_instances << "\n";
    }
    for (const auto& c : report.comparisons) {
        std::cerr << "median(" << c.a << ") < median(" << c.b << "): " << (c.median_lower ? "yes" : "no")
                  << "; variance(" << c.b << ") > variance(" << c.a << "): " << (c.variance_higher ? "yes" : "no")
                  << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Fuzzy-logic shift scheduling for part-time workforces"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Generate a synthetic availability pool and scenarios");
    g->add_option("--pool-size", gen.pool_size, "Synthetic pool size")->check(CLI::PositiveNumber);
    g->add_option("--pool", gen.pool_path, "Existing pool CSV instead of a synthetic one");
    g->add_option("--density-lo", gen.density_lo, "Lowest per-worker availability density");
    g->add_option("--density-hi", gen.density_hi, "Highest per-worker availability density");
    g->add_option("--workers", gen.workers, "Workers per scenario")->check(CLI::PositiveNumber);
    g->add_option("--count", gen.count, "Number of scenarios")->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.seed, "Random seed (default $SHIFTFUZZ_SEED or 1)");
    g->add_option("--out", gen.out, "Output directory");
    g->add_flag("--csv", gen.csv, "Also write availability/preference CSV pairs");

    TrainArgs train;
    auto* t = app.add_subcommand("train", "Learn rule tables and output membership functions");
    t->add_option("--scenarios", train.scenarios, "Scenario files or directories")->required();
    t->add_option("--config", train.config, "JSON config file or key=value list (pop=50,gens=20,n=5)");
    t->add_option("--seed", train.seed, "Random seed");
    t->add_option("--gamma", train.gamma, "Adjacency scaling factor (>= 1)");
    t->add_flag("--hard-limit", train.hard_limit, "Never schedule a worker past their weekly limit");
    t->add_option("--threads", train.threads, "Fitness evaluation threads (0 = all cores)");
    t->add_option("--out", train.out, "Output directory");
    t->add_flag("--quiet", train.quiet, "No per-generation progress");

    ScheduleArgs sched;
    auto* s = app.add_subcommand("schedule", "Build one weekly schedule");
    s->add_option("--model", sched.model, "Trained model.json")->required();
    s->add_option("--scenario", sched.scenario, "Scenario JSON bundle");
    s->add_option("--availability", sched.availability, "Availability CSV");
    s->add_option("--prefs", sched.prefs, "Preferences CSV");
    s->add_option("--gamma", sched.gamma, "Override the model's adjacency factor");
    s->add_option("--seed", sched.seed, "Tie-breaking seed");
    s->add_option("--out", sched.out, "Schedule CSV path");

    EvaluateArgs eval;
    auto* e = app.add_subcommand("evaluate", "Cost distributions for one or more workforce sizes");
    e->add_option("--model", eval.model, "Trained model.json")->required();
    e->add_option("--pool", eval.pool, "Test pool CSV (default: synthetic)");
    e->add_option("--pool-size", eval.pool_size, "Synthetic test pool size")->check(CLI::PositiveNumber);
    e->add_option("--density-lo", eval.density_lo, "Lowest per-worker availability density");
    e->add_option("--density-hi", eval.density_hi, "Highest per-worker availability density");
    e->add_option("--workers", eval.workers, "Workforce size; repeat for several (default 20 16)")
        ->check(CLI::PositiveNumber);
    e->add_option("--batch", eval.batch, "Scenarios per workforce size")->check(CLI::PositiveNumber);
    e->add_option("--seed", eval.seed, "Random seed");
    e->add_option("--threads", eval.threads, "Worker threads (0 = all cores)");
    e->add_option("--out", eval.out, "Output directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (g->parsed()) {
            return cmd_generate(gen);
        }
        if (t->parsed()) {
            return cmd_train(train);
        }
        if (s->parsed()) {
            return cmd_schedule(sched);
        }
        return cmd_evaluate(eval);
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}

}  // namespace shiftfuzz
