#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lapo/ablation.hpp"
#include "lapo/config.hpp"
#include "lapo/errors.hpp"
#include "lapo/eval.hpp"
#include "lapo/io.hpp"
#include "lapo/pipeline.hpp"
#include "lapo/rng.hpp"
#include "lapo/traces.hpp"

namespace fs = std::filesystem;
using namespace lapo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Options {
    unsigned threads = 0;
    bool force = false;
};

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("lapo");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("LAPO_LAB_LOG")) {
        spdlog::set_level(spdlog::level::from_str(env));
    }
}

// A run directory may be reused only when empty or with --force.
void prepare_dir(const fs::path& dir, bool force) {
    std::error_code ec;
    if (fs::exists(dir, ec) && !fs::is_empty(dir, ec) && !force) {
        throw ConfigError("output directory '" + dir.string() + "' exists and is not empty (use --force)");
    }
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void prepare_file(const fs::path& file, bool force) {
    if (fs::exists(file) && !force) {
        throw ConfigError("output file '" + file.string() + "' exists (use --force)");
    }
    if (file.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(file.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + file.parent_path().string() + "': " + ec.message());
    }
}

template <typename Writer>
void write_with(const fs::path& path, Writer&& writer) {
    std::ostringstream out;
    writer(out);
    write_text_file(path, out.str());
}

void write_run_artifacts(const fs::path& dir, const RunConfig& cfg, const std::vector<Problem>& bank,
                         const RunResult& run, const std::string& step_records) {
    write_text_file(dir / "config.json", to_json(cfg).dump(2) + "\n");
    save_bank(bank, dir / "bank.json");
    save(run.discovery.params, dir / "discovery_params.json");
    save(run.discovery.map, dir / "discovery_map.json");
    save(run.final.params, dir / "params.json");
    save(run.final.map, dir / "length_map.json");
    const RunHeader header{config_hash(cfg), cfg.seed};
    write_text_file(dir / "steps.jsonl", to_json(header).dump() + "\n" + step_records);
}

void log_report(const std::string& label, const EvalReport& r) {
    spdlog::info("{}: Pass@1 {} #Tok {}", label, format_pass1(r.overall.pass1), format_tokens(r.overall.avg_tokens));
}

int cmd_train(const std::string& config_path, const std::string& output, const Options& opt) {
    RunConfig cfg = load_run_config(config_path);
    if (!output.empty()) cfg.output_dir = output;
    const fs::path dir = cfg.output_dir;
    prepare_dir(dir, opt.force);
    const auto bank = resolve_bank(cfg);
    spdlog::info("training {} problems, seed {}, config {}", bank.size(), cfg.seed, config_hash(cfg));

    std::ostringstream log;
    RunOptions ro{opt.threads, &log};
    const RunResult run = run_lapo(cfg, bank, ro);
    write_run_artifacts(dir, cfg, bank, run, log.str());

    log_report("LAPO-D", evaluate_run_state(run.discovery, cfg, bank, opt.threads));
    log_report("LAPO-I", evaluate_run_state(run.final, cfg, bank, opt.threads));
    spdlog::info("artifacts written to {}", dir.string());
    return kExitOk;
}

struct EvalArgs {
    std::string params;
    std::string map;
    std::string bank;
    std::string config;
    std::string out;
    std::string allocation;
    int samples = 32;
    bool budget_from_map = false;
    std::optional<std::uint64_t> seed;
};

int cmd_eval(const EvalArgs& a, const Options& opt) {
    if (a.budget_from_map && a.map.empty()) throw ConfigError("--budget-from-map requires --map");
    if (a.budget_from_map && !fs::exists(a.map)) throw ConfigError("length map '" + a.map + "' does not exist");
    RunConfig cfg;
    if (!a.config.empty()) cfg = load_run_config(a.config);
    const std::uint64_t seed = a.seed.value_or(cfg.seed);

    const auto params = load_policy_params(a.params);
    const auto bank = load_bank(a.bank);
    std::optional<LengthMap> map;
    if (a.budget_from_map) map = load_length_map(a.map);
    prepare_file(a.out, opt.force);
    if (!a.allocation.empty()) prepare_file(a.allocation, opt.force);

    const auto report = evaluate(params, cfg.env, bank, a.samples, map ? &*map : nullptr,
                                 stream_seed({seed, stream::kEval}), opt.threads);
    write_with(a.out, [&](std::ostream& o) { write_report_csv(o, report); });
    if (!a.allocation.empty()) {
        const auto alloc = difficulty_allocation(report);
        write_with(a.allocation, [&](std::ostream& o) { write_allocation_tsv(o, alloc); });
        spdlog::info("difficulty/length spearman rho {:.3f}", alloc.spearman_rho);
    }
    log_report("eval", report);
    return kExitOk;
}

int cmd_ablate(const std::string& config_path, const std::string& which, const std::string& output,
               const Options& opt) {
    RunConfig base = load_run_config(config_path);
    const auto kind = parse_ablation_kind(which);
    const fs::path dir = output.empty() ? fs::path(base.output_dir) / ("ablation_" + which) : fs::path(output);
    prepare_dir(dir, opt.force);
    const auto bank = resolve_bank(base);

    RunOptions ro{opt.threads, nullptr};
    const auto result = kind == AblationKind::Guidance ? run_guidance_ablation(base, bank, ro)
                                                       : run_target_statistic_ablation(base, bank, ro);

    nlohmann::json manifest;
    manifest["ablation"] = std::string(to_string(kind));
    manifest["varied_field"] = result.varied_field;
    manifest["base_config_hash"] = config_hash(base);
    manifest["arms"] = nlohmann::json::array();
    for (const auto& arm : result.arms) {
        const fs::path arm_dir = dir / arm.name;
        prepare_dir(arm_dir, true);
        write_run_artifacts(arm_dir, arm.config, bank, arm.run, arm.step_log);
        write_with(arm_dir / "eval.csv", [&](std::ostream& o) { write_report_csv(o, arm.report); });
        manifest["arms"].push_back({{"name", arm.name},
                                    {"config_hash", config_hash(arm.config)},
                                    {"diff_from_first_arm", config_diff(result.arms.front().config, arm.config)}});
        log_report(arm.name, arm.report);
    }
    write_with(dir / "ablation.csv", [&](std::ostream& o) { write_ablation_csv(o, result); });
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    spdlog::info("ablation written to {}", dir.string());
    return kExitOk;
}

int cmd_analyze(const std::string& traces, const std::string& lexicon, const std::string& out, const Options& opt) {
    const auto cfg = lexicon.empty() ? KeywordCategoryConfig::defaults() : load_lexicon(lexicon);
    const auto report = analyze_traces(fs::path(traces), cfg);
    prepare_file(out, opt.force);
    write_with(out, [&](std::ostream& o) { write_trace_tsv(o, report); });
    if (report.skipped > 0) spdlog::warn("skipped {} malformed trace records", report.skipped);
    spdlog::info("trace frequencies written to {}", out);
    return kExitOk;
}

// Re-evaluates the three checkpoints of a training run directory.
int cmd_report(const std::string& run_dir, const Options& opt) {
    const fs::path dir = run_dir;
    const RunConfig cfg = load_run_config(dir / "config.json");
    const auto bank = load_bank(dir / "bank.json");
    const fs::path csv = dir / "report.csv";
    const fs::path tsv = dir / "allocation.tsv";
    prepare_file(csv, opt.force);
    prepare_file(tsv, opt.force);

    RunState base = make_initial_state(cfg, bank);
    RunState disc = base;
    disc.params = load_policy_params(dir / "discovery_params.json");
    disc.map = load_length_map(dir / "discovery_map.json");
    RunState fin = disc;
    fin.params = load_policy_params(dir / "params.json");
    fin.map = load_length_map(dir / "length_map.json");
    fin.stage = Stage::Internalization;
    if (cfg.guidance == GuidanceMode::Range) {
        throw ConfigError("report does not support range-guidance runs (range table is not persisted)");
    }

    const std::pair<const char*, const RunState*> models[] = {{"base", &base}, {"LAPO-D", &disc}, {"LAPO-I", &fin}};
    std::ostringstream out;
    out << "model,benchmark,Pass@1,#Tok\n";
    EvalReport last;
    for (const auto& [name, state] : models) {
        last = evaluate_run_state(*state, cfg, bank, opt.threads);
        for (const auto& b : last.benchmarks) {
            out << name << ',' << b.benchmark << ',' << format_pass1(b.pass1) << ',' << format_tokens(b.avg_tokens)
                << '\n';
        }
        out << name << ",overall," << format_pass1(last.overall.pass1) << ','
            << format_tokens(last.overall.avg_tokens) << '\n';
        log_report(name, last);
    }
    write_text_file(csv, out.str());
    const auto alloc = difficulty_allocation(last);
    write_with(tsv, [&](std::ostream& o) { write_allocation_tsv(o, alloc); });
    spdlog::info("difficulty/length spearman rho {:.3f}", alloc.spearman_rho);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Length-adaptive policy optimization simulation lab"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_option("--threads", opt.threads, "Worker cap (0 = one per hardware thread)")->capture_default_str();
    app.add_flag("--force", opt.force, "Overwrite existing outputs");

    std::string config_path, output;
    auto* train = app.add_subcommand("train", "Run Discovery then Internalization");
    train->add_option("config", config_path, "Run config (JSON)")->required();
    train->add_option("-o,--output", output, "Output directory (overrides output_dir)");

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "Evaluate policy parameters on a bank");
    eval->add_option("--params", ea.params, "Policy params JSON")->required();
    eval->add_option("--bank", ea.bank, "Problem bank JSON")->required();
    eval->add_option("--map", ea.map, "Length map JSON");
    eval->add_flag("--budget-from-map", ea.budget_from_map, "Condition on map targets");
    eval->add_option("--samples", ea.samples, "Samples per problem")->capture_default_str()->check(CLI::PositiveNumber);
    eval->add_option("--config", ea.config, "Run config supplying env model and seed");
    eval->add_option("--seed", ea.seed, "Evaluation seed (defaults to the config seed)");
    eval->add_option("--out", ea.out, "Report CSV path")->required();
    eval->add_option("--allocation", ea.allocation, "Optional tier/length TSV path");

    std::string which;
    auto* ablate = app.add_subcommand("ablate", "Run an ablation");
    ablate->add_option("config", config_path, "Run config (JSON)")->required();
    ablate->add_option("--which", which, "guidance or statistic")->required()->check(
        CLI::IsMember({"guidance", "statistic"}));
    ablate->add_option("-o,--output", output, "Output directory");

    std::string traces, lexicon, tsv_out;
    auto* analyze = app.add_subcommand("analyze", "Keyword frequencies of reasoning traces");
    analyze->add_option("traces", traces, "Traces JSONL")->required();
    analyze->add_option("--lexicon", lexicon, "Lexicon JSON {category: [keywords]}");
    analyze->add_option("--out", tsv_out, "Output TSV")->required();

    std::string run_dir;
    auto* report = app.add_subcommand("report", "Evaluate the checkpoints of a training run");
    report->add_option("run_dir", run_dir, "Directory written by train")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*train) return cmd_train(config_path, output, opt);
        if (*eval) return cmd_eval(ea, opt);
        if (*ablate) return cmd_ablate(config_path, which, output, opt);
        if (*analyze) return cmd_analyze(traces, lexicon, tsv_out, opt);
        if (*report) return cmd_report(run_dir, opt);
    } catch (const IoError& e) {
        spdlog::error("{}", e.what());
        return kExitIo;
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return kExitConfig;
    } catch (const fs::filesystem_error& e) {
        spdlog::error("{}", e.what());
        return kExitIo;
    }
    return kExitConfig;
}
