#include "lapo/ablation.hpp"

#include <ostream>
#include <sstream>

#include "lapo/errors.hpp"
#include "lapo/io.hpp"
#include "lapo/rng.hpp"

namespace lapo {

std::string_view to_string(AblationKind kind) {
    return kind == AblationKind::Guidance ? "guidance" : "statistic";
}

AblationKind parse_ablation_kind(std::string_view name) {
    if (name == "guidance") return AblationKind::Guidance;
    if (name == "statistic") return AblationKind::Statistic;
    throw ConfigError("unknown ablation '" + std::string(name) + "' (expected guidance or statistic)");
}

std::optional<LengthMap> eval_budget_map(const RunState& state, GuidanceMode mode) {
    if (state.stage == Stage::Discovery) return std::nullopt;
    switch (mode) {
        case GuidanceMode::Exact:
            return state.map;
        case GuidanceMode::Range: {
            LengthMap mids(state.map.default_target());
            for (const auto& [id, range] : state.ranges) {
                mids.set_entry(id, {std::min(range_budget(range), mids.default_target()), true});
            }
            return mids;
        }
        case GuidanceMode::Implicit:
            return std::nullopt;
    }
    return std::nullopt;
}

EvalReport evaluate_run_state(const RunState& state, const RunConfig& cfg, const std::vector<Problem>& bank,
                              unsigned threads) {
    const auto budgets = eval_budget_map(state, cfg.guidance);
    return evaluate(state.params, cfg.env, bank, cfg.eval_samples, budgets ? &*budgets : nullptr,
                    stream_seed({cfg.seed, stream::kEval}), threads);
}

namespace {

ArmResult finish_arm(std::string name, RunConfig cfg, RunResult run, std::string log,
                     const std::vector<Problem>& bank, unsigned threads) {
    ArmResult arm;
    arm.name = std::move(name);
    arm.report = evaluate_run_state(run.final, cfg, bank, threads);
    arm.config = std::move(cfg);
    arm.run = std::move(run);
    arm.step_log = std::move(log);
    return arm;
}

}  // namespace

AblationResult run_target_statistic_ablation(const RunConfig& base, const std::vector<Problem>& bank,
                                             const RunOptions& opts) {
    AblationResult result{AblationKind::Statistic, "target_statistic", {}};
    for (auto stat : {TargetStatistic::Median, TargetStatistic::Mean, TargetStatistic::Minimum}) {
        RunConfig cfg = base;
        cfg.target_statistic = stat;
        std::ostringstream log;
        RunOptions arm_opts = opts;
        arm_opts.step_log = &log;
        RunResult run = run_lapo(cfg, bank, arm_opts);
        result.arms.push_back(
            finish_arm(std::string(to_string(stat)), std::move(cfg), std::move(run), log.str(), bank, opts.threads));
    }
    return result;
}

AblationResult run_guidance_ablation(const RunConfig& base, const std::vector<Problem>& bank,
                                     const RunOptions& opts) {
    validate_bank(bank);
    AblationResult result{AblationKind::Guidance, "guidance", {}};

    std::ostringstream discovery_log;
    RunOptions d_opts = opts;
    d_opts.step_log = &discovery_log;
    RunState checkpoint = make_initial_state(base, bank);
    run_discovery(checkpoint, bank, base, d_opts);

    for (auto mode : {GuidanceMode::Exact, GuidanceMode::Range, GuidanceMode::Implicit}) {
        RunConfig cfg = base;
        cfg.guidance = mode;
        std::ostringstream log;
        log << discovery_log.str();
        RunOptions arm_opts = opts;
        arm_opts.step_log = &log;
        RunResult run{checkpoint, checkpoint};
        run_internalization(run.final, bank, cfg, arm_opts);
        result.arms.push_back(
            finish_arm(std::string(to_string(mode)), std::move(cfg), std::move(run), log.str(), bank, opts.threads));
    }
    return result;
}

void write_ablation_csv(std::ostream& out, const AblationResult& result) {
    out << "arm,benchmark,Pass@1,#Tok\n";
    for (const auto& arm : result.arms) {
        for (const auto& b : arm.report.benchmarks) {
            out << arm.name << ',' << b.benchmark << ',' << format_pass1(b.pass1) << ','
                << format_tokens(b.avg_tokens) << '\n';
        }
        const auto& o = arm.report.overall;
        out << arm.name << ",overall," << format_pass1(o.pass1) << ',' << format_tokens(o.avg_tokens) << '\n';
    }
}

}  // namespace lapo
