#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lapo/config.hpp"
#include "lapo/eval.hpp"
#include "lapo/pipeline.hpp"

namespace lapo {

enum class AblationKind { Guidance, Statistic };

std::string_view to_string(AblationKind kind);
AblationKind parse_ablation_kind(std::string_view name);

struct ArmResult {
    std::string name;  // lowercase arm name, also its output directory
    RunConfig config;
    RunResult run;
    /// Step log of this arm: shared Discovery records followed by the arm's
    /// Internalization records (no header line).
    std::string step_log;
    EvalReport report;
};

struct AblationResult {
    AblationKind kind = AblationKind::Statistic;
    /// Config field the arms differ in ("guidance" or "target_statistic").
    std::string varied_field;
    std::vector<ArmResult> arms;
};

/// Budget table the arm conditions evaluation on: the length map for Exact,
/// range midpoints for Range, none (unconditioned) for Implicit.
std::optional<LengthMap> eval_budget_map(const RunState& state, GuidanceMode mode);

/// Evaluation of a finished run under its own guidance mode. The Discovery
/// checkpoint is always evaluated unconditioned.
EvalReport evaluate_run_state(const RunState& state, const RunConfig& cfg, const std::vector<Problem>& bank,
                              unsigned threads);

/// Median / Mean / Minimum arms: full runs differing only in target_statistic.
/// Arms share the seed, so they see common random numbers; the Median arm is
/// the unablated pipeline.
AblationResult run_target_statistic_ablation(const RunConfig& base, const std::vector<Problem>& bank,
                                             const RunOptions& opts);

/// Exact / Range / Implicit arms: one shared Discovery run, then one
/// Internalization run per guidance mode.
AblationResult run_guidance_ablation(const RunConfig& base, const std::vector<Problem>& bank,
                                     const RunOptions& opts);

/// "arm,benchmark,Pass@1,#Tok", one row per arm and report row.
void write_ablation_csv(std::ostream& out, const AblationResult& result);

}  // namespace lapo
