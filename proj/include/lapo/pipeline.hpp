#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lapo/config.hpp"
#include "lapo/length_map.hpp"
#include "lapo/policy.hpp"
#include "lapo/types.hpp"

namespace lapo {

/// The budget-declaring thinking prefix prepended to Internalization prompts.
/// Throws ConfigError for n < 1.
std::string render_budget_prefix(Tokens n);

/// Prefix used by the Range guidance arm.
std::string render_range_prefix(const LengthRange& range);

/// Budget actually declared by the Range arm: the rounded midpoint.
Tokens range_budget(const LengthRange& range);

struct StepMetrics {
    int step = 0;
    Stage stage = Stage::Discovery;
    double mean_reward = 0.0;
    double mean_length = 0.0;
    double accuracy = 0.0;

    friend bool operator==(const StepMetrics&, const StepMetrics&) = default;
};

/// Mutable training state threaded through both stages.
struct RunState {
    int step = 0;
    Stage stage = Stage::Discovery;
    PolicyParams params;
    LengthMap map;
    /// Latest [P30, P70] range of each problem's correct lengths. Feeds the
    /// Range guidance arm.
    std::map<std::string, LengthRange> ranges;
    std::vector<StepMetrics> metrics;

    /// Range for `problem_id`, or [default, default] if never solved.
    LengthRange range_for(const std::string& problem_id) const;
    /// Switches to Internalization. Throws ConfigError if already there.
    void enter_internalization();
};

RunState make_initial_state(const RunConfig& cfg, const std::vector<Problem>& bank);

/// Per-(step, problem) training record, one JSONL line in the step log.
struct StepRecord {
    int step = 0;
    Stage stage = Stage::Discovery;
    std::string problem_id;
    std::optional<Tokens> n;
    std::optional<std::string> prompt;
    std::string reward_kind;
    std::vector<Tokens> lengths;
    std::vector<bool> corrects;
    std::vector<double> rewards;
    std::vector<double> advantages;
    Tokens map_target_after = 0;
};

std::string to_json_line(const StepRecord& record);
StepRecord step_record_from_json_line(const std::string& line);

struct RunOptions {
    /// Worker cap; 0 means one per hardware thread.
    unsigned threads = 1;
    /// Receives one JSON line per StepRecord when set.
    std::ostream* step_log = nullptr;
};

/// One optimizer step of each stage over `batch`. Batches must not repeat a
/// problem. Map updates are staged and committed after every problem in the
/// batch has been processed.
void discovery_step(RunState& state, const std::vector<const Problem*>& batch, const RunConfig& cfg,
                    const RunOptions& opts);
void internalization_step(RunState& state, const std::vector<const Problem*>& batch, const RunConfig& cfg,
                          const RunOptions& opts);

/// Batches for one stage. The bank is reshuffled at every pass with a stream
/// keyed on the stage seed and the pass index; a pass is cut into batches of
/// batch_size and the tail batch is smaller. Returns episodes *
/// steps_per_episode batches.
std::vector<std::vector<const Problem*>> stage_batches(const std::vector<Problem>& bank, const StageConfig& stage);

void run_discovery(RunState& state, const std::vector<Problem>& bank, const RunConfig& cfg, const RunOptions& opts);
void run_internalization(RunState& state, const std::vector<Problem>& bank, const RunConfig& cfg,
                         const RunOptions& opts);

struct RunResult {
    RunState discovery;  // checkpoint at the end of Discovery
    RunState final;
};

/// Discovery for the configured episodes, then Internalization initialised
/// from the Discovery output.
RunResult run_lapo(const RunConfig& cfg, const std::vector<Problem>& bank, const RunOptions& opts);

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace lapo
