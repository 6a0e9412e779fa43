#include "lapo/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "lapo/errors.hpp"
#include "lapo/grpo.hpp"
#include "lapo/io.hpp"
#include "lapo/rewards.hpp"
#include "lapo/rng.hpp"
#include "lapo/stats.hpp"

namespace lapo {

using nlohmann::json;

std::string render_budget_prefix(Tokens n) {
    if (n < 1) throw ConfigError("budget must be >= 1, got " + std::to_string(n));
    return "<think> I will answer the question with " + std::to_string(n) + " tokens.";
}

std::string render_range_prefix(const LengthRange& range) {
    return "<think> I will answer the question with " + std::to_string(range.lo) + " to " +
           std::to_string(range.hi) + " tokens.";
}

Tokens range_budget(const LengthRange& range) {
    return std::max<Tokens>(1, round_tokens(0.5 * static_cast<double>(range.lo + range.hi)));
}

LengthRange RunState::range_for(const std::string& problem_id) const {
    if (auto it = ranges.find(problem_id); it != ranges.end()) return it->second;
    return {map.default_target(), map.default_target()};
}

void RunState::enter_internalization() {
    if (stage == Stage::Internalization) throw ConfigError("run is already in the Internalization stage");
    stage = Stage::Internalization;
}

RunState make_initial_state(const RunConfig& cfg, const std::vector<Problem>& bank) {
    RunState s{.step = 0,
               .stage = Stage::Discovery,
               .params = make_initial_params(cfg.policy, bank),
               .map = LengthMap(cfg.discovery.max_generation_length),
               .ranges = {},
               .metrics = {}};
    return s;
}

std::string to_json_line(const StepRecord& r) {
    json j;
    j["step"] = r.step;
    j["stage"] = std::string(to_string(r.stage));
    j["problem_id"] = r.problem_id;
    j["n"] = r.n ? json(*r.n) : json(nullptr);
    j["prompt"] = r.prompt ? json(*r.prompt) : json(nullptr);
    j["reward_kind"] = r.reward_kind;
    j["lengths"] = r.lengths;
    j["corrects"] = r.corrects;
    j["rewards"] = r.rewards;
    j["advantages"] = r.advantages;
    j["map_target_after"] = r.map_target_after;
    return j.dump();
}

StepRecord step_record_from_json_line(const std::string& line) {
    const json j = parse_json_document(line, "step record");
    if (!j.is_object()) throw ValidationError("", "step record must be an object");
    StepRecord r;
    r.step = require_field<int>(j, "step", "");
    r.stage = parse_stage(require_field<std::string>(j, "stage", ""));
    r.problem_id = require_field<std::string>(j, "problem_id", "");
    if (!j.at("n").is_null()) r.n = require_field<Tokens>(j, "n", "");
    if (!j.at("prompt").is_null()) r.prompt = require_field<std::string>(j, "prompt", "");
    r.reward_kind = require_field<std::string>(j, "reward_kind", "");
    r.lengths = j.at("lengths").get<std::vector<Tokens>>();
    r.corrects = j.at("corrects").get<std::vector<bool>>();
    r.rewards = j.at("rewards").get<std::vector<double>>();
    r.advantages = j.at("advantages").get<std::vector<double>>();
    r.map_target_after = require_field<Tokens>(j, "map_target_after", "");
    return r;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

namespace {

// Everything one problem contributes to a step, computed without touching
// shared state so problems can be processed concurrently.
struct ProblemOutcome {
    RolloutGroup group;
    std::optional<Tokens> n;
    std::optional<std::string> prompt;
    std::string reward_kind;
    std::vector<double> rewards;
    AdvantageVector advantages;
    CorrectLengthSample sample;
    ProblemPolicy updated;
};

Rng rollout_stream(const StageConfig& stage, int step, const std::string& problem_id) {
    return make_stream({stage.seed, stream::kRollout, static_cast<std::uint64_t>(step), fnv1a64(problem_id)});
}

void finish_outcome(ProblemOutcome& out, const ProblemPolicy& policy, double lr, Stage stage) {
    out.advantages = group_advantages(out.rewards);
    out.updated = apply_update(policy, out.group, out.advantages, lr, stage);
}

void commit_step(RunState& state, const std::vector<const Problem*>& batch, std::vector<ProblemOutcome>& outcomes,
                 const RunConfig& cfg, const RunOptions& opts) {
    double reward_sum = 0.0;
    double length_sum = 0.0;
    double correct_sum = 0.0;
    std::size_t count = 0;

    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& id = batch[i]->id;
        auto& out = outcomes[i];
        if (state.stage == Stage::Discovery) {
            state.map.update_discovery(id, out.sample, cfg.target_statistic);
        } else {
            state.map.update_internalization(id, out.sample, cfg.target_statistic);
        }
        if (!out.sample.empty()) state.ranges[id] = compute_range(out.sample);
        state.params.set(id, out.updated);

        for (std::size_t k = 0; k < out.group.rollouts.size(); ++k) {
            reward_sum += out.rewards[k];
            length_sum += static_cast<double>(out.group.rollouts[k].length);
            correct_sum += out.group.rollouts[k].correct ? 1.0 : 0.0;
        }
        count += out.group.rollouts.size();

        if (opts.step_log != nullptr) {
            StepRecord rec;
            rec.step = state.step;
            rec.stage = state.stage;
            rec.problem_id = id;
            rec.n = out.n;
            rec.prompt = out.prompt;
            rec.reward_kind = out.reward_kind;
            for (const auto& r : out.group.rollouts) {
                rec.lengths.push_back(r.length);
                rec.corrects.push_back(r.correct);
            }
            rec.rewards = out.rewards;
            rec.advantages = out.advantages;
            rec.map_target_after = state.map.get_target(id);
            *opts.step_log << to_json_line(rec) << '\n';
        }
    }

    const double denom = count == 0 ? 1.0 : static_cast<double>(count);
    state.metrics.push_back({state.step, state.stage, reward_sum / denom, length_sum / denom, correct_sum / denom});
    ++state.step;
}

}  // namespace

void discovery_step(RunState& state, const std::vector<const Problem*>& batch, const RunConfig& cfg,
                    const RunOptions& opts) {
    if (state.stage != Stage::Discovery) throw ConfigError("discovery_step called outside the Discovery stage");
    const auto& stage = cfg.discovery;
    std::vector<ProblemOutcome> outcomes(batch.size());

    parallel_for(batch.size(), opts.threads, [&](std::size_t i) {
        const Problem& problem = *batch[i];
        const ProblemPolicy& policy = state.params.at(problem.id);
        auto& out = outcomes[i];
        Rng rng = rollout_stream(stage, state.step, problem.id);
        out.group = rollout_group(policy, cfg.env, problem, std::nullopt, stage.rollouts_per_problem, rng);
        out.reward_kind = "discovery";
        out.sample = CorrectLengthSample::from_group(out.group);
        out.rewards.assign(out.group.rollouts.size(), 0.0);
        if (!out.sample.empty()) {
            const LengthRange range = compute_range(out.sample);
            for (std::size_t k = 0; k < out.group.rollouts.size(); ++k) {
                out.rewards[k] = discovery_total_reward(out.group.rollouts[k], range, cfg.reward).total;
            }
        }
        finish_outcome(out, policy, stage.learning_rate, Stage::Discovery);
    });

    commit_step(state, batch, outcomes, cfg, opts);
}

void internalization_step(RunState& state, const std::vector<const Problem*>& batch, const RunConfig& cfg,
                          const RunOptions& opts) {
    if (state.stage != Stage::Internalization) {
        throw ConfigError("internalization_step called outside the Internalization stage");
    }
    const auto& stage = cfg.internalization;
    std::vector<ProblemOutcome> outcomes(batch.size());

    parallel_for(batch.size(), opts.threads, [&](std::size_t i) {
        const Problem& problem = *batch[i];
        const ProblemPolicy& policy = state.params.at(problem.id);
        auto& out = outcomes[i];
        std::optional<LengthRange> declared_range;

        switch (cfg.guidance) {
            case GuidanceMode::Exact:
                out.n = state.map.get_target(problem.id);
                out.prompt = render_budget_prefix(*out.n);
                out.reward_kind = "internalization";
                break;
            case GuidanceMode::Range:
                declared_range = state.range_for(problem.id);
                out.n = range_budget(*declared_range);
                out.prompt = render_range_prefix(*declared_range);
                out.reward_kind = "range";
                break;
            case GuidanceMode::Implicit:
                out.reward_kind = "implicit";
                break;
        }

        Rng rng = rollout_stream(stage, state.step, problem.id);
        out.group = rollout_group(policy, cfg.env, problem, out.n, stage.rollouts_per_problem, rng);
        out.sample = CorrectLengthSample::from_group(out.group);
        out.rewards.assign(out.group.rollouts.size(), 0.0);

        if (cfg.guidance == GuidanceMode::Implicit) {
            // No length information in the prompt; only the Discovery-shaped
            // reward steers length.
            if (!out.sample.empty()) {
                const LengthRange range = compute_range(out.sample);
                for (std::size_t k = 0; k < out.group.rollouts.size(); ++k) {
                    out.rewards[k] = guidance_variant_reward(out.group.rollouts[k], GuidanceMode::Implicit,
                                                             std::nullopt, range, cfg.reward)
                                         .total;
                }
            }
        } else {
            for (std::size_t k = 0; k < out.group.rollouts.size(); ++k) {
                out.rewards[k] =
                    guidance_variant_reward(out.group.rollouts[k], cfg.guidance, out.n, declared_range, cfg.reward)
                        .total;
            }
        }
        finish_outcome(out, policy, stage.learning_rate, Stage::Internalization);
    });

    commit_step(state, batch, outcomes, cfg, opts);
}

std::vector<std::vector<const Problem*>> stage_batches(const std::vector<Problem>& bank, const StageConfig& stage) {
    std::vector<std::vector<const Problem*>> batches;
    const auto total = static_cast<std::size_t>(stage.episodes) * static_cast<std::size_t>(stage.steps_per_episode);
    if (total == 0) return batches;
    if (bank.empty()) throw EmptyBenchmark();

    // Shuffle in id order so the batches do not depend on how the bank file
    // happens to be ordered.
    std::vector<const Problem*> sorted;
    sorted.reserve(bank.size());
    for (const auto& p : bank) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [](const Problem* a, const Problem* b) { return a->id < b->id; });

    const auto batch_size = static_cast<std::size_t>(stage.batch_size);
    std::uint64_t pass = 0;
    while (batches.size() < total) {
        auto order = sorted;
        Rng rng = make_stream({stage.seed, stream::kShuffle, pass++});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size() && batches.size() < total; start += batch_size) {
            const auto end = std::min(order.size(), start + batch_size);
            batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                                 order.begin() + static_cast<std::ptrdiff_t>(end));
        }
    }
    return batches;
}

void run_discovery(RunState& state, const std::vector<Problem>& bank, const RunConfig& cfg, const RunOptions& opts) {
    for (const auto& batch : stage_batches(bank, cfg.discovery)) discovery_step(state, batch, cfg, opts);
}

void run_internalization(RunState& state, const std::vector<Problem>& bank, const RunConfig& cfg,
                         const RunOptions& opts) {
    state.enter_internalization();
    for (const auto& batch : stage_batches(bank, cfg.internalization)) internalization_step(state, batch, cfg, opts);
}

RunResult run_lapo(const RunConfig& cfg, const std::vector<Problem>& bank, const RunOptions& opts) {
    validate_bank(bank);
    RunResult result;
    RunState state = make_initial_state(cfg, bank);
    run_discovery(state, bank, cfg, opts);
    result.discovery = state;
    run_internalization(state, bank, cfg, opts);
    result.final = std::move(state);
    return result;
}

}  // namespace lapo
