#include "lapo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "lapo/errors.hpp"
#include "lapo/io.hpp"

namespace lapo {

using nlohmann::json;

const ProblemPolicy& PolicyParams::at(const std::string& problem_id) const {
    auto it = by_id_.find(problem_id);
    if (it == by_id_.end()) throw ConfigError("no policy parameters for problem '" + problem_id + "'");
    return it->second;
}

ProblemPolicy& PolicyParams::at(const std::string& problem_id) {
    auto it = by_id_.find(problem_id);
    if (it == by_id_.end()) throw ConfigError("no policy parameters for problem '" + problem_id + "'");
    return it->second;
}

void PolicyParams::set(const std::string& problem_id, ProblemPolicy policy) {
    by_id_[problem_id] = policy;
}

std::string to_json_string(const PolicyParams& params) {
    json problems = json::object();
    for (const auto& [id, p] : params.entries()) {
        problems[id] = {{"mu", p.mu}, {"sigma_gen", p.sigma_gen}, {"w", p.w}};
    }
    return json{{"problems", std::move(problems)}}.dump(2) + "\n";
}

PolicyParams policy_params_from_json_string(const std::string& text) {
    const json root = parse_json_document(text, "policy params");
    if (!root.is_object()) throw ValidationError("", "policy params must be a JSON object");
    require_known_keys(root, {"problems"}, "");
    if (!root.contains("problems") || !root["problems"].is_object()) {
        throw ValidationError("problems", "missing or not an object");
    }
    PolicyParams params;
    for (const auto& [id, value] : root["problems"].items()) {
        const std::string path = "problems." + id;
        if (!value.is_object()) throw ValidationError(path, "must be an object");
        require_known_keys(value, {"mu", "sigma_gen", "w"}, path);
        ProblemPolicy p;
        p.mu = require_field<double>(value, "mu", path);
        p.sigma_gen = require_field<double>(value, "sigma_gen", path);
        p.w = require_field<double>(value, "w", path);
        if (!(p.sigma_gen > 0.0)) throw ValidationError(path + ".sigma_gen", "must be > 0");
        if (!(p.w >= 0.0 && p.w <= 1.0)) throw ValidationError(path + ".w", "must lie in [0, 1]");
        if (!std::isfinite(p.mu)) throw ValidationError(path + ".mu", "must be finite");
        params.set(id, p);
    }
    return params;
}

void save(const PolicyParams& params, const std::filesystem::path& path) {
    write_text_file(path, to_json_string(params));
}

PolicyParams load_policy_params(const std::filesystem::path& path) {
    return policy_params_from_json_string(read_text_file(path));
}

double EnvModel::p_max(double difficulty) const {
    return std::clamp(p_max_intercept - p_max_slope * (difficulty - 1.0), 0.0, 1.0);
}

double EnvModel::tau(double difficulty) const { return tau_per_difficulty * difficulty; }

void EnvModel::validate() const {
    if (!(p_max_intercept >= 0.0 && p_max_intercept <= 1.0)) {
        throw ConfigError("env.p_max_intercept must lie in [0, 1]");
    }
    if (!(p_max_slope >= 0.0)) throw ConfigError("env.p_max_slope must be >= 0");
    if (!(tau_per_difficulty > 0.0)) throw ConfigError("env.tau_per_difficulty must be > 0");
    if (!(derail_scale >= 0.0)) throw ConfigError("env.derail_scale must be >= 0 (0 disables)");
    if (max_generation_length < 1) throw ConfigError("env.max_generation_length must be >= 1");
}

double prob_correct(const EnvModel& env, double difficulty, double length) {
    return env.p_max(difficulty) * (1.0 - std::exp(-length / env.tau(difficulty)));
}

double prob_success(const EnvModel& env, double difficulty, double length) {
    const double p = prob_correct(env, difficulty, length);
    if (env.derail_scale <= 0.0) return p;
    return p * std::exp(-length / env.derail_scale);
}

double length_location(const ProblemPolicy& policy, std::optional<Tokens> budget) {
    if (!budget) return policy.mu;
    return (1.0 - policy.w) * policy.mu + policy.w * std::log(static_cast<double>(*budget));
}

Tokens sample_length(const ProblemPolicy& policy, std::optional<Tokens> budget,
                     Tokens max_generation_length, Rng& rng) {
    std::normal_distribution<double> normal(length_location(policy, budget), policy.sigma_gen);
    const double z = normal(rng);
    const double raw = std::round(std::exp(z));
    // Compare in floating point first: exp(z) may exceed the Tokens range.
    if (!(raw < static_cast<double>(max_generation_length))) return max_generation_length;
    return std::max<Tokens>(1, static_cast<Tokens>(raw));
}

RolloutGroup rollout_group(const ProblemPolicy& policy, const EnvModel& env, const Problem& problem,
                           std::optional<Tokens> budget, int n, Rng& rng) {
    if (n < 1) throw ConfigError("rollout group size must be >= 1");
    RolloutGroup group;
    group.problem_id = problem.id;
    group.rollouts.reserve(static_cast<std::size_t>(n));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        Rollout r;
        r.problem_id = problem.id;
        r.declared_budget = budget;
        r.length = sample_length(policy, budget, env.max_generation_length, rng);
        r.correct = unit(rng) < prob_success(env, problem.difficulty, static_cast<double>(r.length));
        group.rollouts.push_back(std::move(r));
    }
    return group;
}

double log_density_length(const ProblemPolicy& policy, std::optional<Tokens> budget, Tokens length) {
    const double log_len = std::log(static_cast<double>(length));
    const double m = length_location(policy, budget);
    const double s = policy.sigma_gen;
    const double u = (log_len - m) / s;
    return -log_len - std::log(s * std::sqrt(2.0 * std::numbers::pi)) - 0.5 * u * u;
}

LogDensityGradient log_density_gradient(const ProblemPolicy& policy, std::optional<Tokens> budget,
                                        Tokens length) {
    const double m = length_location(policy, budget);
    const double dm = (std::log(static_cast<double>(length)) - m) / (policy.sigma_gen * policy.sigma_gen);
    LogDensityGradient g;
    if (!budget) {
        g.d_mu = dm;
        return g;
    }
    g.d_mu = dm * (1.0 - policy.w);
    g.d_w = dm * (std::log(static_cast<double>(*budget)) - policy.mu);
    return g;
}

double clamp_mass_above(const ProblemPolicy& policy, Tokens max_generation_length) {
    const double z = (std::log(static_cast<double>(max_generation_length)) - policy.mu) / policy.sigma_gen;
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

void PolicyInit::validate(Tokens max_generation_length) const {
    if (!(initial_length >= 1.0)) throw ConfigError("policy.initial_length must be >= 1");
    if (!(sigma_gen > 0.0)) throw ConfigError("policy.sigma_gen must be > 0");
    if (!(initial_w >= 0.0 && initial_w <= 1.0)) throw ConfigError("policy.initial_w must lie in [0, 1]");
    const ProblemPolicy p{std::log(initial_length), sigma_gen, initial_w};
    const double above = clamp_mass_above(p, max_generation_length);
    if (above >= 1e-3) {
        throw ConfigError("policy.initial_length/sigma_gen put " + std::to_string(above * 100.0) +
                          "% of lengths above max_generation_length (limit 0.1%)");
    }
}

PolicyParams make_initial_params(const PolicyInit& init, const std::vector<Problem>& bank) {
    PolicyParams params;
    const ProblemPolicy p{std::log(init.initial_length), init.sigma_gen, init.initial_w};
    for (const auto& problem : bank) params.set(problem.id, p);
    return params;
}

}  // namespace lapo
