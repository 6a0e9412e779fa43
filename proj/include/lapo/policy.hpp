#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "lapo/rng.hpp"
#include "lapo/types.hpp"

namespace lapo {

/// Synthetic stand-in for the reasoning model on one problem: log-length is
/// Normal(m, sigma_gen^2) with m = (1 - w) * mu + w * ln(budget) when a budget
/// is declared, m = mu otherwise.
struct ProblemPolicy {
    double mu = 7.5;
    double sigma_gen = 0.25;
    /// Budget-adherence weight in [0, 1].
    double w = 0.0;

    friend bool operator==(const ProblemPolicy&, const ProblemPolicy&) = default;
};

/// Per-problem policy parameters keyed by problem id.
class PolicyParams {
public:
    PolicyParams() = default;

    const ProblemPolicy& at(const std::string& problem_id) const;
    ProblemPolicy& at(const std::string& problem_id);
    void set(const std::string& problem_id, ProblemPolicy policy);
    bool contains(const std::string& problem_id) const { return by_id_.contains(problem_id); }
    std::size_t size() const noexcept { return by_id_.size(); }
    const std::map<std::string, ProblemPolicy>& entries() const noexcept { return by_id_; }

    friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

private:
    std::map<std::string, ProblemPolicy> by_id_;
};

std::string to_json_string(const PolicyParams& params);
PolicyParams policy_params_from_json_string(const std::string& text);
void save(const PolicyParams& params, const std::filesystem::path& path);
PolicyParams load_policy_params(const std::filesystem::path& path);

/// Difficulty-dependent correctness model.
///
/// prob_correct(d, L) = p_max(d) * (1 - exp(-L / tau(d))) is the chance that a
/// response of L tokens reaches a correct answer, with p_max(d) = intercept -
/// slope * (d - 1) and tau(d) = tau_per_difficulty * d. Rollouts additionally
/// survive each token with a constant derail hazard, so the success
/// probability used for sampling is prob_correct * exp(-L / derail_scale).
/// A derail_scale of 0 disables the hazard.
struct EnvModel {
    double p_max_intercept = 0.98;
    double p_max_slope = 0.12;
    double tau_per_difficulty = 300.0;
    double derail_scale = 3000.0;
    Tokens max_generation_length = kDefaultMaxGenerationLength;

    double p_max(double difficulty) const;
    double tau(double difficulty) const;

    void validate() const;

    friend bool operator==(const EnvModel&, const EnvModel&) = default;
};

double prob_correct(const EnvModel& env, double difficulty, double length);

/// prob_correct times the derail survival factor.
double prob_success(const EnvModel& env, double difficulty, double length);

/// Location m of the log-length distribution.
double length_location(const ProblemPolicy& policy, std::optional<Tokens> budget);

Tokens sample_length(const ProblemPolicy& policy, std::optional<Tokens> budget,
                     Tokens max_generation_length, Rng& rng);

RolloutGroup rollout_group(const ProblemPolicy& policy, const EnvModel& env, const Problem& problem,
                           std::optional<Tokens> budget, int n, Rng& rng);

/// Log-normal log-density of `length` under the policy, ignoring the clamp to
/// [1, max_generation_length].
double log_density_length(const ProblemPolicy& policy, std::optional<Tokens> budget, Tokens length);

struct LogDensityGradient {
    double d_mu = 0.0;
    double d_w = 0.0;
};

/// Analytic gradient of log_density_length with respect to mu and w. d_w is
/// zero for unconditioned rollouts.
LogDensityGradient log_density_gradient(const ProblemPolicy& policy, std::optional<Tokens> budget,
                                        Tokens length);

/// Probability that an unconditioned draw exceeds max_generation_length
/// (normal upper tail of log-length).
double clamp_mass_above(const ProblemPolicy& policy, Tokens max_generation_length);

/// Initial policy shared by every problem in a fresh run.
struct PolicyInit {
    double initial_length = 1850.0;
    double sigma_gen = 0.25;
    double initial_w = 0.0;

    /// Rejects settings that put 0.1% or more of the initial length mass above
    /// the generation cap (ConfigError).
    void validate(Tokens max_generation_length) const;

    friend bool operator==(const PolicyInit&, const PolicyInit&) = default;
};

PolicyParams make_initial_params(const PolicyInit& init, const std::vector<Problem>& bank);

}  // namespace lapo
