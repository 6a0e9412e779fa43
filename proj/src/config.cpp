#include "lapo/config.hpp"

#include "lapo/errors.hpp"
#include "lapo/io.hpp"
#include "lapo/rng.hpp"

namespace lapo {

using nlohmann::json;

StageConfig RunConfig::default_discovery() {
    StageConfig s;
    s.learning_rate = 0.02;
    return s;
}

StageConfig RunConfig::default_internalization() {
    StageConfig s;
    s.learning_rate = 0.005;
    return s;
}

void RunConfig::resolve() {
    if (schema_version != kSchemaVersion) {
        throw ConfigError("schema_version " + std::to_string(schema_version) + " is not supported (expected " +
                          std::to_string(kSchemaVersion) + ")");
    }
    discovery.validate("discovery");
    internalization.validate("internalization");
    if (discovery.max_generation_length != internalization.max_generation_length) {
        throw ConfigError("discovery and internalization must share max_generation_length");
    }
    if (bank.path.empty() && (bank.tiers < 1 || bank.tiers > 5 || bank.per_tier < 1)) {
        throw ConfigError("bank.tiers must lie in [1, 5] and bank.per_tier must be >= 1");
    }
    if (eval_samples < 1) throw ConfigError("eval.samples must be >= 1");
    reward.validate();
    env.max_generation_length = discovery.max_generation_length;
    env.validate();
    policy.validate(env.max_generation_length);
    discovery.seed = stream_seed({seed, stream::kStage, 1});
    internalization.seed = stream_seed({seed, stream::kStage, 2});
}

namespace {

json stage_to_json(const StageConfig& s) {
    return {{"episodes", s.episodes},
            {"steps_per_episode", s.steps_per_episode},
            {"rollouts_per_problem", s.rollouts_per_problem},
            {"batch_size", s.batch_size},
            {"max_generation_length", s.max_generation_length},
            {"learning_rate", s.learning_rate}};
}

StageConfig stage_from_json(const json& j, const std::string& path, StageConfig s) {
    if (!j.is_object()) throw ValidationError(path, "must be an object");
    require_known_keys(j,
                       {"episodes", "steps_per_episode", "rollouts_per_problem", "batch_size",
                        "max_generation_length", "learning_rate"},
                       path);
    s.episodes = optional_field<int>(j, "episodes", path, s.episodes);
    s.steps_per_episode = optional_field<int>(j, "steps_per_episode", path, s.steps_per_episode);
    s.rollouts_per_problem = optional_field<int>(j, "rollouts_per_problem", path, s.rollouts_per_problem);
    s.batch_size = optional_field<int>(j, "batch_size", path, s.batch_size);
    s.max_generation_length = optional_field<Tokens>(j, "max_generation_length", path, s.max_generation_length);
    s.learning_rate = optional_field<double>(j, "learning_rate", path, s.learning_rate);
    return s;
}

json sigma_to_json(const SigmaMode& mode) {
    if (const auto* p = std::get_if<SigmaProportional>(&mode)) {
        return {{"kind", "proportional"}, {"ratio", p->ratio}};
    }
    return {{"kind", "fixed"}, {"tokens", std::get<SigmaFixed>(mode).tokens}};
}

SigmaMode sigma_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path, "must be an object");
    const auto kind = require_field<std::string>(j, "kind", path);
    if (kind == "proportional") {
        require_known_keys(j, {"kind", "ratio"}, path);
        return SigmaProportional{optional_field<double>(j, "ratio", path, 0.1)};
    }
    if (kind == "fixed") {
        require_known_keys(j, {"kind", "tokens"}, path);
        return SigmaFixed{optional_field<Tokens>(j, "tokens", path, 400)};
    }
    throw ValidationError(path + ".kind", "expected 'proportional' or 'fixed'");
}

template <typename Parse>
auto parse_enum(const json& root, const char* key, Parse parse, decltype(parse("")) fallback) {
    if (!root.contains(key)) return fallback;
    const auto name = require_field<std::string>(root, key, "");
    try {
        return parse(name);
    } catch (const ConfigError& e) {
        throw ValidationError(key, e.what());
    }
}

}  // namespace

json to_json(const RunConfig& cfg) {
    return {
        {"schema_version", cfg.schema_version},
        {"seed", cfg.seed},
        {"output_dir", cfg.output_dir},
        {"bank", {{"path", cfg.bank.path}, {"tiers", cfg.bank.tiers}, {"per_tier", cfg.bank.per_tier}}},
        {"discovery", stage_to_json(cfg.discovery)},
        {"internalization", stage_to_json(cfg.internalization)},
        {"reward",
         {{"alpha", cfg.reward.alpha},
          {"beta", cfg.reward.beta},
          {"sigma_mode", sigma_to_json(cfg.reward.sigma_mode)},
          {"distance_scale", cfg.reward.distance_scale}}},
        {"env",
         {{"p_max_intercept", cfg.env.p_max_intercept},
          {"p_max_slope", cfg.env.p_max_slope},
          {"tau_per_difficulty", cfg.env.tau_per_difficulty},
          {"derail_scale", cfg.env.derail_scale}}},
        {"policy",
         {{"initial_length", cfg.policy.initial_length},
          {"sigma_gen", cfg.policy.sigma_gen},
          {"initial_w", cfg.policy.initial_w}}},
        {"guidance", std::string(to_string(cfg.guidance))},
        {"target_statistic", std::string(to_string(cfg.target_statistic))},
        {"eval", {{"samples", cfg.eval_samples}}},
    };
}

RunConfig run_config_from_json(const json& root) {
    if (!root.is_object()) throw ValidationError("", "config must be a JSON object");
    require_known_keys(root,
                       {"schema_version", "seed", "output_dir", "bank", "discovery", "internalization",
                        "reward", "env", "policy", "guidance", "target_statistic", "eval"},
                       "");
    RunConfig cfg;
    cfg.schema_version = require_field<int>(root, "schema_version", "");
    cfg.seed = optional_field<std::uint64_t>(root, "seed", "", cfg.seed);
    cfg.output_dir = optional_field<std::string>(root, "output_dir", "", cfg.output_dir);

    if (root.contains("bank")) {
        const auto& b = root["bank"];
        if (!b.is_object()) throw ValidationError("bank", "must be an object");
        require_known_keys(b, {"path", "tiers", "per_tier"}, "bank");
        cfg.bank.path = optional_field<std::string>(b, "path", "bank", cfg.bank.path);
        cfg.bank.tiers = optional_field<int>(b, "tiers", "bank", cfg.bank.tiers);
        cfg.bank.per_tier = optional_field<int>(b, "per_tier", "bank", cfg.bank.per_tier);
    }
    if (root.contains("discovery")) cfg.discovery = stage_from_json(root["discovery"], "discovery", cfg.discovery);
    if (root.contains("internalization")) {
        cfg.internalization = stage_from_json(root["internalization"], "internalization", cfg.internalization);
    }
    if (root.contains("reward")) {
        const auto& r = root["reward"];
        if (!r.is_object()) throw ValidationError("reward", "must be an object");
        require_known_keys(r, {"alpha", "beta", "sigma_mode", "distance_scale"}, "reward");
        cfg.reward.alpha = optional_field<double>(r, "alpha", "reward", cfg.reward.alpha);
        cfg.reward.beta = optional_field<double>(r, "beta", "reward", cfg.reward.beta);
        cfg.reward.distance_scale = optional_field<double>(r, "distance_scale", "reward", cfg.reward.distance_scale);
        if (r.contains("sigma_mode")) cfg.reward.sigma_mode = sigma_from_json(r["sigma_mode"], "reward.sigma_mode");
    }
    if (root.contains("env")) {
        const auto& e = root["env"];
        if (!e.is_object()) throw ValidationError("env", "must be an object");
        require_known_keys(e, {"p_max_intercept", "p_max_slope", "tau_per_difficulty", "derail_scale"}, "env");
        cfg.env.p_max_intercept = optional_field<double>(e, "p_max_intercept", "env", cfg.env.p_max_intercept);
        cfg.env.p_max_slope = optional_field<double>(e, "p_max_slope", "env", cfg.env.p_max_slope);
        cfg.env.tau_per_difficulty =
            optional_field<double>(e, "tau_per_difficulty", "env", cfg.env.tau_per_difficulty);
        cfg.env.derail_scale = optional_field<double>(e, "derail_scale", "env", cfg.env.derail_scale);
    }
    if (root.contains("policy")) {
        const auto& p = root["policy"];
        if (!p.is_object()) throw ValidationError("policy", "must be an object");
        require_known_keys(p, {"initial_length", "sigma_gen", "initial_w"}, "policy");
        cfg.policy.initial_length = optional_field<double>(p, "initial_length", "policy", cfg.policy.initial_length);
        cfg.policy.sigma_gen = optional_field<double>(p, "sigma_gen", "policy", cfg.policy.sigma_gen);
        cfg.policy.initial_w = optional_field<double>(p, "initial_w", "policy", cfg.policy.initial_w);
    }
    cfg.guidance = parse_enum(root, "guidance", parse_guidance_mode, cfg.guidance);
    cfg.target_statistic = parse_enum(root, "target_statistic", parse_target_statistic, cfg.target_statistic);
    if (root.contains("eval")) {
        const auto& e = root["eval"];
        if (!e.is_object()) throw ValidationError("eval", "must be an object");
        require_known_keys(e, {"samples"}, "eval");
        cfg.eval_samples = optional_field<int>(e, "samples", "eval", cfg.eval_samples);
    }
    cfg.resolve();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const IoError&) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    return run_config_from_json(parse_json_document(text, "config '" + path.string() + "'"));
}

// output_dir is excluded: where a run is written does not change what it computes.
std::string config_hash(const RunConfig& cfg) {
    auto j = to_json(cfg);
    j.erase("output_dir");
    return hex_digest(j.dump());
}

namespace {

void diff_into(const json& a, const json& b, const std::string& path, std::vector<std::string>& out) {
    if (a.is_object() && b.is_object()) {
        for (const auto& [k, v] : a.items()) {
            const auto p = join_path(path, k);
            if (!b.contains(k)) {
                out.push_back(p);
            } else {
                diff_into(v, b[k], p, out);
            }
        }
        for (const auto& [k, _] : b.items()) {
            if (!a.contains(k)) out.push_back(join_path(path, k));
        }
        return;
    }
    if (a != b) out.push_back(path);
}

}  // namespace

std::vector<std::string> config_diff(const RunConfig& a, const RunConfig& b) {
    std::vector<std::string> out;
    diff_into(to_json(a), to_json(b), "", out);
    return out;
}

std::vector<Problem> resolve_bank(const RunConfig& cfg) {
    if (!cfg.bank.path.empty()) return load_bank(cfg.bank.path);
    return make_synthetic_bank(cfg.bank.tiers, cfg.bank.per_tier);
}

}  // namespace lapo
