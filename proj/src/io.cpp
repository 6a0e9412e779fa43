#include "lapo/io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "lapo/rng.hpp"

namespace lapo {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

json parse_json_document(const std::string& text, std::string_view what) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw ValidationError("", std::string(what) + " is empty");
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("", std::string(what) + ": " + e.what());
    }
}

void require_known_keys(const json& object, std::initializer_list<std::string_view> allowed,
                        std::string_view path) {
    for (const auto& [key, _] : object.items()) {
        bool known = false;
        for (auto a : allowed) known = known || (a == key);
        if (!known) throw ValidationError(join_path(path, key), "unknown key");
    }
}

json to_json(const Problem& p) {
    return {{"id", p.id}, {"difficulty", p.difficulty}, {"benchmark_tag", p.benchmark_tag}};
}

void validate_bank(const std::vector<Problem>& bank) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        const auto path = "[" + std::to_string(i) + "]";
        if (bank[i].id.empty()) throw ValidationError(path + ".id", "empty id");
        if (!seen.insert(bank[i].id).second) {
            throw ValidationError(path + ".id", "duplicate id '" + bank[i].id + "'");
        }
        if (!(bank[i].difficulty >= 1.0 && bank[i].difficulty <= 5.0)) {
            throw ValidationError(path + ".difficulty", "must lie in [1, 5]");
        }
    }
}

std::vector<Problem> bank_from_json(const json& array) {
    if (!array.is_array()) throw ValidationError("", "problem bank must be a JSON array");
    std::vector<Problem> bank;
    bank.reserve(array.size());
    for (std::size_t i = 0; i < array.size(); ++i) {
        const auto path = "[" + std::to_string(i) + "]";
        const auto& item = array[i];
        if (!item.is_object()) throw ValidationError(path, "must be an object");
        require_known_keys(item, {"id", "difficulty", "benchmark_tag"}, path);
        Problem p;
        p.id = require_field<std::string>(item, "id", path);
        p.difficulty = require_field<double>(item, "difficulty", path);
        p.benchmark_tag = require_field<std::string>(item, "benchmark_tag", path);
        bank.push_back(std::move(p));
    }
    validate_bank(bank);
    return bank;
}

std::string bank_to_json_string(const std::vector<Problem>& bank) {
    json array = json::array();
    for (const auto& p : bank) array.push_back(to_json(p));
    return array.dump(2) + "\n";
}

std::vector<Problem> load_bank(const std::filesystem::path& path) {
    return bank_from_json(parse_json_document(read_text_file(path), "problem bank"));
}

void save_bank(const std::vector<Problem>& bank, const std::filesystem::path& path) {
    write_text_file(path, bank_to_json_string(bank));
}

std::vector<Problem> make_synthetic_bank(int tiers, int per_tier) {
    std::vector<Problem> bank;
    for (int t = 1; t <= tiers; ++t) {
        for (int i = 0; i < per_tier; ++i) {
            char id[32];
            std::snprintf(id, sizeof id, "l%d-%03d", t, i);
            bank.push_back({id, static_cast<double>(t), "level" + std::to_string(t)});
        }
    }
    return bank;
}

json to_json(const Rollout& r) {
    json j = {{"problem_id", r.problem_id}, {"length", r.length}, {"correct", r.correct}};
    j["declared_budget"] = r.declared_budget ? json(*r.declared_budget) : json(nullptr);
    return j;
}

Rollout rollout_from_json(const json& j, std::string_view path) {
    if (!j.is_object()) throw ValidationError(std::string(path), "rollout must be an object");
    require_known_keys(j, {"problem_id", "length", "correct", "declared_budget"}, path);
    Rollout r;
    r.problem_id = require_field<std::string>(j, "problem_id", path);
    r.length = require_field<Tokens>(j, "length", path);
    r.correct = require_field<bool>(j, "correct", path);
    if (r.length < 1) throw ValidationError(join_path(path, "length"), "must be >= 1");
    if (j.contains("declared_budget") && !j["declared_budget"].is_null()) {
        r.declared_budget = require_field<Tokens>(j, "declared_budget", path);
        if (*r.declared_budget < 1) throw ValidationError(join_path(path, "declared_budget"), "must be >= 1");
    }
    return r;
}

json to_json(const RunHeader& h) {
    return {{"header", {{"config_hash", h.config_hash}, {"seed", h.seed}}}};
}

RunHeader run_header_from_json(const json& j) {
    if (!j.is_object() || !j.contains("header") || !j["header"].is_object()) {
        throw ValidationError("header", "first line must be a run header");
    }
    const auto& h = j["header"];
    RunHeader header;
    header.config_hash = require_field<std::string>(h, "config_hash", "header");
    header.seed = require_field<std::uint64_t>(h, "seed", "header");
    return header;
}

void write_rollout_log(std::ostream& out, const RolloutLog& log) {
    out << to_json(log.header).dump() << '\n';
    for (const auto& r : log.rollouts) out << to_json(r).dump() << '\n';
}

RolloutLog read_rollout_log(std::istream& in) {
    RolloutLog log;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto path = "line " + std::to_string(lineno);
        const json j = parse_json_document(line, path);
        if (!have_header) {
            log.header = run_header_from_json(j);
            have_header = true;
        } else {
            log.rollouts.push_back(rollout_from_json(j, path));
        }
    }
    if (!have_header) throw ValidationError("header", "rollout log is empty");
    return log;
}

std::string hex_digest(std::string_view text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

}  // namespace lapo
