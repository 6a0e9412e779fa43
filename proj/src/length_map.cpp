#include "lapo/length_map.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lapo/errors.hpp"
#include "lapo/io.hpp"
#include "lapo/stats.hpp"

namespace lapo {

using nlohmann::json;

LengthMap::LengthMap(Tokens default_target) : default_target_(default_target) {
    if (default_target_ < 1) throw ValidationError("default_target", "must be >= 1");
}

Tokens LengthMap::get_target(const std::string& problem_id) const {
    auto it = entries_.find(problem_id);
    if (it == entries_.end() || !it->second.ever_solved) return default_target_;
    return std::min(it->second.target, default_target_);
}

bool LengthMap::ever_solved(const std::string& problem_id) const {
    auto it = entries_.find(problem_id);
    return it != entries_.end() && it->second.ever_solved;
}

void LengthMap::update_discovery(const std::string& problem_id, const CorrectLengthSample& sample,
                                 TargetStatistic stat) {
    Entry& e = entries_[problem_id];
    if (sample.empty()) {
        e.target = default_target_;
        return;
    }
    e.target = std::clamp<Tokens>(select_target(sample, stat), 1, default_target_);
    e.ever_solved = true;
}

void LengthMap::update_internalization(const std::string& problem_id,
                                       const CorrectLengthSample& sample, TargetStatistic stat) {
    if (sample.empty()) return;
    const Tokens fresh = std::clamp<Tokens>(select_target(sample, stat), 1, default_target_);
    Entry& e = entries_[problem_id];
    e.target = e.ever_solved ? std::min(e.target, fresh) : fresh;
    e.ever_solved = true;
}

void LengthMap::set_entry(const std::string& problem_id, Entry entry) {
    const std::string path = "entries." + problem_id + ".target";
    if (entry.target < 1 || entry.target > default_target_) {
        throw ValidationError(path, "target " + std::to_string(entry.target) +
                                        " outside [1, " + std::to_string(default_target_) + "]");
    }
    if (!entry.ever_solved && entry.target != default_target_) {
        throw ValidationError(path, "unsolved entry must hold default_target");
    }
    entries_[problem_id] = entry;
}

std::string to_json_string(const LengthMap& map) {
    json entries = json::object();
    for (const auto& [id, e] : map.entries()) {
        entries[id] = {{"target", e.target}, {"ever_solved", e.ever_solved}};
    }
    json root = {{"default_target", map.default_target()}, {"entries", std::move(entries)}};
    return root.dump(2) + "\n";
}

LengthMap length_map_from_json_string(const std::string& text) {
    const json root = parse_json_document(text, "length map");
    if (!root.is_object()) throw ValidationError("", "length map must be a JSON object");
    require_known_keys(root, {"default_target", "entries"}, "");

    LengthMap map(require_field<Tokens>(root, "default_target", ""));
    if (!root.contains("entries") || !root["entries"].is_object()) {
        throw ValidationError("entries", "missing or not an object");
    }
    for (const auto& [id, value] : root["entries"].items()) {
        const std::string path = "entries." + id;
        if (!value.is_object()) throw ValidationError(path, "must be an object");
        require_known_keys(value, {"target", "ever_solved"}, path);
        LengthMap::Entry e;
        e.target = require_field<Tokens>(value, "target", path);
        e.ever_solved = require_field<bool>(value, "ever_solved", path);
        map.set_entry(id, e);
    }
    return map;
}

void save(const LengthMap& map, const std::filesystem::path& path) {
    write_text_file(path, to_json_string(map));
}

LengthMap load_length_map(const std::filesystem::path& path) {
    return length_map_from_json_string(read_text_file(path));
}

}  // namespace lapo
