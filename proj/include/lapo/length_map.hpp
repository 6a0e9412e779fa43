#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "lapo/types.hpp"

namespace lapo {

/// Persistent problem -> target-length table. Unsolved problems resolve to
/// `default_target` (the generation cap), which invites long exploration.
class LengthMap {
public:
    struct Entry {
        Tokens target = kDefaultMaxGenerationLength;
        bool ever_solved = false;

        friend bool operator==(const Entry&, const Entry&) = default;
    };

    explicit LengthMap(Tokens default_target = kDefaultMaxGenerationLength);

    Tokens default_target() const noexcept { return default_target_; }
    const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

    /// Stored target for a solved problem, otherwise default_target.
    Tokens get_target(const std::string& problem_id) const;
    bool ever_solved(const std::string& problem_id) const;

    /// Discovery rule: overwrite with the sample statistic; an empty sample
    /// resets the target to default_target and leaves ever_solved untouched.
    void update_discovery(const std::string& problem_id, const CorrectLengthSample& sample,
                          TargetStatistic stat);

    /// Internalization rule: min(old, stat) for previously solved problems,
    /// plain assignment for newly solved ones, no-op for an empty sample.
    void update_internalization(const std::string& problem_id, const CorrectLengthSample& sample,
                                TargetStatistic stat);

    /// Inserts an entry after checking the map invariants (ValidationError).
    void set_entry(const std::string& problem_id, Entry entry);

    friend bool operator==(const LengthMap&, const LengthMap&) = default;

private:
    Tokens default_target_;
    std::map<std::string, Entry> entries_;
};

/// JSON: {"default_target": N, "entries": {id: {"target": N, "ever_solved": b}}}
/// with lexicographically sorted keys.
std::string to_json_string(const LengthMap& map);
LengthMap length_map_from_json_string(const std::string& text);

void save(const LengthMap& map, const std::filesystem::path& path);
LengthMap load_length_map(const std::filesystem::path& path);

}  // namespace lapo
