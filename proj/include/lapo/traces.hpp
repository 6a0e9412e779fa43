#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lapo {

struct KeywordCategory {
    std::string name;
    std::vector<std::string> keywords;

    friend bool operator==(const KeywordCategory&, const KeywordCategory&) = default;
};

/// Ordered keyword categories. Matching is case-insensitive and only counts
/// occurrences bounded by non-alphanumeric characters (or the text edges).
struct KeywordCategoryConfig {
    std::vector<KeywordCategory> categories;

    static KeywordCategoryConfig defaults();
    /// Non-empty, unique names, no empty keyword lists or keywords.
    /// Throws ConfigError.
    void validate() const;

    friend bool operator==(const KeywordCategoryConfig&, const KeywordCategoryConfig&) = default;
};

/// Lexicon file: a JSON object {"Category": ["kw", ...], ...}. Key order is
/// kept as written.
KeywordCategoryConfig lexicon_from_json_string(const std::string& text);
KeywordCategoryConfig load_lexicon(const std::filesystem::path& path);

/// Whitespace-delimited token count.
std::size_t count_tokens(const std::string& text);

/// Non-overlapping word-bounded occurrences of `keyword` in `text`, ignoring
/// case. Runs of whitespace in the text match a single space in the keyword.
std::size_t count_keyword(const std::string& text, const std::string& keyword);

struct CategoryCount {
    std::string category;
    std::size_t count = 0;
    double per_1000_tokens = 0.0;

    friend bool operator==(const CategoryCount&, const CategoryCount&) = default;
};

struct StageTraceStats {
    std::string stage_label;
    std::size_t traces = 0;
    std::size_t tokens = 0;
    std::vector<CategoryCount> categories;  // lexicon order

    friend bool operator==(const StageTraceStats&, const StageTraceStats&) = default;
};

struct TraceReport {
    /// One entry per stage label (sorted), followed by "all" aggregating
    /// every well-formed record.
    std::vector<StageTraceStats> stages;
    std::size_t skipped = 0;  // malformed records

    friend bool operator==(const TraceReport&, const TraceReport&) = default;
};

/// Reads JSONL records {text, stage_label}; malformed lines are skipped and
/// counted. Blank lines are ignored.
TraceReport analyze_traces(std::istream& in, const KeywordCategoryConfig& cfg);
TraceReport analyze_traces(const std::filesystem::path& path, const KeywordCategoryConfig& cfg);

/// "stage\tcategory\tfreq" with frequencies per 1000 tokens.
void write_trace_tsv(std::ostream& out, const TraceReport& report);

}  // namespace lapo
