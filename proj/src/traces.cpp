#include "lapo/traces.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "lapo/errors.hpp"
#include "lapo/io.hpp"

namespace lapo {

KeywordCategoryConfig KeywordCategoryConfig::defaults() {
    return {{
        {"Self-Correction and Verification", {"wait", "verify", "check", "recheck", "mistake"}},
        {"Exploration and Alternatives",
         {"alternatively", "another way", "another approach", "instead", "let's try", "what if"}},
        {"Context Setting", {"we need to", "the problem asks", "given that"}},
        {"Conclusion Drawing", {"therefore", "thus", "so the answer", "in conclusion"}},
    }};
}

void KeywordCategoryConfig::validate() const {
    if (categories.empty()) throw ConfigError("lexicon has no categories");
    std::set<std::string> names;
    for (const auto& c : categories) {
        if (c.name.empty()) throw ConfigError("lexicon category with an empty name");
        if (!names.insert(c.name).second) throw ConfigError("duplicate lexicon category '" + c.name + "'");
        if (c.keywords.empty()) throw ConfigError("lexicon category '" + c.name + "' has no keywords");
        for (const auto& k : c.keywords) {
            if (std::all_of(k.begin(), k.end(), [](unsigned char ch) { return std::isspace(ch); })) {
                throw ConfigError("lexicon category '" + c.name + "' has a blank keyword");
            }
        }
    }
}

KeywordCategoryConfig lexicon_from_json_string(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("lexicon is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("lexicon must be a JSON object of category -> keyword list");
    KeywordCategoryConfig cfg;
    for (const auto& [name, list] : j.items()) {
        if (!list.is_array()) throw ConfigError("lexicon category '" + name + "' must be an array of strings");
        KeywordCategory cat{name, {}};
        for (const auto& kw : list) {
            if (!kw.is_string()) throw ConfigError("lexicon category '" + name + "' must be an array of strings");
            cat.keywords.push_back(kw.get<std::string>());
        }
        cfg.categories.push_back(std::move(cat));
    }
    cfg.validate();
    return cfg;
}

KeywordCategoryConfig load_lexicon(const std::filesystem::path& path) {
    return lexicon_from_json_string(read_text_file(path));
}

std::size_t count_tokens(const std::string& text) {
    std::istringstream in(text);
    std::size_t n = 0;
    for (std::string tok; in >> tok;) ++n;
    return n;
}

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

// Lowercases and collapses whitespace runs to one space.
std::string normalize(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool in_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(static_cast<char>(std::tolower(c)));
            in_space = false;
        }
    }
    return out;
}

std::size_t count_normalized(const std::string& hay, const std::string& needle) {
    if (needle.empty()) return 0;
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        const std::size_t end = pos + needle.size();
        const bool left_ok = pos == 0 || !is_word_char(static_cast<unsigned char>(hay[pos - 1])) ||
                             !is_word_char(static_cast<unsigned char>(needle.front()));
        const bool right_ok = end == hay.size() || !is_word_char(static_cast<unsigned char>(hay[end])) ||
                              !is_word_char(static_cast<unsigned char>(needle.back()));
        if (left_ok && right_ok) {
            ++count;
            pos = end;
        } else {
            ++pos;
        }
    }
    return count;
}

std::string trim_keyword(const std::string& keyword) {
    std::string k = normalize(keyword);
    const auto first = k.find_first_not_of(' ');
    const auto last = k.find_last_not_of(' ');
    return first == std::string::npos ? std::string() : k.substr(first, last - first + 1);
}

struct Accumulator {
    std::size_t traces = 0;
    std::size_t tokens = 0;
    std::vector<std::size_t> counts;
};

}  // namespace

std::size_t count_keyword(const std::string& text, const std::string& keyword) {
    return count_normalized(normalize(text), trim_keyword(keyword));
}

TraceReport analyze_traces(std::istream& in, const KeywordCategoryConfig& cfg) {
    cfg.validate();
    std::vector<std::vector<std::string>> lexicon;
    for (const auto& c : cfg.categories) {
        std::vector<std::string> kws;
        for (const auto& k : c.keywords) kws.push_back(trim_keyword(k));
        lexicon.push_back(std::move(kws));
    }

    TraceReport report;
    std::map<std::string, Accumulator> by_stage;
    Accumulator all;
    all.counts.assign(lexicon.size(), 0);

    for (std::string line; std::getline(in, line);) {
        if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j["text"].is_string() ||
            !j.contains("stage_label") || !j["stage_label"].is_string()) {
            ++report.skipped;
            continue;
        }
        const std::string text = normalize(j["text"].get<std::string>());
        auto& acc = by_stage[j["stage_label"].get<std::string>()];
        if (acc.counts.empty()) acc.counts.assign(lexicon.size(), 0);
        const std::size_t tokens = count_tokens(text);
        acc.traces += 1;
        acc.tokens += tokens;
        all.traces += 1;
        all.tokens += tokens;
        for (std::size_t c = 0; c < lexicon.size(); ++c) {
            std::size_t n = 0;
            for (const auto& kw : lexicon[c]) n += count_normalized(text, kw);
            acc.counts[c] += n;
            all.counts[c] += n;
        }
    }

    auto emit = [&](const std::string& label, const Accumulator& acc) {
        StageTraceStats s{label, acc.traces, acc.tokens, {}};
        for (std::size_t c = 0; c < lexicon.size(); ++c) {
            const double freq =
                acc.tokens == 0 ? 0.0 : 1000.0 * static_cast<double>(acc.counts[c]) / static_cast<double>(acc.tokens);
            s.categories.push_back({cfg.categories[c].name, acc.counts[c], freq});
        }
        report.stages.push_back(std::move(s));
    };
    for (const auto& [label, acc] : by_stage) emit(label, acc);
    emit("all", all);
    return report;
}

TraceReport analyze_traces(const std::filesystem::path& path, const KeywordCategoryConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open traces file '" + path.string() + "'");
    return analyze_traces(in, cfg);
}

void write_trace_tsv(std::ostream& out, const TraceReport& report) {
    out << "stage\tcategory\tfreq\n";
    for (const auto& s : report.stages) {
        for (const auto& c : s.categories) out << s.stage_label << '\t' << c.category << '\t' << fmt::format("{:.3f}", c.per_1000_tokens) << '\n';
    }
}

}  // namespace lapo
