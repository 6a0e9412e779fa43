#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lapo/errors.hpp"
#include "lapo/traces.hpp"

using namespace lapo;

namespace {

const std::string kFixture = std::string(LAPO_FIXTURE_DIR) + "/traces_20.jsonl";

const CategoryCount& find(const StageTraceStats& s, const std::string& name) {
    for (const auto& c : s.categories)
        if (c.category == name) return c;
    throw std::runtime_error("missing category " + name);
}

const StageTraceStats& stage(const TraceReport& r, const std::string& label) {
    for (const auto& s : r.stages)
        if (s.stage_label == label) return s;
    throw std::runtime_error("missing stage " + label);
}

TraceReport analyze_text(const std::string& jsonl, const KeywordCategoryConfig& cfg = KeywordCategoryConfig::defaults()) {
    std::istringstream in(jsonl);
    return analyze_traces(in, cfg);
}

}  // namespace

TEST(Traces, DefaultLexiconHasFourCategories) {
    const auto cfg = KeywordCategoryConfig::defaults();
    ASSERT_EQ(cfg.categories.size(), 4u);
    EXPECT_EQ(cfg.categories[0].name, "Self-Correction and Verification");
    EXPECT_EQ(cfg.categories[1].name, "Exploration and Alternatives");
    EXPECT_EQ(cfg.categories[2].name, "Context Setting");
    EXPECT_EQ(cfg.categories[3].name, "Conclusion Drawing");
}

TEST(Traces, ExampleSentence) {
    const auto r = analyze_text(R"({"text":"Wait, let me verify this. Alternatively, try X.","stage_label":"s"})");
    const auto& s = stage(r, "s");
    EXPECT_EQ(find(s, "Self-Correction and Verification").count, 2u);
    EXPECT_EQ(find(s, "Exploration and Alternatives").count, 1u);
    EXPECT_EQ(s.tokens, 8u);
    EXPECT_NEAR(find(s, "Self-Correction and Verification").per_1000_tokens, 250.0, 1e-12);
}

TEST(Traces, WordBoundaries) {
    EXPECT_EQ(count_keyword("awaits", "wait"), 0u);
    EXPECT_EQ(count_keyword("wait", "wait"), 1u);
    EXPECT_EQ(count_keyword("(wait)", "wait"), 1u);
    EXPECT_EQ(count_keyword("rechecked recheck check-in", "check"), 1u);
    EXPECT_EQ(count_keyword("Another\n\tway", "another way"), 1u);
    EXPECT_EQ(count_keyword("thus thus", "thus"), 2u);
}

TEST(Traces, EmptyInputGivesZeros) {
    const auto r = analyze_text("");
    ASSERT_EQ(r.stages.size(), 1u);
    EXPECT_EQ(r.stages[0].stage_label, "all");
    for (const auto& c : r.stages[0].categories) {
        EXPECT_EQ(c.count, 0u);
        EXPECT_EQ(c.per_1000_tokens, 0.0);
    }
    EXPECT_EQ(r.skipped, 0u);
}

TEST(Traces, CaseInvariant) {
    std::ifstream in(kFixture);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string upper = buf.str();
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    std::string lower = buf.str();
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    // Casing of the keys changes too, so compare on rewritten JSON records.
    auto recase = [](const std::string& text, bool up) {
        std::istringstream lines(text);
        std::string out;
        for (std::string line; std::getline(lines, line);) {
            auto j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("text")) {
                out += line + "\n";
                continue;
            }
            auto t = j["text"].get<std::string>();
            std::transform(t.begin(), t.end(), t.begin(),
                           [up](unsigned char c) { return up ? std::toupper(c) : std::tolower(c); });
            j["text"] = t;
            out += j.dump() + "\n";
        }
        return out;
    };
    EXPECT_EQ(analyze_text(recase(buf.str(), true)), analyze_text(recase(buf.str(), false)));
    EXPECT_EQ(analyze_text(recase(buf.str(), true)), analyze_text(buf.str()));
}

TEST(Traces, HandCountedFixture) {
    const auto cfg = KeywordCategoryConfig::defaults();
    // Each fixture record carries its own hand count.
    std::ifstream in(kFixture);
    ASSERT_TRUE(in.good());
    int checked = 0;
    for (std::string line; std::getline(in, line);) {
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("expected")) continue;
        const auto r = analyze_text(line, cfg);
        const auto& s = stage(r, j["stage_label"].get<std::string>());
        EXPECT_EQ(s.tokens, j["expected_tokens"].get<std::size_t>()) << "trace " << j["id"];
        for (const auto& [name, count] : j["expected"].items()) {
            EXPECT_EQ(find(s, name).count, count.get<std::size_t>()) << "trace " << j["id"] << " " << name;
        }
        ++checked;
    }
    EXPECT_EQ(checked, 20);

    const auto r = analyze_traces(std::filesystem::path(kFixture), cfg);
    EXPECT_EQ(r.skipped, 2u);
    const auto& base = stage(r, "base");
    const auto& lapo = stage(r, "lapo");
    const auto& all = stage(r, "all");
    EXPECT_EQ(base.traces, 10u);
    EXPECT_EQ(base.tokens, 96u);
    EXPECT_EQ(lapo.tokens, 71u);
    EXPECT_EQ(all.tokens, 167u);
    const std::pair<const char*, std::size_t> base_counts[] = {{"Self-Correction and Verification", 8},
                                                               {"Exploration and Alternatives", 6},
                                                               {"Context Setting", 3},
                                                               {"Conclusion Drawing", 4}};
    const std::pair<const char*, std::size_t> lapo_counts[] = {{"Self-Correction and Verification", 6},
                                                               {"Exploration and Alternatives", 7},
                                                               {"Context Setting", 5},
                                                               {"Conclusion Drawing", 6}};
    for (const auto& [name, n] : base_counts) EXPECT_EQ(find(base, name).count, n) << name;
    for (const auto& [name, n] : lapo_counts) EXPECT_EQ(find(lapo, name).count, n) << name;
    EXPECT_NEAR(find(base, "Self-Correction and Verification").per_1000_tokens, 8000.0 / 96.0, 1e-9);
    EXPECT_EQ(find(all, "Exploration and Alternatives").count, 13u);
}

TEST(Traces, CustomLexicon) {
    const auto cfg = lexicon_from_json_string(R"({"Hesitation": ["hmm", "wait"]})");
    ASSERT_EQ(cfg.categories.size(), 1u);
    const auto r = analyze_text(R"({"text":"Hmm, wait. HMM.","stage_label":"x"})", cfg);
    EXPECT_EQ(stage(r, "x").categories.size(), 1u);
    EXPECT_EQ(find(stage(r, "x"), "Hesitation").count, 3u);
    std::ostringstream tsv;
    write_trace_tsv(tsv, r);
    EXPECT_EQ(tsv.str(), "stage\tcategory\tfreq\nx\tHesitation\t1000.000\nall\tHesitation\t1000.000\n");
}

TEST(Traces, MalformedLexiconRejected) {
    EXPECT_THROW(lexicon_from_json_string("[1,2]"), ConfigError);
    EXPECT_THROW(lexicon_from_json_string("{}"), ConfigError);
    EXPECT_THROW(lexicon_from_json_string(R"({"A": []})"), ConfigError);
    EXPECT_THROW(lexicon_from_json_string(R"({"A": [3]})"), ConfigError);
    EXPECT_THROW(lexicon_from_json_string(R"({"A": ["  "]})"), ConfigError);
    EXPECT_THROW(lexicon_from_json_string("{not json"), ConfigError);
}
