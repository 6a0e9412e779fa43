#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lapo/length_map.hpp"
#include "lapo/policy.hpp"
#include "lapo/types.hpp"

namespace lapo {

struct ProblemEval {
    std::string problem_id;
    std::string benchmark_tag;
    double difficulty = 1.0;
    double pass1 = 0.0;
    double mean_length = 0.0;

    friend bool operator==(const ProblemEval&, const ProblemEval&) = default;
};

struct TierMean {
    double difficulty = 1.0;
    double mean_length = 0.0;
    std::size_t problems = 0;

    friend bool operator==(const TierMean&, const TierMean&) = default;
};

/// Aggregates over one benchmark tag (or the whole bank).
struct BenchmarkSummary {
    std::string benchmark;
    std::size_t problems = 0;
    double pass1 = 0.0;
    double avg_tokens = 0.0;
    std::vector<TierMean> tiers;  // ascending difficulty

    friend bool operator==(const BenchmarkSummary&, const BenchmarkSummary&) = default;
};

struct EvalReport {
    std::vector<ProblemEval> problems;        // sorted by id
    std::vector<BenchmarkSummary> benchmarks;  // sorted by tag
    BenchmarkSummary overall;                  // benchmark name "overall"

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Samples k rollouts per problem, budget-conditioned on the map target when
/// `budget_map` is given. Each problem draws from a stream keyed on `seed`
/// and its id, so the report does not depend on bank order or thread count.
/// Throws EmptyBenchmark for an empty bank and ConfigError for k < 1.
EvalReport evaluate(const PolicyParams& params, const EnvModel& env, const std::vector<Problem>& bank, int k,
                    const LengthMap* budget_map, std::uint64_t seed, unsigned threads = 1);

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either side is constant. Throws ConfigError on size mismatch or n < 2.
double spearman(std::span<const double> x, std::span<const double> y);

struct AllocationResult {
    std::vector<TierMean> tiers;
    double spearman_rho = 0.0;
};

/// Correlation between difficulty tier and mean generated length over the
/// whole bank. Throws InsufficientTiers with fewer than two tiers.
AllocationResult difficulty_allocation(const EvalReport& report);

/// Pass@1 as a percentage with one decimal, tokens as an integer.
std::string format_pass1(double pass1);
std::string format_tokens(double tokens);

/// "benchmark,Pass@1,#Tok" followed by one row per benchmark and an
/// "overall" row.
void write_report_csv(std::ostream& out, const EvalReport& report);
/// "tier\tmean_length" rows.
void write_allocation_tsv(std::ostream& out, const AllocationResult& alloc);

}  // namespace lapo
