#include "lapo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "lapo/errors.hpp"
#include "lapo/pipeline.hpp"
#include "lapo/rng.hpp"
#include "lapo/stats.hpp"

namespace lapo {

namespace {

BenchmarkSummary summarize(std::string name, const std::vector<const ProblemEval*>& rows) {
    BenchmarkSummary s;
    s.benchmark = std::move(name);
    s.problems = rows.size();
    std::map<double, std::pair<double, std::size_t>> by_tier;
    for (const auto* r : rows) {
        s.pass1 += r->pass1;
        s.avg_tokens += r->mean_length;
        auto& [sum, count] = by_tier[r->difficulty];
        sum += r->mean_length;
        ++count;
    }
    if (!rows.empty()) {
        s.pass1 /= static_cast<double>(rows.size());
        s.avg_tokens /= static_cast<double>(rows.size());
    }
    for (const auto& [d, acc] : by_tier) {
        s.tiers.push_back({d, acc.first / static_cast<double>(acc.second), acc.second});
    }
    return s;
}

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

EvalReport evaluate(const PolicyParams& params, const EnvModel& env, const std::vector<Problem>& bank, int k,
                    const LengthMap* budget_map, std::uint64_t seed, unsigned threads) {
    if (bank.empty()) throw EmptyBenchmark();
    if (k < 1) throw ConfigError("samples per problem must be >= 1");

    std::vector<ProblemEval> rows(bank.size());
    parallel_for(bank.size(), threads, [&](std::size_t i) {
        const Problem& p = bank[i];
        std::optional<Tokens> budget;
        if (budget_map != nullptr) budget = budget_map->get_target(p.id);
        Rng rng = make_stream({seed, stream::kEval, fnv1a64(p.id)});
        const auto group = rollout_group(params.at(p.id), env, p, budget, k, rng);
        double correct = 0.0;
        double length = 0.0;
        for (const auto& r : group.rollouts) {
            correct += r.correct ? 1.0 : 0.0;
            length += static_cast<double>(r.length);
        }
        rows[i] = {p.id, p.benchmark_tag, p.difficulty, correct / k, length / k};
    });
    std::sort(rows.begin(), rows.end(),
              [](const ProblemEval& a, const ProblemEval& b) { return a.problem_id < b.problem_id; });

    EvalReport report;
    report.problems = std::move(rows);
    std::map<std::string, std::vector<const ProblemEval*>> by_tag;
    std::vector<const ProblemEval*> all;
    for (const auto& r : report.problems) {
        by_tag[r.benchmark_tag].push_back(&r);
        all.push_back(&r);
    }
    for (const auto& [tag, members] : by_tag) report.benchmarks.push_back(summarize(tag, members));
    report.overall = summarize("overall", all);
    return report;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ConfigError("spearman needs equally sized inputs");
    if (x.size() < 2) throw ConfigError("spearman needs at least two points");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

AllocationResult difficulty_allocation(const EvalReport& report) {
    const auto& tiers = report.overall.tiers;
    if (tiers.size() < 2) throw InsufficientTiers(tiers.size());
    std::vector<double> d, len;
    for (const auto& t : tiers) {
        d.push_back(t.difficulty);
        len.push_back(t.mean_length);
    }
    return {tiers, spearman(d, len)};
}

std::string format_pass1(double pass1) { return fmt::format("{:.1f}", pass1 * 100.0); }

std::string format_tokens(double tokens) { return std::to_string(round_tokens(tokens)); }

void write_report_csv(std::ostream& out, const EvalReport& report) {
    out << "benchmark,Pass@1,#Tok\n";
    for (const auto& b : report.benchmarks) {
        out << b.benchmark << ',' << format_pass1(b.pass1) << ',' << format_tokens(b.avg_tokens) << '\n';
    }
    out << "overall," << format_pass1(report.overall.pass1) << ',' << format_tokens(report.overall.avg_tokens)
        << '\n';
}

void write_allocation_tsv(std::ostream& out, const AllocationResult& alloc) {
    out << "tier\tmean_length\n";
    for (const auto& t : alloc.tiers) out << fmt::format("{:g}\t{:.1f}\n", t.difficulty, t.mean_length);
}

}  // namespace lapo
