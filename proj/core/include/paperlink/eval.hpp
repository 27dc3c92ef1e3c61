#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "paperlink/config.hpp"
#include "paperlink/index.hpp"
#include "paperlink/rerank.hpp"

namespace paperlink {

struct GoldPair {
    std::string news_id;
    std::string news_path;
    std::set<std::string> gold_paper_ids;  // never empty
};

/// Reads {news_id, news_path, gold_paper_ids:[...]} per line. Throws
/// ParseError for an empty gold list or a repeated news_id.
std::vector<GoldPair> read_gold_pairs(std::istream& in);

// ---------------------------------------------------------------------------
// Metric kernels. All are pure functions of (ranked list, gold set).

/// 1-based rank of the highest-ranked gold paper.
std::optional<std::size_t> best_gold_rank(const RankedList& ranked, const std::set<std::string>& gold);

/// (1/|Q|) * sum of 1/rank(i) using each query's best-ranked gold paper.
/// With MissPolicy::Zero a query without any gold in its list adds 0; with
/// Exclude it is left out of |Q|. Throws InputError when a gold pair has no
/// ranked list.
double mrr(const std::map<std::string, RankedList>& ranked_lists, std::span<const GoldPair> gold,
           MissPolicy policy = MissPolicy::Zero);

/// |top-k intersect gold| / k; the denominator stays k for short lists.
double precision_at_k(const RankedList& ranked, const GoldPair& gold, std::size_t k);

/// Binary-gain NDCG with discount log2(i + 1) for 1-based rank i. The ideal
/// ordering puts min(|gold|, k) relevant papers on top; k defaults to the
/// list length.
double ndcg_binary(const RankedList& ranked, const GoldPair& gold, std::optional<std::size_t> k = std::nullopt);

// ---------------------------------------------------------------------------
// Benchmark

struct QueryEvaluation {
    std::string news_id;
    std::optional<std::size_t> rank_of_best_gold;
    std::map<std::size_t, double> p_at;
    double ndcg = 0.0;
    bool title_fallback = false;  // gold matched by normalized title, not id
    std::string diagnostic;       // non-empty when the pipeline failed
    std::size_t phrases = 0;
    std::size_t queries = 0;
    std::size_t candidates = 0;
    double t_prr_seconds = 0.0;
    double t_all_seconds = 0.0;
    RankedList ranking;
    std::set<std::string> resolved_gold;
};

struct AggregateMetrics {
    double mrr = 0.0;
    double mean_ndcg = 0.0;
    std::map<std::size_t, double> p_at;
};

struct BenchmarkTimings {
    double t_prr_seconds = 0.0;  // mean per article
    double t_all_seconds = 0.0;  // mean per article
};

struct EvalReport {
    std::vector<QueryEvaluation> per_query;  // in gold-file order
    AggregateMetrics aggregate;
    BenchmarkTimings timings;
    std::size_t failed = 0;
};

struct BenchmarkOptions {
    std::filesystem::path news_base_dir;  // relative news_path values resolve here
    std::optional<std::filesystem::path> dump_dir;
};

/// Runs the pipeline for every gold pair and scores the rankings. A failing
/// article is recorded with zero metrics and a diagnostic; the run goes on.
/// Throws InputError for an empty gold list.
EvalReport run_benchmark(const RunConfig& config, const InvertedIndex& index, std::span<const GoldPair> gold,
                         const BenchmarkOptions& options = {});

/// Scores precomputed rankings (the benchmark minus the pipeline).
void score_query(QueryEvaluation& query, const std::vector<std::size_t>& ks);
AggregateMetrics aggregate_metrics(std::span<const QueryEvaluation> queries, const std::vector<std::size_t>& ks,
                                   MissPolicy policy);

/// Machine-readable report: echoed config, aggregate and per-query
/// metrics. Excludes wall-clock timings so identical runs produce identical
/// bytes; those go to timings_json().
std::string report_json(const EvalReport& report, const RunConfig& config);
std::string timings_json(const EvalReport& report);
/// Human-readable summary table.
std::string report_table(const EvalReport& report, const RunConfig& config);

/// One JSON file per query: {news_id, gold_paper_ids, items:[{paper_id, similarity}]}.
void dump_ranking(const std::filesystem::path& dir, const QueryEvaluation& query);
std::string ranking_file_name(const std::string& news_id);

}  // namespace paperlink
