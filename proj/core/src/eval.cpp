#include "paperlink/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

#include "paperlink/error.hpp"

namespace paperlink {

std::vector<GoldPair> read_gold_pairs(std::istream& in) {
    std::vector<GoldPair> pairs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        GoldPair pair;
        try {
            const auto j = nlohmann::json::parse(line);
            pair.news_id = j.at("news_id").get<std::string>();
            pair.news_path = j.value("news_path", std::string());
            for (const auto& id : j.at("gold_paper_ids")) pair.gold_paper_ids.insert(id.get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad gold pair: ") + e.what(), line_no);
        }
        if (pair.gold_paper_ids.empty()) throw ParseError("gold_paper_ids must not be empty", line_no);
        if (!seen.insert(pair.news_id).second) throw ParseError("duplicate news_id '" + pair.news_id + "'", line_no);
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::optional<std::size_t> best_gold_rank(const RankedList& ranked, const std::set<std::string>& gold) {
    for (std::size_t i = 0; i < ranked.items.size(); ++i) {
        if (gold.contains(ranked.items[i].paper_id)) return i + 1;
    }
    return std::nullopt;
}

double mrr(const std::map<std::string, RankedList>& ranked_lists, std::span<const GoldPair> gold, MissPolicy policy) {
    if (gold.empty()) return 0.0;
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& pair : gold) {
        const auto it = ranked_lists.find(pair.news_id);
        if (it == ranked_lists.end()) throw InputError("no ranked list for news '" + pair.news_id + "'");
        const auto rank = best_gold_rank(it->second, pair.gold_paper_ids);
        if (rank) {
            sum += 1.0 / static_cast<double>(*rank);
            ++counted;
        } else if (policy == MissPolicy::Zero) {
            ++counted;
        }
    }
    return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

double precision_at_k(const RankedList& ranked, const GoldPair& gold, std::size_t k) {
    if (k == 0) throw InputError("precision@k needs k >= 1");
    const auto n = std::min(k, ranked.items.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += gold.gold_paper_ids.count(ranked.items[i].paper_id);
    return static_cast<double>(hits) / static_cast<double>(k);
}

double ndcg_binary(const RankedList& ranked, const GoldPair& gold, std::optional<std::size_t> k) {
    if (gold.gold_paper_ids.empty()) throw InputError("NDCG needs a non-empty gold set");
    const auto cutoff = k.value_or(ranked.items.size());
    const auto n = std::min(cutoff, ranked.items.size());
    double dcg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (gold.gold_paper_ids.contains(ranked.items[i].paper_id)) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
    const auto ideal_hits = std::min(gold.gold_paper_ids.size(), cutoff);
    double idcg = 0.0;
    for (std::size_t i = 0; i < ideal_hits; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return idcg == 0.0 ? 0.0 : dcg / idcg;
}

void score_query(QueryEvaluation& query, const std::vector<std::size_t>& ks) {
    query.p_at.clear();
    if (!query.diagnostic.empty() || query.resolved_gold.empty()) {
        query.rank_of_best_gold.reset();
        for (auto k : ks) query.p_at[k] = 0.0;
        query.ndcg = 0.0;
        return;
    }
    const GoldPair gold{query.news_id, {}, query.resolved_gold};
    query.rank_of_best_gold = best_gold_rank(query.ranking, gold.gold_paper_ids);
    for (auto k : ks) query.p_at[k] = precision_at_k(query.ranking, gold, k);
    query.ndcg = ndcg_binary(query.ranking, gold);
}

AggregateMetrics aggregate_metrics(std::span<const QueryEvaluation> queries, const std::vector<std::size_t>& ks,
                                   MissPolicy policy) {
    AggregateMetrics agg;
    for (auto k : ks) agg.p_at[k] = 0.0;
    if (queries.empty()) return agg;

    double rr = 0.0;
    std::size_t counted = 0;
    for (const auto& q : queries) {
        if (q.rank_of_best_gold) {
            rr += 1.0 / static_cast<double>(*q.rank_of_best_gold);
            ++counted;
        } else if (policy == MissPolicy::Zero) {
            ++counted;
        }
        agg.mean_ndcg += q.ndcg;
        for (auto k : ks) agg.p_at[k] += q.p_at.count(k) ? q.p_at.at(k) : 0.0;
    }
    const auto n = static_cast<double>(queries.size());
    agg.mrr = counted == 0 ? 0.0 : rr / static_cast<double>(counted);
    agg.mean_ndcg /= n;
    for (auto& [k, v] : agg.p_at) v /= n;
    return agg;
}

std::string report_json(const EvalReport& report, const RunConfig& config) {
    nlohmann::ordered_json j;
    auto& cfg = j["config"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config_entries(config)) cfg[key] = value;

    auto& agg = j["aggregate"];
    agg["queries"] = report.per_query.size();
    agg["failed"] = report.failed;
    agg["mrr"] = report.aggregate.mrr;
    agg["mean_ndcg"] = report.aggregate.mean_ndcg;
    auto& p_at = agg["p_at"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.aggregate.p_at) p_at[std::to_string(k)] = v;
    std::size_t fallback = 0;
    for (const auto& q : report.per_query) fallback += q.title_fallback ? 1 : 0;
    agg["title_fallback_queries"] = fallback;

    auto& per_query = j["per_query"] = nlohmann::ordered_json::array();
    for (const auto& q : report.per_query) {
        nlohmann::ordered_json item;
        item["news_id"] = q.news_id;
        item["rank_of_best_gold"] = q.rank_of_best_gold ? nlohmann::ordered_json(*q.rank_of_best_gold) : nlohmann::ordered_json(nullptr);
        auto& qp = item["p_at"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : q.p_at) qp[std::to_string(k)] = v;
        item["ndcg"] = q.ndcg;
        item["title_fallback"] = q.title_fallback;
        item["phrases"] = q.phrases;
        item["queries"] = q.queries;
        item["candidates"] = q.candidates;
        if (!q.diagnostic.empty()) item["diagnostic"] = q.diagnostic;
        per_query.push_back(std::move(item));
    }
    return j.dump(2) + "\n";
}

std::string timings_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["t_prr_seconds"] = report.timings.t_prr_seconds;
    j["t_all_seconds"] = report.timings.t_all_seconds;
    auto& per_query = j["per_query"] = nlohmann::ordered_json::array();
    for (const auto& q : report.per_query) {
        per_query.push_back({{"news_id", q.news_id}, {"t_prr_seconds", q.t_prr_seconds}, {"t_all_seconds", q.t_all_seconds}});
    }
    return j.dump(2) + "\n";
}

std::string report_table(const EvalReport& report, const RunConfig& config) {
    std::ostringstream out;
    char buf[128];
    out << "extractor=" << (config.extractor == Extractor::TextRank ? "textrank"
                            : config.extractor == Extractor::NpChunk ? "chunks"
                                                                      : "remote")
        << " backend=" << to_string(config.backend) << " queries=" << report.per_query.size()
        << " failed=" << report.failed << "\n";
    out << "metric      value\n";
    for (const auto& [k, v] : report.aggregate.p_at) {
        std::snprintf(buf, sizeof buf, "P@%-9zu %6.2f%%\n", k, 100.0 * v);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "MRR         %6.4f\n", report.aggregate.mrr);
    out << buf;
    std::snprintf(buf, sizeof buf, "NDCG        %6.4f\n", report.aggregate.mean_ndcg);
    out << buf;
    std::snprintf(buf, sizeof buf, "T_PRR (s)   %6.3f\n", report.timings.t_prr_seconds);
    out << buf;
    std::snprintf(buf, sizeof buf, "T_all (s)   %6.3f\n", report.timings.t_all_seconds);
    out << buf;
    for (const auto& q : report.per_query) {
        if (!q.diagnostic.empty()) out << "! " << q.news_id << ": " << q.diagnostic << "\n";
    }
    return out.str();
}

}  // namespace paperlink
