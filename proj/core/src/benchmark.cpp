#include <algorithm>
#include <atomic>
#include <fstream>
#include <nlohmann/json.hpp>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "paperlink/error.hpp"
#include "paperlink/eval.hpp"
#include "paperlink/pipeline.hpp"

namespace paperlink {

namespace {

std::string normalize_title(std::string_view title) {
    std::string out;
    for (const auto& token : tokenize(title)) {
        if (!is_word(token.surface)) continue;
        if (!out.empty()) out.push_back(' ');
        out += token.norm;
    }
    return out;
}

class GoldResolver {
public:
    explicit GoldResolver(const InvertedIndex& index) {
        for (const auto& paper : index.papers()) {
            ids_.insert(paper.paper_id);
            by_title_[normalize_title(paper.title)].push_back(paper.paper_id);
        }
    }

    /// Ids that exist in the corpus stay as they are; anything else is
    /// tried as a paper title.
    std::set<std::string> resolve(const std::set<std::string>& gold, bool& used_title) const {
        std::set<std::string> out;
        for (const auto& g : gold) {
            if (ids_.contains(g)) {
                out.insert(g);
                continue;
            }
            if (auto it = by_title_.find(normalize_title(g)); it != by_title_.end()) {
                out.insert(it->second.begin(), it->second.end());
                used_title = true;
            } else {
                out.insert(g);  // unreachable gold: a visible recall failure
            }
        }
        return out;
    }

private:
    std::unordered_set<std::string> ids_;
    std::unordered_map<std::string, std::vector<std::string>> by_title_;
};

}  // namespace

std::string ranking_file_name(const std::string& news_id) {
    std::string name;
    for (char c : news_id) {
        const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        name.push_back(safe ? c : '_');
    }
    if (name.empty() || name.front() == '.') name.insert(name.begin(), '_');
    return name + ".json";
}

void dump_ranking(const std::filesystem::path& dir, const QueryEvaluation& query) {
    nlohmann::ordered_json j;
    j["news_id"] = query.news_id;
    j["gold_paper_ids"] = query.resolved_gold;
    auto& items = j["items"] = nlohmann::ordered_json::array();
    for (const auto& item : query.ranking.items) {
        items.push_back({{"paper_id", item.paper_id}, {"similarity", item.similarity}});
    }
    std::ofstream out(dir / ranking_file_name(query.news_id));
    if (!out) throw InputError("cannot write ranking dump into '" + dir.string() + "'");
    out << j.dump(1) << "\n";
}

EvalReport run_benchmark(const RunConfig& config, const InvertedIndex& index, std::span<const GoldPair> gold,
                         const BenchmarkOptions& options) {
    if (gold.empty()) throw InputError("benchmark needs at least one gold pair");
    const Pipeline pipeline(config, index);
    const GoldResolver resolver(index);

    EvalReport report;
    report.per_query.resize(gold.size());

    auto evaluate = [&](std::size_t i) {
        const auto& pair = gold[i];
        auto& q = report.per_query[i];
        q.news_id = pair.news_id;
        q.ranking.news_id = pair.news_id;
        q.resolved_gold = resolver.resolve(pair.gold_paper_ids, q.title_fallback);
        try {
            std::filesystem::path path(pair.news_path);
            if (path.empty()) throw InputError("gold pair has no news_path");
            if (path.is_relative() && !options.news_base_dir.empty()) path = options.news_base_dir / path;
            const auto result = pipeline.run(load_news_file(path.string(), pair.news_id));
            q.phrases = result.phrases.size();
            q.queries = result.queries.size();
            q.candidates = result.candidates.candidates.size();
            q.ranking = result.ranking;
            q.t_prr_seconds = result.timings.rerank;
            q.t_all_seconds = result.timings.total;
        } catch (const std::exception& e) {
            q.diagnostic = e.what();
            q.ranking.items.clear();
        }
        score_query(q, config.ks);
    };

    const auto workers = std::min<std::size_t>(std::max<std::size_t>(config.parallelism, 1), gold.size());
    if (workers == 1) {
        for (std::size_t i = 0; i < gold.size(); ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> threads;
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&] {
                for (auto i = next++; i < gold.size(); i = next++) evaluate(i);
            });
        }
    }

    for (const auto& q : report.per_query) {
        report.failed += q.diagnostic.empty() ? 0 : 1;
        report.timings.t_prr_seconds += q.t_prr_seconds;
        report.timings.t_all_seconds += q.t_all_seconds;
    }
    report.timings.t_prr_seconds /= static_cast<double>(gold.size());
    report.timings.t_all_seconds /= static_cast<double>(gold.size());
    report.aggregate = aggregate_metrics(report.per_query, config.ks, config.miss_policy);

    if (options.dump_dir) {
        std::filesystem::create_directories(*options.dump_dir);
        for (const auto& q : report.per_query) dump_ranking(*options.dump_dir, q);
    }
    return report;
}

}  // namespace paperlink
