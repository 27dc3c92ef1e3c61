#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "paperlink/error.hpp"
#include "paperlink/phrases.hpp"

namespace paperlink {

bool is_textrank_candidate(Pos pos) {
    return pos == Pos::Noun || pos == Pos::ProperNoun || pos == Pos::Adj;
}

WordGraph build_cooccurrence_graph(const CleanDocument& doc, std::size_t window) {
    if (window < 2) throw InputError("TextRank window must be at least 2");
    WordGraph graph;
    std::unordered_map<std::string, std::size_t> ids;

    for (const auto& sentence : doc.sentences) {
        // (token position, node id) of the candidates in this sentence
        std::vector<std::pair<std::size_t, std::size_t>> members;
        for (std::size_t t = 0; t < sentence.size(); ++t) {
            const auto& token = sentence[t];
            if (!is_textrank_candidate(token.pos) || !is_word(token.surface)) continue;
            auto [it, inserted] = ids.try_emplace(token.norm, graph.nodes.size());
            if (inserted) {
                graph.nodes.push_back(token.norm);
                graph.neighbors.emplace_back();
            }
            members.emplace_back(t, it->second);
        }
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                if (members[b].first - members[a].first >= window) break;
                const auto u = members[a].second;
                const auto v = members[b].second;
                if (u == v) continue;
                graph.neighbors[u].push_back(v);
                graph.neighbors[v].push_back(u);
            }
        }
    }
    for (auto& list : graph.neighbors) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return graph;
}

std::vector<double> textrank_scores(const WordGraph& graph, const TextRankParams& params,
                                    std::span<const double> initial) {
    const std::size_t n = graph.size();
    if (n == 0) return {};
    if (!initial.empty() && initial.size() != n) {
        throw InputError("initial TextRank vector has the wrong length");
    }
    if (params.damping <= 0.0 || params.damping >= 1.0) throw InputError("damping must lie in (0, 1)");

    std::vector<double> scores(n, 1.0);
    if (!initial.empty()) std::copy(initial.begin(), initial.end(), scores.begin());

    const double d = params.damping;
    std::vector<double> next(n);
    for (std::size_t iter = 0; iter < params.max_iter; ++iter) {
        double dangling = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            if (graph.neighbors[u].empty()) dangling += scores[u];
        }
        const double base = (1.0 - d) + d * dangling / static_cast<double>(n);
        double delta = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            double incoming = 0.0;
            for (auto u : graph.neighbors[v]) {
                incoming += scores[u] / static_cast<double>(graph.neighbors[u].size());
            }
            next[v] = base + d * incoming;
            delta = std::max(delta, std::abs(next[v] - scores[v]));
        }
        scores.swap(next);
        if (delta < params.tol) break;
    }
    return scores;
}

std::vector<std::size_t> select_keywords(std::span<const double> scores, double keep_ratio) {
    const std::size_t n = scores.size();
    if (n == 0) return {};
    // The small slack keeps 6 * (1/3) from rounding up to 3.
    auto keep = static_cast<std::size_t>(std::ceil(keep_ratio * static_cast<double>(n) - 1e-9));
    keep = std::clamp<std::size_t>(keep, 1, n);

    // Scores are compared at 1e-9 resolution so symmetric nodes tie exactly
    // and the order falls back to first occurrence.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<long long> key(n);
    for (std::size_t i = 0; i < n; ++i) key[i] = std::llround(scores[i] * 1e9);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
    order.resize(keep);
    return order;
}

std::vector<Phrase> extract_textrank(const CleanDocument& doc, const TextRankParams& params) {
    const auto graph = build_cooccurrence_graph(doc, params.window);
    if (graph.size() == 0) return {};
    const auto scores = textrank_scores(graph, params);

    std::unordered_map<std::string_view, double> kept;
    for (auto idx : select_keywords(scores, params.keep_ratio)) kept.emplace(graph.nodes[idx], scores[idx]);

    std::vector<Phrase> phrases;
    std::unordered_map<std::string, std::size_t> by_text;
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        const auto& sentence = doc.sentences[s];
        std::size_t run_start = 0;
        std::vector<std::size_t> run;
        auto flush = [&] {
            if (run.empty()) return;
            Phrase phrase;
            phrase.extractor = Extractor::TextRank;
            for (auto t : run) {
                phrase.tokens.push_back(sentence[t].norm);
                if (!phrase.text.empty()) phrase.text.push_back(' ');
                phrase.text += sentence[t].surface;
                phrase.score += kept.at(sentence[t].norm);
            }
            const PhraseSpan span{s, run_start, run_start + run.size()};
            auto key = phrase.normalized();
            if (auto it = by_text.find(key); it != by_text.end()) {
                phrases[it->second].spans.push_back(span);
            } else {
                phrase.spans.push_back(span);
                by_text.emplace(std::move(key), phrases.size());
                phrases.push_back(std::move(phrase));
            }
            run.clear();
        };
        for (std::size_t t = 0; t < sentence.size(); ++t) {
            const auto& token = sentence[t];
            const bool keep = is_textrank_candidate(token.pos) && kept.contains(token.norm);
            if (!keep) {
                flush();
                continue;
            }
            // A repeated word starts a new phrase rather than growing this one.
            const bool repeat = std::any_of(run.begin(), run.end(),
                                            [&](std::size_t r) { return sentence[r].norm == token.norm; });
            if (repeat) flush();
            if (run.empty()) run_start = t;
            run.push_back(t);
        }
        flush();
    }
    std::stable_sort(phrases.begin(), phrases.end(),
                     [](const Phrase& a, const Phrase& b) { return a.score > b.score; });
    return phrases;
}

}  // namespace paperlink
