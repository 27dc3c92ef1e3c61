#include "paperlink/query.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "paperlink/error.hpp"
#include "paperlink/textprep.hpp"

namespace paperlink {

std::vector<std::string> ConjunctiveQuery::terms() const {
    std::vector<std::string> out;
    for (const auto& phrase : phrases) {
        for (const auto& token : phrase.tokens) {
            if (!is_word(token) || is_stopword(token)) continue;
            out.push_back(token);
        }
    }
    return out;
}

std::vector<ConjunctiveQuery> generate_queries(std::span<const Phrase> phrases, const QueryCaps& caps) {
    if (caps.max_arity == 0 || caps.max_arity > kMaxQueryArity) {
        throw InputError("query arity must be between 1 and 3");
    }
    // Rank by score with first occurrence breaking ties, keep distinct texts.
    std::vector<std::size_t> order(phrases.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return phrases[a].score > phrases[b].score; });
    std::vector<const Phrase*> top;
    std::unordered_set<std::string> seen;
    for (auto i : order) {
        if (top.size() >= caps.max_phrases) break;
        if (seen.insert(phrases[i].normalized()).second) top.push_back(&phrases[i]);
    }

    const std::size_t limit = caps.max_queries == 0 ? std::numeric_limits<std::size_t>::max() : caps.max_queries;
    std::vector<ConjunctiveQuery> queries;
    const std::size_t n = top.size();
    auto emit = [&](std::initializer_list<std::size_t> members) {
        if (queries.size() >= limit) return false;
        ConjunctiveQuery q;
        for (auto m : members) q.phrases.push_back(*top[m]);
        queries.push_back(std::move(q));
        return true;
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (!emit({i})) return queries;
    }
    if (caps.max_arity >= 2) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!emit({i, j})) return queries;
            }
        }
    }
    if (caps.max_arity >= 3) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                for (std::size_t k = j + 1; k < n; ++k) {
                    if (!emit({i, j, k})) return queries;
                }
            }
        }
    }
    return queries;
}

std::vector<SearchHit> search_terms(const InvertedIndex& index, std::span<const std::string> terms, std::size_t k) {
    if (k == 0) throw InputError("search k must be at least 1");
    if (terms.empty()) return {};

    std::vector<std::string_view> distinct(terms.begin(), terms.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<std::span<const Posting>> lists;
    for (auto term : distinct) {
        const auto list = index.postings(term);
        if (list.empty()) return {};
        lists.push_back(list);
    }
    std::sort(lists.begin(), lists.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });

    // AND: walk the shortest list and probe the others.
    std::vector<std::uint32_t> matches;
    for (const auto& p : lists.front()) {
        bool all = true;
        for (std::size_t l = 1; l < lists.size() && all; ++l) {
            all = std::binary_search(lists[l].begin(), lists[l].end(), Posting{p.doc, 0},
                                     [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
        }
        if (all) matches.push_back(p.doc);
    }

    std::vector<SearchHit> hits;
    hits.reserve(matches.size());
    for (auto doc : matches) hits.push_back({doc, index.bm25_score(terms, doc)});

    auto better = [](const SearchHit& a, const SearchHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc < b.doc;
    };
    if (hits.size() > k) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), better);
        hits.resize(k);
    } else {
        std::sort(hits.begin(), hits.end(), better);
    }
    return hits;
}

std::vector<SearchHit> search(const InvertedIndex& index, const ConjunctiveQuery& query, std::size_t k) {
    const auto terms = query.terms();
    return search_terms(index, terms, k);
}

std::string candidate_key(const PaperRecord& paper) {
    auto simplify = [](std::string_view text) {
        std::string out;
        for (const auto& token : tokenize(text)) {
            if (!is_word(token.surface)) continue;
            if (!out.empty()) out.push_back(' ');
            out += token.norm;
        }
        return out;
    };
    std::vector<std::string> authors;
    for (const auto& a : paper.authors) authors.push_back(simplify(a));
    std::sort(authors.begin(), authors.end());

    std::string key = simplify(paper.title);
    key.push_back('\x1f');
    for (const auto& a : authors) {
        key += a;
        key.push_back('\x1e');
    }
    return key;
}

CandidateSet merge_candidates(std::string news_id, std::span<const std::vector<PaperRecord>> per_query) {
    CandidateSet set;
    set.news_id = std::move(news_id);
    std::unordered_map<std::string, std::size_t> by_key;
    for (std::size_t q = 0; q < per_query.size(); ++q) {
        for (const auto& paper : per_query[q]) {
            auto key = candidate_key(paper);
            auto it = by_key.find(key);
            if (it == by_key.end()) {
                it = by_key.emplace(std::move(key), set.candidates.size()).first;
                set.candidates.push_back(paper);
            }
            auto& hits = set.provenance[set.candidates[it->second].paper_id];
            if (hits.empty() || hits.back() != q) hits.push_back(q);
        }
    }
    return set;
}

CandidateSet retrieve_candidates(const InvertedIndex& index, std::span<const ConjunctiveQuery> queries,
                                 std::size_t per_query_k, std::string news_id) {
    std::vector<std::vector<PaperRecord>> per_query;
    per_query.reserve(queries.size());
    for (const auto& query : queries) {
        auto& papers = per_query.emplace_back();
        for (const auto& hit : search(index, query, per_query_k)) papers.push_back(index.paper(hit.doc));
    }
    return merge_candidates(std::move(news_id), per_query);
}

}  // namespace paperlink
