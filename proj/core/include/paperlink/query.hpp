#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "paperlink/index.hpp"
#include "paperlink/phrases.hpp"

namespace paperlink {

inline constexpr std::size_t kMaxQueryArity = 3;

/// One to three distinct phrases joined by AND.
struct ConjunctiveQuery {
    std::vector<Phrase> phrases;

    /// Union of the phrases' tokens as a multiset, with stopwords and
    /// symbols removed so it lines up with the index vocabulary.
    std::vector<std::string> terms() const;
};

struct QueryCaps {
    std::size_t max_phrases = 30;
    std::size_t max_arity = 3;
    std::size_t max_queries = 300;  // 0 means unlimited
};

/// Takes the top `max_phrases` distinct phrases by score, then emits every
/// singleton, every pair and every triple (lexicographic in phrase rank)
/// until `max_queries` is reached.
std::vector<ConjunctiveQuery> generate_queries(std::span<const Phrase> phrases, const QueryCaps& caps = {});

struct SearchHit {
    std::size_t doc = 0;
    double score = 0.0;

    friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

/// Documents containing every term, ranked by BM25 over the same multiset;
/// equal scores go to the lower ordinal. At most `k` hits.
std::vector<SearchHit> search_terms(const InvertedIndex& index, std::span<const std::string> terms, std::size_t k);
std::vector<SearchHit> search(const InvertedIndex& index, const ConjunctiveQuery& query, std::size_t k);

/// Union of per-query results, deduplicated by candidate_key().
struct CandidateSet {
    std::string news_id;
    std::vector<PaperRecord> candidates;
    std::map<std::string, std::vector<std::size_t>> provenance;  // paper_id -> query indices
};

/// Case-folded title without punctuation plus the sorted case-folded authors.
std::string candidate_key(const PaperRecord& paper);

/// Merges ranked result lists, one per query, in query order.
CandidateSet merge_candidates(std::string news_id, std::span<const std::vector<PaperRecord>> per_query);

CandidateSet retrieve_candidates(const InvertedIndex& index, std::span<const ConjunctiveQuery> queries,
                                 std::size_t per_query_k = 10, std::string news_id = {});

}  // namespace paperlink
