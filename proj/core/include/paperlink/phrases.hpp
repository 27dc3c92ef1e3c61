#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paperlink/remote.hpp"
#include "paperlink/textprep.hpp"

namespace paperlink {

enum class Extractor { TextRank, NpChunk, Remote };

std::string_view to_string(Extractor extractor);

/// Token range [token_start, token_end) inside one sentence of a CleanDocument.
struct PhraseSpan {
    std::size_t sentence = 0;
    std::size_t token_start = 0;
    std::size_t token_end = 0;

    friend auto operator<=>(const PhraseSpan&, const PhraseSpan&) = default;
};

/// A DKE or keyphrase candidate.
struct Phrase {
    std::vector<std::string> tokens;  // norms
    std::string text;
    double score = 0.0;
    Extractor extractor = Extractor::NpChunk;
    std::vector<PhraseSpan> spans;

    /// Tokens joined by single spaces; the key used for matching and dedup.
    std::string normalized() const;
};

/// Case-folds and collapses whitespace so free text compares equal to
/// Phrase::normalized().
std::string normalize_phrase(std::string_view text);

// ---------------------------------------------------------------------------
// TextRank

struct TextRankParams {
    std::size_t window = 2;  // 2 links only words that are adjacent in the text
    double damping = 0.85;
    std::size_t max_iter = 100;
    double tol = 1e-6;
    double keep_ratio = 1.0 / 3.0;
};

/// Undirected co-occurrence graph over candidate word norms. Nodes are in
/// order of first occurrence; neighbour lists are sorted and exclude self-loops.
struct WordGraph {
    std::vector<std::string> nodes;
    std::vector<std::vector<std::size_t>> neighbors;

    std::size_t size() const { return nodes.size(); }
};

/// Nouns, proper nouns and adjectives take part in TextRank.
bool is_textrank_candidate(Pos pos);

/// Links two candidate tokens of the same sentence whose positions differ by
/// less than `window`.
WordGraph build_cooccurrence_graph(const CleanDocument& doc, std::size_t window);

/// Damped power iteration  s = (1 - d) + d * (W s + dangling / n), where W
/// spreads each node's score evenly over its neighbours and isolated nodes
/// spread theirs over the whole graph. Scores sum to the node count at the
/// fixed point. `initial` defaults to all ones.
std::vector<double> textrank_scores(const WordGraph& graph, const TextRankParams& params,
                                    std::span<const double> initial = {});

/// Indices of the kept keywords: the top ceil(keep_ratio * n) nodes by score,
/// ties broken by first occurrence.
std::vector<std::size_t> select_keywords(std::span<const double> scores, double keep_ratio);

/// Keywords adjacent in the text are merged into multiword phrases scored by
/// the sum of their word scores. Sorted by score, descending.
std::vector<Phrase> extract_textrank(const CleanDocument& doc, const TextRankParams& params = {});

// ---------------------------------------------------------------------------
// Grammar chunker

inline constexpr std::size_t kMaxChunkTokens = 6;

/// Maximal ADJ* (NOUN|PROPER_NOUN)+ runs. Runs longer than `max_tokens`
/// keep their last `max_tokens` tokens so the head noun survives.
std::vector<Phrase> extract_np_chunks(const CleanDocument& doc, std::size_t max_tokens = kMaxChunkTokens);

// ---------------------------------------------------------------------------
// Remote extractor (POST /extract)

/// Sends the cleaned text and maps the returned byte spans onto whole tokens.
/// Throws RemoteError on transport failure or a malformed response.
std::vector<Phrase> extract_remote(const CleanDocument& doc, const ServiceEndpoint& endpoint);

struct RemoteSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string label;
    double score = 0.0;
};

/// Parses an /extract response body against `text_size`; used by extract_remote.
std::vector<RemoteSpan> parse_extract_response(const std::string& body, std::size_t text_size);

/// Snaps byte spans outward to token boundaries.
std::vector<Phrase> phrases_from_spans(const CleanDocument& doc, std::span<const RemoteSpan> spans);

// ---------------------------------------------------------------------------

/// Case-folded exact-text dedup keeping the highest score per text; output
/// is ordered by score descending, then first occurrence.
std::vector<Phrase> dedup_phrases(std::vector<Phrase> phrases);

struct ExtractionGold {
    std::string source_id;
    std::set<std::string> gold_phrases;
};

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Exact match on normalized phrase strings. Throws InputError for an empty
/// gold set.
PRF score_extraction(std::span<const Phrase> predicted, const ExtractionGold& gold);

}  // namespace paperlink
