#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "paperlink/index.hpp"
#include "paperlink/remote.hpp"
#include "paperlink/textprep.hpp"

namespace paperlink {

/// Sparse TFIDF vector over a RetrievalCorpus vocabulary of size `dim`.
struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries;  // strictly increasing index
    std::size_t dim = 0;

    /// The flagged all-zero vector (no in-vocabulary term).
    bool zero() const { return entries.empty(); }
};

struct DenseVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
    bool zero() const;
};

struct CorpusOptions {
    bool drop_stopwords = true;
};

/// The news article plus its candidate papers. Document frequencies are
/// counted over these n_docs = candidates + 1 documents only, so the same
/// paper can weigh differently in different retrieval corpora.
class RetrievalCorpus {
public:
    /// Throws InputError when there are no candidates.
    static RetrievalCorpus build(const CleanDocument& news, std::vector<PaperRecord> candidates,
                                 CorpusOptions options = {});

    std::size_t n_docs() const { return candidates_.size() + 1; }
    std::size_t vocabulary_size() const { return vocabulary_.size(); }
    /// Sorted; a term's index is its position here.
    const std::vector<std::string>& vocabulary() const { return vocabulary_; }
    std::optional<std::uint32_t> term_index(std::string_view term) const;
    std::size_t df(std::string_view term) const;
    std::size_t df(std::uint32_t term) const { return df_.at(term); }
    /// ln((n_docs + 1) / (df + 1)) + 1
    double idf(std::uint32_t term) const;

    const std::string& news_id() const { return news_id_; }
    const std::vector<std::string>& news_terms() const { return news_terms_; }
    const std::vector<PaperRecord>& candidates() const { return candidates_; }
    const std::vector<std::string>& candidate_terms(std::size_t i) const { return candidate_terms_.at(i); }

private:
    struct TermHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };

    std::string news_id_;
    std::vector<std::string> news_terms_;
    std::vector<PaperRecord> candidates_;
    std::vector<std::vector<std::string>> candidate_terms_;
    std::vector<std::string> vocabulary_;
    std::unordered_map<std::string, std::uint32_t, TermHash, std::equal_to<>> index_;
    std::vector<std::size_t> df_;
};

/// Raw term counts times the smoothed idf, L2-normalized. Terms outside the
/// vocabulary are ignored; with none left the zero vector is returned.
SparseVector tfidf_vector(std::span<const std::string> doc_terms, const RetrievalCorpus& corpus);

/// Word-vector table loaded from text: one "word v1 ... vdim" line per word,
/// optionally preceded by a "count dim" header. Words are case-folded on load
/// and the first occurrence of a word wins.
class WordVectorTable {
public:
    static WordVectorTable load(std::istream& in);
    static WordVectorTable load_file(const std::string& path);
    static WordVectorTable from_rows(std::size_t dim, const std::vector<std::pair<std::string, std::vector<double>>>& rows);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return rows_.size(); }
    std::optional<std::span<const double>> find(std::string_view word) const;

private:
    struct WordHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };
    bool add(std::string word, std::span<const double> values);

    std::size_t dim_ = 0;
    std::vector<double> values_;
    std::unordered_map<std::string, std::size_t, WordHash, std::equal_to<>> rows_;
};

/// Unweighted: mean vector over the in-vocabulary tokens (repeats count).
/// Weighted: sum of w(t) v(t) / sum of w(t) over distinct in-vocabulary terms
/// that have a positive weight. Zero vector when nothing contributes.
DenseVector avg_wordvec(std::span<const std::string> doc_terms, const WordVectorTable& table,
                        const std::unordered_map<std::string, double>* weights = nullptr);

/// POST /embed. One vector per text, in order; empty input sends nothing.
/// Throws RemoteError on transport failure or ragged/mismatched shapes.
std::vector<DenseVector> remote_embed(std::span<const std::string> texts, const ServiceEndpoint& endpoint,
                                      std::string_view model_name);

/// Parses an /embed response body for `expected` texts.
std::vector<DenseVector> parse_embed_response(const std::string& body, std::size_t expected);

/// a.b / (|a| |b|), or 0 when either norm is 0. Throws InputError on a
/// dimension mismatch. Clamped to [-1, 1].
double cosine(const SparseVector& a, const SparseVector& b);
double cosine(const DenseVector& a, const DenseVector& b);

struct RankedItem {
    std::string paper_id;
    double similarity = 0.0;

    friend bool operator==(const RankedItem&, const RankedItem&) = default;
};

struct RankedList {
    std::string news_id;
    std::vector<RankedItem> items;  // non-increasing similarity, ties by paper_id
};

/// Orders candidates by cosine similarity to the news vector.
RankedList rerank(const SparseVector& news, const std::map<std::string, SparseVector>& candidates,
                  std::string news_id = {});
RankedList rerank(const DenseVector& news, const std::map<std::string, DenseVector>& candidates,
                  std::string news_id = {});

}  // namespace paperlink
