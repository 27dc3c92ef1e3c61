#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace paperlink {

struct PaperRecord {
    std::string paper_id;
    std::string title;
    std::string abstract;
    std::vector<std::string> authors;

    friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

/// Reads a corpus: one JSON object per line, {paper_id, title, abstract, authors}.
/// Blank lines are skipped. Throws ParseError naming the offending line.
std::vector<PaperRecord> read_corpus(std::istream& in);

void write_paper_json(std::ostream& out, const PaperRecord& paper);

struct Posting {
    std::uint32_t doc = 0;
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    friend bool operator==(const Bm25Params&, const Bm25Params&) = default;
};

/// Okapi BM25 weight of one query-term occurrence:
///   idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
/// with idf = ln(1 + (N - df + 0.5) / (df + 0.5)), which is never negative.
double bm25_idf(std::size_t n_docs, std::size_t df);
double bm25_term_weight(double idf, std::uint32_t tf, std::size_t doc_len, double avgdl, const Bm25Params& params);

/// Immutable BM25 index over title + abstract of each paper. Safe to share
/// between threads once built.
class InvertedIndex {
public:
    using PostingMap = std::map<std::string, std::vector<Posting>, std::less<>>;

    /// Throws InputError for an empty corpus, a duplicate paper_id, an empty
    /// title or out-of-range parameters.
    static InvertedIndex build(std::vector<PaperRecord> corpus, Bm25Params params = {});

    /// Line-oriented persistence; see docs/index-format.md.
    void save(std::ostream& out) const;
    static InvertedIndex load(std::istream& in);

    /// Empty span when the term is not indexed. Postings are sorted by doc.
    std::span<const Posting> postings(std::string_view term) const;
    std::size_t df(std::string_view term) const { return postings(term).size(); }
    std::uint32_t tf(std::string_view term, std::size_t doc) const;

    std::size_t n_docs() const { return papers_.size(); }
    std::size_t vocabulary_size() const { return postings_.size(); }
    double avgdl() const { return avgdl_; }
    std::size_t doc_len(std::size_t doc) const { return doc_len_.at(doc); }
    const std::vector<std::size_t>& doc_lengths() const { return doc_len_; }
    const Bm25Params& params() const { return params_; }
    const PaperRecord& paper(std::size_t doc) const { return papers_.at(doc); }
    const std::vector<PaperRecord>& papers() const { return papers_; }
    const PostingMap& all_postings() const { return postings_; }

    /// Sum of bm25_term_weight over `terms` (a multiset, so repeats count
    /// again). Terms absent from the document contribute exactly 0.
    double bm25_score(std::span<const std::string> terms, std::size_t doc) const;

    friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;

private:
    InvertedIndex() = default;
    void finish();

    std::vector<PaperRecord> papers_;
    PostingMap postings_;
    std::vector<std::size_t> doc_len_;
    double avgdl_ = 0.0;
    Bm25Params params_;
};

/// Indexed text of a paper: title followed by abstract.
std::string index_text(const PaperRecord& paper);

inline InvertedIndex build_index(std::vector<PaperRecord> corpus, Bm25Params params = {}) {
    return InvertedIndex::build(std::move(corpus), params);
}

}  // namespace paperlink
