#include "paperlink/index.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "paperlink/error.hpp"
#include "paperlink/textprep.hpp"

namespace paperlink {

namespace {

constexpr std::string_view kMagic = "paperlink-index";
constexpr int kFormatVersion = 1;

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::size_t line) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParseError("bad number '" + std::string(text) + "'", line);
    }
    return value;
}

template <class Int>
Int parse_int(std::string_view text, std::size_t line) {
    Int value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParseError("bad integer '" + std::string(text) + "'", line);
    }
    return value;
}

PaperRecord paper_from_json(const nlohmann::json& j) {
    PaperRecord paper;
    paper.paper_id = j.at("paper_id").get<std::string>();
    paper.title = j.at("title").get<std::string>();
    paper.abstract = j.value("abstract", std::string());
    if (j.contains("authors") && !j["authors"].is_null()) {
        paper.authors = j["authors"].get<std::vector<std::string>>();
    }
    return paper;
}

nlohmann::json paper_to_json(const PaperRecord& paper) {
    return {{"paper_id", paper.paper_id},
            {"title", paper.title},
            {"abstract", paper.abstract},
            {"authors", paper.authors}};
}

void validate_params(const Bm25Params& params) {
    if (!(params.k1 > 0.0) || !std::isfinite(params.k1)) throw InputError("BM25 k1 must be positive");
    if (!(params.b >= 0.0 && params.b <= 1.0)) throw InputError("BM25 b must lie in [0, 1]");
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::string next(std::string_view what) {
        std::string line;
        if (!std::getline(in_, line)) throw ParseError("unexpected end of index, expected " + std::string(what), line_ + 1);
        ++line_;
        return line;
    }
    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

std::vector<std::string_view> split_spaces(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        const auto start = i;
        while (i < s.size() && s[i] != ' ') ++i;
        if (i > start) parts.push_back(s.substr(start, i - start));
    }
    return parts;
}

}  // namespace

std::vector<PaperRecord> read_corpus(std::istream& in) {
    std::vector<PaperRecord> corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            if (!j.is_object()) throw ParseError("expected a JSON object", line_no);
            corpus.push_back(paper_from_json(j));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad paper record: ") + e.what(), line_no);
        }
    }
    return corpus;
}

void write_paper_json(std::ostream& out, const PaperRecord& paper) { out << paper_to_json(paper).dump(); }

std::string index_text(const PaperRecord& paper) { return paper.title + "\n" + paper.abstract; }

double bm25_idf(std::size_t n_docs, std::size_t df) {
    const double n = static_cast<double>(n_docs);
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double bm25_term_weight(double idf, std::uint32_t tf, std::size_t doc_len, double avgdl, const Bm25Params& params) {
    if (tf == 0) return 0.0;
    const double f = static_cast<double>(tf);
    const double norm = 1.0 - params.b + params.b * static_cast<double>(doc_len) / avgdl;
    return idf * (f * (params.k1 + 1.0)) / (f + params.k1 * norm);
}

InvertedIndex InvertedIndex::build(std::vector<PaperRecord> corpus, Bm25Params params) {
    if (corpus.empty()) throw InputError("cannot index an empty corpus");
    validate_params(params);

    InvertedIndex index;
    index.params_ = params;
    std::unordered_set<std::string> ids;
    for (const auto& paper : corpus) {
        if (!ids.insert(paper.paper_id).second) throw InputError("duplicate paper_id '" + paper.paper_id + "'");
        if (paper.title.empty()) throw InputError("paper '" + paper.paper_id + "' has an empty title");
    }
    index.papers_ = std::move(corpus);

    index.doc_len_.reserve(index.papers_.size());
    std::unordered_map<std::string, std::uint32_t> counts;
    for (std::size_t doc = 0; doc < index.papers_.size(); ++doc) {
        counts.clear();
        const auto terms = index_terms(index_text(index.papers_[doc]));
        for (const auto& term : terms) ++counts[term];
        index.doc_len_.push_back(terms.size());
        for (auto& [term, tf] : counts) {
            index.postings_[term].push_back({static_cast<std::uint32_t>(doc), tf});
        }
    }
    index.finish();
    return index;
}

void InvertedIndex::finish() {
    double total = 0.0;
    for (auto len : doc_len_) total += static_cast<double>(len);
    avgdl_ = total / static_cast<double>(doc_len_.size());
    // Every document has at least its title, but a title made only of
    // stopwords or symbols leaves nothing to index.
    if (avgdl_ == 0.0) avgdl_ = 1.0;
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const {
    const auto it = postings_.find(term);
    if (it == postings_.end()) return {};
    return it->second;
}

std::uint32_t InvertedIndex::tf(std::string_view term, std::size_t doc) const {
    const auto list = postings(term);
    const auto it = std::lower_bound(list.begin(), list.end(), doc,
                                     [](const Posting& p, std::size_t d) { return p.doc < d; });
    return it != list.end() && it->doc == doc ? it->tf : 0;
}

double InvertedIndex::bm25_score(std::span<const std::string> terms, std::size_t doc) const {
    if (doc >= n_docs()) throw InputError("document ordinal out of range");
    double score = 0.0;
    for (const auto& term : terms) {
        const auto list = postings(term);
        const auto f = tf(term, doc);
        if (f == 0) continue;
        score += bm25_term_weight(bm25_idf(n_docs(), list.size()), f, doc_len_[doc], avgdl_, params_);
    }
    return score;
}

void InvertedIndex::save(std::ostream& out) const {
    out << kMagic << ' ' << kFormatVersion << '\n';
    out << "params " << format_double(params_.k1) << ' ' << format_double(params_.b) << '\n';
    out << "documents " << papers_.size() << '\n';
    for (std::size_t doc = 0; doc < papers_.size(); ++doc) {
        out << "doc " << doc_len_[doc] << ' ';
        write_paper_json(out, papers_[doc]);
        out << '\n';
    }
    out << "terms " << postings_.size() << '\n';
    for (const auto& [term, list] : postings_) {
        out << "term " << term;
        for (const auto& p : list) out << ' ' << p.doc << ':' << p.tf;
        out << '\n';
    }
    out << "end\n";
}

InvertedIndex InvertedIndex::load(std::istream& in) {
    LineReader reader(in);
    InvertedIndex index;

    {
        const auto header = reader.next("header");
        const auto parts = split_spaces(header);
        if (parts.size() != 2 || parts[0] != kMagic) throw ParseError("not a paperlink index", reader.line());
        if (parse_int<int>(parts[1], reader.line()) != kFormatVersion) {
            throw ParseError("unsupported index version " + std::string(parts[1]), reader.line());
        }
    }
    {
        const auto line = reader.next("params");
        const auto parts = split_spaces(line);
        if (parts.size() != 3 || parts[0] != "params") throw ParseError("expected 'params k1 b'", reader.line());
        index.params_.k1 = parse_double(parts[1], reader.line());
        index.params_.b = parse_double(parts[2], reader.line());
        validate_params(index.params_);
    }
    std::size_t n_docs = 0;
    {
        const auto line = reader.next("documents");
        const auto parts = split_spaces(line);
        if (parts.size() != 2 || parts[0] != "documents") throw ParseError("expected 'documents N'", reader.line());
        n_docs = parse_int<std::size_t>(parts[1], reader.line());
        if (n_docs == 0) throw ParseError("index has no documents", reader.line());
    }
    for (std::size_t doc = 0; doc < n_docs; ++doc) {
        const auto line = reader.next("doc");
        const std::string_view view = line;
        if (view.substr(0, 4) != "doc ") throw ParseError("expected 'doc LEN JSON'", reader.line());
        const auto space = view.find(' ', 4);
        if (space == std::string_view::npos) throw ParseError("expected 'doc LEN JSON'", reader.line());
        index.doc_len_.push_back(parse_int<std::size_t>(view.substr(4, space - 4), reader.line()));
        try {
            index.papers_.push_back(paper_from_json(nlohmann::json::parse(view.substr(space + 1))));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad document record: ") + e.what(), reader.line());
        }
    }
    std::size_t n_terms = 0;
    {
        const auto line = reader.next("terms");
        const auto parts = split_spaces(line);
        if (parts.size() != 2 || parts[0] != "terms") throw ParseError("expected 'terms N'", reader.line());
        n_terms = parse_int<std::size_t>(parts[1], reader.line());
    }
    for (std::size_t t = 0; t < n_terms; ++t) {
        const auto line = reader.next("term");
        const auto parts = split_spaces(line);
        if (parts.size() < 3 || parts[0] != "term") throw ParseError("expected 'term TERM DOC:TF...'", reader.line());
        std::vector<Posting> list;
        list.reserve(parts.size() - 2);
        for (std::size_t k = 2; k < parts.size(); ++k) {
            const auto colon = parts[k].find(':');
            if (colon == std::string_view::npos) throw ParseError("expected DOC:TF", reader.line());
            Posting p;
            p.doc = parse_int<std::uint32_t>(parts[k].substr(0, colon), reader.line());
            p.tf = parse_int<std::uint32_t>(parts[k].substr(colon + 1), reader.line());
            if (p.doc >= n_docs || p.tf == 0) throw ParseError("posting out of range", reader.line());
            if (!list.empty() && list.back().doc >= p.doc) throw ParseError("postings must be sorted", reader.line());
            list.push_back(p);
        }
        if (!index.postings_.emplace(std::string(parts[1]), std::move(list)).second) {
            throw ParseError("duplicate term '" + std::string(parts[1]) + "'", reader.line());
        }
    }
    if (reader.next("end") != "end") throw ParseError("expected 'end'", reader.line());
    index.finish();
    return index;
}

}  // namespace paperlink
