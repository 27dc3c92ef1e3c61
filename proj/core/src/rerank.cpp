#include "paperlink/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "paperlink/error.hpp"

namespace paperlink {

namespace {

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

template <class Vector>
RankedList rank_by_cosine(const Vector& news, const std::map<std::string, Vector>& candidates, std::string news_id) {
    RankedList list;
    list.news_id = std::move(news_id);
    list.items.reserve(candidates.size());
    for (const auto& [id, vec] : candidates) list.items.push_back({id, cosine(news, vec)});
    // std::map iteration is already ascending by paper_id, so a stable sort
    // keeps that as the tie-break.
    std::stable_sort(list.items.begin(), list.items.end(),
                     [](const RankedItem& a, const RankedItem& b) { return a.similarity > b.similarity; });
    return list;
}

}  // namespace

bool DenseVector::zero() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

RetrievalCorpus RetrievalCorpus::build(const CleanDocument& news, std::vector<PaperRecord> candidates,
                                       CorpusOptions options) {
    if (candidates.empty()) throw InputError("a retrieval corpus needs at least one candidate");
    RetrievalCorpus corpus;
    corpus.news_id_ = news.source_id;
    corpus.news_terms_ = index_terms(news, options.drop_stopwords);
    corpus.candidates_ = std::move(candidates);
    corpus.candidate_terms_.reserve(corpus.candidates_.size());
    for (const auto& paper : corpus.candidates_) {
        corpus.candidate_terms_.push_back(index_terms(index_text(paper), options.drop_stopwords));
    }

    std::unordered_map<std::string_view, std::size_t> df;
    std::unordered_set<std::string_view> distinct;
    auto count = [&](const std::vector<std::string>& terms) {
        distinct.clear();
        distinct.insert(terms.begin(), terms.end());
        for (auto t : distinct) ++df[t];
    };
    count(corpus.news_terms_);
    for (const auto& terms : corpus.candidate_terms_) count(terms);

    corpus.vocabulary_.reserve(df.size());
    for (const auto& [term, n] : df) corpus.vocabulary_.emplace_back(term);
    std::sort(corpus.vocabulary_.begin(), corpus.vocabulary_.end());
    corpus.df_.resize(corpus.vocabulary_.size());
    corpus.index_.reserve(corpus.vocabulary_.size());
    for (std::size_t i = 0; i < corpus.vocabulary_.size(); ++i) {
        corpus.df_[i] = df.at(corpus.vocabulary_[i]);
        corpus.index_.emplace(corpus.vocabulary_[i], static_cast<std::uint32_t>(i));
    }
    return corpus;
}

std::optional<std::uint32_t> RetrievalCorpus::term_index(std::string_view term) const {
    const auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t RetrievalCorpus::df(std::string_view term) const {
    const auto idx = term_index(term);
    return idx ? df_[*idx] : 0;
}

double RetrievalCorpus::idf(std::uint32_t term) const {
    const double n = static_cast<double>(n_docs());
    return std::log((n + 1.0) / (static_cast<double>(df_.at(term)) + 1.0)) + 1.0;
}

SparseVector tfidf_vector(std::span<const std::string> doc_terms, const RetrievalCorpus& corpus) {
    std::vector<std::uint32_t> ids;
    ids.reserve(doc_terms.size());
    for (const auto& term : doc_terms) {
        if (auto idx = corpus.term_index(term)) ids.push_back(*idx);
    }
    std::sort(ids.begin(), ids.end());

    SparseVector vec;
    vec.dim = corpus.vocabulary_size();
    double norm2 = 0.0;
    for (std::size_t i = 0; i < ids.size();) {
        std::size_t j = i;
        while (j < ids.size() && ids[j] == ids[i]) ++j;
        const double w = static_cast<double>(j - i) * corpus.idf(ids[i]);
        vec.entries.emplace_back(ids[i], w);
        norm2 += w * w;
        i = j;
    }
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& [idx, w] : vec.entries) w *= inv;
    }
    return vec;
}

DenseVector avg_wordvec(std::span<const std::string> doc_terms, const WordVectorTable& table,
                        const std::unordered_map<std::string, double>* weights) {
    DenseVector out;
    out.values.assign(table.dim(), 0.0);
    double total = 0.0;
    if (weights == nullptr) {
        for (const auto& term : doc_terms) {
            const auto v = table.find(term);
            if (!v) continue;
            for (std::size_t d = 0; d < out.values.size(); ++d) out.values[d] += (*v)[d];
            total += 1.0;
        }
    } else {
        std::vector<std::string_view> distinct(doc_terms.begin(), doc_terms.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (auto term : distinct) {
            const auto w = weights->find(std::string(term));
            if (w == weights->end() || !(w->second > 0.0)) continue;
            const auto v = table.find(term);
            if (!v) continue;
            for (std::size_t d = 0; d < out.values.size(); ++d) out.values[d] += w->second * (*v)[d];
            total += w->second;
        }
    }
    if (total > 0.0) {
        for (auto& x : out.values) x /= total;
    }
    return out;
}

std::vector<DenseVector> parse_embed_response(const std::string& body, std::size_t expected) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("embed response is not JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_integer() || !j.contains("vectors") ||
        !j["vectors"].is_array()) {
        throw ParseError("embed response needs integer 'dim' and array 'vectors'");
    }
    const auto dim = j["dim"].get<long long>();
    if (dim <= 0) throw ParseError("embed response dim must be positive");
    const auto& rows = j["vectors"];
    if (rows.size() != expected) {
        throw ParseError("embed response has " + std::to_string(rows.size()) + " vectors for " +
                         std::to_string(expected) + " texts");
    }
    std::vector<DenseVector> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(dim)) {
            throw ParseError("embed vector length differs from dim " + std::to_string(dim));
        }
        DenseVector vec;
        vec.values.reserve(row.size());
        for (const auto& x : row) {
            if (!x.is_number()) throw ParseError("embed vector holds a non-number");
            const double v = x.get<double>();
            if (!std::isfinite(v)) throw ParseError("embed vector holds a non-finite value");
            vec.values.push_back(v);
        }
        out.push_back(std::move(vec));
    }
    return out;
}

std::vector<DenseVector> remote_embed(std::span<const std::string> texts, const ServiceEndpoint& endpoint,
                                      std::string_view model_name) {
    if (texts.empty()) return {};
    const nlohmann::json request = {{"texts", std::vector<std::string>(texts.begin(), texts.end())},
                                    {"model", std::string(model_name)}};
    const auto body = http_post_json(endpoint, "/embed", request.dump());
    try {
        return parse_embed_response(body, texts.size());
    } catch (const ParseError& e) {
        throw RemoteError(endpoint.url, std::string("malformed /embed response: ") + e.what());
    }
}

double cosine(const SparseVector& a, const SparseVector& b) {
    if (a.dim != b.dim) throw InputError("cosine of sparse vectors from different corpora");
    double dot = 0.0;
    auto ia = a.entries.begin();
    auto ib = b.entries.begin();
    while (ia != a.entries.end() && ib != b.entries.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            dot += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    double na = 0.0;
    double nb = 0.0;
    for (const auto& e : a.entries) na += e.second * e.second;
    for (const auto& e : b.entries) nb += e.second * e.second;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return clamp_unit(dot / (std::sqrt(na) * std::sqrt(nb)));
}

double cosine(const DenseVector& a, const DenseVector& b) {
    if (a.dim() != b.dim()) throw InputError("cosine of vectors with different dimensions");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return clamp_unit(dot / (std::sqrt(na) * std::sqrt(nb)));
}

RankedList rerank(const SparseVector& news, const std::map<std::string, SparseVector>& candidates,
                  std::string news_id) {
    return rank_by_cosine(news, candidates, std::move(news_id));
}

RankedList rerank(const DenseVector& news, const std::map<std::string, DenseVector>& candidates,
                  std::string news_id) {
    return rank_by_cosine(news, candidates, std::move(news_id));
}

}  // namespace paperlink
