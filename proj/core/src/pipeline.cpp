#include "paperlink/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "paperlink/error.hpp"
#include "paperlink/remote_search.hpp"

namespace paperlink {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string lower_extension(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

DenseVector mean_of(const std::vector<DenseVector>& vectors, std::size_t dim) {
    DenseVector out;
    out.values.assign(dim, 0.0);
    if (vectors.empty()) return out;
    for (const auto& v : vectors) {
        if (v.dim() != dim) throw RemoteError("embed", "inconsistent embedding dimensions");
        for (std::size_t d = 0; d < dim; ++d) out.values[d] += v.values[d];
    }
    for (auto& x : out.values) x /= static_cast<double>(vectors.size());
    return out;
}

}  // namespace

RawDocument load_news_file(const std::string& path, std::string source_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open news file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();

    RawDocument raw;
    const std::filesystem::path p(path);
    raw.source_id = source_id.empty() ? p.stem().string() : std::move(source_id);
    raw.uri = path;
    raw.body = buf.str();
    const auto ext = lower_extension(p);
    const auto first = raw.body.find_first_not_of(" \t\r\n");
    raw.is_markup = ext == ".html" || ext == ".htm" || (first != std::string::npos && raw.body[first] == '<');
    if (raw.body.empty()) throw InputError("news file '" + path + "' is empty");
    return raw;
}

Pipeline::Pipeline(RunConfig config, const InvertedIndex& index) : config_(std::move(config)), index_(&index) {
    if (config_.backend == RerankBackend::WordVec || config_.backend == RerankBackend::WordVecWeighted) {
        if (config_.wordvec_path.empty()) throw InputError("word-vector backend needs rerank.wordvec_path");
        wordvec_ = std::make_shared<const WordVectorTable>(WordVectorTable::load_file(config_.wordvec_path));
    }
    if (config_.extractor == Extractor::Remote && config_.extract_endpoint.empty()) {
        throw InputError("remote extractor needs endpoints.extract");
    }
    if (config_.backend == RerankBackend::Remote && config_.embed_endpoint.empty()) {
        throw InputError("remote backend needs endpoints.embed");
    }
    if (!config_.remote_search_url.empty()) {
        RemoteSearchOptions options;
        options.endpoint = {config_.remote_search_url, std::chrono::milliseconds(config_.endpoint_timeout_ms)};
        options.min_interval = std::chrono::milliseconds(config_.remote_search_interval_ms);
        remote_search_ = std::make_unique<RemotePaperSearch>(std::move(options));
    }
}

Pipeline::~Pipeline() = default;

std::vector<Phrase> extract_phrases(const CleanDocument& news, const RunConfig& config) {
    switch (config.extractor) {
        case Extractor::TextRank: return extract_textrank(news, config.textrank);
        case Extractor::NpChunk: {
            auto chunks = extract_np_chunks(news, config.max_chunk_tokens);
            for (auto& c : chunks) c.score *= static_cast<double>(c.spans.size());
            return dedup_phrases(std::move(chunks));
        }
        case Extractor::Remote: return extract_remote(news, config.extract_service());
    }
    return {};
}

std::vector<Phrase> Pipeline::extract(const CleanDocument& news) const { return extract_phrases(news, config_); }

CandidateSet Pipeline::retrieve(const std::vector<ConjunctiveQuery>& queries, const std::string& news_id) const {
    if (remote_search_) return remote_search_->retrieve(queries, config_.per_query_k, news_id);
    return retrieve_candidates(*index_, queries, config_.per_query_k, news_id);
}

RankedList Pipeline::rank(const CleanDocument& news, const CandidateSet& candidates) const {
    if (candidates.candidates.empty()) return RankedList{news.source_id, {}};
    const auto corpus = RetrievalCorpus::build(news, candidates.candidates);

    if (config_.backend != RerankBackend::Tfidf) return rank_dense(news, corpus);

    const auto news_vec = tfidf_vector(corpus.news_terms(), corpus);
    std::map<std::string, SparseVector> vectors;
    for (std::size_t i = 0; i < corpus.candidates().size(); ++i) {
        vectors.emplace(corpus.candidates()[i].paper_id, tfidf_vector(corpus.candidate_terms(i), corpus));
    }
    return rerank(news_vec, vectors, news.source_id);
}

RankedList Pipeline::rank_dense(const CleanDocument& news, const RetrievalCorpus& corpus) const {
    std::map<std::string, DenseVector> vectors;
    DenseVector news_vec;

    if (config_.backend == RerankBackend::Remote) {
        const auto endpoint = config_.embed_service();
        // Sentence embeddings averaged into one news vector.
        std::vector<std::string> sentences;
        for (const auto& sentence : news.sentences) {
            if (sentence.empty()) continue;
            const auto start = sentence.front().span.start;
            const auto end = sentence.back().span.end;
            sentences.push_back(news.text.substr(start, end - start));
        }
        std::vector<DenseVector> sentence_vecs;
        for (std::size_t i = 0; i < sentences.size(); i += config_.embed_batch) {
            const auto n = std::min(config_.embed_batch, sentences.size() - i);
            auto batch = remote_embed(std::span(sentences).subspan(i, n), endpoint, config_.embed_model);
            sentence_vecs.insert(sentence_vecs.end(), std::make_move_iterator(batch.begin()),
                                 std::make_move_iterator(batch.end()));
        }

        std::vector<std::string> texts;
        for (const auto& paper : corpus.candidates()) texts.push_back(paper.title + ". " + paper.abstract);
        std::size_t dim = sentence_vecs.empty() ? 0 : sentence_vecs.front().dim();
        for (std::size_t i = 0; i < texts.size(); i += config_.embed_batch) {
            const auto n = std::min(config_.embed_batch, texts.size() - i);
            auto batch = remote_embed(std::span(texts).subspan(i, n), endpoint, config_.embed_model);
            for (std::size_t k = 0; k < batch.size(); ++k) {
                if (dim == 0) dim = batch[k].dim();
                if (batch[k].dim() != dim) throw RemoteError(endpoint.url, "inconsistent embedding dimensions");
                vectors.emplace(corpus.candidates()[i + k].paper_id, std::move(batch[k]));
            }
        }
        news_vec = mean_of(sentence_vecs, dim);
        return rerank(news_vec, vectors, news.source_id);
    }

    const bool weighted = config_.backend == RerankBackend::WordVecWeighted;
    auto vectorize = [&](const std::vector<std::string>& terms) {
        if (!weighted) return avg_wordvec(terms, *wordvec_);
        std::unordered_map<std::string, double> weights;
        for (const auto& [idx, w] : tfidf_vector(terms, corpus).entries) weights.emplace(corpus.vocabulary()[idx], w);
        return avg_wordvec(terms, *wordvec_, &weights);
    };
    news_vec = vectorize(corpus.news_terms());
    for (std::size_t i = 0; i < corpus.candidates().size(); ++i) {
        vectors.emplace(corpus.candidates()[i].paper_id, vectorize(corpus.candidate_terms(i)));
    }
    return rerank(news_vec, vectors, news.source_id);
}

PipelineResult Pipeline::run(const RawDocument& raw) const {
    const auto start = Clock::now();
    PipelineResult result;

    auto t = Clock::now();
    PreprocessOptions options;
    options.clean = config_.clean;
    result.news = preprocess(raw, options);
    result.timings.preprocess = seconds_since(t);

    t = Clock::now();
    result.phrases = extract(result.news);
    result.timings.extract = seconds_since(t);

    t = Clock::now();
    result.queries = generate_queries(result.phrases, config_.caps);
    result.candidates = retrieve(result.queries, result.news.source_id);
    result.timings.retrieve = seconds_since(t);

    t = Clock::now();
    result.ranking = rank(result.news, result.candidates);
    result.timings.rerank = seconds_since(t);

    result.timings.total = seconds_since(start);
    return result;
}

}  // namespace paperlink
