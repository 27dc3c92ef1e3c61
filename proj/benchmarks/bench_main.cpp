// Microbenchmarks for the hot stages: BM25 search, TextRank, TFIDF re-ranking.
// The distro libbenchmark_main.a carries LTO bytecode from another compiler
// release, so main comes from BENCHMARK_MAIN below.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "paperlink/index.hpp"
#include "paperlink/phrases.hpp"
#include "paperlink/query.hpp"
#include "paperlink/rerank.hpp"

using namespace paperlink;

namespace {

std::vector<std::string> words(std::size_t n) {
    static const char* syl[] = {"ka", "lo", "mi", "ru", "te", "no", "sa", "vu", "pe", "di"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::string w;
        for (std::size_t x = i + 100; x > 0; x /= 10) w += syl[x % 10];
        out.push_back(w + "x");
    }
    return out;
}

std::vector<PaperRecord> corpus(std::size_t n_docs, std::uint64_t seed) {
    const auto vocab = words(2000);
    std::mt19937_64 rng(seed);
    std::geometric_distribution<std::size_t> zipfish(0.01);
    std::vector<PaperRecord> out;
    for (std::size_t d = 0; d < n_docs; ++d) {
        std::string title, abstract;
        for (int i = 0; i < 8; ++i) title += vocab[zipfish(rng) % vocab.size()] + " ";
        for (int i = 0; i < 120; ++i) abstract += vocab[zipfish(rng) % vocab.size()] + (i % 12 == 11 ? ". " : " ");
        out.push_back({"p" + std::to_string(d), title, abstract, {}});
    }
    return out;
}

void BM_Bm25Search(benchmark::State& state) {
    const auto index = InvertedIndex::build(corpus(static_cast<std::size_t>(state.range(0)), 1));
    const auto vocab = words(2000);
    const std::vector<std::string> terms{vocab[3], vocab[40]};
    for (auto _ : state) benchmark::DoNotOptimize(search_terms(index, terms, 10));
}
BENCHMARK(BM_Bm25Search)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_TextRank(benchmark::State& state) {
    const auto doc = preprocess({"news", std::nullopt, corpus(1, 2)[0].abstract, false});
    for (auto _ : state) benchmark::DoNotOptimize(extract_textrank(doc));
}
BENCHMARK(BM_TextRank)->Unit(benchmark::kMicrosecond);

void BM_TfidfRerank(benchmark::State& state) {
    const auto cands = corpus(static_cast<std::size_t>(state.range(0)), 3);
    const auto news = preprocess({"news", std::nullopt, cands[0].abstract, false});
    for (auto _ : state) {
        const auto rc = RetrievalCorpus::build(news, cands);
        const auto nv = tfidf_vector(rc.news_terms(), rc);
        std::map<std::string, SparseVector> vecs;
        for (std::size_t i = 0; i < rc.candidates().size(); ++i) {
            vecs.emplace(rc.candidates()[i].paper_id, tfidf_vector(rc.candidate_terms(i), rc));
        }
        benchmark::DoNotOptimize(rerank(nv, vecs));
    }
}
BENCHMARK(BM_TfidfRerank)->Arg(300)->Arg(3000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
