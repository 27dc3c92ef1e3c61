#include "criteria.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "paperlink/eval.hpp"
#include "paperlink/pipeline.hpp"
#include "paperlink/query.hpp"
#include "paperlink/rerank.hpp"

namespace criteria {

namespace {

using namespace paperlink;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

Phrase phrase_of(const std::vector<std::string>& words) {
    Phrase p;
    p.tokens = words;
    p.text = fixtures::join(words);
    p.score = 1.0;
    return p;
}

CleanDocument clean_doc(const std::string& id, const std::string& text) {
    return preprocess(RawDocument{id, std::nullopt, text, false});
}

}  // namespace

const std::vector<std::string>& toy_documents() {
    static const std::vector<std::string> docs = {
        "Compatibility of systems of linear constraints over the set of natural numbers. Criteria of compatibility "
        "of a system of linear Diophantine equations, strict inequations, and nonstrict inequations are considered. "
        "Upper bounds for components of a minimal set of solutions and algorithms of construction of minimal "
        "generating sets of solutions for all types of systems are given.",
        "Dark matter halos surround most galaxies. The halo mass sets the rotation speed of the galaxy disk. "
        "Simulations of dark matter predict dense cores in small halos. Observed dwarf galaxies show shallow cores "
        "instead.",
        "Graphene conducts heat better than copper. A thin graphene sheet was placed on a silicon wafer. The thermal "
        "conductivity of the sheet dropped near the wafer edge.",
        "Neutron stars are the dense remnants of massive stars. When two neutron stars merge, they emit gravitational "
        "waves. The merger also produces heavy elements such as gold.",
        "A new battery chemistry uses sodium instead of lithium. Sodium is cheap and abundant. The battery kept most "
        "of its capacity after many charge cycles.",
        "Deep convolutional neural network models classify medical images. The network was trained on chest scans. "
        "Its accuracy matched expert radiologists on the test set.",
        "Coral reefs lose color when ocean water warms. Reef bleaching kills the symbiotic algae. Marine biologists "
        "tracked coral recovery for ten years.",
        "Quantum error correction protects fragile qubits. A logical qubit spreads information over many physical "
        "qubits. The error rate fell as the code distance grew.",
        "Gut bacteria influence the immune system. Mice without gut bacteria had weaker immune responses. A single "
        "bacterial species restored the immune response.",
        "Ancient DNA from cave sediments reveals early human migration. The sediment samples held genetic material "
        "from extinct species. Cave layers gave a precise timeline.",
    };
    return docs;
}

Result bm25_oracle(std::uint64_t seed, std::size_t corpora) {
    const auto start = Clock::now();
    fixtures::Rng rng(seed);
    const auto vocab = fixtures::noun_vocabulary(80, seed + 1000);
    std::uniform_int_distribution<std::size_t> n_docs(1, 100), n_queries(1, 10), arity(1, 3), plen(1, 2), kdist(1, 20);
    std::bernoulli_distribution stop(0.1);
    std::size_t compared = 0, hits = 0;
    double worst = 0.0;
    for (std::size_t c = 0; c < corpora; ++c) {
        const auto corpus = fixtures::random_corpus(rng, vocab, n_docs(rng));
        const auto index = InvertedIndex::build(corpus);
        const auto nq = n_queries(rng);
        for (std::size_t q = 0; q < nq; ++q) {
            ConjunctiveQuery query;
            std::vector<std::string> oracle_terms;
            for (auto a = arity(rng); a > 0; --a) {
                std::vector<std::string> words;
                for (auto l = plen(rng); l > 0; --l) {
                    if (stop(rng)) words.push_back("the");
                    words.push_back(vocab[std::uniform_int_distribution<std::size_t>(0, 29)(rng)]);
                }
                for (const auto& w : words)
                    if (!is_stopword(w)) oracle_terms.push_back(w);
                query.phrases.push_back(phrase_of(words));
            }
            const auto k = kdist(rng);
            const auto got = search(index, query, k);
            const auto want = oracle::bm25_linear_scan(corpus, oracle_terms, k);
            ++compared;
            if (got.size() != want.size()) {
                return {false, fmt("corpus %zu query %zu: %zu hits, oracle %zu", c, q, got.size(), want.size())};
            }
            for (std::size_t i = 0; i < got.size(); ++i) {
                if (got[i].doc != want[i].doc) {
                    return {false, fmt("corpus %zu query %zu rank %zu: doc %zu, oracle %zu", c, q, i + 1, got[i].doc,
                                       want[i].doc)};
                }
                worst = std::max(worst, std::abs(got[i].score - want[i].score));
            }
            hits += got.size();
        }
    }
    const double secs = seconds_since(start);
    const bool pass = worst <= 1e-9 && secs < 5.0;
    return {pass, fmt("%zu corpora, %zu queries, %zu hits, max |dscore| %.2e, %.3fs", corpora, compared, hits, worst,
                      secs)};
}

Result textrank_oracle() {
    const TextRankParams params;
    double worst = 0.0, worst_fixed = 0.0;
    std::size_t max_words = 0;
    for (std::size_t i = 0; i < toy_documents().size(); ++i) {
        const auto doc = clean_doc("toy" + std::to_string(i), toy_documents()[i]);
        const auto graph = build_cooccurrence_graph(doc, params.window);
        const auto dense = oracle::cooccurrence_matrix(doc, params.window);
        if (graph.nodes != dense.words) return {false, fmt("doc %zu: node lists differ", i)};
        if (graph.size() > 60) return {false, fmt("doc %zu has %zu filtered words", i, graph.size())};
        max_words = std::max(max_words, graph.size());

        const auto got = textrank_scores(graph, params);
        const auto want = oracle::pagerank_dense(dense, params.damping, params.tol, params.max_iter);
        const auto fixed = oracle::pagerank_dense(dense, params.damping, 1e-14, 100000);
        for (std::size_t v = 0; v < got.size(); ++v) {
            worst = std::max(worst, std::abs(got[v] - want[v]));
            worst_fixed = std::max(worst_fixed, std::abs(got[v] - fixed[v]));
        }

        std::set<std::string> kept;
        for (auto idx : select_keywords(got, params.keep_ratio)) kept.insert(graph.nodes[idx]);
        if (kept != oracle::top_words(dense, want, params.keep_ratio)) {
            return {false, fmt("doc %zu: keyword sets differ", i)};
        }
    }
    const bool pass = worst < 1e-6;
    return {pass, fmt("10 docs (<= %zu words), max |dscore| %.2e (fixed point %.2e), keyword sets equal", max_words,
                      worst, worst_fixed)};
}

Result metric_kernels() {
    auto list = [](std::string id, std::vector<std::string> ids) {
        RankedList l{std::move(id), {}};
        for (auto& p : ids) l.items.push_back({std::move(p), 0.0});
        return l;
    };
    std::map<std::string, RankedList> lists{{"n1", list("n1", {"x", "g1", "y"})},
                                            {"n2", list("n2", {"x", "y", "z", "g2"})}};
    const std::vector<GoldPair> gold{{"n1", "", {"g1"}}, {"n2", "", {"g2"}}};
    const double m = mrr(lists, gold);
    const double nd = ndcg_binary(lists["n1"], gold[0]);
    const double want_nd = 1.0 / std::log2(3.0);
    const double p5 = precision_at_k(list("n", {"g", "a", "h", "b", "c"}), GoldPair{"n", "", {"g", "h"}}, 5);
    const double p10 = precision_at_k(list("n", {"a", "g", "b"}), GoldPair{"n", "", {"g"}}, 10);
    const auto ks = RunConfig{}.ks;
    const bool pass = m == 0.375 && std::abs(nd - want_nd) <= 1e-9 && p5 == 0.4 && p10 == 0.1 &&
                      ks == std::vector<std::size_t>{1, 5, 10, 20, 50};
    return {pass, fmt("MRR{2,4}=%.17g NDCG(rank 2)=%.12f P@5=%.2f P@10=%.2f Ks=%zu,%zu,%zu,%zu,%zu", m, nd, p5, p10,
                      ks.size() > 0 ? ks[0] : 0, ks.size() > 1 ? ks[1] : 0, ks.size() > 2 ? ks[2] : 0,
                      ks.size() > 3 ? ks[3] : 0, ks.size() > 4 ? ks[4] : 0)};
}

Result planted_pairs(std::size_t instances, std::size_t distractors) {
    const auto start = Clock::now();
    RunConfig config;
    config.backend = RerankBackend::Tfidf;
    std::size_t top1 = 0;
    double rr = 0.0;
    for (std::size_t i = 0; i < instances; ++i) {
        const auto inst = fixtures::make_planted_instance(1000 + i, distractors);
        const auto index = InvertedIndex::build(inst.corpus);
        const Pipeline pipeline(config, index);
        const auto result = pipeline.run(RawDocument{inst.news_id, std::nullopt, inst.news_text, false});
        const auto rank = best_gold_rank(result.ranking, {inst.gold_id});
        if (rank == 1u) ++top1;
        if (rank) rr += 1.0 / static_cast<double>(*rank);
    }
    const double secs = seconds_since(start);
    const double p1 = static_cast<double>(top1) / static_cast<double>(instances);
    const double m = rr / static_cast<double>(instances);
    const bool pass = p1 >= 0.9 && m >= 0.93 && secs < 60.0;
    return {pass, fmt("%zu instances x %zu distractors: P@1=%.3f MRR=%.3f, %.2fs", instances, distractors, p1, m, secs)};
}

Result rerank_latency(std::size_t pool) {
    const auto vocab = fixtures::noun_vocabulary(6000, 99);
    fixtures::Rng rng(5);
    auto corpus = fixtures::random_corpus(rng, vocab, pool, 250);
    std::vector<std::string> news_words;
    std::uniform_int_distribution<std::size_t> w(0, vocab.size() - 1);
    for (int i = 0; i < 900; ++i) news_words.push_back(vocab[w(rng)] + (i % 12 == 11 ? "." : ""));
    const auto news = clean_doc("latency", fixtures::join(news_words));

    CandidateSet candidates;
    candidates.news_id = news.source_id;
    candidates.candidates = std::move(corpus);
    RunConfig config;
    config.backend = RerankBackend::Tfidf;
    const auto index = InvertedIndex::build({{"unused", "unused", "", {}}});
    const Pipeline pipeline(config, index);

    double best = 1e9, worst = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
        const auto t = Clock::now();
        const auto ranked = pipeline.rank(news, candidates);
        const double secs = seconds_since(t);
        if (ranked.items.size() != pool) return {false, fmt("ranked %zu of %zu", ranked.items.size(), pool)};
        best = std::min(best, secs);
        worst = std::max(worst, secs);
    }
    return {worst <= 1.0, fmt("%zu candidates: t_prr worst %.3fs, best %.3fs over 3 runs", pool, worst, best)};
}

Result determinism() {
    const auto dir = fixtures::temp_dir("determinism");
    const auto bench = fixtures::write_planted_benchmark(dir, 8, 4242);
    const auto index = InvertedIndex::build(bench.corpus);
    BenchmarkOptions options;
    options.news_base_dir = dir;
    const RunConfig config;
    const auto a = report_json(run_benchmark(config, index, bench.gold, options), config);
    const auto b = report_json(run_benchmark(config, index, bench.gold, options), config);
    std::filesystem::remove_all(dir);
    return {a == b, fmt("two runs over 8 pairs: %zu and %zu report bytes, %s", a.size(), b.size(),
                        a == b ? "identical" : "different")};
}

Result prop_clean_idempotent(std::size_t cases, std::uint64_t seed) {
    static const std::vector<std::string> pieces = {
        "a",  "Z", "word", "\xc3\xa9", "\xc3\x9f", "\xce\xa9", "\xe4\xb8\xad", " ", "  ", "\t", "\n", "[", "]", "(",
        ")",  "@", "#",    "$",        "%",        "^",        "&",            "*", "~",  "0",  "7",  "\xd9\xa3",
        ".",  "!", "?",    "-",        "'",        ",",        "\xe2\x80\x94", "\xef\xbc\x91"};
    fixtures::Rng rng(seed);
    std::uniform_int_distribution<std::size_t> len(0, 40), pick(0, pieces.size() - 1);
    for (std::size_t c = 0; c < cases; ++c) {
        std::string s;
        for (auto n = len(rng); n > 0; --n) s += pieces[pick(rng)];
        const auto once = clean_text(s);
        if (clean_text(once) != once) return {false, fmt("case %zu: not idempotent on '%s'", c, s.c_str())};
        for (char ch : once) {
            if (std::isdigit(static_cast<unsigned char>(ch)) || std::string_view("[]@#$%^&*~").find(ch) != std::string_view::npos)
                return {false, fmt("case %zu: '%c' survived in '%s'", c, ch, once.c_str())};
        }
        if (once.find("  ") != std::string::npos || (!once.empty() && (once.front() == ' ' || once.back() == ' ')))
            return {false, fmt("case %zu: whitespace not collapsed in '%s'", c, once.c_str())};
    }
    return {true, fmt("%zu cases", cases)};
}

Result prop_tfidf_unit_norm(std::size_t cases, std::uint64_t seed) {
    const auto vocab = fixtures::noun_vocabulary(40, seed);
    fixtures::Rng rng(seed);
    std::uniform_int_distribution<std::size_t> n_cand(1, 6), n_words(0, 12), w(0, vocab.size() - 1);
    std::size_t zeros = 0;
    double worst = 0.0;
    for (std::size_t c = 0; c < cases; ++c) {
        std::vector<std::string> news_words;
        for (auto n = n_words(rng); n > 0; --n) news_words.push_back(vocab[w(rng)]);
        const auto news = clean_doc("n", news_words.empty() ? "the" : fixtures::join(news_words));
        std::vector<PaperRecord> cands;
        for (auto n = n_cand(rng); n > 0; --n) {
            std::vector<std::string> words;
            for (auto k = n_words(rng); k > 0; --k) words.push_back(vocab[w(rng)]);
            cands.push_back({"p" + std::to_string(cands.size()), "t", fixtures::join(words), {}});
        }
        const auto corpus = RetrievalCorpus::build(news, cands);
        std::vector<std::vector<std::string>> docs{corpus.news_terms()};
        for (std::size_t i = 0; i < cands.size(); ++i) docs.push_back(corpus.candidate_terms(i));
        for (const auto& terms : docs) {
            const auto v = tfidf_vector(terms, corpus);
            if (v.dim != corpus.vocabulary_size()) return {false, fmt("case %zu: dim %zu", c, v.dim)};
            if (v.zero()) {
                ++zeros;
                continue;
            }
            double norm = 0.0;
            for (std::size_t e = 0; e < v.entries.size(); ++e) {
                if (e > 0 && v.entries[e].first <= v.entries[e - 1].first)
                    return {false, fmt("case %zu: indices not increasing", c)};
                norm += v.entries[e].second * v.entries[e].second;
            }
            worst = std::max(worst, std::abs(std::sqrt(norm) - 1.0));
        }
    }
    return {worst <= 1e-12, fmt("%zu cases, max |norm - 1| %.2e, %zu zero vectors", cases, worst, zeros)};
}

Result prop_candidates_deduped(std::size_t cases, std::uint64_t seed) {
    static const std::vector<std::string> titles = {"Dark Matter Halos", "dark matter, halos!", "Neutron Stars",
                                                    "neutron stars", "Graphene Heat", "Coral Reefs"};
    static const std::vector<std::vector<std::string>> authors = {{"Ada Lovelace", "Alan Turing"},
                                                                  {"alan turing", "ada lovelace"},
                                                                  {"Grace Hopper"},
                                                                  {}};
    fixtures::Rng rng(seed);
    std::uniform_int_distribution<std::size_t> n_lists(0, 5), n_items(0, 6), t(0, titles.size() - 1),
        a(0, authors.size() - 1);
    for (std::size_t c = 0; c < cases; ++c) {
        std::vector<std::vector<PaperRecord>> lists(n_lists(rng));
        std::size_t total = 0;
        std::vector<std::string> first_seen;
        for (auto& list : lists) {
            for (auto n = n_items(rng); n > 0; --n) {
                PaperRecord p{"id" + std::to_string(total++), titles[t(rng)], "", authors[a(rng)]};
                const auto key = candidate_key(p);
                if (std::find(first_seen.begin(), first_seen.end(), key) == first_seen.end()) first_seen.push_back(key);
                list.push_back(std::move(p));
            }
        }
        const auto set = merge_candidates("n", lists);
        if (set.candidates.size() > total) return {false, fmt("case %zu: more candidates than hits", c)};
        std::vector<std::string> keys;
        for (const auto& p : set.candidates) keys.push_back(candidate_key(p));
        if (keys != first_seen) return {false, fmt("case %zu: keys not unique in first-seen order", c)};
        for (const auto& [id, queries] : set.provenance) {
            if (!std::is_sorted(queries.begin(), queries.end()) ||
                std::adjacent_find(queries.begin(), queries.end()) != queries.end())
                return {false, fmt("case %zu: provenance of %s not sorted/unique", c, id.c_str())};
        }
        if (set.provenance.size() != set.candidates.size()) return {false, fmt("case %zu: provenance size", c)};
    }
    return {true, fmt("%zu cases", cases)};
}

Result prop_cosine_bounds(std::size_t cases, std::uint64_t seed) {
    fixtures::Rng rng(seed);
    std::uniform_int_distribution<std::size_t> dim(1, 16);
    std::uniform_real_distribution<double> val(-10.0, 10.0), scale(1e-3, 1e3);
    std::bernoulli_distribution zero(0.05);
    double worst_bound = 0.0, worst_sym = 0.0, worst_scale = 0.0;
    for (std::size_t c = 0; c < cases; ++c) {
        const auto n = dim(rng);
        DenseVector a, b;
        for (std::size_t i = 0; i < n; ++i) {
            a.values.push_back(zero(rng) ? 0.0 : val(rng));
            b.values.push_back(zero(rng) ? 0.0 : val(rng));
        }
        const double alpha = scale(rng);
        DenseVector sa = a;
        for (auto& x : sa.values) x *= alpha;
        const double ab = cosine(a, b);
        worst_bound = std::max(worst_bound, std::abs(ab) - 1.0);
        worst_sym = std::max(worst_sym, std::abs(ab - cosine(b, a)));
        worst_scale = std::max(worst_scale, std::abs(ab - cosine(sa, b)));
        const double self = cosine(a, a);
        if (!a.zero() && std::abs(self - 1.0) > 1e-12) return {false, fmt("case %zu: cosine(v, v) = %.17g", c, self)};
        if (std::abs(ab - oracle::cosine(a.values, b.values)) > 1e-12) return {false, fmt("case %zu: oracle", c)};
    }
    const bool pass = worst_bound <= 1e-12 && worst_sym <= 1e-12 && worst_scale <= 1e-12;
    return {pass, fmt("%zu cases, max |cos|-1 %.2e, asym %.2e, scale drift %.2e", cases, worst_bound, worst_sym,
                      worst_scale)};
}

Result prop_rerank_scale_invariant(std::size_t cases, std::uint64_t seed) {
    fixtures::Rng rng(seed);
    std::uniform_int_distribution<std::size_t> dim(1, 8), n(0, 12);
    std::uniform_real_distribution<double> val(-1.0, 1.0), scale(1e-3, 1e3);
    std::bernoulli_distribution dup(0.2);
    for (std::size_t c = 0; c < cases; ++c) {
        const auto d = dim(rng);
        auto random_vec = [&] {
            DenseVector v;
            for (std::size_t i = 0; i < d; ++i) v.values.push_back(val(rng));
            return v;
        };
        const auto news = random_vec();
        std::map<std::string, DenseVector> cands, scaled;
        DenseVector last = random_vec();
        for (auto k = n(rng); k > 0; --k) {
            if (!dup(rng)) last = random_vec();
            cands.emplace("p" + std::to_string(cands.size()), last);
        }
        const double alpha = scale(rng);
        for (const auto& [id, v] : cands) {
            DenseVector s = v;
            for (auto& x : s.values) x *= alpha;
            scaled.emplace(id, std::move(s));
        }
        const auto base = rerank(news, cands);
        const auto other = rerank(news, scaled);
        if (base.items.size() != cands.size()) return {false, fmt("case %zu: lost candidates", c)};
        for (std::size_t i = 0; i < base.items.size(); ++i) {
            if (base.items[i].paper_id != other.items[i].paper_id)
                return {false, fmt("case %zu: order changed at rank %zu under scale %.3g", c, i + 1, alpha)};
            if (i > 0 && base.items[i].similarity > base.items[i - 1].similarity)
                return {false, fmt("case %zu: not sorted", c)};
            if (i > 0 && base.items[i].similarity == base.items[i - 1].similarity &&
                base.items[i].paper_id < base.items[i - 1].paper_id)
                return {false, fmt("case %zu: tie not broken by paper_id", c)};
        }
    }
    return {true, fmt("%zu cases", cases)};
}

}  // namespace criteria
