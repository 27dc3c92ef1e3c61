#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "paperlink/error.hpp"
#include "paperlink/rerank.hpp"
#include "stub_server.hpp"

using namespace paperlink;

namespace {

CleanDocument news(const std::string& text) { return preprocess({"news", std::nullopt, text, false}); }

PaperRecord paper(std::string id, std::string title, std::string abstract = "") {
    return {std::move(id), std::move(title), std::move(abstract), {}};
}

DenseVector dense(std::vector<double> v) { return DenseVector{std::move(v)}; }

std::map<std::string, double> as_map(const SparseVector& v, const RetrievalCorpus& corpus) {
    std::map<std::string, double> out;
    for (const auto& [i, w] : v.entries) out[corpus.vocabulary()[i]] = w;
    return out;
}

}  // namespace

TEST(RetrievalCorpus, DirectCount) {
    const auto corpus = RetrievalCorpus::build(news("a b"), {paper("p", "b c")}, CorpusOptions{false});
    EXPECT_EQ(corpus.vocabulary(), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(corpus.df("a"), 1u);
    EXPECT_EQ(corpus.df("b"), 2u);
    EXPECT_EQ(corpus.df("c"), 1u);
    EXPECT_EQ(corpus.n_docs(), 2u);
}

TEST(RetrievalCorpus, EmptyAbstractUsesTitle) {
    const auto corpus = RetrievalCorpus::build(news("halo"), {paper("p", "Neutron star", "")});
    EXPECT_EQ(corpus.candidate_terms(0), (std::vector<std::string>{"neutron", "star"}));
}

TEST(RetrievalCorpus, NoCandidatesIsError) { EXPECT_THROW(RetrievalCorpus::build(news("halo"), {}), InputError); }

TEST(RetrievalCorpus, DfMatchesCountingOracle) {
    fixtures::Rng rng(20);
    const auto vocab = fixtures::noun_vocabulary(30, 20);
    const auto cands = fixtures::random_corpus(rng, vocab, 19);
    const auto corpus = RetrievalCorpus::build(news(vocab[0] + " " + vocab[1] + " the " + vocab[0]), cands);
    std::map<std::string, std::size_t> df;
    std::vector<std::vector<std::string>> docs{index_terms(vocab[0] + " " + vocab[1] + " the " + vocab[0])};
    for (const auto& c : cands) docs.push_back(index_terms(c.title + " " + c.abstract));
    for (auto doc : docs) {
        std::sort(doc.begin(), doc.end());
        doc.erase(std::unique(doc.begin(), doc.end()), doc.end());
        for (const auto& t : doc) ++df[t];
    }
    ASSERT_EQ(corpus.vocabulary_size(), df.size());
    for (const auto& [t, n] : df) EXPECT_EQ(corpus.df(t), n) << t;
    EXPECT_EQ(corpus.n_docs(), 20u);
}

TEST(Tfidf, SingleTermIsUnit) {
    const auto corpus = RetrievalCorpus::build(news("halo"), {paper("p", "halo gas")});
    const auto v = tfidf_vector(std::vector<std::string>{"halo"}, corpus);
    ASSERT_EQ(v.entries.size(), 1u);
    EXPECT_DOUBLE_EQ(v.entries[0].second, 1.0);
    EXPECT_EQ(v.dim, corpus.vocabulary_size());
}

TEST(Tfidf, TermInEveryDocHasIdfOne) {
    std::vector<PaperRecord> cands;
    for (int i = 0; i < 8; ++i) cands.push_back(paper("p" + std::to_string(i), "halo"));
    const auto corpus = RetrievalCorpus::build(news("halo"), cands);
    ASSERT_EQ(corpus.n_docs(), 9u);
    EXPECT_DOUBLE_EQ(corpus.idf(*corpus.term_index("halo")), 1.0);
}

TEST(Tfidf, OutOfVocabularyIsZeroVector) {
    const auto corpus = RetrievalCorpus::build(news("halo"), {paper("p", "gas")});
    EXPECT_TRUE(tfidf_vector(std::vector<std::string>{"quasar"}, corpus).zero());
}

TEST(Tfidf, ToyCorpusMatchesFormula) {
    const auto n = news("Neutron stars merge. The merger makes gold and neutron rich matter.");
    const std::vector<PaperRecord> cands{paper("p0", "Neutron star mergers", "Gold from neutron star mergers."),
                                         paper("p1", "Dark matter", "Matter we cannot see."),
                                         paper("p2", "Gold", "Heavy elements and gold."),
                                         paper("p3", "Stars", "")};
    const auto corpus = RetrievalCorpus::build(n, cands);
    std::vector<std::vector<std::string>> docs{corpus.news_terms()};
    for (std::size_t i = 0; i < cands.size(); ++i) docs.push_back(corpus.candidate_terms(i));
    for (const auto& d : docs) {
        const auto got = as_map(tfidf_vector(d, corpus), corpus);
        const auto want = oracle::tfidf(d, docs);
        ASSERT_EQ(got.size(), want.size());
        for (const auto& [t, w] : want) EXPECT_NEAR(got.at(t), w, 1e-9) << t;
    }
}

TEST(Tfidf, IdfDependsOnRetrievalCorpus) {
    const auto n = news("halo gas");
    const std::vector<PaperRecord> base{paper("p0", "halo"), paper("p1", "gas dust")};
    auto extended = base;
    extended.push_back(paper("p2", "halo core"));
    const auto a = RetrievalCorpus::build(n, base);
    const auto b = RetrievalCorpus::build(n, extended);
    EXPECT_NE(a.df("halo"), b.df("halo"));
    const auto va = as_map(tfidf_vector(a.news_terms(), a), a);
    const auto vb = as_map(tfidf_vector(b.news_terms(), b), b);
    EXPECT_NE(va.at("halo"), vb.at("halo"));
}

TEST(WordVec, Unweighted) {
    const auto table = WordVectorTable::from_rows(2, {{"a", {1, 0}}, {"b", {0, 1}}});
    EXPECT_EQ(avg_wordvec(std::vector<std::string>{"a"}, table).values, (std::vector<double>{1, 0}));
    EXPECT_EQ(avg_wordvec(std::vector<std::string>{"a", "b"}, table).values, (std::vector<double>{0.5, 0.5}));
}

TEST(WordVec, Weighted) {
    const auto table = WordVectorTable::from_rows(2, {{"a", {1, 0}}, {"b", {0, 1}}});
    const std::unordered_map<std::string, double> w{{"a", 2.0}, {"b", 1.0}};
    const auto v = avg_wordvec(std::vector<std::string>{"a", "b"}, table, &w);
    EXPECT_NEAR(v.values[0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(v.values[1], 1.0 / 3.0, 1e-15);
}

TEST(WordVec, NothingInVocabularyIsZero) {
    const auto table = WordVectorTable::from_rows(2, {{"a", {1, 0}}});
    const auto v = avg_wordvec(std::vector<std::string>{"zzz"}, table);
    EXPECT_TRUE(v.zero());
    EXPECT_EQ(v.dim(), 2u);
}

TEST(WordVec, LoadsTextFormat) {
    std::istringstream with_header("3 2\nHalo 1 0\ngas 0 1\nhalo 9 9\n");
    const auto table = WordVectorTable::load(with_header);
    EXPECT_EQ(table.dim(), 2u);
    EXPECT_EQ(table.size(), 2u);
    const auto halo = table.find("halo");
    ASSERT_TRUE(halo);
    EXPECT_EQ((*halo)[0], 1.0);  // first occurrence wins

    std::istringstream bare("gas 0.5 0.25 1\n");
    EXPECT_EQ(WordVectorTable::load(bare).dim(), 3u);
}

TEST(WordVec, RaggedFileIsParseError) {
    std::istringstream ragged("a 1 0\nb 1\n");
    try {
        WordVectorTable::load(ragged);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream bad_number("a 1 x\n");
    EXPECT_THROW(WordVectorTable::load(bad_number), ParseError);
}

TEST(Cosine, Examples) {
    EXPECT_NEAR(cosine(dense({1, 2, 3}), dense({1, 2, 3})), 1.0, 1e-15);
    EXPECT_EQ(cosine(dense({1, 0}), dense({0, 1})), 0.0);
    // 32 / sqrt(14 * 77)
    EXPECT_NEAR(cosine(dense({1, 2, 3}), dense({4, 5, 6})), 0.9746318461970762, 1e-12);
    EXPECT_EQ(cosine(dense({0, 0}), dense({1, 1})), 0.0);
}

TEST(Cosine, DimensionMismatch) {
    EXPECT_THROW(cosine(dense({1, 0}), dense({1, 0, 0})), InputError);
    EXPECT_THROW(cosine(SparseVector{{}, 3}, SparseVector{{}, 4}), InputError);
}

TEST(Cosine, SparseMatchesDense) {
    const SparseVector a{{{0, 1.0}, {2, 2.0}}, 4}, b{{{1, 5.0}, {2, 1.0}, {3, 1.0}}, 4};
    EXPECT_NEAR(cosine(a, b), cosine(dense({1, 0, 2, 0}), dense({0, 5, 1, 1})), 1e-15);
}

TEST(Rerank, IdenticalFirst) {
    const std::map<std::string, DenseVector> cands{{"a", dense({0, 1})}, {"b", dense({1, 1})}};
    const auto list = rerank(dense({1, 1}), cands, "n");
    EXPECT_EQ(list.news_id, "n");
    EXPECT_EQ(list.items[0].paper_id, "b");
    EXPECT_NEAR(list.items[0].similarity, 1.0, 1e-15);
}

TEST(Rerank, ParallelBeforeOrthogonal) {
    const std::map<std::string, DenseVector> cands{{"orth", dense({0, 1})}, {"par", dense({2, 0})}};
    const auto list = rerank(dense({1, 0}), cands);
    EXPECT_EQ(list.items[0].paper_id, "par");
    EXPECT_EQ(list.items[1].paper_id, "orth");
}

TEST(Rerank, EmptyAndZeroVectors) {
    EXPECT_TRUE(rerank(dense({1}), std::map<std::string, DenseVector>{}).items.empty());
    const std::map<std::string, DenseVector> cands{{"z", dense({0, 0})}, {"a", dense({-1, 0})}, {"b", dense({1, 0})}};
    const auto list = rerank(dense({1, 0}), cands);
    EXPECT_EQ(list.items[1].paper_id, "z");  // zero vectors sit at cosine 0
}

TEST(Rerank, MatchesSortOracle) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int round = 0; round < 50; ++round) {
        std::vector<double> n(5);
        for (auto& x : n) x = u(rng);
        std::map<std::string, DenseVector> cands;
        std::vector<std::pair<double, std::string>> want;
        for (int i = 0; i < 10; ++i) {
            std::vector<double> v(5);
            for (auto& x : v) x = u(rng);
            const auto id = "p" + std::to_string(i);
            want.emplace_back(oracle::cosine(n, v), id);
            cands.emplace(id, dense(v));
        }
        std::sort(want.begin(), want.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        const auto got = rerank(dense(n), cands);
        for (std::size_t i = 0; i < want.size(); ++i) {
            ASSERT_EQ(got.items[i].paper_id, want[i].second);
            ASSERT_NEAR(got.items[i].similarity, want[i].first, 1e-12);
        }
    }
}

TEST(Rerank, TiesByPaperId) {
    const std::map<std::string, DenseVector> cands{{"b", dense({1, 0})}, {"a", dense({2, 0})}, {"c", dense({0, 1})}};
    const auto list = rerank(dense({1, 0}), cands);
    EXPECT_EQ(list.items[0].paper_id, "a");
    EXPECT_EQ(list.items[1].paper_id, "b");
}

class RemoteEmbed : public ::testing::Test {
protected:
    void serve(std::function<nlohmann::json(const nlohmann::json&)> reply) {
        server_.post("/embed", [reply](const httplib::Request& req, httplib::Response& res) {
            const auto body = nlohmann::json::parse(req.body);
            if (body.value("model", "") != "specter") {
                res.status = 422;
                return;
            }
            res.set_content(reply(body).dump(), "application/json");
        });
        server_.start();
    }
    ServiceEndpoint endpoint() const { return {server_.url(), std::chrono::milliseconds(5000)}; }

    fixtures::StubServer server_;
};

TEST_F(RemoteEmbed, ZeroVectors) {
    serve([](const nlohmann::json& req) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < req["texts"].size(); ++i) rows.push_back({0.0, 0.0, 0.0});
        return nlohmann::json{{"dim", 3}, {"vectors", rows}};
    });
    const auto vecs = remote_embed(std::vector<std::string>{"one", "two"}, endpoint(), "specter");
    ASSERT_EQ(vecs.size(), 2u);
    EXPECT_EQ(vecs[1].dim(), 3u);
    EXPECT_TRUE(vecs[0].zero());
}

TEST_F(RemoteEmbed, EmptyInputSendsNothing) {
    serve([](const nlohmann::json&) { return nlohmann::json{}; });
    EXPECT_TRUE(remote_embed({}, endpoint(), "specter").empty());
    EXPECT_EQ(server_.requests(), 0);
}

TEST_F(RemoteEmbed, RaggedIsTypedError) {
    serve([](const nlohmann::json&) { return nlohmann::json{{"dim", 2}, {"vectors", {{1.0, 2.0}, {1.0}}}}; });
    EXPECT_THROW(remote_embed(std::vector<std::string>{"a", "b"}, endpoint(), "specter"), RemoteError);
}

TEST_F(RemoteEmbed, UnknownModelIsTypedError) {
    serve([](const nlohmann::json&) { return nlohmann::json{}; });
    try {
        remote_embed(std::vector<std::string>{"a"}, endpoint(), "nope");
        FAIL();
    } catch (const RemoteError& e) {
        EXPECT_NE(e.cause().find("422"), std::string::npos) << e.cause();
    }
}

TEST(EmbedParse, CountMismatch) {
    EXPECT_THROW(parse_embed_response(R"({"dim":1,"vectors":[[1.0]]})", 2), ParseError);
    EXPECT_THROW(parse_embed_response(R"({"dim":0,"vectors":[]})", 0), ParseError);
    EXPECT_EQ(parse_embed_response(R"({"dim":2,"vectors":[[1,2]]})", 1)[0].values, (std::vector<double>{1, 2}));
}
