#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>

#include "paperlink/textprep.hpp"

namespace fixtures {

namespace {

std::string pick(Rng& rng, const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

// Function words and verbs that keep candidate words apart in news text.
const std::vector<std::string> kTemplates = {
    "Researchers reported that the {A} was linked to the {B} in {x}.",
    "The team found {A} near the {x} while they studied {B}.",
    "According to the study, {A} could explain the {x}.",
    "Scientists said that {A} and the {x} were measured twice.",
    "It was the first time that {A} had been seen.",
    "The new work shows how {A} changes when {x} is added.",
};

std::string fill(std::string tpl, const std::string& a, const std::string& b, const std::string& x) {
    auto put = [&](const std::string& key, const std::string& val) {
        for (auto pos = tpl.find(key); pos != std::string::npos; pos = tpl.find(key)) tpl.replace(pos, key.size(), val);
    };
    put("{A}", a);
    put("{B}", b);
    put("{x}", x);
    return tpl;
}

}  // namespace

std::vector<std::string> noun_vocabulary(std::size_t n, std::uint64_t seed) {
    static const std::string consonants = "bdfgklmnprstvz";
    static const std::string vowels = "aeiou";
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> c(0, consonants.size() - 1), v(0, vowels.size() - 1), syl(2, 3);
    std::set<std::string> seen;
    std::vector<std::string> out;
    while (out.size() < n) {
        std::string w;
        for (auto s = syl(rng); s > 0; --s) {
            w.push_back(consonants[c(rng)]);
            w.push_back(vowels[v(rng)]);
        }
        if (w.ends_with("ize") || w.ends_with("ise") || w.ends_with("ive")) continue;
        if (paperlink::lexicon_lookup(w) || paperlink::is_stopword(w)) continue;
        const auto tagged = paperlink::tokenize_and_tag("the " + w);
        if (tagged.size() != 2 || tagged[1].pos != paperlink::Pos::Noun) continue;
        if (seen.insert(w).second) out.push_back(w);
    }
    return out;
}

std::string join(const std::vector<std::string>& words, const std::string& sep) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out += sep;
        out += w;
    }
    return out;
}

std::vector<paperlink::PaperRecord> random_corpus(Rng& rng, const std::vector<std::string>& vocab,
                                                  std::size_t n_docs, std::size_t max_words) {
    // Squaring a uniform draw skews toward the front of the vocabulary.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto word = [&] { return vocab[static_cast<std::size_t>(u(rng) * u(rng) * static_cast<double>(vocab.size()))]; };
    std::uniform_int_distribution<std::size_t> len(1, max_words), tlen(1, 4);
    std::vector<paperlink::PaperRecord> corpus;
    for (std::size_t d = 0; d < n_docs; ++d) {
        std::vector<std::string> title, body;
        for (auto i = tlen(rng); i > 0; --i) title.push_back(word());
        for (auto i = len(rng); i > 0; --i) body.push_back(word());
        corpus.push_back({"doc" + std::to_string(d), join(title), join(body), {"Author " + std::to_string(d % 7)}});
    }
    return corpus;
}

PlantedInstance make_planted_instance(std::uint64_t seed, std::size_t n_distractors, std::size_t n_planted) {
    static const auto pool = noun_vocabulary(4000, 20240611);
    Rng rng(seed);
    auto words = pool;
    std::shuffle(words.begin(), words.end(), rng);

    PlantedInstance inst;
    inst.news_id = "news-" + std::to_string(seed);
    inst.gold_id = "gold-" + std::to_string(seed);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n_planted; ++i, next += 2) inst.planted.push_back(words[next] + " " + words[next + 1]);
    const std::vector<std::string> background(words.begin() + static_cast<std::ptrdiff_t>(next), words.end());

    // News: every planted phrase shows up in two or three sentences.
    std::vector<std::string> news_bg;
    for (int i = 0; i < 8; ++i) news_bg.push_back(pick(rng, background));
    std::vector<std::string> sentences;
    for (std::size_t round = 0; round < 3; ++round) {
        for (std::size_t i = 0; i < inst.planted.size(); ++i) {
            if (round == 2 && i % 2 == 1) continue;
            const auto& a = inst.planted[i];
            const auto& b = inst.planted[(i + 1 + round) % inst.planted.size()];
            sentences.push_back(fill(pick(rng, kTemplates), a, b, pick(rng, news_bg)));
        }
    }
    std::shuffle(sentences.begin(), sentences.end(), rng);
    inst.news_text = join(sentences);

    auto filler = [&](std::size_t n) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < n; ++i) out.push_back(pick(rng, background));
        return out;
    };
    std::uniform_int_distribution<std::size_t> abstract_len(20, 40);

    {
        auto body = filler(abstract_len(rng) / 2);
        for (const auto& p : inst.planted) body.push_back("the " + p + " was observed");
        body.push_back(news_bg[0]);
        std::shuffle(body.begin(), body.end(), rng);
        inst.corpus.push_back({inst.gold_id, inst.planted[0] + " and " + inst.planted[1] + " in " + pick(rng, background),
                               join(body) + ".", {"A. Author"}});
    }
    std::bernoulli_distribution share(0.4);
    std::uniform_int_distribution<std::size_t> which(0, inst.planted.size() - 1);
    for (std::size_t d = 0; d < n_distractors; ++d) {
        auto body = filler(abstract_len(rng));
        if (share(rng)) body.push_back("the " + inst.planted[which(rng)] + " was observed");
        std::shuffle(body.begin(), body.end(), rng);
        inst.corpus.push_back({inst.news_id + "-d" + std::to_string(d), join(filler(4)), join(body) + ".",
                               {"B. Author " + std::to_string(d)}});
    }
    // The gold paper should not sit at a predictable ordinal.
    std::shuffle(inst.corpus.begin(), inst.corpus.end(), rng);
    return inst;
}

PlantedBenchmark write_planted_benchmark(const std::filesystem::path& dir, std::size_t n_pairs, std::uint64_t seed,
                                         std::size_t n_distractors) {
    std::filesystem::create_directories(dir / "news");
    PlantedBenchmark bench;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        auto inst = make_planted_instance(seed + i, n_distractors);
        const auto rel = std::filesystem::path("news") / (inst.news_id + ".txt");
        std::ofstream(dir / rel) << inst.news_text << "\n";
        bench.gold.push_back({inst.news_id, rel.string(), {inst.gold_id}});
        for (auto& p : inst.corpus) bench.corpus.push_back(std::move(p));
    }
    return bench;
}

void write_corpus(const std::filesystem::path& path, const std::vector<paperlink::PaperRecord>& corpus) {
    std::ofstream out(path);
    for (const auto& p : corpus) {
        paperlink::write_paper_json(out, p);
        out << "\n";
    }
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_gold(const std::filesystem::path& path, const std::vector<paperlink::GoldPair>& gold) {
    std::ofstream out(path);
    for (const auto& g : gold) {
        nlohmann::json j;
        j["news_id"] = g.news_id;
        j["news_path"] = g.news_path;
        j["gold_paper_ids"] = g.gold_paper_ids;
        out << j.dump() << "\n";
    }
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("paperlink-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
