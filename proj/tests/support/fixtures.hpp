#pragma once

// Synthetic data for tests and the acceptance run. Everything is driven by
// an explicit seed so failures replay.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "paperlink/eval.hpp"
#include "paperlink/index.hpp"

namespace fixtures {

using Rng = std::mt19937_64;

/// Lower-case pseudo-words that the tagger reads as nouns: not in the
/// lexicon, not stopwords, and clear of the adjective/verb suffix rules.
std::vector<std::string> noun_vocabulary(std::size_t n, std::uint64_t seed);

std::string join(const std::vector<std::string>& words, const std::string& sep = " ");

/// Random corpus of `n_docs` papers drawing words from `vocab` (Zipf-ish).
std::vector<paperlink::PaperRecord> random_corpus(Rng& rng, const std::vector<std::string>& vocab,
                                                  std::size_t n_docs, std::size_t max_words = 40);

/// One news article with a single gold paper among distractors. The gold
/// abstract contains every planted two-word phrase; each distractor contains
/// at most one.
struct PlantedInstance {
    std::string news_id;
    std::string news_text;
    std::string gold_id;
    std::vector<std::string> planted;  // multiword phrases shared by news and gold
    std::vector<paperlink::PaperRecord> corpus;
};

PlantedInstance make_planted_instance(std::uint64_t seed, std::size_t n_distractors = 500,
                                      std::size_t n_planted = 4);

/// Several instances merged into one corpus, news files written under `dir`.
/// Returns the gold pairs with news_path relative to `dir`.
struct PlantedBenchmark {
    std::vector<paperlink::PaperRecord> corpus;
    std::vector<paperlink::GoldPair> gold;
};
PlantedBenchmark write_planted_benchmark(const std::filesystem::path& dir, std::size_t n_pairs, std::uint64_t seed,
                                         std::size_t n_distractors = 40);

void write_corpus(const std::filesystem::path& path, const std::vector<paperlink::PaperRecord>& corpus);
void write_gold(const std::filesystem::path& path, const std::vector<paperlink::GoldPair>& gold);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

}  // namespace fixtures
