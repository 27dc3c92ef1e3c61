#pragma once

#include <memory>
#include <string>
#include <vector>

#include "paperlink/config.hpp"
#include "paperlink/index.hpp"
#include "paperlink/phrases.hpp"
#include "paperlink/query.hpp"
#include "paperlink/rerank.hpp"
#include "paperlink/textprep.hpp"

namespace paperlink {

class RemotePaperSearch;

/// Wall-clock seconds per stage. `rerank` is T_PRR and `total` is T_all.
struct StageTimings {
    double preprocess = 0.0;
    double extract = 0.0;
    double retrieve = 0.0;
    double rerank = 0.0;
    double total = 0.0;
};

struct PipelineResult {
    CleanDocument news;
    std::vector<Phrase> phrases;
    std::vector<ConjunctiveQuery> queries;
    CandidateSet candidates;
    RankedList ranking;
    StageTimings timings;
};

/// Reads a news file; .html/.htm files (or bodies starting with '<') are
/// treated as markup. The source id defaults to the file stem.
RawDocument load_news_file(const std::string& path, std::string source_id = {});

/// Runs the configured extractor. Chunk scores are multiplied by the chunk's
/// occurrence count so frequent chunks come first.
std::vector<Phrase> extract_phrases(const CleanDocument& news, const RunConfig& config);

/// preprocess -> extract phrases -> conjunctive queries -> candidate union
/// -> cosine re-ranking. Construction loads any word-vector table once;
/// run() is const and may be called from several threads.
class Pipeline {
public:
    Pipeline(RunConfig config, const InvertedIndex& index);
    ~Pipeline();

    Pipeline(const Pipeline&) = delete;
    Pipeline& operator=(const Pipeline&) = delete;

    PipelineResult run(const RawDocument& news) const;

    std::vector<Phrase> extract(const CleanDocument& news) const;
    CandidateSet retrieve(const std::vector<ConjunctiveQuery>& queries, const std::string& news_id) const;
    /// Builds the retrieval corpus and ranks every candidate.
    RankedList rank(const CleanDocument& news, const CandidateSet& candidates) const;

    const RunConfig& config() const { return config_; }

private:
    RankedList rank_dense(const CleanDocument& news, const RetrievalCorpus& corpus) const;

    RunConfig config_;
    const InvertedIndex* index_;
    std::shared_ptr<const WordVectorTable> wordvec_;
    std::unique_ptr<RemotePaperSearch> remote_search_;
};

}  // namespace paperlink
