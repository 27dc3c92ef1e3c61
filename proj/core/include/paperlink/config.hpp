#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "paperlink/index.hpp"
#include "paperlink/phrases.hpp"
#include "paperlink/query.hpp"
#include "paperlink/remote.hpp"
#include "paperlink/textprep.hpp"

namespace paperlink {

enum class RerankBackend { Tfidf, WordVec, WordVecWeighted, Remote };

/// How a query whose gold paper never shows up counts toward MRR.
enum class MissPolicy { Zero, Exclude };

std::string_view to_string(RerankBackend backend);
std::string_view to_string(MissPolicy policy);

/// Every tunable of a run. Defaults are the documented ones; see
/// docs/configuration.md for the file format and key names.
struct RunConfig {
    // phrases
    Extractor extractor = Extractor::TextRank;
    TextRankParams textrank;
    std::size_t max_chunk_tokens = kMaxChunkTokens;

    // textprep
    CleanOptions clean;

    // index
    std::string index_path;
    std::string corpus_path;
    Bm25Params bm25;
    QueryCaps caps;
    std::size_t per_query_k = 10;
    std::string remote_search_url;  // empty: search the local index
    std::size_t remote_search_interval_ms = 3000;

    // rerank
    RerankBackend backend = RerankBackend::Tfidf;
    std::string wordvec_path;
    std::string embed_model = "specter";
    std::size_t embed_batch = 64;

    // endpoints
    std::string extract_endpoint;
    std::string embed_endpoint;
    std::size_t endpoint_timeout_ms = 30000;

    // eval
    std::vector<std::size_t> ks{1, 5, 10, 20, 50};
    MissPolicy miss_policy = MissPolicy::Zero;
    std::size_t parallelism = 1;

    ServiceEndpoint extract_service() const;
    ServiceEndpoint embed_service() const;
};

/// Environment variables PAPERLINK_<SECTION>_<KEY> override file values,
/// e.g. PAPERLINK_RERANK_BACKEND=wordvec.
inline constexpr std::string_view kEnvPrefix = "PAPERLINK_";

/// Canonical "section.key" names, in echo order.
std::vector<std::string> config_keys();

/// Sets one "section.key". Throws InputError for unknown keys or bad values.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Current values of every key, formatted as they would appear in a file.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);

/// INI-style file: [section] headers and key = value lines.
RunConfig parse_config(std::istream& in);
RunConfig load_config_file(const std::string& path);
std::string format_config(const RunConfig& config);

/// Applies every PAPERLINK_* variable that names a known key.
void apply_env_overrides(RunConfig& config);

Extractor parse_extractor(std::string_view name);
RerankBackend parse_backend(std::string_view name);

}  // namespace paperlink
