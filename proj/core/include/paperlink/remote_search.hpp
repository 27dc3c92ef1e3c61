#pragma once

#include <chrono>
#include <cstddef>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "paperlink/index.hpp"
#include "paperlink/query.hpp"
#include "paperlink/remote.hpp"

namespace paperlink {

/// Search expression for an arXiv-style API: each phrase quoted and joined
/// by AND, e.g.  all:"dark matter" AND all:"halo".
std::string build_search_query(const ConjunctiveQuery& query);

/// Request target: `path?search_query=<encoded>&start=0&max_results=k`.
std::string build_search_target(const ConjunctiveQuery& query, std::size_t k,
                                std::string_view path = "/api/query");

/// Parses an Atom feed into papers. The paper_id is the entry id with any
/// ".../abs/" prefix removed. Throws ParseError on malformed XML or on an
/// entry without id or title.
std::vector<PaperRecord> parse_atom_feed(const std::string& xml);

/// One request, no rate limiting. Throws RemoteError.
std::vector<PaperRecord> query_remote_api(const ServiceEndpoint& endpoint, const ConjunctiveQuery& query,
                                          std::size_t k, std::string_view path = "/api/query");

struct RemoteSearchOptions {
    ServiceEndpoint endpoint;
    std::string path = "/api/query";
    std::chrono::milliseconds min_interval{3000};
};

/// Rate-limited client; concurrent callers are serialized so consecutive
/// requests are at least `min_interval` apart.
class RemotePaperSearch {
public:
    explicit RemotePaperSearch(RemoteSearchOptions options) : options_(std::move(options)) {}

    std::vector<PaperRecord> query(const ConjunctiveQuery& query, std::size_t k);

    /// Per-query top-k union, deduplicated like retrieve_candidates().
    CandidateSet retrieve(std::span<const ConjunctiveQuery> queries, std::size_t per_query_k,
                          std::string news_id = {});

private:
    RemoteSearchOptions options_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point last_request_{};
    bool first_request_ = true;
};

}  // namespace paperlink
