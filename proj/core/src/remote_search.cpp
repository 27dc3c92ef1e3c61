#include "paperlink/remote_search.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <sstream>
#include <thread>

#include "paperlink/error.hpp"

namespace paperlink {

namespace {

namespace pt = boost::property_tree;

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    bool space = false;
    for (char c : text) {
        if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string build_search_query(const ConjunctiveQuery& query) {
    std::string out;
    for (const auto& phrase : query.phrases) {
        if (!out.empty()) out += " AND ";
        out += "all:\"" + phrase.normalized() + "\"";
    }
    return out;
}

std::string build_search_target(const ConjunctiveQuery& query, std::size_t k, std::string_view path) {
    return std::string(path) + "?search_query=" + url_encode(build_search_query(query)) +
           "&start=0&max_results=" + std::to_string(k);
}

std::vector<PaperRecord> parse_atom_feed(const std::string& xml) {
    pt::ptree tree;
    try {
        std::istringstream in(xml);
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError(std::string("malformed feed: ") + e.what());
    }
    const auto feed = tree.get_child_optional("feed");
    if (!feed) throw ParseError("malformed feed: no <feed> root");

    std::vector<PaperRecord> papers;
    for (const auto& [name, entry] : *feed) {
        if (name != "entry") continue;
        PaperRecord paper;
        const auto id = entry.get_optional<std::string>("id");
        const auto title = entry.get_optional<std::string>("title");
        if (!id || id->empty() || !title || title->empty()) throw ParseError("feed entry lacks id or title");
        paper.paper_id = *id;
        if (const auto abs = paper.paper_id.find("/abs/"); abs != std::string::npos) {
            paper.paper_id = paper.paper_id.substr(abs + 5);
        }
        paper.title = collapse_whitespace(*title);
        paper.abstract = collapse_whitespace(entry.get<std::string>("summary", ""));
        for (const auto& [child, node] : entry) {
            if (child != "author") continue;
            if (auto author = node.get_optional<std::string>("name")) paper.authors.push_back(collapse_whitespace(*author));
        }
        papers.push_back(std::move(paper));
    }
    return papers;
}

std::vector<PaperRecord> query_remote_api(const ServiceEndpoint& endpoint, const ConjunctiveQuery& query,
                                          std::size_t k, std::string_view path) {
    if (k == 0) throw InputError("remote search k must be at least 1");
    const auto body = http_get(endpoint, build_search_target(query, k, path));
    try {
        return parse_atom_feed(body);
    } catch (const ParseError& e) {
        throw RemoteError(endpoint.url, e.what());
    }
}

std::vector<PaperRecord> RemotePaperSearch::query(const ConjunctiveQuery& query, std::size_t k) {
    std::lock_guard lock(mutex_);
    if (!first_request_) {
        const auto ready = last_request_ + options_.min_interval;
        std::this_thread::sleep_until(ready);
    }
    first_request_ = false;
    last_request_ = std::chrono::steady_clock::now();
    return query_remote_api(options_.endpoint, query, k, options_.path);
}

CandidateSet RemotePaperSearch::retrieve(std::span<const ConjunctiveQuery> queries, std::size_t per_query_k,
                                         std::string news_id) {
    std::vector<std::vector<PaperRecord>> per_query;
    for (const auto& q : queries) per_query.push_back(query(q, per_query_k));
    return merge_candidates(std::move(news_id), per_query);
}

}  // namespace paperlink
