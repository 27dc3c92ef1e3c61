#include "paperlink/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "paperlink/error.hpp"

namespace paperlink {

namespace {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

double to_double(std::string_view key, std::string_view text) {
    const auto s = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw InputError("config " + std::string(key) + ": expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

std::size_t to_size(std::string_view key, std::string_view text) {
    const auto s = trim(text);
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw InputError("config " + std::string(key) + ": expected a non-negative integer, got '" +
                         std::string(text) + "'");
    }
    return v;
}

std::vector<std::size_t> to_size_list(std::string_view key, std::string_view text) {
    std::vector<std::size_t> out;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        const auto v = to_size(key, item);
        if (v == 0) throw InputError("config " + std::string(key) + ": K must be at least 1");
        out.push_back(v);
    }
    if (out.empty()) throw InputError("config " + std::string(key) + ": empty list");
    return out;
}

struct KeySpec {
    std::string_view name;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
};

const std::vector<KeySpec>& key_specs() {
    static const std::vector<KeySpec> specs = {
        {"phrases.extractor", [](const RunConfig& c) { return std::string(c.extractor == Extractor::TextRank ? "textrank" : c.extractor == Extractor::NpChunk ? "chunks" : "remote"); },
         [](RunConfig& c, auto, auto v) { c.extractor = parse_extractor(trim(v)); }},
        {"phrases.window", [](const RunConfig& c) { return std::to_string(c.textrank.window); },
         [](RunConfig& c, auto k, auto v) {
             c.textrank.window = to_size(k, v);
             if (c.textrank.window < 2) throw InputError("config phrases.window must be at least 2");
         }},
        {"phrases.damping", [](const RunConfig& c) { return format_double(c.textrank.damping); },
         [](RunConfig& c, auto k, auto v) {
             c.textrank.damping = to_double(k, v);
             if (!(c.textrank.damping > 0.0 && c.textrank.damping < 1.0)) throw InputError("config phrases.damping must lie in (0, 1)");
         }},
        {"phrases.max_iter", [](const RunConfig& c) { return std::to_string(c.textrank.max_iter); },
         [](RunConfig& c, auto k, auto v) { c.textrank.max_iter = to_size(k, v); }},
        {"phrases.tol", [](const RunConfig& c) { return format_double(c.textrank.tol); },
         [](RunConfig& c, auto k, auto v) { c.textrank.tol = to_double(k, v); }},
        {"phrases.keep_ratio", [](const RunConfig& c) { return format_double(c.textrank.keep_ratio); },
         [](RunConfig& c, auto k, auto v) {
             c.textrank.keep_ratio = to_double(k, v);
             if (!(c.textrank.keep_ratio > 0.0 && c.textrank.keep_ratio <= 1.0)) throw InputError("config phrases.keep_ratio must lie in (0, 1]");
         }},
        {"phrases.max_chunk_tokens", [](const RunConfig& c) { return std::to_string(c.max_chunk_tokens); },
         [](RunConfig& c, auto k, auto v) {
             c.max_chunk_tokens = to_size(k, v);
             if (c.max_chunk_tokens == 0) throw InputError("config phrases.max_chunk_tokens must be positive");
         }},
        {"textprep.special_chars", [](const RunConfig& c) { return c.clean.special_chars; },
         [](RunConfig& c, auto, auto v) { c.clean.special_chars = trim(v); }},
        {"index.path", [](const RunConfig& c) { return c.index_path; },
         [](RunConfig& c, auto, auto v) { c.index_path = trim(v); }},
        {"index.corpus", [](const RunConfig& c) { return c.corpus_path; },
         [](RunConfig& c, auto, auto v) { c.corpus_path = trim(v); }},
        {"index.k1", [](const RunConfig& c) { return format_double(c.bm25.k1); },
         [](RunConfig& c, auto k, auto v) {
             c.bm25.k1 = to_double(k, v);
             if (!(c.bm25.k1 > 0.0)) throw InputError("config index.k1 must be positive");
         }},
        {"index.b", [](const RunConfig& c) { return format_double(c.bm25.b); },
         [](RunConfig& c, auto k, auto v) {
             c.bm25.b = to_double(k, v);
             if (!(c.bm25.b >= 0.0 && c.bm25.b <= 1.0)) throw InputError("config index.b must lie in [0, 1]");
         }},
        {"index.max_phrases", [](const RunConfig& c) { return std::to_string(c.caps.max_phrases); },
         [](RunConfig& c, auto k, auto v) { c.caps.max_phrases = to_size(k, v); }},
        {"index.max_arity", [](const RunConfig& c) { return std::to_string(c.caps.max_arity); },
         [](RunConfig& c, auto k, auto v) {
             c.caps.max_arity = to_size(k, v);
             if (c.caps.max_arity < 1 || c.caps.max_arity > kMaxQueryArity) throw InputError("config index.max_arity must be 1, 2 or 3");
         }},
        {"index.max_queries", [](const RunConfig& c) { return std::to_string(c.caps.max_queries); },
         [](RunConfig& c, auto k, auto v) { c.caps.max_queries = to_size(k, v); }},
        {"index.per_query_k", [](const RunConfig& c) { return std::to_string(c.per_query_k); },
         [](RunConfig& c, auto k, auto v) {
             c.per_query_k = to_size(k, v);
             if (c.per_query_k == 0) throw InputError("config index.per_query_k must be positive");
         }},
        {"index.remote_search", [](const RunConfig& c) { return c.remote_search_url; },
         [](RunConfig& c, auto, auto v) { c.remote_search_url = trim(v); }},
        {"index.remote_interval_ms", [](const RunConfig& c) { return std::to_string(c.remote_search_interval_ms); },
         [](RunConfig& c, auto k, auto v) { c.remote_search_interval_ms = to_size(k, v); }},
        {"rerank.backend", [](const RunConfig& c) { return std::string(to_string(c.backend)); },
         [](RunConfig& c, auto, auto v) { c.backend = parse_backend(trim(v)); }},
        {"rerank.wordvec_path", [](const RunConfig& c) { return c.wordvec_path; },
         [](RunConfig& c, auto, auto v) { c.wordvec_path = trim(v); }},
        {"rerank.embed_model", [](const RunConfig& c) { return c.embed_model; },
         [](RunConfig& c, auto, auto v) { c.embed_model = trim(v); }},
        {"rerank.embed_batch", [](const RunConfig& c) { return std::to_string(c.embed_batch); },
         [](RunConfig& c, auto k, auto v) {
             c.embed_batch = to_size(k, v);
             if (c.embed_batch == 0) throw InputError("config rerank.embed_batch must be positive");
         }},
        {"endpoints.extract", [](const RunConfig& c) { return c.extract_endpoint; },
         [](RunConfig& c, auto, auto v) { c.extract_endpoint = trim(v); }},
        {"endpoints.embed", [](const RunConfig& c) { return c.embed_endpoint; },
         [](RunConfig& c, auto, auto v) { c.embed_endpoint = trim(v); }},
        {"endpoints.timeout_ms", [](const RunConfig& c) { return std::to_string(c.endpoint_timeout_ms); },
         [](RunConfig& c, auto k, auto v) { c.endpoint_timeout_ms = to_size(k, v); }},
        {"eval.ks",
         [](const RunConfig& c) {
             std::string out;
             for (auto k : c.ks) {
                 if (!out.empty()) out.push_back(',');
                 out += std::to_string(k);
             }
             return out;
         },
         [](RunConfig& c, auto k, auto v) { c.ks = to_size_list(k, v); }},
        {"eval.miss_policy", [](const RunConfig& c) { return std::string(to_string(c.miss_policy)); },
         [](RunConfig& c, auto k, auto v) {
             const auto s = trim(v);
             if (s == "zero") c.miss_policy = MissPolicy::Zero;
             else if (s == "exclude") c.miss_policy = MissPolicy::Exclude;
             else throw InputError("config " + std::string(k) + ": expected 'zero' or 'exclude'");
         }},
        {"eval.parallelism", [](const RunConfig& c) { return std::to_string(c.parallelism); },
         [](RunConfig& c, auto k, auto v) {
             c.parallelism = to_size(k, v);
             if (c.parallelism == 0) throw InputError("config eval.parallelism must be positive");
         }},
    };
    return specs;
}

std::string env_name(std::string_view key) {
    std::string out(kEnvPrefix);
    for (char c : key) {
        if (c == '.') out.push_back('_');
        else out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

std::string_view to_string(RerankBackend backend) {
    switch (backend) {
        case RerankBackend::Tfidf: return "tfidf";
        case RerankBackend::WordVec: return "wordvec";
        case RerankBackend::WordVecWeighted: return "wordvec_weighted";
        case RerankBackend::Remote: return "remote";
    }
    return "tfidf";
}

std::string_view to_string(MissPolicy policy) { return policy == MissPolicy::Zero ? "zero" : "exclude"; }

Extractor parse_extractor(std::string_view name) {
    if (name == "textrank") return Extractor::TextRank;
    if (name == "chunks") return Extractor::NpChunk;
    if (name == "remote") return Extractor::Remote;
    throw InputError("unknown extractor '" + std::string(name) + "' (textrank, chunks, remote)");
}

RerankBackend parse_backend(std::string_view name) {
    if (name == "tfidf") return RerankBackend::Tfidf;
    if (name == "wordvec") return RerankBackend::WordVec;
    if (name == "wordvec_weighted") return RerankBackend::WordVecWeighted;
    if (name == "remote") return RerankBackend::Remote;
    throw InputError("unknown backend '" + std::string(name) + "' (tfidf, wordvec, wordvec_weighted, remote)");
}

ServiceEndpoint RunConfig::extract_service() const {
    return {extract_endpoint, std::chrono::milliseconds(endpoint_timeout_ms)};
}

ServiceEndpoint RunConfig::embed_service() const {
    return {embed_endpoint, std::chrono::milliseconds(endpoint_timeout_ms)};
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& spec : key_specs()) keys.emplace_back(spec.name);
    return keys;
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
    for (const auto& spec : key_specs()) {
        if (spec.name == key) {
            spec.set(config, key, value);
            return;
        }
    }
    throw InputError("unknown config key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& spec : key_specs()) out.emplace_back(std::string(spec.name), spec.get(config));
    return out;
}

RunConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(e.message(), e.line());
    }
    RunConfig config;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ParseError("config key '" + section + "' must sit inside a [section]");
        }
        for (const auto& [name, node] : body) {
            set_config_value(config, section + "." + name, node.get_value<std::string>());
        }
    }
    return config;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::string format_config(const RunConfig& config) {
    std::string out;
    std::string section;
    for (const auto& [key, value] : config_entries(config)) {
        const auto dot = key.find('.');
        const auto sec = key.substr(0, dot);
        if (sec != section) {
            if (!out.empty()) out.push_back('\n');
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += key.substr(dot + 1) + " = " + value + "\n";
    }
    return out;
}

void apply_env_overrides(RunConfig& config) {
    for (const auto& spec : key_specs()) {
        if (const char* value = std::getenv(env_name(spec.name).c_str())) {
            spec.set(config, spec.name, value);
        }
    }
}

}  // namespace paperlink
