// paperlink: link a news article to the papers it reports on.
//
//   paperlink index <corpus.jsonl> -o <index>
//   paperlink retrieve <news> --index <index> [--k N] [--output ranked.json]
//   paperlink eval <gold.jsonl> --index <index> [--report r.json] [--dump-rankings DIR]
//
// Subcommands clean, extract and search run a single stage.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "paperlink/config.hpp"
#include "paperlink/error.hpp"
#include "paperlink/eval.hpp"
#include "paperlink/index.hpp"
#include "paperlink/pipeline.hpp"
#include "paperlink/query.hpp"

namespace {

using namespace paperlink;

struct GlobalFlags {
    std::string config_path;
    std::string extractor;
    std::string backend;
    std::string endpoint_extract;
    std::string endpoint_embed;
    std::vector<std::string> overrides;  // section.key=value
};

RunConfig resolve_config(const GlobalFlags& flags, const std::string& index_path = {}) {
    RunConfig config = flags.config_path.empty() ? RunConfig{} : load_config_file(flags.config_path);
    apply_env_overrides(config);
    for (const auto& kv : flags.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw InputError("--set expects section.key=value, got '" + kv + "'");
        set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!flags.extractor.empty()) set_config_value(config, "phrases.extractor", flags.extractor);
    if (!flags.backend.empty()) set_config_value(config, "rerank.backend", flags.backend);
    if (!flags.endpoint_extract.empty()) set_config_value(config, "endpoints.extract", flags.endpoint_extract);
    if (!flags.endpoint_embed.empty()) set_config_value(config, "endpoints.embed", flags.endpoint_embed);
    if (!index_path.empty()) set_config_value(config, "index.path", index_path);
    return config;
}

InvertedIndex load_index(const RunConfig& config) {
    if (config.index_path.empty()) throw InputError("no index given (use --index or index.path)");
    std::ifstream in(config.index_path, std::ios::binary);
    if (!in) throw InputError("cannot open index '" + config.index_path + "'");
    return InvertedIndex::load(in);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << content;
    if (!out) throw InputError("write to '" + path + "' failed");
}

void print_timings(const StageTimings& t) {
    std::fprintf(stderr, "preprocess %.3fs  extract %.3fs  retrieve %.3fs  T_PRR %.3fs  T_all %.3fs\n", t.preprocess,
                 t.extract, t.retrieve, t.rerank, t.total);
}

int cmd_clean(const GlobalFlags& flags, const std::string& news_path) {
    const auto config = resolve_config(flags);
    PreprocessOptions options;
    options.clean = config.clean;
    const auto doc = preprocess(load_news_file(news_path), options);
    for (const auto& sentence : doc.sentences) {
        if (sentence.empty()) continue;
        const auto start = sentence.front().span.start;
        std::cout << doc.text.substr(start, sentence.back().span.end - start) << "\n";
    }
    return 0;
}

int cmd_extract(const GlobalFlags& flags, const std::string& news_path) {
    const auto config = resolve_config(flags);
    PreprocessOptions options;
    options.clean = config.clean;
    const auto doc = preprocess(load_news_file(news_path), options);
    for (const auto& phrase : extract_phrases(doc, config)) {
        std::printf("%.6f\t%s\n", phrase.score, phrase.text.c_str());
    }
    return 0;
}

int cmd_index(std::string corpus_path, std::string index_path, const GlobalFlags& flags) {
    const auto config = resolve_config(flags);
    if (corpus_path.empty()) corpus_path = config.corpus_path;
    if (index_path.empty()) index_path = config.index_path;
    if (corpus_path.empty()) throw InputError("no corpus given (positional argument or index.corpus)");
    if (index_path.empty()) throw InputError("no output given (-o or index.path)");
    std::ifstream in(corpus_path, std::ios::binary);
    if (!in) throw InputError("cannot open corpus '" + corpus_path + "'");
    const auto index = InvertedIndex::build(read_corpus(in), config.bm25);
    std::ofstream out(index_path, std::ios::binary);
    if (!out) throw InputError("cannot write index '" + index_path + "'");
    index.save(out);
    if (!out) throw InputError("write to '" + index_path + "' failed");
    std::printf("%zu documents indexed\n", index.n_docs());
    std::printf("vocabulary %zu terms, avgdl %.3f\n", index.vocabulary_size(), index.avgdl());
    return 0;
}

int cmd_search(const GlobalFlags& flags, const std::string& index_path, const std::string& text, std::size_t k) {
    const auto config = resolve_config(flags, index_path);
    const auto index = load_index(config);
    const auto terms = index_terms(text);
    for (const auto& hit : search_terms(index, terms, k)) {
        const auto& paper = index.paper(hit.doc);
        std::printf("%s\t%.6f\t%s\n", paper.paper_id.c_str(), hit.score, paper.title.c_str());
    }
    return 0;
}

int cmd_retrieve(const GlobalFlags& flags, const std::string& news_path, const std::string& index_path,
                 std::optional<std::size_t> k, const std::string& output) {
    const auto config = resolve_config(flags, index_path);
    const auto index = load_index(config);
    const Pipeline pipeline(config, index);
    const auto result = pipeline.run(load_news_file(news_path));
    print_timings(result.timings);
    std::fprintf(stderr, "%zu phrases, %zu queries, %zu candidates\n", result.phrases.size(), result.queries.size(),
                 result.candidates.candidates.size());

    if (result.queries.empty()) std::cout << "no queries generated\n";
    const auto n = std::min(k.value_or(result.ranking.items.size()), result.ranking.items.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& item = result.ranking.items[i];
        std::printf("%s\t%.6f\n", item.paper_id.c_str(), item.similarity);
    }
    if (!output.empty()) {
        nlohmann::ordered_json j;
        j["news_id"] = result.ranking.news_id;
        auto& items = j["items"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < n; ++i) {
            items.push_back({{"paper_id", result.ranking.items[i].paper_id},
                             {"similarity", result.ranking.items[i].similarity}});
        }
        write_file(output, j.dump(1) + "\n");
    }
    return 0;
}

int cmd_eval(const GlobalFlags& flags, const std::string& gold_path, const std::string& index_path,
             const std::string& report_path, const std::string& timings_path, const std::string& dump_dir) {
    const auto config = resolve_config(flags, index_path);
    const auto index = load_index(config);
    std::ifstream in(gold_path, std::ios::binary);
    if (!in) throw InputError("cannot open gold file '" + gold_path + "'");
    const auto gold = read_gold_pairs(in);

    BenchmarkOptions options;
    options.news_base_dir = std::filesystem::path(gold_path).parent_path();
    if (!dump_dir.empty()) options.dump_dir = dump_dir;
    const auto report = run_benchmark(config, index, gold, options);

    if (!report_path.empty()) write_file(report_path, report_json(report, config));
    if (!timings_path.empty()) write_file(timings_path, timings_json(report));
    std::cout << report_table(report, config);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Find the scientific papers a news article reports on."};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--extractor", flags.extractor, "textrank | chunks | remote");
    app.add_option("--backend", flags.backend, "tfidf | wordvec | wordvec_weighted | remote");
    app.add_option("--endpoint-extract", flags.endpoint_extract, "base URL of the /extract service");
    app.add_option("--endpoint-embed", flags.endpoint_embed, "base URL of the /embed service");
    app.add_option("--set", flags.overrides, "override a config key: section.key=value");

    std::string news_path, corpus_path, index_path, output, gold_path, report_path, timings_path, dump_dir, text;
    std::size_t k = 10;
    std::optional<std::size_t> retrieve_k;

    auto* clean = app.add_subcommand("clean", "print the cleaned article, one sentence per line");
    clean->add_option("news", news_path)->required();

    auto* extract = app.add_subcommand("extract", "print extracted phrases with scores");
    extract->add_option("news", news_path)->required();

    auto* index = app.add_subcommand("index", "build a BM25 index from a JSONL corpus");
    index->add_option("corpus", corpus_path, "JSONL corpus (default: index.corpus)");
    index->add_option("-o,--output", output, "index file to write (default: index.path)");

    auto* search = app.add_subcommand("search", "BM25 conjunctive search");
    search->add_option("terms", text)->required();
    search->add_option("--index", index_path);
    search->add_option("--k", k, "number of hits");

    auto* retrieve = app.add_subcommand("retrieve", "rank candidate papers for one article");
    retrieve->add_option("news", news_path)->required();
    retrieve->add_option("--index", index_path);
    retrieve->add_option("--k", retrieve_k, "number of rows to print");
    retrieve->add_option("-o,--output", output, "write the ranked list as JSON");

    auto* eval = app.add_subcommand("eval", "run the benchmark over a gold-pair file");
    eval->add_option("gold", gold_path)->required();
    eval->add_option("--index", index_path);
    eval->add_option("--report", report_path, "metrics report (JSON)");
    eval->add_option("--timings", timings_path, "per-query timings (JSON)");
    eval->add_option("--dump-rankings", dump_dir, "directory for per-query ranked lists");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*clean) return cmd_clean(flags, news_path);
        if (*extract) return cmd_extract(flags, news_path);
        if (*index) return cmd_index(corpus_path, output, flags);
        if (*search) return cmd_search(flags, index_path, text, k);
        if (*retrieve) return cmd_retrieve(flags, news_path, index_path, retrieve_k, output);
        if (*eval) return cmd_eval(flags, gold_path, index_path, report_path, timings_path, dump_dir);
    } catch (const ParseError& e) {
        std::cerr << "paperlink: parse error: " << e.what() << "\n";
        return 2;
    } catch (const RemoteError& e) {
        std::cerr << "paperlink: remote error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "paperlink: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
