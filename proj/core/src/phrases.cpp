#include "paperlink/phrases.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <unordered_map>
#include <unordered_set>

#include "paperlink/error.hpp"

namespace paperlink {

namespace {

bool is_nominal(Pos pos) { return pos == Pos::Noun || pos == Pos::ProperNoun; }

void merge_spans(std::vector<PhraseSpan>& into, const std::vector<PhraseSpan>& from) {
    into.insert(into.end(), from.begin(), from.end());
    std::sort(into.begin(), into.end());
    into.erase(std::unique(into.begin(), into.end()), into.end());
}

struct TokenRef {
    std::size_t sentence;
    std::size_t index;
    const Token* token;
};

}  // namespace

std::string_view to_string(Extractor extractor) {
    switch (extractor) {
        case Extractor::TextRank: return "TEXTRANK";
        case Extractor::NpChunk: return "NP_CHUNK";
        case Extractor::Remote: return "REMOTE";
    }
    return "NP_CHUNK";
}

std::string Phrase::normalized() const {
    if (tokens.empty()) return normalize_phrase(text);
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

std::string normalize_phrase(std::string_view text) {
    std::string out;
    for (const auto& token : tokenize(text)) {
        if (!out.empty()) out.push_back(' ');
        out += token.norm;
    }
    return out;
}

std::vector<Phrase> extract_np_chunks(const CleanDocument& doc, std::size_t max_tokens) {
    if (max_tokens == 0) throw InputError("chunk length limit must be positive");
    std::vector<Phrase> phrases;
    std::unordered_map<std::string, std::size_t> by_text;

    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        const auto& sentence = doc.sentences[s];
        const std::size_t n = sentence.size();
        std::size_t i = 0;
        while (i < n) {
            std::size_t adj_end = i;
            while (adj_end < n && sentence[adj_end].pos == Pos::Adj) ++adj_end;
            std::size_t end = adj_end;
            while (end < n && is_nominal(sentence[end].pos)) ++end;
            if (end == adj_end) {
                // No nominal head: every adjective in [i, adj_end) fails the same way.
                i = adj_end > i ? adj_end : i + 1;
                continue;
            }
            const std::size_t start = end - i > max_tokens ? end - max_tokens : i;

            Phrase phrase;
            phrase.extractor = Extractor::NpChunk;
            for (std::size_t t = start; t < end; ++t) {
                phrase.tokens.push_back(sentence[t].norm);
                if (!phrase.text.empty()) phrase.text.push_back(' ');
                phrase.text += sentence[t].surface;
            }
            phrase.score = static_cast<double>(end - start);
            const PhraseSpan span{s, start, end};
            auto key = phrase.normalized();
            if (auto it = by_text.find(key); it != by_text.end()) {
                phrases[it->second].spans.push_back(span);
            } else {
                phrase.spans.push_back(span);
                by_text.emplace(std::move(key), phrases.size());
                phrases.push_back(std::move(phrase));
            }
            i = end;
        }
    }
    return phrases;
}

std::vector<RemoteSpan> parse_extract_response(const std::string& body, std::size_t text_size) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("extract response is not JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("spans") || !j["spans"].is_array()) {
        throw ParseError("extract response lacks a 'spans' array");
    }
    std::vector<RemoteSpan> spans;
    for (const auto& item : j["spans"]) {
        if (!item.is_object() || !item.contains("start") || !item.contains("end") ||
            !item["start"].is_number_integer() || !item["end"].is_number_integer()) {
            throw ParseError("extract span needs integer 'start' and 'end'");
        }
        const auto start = item["start"].get<long long>();
        const auto end = item["end"].get<long long>();
        if (start < 0 || end <= start || static_cast<std::size_t>(end) > text_size) {
            throw ParseError("extract span [" + std::to_string(start) + ", " + std::to_string(end) +
                             ") is outside the text");
        }
        RemoteSpan span;
        span.start = static_cast<std::size_t>(start);
        span.end = static_cast<std::size_t>(end);
        span.label = item.value("label", std::string("DKE"));
        if (item.contains("score")) {
            if (!item["score"].is_number()) throw ParseError("extract span 'score' must be a number");
            span.score = item["score"].get<double>();
        } else {
            span.score = 1.0;
        }
        if (!std::isfinite(span.score) || span.score < 0.0) {
            throw ParseError("extract span score must be finite and non-negative");
        }
        spans.push_back(std::move(span));
    }
    return spans;
}

std::vector<Phrase> phrases_from_spans(const CleanDocument& doc, std::span<const RemoteSpan> spans) {
    std::vector<TokenRef> flat;
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        for (std::size_t t = 0; t < doc.sentences[s].size(); ++t) flat.push_back({s, t, &doc.sentences[s][t]});
    }

    std::vector<Phrase> phrases;
    for (const auto& span : spans) {
        // First token that ends after the span starts.
        auto it = std::partition_point(flat.begin(), flat.end(),
                                       [&](const TokenRef& r) { return r.token->span.end <= span.start; });
        std::vector<TokenRef> hit;
        for (; it != flat.end() && it->token->span.start < span.end; ++it) hit.push_back(*it);

        // A span crossing a sentence break yields one phrase per sentence.
        std::size_t a = 0;
        while (a < hit.size()) {
            std::size_t b = a;
            while (b < hit.size() && hit[b].sentence == hit[a].sentence) ++b;
            std::size_t lo = a;
            std::size_t hi = b;
            while (lo < hi && !is_word(hit[lo].token->surface)) ++lo;
            while (hi > lo && !is_word(hit[hi - 1].token->surface)) --hi;
            if (lo < hi) {
                Phrase phrase;
                phrase.extractor = Extractor::Remote;
                phrase.score = span.score;
                for (std::size_t k = lo; k < hi; ++k) phrase.tokens.push_back(hit[k].token->norm);
                const auto first = hit[lo].token->span.start;
                const auto last = hit[hi - 1].token->span.end;
                phrase.text = doc.text.substr(first, last - first);
                phrase.spans.push_back({hit[lo].sentence, hit[lo].index, hit[hi - 1].index + 1});
                phrases.push_back(std::move(phrase));
            }
            a = b;
        }
    }
    return dedup_phrases(std::move(phrases));
}

std::vector<Phrase> extract_remote(const CleanDocument& doc, const ServiceEndpoint& endpoint) {
    const nlohmann::json request = {{"text", doc.text}};
    const auto body = http_post_json(endpoint, "/extract", request.dump());
    try {
        const auto spans = parse_extract_response(body, doc.text.size());
        return phrases_from_spans(doc, spans);
    } catch (const ParseError& e) {
        throw RemoteError(endpoint.url, std::string("malformed /extract response: ") + e.what());
    }
}

std::vector<Phrase> dedup_phrases(std::vector<Phrase> phrases) {
    std::vector<Phrase> unique;
    std::unordered_map<std::string, std::size_t> by_text;
    for (auto& phrase : phrases) {
        auto key = normalize_phrase(phrase.text);
        if (key.empty()) key = phrase.normalized();
        if (auto it = by_text.find(key); it != by_text.end()) {
            auto& kept = unique[it->second];
            kept.score = std::max(kept.score, phrase.score);
            merge_spans(kept.spans, phrase.spans);
            continue;
        }
        phrase.text = key;
        by_text.emplace(std::move(key), unique.size());
        unique.push_back(std::move(phrase));
    }
    std::stable_sort(unique.begin(), unique.end(),
                     [](const Phrase& a, const Phrase& b) { return a.score > b.score; });
    return unique;
}

PRF score_extraction(std::span<const Phrase> predicted, const ExtractionGold& gold) {
    std::unordered_set<std::string> gold_set;
    for (const auto& g : gold.gold_phrases) {
        auto key = normalize_phrase(g);
        if (!key.empty()) gold_set.insert(std::move(key));
    }
    if (gold_set.empty()) throw InputError("extraction gold for '" + gold.source_id + "' is empty");

    std::unordered_set<std::string> pred_set;
    for (const auto& p : predicted) pred_set.insert(p.normalized());

    std::size_t hits = 0;
    for (const auto& p : pred_set) hits += gold_set.count(p);

    PRF prf;
    prf.precision = pred_set.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(pred_set.size());
    prf.recall = static_cast<double>(hits) / static_cast<double>(gold_set.size());
    const double sum = prf.precision + prf.recall;
    prf.f1 = sum == 0.0 ? 0.0 : 2.0 * prf.precision * prf.recall / sum;
    return prf;
}

}  // namespace paperlink
