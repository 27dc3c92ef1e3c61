#include "paperlink/textprep.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <nlohmann/json.hpp>
#include <set>
#include <unordered_set>

#include "paperlink/error.hpp"
#include "unicode.hpp"

namespace paperlink {

namespace {

using detail::decode_at;

bool iequals_prefix(std::string_view text, std::size_t pos, std::string_view prefix) {
    if (text.size() - pos < prefix.size()) return false;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        if (std::tolower(static_cast<unsigned char>(text[pos + k])) != prefix[k]) return false;
    }
    return true;
}

// Elements whose content is never visible text.
constexpr std::array kRawTextElements = {"script", "style", "noscript", "template", "svg", "iframe", "head"};

// Elements that start a new paragraph-like line.
constexpr std::array kBlockElements = {
    "p",     "div",     "br",    "h1",     "h2",      "h3",       "h4",  "h5",     "h6",
    "li",    "ul",      "ol",    "tr",     "td",      "th",       "table", "article", "section",
    "header", "footer", "blockquote", "pre", "title", "figcaption", "figure", "main", "aside",
    "nav",   "hr",      "dd",    "dt",     "dl",      "body",     "html"};

template <std::size_t N>
bool contains(const std::array<const char*, N>& names, std::string_view name) {
    return std::any_of(names.begin(), names.end(), [&](const char* n) { return name == n; });
}

std::optional<std::int32_t> named_entity(std::string_view name) {
    static const std::pair<std::string_view, std::int32_t> kEntities[] = {
        {"amp", '&'},       {"lt", '<'},        {"gt", '>'},        {"quot", '"'},
        {"apos", '\''},     {"nbsp", ' '},      {"mdash", 0x2014},  {"ndash", 0x2013},
        {"lsquo", 0x2018},  {"rsquo", 0x2019},  {"ldquo", 0x201C},  {"rdquo", 0x201D},
        {"hellip", 0x2026}, {"copy", 0x00A9},   {"deg", 0x00B0},    {"times", 0x00D7},
    };
    for (const auto& [n, cp] : kEntities) {
        if (n == name) return cp;
    }
    return std::nullopt;
}

// Decodes "&...;" at `pos`. Returns the number of bytes consumed, 0 if not an entity.
std::size_t decode_entity(std::string_view text, std::size_t pos, std::string& out) {
    const auto semi = text.find(';', pos + 1);
    if (semi == std::string_view::npos || semi - pos > 10 || semi == pos + 1) return 0;
    const auto body = text.substr(pos + 1, semi - pos - 1);
    std::int32_t cp = -1;
    if (body[0] == '#') {
        const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
        const auto digits = body.substr(hex ? 2 : 1);
        if (digits.empty()) return 0;
        std::int32_t value = 0;
        for (char c : digits) {
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
            else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
            else return 0;
            value = value * (hex ? 16 : 10) + d;
            if (value > 0x10FFFF) return 0;
        }
        cp = value;
    } else if (auto named = named_entity(body)) {
        cp = *named;
    } else {
        return 0;
    }
    if (cp == 0xA0) cp = ' ';
    detail::append_utf8(out, cp);
    return semi - pos + 1;
}

// Collapses horizontal whitespace, trims each line and drops empty lines.
std::string tidy_lines(std::string_view text) {
    std::string out;
    std::string line;
    bool pending_space = false;
    auto flush = [&] {
        if (!line.empty()) {
            if (!out.empty()) out.push_back('\n');
            out += line;
        }
        line.clear();
        pending_space = false;
    };
    for (std::size_t i = 0; i < text.size();) {
        const auto d = decode_at(text, i);
        if (text[i] == '\n') {
            flush();
        } else if (detail::is_space(d.cp)) {
            pending_space = true;
        } else {
            if (pending_space && !line.empty()) line.push_back(' ');
            pending_space = false;
            line.append(text.substr(i, d.len));
        }
        i += d.len;
    }
    flush();
    return out;
}

bool is_closer(std::string_view text, std::size_t pos, std::size_t* len) {
    const auto d = decode_at(text, pos);
    *len = d.len;
    return d.cp == '"' || d.cp == '\'' || d.cp == ')' || d.cp == ']' || d.cp == 0x201D ||
           d.cp == 0x2019 || d.cp == 0x00BB;
}

bool is_opener(std::int32_t cp) {
    return cp == '"' || cp == '\'' || cp == '(' || cp == 0x201C || cp == 0x2018 || cp == 0x00AB;
}

bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }

// Word ending at `dot` (inclusive) that starts after the last whitespace.
std::string_view word_ending_at(std::string_view text, std::size_t floor, std::size_t dot) {
    std::size_t begin = dot;
    while (begin > floor && !std::isspace(static_cast<unsigned char>(text[begin - 1]))) --begin;
    auto word = text.substr(begin, dot + 1 - begin);
    while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\'')) {
        word.remove_prefix(1);
    }
    return word;
}

bool ends_with_abbreviation(std::string_view text, std::size_t floor, std::size_t dot) {
    const auto word = word_ending_at(text, floor, dot);
    const auto& abbreviations = sentence_abbreviations();
    if (std::find(abbreviations.begin(), abbreviations.end(), word) != abbreviations.end()) return true;
    if (word == "al.") {
        // "et al." spans two words.
        std::size_t end = dot + 1 - word.size();
        while (end > floor && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
        if (end == 0) return false;
        return word_ending_at(text, floor, end - 1) == "et";
    }
    return false;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() > suffix.size() + 1 && s.substr(s.size() - suffix.size()) == suffix;
}

std::optional<Pos> suffix_rule(std::string_view norm) {
    static constexpr std::pair<std::string_view, Pos> kRules[] = {
        {"tion", Pos::Noun}, {"sion", Pos::Noun}, {"ment", Pos::Noun}, {"ness", Pos::Noun},
        {"ity", Pos::Noun},  {"ism", Pos::Noun},  {"ogy", Pos::Noun},  {"ous", Pos::Adj},
        {"ive", Pos::Adj},   {"al", Pos::Adj},    {"ic", Pos::Adj},    {"able", Pos::Adj},
        {"ible", Pos::Adj},  {"ize", Pos::Verb},  {"ise", Pos::Verb},  {"ify", Pos::Verb},
        {"ly", Pos::Other},
    };
    for (const auto& [suffix, pos] : kRules) {
        if (ends_with(norm, suffix)) return pos;
    }
    return std::nullopt;
}

bool has_letter(std::string_view token) {
    for (std::size_t i = 0; i < token.size();) {
        const auto d = decode_at(token, i);
        if (detail::is_letter(d.cp)) return true;
        i += d.len;
    }
    return false;
}

bool is_joiner(std::int32_t cp) { return cp == '-' || cp == '\'' || cp == 0x2019; }

}  // namespace

std::string_view to_string(Pos pos) {
    switch (pos) {
        case Pos::Noun: return "NOUN";
        case Pos::ProperNoun: return "PROPER_NOUN";
        case Pos::Adj: return "ADJ";
        case Pos::Verb: return "VERB";
        case Pos::Other: return "OTHER";
    }
    return "OTHER";
}

std::size_t CleanDocument::token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
}

std::string strip_markup(const RawDocument& raw) {
    if (!raw.is_markup) return raw.body;

    const std::string_view body = raw.body;
    std::string out;
    out.reserve(body.size());
    std::size_t i = 0;
    while (i < body.size()) {
        const char c = body[i];
        if (c == '<') {
            if (body.compare(i, 4, "<!--") == 0) {
                const auto end = body.find("-->", i + 4);
                i = end == std::string_view::npos ? body.size() : end + 3;
                continue;
            }
            const auto close = body.find('>', i + 1);
            if (close == std::string_view::npos) {
                out.push_back(c);  // a literal '<'
                ++i;
                continue;
            }
            std::size_t j = i + 1;
            const bool closing = j < close && body[j] == '/';
            if (closing) ++j;
            std::string name;
            while (j < close && (std::isalnum(static_cast<unsigned char>(body[j])) || body[j] == '!')) {
                name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(body[j]))));
                ++j;
            }
            if (name.empty() && !closing && body[i + 1] != '!') {
                out.push_back(c);  // "a < b" is text, not a tag
                ++i;
                continue;
            }
            i = close + 1;
            if (!closing && contains(kRawTextElements, name) && body[close - 1] != '/') {
                // Skip to the matching end tag.
                const std::string end_tag = "</" + name;
                std::size_t k = i;
                while (k < body.size() && !(body[k] == '<' && iequals_prefix(body, k, end_tag))) ++k;
                if (k >= body.size()) {
                    i = body.size();
                } else {
                    const auto gt = body.find('>', k);
                    i = gt == std::string_view::npos ? body.size() : gt + 1;
                }
                if (name == "head") out.push_back('\n');
                continue;
            }
            if (contains(kBlockElements, name)) out.push_back('\n');
            continue;
        }
        if (c == '&') {
            if (const auto used = decode_entity(body, i, out); used > 0) {
                i += used;
                continue;
            }
        }
        out.push_back(c == '\n' || c == '\r' ? ' ' : c);
        ++i;
    }
    return tidy_lines(out);
}

std::string clean_text(std::string_view text, const CleanOptions& options) {
    // Brackets: every matched [...] range goes, including nested ones inside
    // an unmatched opener; stray brackets are dropped individually.
    std::vector<bool> removed(text.size(), false);
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '[') {
            open.push_back(i);
        } else if (text[i] == ']') {
            if (open.empty()) {
                removed[i] = true;
            } else {
                std::fill(removed.begin() + static_cast<std::ptrdiff_t>(open.back()),
                          removed.begin() + static_cast<std::ptrdiff_t>(i) + 1, true);
                open.pop_back();
            }
        }
    }
    for (auto pos : open) removed[pos] = true;

    std::string kept;
    kept.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!removed[i]) kept.push_back(text[i]);
    }

    std::set<std::int32_t> specials;
    for (std::size_t i = 0; i < options.special_chars.size();) {
        const auto d = decode_at(options.special_chars, i);
        specials.insert(d.cp);
        i += d.len;
    }
    specials.erase('[');  // brackets are handled above and must stay total
    specials.erase(']');

    std::string out;
    out.reserve(kept.size());
    bool pending_space = false;
    const std::string_view view = kept;
    for (std::size_t i = 0; i < view.size();) {
        const auto d = decode_at(view, i);
        if (detail::is_space(d.cp)) {
            pending_space = true;
        } else if ((d.cp >= 0 && specials.contains(d.cp)) || detail::is_decimal_digit(d.cp)) {
            // dropped
        } else {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.append(view.substr(i, d.len));
        }
        i += d.len;
    }
    return out;
}

const std::vector<std::string_view>& sentence_abbreviations() {
    static const std::vector<std::string_view> kAbbreviations = {
        "Dr.", "Prof.", "Fig.", "e.g.", "i.e.", "vs.", "No.", "U.S.", "et al."};
    return kAbbreviations;
}

std::vector<Span> sentence_spans(std::string_view text) {
    std::vector<Span> spans;
    const std::size_t n = text.size();
    auto skip_space = [&](std::size_t pos) {
        while (pos < n) {
            const auto d = decode_at(text, pos);
            if (!detail::is_space(d.cp)) break;
            pos += d.len;
        }
        return pos;
    };

    std::size_t start = skip_space(0);
    std::size_t i = start;
    while (i < n) {
        if (!is_terminal(text[i])) {
            ++i;
            continue;
        }
        const std::size_t terminal = i;
        std::size_t j = i + 1;
        while (j < n && is_terminal(text[j])) ++j;
        std::size_t len = 0;
        while (j < n && is_closer(text, j, &len)) j += len;
        i = j;
        if (j >= n || !detail::is_space(decode_at(text, j).cp)) continue;

        std::size_t k = skip_space(j);
        if (k >= n) break;
        std::size_t peek = k;
        while (peek < n) {
            const auto d = decode_at(text, peek);
            if (!is_opener(d.cp)) break;
            peek += d.len;
        }
        if (peek >= n || !detail::is_upper(decode_at(text, peek).cp)) continue;
        if (text[terminal] == '.' && j == terminal + 1 && ends_with_abbreviation(text, start, terminal)) continue;

        spans.push_back({start, j});
        start = k;
        i = k;
    }
    if (start < n) {
        std::size_t end = n;
        while (end > start && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
        if (end > start) spans.push_back({start, end});
    }
    return spans;
}

std::vector<std::string> segment_sentences(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& span : sentence_spans(text)) {
        out.emplace_back(text.substr(span.start, span.end - span.start));
    }
    return out;
}

std::vector<Token> tokenize(std::string_view sentence) {
    std::vector<Token> tokens;
    const std::size_t n = sentence.size();
    std::size_t i = 0;
    while (i < n) {
        const auto d = decode_at(sentence, i);
        if (detail::is_space(d.cp)) {
            i += d.len;
            continue;
        }
        std::size_t j = i + d.len;
        if (detail::is_word_char(d.cp)) {
            while (j < n) {
                const auto next = decode_at(sentence, j);
                if (detail::is_word_char(next.cp)) {
                    j += next.len;
                } else if (is_joiner(next.cp) && j + next.len < n &&
                           detail::is_word_char(decode_at(sentence, j + next.len).cp)) {
                    j += next.len;
                } else {
                    break;
                }
            }
        }
        Token token;
        token.surface = std::string(sentence.substr(i, j - i));
        token.norm = case_fold(token.surface);
        token.span = {i, j};
        tokens.push_back(std::move(token));
        i = j;
    }
    return tokens;
}

std::vector<Token> tokenize_and_tag(std::string_view sentence) {
    auto tokens = tokenize(sentence);
    bool first_word = true;
    for (auto& token : tokens) {
        if (!is_word(token.surface)) {
            token.pos = Pos::Other;
            continue;
        }
        const bool mid_sentence = !first_word;
        first_word = false;
        if (!has_letter(token.surface)) {
            token.pos = Pos::Other;
            continue;
        }
        const auto lexical = lexicon_lookup(token.norm);
        const bool capitalized = detail::is_upper(decode_at(token.surface, 0).cp);
        if (capitalized && mid_sentence && lexical != Pos::Other) {
            token.pos = Pos::ProperNoun;
        } else if (lexical) {
            token.pos = *lexical;
        } else {
            token.pos = suffix_rule(token.norm).value_or(Pos::Noun);
        }
    }
    return tokens;
}

CleanDocument preprocess(const RawDocument& raw, const PreprocessOptions& options) {
    if (raw.body.empty()) throw InputError("document '" + raw.source_id + "' has an empty body");
    const auto body = options.extract_body ? options.extract_body(raw) : strip_markup(raw);

    CleanDocument doc;
    doc.source_id = raw.source_id;
    doc.text = clean_text(body, options.clean);
    const std::string_view text = doc.text;
    for (const auto& span : sentence_spans(text)) {
        auto tokens = tokenize_and_tag(text.substr(span.start, span.end - span.start));
        if (tokens.empty()) continue;
        for (auto& token : tokens) {
            token.span.start += span.start;
            token.span.end += span.start;
        }
        doc.sentences.push_back(std::move(tokens));
    }
    return doc;
}

std::vector<std::string> index_terms(std::string_view text, bool drop_stopwords) {
    std::vector<std::string> terms;
    for (auto& token : tokenize(text)) {
        if (!is_word(token.surface)) continue;
        if (drop_stopwords && is_stopword(token.norm)) continue;
        terms.push_back(std::move(token.norm));
    }
    return terms;
}

std::vector<std::string> index_terms(const CleanDocument& doc, bool drop_stopwords) {
    std::vector<std::string> terms;
    for (const auto& sentence : doc.sentences) {
        for (const auto& token : sentence) {
            if (!is_word(token.surface)) continue;
            if (drop_stopwords && is_stopword(token.norm)) continue;
            terms.push_back(token.norm);
        }
    }
    return terms;
}

std::vector<RawDocument> read_raw_documents(std::istream& in) {
    std::vector<RawDocument> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        if (!j.is_object()) throw ParseError("expected a JSON object", line_no);
        RawDocument doc;
        try {
            doc.source_id = j.at("source_id").get<std::string>();
            doc.body = j.at("body").get<std::string>();
            if (j.contains("uri") && !j["uri"].is_null()) doc.uri = j["uri"].get<std::string>();
            doc.is_markup = j.value("is_markup", false);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad document record: ") + e.what(), line_no);
        }
        if (doc.body.empty()) throw ParseError("empty body", line_no);
        if (!seen.insert(doc.source_id).second) {
            throw ParseError("duplicate source_id '" + doc.source_id + "'", line_no);
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace paperlink
