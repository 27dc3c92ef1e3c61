#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace paperlink {

/// Coarse part-of-speech classes; enough for chunking and TextRank filters.
enum class Pos { Noun, ProperNoun, Adj, Verb, Other };

std::string_view to_string(Pos pos);

/// Half-open byte range [start, end).
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    friend bool operator==(const Span&, const Span&) = default;
};

struct Token {
    std::string surface;
    std::string norm;  // case-folded surface
    Pos pos = Pos::Other;
    Span span;
};

using Sentence = std::vector<Token>;

struct RawDocument {
    std::string source_id;
    std::optional<std::string> uri;
    std::string body;
    bool is_markup = false;
};

/// Cleaned news text with token spans that index into `text`.
struct CleanDocument {
    std::string source_id;
    std::string text;
    std::vector<Sentence> sentences;

    std::size_t token_count() const;
};

/// Characters removed by clean_text besides brackets, digits and extra whitespace.
inline constexpr std::string_view kDefaultSpecialChars = "@#$%^&*~";

struct CleanOptions {
    std::string special_chars{kDefaultSpecialChars};
};

/// Site-specific body extraction. The default is generic tag stripping.
using BodyExtractor = std::function<std::string(const RawDocument&)>;

struct PreprocessOptions {
    CleanOptions clean;
    BodyExtractor extract_body;  // empty -> strip_markup
};

/// Visible text of a markup document; plain bodies are returned unchanged.
/// Script/style content is dropped, block-level tags become newlines, and
/// character entities are decoded. Malformed markup is handled best-effort.
std::string strip_markup(const RawDocument& raw);

/// Removes bracketed segments (with nesting), the configured special
/// characters and decimal digits, then collapses whitespace runs to one
/// space and trims. Stray brackets are dropped on their own. Idempotent.
std::string clean_text(std::string_view text, const CleanOptions& options = {});

/// Sentence boundaries: a terminal '.', '?' or '!' (plus closing quotes or
/// brackets) followed by whitespace and an upper-case letter. Known
/// abbreviations such as "Dr." or "e.g." never end a sentence. Spans exclude
/// the separating whitespace and are never empty.
std::vector<Span> sentence_spans(std::string_view text);
std::vector<std::string> segment_sentences(std::string_view text);

/// Abbreviations that do not terminate a sentence.
const std::vector<std::string_view>& sentence_abbreviations();

/// Splits on whitespace; word runs (letters, digits, marks, with internal
/// hyphens/apostrophes) form one token and each other symbol is its own
/// token. Spans are relative to `sentence`. POS is left as Other.
std::vector<Token> tokenize(std::string_view sentence);

/// tokenize() followed by lexicon + suffix-rule tagging. Capitalized words
/// after the first word of the sentence are proper nouns unless closed-class;
/// unknown words default to Noun.
std::vector<Token> tokenize_and_tag(std::string_view sentence);

/// Full cleaning, segmentation and tagging; token spans index into the
/// cleaned text.
CleanDocument preprocess(const RawDocument& raw, const PreprocessOptions& options = {});

/// Unicode case folding of UTF-8 text. Invalid sequences pass through.
std::string case_fold(std::string_view text);

/// True when the token contains at least one letter or digit.
bool is_word(std::string_view token);

/// Lexicon lookup on a case-folded word.
std::optional<Pos> lexicon_lookup(std::string_view norm);
std::size_t lexicon_size();

/// Fixed English stopword list, shared by indexing and re-ranking.
bool is_stopword(std::string_view norm);
const std::vector<std::string_view>& stopwords();

/// Case-folded word tokens of `text` with stopwords removed, in text order.
/// This is the single term normalization used by the index and the re-ranker.
std::vector<std::string> index_terms(std::string_view text, bool drop_stopwords = true);

/// Same normalization applied to an already tokenized document.
std::vector<std::string> index_terms(const CleanDocument& doc, bool drop_stopwords = true);

/// Reads batch input: one JSON object per line with fields
/// {source_id, uri, body, is_markup}. Throws ParseError naming the line.
std::vector<RawDocument> read_raw_documents(std::istream& in);

}  // namespace paperlink
