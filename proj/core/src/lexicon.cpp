#include <algorithm>
#include <iterator>

#include "paperlink/textprep.hpp"

namespace paperlink {

namespace {

struct LexiconEntry {
    std::string_view word;
    Pos pos;
};

constexpr LexiconEntry kLexicon[] = {
#include "lexicon_data.inc"
};

static_assert(std::size(kLexicon) >= 5000);

}  // namespace

std::optional<Pos> lexicon_lookup(std::string_view norm) {
    const auto it = std::lower_bound(std::begin(kLexicon), std::end(kLexicon), norm,
                                     [](const LexiconEntry& e, std::string_view w) { return e.word < w; });
    if (it == std::end(kLexicon) || it->word != norm) return std::nullopt;
    return it->pos;
}

std::size_t lexicon_size() { return std::size(kLexicon); }

}  // namespace paperlink
