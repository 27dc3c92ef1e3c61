#include <algorithm>
#include <unordered_set>

#include "paperlink/textprep.hpp"

namespace paperlink {

namespace {

const std::unordered_set<std::string_view>& stopword_set() {
    static const std::unordered_set<std::string_view> set(stopwords().begin(), stopwords().end());
    return set;
}

}  // namespace

const std::vector<std::string_view>& stopwords() {
    static const std::vector<std::string_view> words = {
#include "stopwords_data.inc"
    };
    return words;
}

bool is_stopword(std::string_view norm) { return stopword_set().contains(norm); }

}  // namespace paperlink
