#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "paperlink/error.hpp"
#include "paperlink/rerank.hpp"

namespace paperlink {

namespace {

std::vector<std::string_view> fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const auto start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

bool WordVectorTable::add(std::string word, std::span<const double> values) {
    auto key = case_fold(word);
    if (rows_.contains(key)) return false;
    rows_.emplace(std::move(key), values_.size() / (dim_ == 0 ? 1 : dim_));
    values_.insert(values_.end(), values.begin(), values.end());
    return true;
}

WordVectorTable WordVectorTable::load(std::istream& in) {
    WordVectorTable table;
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> row;
    while (std::getline(in, line)) {
        ++line_no;
        const auto parts = fields(line);
        if (parts.empty()) continue;
        if (line_no == 1 && parts.size() == 2) {
            std::size_t count = 0;
            std::size_t dim = 0;
            if (parse_number(parts[0], count) && parse_number(parts[1], dim)) {
                if (dim == 0) throw ParseError("word-vector header declares dimension 0", line_no);
                table.dim_ = dim;
                continue;
            }
        }
        if (parts.size() < 2) throw ParseError("word-vector line needs a word and values", line_no);
        if (table.dim_ == 0) table.dim_ = parts.size() - 1;
        if (parts.size() - 1 != table.dim_) {
            throw ParseError("expected " + std::to_string(table.dim_) + " values, found " +
                                 std::to_string(parts.size() - 1),
                             line_no);
        }
        row.clear();
        for (std::size_t k = 1; k < parts.size(); ++k) {
            double v = 0.0;
            if (!parse_number(parts[k], v) || !std::isfinite(v)) {
                throw ParseError("bad vector value '" + std::string(parts[k]) + "'", line_no);
            }
            row.push_back(v);
        }
        table.add(std::string(parts[0]), row);
    }
    if (table.dim_ == 0) throw ParseError("word-vector table is empty");
    return table;
}

WordVectorTable WordVectorTable::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open word-vector table '" + path + "'");
    return load(in);
}

WordVectorTable WordVectorTable::from_rows(std::size_t dim,
                                           const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
    if (dim == 0) throw InputError("word-vector dimension must be positive");
    WordVectorTable table;
    table.dim_ = dim;
    for (const auto& [word, values] : rows) {
        if (values.size() != dim) throw InputError("word vector for '" + word + "' has the wrong dimension");
        table.add(word, values);
    }
    return table;
}

std::optional<std::span<const double>> WordVectorTable::find(std::string_view word) const {
    const auto it = rows_.find(word);
    if (it == rows_.end()) return std::nullopt;
    return std::span<const double>(values_.data() + it->second * dim_, dim_);
}

}  // namespace paperlink
