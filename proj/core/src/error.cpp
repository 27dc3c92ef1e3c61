#include "paperlink/error.hpp"

#include <utility>

namespace paperlink {

namespace {

std::string with_line(const std::string& what, std::size_t line) {
    if (line == 0) return what;
    return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(with_line(what, line)), line_(line) {}

RemoteError::RemoteError(std::string endpoint, std::string cause)
    : Error(endpoint + ": " + cause), endpoint_(std::move(endpoint)), cause_(std::move(cause)) {}

}  // namespace paperlink
