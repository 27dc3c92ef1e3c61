#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace paperlink {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates an operation's precondition.
class InputError : public Error {
public:
    using Error::Error;
};

/// Malformed file or wire content. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0);

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Transport failure or malformed response from a remote service.
class RemoteError : public Error {
public:
    RemoteError(std::string endpoint, std::string cause);

    const std::string& endpoint() const noexcept { return endpoint_; }
    const std::string& cause() const noexcept { return cause_; }

private:
    std::string endpoint_;
    std::string cause_;
};

}  // namespace paperlink
