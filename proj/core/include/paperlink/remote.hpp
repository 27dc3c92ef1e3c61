#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace paperlink {

/// Base URL of an HTTP service, e.g. "http://127.0.0.1:8000".
struct ServiceEndpoint {
    std::string url;
    std::chrono::milliseconds timeout{30000};
};

/// Blocking HTTP helpers. Every call opens its own connection, so they are
/// safe to use from many threads at once. Non-2xx statuses and transport
/// failures raise RemoteError naming the endpoint.
std::string http_post_json(const ServiceEndpoint& endpoint, std::string_view path,
                           const std::string& body);
std::string http_get(const ServiceEndpoint& endpoint, const std::string& target);

/// Percent-encodes a query-string component (RFC 3986 unreserved set kept).
std::string url_encode(std::string_view text);

}  // namespace paperlink
