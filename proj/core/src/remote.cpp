#include "paperlink/remote.hpp"

#include <httplib.h>

#include "paperlink/error.hpp"

namespace paperlink {

namespace {

httplib::Client make_client(const ServiceEndpoint& endpoint) {
    if (endpoint.url.empty()) throw RemoteError("<unset>", "no endpoint configured");
    httplib::Client client(endpoint.url);
    if (!client.is_valid()) throw RemoteError(endpoint.url, "invalid endpoint URL");
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    return client;
}

std::string checked_body(const ServiceEndpoint& endpoint, const httplib::Result& res) {
    if (!res) {
        throw RemoteError(endpoint.url, "transport failure: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw RemoteError(endpoint.url, "HTTP status " + std::to_string(res->status) + ": " +
                                            res->body.substr(0, 200));
    }
    return res->body;
}

}  // namespace

std::string http_post_json(const ServiceEndpoint& endpoint, std::string_view path,
                           const std::string& body) {
    auto client = make_client(endpoint);
    auto res = client.Post(std::string(path), body, "application/json");
    return checked_body(endpoint, res);
}

std::string http_get(const ServiceEndpoint& endpoint, const std::string& target) {
    auto client = make_client(endpoint);
    auto res = client.Get(target);
    return checked_body(endpoint, res);
}

std::string url_encode(std::string_view text) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size() * 3);
    for (unsigned char c : text) {
        const bool unreserved = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                                (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.' ||
                                c == '~';
        if (unreserved) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0x0F]);
        }
    }
    return out;
}

}  // namespace paperlink
