#include <httplib.h>

#include "aibom/vulnerability.hpp"

namespace aibom {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // /path?query
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw DomainError("not an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

  HttpResponse get(const std::string& url, const std::map<std::string, std::string>& headers) override {
    return send(url, [&](httplib::Client& c, const std::string& path, const httplib::Headers& h) {
      return c.Get(path, h);
    }, headers);
  }

  HttpResponse post(const std::string& url, const std::string& body,
                    const std::map<std::string, std::string>& headers) override {
    std::string content_type = "application/json";
    if (auto it = headers.find("Content-Type"); it != headers.end()) content_type = it->second;
    return send(url, [&](httplib::Client& c, const std::string& path, const httplib::Headers& h) {
      return c.Post(path, h, body, content_type);
    }, headers);
  }

 private:
  template <typename Fn>
  HttpResponse send(const std::string& url, Fn fn, const std::map<std::string, std::string>& headers) {
    const auto parts = split_url(url);
    httplib::Client client(parts.origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_follow_location(true);
    httplib::Headers h;
    for (const auto& [k, v] : headers)
      if (k != "Content-Type") h.emplace(k, v);
    auto result = fn(client, parts.path, h);
    if (!result) return {0, {}, httplib::to_string(result.error())};
    return {result->status, result->body, {}};
  }

  std::chrono::seconds timeout_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout) {
  return std::make_unique<HttplibTransport>(timeout);
}

}  // namespace aibom
