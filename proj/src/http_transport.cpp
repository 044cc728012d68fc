#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <regex>

#include "argkg/error.hpp"
#include "argkg/wikidata.hpp"

namespace argkg {

namespace {

class HttpTransport : public Transport {
 public:
  HttpResponse send(const HttpRequest& request) override {
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(request.url, m, url_re)) {
      throw TransportError("unsupported endpoint URL " + request.url);
    }
    std::string base = m[1];
    std::string path = m[2].matched ? m[2].str() : "/";

    httplib::Client cli(base);
    auto secs = static_cast<time_t>(request.timeout_seconds);
    auto usecs = static_cast<time_t>((request.timeout_seconds - secs) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_follow_location(true);
    httplib::Headers headers = {{"Accept", "application/sparql-results+json"},
                                {"User-Agent", request.user_agent}};
    httplib::Params params = {{"query", request.query}};
    auto res = cli.Post(path, headers, params);
    if (!res) {
      throw TransportError("request to " + request.url + " failed: " +
                           httplib::to_string(res.error()));
    }
    return {res->status, res->body};
  }
};

}  // namespace

std::unique_ptr<Transport> make_http_transport() {
  return std::make_unique<HttpTransport>();
}

}  // namespace argkg
