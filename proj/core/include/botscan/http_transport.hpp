#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace botscan {

/// Header names are stored lower-cased.
using HeaderMap = std::map<std::string, std::string>;
using RequestHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  HeaderMap headers;
  std::string body;

  std::optional<std::string> header(std::string_view name) const;
};

/// Blocking GET. Implementations must be safe to call from several threads;
/// connection failures throw Error(network).
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url, const RequestHeaders& headers) = 0;
};

/// cpp-httplib backed transport supporting http:// and https:// URLs.
class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds{30})
      : timeout_(timeout) {}

  HttpResponse get(const std::string& url, const RequestHeaders& headers) override;

 private:
  std::chrono::seconds timeout_;
};

/// Splits `scheme://host[:port]/path?query` into origin and path-with-query.
/// Throws Error(invalid_argument) for anything else.
std::pair<std::string, std::string> split_url(std::string_view url);

}  // namespace botscan
