#include "botscan/http_transport.hpp"

#include <algorithm>
#include <cctype>

#include <httplib.h>

#include "botscan/error.hpp"

namespace botscan {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::optional<std::string> HttpResponse::header(std::string_view name) const {
  auto it = headers.find(lower(name));
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

std::pair<std::string, std::string> split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorCode::invalid_argument, "not an absolute URL: '" + std::string(url) + "'");
  }
  const auto scheme = lower(url.substr(0, scheme_end));
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::invalid_argument, "unsupported URL scheme '" + scheme + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

HttpResponse HttplibTransport::get(const std::string& url, const RequestHeaders& headers) {
  const auto [origin, target] = split_url(url);
  httplib::Client client(origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);

  httplib::Headers request_headers;
  for (const auto& [k, v] : headers) request_headers.emplace(k, v);

  auto result = client.Get(target, request_headers);
  if (!result) {
    throw Error(ErrorCode::network,
                "GET " + origin + target + " failed: " + httplib::to_string(result.error()));
  }
  HttpResponse response;
  response.status = result->status;
  response.body = result->body;
  for (const auto& [k, v] : result->headers) response.headers[lower(k)] = v;
  return response;
}

}  // namespace botscan
