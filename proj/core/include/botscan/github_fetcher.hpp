#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "botscan/http_transport.hpp"
#include "botscan/types.hpp"

namespace botscan {

inline constexpr std::string_view kDefaultGithubApiUrl = "https://api.github.com";

/// Time source for retrieval. Tests inject a fake so that planned waits are
/// recorded instead of slept.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() = 0;
  virtual void sleep_for(std::chrono::seconds duration) = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() override;
  void sleep_for(std::chrono::seconds duration) override;
};

struct ThrottleDecision {
  enum class Action { proceed, wait, abort };

  Action action = Action::proceed;
  std::chrono::seconds delay{0};

  static ThrottleDecision proceed() { return {}; }
  static ThrottleDecision wait(std::chrono::seconds d) { return {Action::wait, d}; }
  static ThrottleDecision abort() { return {Action::abort, std::chrono::seconds{0}}; }

  friend bool operator==(const ThrottleDecision&, const ThrottleDecision&) = default;
};

struct ThrottlePolicy {
  int max_retries = 5;
  std::chrono::seconds max_backoff{60};
  std::chrono::seconds reset_margin{1};
};

/// Decides what to do after a response. Successes proceed; an exhausted
/// rate budget waits until the reset time plus the margin; a Retry-After
/// header is honoured; 5xx responses back off 2^attempt seconds up to the
/// cap; any wait planned at or past the retry budget becomes abort. Other
/// statuses proceed so the caller can report them. Waits are always >= 1 s.
ThrottleDecision plan_throttle(int status, const HeaderMap& headers, int attempt, Timestamp now,
                               const ThrottlePolicy& policy = {});

/// On-disk response cache: one JSON file per request URL, named by the
/// SHA-256 of the URL, holding status, pagination link and body.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<HttpResponse> lookup(const std::string& url) const;
  void store(const std::string& url, const HttpResponse& response) const;

  std::filesystem::path path_for(const std::string& url) const;

 private:
  std::filesystem::path dir_;
};

/// Hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

struct FetchRequest {
  RepoRef repo;
  std::string token;
  FetchWindow window = FetchWindow::unbounded();
  std::set<ActivityKind> kinds{ActivityKind::issue, ActivityKind::pull_request};
  std::optional<std::filesystem::path> cache_dir;
  bool include_review_comments = true;
  std::size_t per_page = 100;
  std::string base_url{kDefaultGithubApiUrl};
};

struct FetchStats {
  std::size_t network_requests = 0;
  std::size_t cache_hits = 0;
  std::size_t pages = 0;
  std::vector<std::chrono::seconds> waits;
};

/// Retrieves issue and pull-request comments. Issue-style comments come
/// from /issues/comments (PR conversations included, told apart by their
/// html_url), inline review comments from /pulls/comments. Both endpoints
/// are read newest-first and may run concurrently; throttling for both goes
/// through one coordinator.
class GithubFetcher {
 public:
  GithubFetcher(HttpTransport& transport, Clock& clock, ThrottlePolicy policy = {})
      : transport_(transport), clock_(clock), policy_(policy) {}

  /// Every in-window comment of the requested kinds, deduplicated by
  /// comment_id and sorted by (created_at, comment_id). Throws
  /// Error(credential | not_found | rate_limited | network |
  /// malformed_response).
  std::vector<ActivityComment> fetch_comments(const FetchRequest& request,
                                              FetchStats* stats = nullptr);

 private:
  HttpTransport& transport_;
  Clock& clock_;
  ThrottlePolicy policy_;
};

/// Convenience wrapper over GithubFetcher with the httplib transport and the
/// system clock.
std::vector<ActivityComment> fetch_comments(const RepoRef& repo, const std::string& token,
                                            const FetchWindow& window,
                                            const std::set<ActivityKind>& kinds,
                                            const std::optional<std::filesystem::path>& cache_dir);

}  // namespace botscan
