#include "botscan/github_fetcher.hpp"

#include <algorithm>
#include <charconv>
#include <future>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "botscan/atomic_file.hpp"
#include "botscan/error.hpp"

namespace botscan {

Timestamp SystemClock::now() {
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

void SystemClock::sleep_for(std::chrono::seconds duration) { std::this_thread::sleep_for(duration); }

namespace {

std::optional<long long> header_int(const HeaderMap& headers, const char* name) {
  auto it = headers.find(name);
  if (it == headers.end()) return std::nullopt;
  long long value = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

ThrottleDecision plan_throttle(int status, const HeaderMap& headers, int attempt, Timestamp now,
                               const ThrottlePolicy& policy) {
  using std::chrono::seconds;
  if ((status >= 200 && status < 300) || status == 304) return ThrottleDecision::proceed();

  std::optional<seconds> delay;
  const bool limited_status = status == 403 || status == 429;
  const auto remaining = header_int(headers, "x-ratelimit-remaining");
  const auto reset = header_int(headers, "x-ratelimit-reset");
  const auto retry_after = header_int(headers, "retry-after");

  if (limited_status && remaining == 0 && reset) {
    delay = seconds{*reset} - now.time_since_epoch() + policy.reset_margin;
  } else if (limited_status && retry_after) {
    delay = seconds{*retry_after};
  } else if (status == 429 || status == 500 || status == 502 || status == 503 || status == 504) {
    const int shift = std::clamp(attempt, 0, 30);
    delay = std::min(seconds{1LL << shift}, policy.max_backoff);
  }

  if (!delay) return ThrottleDecision::proceed();
  if (attempt >= policy.max_retries) return ThrottleDecision::abort();
  return ThrottleDecision::wait(std::max(*delay, seconds{1}));
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::io, "SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create cache directory '" + dir_.string() + "'");
}

std::filesystem::path ResponseCache::path_for(const std::string& url) const {
  return dir_ / (sha256_hex(url) + ".json");
}

std::optional<HttpResponse> ResponseCache::lookup(const std::string& url) const {
  const auto path = path_for(url);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    const auto doc = nlohmann::json::parse(read_file(path));
    if (doc.at("url").get<std::string>() != url) return std::nullopt;
    HttpResponse r;
    r.status = doc.at("status").get<int>();
    if (doc.contains("link") && doc["link"].is_string()) r.headers["link"] = doc["link"];
    r.body = doc.at("body").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // unreadable entries are refetched and overwritten
  }
}

void ResponseCache::store(const std::string& url, const HttpResponse& response) const {
  nlohmann::json doc = {{"url", url}, {"status", response.status}, {"body", response.body}};
  if (auto link = response.header("link")) doc["link"] = *link;
  write_file_atomic(path_for(url), doc.dump());
}

namespace {

// Serializes throttle planning and the waits it produces across workers.
class ThrottleCoordinator {
 public:
  ThrottleCoordinator(Clock& clock, const ThrottlePolicy& policy, FetchStats& stats)
      : clock_(clock), policy_(policy), stats_(stats) {}

  // Blocks while a planned wait is still in effect.
  void before_request() {
    std::lock_guard lock(mutex_);
    const auto now = clock_.now();
    if (blocked_until_ > now) clock_.sleep_for(blocked_until_ - now);
    ++stats_.network_requests;
  }

  ThrottleDecision after_response(const HttpResponse& response, int attempt) {
    std::lock_guard lock(mutex_);
    const auto now = clock_.now();
    auto decision = plan_throttle(response.status, response.headers, attempt, now, policy_);
    if (decision.action == ThrottleDecision::Action::wait) {
      stats_.waits.push_back(decision.delay);
      blocked_until_ = std::max(blocked_until_, now + decision.delay);
    }
    return decision;
  }

  void count_cache_hit() {
    std::lock_guard lock(mutex_);
    ++stats_.cache_hits;
  }

  void count_page() {
    std::lock_guard lock(mutex_);
    ++stats_.pages;
  }

 private:
  std::mutex mutex_;
  Clock& clock_;
  ThrottlePolicy policy_;
  FetchStats& stats_;
  Timestamp blocked_until_{};
};

enum class Endpoint { issue_comments, review_comments };

std::optional<std::string> next_link(const std::string& link_header) {
  // <https://...&page=2>; rel="next", <https://...&page=5>; rel="last"
  std::size_t pos = 0;
  while (pos < link_header.size()) {
    const auto open = link_header.find('<', pos);
    if (open == std::string::npos) break;
    const auto close = link_header.find('>', open);
    if (close == std::string::npos) break;
    const auto end = link_header.find(',', close);
    const auto params = link_header.substr(close + 1, end == std::string::npos ? std::string::npos
                                                                                 : end - close - 1);
    if (params.find("rel=\"next\"") != std::string::npos ||
        params.find("rel=next") != std::string::npos) {
      return link_header.substr(open + 1, close - open - 1);
    }
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return std::nullopt;
}

std::optional<std::int64_t> trailing_number(const std::string& url) {
  const auto slash = url.find_last_of('/');
  if (slash == std::string::npos) return std::nullopt;
  std::int64_t n = 0;
  const char* begin = url.data() + slash + 1;
  const char* end = url.data() + url.size();
  auto [ptr, ec] = std::from_chars(begin, end, n);
  if (ec != std::errc{} || ptr != end || n <= 0) return std::nullopt;
  return n;
}

class EndpointReader {
 public:
  EndpointReader(const FetchRequest& request, Endpoint endpoint, HttpTransport& transport,
                 ThrottleCoordinator& throttle, const std::optional<ResponseCache>& cache)
      : request_(request),
        endpoint_(endpoint),
        transport_(transport),
        throttle_(throttle),
        cache_(cache) {}

  std::vector<ActivityComment> read() {
    std::vector<ActivityComment> out;
    std::string url = first_page_url();
    std::size_t page = 1;
    while (true) {
      const HttpResponse response = get(url);
      throttle_.count_page();
      const auto items = parse_page(url, response.body);

      bool descending = true;
      bool all_before_window = !items.empty();
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i && items[i].created_at > items[i - 1].created_at) descending = false;
        if (items[i].created_at >= request_.window.since) all_before_window = false;
        if (request_.kinds.count(items[i].kind)) out.push_back(items[i]);
      }
      if (descending && all_before_window) break;

      const auto link = response.header("link");
      if (link) {
        auto next = next_link(*link);
        if (!next) break;
        url = *next;
      } else {
        if (items.size() < request_.per_page) break;
        ++page;
        url = page_url(page);
      }
    }
    return out;
  }

 private:
  std::string page_url(std::size_t page) const {
    std::string base = request_.base_url;
    while (!base.empty() && base.back() == '/') base.pop_back();
    const char* path = endpoint_ == Endpoint::issue_comments ? "/issues/comments" : "/pulls/comments";
    return base + "/repos/" + request_.repo.owner + "/" + request_.repo.name + path +
           "?sort=created&direction=desc&per_page=" + std::to_string(request_.per_page) +
           "&page=" + std::to_string(page);
  }

  std::string first_page_url() const { return page_url(1); }

  HttpResponse get(const std::string& url) {
    if (cache_) {
      if (auto hit = cache_->lookup(url)) {
        throttle_.count_cache_hit();
        return *hit;
      }
    }
    const RequestHeaders headers{{"Accept", "application/vnd.github+json"},
                                 {"Authorization", "Bearer " + request_.token},
                                 {"User-Agent", "botscan"},
                                 {"X-GitHub-Api-Version", "2022-11-28"}};
    for (int attempt = 0;; ++attempt) {
      throttle_.before_request();
      HttpResponse response = transport_.get(url, headers);
      const auto decision = throttle_.after_response(response, attempt);
      if (decision.action == ThrottleDecision::Action::wait) continue;
      if (decision.action == ThrottleDecision::Action::abort) {
        const bool limited = response.status == 403 || response.status == 429;
        throw Error(limited ? ErrorCode::rate_limited : ErrorCode::network,
                    "GET " + url + " still failing with status " +
                        std::to_string(response.status) + " after " + std::to_string(attempt) +
                        " retries");
      }
      check_status(url, response);
      if (cache_) cache_->store(url, response);
      return response;
    }
  }

  void check_status(const std::string& url, const HttpResponse& response) const {
    const int s = response.status;
    if (s >= 200 && s < 300) return;
    if (s == 401) {
      throw Error(ErrorCode::credential, "authentication rejected by " + url + " (401)");
    }
    if (s == 403) {
      throw Error(ErrorCode::credential, "access to " + request_.repo.str() + " forbidden (403)");
    }
    if (s == 404) {
      throw Error(ErrorCode::not_found, "repository " + request_.repo.str() + " not found (404)");
    }
    throw Error(ErrorCode::network, "GET " + url + " returned status " + std::to_string(s));
  }

  std::vector<ActivityComment> parse_page(const std::string& url, const std::string& body) const {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::malformed_response, url + ": body is not JSON: " + e.what());
    }
    if (!doc.is_array()) {
      throw Error(ErrorCode::malformed_response, url + ": expected a JSON array");
    }
    std::vector<ActivityComment> items;
    items.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const auto& item = doc[i];
      const auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::malformed_response,
                    url + ": item " + std::to_string(i) + ": " + what);
      };
      if (!item.is_object()) fail("expected an object");
      ActivityComment c;
      c.repo = request_.repo;

      auto id = item.find("id");
      if (id == item.end() || !id->is_number_integer()) fail("missing integer 'id'");
      c.comment_id = id->get<std::int64_t>();

      c.author = std::string(kGhostLogin);
      if (auto user = item.find("user"); user != item.end() && user->is_object()) {
        if (auto login = user->find("login"); login != user->end() && login->is_string() &&
                                               !login->get<std::string>().empty()) {
          c.author = login->get<std::string>();
        }
      }

      auto created = item.find("created_at");
      if (created == item.end() || !created->is_string()) fail("missing 'created_at'");
      auto ts = parse_timestamp(created->get<std::string>());
      if (!ts) fail("unparseable created_at '" + created->get<std::string>() + "'");
      c.created_at = *ts;

      if (auto b = item.find("body"); b != item.end() && b->is_string()) c.body = b->get<std::string>();

      const char* parent_key =
          endpoint_ == Endpoint::issue_comments ? "issue_url" : "pull_request_url";
      auto parent = item.find(parent_key);
      if (parent == item.end() || !parent->is_string()) {
        fail(std::string("missing '") + parent_key + "'");
      }
      auto number = trailing_number(parent->get<std::string>());
      if (!number) fail(std::string("cannot read number from '") + parent_key + "'");
      c.number = *number;

      if (endpoint_ == Endpoint::review_comments) {
        c.kind = ActivityKind::pull_request;
      } else {
        const auto html = item.value("html_url", std::string{});
        c.kind = html.find("/pull/") != std::string::npos ? ActivityKind::pull_request
                                                          : ActivityKind::issue;
      }
      items.push_back(std::move(c));
    }
    return items;
  }

  const FetchRequest& request_;
  Endpoint endpoint_;
  HttpTransport& transport_;
  ThrottleCoordinator& throttle_;
  const std::optional<ResponseCache>& cache_;
};

}  // namespace

std::vector<ActivityComment> GithubFetcher::fetch_comments(const FetchRequest& request,
                                                           FetchStats* stats) {
  if (request.token.empty()) throw Error(ErrorCode::credential, "GitHub token is empty");
  if (request.kinds.empty()) {
    throw Error(ErrorCode::invalid_argument, "at least one activity kind is required");
  }
  if (request.per_page == 0 || request.per_page > 100) {
    throw Error(ErrorCode::invalid_argument, "per_page must be between 1 and 100");
  }

  FetchStats local;
  FetchStats& counters = stats ? *stats : local;
  ThrottleCoordinator throttle(clock_, policy_, counters);
  std::optional<ResponseCache> cache;
  if (request.cache_dir) cache.emplace(*request.cache_dir);

  std::vector<Endpoint> endpoints{Endpoint::issue_comments};
  if (request.kinds.count(ActivityKind::pull_request) && request.include_review_comments) {
    endpoints.push_back(Endpoint::review_comments);
  }

  std::vector<std::future<std::vector<ActivityComment>>> workers;
  for (auto endpoint : endpoints) {
    workers.push_back(std::async(std::launch::async, [&, endpoint] {
      return EndpointReader(request, endpoint, transport_, throttle, cache).read();
    }));
  }

  std::vector<ActivityComment> all;
  std::exception_ptr failure;
  for (auto& w : workers) {
    try {
      auto part = w.get();
      all.insert(all.end(), std::make_move_iterator(part.begin()),
                 std::make_move_iterator(part.end()));
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::erase_if(all, [&](const ActivityComment& c) { return !request.window.contains(c.created_at); });
  std::stable_sort(all.begin(), all.end(), [](const ActivityComment& a, const ActivityComment& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.comment_id < b.comment_id;
  });
  std::unordered_set<std::int64_t> seen;
  std::erase_if(all, [&](const ActivityComment& c) { return !seen.insert(c.comment_id).second; });
  return all;
}

std::vector<ActivityComment> fetch_comments(const RepoRef& repo, const std::string& token,
                                            const FetchWindow& window,
                                            const std::set<ActivityKind>& kinds,
                                            const std::optional<std::filesystem::path>& cache_dir) {
  HttplibTransport transport;
  SystemClock clock;
  FetchRequest request;
  request.repo = repo;
  request.token = token;
  request.window = window;
  request.kinds = kinds;
  request.cache_dir = cache_dir;
  return GithubFetcher(transport, clock).fetch_comments(request);
}

}  // namespace botscan
