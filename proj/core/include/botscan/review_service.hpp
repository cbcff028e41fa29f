#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "botscan/store.hpp"

namespace botscan {

inline constexpr std::size_t kSampleCommentCount = 5;

/// Predictions held in memory and backed by the predictions CSV. Reads see an
/// immutable snapshot; overrides go through one writer at a time and are
/// persisted before the new snapshot is published.
class ReviewStore {
 public:
  explicit ReviewStore(std::filesystem::path predictions_csv,
                       std::optional<std::filesystem::path> activity_csv = std::nullopt);

  std::shared_ptr<const Records> snapshot() const;

  /// Applies an override, rewrites the CSV atomically and returns the
  /// updated record. Throws Error(not_found) for an unknown contributor.
  PredictionRecord apply(const RepoRef& repo, std::string_view login, OverrideAction action);

  /// Most recent normalized comments of a contributor, empty when no
  /// activity file was given.
  std::vector<std::string> samples(const RepoRef& repo, const std::string& login) const;

 private:
  std::filesystem::path path_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Records> snapshot_;
  std::mutex writer_mutex_;
  std::map<std::pair<RepoRef, std::string>, std::vector<std::string>> samples_;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// Request handlers for the review API, independent of the HTTP server.
class ReviewService {
 public:
  explicit ReviewService(ReviewStore& store) : store_(store) {}

  /// GET /api/repos
  ApiResponse get_summaries() const;

  /// GET /api/repos/{owner}/{name}/contributors?type=&sort=
  ApiResponse get_contributors(const std::string& owner, const std::string& name,
                               const std::optional<std::string>& type,
                               const std::optional<std::string>& sort) const;

  /// POST /api/overrides with {"repository","login","type"}.
  ApiResponse post_override(std::string_view body);

 private:
  ReviewStore& store_;
};

/// HTTP/1.1 front end: the three API routes, permissive CORS and optional
/// static files for the dashboard.
class ReviewServer {
 public:
  ReviewServer(ReviewService& service, std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Binds and returns the port; pass 0 for an ephemeral one.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace botscan
