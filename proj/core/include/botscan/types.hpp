#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace botscan {

/// UTC instant with one-second resolution.
using Timestamp = std::chrono::sys_seconds;

/// Parses an ISO-8601 timestamp. Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM:SS`
/// with optional fractional seconds and a `Z` or `+HH:MM` / `-HH:MM` suffix.
/// A missing suffix is read as UTC. Fractional seconds are truncated.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Parses like parse_timestamp but throws Error(parse) on failure.
Timestamp parse_timestamp_or_throw(std::string_view text);

/// Canonical rendering: `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(Timestamp ts);

struct RepoRef {
  std::string owner;
  std::string name;

  /// Parses `owner/name`. Throws Error(invalid_argument) when either part is
  /// empty or contains a slash.
  static RepoRef parse(std::string_view text);

  std::string str() const { return owner + "/" + name; }

  friend auto operator<=>(const RepoRef&, const RepoRef&) = default;
};

/// Half-open interval [since, until).
struct FetchWindow {
  Timestamp since;
  Timestamp until;

  /// Throws Error(invalid_argument) unless since < until.
  FetchWindow(Timestamp since_, Timestamp until_);

  /// Window covering every representable timestamp this tool deals with.
  static FetchWindow unbounded();

  bool contains(Timestamp ts) const { return ts >= since && ts < until; }

  friend bool operator==(const FetchWindow&, const FetchWindow&) = default;
};

enum class ActivityKind { issue, pull_request };

std::string_view to_string(ActivityKind kind) noexcept;
std::optional<ActivityKind> parse_activity_kind(std::string_view text);

struct ActivityComment {
  RepoRef repo;
  ActivityKind kind = ActivityKind::issue;
  std::int64_t number = 0;
  std::int64_t comment_id = 0;
  std::string author;
  Timestamp created_at{};
  std::string body;

  friend bool operator==(const ActivityComment&, const ActivityComment&) = default;
};

/// Login used for comments whose author account no longer exists.
inline constexpr std::string_view kGhostLogin = "ghost";

}  // namespace botscan
