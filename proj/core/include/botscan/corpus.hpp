#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "botscan/types.hpp"

namespace botscan {

/// Header of the activity CSV hand-off file.
inline constexpr std::string_view kActivityCsvHeader =
    "repository,activity_type,number,author,created_at,body";

inline constexpr std::size_t kDefaultCommentCap = 100;

/// One account's in-window comments within one repository, normalized,
/// most recent first and capped.
struct ContributorProfile {
  RepoRef repo;
  std::string login;
  std::vector<std::string> comments;
  std::size_t total_observed = 0;

  friend bool operator==(const ContributorProfile&, const ContributorProfile&) = default;
};

std::string render_activity_csv(const std::vector<ActivityComment>& records);
void write_activity_csv(const std::vector<ActivityComment>& records,
                        const std::filesystem::path& destination);

/// The CSV carries no comment ids, so rows are numbered 1, 2, ... in file
/// order. Errors name `source` and the 1-based line.
std::vector<ActivityComment> parse_activity_csv(std::string_view text, std::string_view source);
std::vector<ActivityComment> read_activity_csv(const std::filesystem::path& source);

/// ASCII lowercase, trim, and collapse internal whitespace runs to one space.
std::string normalize_comment(std::string_view body);

/// Groups in-window records by (repo, author). Profiles come back ordered by
/// repo then login. Ties on created_at are broken by comment_id descending.
std::vector<ContributorProfile> build_profiles(const std::vector<ActivityComment>& records,
                                               const FetchWindow& window,
                                               std::size_t cap = kDefaultCommentCap);

}  // namespace botscan
