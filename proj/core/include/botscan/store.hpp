#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "botscan/classifier.hpp"
#include "botscan/types.hpp"

namespace botscan {

inline constexpr std::string_view kPredictionsCsvHeader =
    "repository,login,num_comments,num_empty,num_patterns,gini,pattern_ratio,predicted,"
    "confidence,override,effective";

inline constexpr std::size_t kDefaultMinComments = 10;

struct PredictionRecord {
  RepoRef repo;
  std::string login;
  FeatureVector features;
  Label predicted = Label::unknown;
  double confidence = 0.0;
  std::optional<Label> override_label;
  Label effective = Label::unknown;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct RepoSummary {
  RepoRef repo;
  std::size_t total = 0;
  std::size_t bots = 0;
  std::size_t humans = 0;
  std::size_t unknowns = 0;

  friend bool operator==(const RepoSummary&, const RepoSummary&) = default;
};

using Records = std::vector<PredictionRecord>;

/// Rounds to the six decimals used by the predictions CSV, so that values
/// survive a persist/load round trip unchanged.
double quantize(double value);

nlohmann::json record_to_json(const PredictionRecord& record);
nlohmann::json summary_to_json(const RepoSummary& summary);

std::string render_predictions_csv(const Records& records);
Records parse_predictions_csv(std::string_view text, std::string_view source);
void persist_predictions(const Records& records, const std::filesystem::path& path);
Records load_predictions(const std::filesystem::path& path);

enum class OverrideAction { bot, human, clear };

std::optional<OverrideAction> parse_override_action(std::string_view text);
std::string_view to_string(OverrideAction action) noexcept;

/// Sets or clears the operator label of one record. Throws Error(not_found)
/// when (repo, login) is absent; the input is never modified.
Records apply_override(const Records& records, const RepoRef& repo, std::string_view login,
                       OverrideAction action);

struct OverrideEntry {
  RepoRef repo;
  std::string login;
  OverrideAction action = OverrideAction::clear;
};

/// Parses an overrides file with header `repository,login,override`.
std::vector<OverrideEntry> parse_overrides_csv(std::string_view text, std::string_view source);
std::vector<OverrideEntry> load_overrides(const std::filesystem::path& path);

/// canonical login -> alias logins
using AliasMap = std::map<std::string, std::set<std::string>>;

/// Parses lines of the form `canonical: alias1, alias2`. Blank lines and
/// lines starting with `#` are skipped.
AliasMap parse_alias_map(std::string_view text, std::string_view source);
AliasMap load_alias_map(const std::filesystem::path& path);

/// Collapses each alias group into one record per repository under the
/// canonical login. Counts are summed; gini and pattern_ratio are copied from
/// the constituent with the most comments, which approximates the values a
/// recomputation over the pooled comments would give. Throws
/// Error(invalid_argument) for overlapping groups.
Records merge_identities(const Records& records, const AliasMap& aliases);

/// One summary per repository by effective label, ordered by `owner/name`.
std::vector<RepoSummary> summarize(const Records& records);

/// Search-engine bulk format: one action line and one flat source document
/// per record.
std::string export_bulk_ndjson(const Records& records, std::string_view index_name,
                               Timestamp generated_at);

enum class ReportFormat { table, json };

std::string render_report(const std::vector<RepoSummary>& summaries, ReportFormat format);

}  // namespace botscan
