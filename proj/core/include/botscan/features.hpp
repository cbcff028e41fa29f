#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "botscan/corpus.hpp"

namespace botscan {

inline constexpr double kDefaultEps = 0.3;

/// Clusters of comment indices. Clusters are disjoint, cover 0..n-1 and are
/// ordered by their smallest index; indices inside a cluster are ascending.
struct PatternPartition {
  std::vector<std::vector<std::size_t>> clusters;

  friend bool operator==(const PatternPartition&, const PatternPartition&) = default;
};

inline constexpr std::size_t kFeatureCount = 5;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "num_comments", "num_empty", "num_patterns", "gini", "pattern_ratio"};

/// Index into kFeatureNames, or nullopt for an unknown name.
std::optional<std::size_t> feature_index(std::string_view name);

struct FeatureVector {
  std::size_t num_comments = 0;
  std::size_t num_empty = 0;
  std::size_t num_patterns = 0;
  double gini = 0.0;
  double pattern_ratio = 0.0;

  /// Value of dimension `index` (ordering of kFeatureNames).
  double value(std::size_t index) const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Decodes UTF-8 into code points. Invalid bytes decode as U+FFFD one byte at
/// a time, so every input has a well-defined length.
std::u32string decode_utf8(std::string_view text);

/// Unit-cost Levenshtein distance over code points divided by the longer
/// length. Zero when both inputs are empty.
double comment_distance(std::string_view a, std::string_view b);

/// Raw edit distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

/// True iff comment_distance(a, b) <= eps, computed with a banded dynamic
/// program that stops as soon as the threshold is out of reach.
bool within_distance(std::u32string_view a, std::u32string_view b, double eps);

/// Single-linkage clusters: connected components of the graph joining every
/// pair at distance <= eps. Throws Error(invalid_argument) unless eps is in
/// (0, 1].
PatternPartition cluster_patterns(std::span<const std::string> comments, double eps = kDefaultEps);

/// Mean absolute pairwise difference over twice the mean. Zero for fewer than
/// two sizes. Throws Error(invalid_argument) on a zero size.
double gini_inequality(std::span<const std::size_t> sizes);

FeatureVector extract_features(const ContributorProfile& profile, double eps = kDefaultEps);

}  // namespace botscan
