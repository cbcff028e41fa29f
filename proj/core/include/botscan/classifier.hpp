#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "botscan/features.hpp"

namespace botscan {

enum class Label { bot, human, unknown };

std::string_view to_string(Label label) noexcept;
std::optional<Label> parse_label(std::string_view text);

struct ClassCounts {
  std::uint64_t bot = 0;
  std::uint64_t human = 0;

  std::uint64_t total() const { return bot + human; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

/// Tree node stored in a preorder arena. Splits send a sample left when its
/// feature value is strictly below the threshold.
struct TreeNode {
  enum class Kind { split, leaf };

  Kind kind = Kind::leaf;
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  ClassCounts counts;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

inline constexpr std::size_t kMaxModelDepth = 32;

/// Binary decision tree over the feature dimensions named in feature_names.
/// nodes[0] is the root and nodes appear in preorder.
struct TrainedModel {
  std::vector<std::string> feature_names;
  std::vector<TreeNode> nodes;

  std::size_t depth() const;
  std::size_t leaf_count() const;

  /// Throws Error(data) if a feature name is unknown, an index or child
  /// reference is out of range, a leaf is empty, or the depth exceeds
  /// kMaxModelDepth.
  void validate() const;

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

struct TypedPrediction {
  Label label = Label::human;
  double confidence = 0.0;

  friend bool operator==(const TypedPrediction&, const TypedPrediction&) = default;
};

/// The built-in tree. Its thresholds and leaf counts are hand-authored
/// constants, not values fitted to any measured dataset.
TrainedModel default_model();

/// Majority class at the reached leaf, ties resolving to human; confidence is
/// majority / total at that leaf.
TypedPrediction predict(const TrainedModel& model, const FeatureVector& fv);

struct LabeledSample {
  FeatureVector features;
  Label label = Label::human;
};

struct TrainParams {
  std::size_t max_depth = 4;
  std::size_t min_leaf = 2;
};

/// Greedy CART growth minimizing weighted Gini impurity. Candidate thresholds
/// are midpoints between consecutive distinct values; ties go to the lowest
/// feature index, then the lowest threshold.
TrainedModel train_tree(const std::vector<LabeledSample>& dataset, const TrainParams& params = {});

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& doc);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace botscan
