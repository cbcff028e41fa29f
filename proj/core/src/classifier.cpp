#include "botscan/classifier.hpp"

#include <algorithm>
#include <array>
#include <functional>

#include "botscan/atomic_file.hpp"
#include "botscan/error.hpp"

namespace botscan {

std::string_view to_string(Label label) noexcept {
  switch (label) {
    case Label::bot: return "bot";
    case Label::human: return "human";
    case Label::unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "bot") return Label::bot;
  if (text == "human") return Label::human;
  if (text == "unknown") return Label::unknown;
  return std::nullopt;
}

namespace {

void check_subtree(const TrainedModel& model, std::size_t index, std::size_t depth,
                   std::size_t& next_expected, std::size_t& max_depth) {
  if (depth > kMaxModelDepth) {
    throw Error(ErrorCode::data,
                "model depth exceeds limit of " + std::to_string(kMaxModelDepth));
  }
  if (index >= model.nodes.size() || index != next_expected) {
    throw Error(ErrorCode::data, "model node " + std::to_string(index) + " is out of order");
  }
  ++next_expected;
  max_depth = std::max(max_depth, depth);
  const TreeNode& node = model.nodes[index];
  if (node.kind == TreeNode::Kind::leaf) {
    if (node.counts.total() == 0) {
      throw Error(ErrorCode::data, "model leaf " + std::to_string(index) + " has no samples");
    }
    return;
  }
  if (node.feature >= model.feature_names.size()) {
    throw Error(ErrorCode::data, "model node " + std::to_string(index) +
                                     " references feature index " +
                                     std::to_string(node.feature));
  }
  check_subtree(model, node.left, depth + 1, next_expected, max_depth);
  check_subtree(model, node.right, depth + 1, next_expected, max_depth);
}

std::size_t subtree_depth(const TrainedModel& model, std::size_t index) {
  const TreeNode& node = model.nodes[index];
  if (node.kind == TreeNode::Kind::leaf) return 0;
  return 1 + std::max(subtree_depth(model, node.left), subtree_depth(model, node.right));
}

TreeNode leaf(std::uint64_t bot, std::uint64_t human) {
  TreeNode n;
  n.kind = TreeNode::Kind::leaf;
  n.counts = {bot, human};
  return n;
}

TreeNode split(std::size_t feature, double threshold, std::size_t left, std::size_t right) {
  TreeNode n;
  n.kind = TreeNode::Kind::split;
  n.feature = feature;
  n.threshold = threshold;
  n.left = left;
  n.right = right;
  return n;
}

}  // namespace

std::size_t TrainedModel::depth() const {
  if (nodes.empty()) return 0;
  return subtree_depth(*this, 0);
}

std::size_t TrainedModel::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.kind == TreeNode::Kind::leaf; }));
}

void TrainedModel::validate() const {
  if (feature_names.size() != kFeatureCount) {
    throw Error(ErrorCode::data, "model must name " + std::to_string(kFeatureCount) +
                                     " features, found " + std::to_string(feature_names.size()));
  }
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (!feature_index(feature_names[i])) {
      throw Error(ErrorCode::data, "feature_names[" + std::to_string(i) + "]: unknown feature '" +
                                       feature_names[i] + "'");
    }
  }
  if (nodes.empty()) throw Error(ErrorCode::data, "model has no nodes");
  std::size_t next = 0;
  std::size_t max_depth = 0;
  check_subtree(*this, 0, 0, next, max_depth);
  if (next != nodes.size()) {
    throw Error(ErrorCode::data, "model has unreachable nodes");
  }
}

TrainedModel default_model() {
  TrainedModel m;
  m.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
  // Preorder: n0, its leaf, n1, its leaf, n2, its leaf, n3, two leaves.
  m.nodes = {
      split(0, 10.0, 1, 2),   // num_comments
      leaf(1, 9),
      split(4, 0.15, 3, 4),   // pattern_ratio
      leaf(9, 1),
      split(3, 0.6, 5, 6),    // gini
      leaf(2, 8),
      split(2, 6.0, 7, 8),    // num_patterns
      leaf(7, 3),
      leaf(3, 7),
  };
  return m;
}

TypedPrediction predict(const TrainedModel& model, const FeatureVector& fv) {
  if (model.nodes.empty()) throw Error(ErrorCode::data, "model has no nodes");
  std::size_t index = 0;
  for (std::size_t steps = 0;; ++steps) {
    if (index >= model.nodes.size() || steps > model.nodes.size()) {
      throw Error(ErrorCode::data, "model tree is malformed");
    }
    const TreeNode& node = model.nodes[index];
    if (node.kind == TreeNode::Kind::leaf) {
      if (node.counts.total() == 0) throw Error(ErrorCode::data, "model leaf has no samples");
      const bool bot = node.counts.bot > node.counts.human;
      const auto majority = bot ? node.counts.bot : node.counts.human;
      return {bot ? Label::bot : Label::human,
              static_cast<double>(majority) / static_cast<double>(node.counts.total())};
    }
    if (node.feature >= model.feature_names.size()) {
      throw Error(ErrorCode::data, "model references feature index " + std::to_string(node.feature));
    }
    const auto& name = model.feature_names[node.feature];
    const auto dim = feature_index(name);
    if (!dim) throw Error(ErrorCode::data, "model references unknown feature '" + name + "'");
    index = fv.value(*dim) < node.threshold ? node.left : node.right;
  }
}

namespace {

__extension__ using Wide = unsigned __int128;

// Score of a split is sum over children of (bots^2 + humans^2) / size; a
// larger score means a lower weighted Gini impurity. Kept as an exact
// fraction so that ties are detected without rounding.
struct SplitScore {
  Wide numerator = 0;
  Wide denominator = 1;

  static SplitScore of(const ClassCounts& l, const ClassCounts& r) {
    const Wide sl = Wide{l.bot} * l.bot + Wide{l.human} * l.human;
    const Wide sr = Wide{r.bot} * r.bot + Wide{r.human} * r.human;
    return {sl * r.total() + sr * l.total(), Wide{l.total()} * r.total()};
  }

  bool better_than(const SplitScore& other) const {
    return numerator * other.denominator > other.numerator * denominator;
  }
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<LabeledSample>& data, const TrainParams& params)
      : data_(data), params_(params) {
    values_.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      for (std::size_t f = 0; f < kFeatureCount; ++f) values_[i][f] = data[i].features.value(f);
    }
  }

  std::vector<TreeNode> build() {
    std::vector<std::size_t> all(data_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    grow(all, 0);
    return std::move(nodes_);
  }

 private:
  ClassCounts count(const std::vector<std::size_t>& rows) const {
    ClassCounts c;
    for (auto r : rows) (data_[r].label == Label::bot ? c.bot : c.human) += 1;
    return c;
  }

  std::size_t grow(const std::vector<std::size_t>& rows, std::size_t depth) {
    const std::size_t self = nodes_.size();
    const ClassCounts counts = count(rows);
    nodes_.push_back(leaf(counts.bot, counts.human));

    const bool pure = counts.bot == 0 || counts.human == 0;
    if (pure || depth >= params_.max_depth) return self;

    bool found = false;
    SplitScore best;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;

    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      std::vector<std::size_t> order = rows;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return values_[a][f] < values_[b][f]; });
      ClassCounts left;
      ClassCounts right = counts;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const bool bot = data_[order[i]].label == Label::bot;
        (bot ? left.bot : left.human) += 1;
        (bot ? right.bot : right.human) -= 1;
        const double lo = values_[order[i]][f];
        const double hi = values_[order[i + 1]][f];
        if (!(lo < hi)) continue;
        if (left.total() < params_.min_leaf || right.total() < params_.min_leaf) continue;
        double threshold = lo + (hi - lo) / 2;
        if (!(threshold > lo)) threshold = hi;
        const SplitScore score = SplitScore::of(left, right);
        if (!found || score.better_than(best)) {
          found = true;
          best = score;
          best_feature = f;
          best_threshold = threshold;
        }
      }
    }
    if (!found) return self;

    std::vector<std::size_t> lhs, rhs;
    for (auto r : rows) (values_[r][best_feature] < best_threshold ? lhs : rhs).push_back(r);
    const std::size_t l = grow(lhs, depth + 1);
    const std::size_t r = grow(rhs, depth + 1);
    nodes_[self] = split(best_feature, best_threshold, l, r);
    return self;
  }

  const std::vector<LabeledSample>& data_;
  TrainParams params_;
  std::vector<std::array<double, kFeatureCount>> values_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

TrainedModel train_tree(const std::vector<LabeledSample>& dataset, const TrainParams& params) {
  if (dataset.empty()) throw Error(ErrorCode::data, "training dataset is empty");
  if (params.min_leaf == 0) throw Error(ErrorCode::invalid_argument, "min_leaf must be at least 1");
  if (params.max_depth > kMaxModelDepth) {
    throw Error(ErrorCode::invalid_argument,
                "max_depth must not exceed " + std::to_string(kMaxModelDepth));
  }
  for (const auto& s : dataset) {
    if (s.label == Label::unknown) {
      throw Error(ErrorCode::data, "training labels must be bot or human");
    }
  }
  TrainedModel model;
  model.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
  model.nodes = TreeBuilder(dataset, params).build();
  return model;
}

namespace {

nlohmann::json node_to_json(const TrainedModel& model, std::size_t index) {
  const TreeNode& n = model.nodes.at(index);
  if (n.kind == TreeNode::Kind::leaf) {
    return {{"kind", "leaf"}, {"counts", {{"bot", n.counts.bot}, {"human", n.counts.human}}}};
  }
  return {{"kind", "split"},
          {"feature", n.feature},
          {"threshold", n.threshold},
          {"left", node_to_json(model, n.left)},
          {"right", node_to_json(model, n.right)}};
}

[[noreturn]] void malformed(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::parse, "model " + where + ": " + what);
}

const nlohmann::json& member(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) malformed(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) malformed(where, std::string("missing '") + key + "'");
  return *it;
}

std::uint64_t count_field(const nlohmann::json& counts, const char* key, const std::string& where) {
  const auto& v = member(counts, key, where);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    malformed(where + "." + key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

void node_from_json(const nlohmann::json& doc, const std::string& where, std::size_t depth,
                    std::vector<TreeNode>& out) {
  if (depth > kMaxModelDepth) {
    throw Error(ErrorCode::data, "model depth exceeds limit of " + std::to_string(kMaxModelDepth));
  }
  const auto& kind = member(doc, "kind", where);
  if (kind == "leaf") {
    const auto& counts = member(doc, "counts", where);
    const std::string cw = where + ".counts";
    out.push_back(leaf(count_field(counts, "bot", cw), count_field(counts, "human", cw)));
    return;
  }
  if (kind != "split") malformed(where + ".kind", "expected \"split\" or \"leaf\"");
  const auto& feature = member(doc, "feature", where);
  if (!feature.is_number_integer() || feature.get<std::int64_t>() < 0) {
    malformed(where + ".feature", "expected a non-negative integer");
  }
  const auto& threshold = member(doc, "threshold", where);
  if (!threshold.is_number()) malformed(where + ".threshold", "expected a number");

  const std::size_t self = out.size();
  out.push_back(split(feature.get<std::size_t>(), threshold.get<double>(), 0, 0));
  out[self].left = out.size();
  node_from_json(member(doc, "left", where), where + ".left", depth + 1, out);
  out[self].right = out.size();
  node_from_json(member(doc, "right", where), where + ".right", depth + 1, out);
}

}  // namespace

nlohmann::json model_to_json(const TrainedModel& model) {
  if (model.nodes.empty()) throw Error(ErrorCode::data, "model has no nodes");
  return {{"feature_names", model.feature_names}, {"root", node_to_json(model, 0)}};
}

TrainedModel model_from_json(const nlohmann::json& doc) {
  TrainedModel model;
  const auto& names = member(doc, "feature_names", "document");
  if (!names.is_array()) malformed("feature_names", "expected an array");
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!names[i].is_string()) {
      malformed("feature_names[" + std::to_string(i) + "]", "expected a string");
    }
    model.feature_names.push_back(names[i].get<std::string>());
  }
  node_from_json(member(doc, "root", "document"), "root", 0, model.nodes);
  model.validate();
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(model).dump(2) + "\n");
}

TrainedModel load_model(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse, path.string() + ": malformed model document: " + e.what());
  }
  try {
    return model_from_json(doc);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace botscan
