#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "botscan/classifier.hpp"
#include "botscan/error.hpp"
#include "temp_dir.hpp"

namespace botscan {
namespace {

FeatureVector fv(std::size_t n, std::size_t empty, std::size_t patterns, double gini, double ratio) {
  return {n, empty, patterns, gini, ratio};
}

TEST(DefaultModel, Shape) {
  const auto model = default_model();
  EXPECT_NO_THROW(model.validate());
  EXPECT_EQ(model.depth(), 4u);
  EXPECT_EQ(model.leaf_count(), 5u);
  EXPECT_EQ(model.feature_names,
            (std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end())));
}

TEST(DefaultModel, Traces) {
  const auto model = default_model();
  EXPECT_EQ(predict(model, fv(120, 0, 3, 0.72, 0.025)), (TypedPrediction{Label::bot, 0.9}));
  EXPECT_EQ(predict(model, fv(4, 0, 4, 0.0, 1.0)), (TypedPrediction{Label::human, 0.9}));
  EXPECT_EQ(predict(model, fv(50, 0, 30, 0.2, 0.6)), (TypedPrediction{Label::human, 0.8}));
  EXPECT_EQ(predict(model, fv(50, 0, 3, 0.7, 0.06)).label, Label::bot);
}

TEST(Predict, TieResolvesToHuman) {
  TrainedModel model{{kFeatureNames.begin(), kFeatureNames.end()}, {}};
  TreeNode leaf;
  leaf.counts = {3, 3};
  model.nodes.push_back(leaf);
  EXPECT_EQ(predict(model, FeatureVector{}), (TypedPrediction{Label::human, 0.5}));
}

TEST(Predict, ReorderedFeatureNamesAreHonoured) {
  TrainedModel model{{"pattern_ratio", "gini", "num_patterns", "num_empty", "num_comments"}, {}};
  TreeNode root;
  root.kind = TreeNode::Kind::split;
  root.feature = 0;
  root.threshold = 0.5;
  root.left = 1;
  root.right = 2;
  TreeNode bot;
  bot.counts = {4, 0};
  TreeNode human;
  human.counts = {0, 4};
  model.nodes = {root, bot, human};
  EXPECT_EQ(predict(model, fv(0, 0, 0, 0, 0.1)).label, Label::bot);
  EXPECT_EQ(predict(model, fv(0, 0, 0, 0, 0.9)).label, Label::human);
}

std::vector<LabeledSample> separable_dataset() {
  std::vector<LabeledSample> data;
  for (int i = 0; i < 4; ++i) data.push_back({fv(50, 0, 3, 0.5, 0.05), Label::bot});
  for (int i = 0; i < 4; ++i) data.push_back({fv(50, 0, 3, 0.5, 0.5), Label::human});
  return data;
}

TEST(TrainTree, SingleClassGivesOneLeaf) {
  std::vector<LabeledSample> data(6, LabeledSample{fv(20, 1, 20, 0, 1), Label::human});
  data[2].features.num_comments = 40;
  const auto model = train_tree(data);
  ASSERT_EQ(model.nodes.size(), 1u);
  EXPECT_EQ(model.nodes[0].counts, (ClassCounts{0, 6}));
  EXPECT_EQ(predict(model, fv(1, 1, 1, 0, 0)), (TypedPrediction{Label::human, 1.0}));
}

TEST(TrainTree, SeparatesOnPatternRatio) {
  const auto data = separable_dataset();
  const auto model = train_tree(data);
  EXPECT_EQ(model.depth(), 1u);
  ASSERT_EQ(model.nodes.size(), 3u);
  EXPECT_EQ(model.nodes[0].feature, 4u);
  EXPECT_DOUBLE_EQ(model.nodes[0].threshold, 0.275);
  for (const auto& s : data) EXPECT_EQ(predict(model, s.features).label, s.label);
}

TEST(TrainTree, IdenticalVectorsGiveMixedLeaf) {
  std::vector<LabeledSample> data{{fv(30, 0, 2, 0.4, 0.1), Label::bot},
                                  {fv(30, 0, 2, 0.4, 0.1), Label::human}};
  const auto model = train_tree(data, {4, 1});
  ASSERT_EQ(model.nodes.size(), 1u);
  EXPECT_EQ(predict(model, data[0].features), (TypedPrediction{Label::human, 0.5}));
}

TEST(TrainTree, RejectsBadInput) {
  EXPECT_THROW(train_tree({}), Error);
  EXPECT_THROW(train_tree(separable_dataset(), {4, 0}), Error);
  EXPECT_THROW(train_tree(separable_dataset(), {kMaxModelDepth + 1, 2}), Error);
  auto data = separable_dataset();
  data[0].label = Label::unknown;
  try {
    train_tree(data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::data);
  }
}

TEST(TrainTree, RespectsMinLeafAndDepth) {
  std::mt19937 rng(7);
  std::vector<LabeledSample> data;
  for (int i = 0; i < 60; ++i) {
    data.push_back({fv(rng() % 100, rng() % 5, rng() % 40 + 1, (rng() % 100) / 100.0,
                       (rng() % 100) / 100.0),
                    rng() % 2 ? Label::bot : Label::human});
  }
  const auto model = train_tree(data, {3, 5});
  EXPECT_LE(model.depth(), 3u);
  for (const auto& node : model.nodes) {
    if (node.kind == TreeNode::Kind::leaf) {
      EXPECT_GE(node.counts.total(), 5u);
    }
  }
}

TEST(TrainTree, Properties) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LabeledSample> data;
    const int n = static_cast<int>(rng() % 40) + 2;
    for (int i = 0; i < n; ++i) {
      const bool bot = rng() % 2;
      // Bots sit strictly below 0.3 pattern_ratio, humans strictly above.
      const double ratio = bot ? (rng() % 30) / 100.0 : 0.31 + (rng() % 69) / 100.0;
      data.push_back({fv(rng() % 200, rng() % 4, rng() % 50 + 1, (rng() % 100) / 100.0, ratio),
                      bot ? Label::bot : Label::human});
    }
    const auto model = train_tree(data, {4, 1});

    std::uint64_t leaf_total = 0;
    for (const auto& node : model.nodes) {
      if (node.kind == TreeNode::Kind::leaf) leaf_total += node.counts.total();
    }
    EXPECT_EQ(leaf_total, data.size());

    for (const auto& s : data) EXPECT_EQ(predict(model, s.features).label, s.label);

    for (const auto& node : model.nodes) {
      if (node.kind != TreeNode::Kind::leaf) continue;
      TrainedModel single{model.feature_names, {node}};
      const auto p = predict(single, FeatureVector{});
      const Label argmax = node.counts.bot > node.counts.human ? Label::bot : Label::human;
      EXPECT_EQ(p.label, argmax);
    }
  }
}

TEST(ModelIo, RoundTrip) {
  testing::TempDir dir;
  const auto path = dir / "model.json";
  for (const auto& model : {default_model(), train_tree(separable_dataset())}) {
    save_model(model, path);
    EXPECT_EQ(load_model(path), model);
  }
  EXPECT_EQ(model_from_json(model_to_json(default_model())), default_model());
}

TEST(ModelIo, UnknownFeatureNameIsNamed) {
  auto doc = model_to_json(default_model());
  doc["feature_names"][2] = "num_likes";
  testing::TempDir dir;
  const auto path = dir / "model.json";
  std::ofstream(path) << doc.dump();
  try {
    load_model(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::data);
    EXPECT_NE(std::string(e.what()).find("feature_names[2]"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("num_likes"), std::string::npos);
  }
}

TEST(ModelIo, MalformedDocuments) {
  testing::TempDir dir;
  const auto path = dir / "model.json";
  std::ofstream(path) << "{not json";
  EXPECT_THROW(load_model(path), Error);
  EXPECT_THROW(load_model(dir / "absent.json"), Error);

  auto doc = model_to_json(default_model());
  doc["root"]["kind"] = "branch";
  EXPECT_THROW(model_from_json(doc), Error);
}

TEST(ModelIo, DepthLimit) {
  nlohmann::json node = {{"kind", "leaf"}, {"counts", {{"bot", 1}, {"human", 0}}}};
  for (std::size_t d = 0; d <= kMaxModelDepth; ++d) {
    node = {{"kind", "split"}, {"feature", 0}, {"threshold", 1.0}, {"left", node},
            {"right", {{"kind", "leaf"}, {"counts", {{"bot", 0}, {"human", 1}}}}}};
  }
  const nlohmann::json doc = {{"feature_names", kFeatureNames}, {"root", node}};
  try {
    model_from_json(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::data);
  }
}

TEST(Label, Parse) {
  EXPECT_EQ(parse_label("bot"), Label::bot);
  EXPECT_EQ(parse_label("unknown"), Label::unknown);
  EXPECT_FALSE(parse_label("robot"));
  EXPECT_EQ(to_string(Label::human), "human");
}

}  // namespace
}  // namespace botscan
