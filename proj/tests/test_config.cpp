#include <gtest/gtest.h>

#include <filesystem>

#include "argreframe/config.hpp"
#include "test_support.hpp"

using namespace argreframe;

TEST(Config, ParsesCommentsAndWhitespace) {
  auto c = PipelineConfig::parse("# comment\n\n  epochs =  7 \nsystem=all\n  # indented comment\n");
  EXPECT_EQ(c.get_int("epochs", 0), 7);
  EXPECT_EQ(c.get("system"), "all");
  EXPECT_EQ(c.values().size(), 2u);
}

TEST(Config, Errors) {
  EXPECT_THROW(PipelineConfig::parse("epochs 7\n"), ConfigError);
  EXPECT_THROW(PipelineConfig::parse("colour = red\n"), ConfigError);
  EXPECT_THROW(PipelineConfig::load("/nonexistent/x.conf"), ConfigError);
  auto c = PipelineConfig::parse("epochs = seven\nsplit_ratio = 0.9x\npremises_only = maybe\n");
  EXPECT_THROW(c.get_int("epochs", 1), ConfigError);
  EXPECT_THROW(c.get_double("split_ratio", 1), ConfigError);
  EXPECT_THROW(c.get_bool("premises_only", true), ConfigError);
  EXPECT_THROW(c.get("corpus"), ConfigError);
  EXPECT_THROW(c.apply_override("no-equals"), ConfigError);
}

TEST(Config, TypedGettersAndFallbacks) {
  auto c = PipelineConfig::parse("k_values = 5, 10,15\nsplit_ratio = 0.75\npremises_only = YES\n");
  EXPECT_EQ(c.get_int_list("k_values", {}), (std::vector<long long>{5, 10, 15}));
  EXPECT_DOUBLE_EQ(c.get_double("split_ratio", 0), 0.75);
  EXPECT_TRUE(c.get_bool("premises_only", false));
  EXPECT_EQ(c.get_int("epochs", 20), 20);
  EXPECT_EQ(c.get_or("task", "partisan"), "partisan");
}

TEST(Config, PathsResolveAgainstConfigDirectory) {
  auto c = PipelineConfig::parse(
      "corpus = data/c.jsonl\ntest_set = /abs/t.jsonl\ninfiller = mock:fx/inf.json\nscorer = mock:\n"
      "encoder = model:nli\n",
      "/base/dir");
  EXPECT_EQ(c.get("corpus"), "/base/dir/data/c.jsonl");
  EXPECT_EQ(c.get("test_set"), "/abs/t.jsonl");
  EXPECT_EQ(c.get("infiller"), "mock:/base/dir/fx/inf.json");
  EXPECT_EQ(c.get("scorer"), "mock:");
  EXPECT_EQ(c.get("encoder"), "model:nli");
}

TEST(Config, OverridesReplaceValues) {
  auto c = PipelineConfig::parse("epochs = 20\n", "/b");
  c.apply_override("epochs=1");
  c.apply_override(" corpus = rel.jsonl ");
  EXPECT_EQ(c.get_int("epochs", 0), 1);
  EXPECT_EQ(c.get("corpus"), "rel.jsonl");
  c.apply_override("corpus=");
  EXPECT_FALSE(c.has("corpus"));
}

TEST(Config, HashIgnoresOutAndWorkers) {
  auto a = PipelineConfig::parse("epochs = 20\nseed = 13\n");
  auto b = a;
  b.set("out", "/tmp/x");
  b.set("workers", "8");
  EXPECT_EQ(a.hash(), b.hash());
  b.set("seed", "14");
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Config, ToyConfigLoads) {
  auto c = PipelineConfig::load(testing_support::fixture("toy.conf"));
  EXPECT_EQ(c.existing_path("corpus"), testing_support::fixture("toy_corpus.jsonl"));
  EXPECT_EQ(c.get_int("epochs", 0), 5);
}

TEST(Config, RelativeConfigPathGivesAbsolutePaths) {
  const auto rel = std::filesystem::relative(testing_support::fixture("toy.conf"));
  auto c = PipelineConfig::load(rel.string());
  EXPECT_TRUE(std::filesystem::path(c.get("corpus")).is_absolute());
  EXPECT_EQ(c.get("generator").rfind("mock:/", 0), 0u);
}
