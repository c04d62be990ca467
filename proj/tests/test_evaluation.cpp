#include <gtest/gtest.h>

#include "helpers.hpp"
#include "mple/evaluation.hpp"
#include "mple/java_subset.hpp"

using namespace mple;
using namespace mple::test;

namespace {

CloneRecord record(std::vector<NodeId> members, CloneType t = CloneType::Type1,
                   NodeType g = NodeType::Method, std::string v = "v1") {
  return {std::move(v), g, t, std::move(members), 0, 0};
}

ReportedClass reported(std::vector<NodeId> members, CloneType t = CloneType::Type1,
                       NodeType g = NodeType::Method, std::string v = "v1") {
  return {std::move(v), CloneClass{g, t, members, members.front()}};
}

}  // namespace

TEST(Matching, IdenticalReportMatchesPerfectly) {
  std::vector<CloneRecord> truth{record({1, 5}), record({8, 9, 12}, CloneType::Type2)};
  std::vector<ReportedClass> rep{reported({8, 9, 12}, CloneType::Type2), reported({1, 5})};
  auto m = match_clone_report(rep, truth);
  ASSERT_EQ(m.size(), 2u);
  for (const auto& x : m) EXPECT_DOUBLE_EQ(x.overlap, 1.0);
  auto pr = precision_recall(rep, truth);
  EXPECT_DOUBLE_EQ(pr.total.precision(), 1.0);
  EXPECT_DOUBLE_EQ(pr.total.recall(), 1.0);
}

TEST(Matching, TwoOfThreeMembersBelowThreshold) {
  EXPECT_NEAR(jaccard({1, 2}, {1, 2, 3}), 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(match_clone_report({reported({1, 2})}, {record({1, 2, 3})}).empty());
  EXPECT_EQ(match_clone_report({reported({1, 2})}, {record({1, 2, 3})}, 0.6).size(), 1u);
}

TEST(Matching, VariantsAreSeparate) {
  EXPECT_TRUE(match_clone_report({reported({1, 2}, CloneType::Type1, NodeType::Method, "v2")},
                                 {record({1, 2})})
                  .empty());
}

TEST(Matching, GreedyPrefersHigherOverlap) {
  // r0 overlaps t0 at 3/4 and t1 at 1; r1 overlaps t0 at 1
  std::vector<CloneRecord> truth{record({1, 2, 3}), record({1, 2, 3, 4})};
  std::vector<ReportedClass> rep{reported({1, 2, 3, 4}), reported({1, 2, 3})};
  auto m = match_clone_report(rep, truth);
  ASSERT_EQ(m.size(), 2u);
  for (const auto& x : m) {
    EXPECT_EQ(x.reported, x.truth == 0 ? 1u : 0u);
    EXPECT_DOUBLE_EQ(x.overlap, 1.0);
  }
  EXPECT_THROW(match_clone_report(rep, truth, 0.0), PreconditionError);
}

TEST(Metrics, EmptyReportConvention) {
  std::vector<CloneRecord> truth;
  for (NodeId i = 0; i < 10; ++i) truth.push_back(record({10 * i, 10 * i + 1}));
  auto m = precision_recall({}, truth);
  EXPECT_DOUBLE_EQ(m.total.precision(), 1.0);
  EXPECT_DOUBLE_EQ(m.total.recall(), 0.0);
  EXPECT_EQ(m.total.false_negatives, 10u);
  auto none = precision_recall({}, {});
  EXPECT_DOUBLE_EQ(none.total.precision(), 1.0);
  EXPECT_DOUBLE_EQ(none.total.recall(), 1.0);
}

TEST(Metrics, HalfRecalled) {
  std::vector<CloneRecord> truth;
  std::vector<ReportedClass> rep;
  for (NodeId i = 0; i < 10; ++i) {
    truth.push_back(record({10 * i, 10 * i + 1}));
    if (i % 2 == 0) rep.push_back(reported({10 * i, 10 * i + 1}));
  }
  auto m = precision_recall(rep, truth);
  EXPECT_EQ(m.total.true_positives, 5u);
  EXPECT_EQ(m.total.false_positives, 0u);
  EXPECT_EQ(m.total.false_negatives, 5u);
  EXPECT_DOUBLE_EQ(m.total.precision(), 1.0);
  EXPECT_DOUBLE_EQ(m.total.recall(), 0.5);
}

TEST(Metrics, CellsByTypeAndGranularity) {
  std::vector<CloneRecord> truth{record({1, 2}, CloneType::Type1, NodeType::Method),
                                 record({3, 4}, CloneType::Type3, NodeType::Block)};
  std::vector<ReportedClass> rep{reported({1, 2}, CloneType::Type2, NodeType::Method),
                                 reported({7, 8}, CloneType::Type2, NodeType::Class)};
  auto m = precision_recall(rep, truth);
  // a match counts under the truth record's cell, a spurious class under its own
  EXPECT_EQ(m.by_type(CloneType::Type1).true_positives, 1u);
  EXPECT_EQ(m.by_type(CloneType::Type2).false_positives, 1u);
  EXPECT_EQ(m.by_type(CloneType::Type3).false_negatives, 1u);
  EXPECT_EQ(m.by_granularity(NodeType::Class).false_positives, 1u);
  EXPECT_EQ(m.by_granularity(NodeType::Block).false_negatives, 1u);
  EXPECT_DOUBLE_EQ(m.total.precision(), 0.5);
  EXPECT_DOUBLE_EQ(m.total.recall(), 0.5);
  auto j = metrics_to_json(m);
  EXPECT_EQ(j["cells"].size(), 3u);
  EXPECT_EQ(j["total"]["true_positives"], 1);
}

TEST(FirstDifference, Paths) {
  auto a = parse_java_subset("class A { void f() { a(); } }");
  auto b = parse_java_subset("class A { void f() { b(); } }");
  EXPECT_EQ(first_difference(a.root(), a.root()), "");
  EXPECT_EQ(first_difference(a.root(), b.root()), "/0/0/0/0/ (tokens)");
}

TEST(Pipeline, SingleUnmodifiedVariant) {
  auto g = parse_java_subset("class A { void f() { a = b + c; d(a); } int g() { return 1; } }", "v1");
  auto r = evaluate_pipeline({g}, nullptr);
  ASSERT_EQ(r.roundtrip.size(), 1u);
  EXPECT_TRUE(r.roundtrip_ok());
  EXPECT_EQ(r.platform_artifact_count, r.sum_variant_artifact_count);
  EXPECT_EQ(r.permutations_tested, 1u);
  EXPECT_FALSE(r.metrics.has_value());
  EXPECT_EQ(r.features, 1u);
}

TEST(Pipeline, ThreeIdenticalVariants) {
  const std::string src = "class A { void f() { a = b + c; d(a); } } class B { void f() { a = b + c; d(a); } }";
  std::vector<ArtifactGraph> vs;
  for (const char* id : {"a", "b", "c"}) vs.push_back(parse_java_subset(src, id));
  auto r = evaluate_pipeline(vs, nullptr);
  EXPECT_TRUE(r.roundtrip_ok());
  EXPECT_EQ(r.platform_artifact_count * 3, r.sum_variant_artifact_count);
  EXPECT_EQ(r.permutations_tested, 6u);
  EXPECT_TRUE(r.invariance_all_equal);
  EXPECT_EQ(r.components, 1u);
  EXPECT_EQ(r.instances_checked, 6u);
  EXPECT_EQ(r.instances_faithful, 6u);
}

TEST(Pipeline, CorruptInputNamesParseStage) {
  const std::string good = serialize_graph(parse_java_subset("class A { void f() { a(); } }", "v1"));
  try {
    parse_variant_documents({good, "{\"variant_id\": \"v2\", \"root\": "});
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "parse");
  }
  EXPECT_EQ(parse_variant_documents({good}).size(), 1u);
  try {
    evaluate_pipeline({}, nullptr);
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "parse");
  }
}

TEST(Pipeline, StageErrorWrapsDomainFailure) {
  auto a = parse_java_subset("class A { void f() { a(); } }", "same");
  try {
    evaluate_pipeline({a, a}, nullptr);
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "taxonomy");
  }
}

TEST(Pipeline, GeneratedBenchmarkDeterministicReport) {
  GeneratorConfig cfg;
  cfg.variant_count = 3;
  cfg.clones_per_variant = {{CloneType::Type1, 2}, {CloneType::Type2, 2}, {CloneType::Type3, 2}};
  cfg.rng_seed = 11;
  auto b = generate_benchmark(synthetic_seed({250, 0.6, 8, 7}), cfg);
  EvalConfig ec;
  auto r1 = evaluate_pipeline(b.variants, &b.truth, ec);
  auto r2 = evaluate_pipeline(b.variants, &b.truth, ec);
  EXPECT_EQ(eval_report_to_json(r1, ec, false).dump(), eval_report_to_json(r2, ec, false).dump());
  EXPECT_TRUE(r1.roundtrip_ok());
  EXPECT_TRUE(r1.invariance_all_equal);
  EXPECT_EQ(r1.permutations_tested, 6u);
  EXPECT_EQ(r1.instances_faithful, r1.instances_checked);
  ASSERT_TRUE(r1.metrics.has_value());
  EXPECT_GT(r1.metrics->total.true_positives, 0u);
  auto j = eval_report_to_json(r1, ec);
  ASSERT_TRUE(j.contains("host"));
  EXPECT_TRUE(j["host"]["runtime_seconds"].contains("detect"));
  EXPECT_FALSE(eval_summary(r1).empty());
}
