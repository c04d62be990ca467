#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "mple/clone_detection.hpp"
#include "mple/java_subset.hpp"

using namespace mple;
using namespace mple::test;

namespace {

// Id-free description of a detection result: per class, its granularity,
// type and the sorted member digests.
using Fingerprint = std::vector<std::tuple<NodeType, CloneType, std::vector<Digest>>>;

Fingerprint fingerprint(const ArtifactGraph& g, const std::vector<CloneClass>& classes) {
  Fingerprint f;
  for (const auto& c : classes) {
    std::vector<Digest> d;
    for (auto m : c.members) d.push_back(exact_digest(g.at(m)));
    std::sort(d.begin(), d.end());
    f.emplace_back(c.granularity, c.clone_type, d);
  }
  std::sort(f.begin(), f.end());
  return f;
}

void check_class_invariants(const ArtifactGraph& g, const std::vector<CloneClass>& classes,
                            double theta) {
  for (const auto& c : classes) {
    ASSERT_GE(c.members.size(), 2u);
    ASSERT_TRUE(std::is_sorted(c.members.begin(), c.members.end()));
    Digest best = exact_digest(g.at(c.members[0]));
    for (auto m : c.members) {
      EXPECT_EQ(g.at(m).type, c.granularity);
      best = std::min(best, exact_digest(g.at(m)));
      double closest = 0.0;
      for (auto n : c.members) {
        if (m == n) continue;
        EXPECT_FALSE(g.is_ancestor(m, n));
        closest = std::max(closest, node_similarity(g.at(m), g.at(n)));
      }
      // hash-grouped classes need no similarity check; greedy members joined some peer
      if (c.clone_type == CloneType::Type3) {
        EXPECT_GE(closest, theta - 1e-12);
      }
    }
    EXPECT_EQ(exact_digest(g.at(c.representative)), best);
    EXPECT_EQ(classify_clone(c, g), c.clone_type);
  }
}

}  // namespace

TEST(Detection, VerbatimMethodCopies) {
  auto g = parse_java_subset(
      "class A { void f() { a = b + c; d(); } void h() { q(); } }"
      "class B { void f() { a = b + c; d(); } }");
  auto classes = detect_clones(g);
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0].granularity, NodeType::Method);
  EXPECT_EQ(classes[0].members.size(), 2u);
  EXPECT_EQ(classes[0].clone_type, CloneType::Type1);
  check_class_invariants(g, classes, 0.75);
}

TEST(Detection, ConsistentRenameIsType2) {
  auto g = parse_java_subset(
      "class A { void f() { x = b + c; d(x); } void h() { q(); } }"
      "class B { void f() { y = b + c; d(y); } }");
  auto classes = detect_clones(g);
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0].clone_type, CloneType::Type2);
  check_class_invariants(g, classes, 0.75);
}

TEST(Detection, ExtraStatementIsType3) {
  auto g = parse_java_subset(
      "class A { void f() { a = b + c; d(a); e = 1; } }"
      "class B { void f() { a = b + c; d(a); e = 1; g(); } }");
  auto classes = detect_clones(g);
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0].clone_type, CloneType::Type3);
  check_class_invariants(g, classes, 0.75);
}

TEST(Detection, BelowMinTokensIsEmpty) {
  auto g = parse_java_subset("class A { void f() { a(); } } class B { void f() { a(); } }");
  EXPECT_TRUE(detect_clones(g).empty());
}

TEST(Detection, CoarserCloneWins) {
  const std::string body = "{ void f() { a = b + c; d(a); } void g() { p = q * r; s(p, 1); } }";
  auto g = parse_java_subset("class A " + body + " class A " + body);
  auto classes = detect_clones(g);
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0].granularity, NodeType::Class);
  check_class_invariants(g, classes, 0.75);
}

TEST(Detection, RestrictedGranularities) {
  auto g = parse_java_subset(
      "class A { void f() { a = b + c; d(); } void h() { q(); } }"
      "class B { void f() { a = b + c; d(); } }");
  DetectionConfig cfg;
  cfg.granularities = {NodeType::Block};
  auto classes = detect_clones(g, cfg);
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0].granularity, NodeType::Block);
}

TEST(Detection, InvalidConfigRejected) {
  ArtifactGraph g("v", sys({}));
  DetectionConfig cfg;
  cfg.theta = 0.0;
  EXPECT_THROW(detect_clones(g, cfg), PreconditionError);
  cfg.theta = 0.5;
  cfg.min_tokens = 0;
  EXPECT_THROW(detect_clones(g, cfg), PreconditionError);
}

TEST(Detection, IndependentOfEnumerationOrder) {
  std::vector<ArtifactNode> classes;
  const std::vector<std::string> names = {"x", "y", "zz"};
  for (int k = 0; k < 6; ++k) {
    const auto& v = names[k % 3];
    classes.push_back(cls("C" + std::to_string(k),
                          {method("run", {stmt(v + " = load ( ) ;"), stmt("if ( " + v + " > 0 ) emit ( " + v + " ) ;")}),
                           method("m" + std::to_string(k), {stmt("k = " + std::to_string(k) + " ;")})}));
  }
  classes.push_back(cls("D", {method("run", {stmt("x = load ( ) ;"), stmt("if ( x > 0 ) emit ( x ) ;"),
                                             stmt("log ( x ) ;")})}));
  ArtifactGraph base("v", sys(classes));
  const auto expected = fingerprint(base, detect_clones(base));
  ASSERT_FALSE(expected.empty());
  std::mt19937 rng(3);
  for (int k = 0; k < 10; ++k) {
    auto shuffled = classes;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    ArtifactGraph g("v", sys(shuffled));
    auto found = detect_clones(g);
    check_class_invariants(g, found, 0.75);
    EXPECT_EQ(fingerprint(g, found), expected);
  }
}

TEST(Detection, ReportDocument) {
  auto g = parse_java_subset(
      "class A { void f() { a = b + c; d(); } void h() { q(); } }"
      "class B { void f() { a = b + c; d(); } }");
  DetectionConfig cfg;
  auto classes = detect_clones(g, cfg);
  auto j = clone_report_to_json(g.variant_id(), classes, cfg);
  EXPECT_EQ(j["theta"], 0.75);
  EXPECT_EQ(j["min_tokens"], 8);
  ASSERT_EQ(j["classes"].size(), 1u);
  EXPECT_EQ(j["classes"][0]["clone_type"], "TYPE1");
  EXPECT_EQ(clone_class_from_json(j["classes"][0]), classes[0]);
}
