#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "mple/java_subset.hpp"
#include "mple/variability_mining.hpp"

using namespace mple;
using namespace mple::test;

namespace {

void expect_coverage(const ArtifactGraph& a, const ArtifactGraph& b, const MatchResult& r) {
  std::vector<int> left(a.size(), 0), right(b.size(), 0);
  for (const auto& c : r.correspondences) {
    if (c.left) ++left.at(*c.left);
    if (c.right) ++right.at(*c.right);
    if (c.kind == CorrespondenceKind::Match) {
      ASSERT_TRUE(c.left && c.right);
    } else {
      EXPECT_EQ(c.left.has_value(), c.kind == CorrespondenceKind::LeftOnly);
      EXPECT_EQ(c.right.has_value(), c.kind == CorrespondenceKind::RightOnly);
      EXPECT_EQ(c.similarity, 0.0);
    }
  }
  for (int n : left) EXPECT_EQ(n, 1);
  for (int n : right) EXPECT_EQ(n, 1);
}

// Parent of every node, by id.
std::vector<NodeId> parents(const ArtifactGraph& g) {
  std::vector<NodeId> p(g.size(), 0);
  visit_preorder(g.root(), [&](const ArtifactNode& n, int) {
    for (const auto& c : n.children) p[c.id] = n.id;
  });
  return p;
}

const char* kBase =
    "class A { void f() { a = b + c; d(a); } void g() { p = q; } }"
    "class B { int h() { return 1; } }";

}  // namespace

TEST(Compare, IdenticalVariants) {
  auto a = parse_java_subset(kBase, "a");
  auto r = compare_variants(a, a);
  EXPECT_DOUBLE_EQ(r.overall_similarity, 1.0);
  for (const auto& c : r.correspondences) EXPECT_EQ(c.kind, CorrespondenceKind::Match);
  expect_coverage(a, a, r);
}

TEST(Compare, ExtraMethodIsOneRightOnlySubtree) {
  auto a = parse_java_subset(kBase, "a");
  auto b = parse_java_subset(
      "class A { void f() { a = b + c; d(a); } void g() { p = q; } void k() { run(); } }"
      "class B { int h() { return 1; } }",
      "b");
  auto r = compare_variants(a, b);
  expect_coverage(a, b, r);
  std::size_t right_only = 0;
  for (const auto& c : r.correspondences) {
    EXPECT_NE(c.kind, CorrespondenceKind::LeftOnly);
    if (c.kind == CorrespondenceKind::RightOnly) {
      ++right_only;
      const auto& n = b.at(*c.right);
      EXPECT_TRUE(n.label == "k()" || b.at(parents(b)[n.id]).type != NodeType::Class);
    }
  }
  EXPECT_EQ(right_only, 3u);  // METHOD k, its BLOCK and one STATEMENT
}

TEST(Compare, DisjointBodies) {
  auto a = parse_java_subset("class A { void f() { a = 1; } }", "a");
  auto b = parse_java_subset("package q; class Q { int z(); }", "b");
  auto r = compare_variants(a, b);
  expect_coverage(a, b, r);
  for (const auto& c : r.correspondences) {
    if (c.left == NodeId{0} && c.right == NodeId{0})
      EXPECT_EQ(c.kind, CorrespondenceKind::Match);
    else
      EXPECT_NE(c.kind, CorrespondenceKind::Match);
  }
  // roots share the empty label; children match nothing
  EXPECT_DOUBLE_EQ(variant_similarity(a, b), 0.3);
}

TEST(Compare, MatchesRespectHierarchy) {
  auto a = parse_java_subset(kBase, "a");
  auto b = parse_java_subset(
      "class A { void f() { a = b + c; d(a); e(); } void g2() { p = q; } }"
      "class C { int h() { return 1; } }",
      "b");
  auto r = compare_variants(a, b);
  expect_coverage(a, b, r);
  auto pa = parents(a), pb = parents(b);
  std::set<std::pair<NodeId, NodeId>> matched;
  for (const auto& c : r.correspondences)
    if (c.kind == CorrespondenceKind::Match) {
      matched.insert({*c.left, *c.right});
      EXPECT_GE(c.similarity, 0.75);
    }
  for (auto [l, rr] : matched)
    if (l != 0 || rr != 0) {
      EXPECT_TRUE(matched.count({pa[l], pb[rr]}));
    }
}

TEST(VariantSimilarity, SymmetricAndIdentity) {
  auto a = parse_java_subset(kBase, "a");
  auto b = parse_java_subset("class A { void f() { a = b + c; } }", "b");
  EXPECT_DOUBLE_EQ(variant_similarity(a, a), 1.0);
  EXPECT_DOUBLE_EQ(variant_similarity(a, b), variant_similarity(b, a));
}

TEST(Taxonomy, SingleVariant) {
  auto t = mine_taxonomy({parse_java_subset(kBase, "v")});
  EXPECT_EQ(t.merge_order, std::vector<std::string>{"v"});
  EXPECT_TRUE(t.links.empty());
}

TEST(Taxonomy, HandWorkedMatrix) {
  auto t = taxonomy_from_matrix({"C", "A", "B"}, {{{"A", "B"}, 0.9}, {{"A", "C"}, 0.2}, {{"C", "B"}, 0.3}});
  EXPECT_EQ(t.merge_order, (std::vector<std::string>{"A", "B", "C"}));
  ASSERT_EQ(t.links.size(), 2u);
  EXPECT_EQ(t.links[1].variant, "C");
  EXPECT_EQ(t.links[1].closest, "B");
  EXPECT_DOUBLE_EQ(t.links[1].similarity, 0.3);
}

TEST(Taxonomy, IdenticalVariantsLexicographic) {
  std::vector<ArtifactGraph> vs;
  for (const char* id : {"v3", "v1", "v2"}) vs.push_back(parse_java_subset(kBase, id));
  auto t = mine_taxonomy(vs);
  EXPECT_EQ(t.merge_order, (std::vector<std::string>{"v1", "v2", "v3"}));
  for (const auto& l : t.links) EXPECT_DOUBLE_EQ(l.similarity, 1.0);
}

TEST(Taxonomy, PermutationSeedAndShuffleInvariance) {
  const std::vector<std::string> bodies = {
      "class A { void f() { a = b + c; d(a); } }",
      "class A { void f() { a = b + c; d(a); e(); } }",
      "class A { void f() { x(); } } class B { int h() { return 1; } }",
      "class B { int h() { return 1; } int k() { return 2; } }",
  };
  std::vector<ArtifactGraph> vs;
  for (std::size_t i = 0; i < bodies.size(); ++i)
    vs.push_back(parse_java_subset(bodies[i], "v" + std::to_string(i)));
  const auto t = mine_taxonomy(vs);
  auto sorted = t.merge_order;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::string>{"v0", "v1", "v2", "v3"}));
  double max = 0;
  for (const auto& [k, s] : t.similarity) max = std::max(max, s);
  EXPECT_DOUBLE_EQ(t.at(t.merge_order[0], t.merge_order[1]), max);
  for (const auto& l : t.links) EXPECT_DOUBLE_EQ(l.similarity, t.at(l.variant, l.closest));
  std::mt19937 rng(2);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(vs.begin(), vs.end(), rng);
    EXPECT_EQ(mine_taxonomy(vs).merge_order, t.merge_order);
  }
}

TEST(Taxonomy, Errors) {
  EXPECT_THROW(mine_taxonomy({}), PreconditionError);
  EXPECT_THROW(mine_taxonomy({parse_java_subset(kBase, "v"), parse_java_subset(kBase, "v")}),
               PreconditionError);
}
