#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "mple/feature_model.hpp"
#include "mple/java_subset.hpp"

using namespace mple;
using namespace mple::test;

namespace {

// Variants built from a shared class Core plus one class per entry of
// `extras`, present in the listed variants.
IntegratedPlatform platform_of(const std::vector<std::string>& ids,
                               const std::vector<std::pair<std::string, std::set<std::string>>>& extras) {
  std::vector<ArtifactGraph> vs;
  for (const auto& id : ids) {
    std::vector<ArtifactNode> classes{cls("Core", {method("main", {stmt("init ( ) ;")})})};
    for (const auto& [name, in] : extras)
      if (in.count(id)) classes.push_back(cls(name, {method("run", {stmt(name + " ( ) ;")})}));
    vs.emplace_back(id, sys(classes));
  }
  return integrate_all(vs, nullptr);
}

const Feature& feature_with(const FeatureModel& fm, const Signature& sig) {
  return fm.at(*block_feature(fm, sig));
}

FeatureModel tiny_model(std::vector<Feature> fs) {
  FeatureModel fm;
  fm.features.push_back({fm.root, {}, "", Variability::Mandatory, std::nullopt, ""});
  for (auto& f : fs) fm.features.push_back(std::move(f));
  return fm;
}

Feature opt(const std::string& n) { return {n, {}, "ROOT", Variability::Optional, std::nullopt, ""}; }

void expect_sound(const IntegratedPlatform& p, const FeatureModel& fm) {
  for (const auto& v : p.variants) {
    auto c = variant_configuration(fm, v);
    auto check = validate_configuration(fm, c);
    EXPECT_TRUE(check.valid) << v << ": " << (check.violations.empty() ? "" : check.violations[0]);
    for (const auto& k : fm.constraints) {
      const bool l = c.selected.count(k.lhs), r = c.selected.count(k.rhs);
      if (k.kind == ConstraintKind::Requires) EXPECT_TRUE(!l || r);
      else EXPECT_FALSE(l && r);
    }
  }
}

}  // namespace

TEST(Condition, ParsePrecedence) {
  EXPECT_EQ(parse_condition("F1 & !F2"),
            Condition::all_of({Condition::var("F1"), Condition::negate(Condition::var("F2"))}));
  EXPECT_EQ(parse_condition("!F1 | F2 & F3"),
            Condition::any_of({Condition::negate(Condition::var("F1")),
                               Condition::all_of({Condition::var("F2"), Condition::var("F3")})}));
  EXPECT_EQ(parse_condition("(F1 | F2) & F3").op, Condition::Op::And);
}

TEST(Condition, SyntaxErrors) {
  EXPECT_THROW(parse_condition("F1 |"), ParseError);
  EXPECT_THROW(parse_condition("(F1"), ParseError);
  EXPECT_THROW(parse_condition("F1 F2"), ParseError);
  EXPECT_THROW(parse_condition(""), ParseError);
  try {
    parse_condition("F1 | ");
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 6u);
  }
}

TEST(Condition, Evaluation) {
  EXPECT_TRUE(eval_condition(parse_condition("F1"), {"F1"}));
  EXPECT_FALSE(eval_condition(parse_condition("F1"), {}));
  EXPECT_TRUE(eval_condition(parse_condition("F1 & !F2"), {"F1", "F3"}));
}

TEST(Condition, EvaluationMatchesTruthTable) {
  // !a | b & c, enumerated by hand over all 8 assignments
  const auto c = parse_condition("!a | b & c");
  for (int m = 0; m < 8; ++m) {
    std::set<std::string> s;
    const bool a = m & 1, b = m & 2, cc = m & 4;
    if (a) s.insert("a");
    if (b) s.insert("b");
    if (cc) s.insert("c");
    EXPECT_EQ(eval_condition(c, s), !a || (b && cc)) << m;
  }
}

TEST(Condition, PrintParseIdentity) {
  std::mt19937 rng(4);
  std::function<Condition(int)> gen = [&](int depth) -> Condition {
    const int k = depth == 0 ? 0 : static_cast<int>(rng() % 4);
    if (k == 0) return Condition::var("F" + std::to_string(rng() % 3));
    if (k == 1) return Condition::negate(gen(depth - 1));
    std::vector<Condition> args;
    for (int i = 0, n = 2 + static_cast<int>(rng() % 2); i < n; ++i) args.push_back(gen(depth - 1));
    return k == 2 ? Condition::all_of(args) : Condition::any_of(args);
  };
  for (int i = 0; i < 300; ++i) {
    const auto c = gen(4);
    EXPECT_EQ(parse_condition(to_string(c)), c) << to_string(c);
  }
}

TEST(Blocks, Examples) {
  auto single = platform_of({"v1"}, {{"A", {"v1"}}});
  EXPECT_EQ(compute_blocks(single).size(), 1u);
  auto same = platform_of({"v1", "v2"}, {{"A", {"v1", "v2"}}});
  EXPECT_EQ(compute_blocks(same).size(), 1u);

  auto a = parse_java_subset("class A { void f() { a(); } }", "v1");
  auto b = parse_java_subset("class B { void g() { b(); } }", "v2");
  auto blocks = compute_blocks(integrate_all({a, b}, nullptr));
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0].signature, (Signature{"v1", "v2"}));
  EXPECT_EQ(blocks[0].pids, std::vector<std::uint32_t>{0});
  EXPECT_EQ(blocks[1].signature, Signature{"v1"});
  EXPECT_EQ(blocks[2].signature, Signature{"v2"});
}

TEST(Synthesis, SingleVariant) {
  auto fm = synthesize_feature_model(platform_of({"v1"}, {{"A", {"v1"}}}));
  ASSERT_EQ(fm.features.size(), 2u);
  EXPECT_EQ(fm.features[0].name, "ROOT");
  EXPECT_EQ(fm.features[1].name, "F_0");
  EXPECT_EQ(fm.features[1].parent, "ROOT");
  EXPECT_EQ(fm.features[1].variability, Variability::Mandatory);
  EXPECT_TRUE(fm.constraints.empty());
  EXPECT_EQ(enumerate_configurations(fm).size(), 1u);
}

TEST(Synthesis, TwoVariantsWithUniqueClasses) {
  auto p = platform_of({"v1", "v2"}, {{"A", {"v1"}}, {"B", {"v2"}}});
  auto fm = synthesize_feature_model(p);
  const auto& core = feature_with(fm, {"v1", "v2"});
  EXPECT_EQ(core.parent, "ROOT");
  EXPECT_EQ(core.variability, Variability::Mandatory);
  const auto& fa = feature_with(fm, {"v1"});
  const auto& fb = feature_with(fm, {"v2"});
  EXPECT_EQ(fa.parent, core.name);
  EXPECT_EQ(fb.parent, core.name);
  // disjoint and covering the parent: alternatives
  ASSERT_EQ(fm.groups.size(), 1u);
  EXPECT_EQ(fm.groups[0].kind, GroupKind::Xor);
  EXPECT_EQ(fm.groups[0].members, (std::vector<std::string>{fa.name, fb.name}));
  EXPECT_TRUE(fm.constraints.empty());
  expect_sound(p, fm);
  EXPECT_EQ(enumerate_configurations(fm).size(), 2u);
}

TEST(Synthesis, PartitionIsXor) {
  auto p = platform_of({"v1", "v2", "v3"}, {{"A", {"v1"}}, {"B", {"v2", "v3"}}});
  auto fm = synthesize_feature_model(p);
  ASSERT_EQ(fm.groups.size(), 1u);
  EXPECT_EQ(fm.groups[0].kind, GroupKind::Xor);
  EXPECT_EQ(fm.groups[0].parent, feature_with(fm, {"v1", "v2", "v3"}).name);
  expect_sound(p, fm);
}

TEST(Synthesis, OverlappingCoverIsOr) {
  auto p = platform_of({"v1", "v2", "v3"}, {{"A", {"v1", "v2"}}, {"B", {"v2", "v3"}}});
  auto fm = synthesize_feature_model(p);
  ASSERT_EQ(fm.groups.size(), 1u);
  EXPECT_EQ(fm.groups[0].kind, GroupKind::Or);
  expect_sound(p, fm);
}

TEST(Synthesis, UncoveredSiblingsStayOptional) {
  auto p = platform_of({"v1", "v2", "v3"}, {{"A", {"v1"}}, {"B", {"v2"}}});
  auto fm = synthesize_feature_model(p);
  EXPECT_TRUE(fm.groups.empty());
  const auto& fa = feature_with(fm, {"v1"});
  const auto& fb = feature_with(fm, {"v2"});
  EXPECT_EQ(fa.variability, Variability::Optional);
  ASSERT_EQ(fm.constraints.size(), 1u);
  EXPECT_EQ(fm.constraints[0], (CrossTreeConstraint{ConstraintKind::Excludes, fa.name, fb.name}));
  expect_sound(p, fm);
  // core only, core+A, core+B
  EXPECT_EQ(enumerate_configurations(fm).size(), 3u);
}

TEST(Synthesis, RequiresAcrossBranches) {
  auto p = platform_of({"v1", "v2", "v3"},
                       {{"B", {"v1", "v2"}}, {"C", {"v1", "v3"}}, {"A", {"v1"}}});
  auto fm = synthesize_feature_model(p);
  const auto& a = feature_with(fm, {"v1"});
  const auto& b = feature_with(fm, {"v1", "v2"});
  const auto& c = feature_with(fm, {"v1", "v3"});
  EXPECT_EQ(a.parent, b.name);  // tie on size, lexicographically smaller signature
  std::vector<CrossTreeConstraint> want{{ConstraintKind::Requires, a.name, c.name}};
  EXPECT_EQ(fm.constraints, want);
  expect_sound(p, fm);
}

TEST(Synthesis, BlockBijectionAndDerivationClosure) {
  auto p = platform_of({"v1", "v2", "v3", "v4"}, {{"A", {"v1", "v2"}},
                                                  {"B", {"v3"}},
                                                  {"C", {"v1", "v3", "v4"}},
                                                  {"D", {"v4"}},
                                                  {"E", {"v2", "v4"}}});
  auto fm = synthesize_feature_model(p);
  const auto blocks = compute_blocks(p);
  std::set<Signature> sigs;
  for (const auto& f : fm.features)
    if (f.name != fm.root && !f.layer_ref) {
      EXPECT_TRUE(sigs.insert(f.signature).second);
    }
  EXPECT_EQ(sigs.size(), blocks.size());
  for (const auto& b : blocks) EXPECT_TRUE(sigs.count(b.signature));
  expect_sound(p, fm);
  for (const auto& c : enumerate_configurations(fm)) {
    auto g = derive_variant(p, fm, c);
    EXPECT_TRUE(is_structurally_valid(g.root()));
  }
  for (const auto& v : p.variants) {
    auto g = derive_variant(p, fm, variant_configuration(fm, v), v);
    EXPECT_EQ(g, derive_variant(p, v));
  }
}

TEST(Constraints, HandBuiltModels) {
  auto fm = tiny_model({opt("A"), opt("B"), {"C", {}, "A", Variability::Optional, std::nullopt, ""}});
  fm.features[1].signature = {"v1"};
  fm.features[2].signature = {"v1", "v2"};
  fm.features[3].signature = {"v2"};
  auto cs = mine_constraints(fm);
  // A -> B and C -> B (subsets, non-ancestors); A/C are disjoint but related
  std::vector<CrossTreeConstraint> want{{ConstraintKind::Requires, "A", "B"},
                                        {ConstraintKind::Requires, "C", "B"}};
  EXPECT_EQ(cs, want);

  auto chain = tiny_model({opt("A"), {"B", {}, "A", Variability::Optional, std::nullopt, ""}});
  chain.features[1].signature = {"v1", "v2"};
  chain.features[2].signature = {"v1"};
  EXPECT_TRUE(mine_constraints(chain).empty());
}

TEST(Validation, Violations) {
  auto p = platform_of({"v1", "v2"}, {{"A", {"v1"}}, {"B", {"v2"}}});
  auto fm = synthesize_feature_model(p);
  Configuration both{fm.names(), {}};
  auto v = validate_configuration(fm, both);
  EXPECT_FALSE(v.valid);
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_NE(v.violations[0].find("XOR"), std::string::npos);
  EXPECT_THROW(derive_variant(p, fm, both), PreconditionError);

  auto req = tiny_model({opt("A"), opt("B")});
  req.constraints.push_back({ConstraintKind::Requires, "A", "B"});
  auto r = validate_configuration(req, {{"ROOT", "A"}, {}});
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0], "A requires B");
  EXPECT_FALSE(validate_configuration(req, {{"A", "B"}, {}}).valid);  // root missing
  EXPECT_FALSE(validate_configuration(req, {{"ROOT", "Q"}, {}}).valid);
}

TEST(Enumeration, SmallModels) {
  auto one = tiny_model({{"M", {}, "ROOT", Variability::Mandatory, std::nullopt, ""}});
  EXPECT_EQ(enumerate_configurations(one).size(), 1u);
  auto two = tiny_model({opt("A"), opt("B")});
  EXPECT_EQ(enumerate_configurations(two).size(), 4u);
  two.constraints.push_back({ConstraintKind::Excludes, "A", "B"});
  EXPECT_EQ(enumerate_configurations(two).size(), 3u);
  EXPECT_EQ(enumerate_configurations(two, 2).size(), 2u);

  std::vector<Feature> many;
  for (int i = 0; i < 21; ++i) many.push_back(opt("G" + std::to_string(i)));
  auto big = tiny_model(many);
  EXPECT_THROW(enumerate_configurations(big), PreconditionError);
  EXPECT_EQ(enumerate_configurations(big, 5).size(), 5u);
}

TEST(Layers, ComponentInstanceFeatures) {
  auto g1 = parse_java_subset(
      "class A { void f() { x = b + c; d(x); } void h() { q(); } }"
      "class B { void f() { y = b + c; d(y); } }",
      "v1");
  auto g2 = parse_java_subset(
      "class A { void f() { x = b + c; d(x); } void h() { q(); } }"
      "class B { void f() { y = b + c; d(y); } } class K { void q() { k(); } }",
      "v2");
  auto r1 = refactor_graph(g1, detect_clones(g1));
  auto r2 = refactor_graph(g2, detect_clones(g2));
  ASSERT_EQ(r1.components.size(), 1u);
  auto p = integrate_variant(init_platform(r1.graph, r1.components), r2.graph, r2.components);
  auto fm = synthesize_feature_model(p);
  const auto& comp = r1.components[0];
  const auto core = *block_feature(fm, {"v1", "v2"});
  const auto& inst = fm.at(core + "." + comp.component_id);
  EXPECT_EQ(inst.layer_ref, comp.component_id);
  EXPECT_EQ(inst.parent, core);
  EXPECT_EQ(inst.variability, Variability::Mandatory);

  ASSERT_TRUE(fm.layers.count(comp.component_id));
  const auto& layer = fm.layers.at(comp.component_id);
  const auto slot = comp.component_id + ".P1";
  EXPECT_EQ(layer.at(slot).variability, Variability::Mandatory);
  ASSERT_EQ(layer.groups.size(), 1u);
  EXPECT_EQ(layer.groups[0].kind, GroupKind::Xor);
  std::set<std::string> values;
  for (const auto& m : layer.groups[0].members) values.insert(layer.at(m).value);
  EXPECT_EQ(values, (std::set<std::string>{"x", "y"}));
  for (const auto& f : layer.features) EXPECT_EQ(fm.find(f.name), nullptr);

  expect_sound(p, fm);
  for (const auto& v : p.variants)
    EXPECT_EQ(derive_variant(p, fm, variant_configuration(fm, v), v), derive_variant(p, v));

  // rebind both instances to y: a new product where A.f uses y
  auto c = variant_configuration(fm, "v1");
  c.layer_bindings[inst.name] = Binding{{{"P1", "y"}}, {}};
  EXPECT_TRUE(validate_configuration(fm, c).valid);
  auto derived = derive_variant(p, fm, c);
  visit_preorder(derived.root(), [](const ArtifactNode& n, int) {
    if (n.type == NodeType::Statement) {
      EXPECT_EQ(std::count(n.tokens.begin(), n.tokens.end(), "x"), 0);
    }
  });
  c.layer_bindings[inst.name] = Binding{{{"P9", "y"}}, {}};
  EXPECT_FALSE(validate_configuration(fm, c).valid);
  c.layer_bindings[inst.name] = Binding{{{"P1", "nope"}}, {}};
  EXPECT_FALSE(validate_configuration(fm, c).valid);
}

TEST(Documents, JsonAndText) {
  auto p = platform_of({"v1", "v2", "v3"}, {{"A", {"v1"}}, {"B", {"v2"}}});
  auto fm = synthesize_feature_model(p);
  auto back = feature_model_from_json(parse_json_text(feature_model_to_json(fm).dump()));
  EXPECT_EQ(back, fm);
  const auto text = feature_model_to_text(fm);
  EXPECT_NE(text.find("ROOT"), std::string::npos);
  EXPECT_NE(text.find("EXCLUDES"), std::string::npos);
  Configuration c{{"ROOT", "F_0"}, {{"F_0.c", Binding{{{"P1", "v"}}, {{3, true}}}}}};
  EXPECT_EQ(configuration_from_json(configuration_to_json(c)), c);
}
