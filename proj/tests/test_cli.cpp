#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "mple/cli.hpp"
#include "mple/mple.hpp"

using namespace mple;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = cli_dispatch(args, out, err);
  return {status, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mple_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  static std::string read(const std::string& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
};

const char* kV1 = "class A { void f() { x = b + c; d(x); } void h() { q(); } } class B { void f() { y = b + c; d(y); } }";
const char* kV2 = "class A { void f() { x = b + c; d(x); } void h() { q(); } } class C { int g() { return 1; } }";

}  // namespace

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).status, 2);
  EXPECT_EQ(run({"frobnicate"}).status, 2);
  EXPECT_EQ(run({"detect", write("a.java", kV1), "--bogus"}).status, 2);
  EXPECT_EQ(run({"integrate", write("b.java", kV1), "--order", "random"}).status, 2);
  EXPECT_EQ(run({"--help"}).status, 0);
}

TEST_F(CliTest, DomainErrorsExitOne) {
  auto r = run({"parse", write("bad.java", "class A { void m() { }")});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("line 1"), std::string::npos);
  EXPECT_EQ(run({"parse", path("missing.java")}).status, 1);
}

TEST_F(CliTest, ParseDetectRefactor) {
  const auto src = write("v1.java", kV1);
  auto p = run({"parse", src, "-o", path("v1.json")});
  ASSERT_EQ(p.status, 0) << p.err;
  const auto g = parse_generic_tree(read(path("v1.json")));
  EXPECT_EQ(g.variant_id(), "v1");

  auto d = run({"detect", path("v1.json")});
  ASSERT_EQ(d.status, 0) << d.err;
  const auto report = parse_json_text(d.out);
  ASSERT_EQ(report["classes"].size(), 1u);
  EXPECT_EQ(report["classes"][0]["clone_type"], "TYPE2");
  EXPECT_EQ(report["theta"], 0.75);

  auto r = run({"refactor", path("v1.json"), "-o", path("v1r.json")});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto bundle = parse_json_text(read(path("v1r.json")));
  EXPECT_EQ(bundle["components"].size(), 1u);
  // the refactor bundle is itself a readable variant input
  auto again = run({"detect", path("v1r.json")});
  EXPECT_EQ(again.status, 0) << again.err;
}

TEST_F(CliTest, IntegrateSynthesizeDerive) {
  write("v1.java", kV1);
  write("v2.java", kV2);
  ASSERT_EQ(run({"refactor", path("v1.java"), "-o", path("v1r.json")}).status, 0);
  auto i = run({"integrate", path("v1r.json"), path("v2.java"), "-o", path("platform.json")});
  ASSERT_EQ(i.status, 0) << i.err;

  auto d = run({"derive", path("platform.json"), "--variant", "v1"});
  ASSERT_EQ(d.status, 0) << d.err;
  const auto original = parse_java_subset(kV1, "v1");
  EXPECT_EQ(parse_generic_tree(d.out), original);
  EXPECT_EQ(run({"derive", path("platform.json"), "--variant", "nope"}).status, 1);
  EXPECT_EQ(run({"derive", path("platform.json"), "--variant", "v1", "--component", "x"}).status, 2);

  auto s = run({"synthesize", path("platform.json"), "-o", path("model.json")});
  ASSERT_EQ(s.status, 0) << s.err;
  auto t = run({"synthesize", path("platform.json"), "--text"});
  EXPECT_NE(t.out.find("ROOT"), std::string::npos);

  const auto fm = feature_model_from_json(parse_json_text(read(path("model.json"))));
  write("config.json", configuration_to_json(variant_configuration(fm, "v2")).dump());
  auto c = run({"derive", path("platform.json"), "--config", path("config.json"), "--model", path("model.json")});
  ASSERT_EQ(c.status, 0) << c.err;
  EXPECT_TRUE(content_equal(parse_generic_tree(c.out).root(), parse_java_subset(kV2).root()));

  Configuration bad{fm.names(), {}};
  write("bad.json", configuration_to_json(bad).dump());
  auto b = run({"derive", path("platform.json"), "--config", path("bad.json"), "--model", path("model.json")});
  EXPECT_EQ(b.status, 1);
  EXPECT_NE(b.err.find("invalid configuration"), std::string::npos);

  const auto platform = platform_from_json(parse_json_text(read(path("platform.json"))));
  ASSERT_EQ(platform.components.size(), 1u);
  const auto& comp = platform.components.begin()->second;
  write("binding.json", binding_to_json(Binding{{{"P1", "w"}}, {}}).dump());
  auto k = run({"derive", path("platform.json"), "--component", comp.component_id, "--binding", path("binding.json")});
  ASSERT_EQ(k.status, 0) << k.err;
  EXPECT_NE(k.out.find("\"w\""), std::string::npos);
}

TEST_F(CliTest, TaxonomyOrderFlag) {
  write("v1.java", kV1);
  write("v2.java", kV2);
  auto t = run({"taxonomy", path("v1.java"), path("v2.java")});
  ASSERT_EQ(t.status, 0) << t.err;
  EXPECT_EQ(parse_json_text(t.out)["merge_order"].size(), 2u);
  auto a = run({"integrate", path("v1.java"), path("v2.java"), "--order", "given"});
  auto b = run({"integrate", path("v2.java"), path("v1.java"), "--order", "given"});
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(canonical_form(platform_from_json(parse_json_text(a.out))),
            canonical_form(platform_from_json(parse_json_text(b.out))));
}

TEST_F(CliTest, GenerateAndEvaluateBundle) {
  const auto bundle = path("bench");
  auto g = run({"generate", "--seed", "3", "--variants", "3", "--type1", "2", "--type2", "2", "--type3", "2",
                "--nodes", "250", "-o", bundle});
  ASSERT_EQ(g.status, 0) << g.err;
  EXPECT_TRUE(fs::exists(fs::path(bundle) / "truth.json"));
  EXPECT_TRUE(fs::exists(fs::path(bundle) / "config.json"));
  EXPECT_TRUE(fs::exists(fs::path(bundle) / "v3.json"));

  auto e = run({"evaluate", bundle, "-o", path("report.json")});
  ASSERT_EQ(e.status, 0) << e.err;
  EXPECT_NE(e.out.find("round trip: 3/3"), std::string::npos);
  const auto report = parse_json_text(read(path("report.json")));
  EXPECT_TRUE(report.contains("metrics"));
  EXPECT_EQ(report["invariance"]["permutations_tested"], 6);
  EXPECT_EQ(report["config"]["overlap"], 0.7);

  auto again = run({"evaluate", bundle, "--order", "given", "--overlap", "0.8"});
  ASSERT_EQ(again.status, 0) << again.err;
  EXPECT_EQ(parse_json_text(again.out)["config"]["order"], "given");

  std::ofstream(fs::path(bundle) / "v9.json") << "{ not json";
  auto broken = run({"evaluate", bundle});
  EXPECT_EQ(broken.status, 1);
  EXPECT_NE(broken.err.find("stage parse"), std::string::npos);
}

TEST(CliBinary, ExitCodes) {
  auto status = [](const std::string& args) {
    const int raw = std::system((std::string(MPLE_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("--help"), 0);
  EXPECT_EQ(status("parse --no-such-flag x"), 2);
  EXPECT_EQ(status("parse /nonexistent/file.java"), 1);
  EXPECT_EQ(status(std::string("parse ") + MPLE_SAMPLES_DIR + "/shop_basic.java"), 0);
}
