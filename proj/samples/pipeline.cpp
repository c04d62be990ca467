// Walks three hand-written shop variants through the whole pipeline:
// parse, detect, refactor, taxonomy, integrate, synthesize, derive.
//
//   sample_pipeline [samples-dir]

#include <fstream>
#include <iostream>
#include <sstream>

#include "mple/mple.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mple::Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mple;
  const std::string dir = argc > 1 ? argv[1] : MPLE_SAMPLES_DIR;
  try {
    std::vector<ArtifactGraph> variants;
    for (const char* name : {"basic", "discount", "loyalty"})
      variants.push_back(parse_java_subset(read_file(dir + "/shop_" + std::string(name) + ".java"), name));

    std::vector<ArtifactGraph> refactored;
    std::map<std::string, ConfigurableComponent> library;
    for (const auto& v : variants) {
      const auto classes = detect_clones(v);
      std::cout << v.variant_id() << ": " << v.size() << " nodes, " << classes.size() << " clone classes\n";
      for (const auto& c : classes)
        std::cout << "  " << to_string(c.clone_type) << " " << to_string(c.granularity) << " x"
                  << c.members.size() << "\n";
      auto r = refactor_graph(v, classes);
      for (auto& c : r.components) library.emplace(c.component_id, std::move(c));
      refactored.push_back(std::move(r.graph));
    }
    std::vector<ConfigurableComponent> components;
    for (auto& [_, c] : library) components.push_back(c);

    const auto taxonomy = mine_taxonomy(refactored);
    std::cout << "merge order:";
    for (const auto& id : taxonomy.merge_order) std::cout << " " << id;
    std::cout << "\n";

    const auto platform = integrate_all(refactored, &taxonomy, components);
    std::cout << "platform nodes: " << platform_size(platform.root) << "\n";

    const auto fm = synthesize_feature_model(platform);
    std::cout << feature_model_to_text(fm);

    for (const auto& v : variants) {
      const auto config = variant_configuration(fm, v.variant_id());
      const auto derived = expand_all(derive_variant(platform, fm, config), platform.components);
      const bool same = content_equal(derived.root(), v.root());
      std::cout << "derive " << v.variant_id() << ": " << (same ? "identical" : "DIFFERENT") << "\n";
      if (!same) return 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
