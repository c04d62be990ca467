#pragma once

// Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mple/clone_detection.hpp"
#include "mple/clone_generator.hpp"
#include "mple/component.hpp"
#include "mple/error.hpp"
#include "mple/evaluation.hpp"
#include "mple/feature_model.hpp"
#include "mple/interchange.hpp"
#include "mple/java_subset.hpp"
#include "mple/platform.hpp"
#include "mple/variability_mining.hpp"

namespace mple {

namespace cli {

namespace fs = std::filesystem;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// A variant document, optionally with the components its INSTANCE_REF
/// nodes use (as written by `refactor`).
struct LoadedVariant {
  ArtifactGraph graph;
  std::vector<ConfigurableComponent> components;
};

inline LoadedVariant load_variant(const std::string& path) {
  const auto text = read_file(path);
  const auto ext = fs::path(path).extension().string();
  if (ext == ".java") return {parse_java_subset(text, fs::path(path).stem().string()), {}};
  const auto j = parse_json_text(text);
  if (j.is_object() && j.contains("graph")) {
    LoadedVariant v{graph_from_json(j.at("graph")), {}};
    if (j.contains("components"))
      for (const auto& c : j.at("components")) v.components.push_back(component_from_json(c));
    return v;
  }
  return {graph_from_json(j), {}};
}

// Variant files of a benchmark directory: every *.json except the truth and
// config documents, in name order.
inline std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    if (!fs::is_directory(in)) {
      out.push_back(in);
      continue;
    }
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(in)) {
      const auto name = e.path().filename().string();
      if (e.path().extension() == ".json" && name != "truth.json" && name != "config.json" &&
          name != "report.json")
        files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end(), [](const std::string& a, const std::string& b) {
      const auto sa = fs::path(a).stem().string(), sb = fs::path(b).stem().string();
      if (sa.size() != sb.size()) return sa.size() < sb.size();  // v2 before v10
      return sa < sb;
    });
    out.insert(out.end(), files.begin(), files.end());
  }
  return out;
}

struct Common {
  double theta = 0.75;
  std::size_t min_tokens = 8;
  std::string output;

  DetectionConfig detection() const {
    DetectionConfig c;
    c.theta = theta;
    c.min_tokens = min_tokens;
    return c;
  }
};

inline void add_thresholds(CLI::App* app, Common& c) {
  app->add_option("--theta", c.theta, "similarity threshold in (0,1]")->capture_default_str();
  app->add_option("--min-tokens", c.min_tokens, "minimum token mass of a clone candidate")->capture_default_str();
}

}  // namespace cli

inline int cli_dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  using namespace cli;
  CLI::App app{"Product-line extraction from clone-and-own variants"};
  app.require_subcommand(1);
  Common common;

  // parse
  std::string parse_input, parse_id;
  auto* parse = app.add_subcommand("parse", "parse Java-subset source or a generic tree into a variant document");
  parse->add_option("input", parse_input, "source file (.java) or tree document")->required();
  parse->add_option("--variant-id", parse_id, "variant id (defaults to the file stem)");
  parse->add_option("-o,--output", common.output, "output file (stdout when omitted)");

  // detect
  std::string detect_input;
  auto* detect = app.add_subcommand("detect", "report clone classes of one variant");
  detect->add_option("input", detect_input, "variant document")->required();
  add_thresholds(detect, common);
  detect->add_option("-o,--output", common.output, "output file");

  // refactor
  std::string refactor_input;
  auto* refactor = app.add_subcommand("refactor", "replace detected clones by configurable components");
  refactor->add_option("input", refactor_input, "variant document")->required();
  add_thresholds(refactor, common);
  refactor->add_option("-o,--output", common.output, "output file");

  // taxonomy
  std::vector<std::string> taxonomy_inputs;
  auto* taxonomy = app.add_subcommand("taxonomy", "similarity matrix and merge order of variants");
  taxonomy->add_option("inputs", taxonomy_inputs, "variant documents or a benchmark directory")->required();
  taxonomy->add_option("-o,--output", common.output, "output file");

  // integrate
  std::vector<std::string> integrate_inputs;
  std::string order = "taxonomy";
  auto* integrate = app.add_subcommand("integrate", "merge variants into an integrated platform");
  integrate->add_option("inputs", integrate_inputs, "variant documents or a benchmark directory")->required();
  integrate->add_option("--theta", common.theta, "similarity threshold in (0,1]")->capture_default_str();
  integrate->add_option("--order", order, "integration order")
      ->check(CLI::IsMember({"given", "taxonomy"}))
      ->capture_default_str();
  integrate->add_option("-o,--output", common.output, "output file");

  // synthesize
  std::string synth_input;
  bool synth_text = false;
  auto* synthesize = app.add_subcommand("synthesize", "derive a feature model from a platform");
  synthesize->add_option("input", synth_input, "platform document")->required();
  synthesize->add_flag("--text", synth_text, "write the human-readable tree instead of JSON");
  synthesize->add_option("-o,--output", common.output, "output file");

  // derive
  std::string derive_input, derive_variant_id, derive_config, derive_model, derive_component_id, derive_binding;
  auto* derive = app.add_subcommand("derive", "derive a variant or component from a platform");
  derive->add_option("input", derive_input, "platform document")->required();
  auto* opt_variant = derive->add_option("--variant", derive_variant_id, "original variant id");
  auto* opt_config = derive->add_option("--config", derive_config, "configuration document");
  derive->add_option("--model", derive_model, "feature model document (with --config)");
  auto* opt_component = derive->add_option("--component", derive_component_id, "component id");
  derive->add_option("--binding", derive_binding, "binding document (with --component)");
  opt_variant->excludes(opt_config)->excludes(opt_component);
  opt_config->excludes(opt_component);
  derive->add_option("-o,--output", common.output, "output file");

  // generate
  GeneratorConfig gen;
  std::size_t gen_type1 = 0, gen_type2 = 0, gen_type3 = 0, gen_nodes = 500;
  std::string gen_seed_file, gen_dir;
  auto* generate = app.add_subcommand("generate", "write a synthetic benchmark bundle");
  generate->add_option("--seed", gen.rng_seed, "random seed")->capture_default_str();
  generate->add_option("--variants", gen.variant_count, "number of variants")->capture_default_str();
  generate->add_option("--type1", gen_type1, "TYPE1 clones per variant");
  generate->add_option("--type2", gen_type2, "TYPE2 clones per variant");
  generate->add_option("--type3", gen_type3, "TYPE3 clones per variant");
  generate->add_option("--max-edits", gen.type3_max_edits, "edits per TYPE3 clone")->capture_default_str();
  generate->add_option("--rate", gen.variant_mutation_rate, "variant mutation rate")->capture_default_str();
  generate->add_option("--nodes", gen_nodes, "size of the synthetic seed")->capture_default_str();
  generate->add_option("--min-tokens", gen.min_tokens, "minimum host token mass")->capture_default_str();
  generate->add_option("--from", gen_seed_file, "seed variant document instead of a synthetic seed");
  generate->add_option("-o,--output", gen_dir, "bundle directory")->required();

  // evaluate
  std::vector<std::string> eval_inputs;
  std::string eval_truth;
  EvalConfig eval;
  std::uint64_t eval_seed = 0;
  auto* evaluate = app.add_subcommand("evaluate", "run the whole pipeline and score it");
  evaluate->add_option("inputs", eval_inputs, "benchmark directory or variant documents")->required();
  evaluate->add_option("--truth", eval_truth, "truth document (defaults to <dir>/truth.json)");
  add_thresholds(evaluate, common);
  evaluate->add_option("--overlap", eval.overlap, "class matching overlap threshold")->capture_default_str();
  evaluate->add_option("--order", order, "integration order")
      ->check(CLI::IsMember({"given", "taxonomy"}))
      ->capture_default_str();
  evaluate->add_option("--seed", eval_seed, "accepted for uniformity; evaluation draws no random numbers");
  evaluate->add_option("-o,--output", common.output, "report file");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return 2;
  }

  try {
    if (*parse) {
      const auto text = read_file(parse_input);
      const auto id = parse_id.empty() ? fs::path(parse_input).stem().string() : parse_id;
      ArtifactGraph g = fs::path(parse_input).extension() == ".java" ? parse_java_subset(text, id)
                                                                     : parse_generic_tree(text);
      if (!parse_id.empty()) g = g.renamed(parse_id);
      write_text(serialize_graph(g), common.output, out);
    } else if (*detect) {
      const auto v = load_variant(detect_input);
      const auto cfg = common.detection();
      write_text(dump(clone_report_to_json(v.graph.variant_id(), detect_clones(v.graph, cfg), cfg)), common.output,
                 out);
    } else if (*refactor) {
      const auto v = load_variant(refactor_input);
      const auto cfg = common.detection();
      const auto r = refactor_graph(v.graph, detect_clones(v.graph, cfg), cfg.weights);
      Json j;
      j["graph"] = graph_to_json(r.graph);
      j["components"] = Json::array();
      for (const auto& c : v.components) j["components"].push_back(component_to_json(c));
      for (const auto& c : r.components) j["components"].push_back(component_to_json(c));
      j["unrefactored"] = r.unrefactored;
      write_text(dump(j), common.output, out);
    } else if (*taxonomy) {
      std::vector<ArtifactGraph> gs;
      for (const auto& p : expand_inputs(taxonomy_inputs)) gs.push_back(load_variant(p).graph);
      write_text(dump(taxonomy_to_json(mine_taxonomy(gs))), common.output, out);
    } else if (*integrate) {
      std::vector<ArtifactGraph> gs;
      std::vector<ConfigurableComponent> comps;
      for (const auto& p : expand_inputs(integrate_inputs)) {
        auto v = load_variant(p);
        gs.push_back(std::move(v.graph));
        comps.insert(comps.end(), v.components.begin(), v.components.end());
      }
      IntegrationOptions opts;
      opts.theta = common.theta;
      std::optional<Taxonomy> tax;
      if (order == "taxonomy") tax = mine_taxonomy(gs);
      const auto platform = integrate_all(gs, tax ? &*tax : nullptr, comps, opts);
      write_text(dump(platform_to_json(platform)), common.output, out);
    } else if (*synthesize) {
      const auto platform = platform_from_json(parse_json_text(read_file(synth_input)));
      const auto fm = synthesize_feature_model(platform);
      write_text(synth_text ? feature_model_to_text(fm) : dump(feature_model_to_json(fm)), common.output, out);
    } else if (*derive) {
      const auto platform = platform_from_json(parse_json_text(read_file(derive_input)));
      if (!derive_variant_id.empty()) {
        write_text(serialize_graph(derive_variant(platform, derive_variant_id)), common.output, out);
      } else if (!derive_config.empty()) {
        const auto fm = derive_model.empty() ? synthesize_feature_model(platform)
                                             : feature_model_from_json(parse_json_text(read_file(derive_model)));
        const auto cfg = configuration_from_json(parse_json_text(read_file(derive_config)));
        write_text(serialize_graph(derive_variant(platform, fm, cfg)), common.output, out);
      } else if (!derive_component_id.empty()) {
        Binding b;
        if (!derive_binding.empty()) b = binding_from_json(parse_json_text(read_file(derive_binding)));
        const auto node = derive_component(platform, derive_component_id, b);
        write_text(dump(node_to_json(node)), common.output, out);
      } else {
        err << "usage error: derive needs --variant, --config or --component\n";
        return 2;
      }
    } else if (*generate) {
      if (gen_type1) gen.clones_per_variant[CloneType::Type1] = gen_type1;
      if (gen_type2) gen.clones_per_variant[CloneType::Type2] = gen_type2;
      if (gen_type3) gen.clones_per_variant[CloneType::Type3] = gen_type3;
      ArtifactGraph seed;
      if (gen_seed_file.empty()) {
        SeedOptions so;
        so.target_nodes = gen_nodes;
        so.min_tokens = gen.min_tokens;
        so.rng_seed = gen.rng_seed;
        seed = synthetic_seed(so);
      } else {
        seed = load_variant(gen_seed_file).graph;
      }
      const auto bench = generate_benchmark(seed, gen);
      fs::create_directories(gen_dir);
      for (const auto& v : bench.variants)
        write_text(serialize_graph(v), (fs::path(gen_dir) / (v.variant_id() + ".json")).string(), out);
      write_text(dump(truth_to_json(bench.truth)), (fs::path(gen_dir) / "truth.json").string(), out);
      write_text(dump(generator_config_to_json(gen)), (fs::path(gen_dir) / "config.json").string(), out);
      out << "wrote " << bench.variants.size() << " variants and " << bench.truth.clone_records.size()
          << " clone records to " << gen_dir << "\n";
    } else if (*evaluate) {
      eval.detection = common.detection();
      eval.order = order == "given" ? IntegrationOrder::Given : IntegrationOrder::Taxonomy;
      std::vector<ArtifactGraph> gs;
      std::optional<GroundTruth> truth;
      try {
        for (const auto& p : expand_inputs(eval_inputs)) gs.push_back(load_variant(p).graph);
        std::string tpath = eval_truth;
        if (tpath.empty() && eval_inputs.size() == 1 && fs::is_directory(eval_inputs[0]) &&
            fs::exists(fs::path(eval_inputs[0]) / "truth.json"))
          tpath = (fs::path(eval_inputs[0]) / "truth.json").string();
        if (!tpath.empty()) truth = truth_from_json(parse_json_text(read_file(tpath)));
      } catch (const Error& e) {
        throw StageError("parse", e.what());
      }
      const auto report = evaluate_pipeline(gs, truth ? &*truth : nullptr, eval);
      if (common.output.empty()) {
        out << dump(eval_report_to_json(report, eval));
      } else {
        write_text(dump(eval_report_to_json(report, eval)), common.output, out);
        out << eval_summary(report);
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

inline int cli_dispatch(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_dispatch(args, out, err);
}

}  // namespace mple
