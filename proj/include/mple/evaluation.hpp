#pragma once

// Scoring against ground truth and the end-to-end pipeline run.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mple/clone_detection.hpp"
#include "mple/clone_generator.hpp"
#include "mple/component.hpp"
#include "mple/error.hpp"
#include "mple/feature_model.hpp"
#include "mple/interchange.hpp"
#include "mple/platform.hpp"
#include "mple/variability_mining.hpp"

namespace mple {

/// A detected class tagged with its variant.
struct ReportedClass {
  std::string variant_id;
  CloneClass cls;
};

struct ClassMatch {
  std::size_t reported;  // index into the reported list
  std::size_t truth;     // index into the truth records
  double overlap;
};

inline double jaccard(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  std::set<NodeId> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::size_t inter = 0;
  for (auto x : sa) inter += sb.count(x);
  const auto uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Greedy one-to-one matching within each variant by descending member-set
/// overlap; pairs below the threshold are never matched.
inline std::vector<ClassMatch> match_clone_report(const std::vector<ReportedClass>& reported,
                                                  const std::vector<CloneRecord>& truth,
                                                  double overlap_threshold = 0.7) {
  if (!(overlap_threshold > 0.0 && overlap_threshold <= 1.0))
    throw PreconditionError("overlap threshold must lie in (0, 1]");
  struct Cand {
    double overlap;
    NodeId smallest;
    std::size_t r, t;
  };
  std::vector<Cand> cands;
  for (std::size_t r = 0; r < reported.size(); ++r)
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (reported[r].variant_id != truth[t].variant_id) continue;
      const double ov = jaccard(reported[r].cls.members, truth[t].members);
      if (ov < overlap_threshold) continue;
      NodeId smallest = ~NodeId{0};
      for (auto m : reported[r].cls.members) smallest = std::min(smallest, m);
      for (auto m : truth[t].members) smallest = std::min(smallest, m);
      cands.push_back({ov, smallest, r, t});
    }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.smallest != b.smallest) return a.smallest < b.smallest;
    if (a.r != b.r) return a.r < b.r;
    return a.t < b.t;
  });
  std::vector<bool> used_r(reported.size(), false), used_t(truth.size(), false);
  std::vector<ClassMatch> out;
  for (const auto& c : cands) {
    if (used_r[c.r] || used_t[c.t]) continue;
    used_r[c.r] = used_t[c.t] = true;
    out.push_back({c.r, c.t, c.overlap});
  }
  return out;
}

struct Counts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;

  double precision() const {
    const auto d = true_positives + false_positives;
    return d == 0 ? 1.0 : static_cast<double>(true_positives) / static_cast<double>(d);
  }
  double recall() const {
    const auto d = true_positives + false_negatives;
    return d == 0 ? 1.0 : static_cast<double>(true_positives) / static_cast<double>(d);
  }
  Counts& operator+=(const Counts& o) {
    true_positives += o.true_positives;
    false_positives += o.false_positives;
    false_negatives += o.false_negatives;
    return *this;
  }
};

/// True positives and misses count under the truth record's type and
/// granularity; false positives under the reported class's.
struct Metrics {
  std::map<std::pair<CloneType, NodeType>, Counts> cells;
  Counts total;

  Counts by_type(CloneType t) const {
    Counts c;
    for (const auto& [k, v] : cells)
      if (k.first == t) c += v;
    return c;
  }
  Counts by_granularity(NodeType g) const {
    Counts c;
    for (const auto& [k, v] : cells)
      if (k.second == g) c += v;
    return c;
  }
};

inline Metrics precision_recall(const std::vector<ReportedClass>& reported, const std::vector<CloneRecord>& truth,
                                double overlap_threshold = 0.7) {
  const auto matches = match_clone_report(reported, truth, overlap_threshold);
  std::vector<bool> hit_r(reported.size(), false), hit_t(truth.size(), false);
  Metrics m;
  for (const auto& x : matches) {
    hit_r[x.reported] = hit_t[x.truth] = true;
    ++m.cells[{truth[x.truth].clone_type, truth[x.truth].granularity}].true_positives;
  }
  for (std::size_t r = 0; r < reported.size(); ++r)
    if (!hit_r[r]) ++m.cells[{reported[r].cls.clone_type, reported[r].cls.granularity}].false_positives;
  for (std::size_t t = 0; t < truth.size(); ++t)
    if (!hit_t[t]) ++m.cells[{truth[t].clone_type, truth[t].granularity}].false_negatives;
  for (const auto& [_, c] : m.cells) m.total += c;
  return m;
}

/// Path of the first difference between two trees ("" when equal).
inline std::string first_difference(const ArtifactNode& a, const ArtifactNode& b, const std::string& path = "/") {
  if (a.type != b.type) return path + " (type)";
  if (a.label != b.label) return path + " (label)";
  if (a.tokens != b.tokens) return path + " (tokens)";
  if (a.attributes != b.attributes) return path + " (attributes)";
  const auto n = std::min(a.children.size(), b.children.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto d = first_difference(a.children[i], b.children[i], path + std::to_string(i) + "/");
    if (!d.empty()) return d;
  }
  if (a.children.size() != b.children.size()) return path + " (child count)";
  return {};
}

enum class IntegrationOrder { Given, Taxonomy };

struct EvalConfig {
  DetectionConfig detection{};
  double overlap = 0.7;
  IntegrationOrder order = IntegrationOrder::Taxonomy;
  std::size_t permutation_limit = 4;  // full invariance check up to this many variants
  bool refactor = true;
};

struct RoundTrip {
  std::string variant_id;
  bool ok = false;
  std::string first_diff;
};

struct EvalReport {
  std::optional<Metrics> metrics;  // only with ground truth
  std::vector<ReportedClass> reported;
  std::vector<RoundTrip> roundtrip;
  std::size_t permutations_tested = 0;
  bool invariance_all_equal = true;
  std::size_t platform_artifact_count = 0;
  std::size_t sum_variant_artifact_count = 0;
  std::size_t components = 0;
  std::size_t instances_checked = 0;
  std::size_t instances_faithful = 0;
  std::size_t unrefactored_members = 0;
  std::size_t features = 0;
  std::size_t constraints = 0;
  std::size_t groups = 0;
  std::vector<std::pair<std::string, double>> runtime_seconds;  // per stage, in run order
  std::optional<std::size_t> peak_rss_bytes;
  std::string canonical_digest;

  bool roundtrip_ok() const {
    return std::all_of(roundtrip.begin(), roundtrip.end(), [](const RoundTrip& r) { return r.ok; });
  }
};

/// Domain failure inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error("stage " + stage + " failed: " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

inline std::optional<std::size_t> peak_rss_bytes() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return std::nullopt;
  return static_cast<std::size_t>(usage.ru_maxrss) * 1024;  // kilobytes on Linux
}

/// Parses interchange documents, reporting any failure as stage "parse".
inline std::vector<ArtifactGraph> parse_variant_documents(const std::vector<std::string>& documents) {
  std::vector<ArtifactGraph> out;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    try {
      out.push_back(parse_generic_tree(documents[i]));
    } catch (const Error& e) {
      throw StageError("parse", "document " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

namespace detail {

template <typename Fn>
auto run_stage(EvalReport& report, const std::string& name, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      report.runtime_seconds.emplace_back(
          name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    } else {
      auto r = fn();
      report.runtime_seconds.emplace_back(
          name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      return r;
    }
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace detail

/// detect -> refactor -> taxonomy -> integrate -> synthesize -> derive, plus
/// the permutation check for small inputs.
inline EvalReport evaluate_pipeline(const std::vector<ArtifactGraph>& variants, const GroundTruth* truth,
                                    const EvalConfig& config = {}) {
  EvalReport report;
  if (variants.empty()) throw StageError("parse", "no variants given");

  std::vector<std::vector<CloneClass>> classes(variants.size());
  detail::run_stage(report, "detect", [&] {
    for (std::size_t i = 0; i < variants.size(); ++i) {
      classes[i] = detect_clones(variants[i], config.detection);
      for (const auto& c : classes[i]) report.reported.push_back({variants[i].variant_id(), c});
    }
  });
  if (truth) report.metrics = precision_recall(report.reported, truth->clone_records, config.overlap);

  std::vector<ArtifactGraph> stored;
  std::vector<ConfigurableComponent> components;
  detail::run_stage(report, "refactor", [&] {
    std::map<std::string, ConfigurableComponent> lib;
    for (std::size_t i = 0; i < variants.size(); ++i) {
      if (!config.refactor) {
        stored.push_back(variants[i]);
        continue;
      }
      auto r = refactor_graph(variants[i], classes[i], config.detection.weights);
      for (const auto& inst : r.instances) {
        ++report.instances_checked;
        const auto& comp = *std::find_if(r.components.begin(), r.components.end(),
                                         [&](const auto& c) { return c.component_id == inst.instance_of; });
        if (content_equal(expand_instance(comp, inst.binding), variants[i].at(inst.original_location)))
          ++report.instances_faithful;
      }
      report.unrefactored_members += r.unrefactored.size();
      for (auto& c : r.components) lib.emplace(c.component_id, std::move(c));
      stored.push_back(std::move(r.graph));
    }
    for (auto& [_, c] : lib) components.push_back(std::move(c));
    report.components = components.size();
  });

  IntegrationOptions opts{config.detection.theta, config.detection.weights};
  const auto taxonomy = detail::run_stage(report, "taxonomy", [&] {
    return mine_taxonomy(stored, config.detection.weights);
  });
  const auto platform = detail::run_stage(report, "integrate", [&] {
    return integrate_all(stored, config.order == IntegrationOrder::Taxonomy ? &taxonomy : nullptr, components,
                         opts);
  });
  report.platform_artifact_count = platform_size(platform.root);
  for (const auto& g : stored) report.sum_variant_artifact_count += g.size();
  {
    DigestBuilder b;
    b.text(canonical_form(platform));
    report.canonical_digest = b.finish().hex();
  }

  const auto fm = detail::run_stage(report, "synthesize", [&] { return synthesize_feature_model(platform); });
  std::size_t n_features = 0;
  for (const auto& f : fm.features) n_features += f.name != fm.root && !f.layer_ref;
  report.features = n_features;
  report.constraints = fm.constraints.size();
  report.groups = fm.groups.size();

  detail::run_stage(report, "derive", [&] {
    for (const auto& v : variants) {
      const auto derived = derive_variant(platform, v.variant_id());
      RoundTrip rt{v.variant_id(), false, first_difference(derived.root(), v.root())};
      if (rt.first_diff.empty()) {
        const auto by_config = derive_variant(platform, fm, variant_configuration(fm, v.variant_id()));
        rt.first_diff = first_difference(by_config.root(), v.root());
        if (!rt.first_diff.empty()) rt.first_diff = "configuration: " + rt.first_diff;
      }
      rt.ok = rt.first_diff.empty();
      report.roundtrip.push_back(std::move(rt));
    }
  });

  if (stored.size() <= config.permutation_limit) {
    detail::run_stage(report, "invariance", [&] {
      std::vector<std::size_t> perm(stored.size());
      for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
      const auto reference = canonical_form(platform);
      do {
        std::vector<ArtifactGraph> ordered;
        for (auto i : perm) ordered.push_back(stored[i]);
        ++report.permutations_tested;
        if (canonical_form(integrate_all(ordered, nullptr, components, opts)) != reference)
          report.invariance_all_equal = false;
      } while (std::next_permutation(perm.begin(), perm.end()));
    });
  }
  report.peak_rss_bytes = peak_rss_bytes();
  return report;
}

inline Json counts_to_json(const Counts& c) {
  return Json{{"true_positives", c.true_positives},
              {"false_positives", c.false_positives},
              {"false_negatives", c.false_negatives},
              {"precision", c.precision()},
              {"recall", c.recall()}};
}

inline Json metrics_to_json(const Metrics& m) {
  Json j;
  j["cells"] = Json::array();
  for (const auto& [k, c] : m.cells) {
    auto jc = counts_to_json(c);
    jc["clone_type"] = std::string(to_string(k.first));
    jc["granularity"] = std::string(to_string(k.second));
    j["cells"].push_back(std::move(jc));
  }
  j["by_type"] = Json::object();
  for (auto t : {CloneType::Type1, CloneType::Type2, CloneType::Type3})
    j["by_type"][std::string(to_string(t))] = counts_to_json(m.by_type(t));
  j["total"] = counts_to_json(m.total);
  return j;
}

/// Report document. Wall-clock and memory fields sit under "host" and are
/// left out when `with_host` is false.
inline Json eval_report_to_json(const EvalReport& r, const EvalConfig& config, bool with_host = true) {
  Json j;
  j["config"] = Json{{"theta", config.detection.theta},
                     {"min_tokens", config.detection.min_tokens},
                     {"overlap", config.overlap},
                     {"order", config.order == IntegrationOrder::Taxonomy ? "taxonomy" : "given"}};
  if (r.metrics) j["metrics"] = metrics_to_json(*r.metrics);
  j["reported_classes"] = r.reported.size();
  j["roundtrip"] = Json::array();
  for (const auto& rt : r.roundtrip)
    j["roundtrip"].push_back(Json{{"variant_id", rt.variant_id}, {"ok", rt.ok}, {"first_diff", rt.first_diff}});
  j["invariance"] = Json{{"permutations_tested", r.permutations_tested}, {"all_equal", r.invariance_all_equal}};
  j["platform_artifact_count"] = r.platform_artifact_count;
  j["sum_variant_artifact_count"] = r.sum_variant_artifact_count;
  j["components"] = Json{{"count", r.components},
                         {"instances_checked", r.instances_checked},
                         {"instances_faithful", r.instances_faithful},
                         {"unrefactored_members", r.unrefactored_members}};
  j["feature_model"] = Json{{"features", r.features}, {"constraints", r.constraints}, {"groups", r.groups}};
  j["canonical_digest"] = r.canonical_digest;
  if (with_host) {
    Json host;
    host["runtime_seconds"] = Json::object();
    for (const auto& [stage, s] : r.runtime_seconds) host["runtime_seconds"][stage] = s;
    if (r.peak_rss_bytes) host["peak_rss_bytes"] = *r.peak_rss_bytes;
    j["host"] = std::move(host);
  }
  return j;
}

inline std::string eval_summary(const EvalReport& r) {
  std::string s;
  auto line = [&](const std::string& x) { s += x + "\n"; };
  if (r.metrics) {
    for (auto t : {CloneType::Type1, CloneType::Type2, CloneType::Type3}) {
      const auto c = r.metrics->by_type(t);
      line(std::string(to_string(t)) + ": precision " + std::to_string(c.precision()) + ", recall " +
           std::to_string(c.recall()));
    }
  }
  std::size_t ok = 0;
  for (const auto& rt : r.roundtrip) ok += rt.ok;
  line("round trip: " + std::to_string(ok) + "/" + std::to_string(r.roundtrip.size()) + " variants");
  if (r.permutations_tested)
    line("order invariance: " + std::to_string(r.permutations_tested) + " permutations, " +
         (r.invariance_all_equal ? "all equal" : "DIFFERENT"));
  line("artifacts: platform " + std::to_string(r.platform_artifact_count) + " vs variants " +
       std::to_string(r.sum_variant_artifact_count));
  line("features " + std::to_string(r.features) + ", constraints " + std::to_string(r.constraints) +
       ", components " + std::to_string(r.components));
  for (const auto& [stage, sec] : r.runtime_seconds) line("  " + stage + ": " + std::to_string(sec) + " s");
  if (r.peak_rss_bytes) line("peak RSS: " + std::to_string(*r.peak_rss_bytes / 1024) + " KiB");
  return s;
}

}  // namespace mple
