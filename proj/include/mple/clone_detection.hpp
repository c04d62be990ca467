#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mple/artifact_graph.hpp"
#include "mple/canonical_hash.hpp"
#include "mple/error.hpp"
#include "mple/interchange.hpp"
#include "mple/similarity.hpp"

namespace mple {

enum class CloneType { Type1, Type2, Type3 };

inline std::string_view to_string(CloneType t) {
  switch (t) {
    case CloneType::Type1: return "TYPE1";
    case CloneType::Type2: return "TYPE2";
    default: return "TYPE3";
  }
}

inline std::optional<CloneType> clone_type_from_string(std::string_view s) {
  if (s == "TYPE1") return CloneType::Type1;
  if (s == "TYPE2") return CloneType::Type2;
  if (s == "TYPE3") return CloneType::Type3;
  return std::nullopt;
}

struct DetectionConfig {
  double theta = 0.75;
  std::size_t min_tokens = 8;
  std::set<NodeType> granularities{NodeType::Class, NodeType::Method, NodeType::Block};
  SimilarityWeights weights{};

  void validate() const {
    if (!(theta > 0.0 && theta <= 1.0))
      throw PreconditionError("similarity threshold must lie in (0, 1]");
    if (min_tokens < 1) throw PreconditionError("min_tokens must be at least 1");
  }
};

struct CloneClass {
  NodeType granularity = NodeType::Method;
  CloneType clone_type = CloneType::Type3;
  std::vector<NodeId> members;  // ascending
  NodeId representative = 0;

  friend bool operator==(const CloneClass&, const CloneClass&) = default;
};

/// TYPE1 when every EXACT hash agrees, TYPE2 when every ABSTRACTED hash
/// agrees, TYPE3 otherwise.
inline CloneType classify_clone(const CloneClass& cls, const HashIndex& hashes) {
  if (cls.members.empty()) return CloneType::Type1;
  const auto first = cls.members.front();
  const bool exact = std::all_of(cls.members.begin(), cls.members.end(), [&](NodeId m) {
    return hashes.exact(m) == hashes.exact(first);
  });
  if (exact) return CloneType::Type1;
  const bool abstracted = std::all_of(cls.members.begin(), cls.members.end(), [&](NodeId m) {
    return hashes.abstracted(m) == hashes.abstracted(first);
  });
  return abstracted ? CloneType::Type2 : CloneType::Type3;
}

inline CloneType classify_clone(const CloneClass& cls, const ArtifactGraph& graph) {
  return classify_clone(cls, HashIndex(graph));
}

namespace detail {

struct Cluster {
  NodeId rep;
  std::vector<NodeId> members;
};

// Drops members that overlap an already claimed subtree, coarse classes
// first, and removes classes left with fewer than two members.
inline std::vector<CloneClass> prune_overlaps(std::vector<CloneClass> classes,
                                              const ArtifactGraph& graph,
                                              const HashIndex& hashes) {
  auto min_depth = [&](const CloneClass& c) {
    int d = 1 << 30;
    for (auto m : c.members) d = std::min(d, graph.depth(m));
    return d;
  };
  std::stable_sort(classes.begin(), classes.end(), [&](const CloneClass& a, const CloneClass& b) {
    const int ga = granularity_rank(a.granularity), gb = granularity_rank(b.granularity);
    if (ga != gb) return ga < gb;
    const int da = min_depth(a), db = min_depth(b);
    if (da != db) return da < db;
    return hashes.exact(a.representative) < hashes.exact(b.representative);
  });
  std::set<NodeId> claimed;
  auto overlaps = [&](NodeId m) {
    for (NodeId a = m; a != 0;) {
      a = graph.parent(a);
      if (claimed.count(a)) return true;
    }
    if (claimed.count(m)) return true;
    auto it = claimed.upper_bound(m);
    return it != claimed.end() && graph.is_ancestor(m, *it);
  };
  std::vector<CloneClass> kept;
  for (auto& c : classes) {
    std::vector<NodeId> members;
    for (auto m : c.members) {  // ascending ids: ancestors come first
      if (overlaps(m)) continue;
      bool nested = std::any_of(members.begin(), members.end(),
                                [&](NodeId k) { return graph.is_ancestor(k, m); });
      if (!nested) members.push_back(m);
    }
    if (members.size() < 2) continue;
    for (auto m : members) claimed.insert(m);
    c.members = std::move(members);
    kept.push_back(std::move(c));
  }
  return kept;
}

}  // namespace detail

/// Clone classes of one variant, every configured granularity. Output is
/// sorted by (granularity, first member) and independent of id order.
inline std::vector<CloneClass> detect_clones(const ArtifactGraph& graph,
                                             const DetectionConfig& config = {}) {
  config.validate();
  const HashIndex hashes(graph);
  SimilarityEngine engine(config.weights);

  std::vector<std::size_t> mass(graph.size(), 0);
  for (std::size_t i = graph.size(); i-- > 0;) {
    const auto* n = graph.nodes()[i];
    mass[i] = n->tokens.size();
    for (const auto& c : n->children) mass[i] += mass[c.id];
  }

  std::vector<CloneClass> all;
  for (const NodeType gran : config.granularities) {
    std::vector<NodeId> cands;
    for (const auto* n : graph.nodes())
      if (n->type == gran && mass[n->id] >= config.min_tokens) cands.push_back(n->id);
    const auto by_exact = [&](NodeId a, NodeId b) {
      if (hashes.exact(a) != hashes.exact(b)) return hashes.exact(a) < hashes.exact(b);
      return a < b;
    };
    std::sort(cands.begin(), cands.end(), by_exact);

    std::vector<detail::Cluster> clusters;
    std::vector<NodeId> rest;
    for (std::size_t i = 0; i < cands.size();) {
      std::size_t j = i;
      while (j < cands.size() && hashes.exact(cands[j]) == hashes.exact(cands[i])) ++j;
      if (j - i >= 2)
        clusters.push_back({cands[i], {cands.begin() + static_cast<long>(i),
                                       cands.begin() + static_cast<long>(j)}});
      else
        rest.push_back(cands[i]);
      i = j;
    }

    std::vector<NodeId> by_abs = rest;
    std::stable_sort(by_abs.begin(), by_abs.end(), [&](NodeId a, NodeId b) {
      return hashes.abstracted(a) < hashes.abstracted(b);
    });
    std::set<NodeId> grouped;
    for (std::size_t i = 0; i < by_abs.size();) {
      std::size_t j = i;
      while (j < by_abs.size() && hashes.abstracted(by_abs[j]) == hashes.abstracted(by_abs[i])) ++j;
      if (j - i >= 2) {
        std::vector<NodeId> members(by_abs.begin() + static_cast<long>(i),
                                    by_abs.begin() + static_cast<long>(j));
        std::sort(members.begin(), members.end(), by_exact);
        clusters.push_back({members.front(), members});
        grouped.insert(members.begin(), members.end());
      }
      i = j;
    }

    for (NodeId cand : rest) {  // still in EXACT-hash order
      if (grouped.count(cand)) continue;
      const auto& node = graph.at(cand);
      bool placed = false;
      for (auto& cl : clusters) {
        const auto& rep = graph.at(cl.rep);
        if (engine.upper_bound(rep, node) < config.theta) continue;
        if (engine(rep, node) >= config.theta) {
          cl.members.push_back(cand);
          placed = true;
          break;
        }
      }
      if (!placed) clusters.push_back({cand, {cand}});
    }

    for (auto& cl : clusters) {
      if (cl.members.size() < 2) continue;
      CloneClass cls;
      cls.granularity = gran;
      cls.members = cl.members;
      std::sort(cls.members.begin(), cls.members.end());
      cls.representative = *std::min_element(cl.members.begin(), cl.members.end(), by_exact);
      all.push_back(std::move(cls));
    }
  }

  auto kept = detail::prune_overlaps(std::move(all), graph, hashes);
  for (auto& c : kept) {
    const auto by_exact = [&](NodeId a, NodeId b) {
      if (hashes.exact(a) != hashes.exact(b)) return hashes.exact(a) < hashes.exact(b);
      return a < b;
    };
    c.representative = *std::min_element(c.members.begin(), c.members.end(), by_exact);
    c.clone_type = classify_clone(c, hashes);
  }
  std::sort(kept.begin(), kept.end(), [](const CloneClass& a, const CloneClass& b) {
    if (a.granularity != b.granularity)
      return granularity_rank(a.granularity) < granularity_rank(b.granularity);
    return a.members < b.members;
  });
  return kept;
}

inline Json clone_class_to_json(const CloneClass& c) {
  Json j;
  j["granularity"] = std::string(to_string(c.granularity));
  j["clone_type"] = std::string(to_string(c.clone_type));
  j["members"] = c.members;
  j["representative"] = c.representative;
  return j;
}

inline CloneClass clone_class_from_json(const Json& j) {
  CloneClass c;
  const auto gran = node_type_from_string(j.at("granularity").get<std::string>());
  const auto type = clone_type_from_string(j.at("clone_type").get<std::string>());
  if (!gran || !type) throw ParseError("bad clone class entry", "/classes");
  c.granularity = *gran;
  c.clone_type = *type;
  c.members = j.at("members").get<std::vector<NodeId>>();
  std::sort(c.members.begin(), c.members.end());
  c.representative = j.at("representative").get<NodeId>();
  return c;
}

/// Clone report document.
inline Json clone_report_to_json(const std::string& variant_id,
                                 const std::vector<CloneClass>& classes,
                                 const DetectionConfig& config) {
  Json j;
  j["variant_id"] = variant_id;
  j["theta"] = config.theta;
  j["min_tokens"] = config.min_tokens;
  j["granularities"] = Json::array();
  for (auto g : config.granularities) j["granularities"].push_back(std::string(to_string(g)));
  j["classes"] = Json::array();
  for (const auto& c : classes) j["classes"].push_back(clone_class_to_json(c));
  return j;
}

}  // namespace mple
