#pragma once

// Integrated platform: a superset tree whose nodes record which variants
// contain them and where they sit among their siblings in each variant.
//
// Integration is content-only. Sibling candidates are grouped by their own
// content (type, label, tokens, attributes); inside a group, members are
// clustered by tiered agreement (EXACT hash, ABSTRACTED hash, similarity >=
// theta), never joining two members of the same variant. The incremental
// step only re-clusters groups that are ambiguous (more than one member from
// some side), so the platform after integrating a set of variants equals the
// batch clustering of that set, whatever the order.

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mple/artifact_graph.hpp"
#include "mple/canonical_hash.hpp"
#include "mple/component.hpp"
#include "mple/error.hpp"
#include "mple/interchange.hpp"
#include "mple/presence_condition.hpp"
#include "mple/similarity.hpp"
#include "mple/variability_mining.hpp"

namespace mple {

struct PlatformNode {
  std::uint32_t pid = 0;
  NodeType type = NodeType::System;
  std::string label;
  std::vector<std::string> tokens;
  std::map<std::string, std::string> attributes;
  std::vector<PlatformNode> children;  // canonical order
  std::set<std::string> variant_set;
  std::map<std::string, std::uint32_t> ordering_keys;
  std::optional<Condition> presence_condition;
  std::set<Digest> member_hashes;
};

struct IntegratedPlatform {
  PlatformNode root;
  std::set<std::string> variants;
  ComponentLibrary components;
};

struct IntegrationOptions {
  double theta = 0.75;
  SimilarityWeights weights{};
};

template <typename Fn>
void visit_platform(const PlatformNode& n, Fn&& fn) {
  fn(n);
  for (const auto& c : n.children) visit_platform(c, fn);
}

template <typename Fn>
void visit_platform_mut(PlatformNode& n, Fn&& fn) {
  fn(n);
  for (auto& c : n.children) visit_platform_mut(c, fn);
}

inline std::size_t platform_size(const PlatformNode& n) {
  std::size_t k = 1;
  for (const auto& c : n.children) k += platform_size(c);
  return k;
}

namespace detail {

inline Digest own_key(NodeType type, const std::string& label, const std::vector<std::string>& tokens,
                      const std::map<std::string, std::string>& attributes) {
  DigestBuilder b;
  b.byte('O').byte(static_cast<std::uint8_t>(type)).text(label);
  b.u64(tokens.size());
  for (const auto& t : tokens) b.text(t);
  b.u64(attributes.size());
  for (const auto& [k, v] : attributes) b.text(k).text(v);
  return b.finish();
}

inline Digest own_key(const ArtifactNode& n) { return own_key(n.type, n.label, n.tokens, n.attributes); }
inline Digest own_key(const PlatformNode& n) { return own_key(n.type, n.label, n.tokens, n.attributes); }

/// Concrete subtree of one variant.
inline ArtifactNode project(const PlatformNode& p, const std::string& variant) {
  ArtifactNode n;
  n.type = p.type;
  n.label = p.label;
  n.tokens = p.tokens;
  n.attributes = p.attributes;
  std::vector<const PlatformNode*> kids;
  for (const auto& c : p.children)
    if (c.variant_set.count(variant)) kids.push_back(&c);
  std::stable_sort(kids.begin(), kids.end(), [&](auto* a, auto* b) {
    return a->ordering_keys.at(variant) < b->ordering_keys.at(variant);
  });
  for (const auto* c : kids) n.children.push_back(project(*c, variant));
  return n;
}

inline Digest platform_digest(const PlatformNode& n) {
  DigestBuilder b;
  b.digest(own_key(n));
  b.u64(n.variant_set.size());
  for (const auto& v : n.variant_set) b.text(v);
  for (const auto& [v, k] : n.ordering_keys) b.text(v).u64(k);
  b.text(n.presence_condition ? to_string(*n.presence_condition) : std::string("-"));
  b.u64(n.children.size());
  for (const auto& c : n.children) b.digest(platform_digest(c));
  return b.finish();
}

/// Sorts children bottom-up by platform digest and renumbers pids.
inline void canonicalize(PlatformNode& root) {
  std::function<Digest(PlatformNode&)> sort_rec = [&](PlatformNode& n) {
    std::vector<std::pair<Digest, PlatformNode>> keyed;
    keyed.reserve(n.children.size());
    for (auto& c : n.children) {
      const Digest d = sort_rec(c);
      keyed.emplace_back(d, std::move(c));
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    n.children.clear();
    for (auto& [_, c] : keyed) n.children.push_back(std::move(c));
    return platform_digest(n);
  };
  sort_rec(root);
  std::uint32_t next = 0;
  visit_platform_mut(root, [&](PlatformNode& n) { n.pid = next++; });
}

struct Member {
  std::string variant;
  const ArtifactNode* node;
  std::uint32_t position;
};

class Integrator {
 public:
  explicit Integrator(const IntegrationOptions& opts) : opts_(opts), engine_(opts.weights) {}

  PlatformNode build(const std::vector<Member>& members) {
    const auto& first = *members.front().node;
    PlatformNode p;
    p.type = first.type;
    p.label = first.label;
    p.tokens = first.tokens;
    p.attributes = first.attributes;
    std::optional<Condition> cond;
    bool conflict = false;
    for (const auto& m : members) {
      p.variant_set.insert(m.variant);
      p.ordering_keys[m.variant] = m.position;
      p.member_hashes.insert(exact(*m.node));
      if (auto it = conditions_.find(m.node); it != conditions_.end()) {
        if (cond && !(*cond == it->second)) conflict = true;
        cond = it->second;
      }
    }
    if (cond && !conflict) p.presence_condition = cond;
    std::vector<Member> kids;
    for (const auto& m : members)
      for (std::size_t i = 0; i < m.node->children.size(); ++i)
        kids.push_back({m.variant, &m.node->children[i], static_cast<std::uint32_t>(i)});
    for (auto& cluster : cluster_all(kids)) p.children.push_back(build(cluster));
    return p;
  }

  void integrate(PlatformNode& p, const ArtifactNode& n, const std::string& variant) {
    p.variant_set.insert(variant);
    p.member_hashes.insert(exact(n));
    std::map<Digest, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> groups;
    for (std::size_t i = 0; i < p.children.size(); ++i) groups[own_key(p.children[i])].first.push_back(i);
    for (std::size_t j = 0; j < n.children.size(); ++j) groups[own_key(n.children[j])].second.push_back(j);

    std::vector<PlatformNode> old = std::move(p.children);
    std::vector<PlatformNode> out;
    for (auto& [_, grp] : groups) {
      auto& [ps, ns] = grp;
      if (ns.empty()) {
        for (auto i : ps) out.push_back(std::move(old[i]));
      } else if (ps.size() <= 1 && ns.size() == 1) {
        const auto& item = n.children[ns[0]];
        const auto pos = static_cast<std::uint32_t>(ns[0]);
        if (ps.size() == 1 && accepts(old[ps[0]], item)) {
          old[ps[0]].ordering_keys[variant] = pos;
          integrate(old[ps[0]], item, variant);
          out.push_back(std::move(old[ps[0]]));
        } else {
          if (ps.size() == 1) out.push_back(std::move(old[ps[0]]));
          out.push_back(build({Member{variant, &item, pos}}));
        }
      } else {
        std::vector<Member> items;
        for (auto i : ps) {
          for (const auto& v : old[i].variant_set) {
            const auto& proj = projection(old[i], v);
            items.push_back({v, &proj, old[i].ordering_keys.at(v)});
          }
        }
        for (auto j : ns) items.push_back({variant, &n.children[j], static_cast<std::uint32_t>(j)});
        for (auto& cluster : cluster_group(items)) out.push_back(build(cluster));
      }
    }
    p.children = std::move(out);
  }

 private:
  const Digest& exact(const ArtifactNode& n) { return engine_.digest(n); }

  const Digest& abstracted(const ArtifactNode& n) {
    auto it = abstracted_.find(&n);
    if (it == abstracted_.end()) it = abstracted_.emplace(&n, abstracted_digest(n)).first;
    return it->second;
  }

  // Projection kept alive for the integrator's lifetime; presence conditions
  // of the source nodes are remembered by address.
  const ArtifactNode& projection(const PlatformNode& p, const std::string& variant) {
    storage_.push_back(project(p, variant));
    remember_conditions(p, storage_.back(), variant);
    return storage_.back();
  }

  void remember_conditions(const PlatformNode& p, const ArtifactNode& proj, const std::string& variant) {
    if (p.presence_condition) conditions_[&proj] = *p.presence_condition;
    std::vector<const PlatformNode*> kids;
    for (const auto& c : p.children)
      if (c.variant_set.count(variant)) kids.push_back(&c);
    std::stable_sort(kids.begin(), kids.end(), [&](auto* a, auto* b) {
      return a->ordering_keys.at(variant) < b->ordering_keys.at(variant);
    });
    for (std::size_t i = 0; i < kids.size(); ++i) remember_conditions(*kids[i], proj.children[i], variant);
  }

  bool similar(const ArtifactNode& a, const ArtifactNode& b) {
    if (exact(a) == exact(b) || abstracted(a) == abstracted(b)) return true;
    if (engine_.upper_bound(a, b) < opts_.theta) return false;
    return engine_(a, b) >= opts_.theta;
  }

  bool accepts(const PlatformNode& p, const ArtifactNode& item) {
    if (p.member_hashes.count(exact(item))) return true;
    std::set<Digest> seen;
    for (const auto& v : p.variant_set) {
      const auto& proj = projection(p, v);
      if (!seen.insert(exact(proj)).second) continue;
      if (similar(proj, item)) return true;
    }
    return false;
  }

  std::vector<std::vector<Member>> cluster_all(const std::vector<Member>& items) {
    std::map<Digest, std::vector<Member>> groups;
    for (const auto& m : items) groups[own_key(*m.node)].push_back(m);
    std::vector<std::vector<Member>> out;
    for (auto& [_, g] : groups)
      for (auto& c : cluster_group(g)) out.push_back(std::move(c));
    return out;
  }

  // Kruskal-style single linkage over accepted pairs, strongest tier first,
  // refusing to join clusters that share a variant.
  std::vector<std::vector<Member>> cluster_group(std::vector<Member> items) {
    std::sort(items.begin(), items.end(), [](const Member& a, const Member& b) {
      if (a.variant != b.variant) return a.variant < b.variant;
      return a.position < b.position;
    });
    const std::size_t n = items.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<std::set<std::string>> vars(n);
    for (std::size_t i = 0; i < n; ++i) vars[i] = {items[i].variant};
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };

    bool all_exact = true;
    std::set<std::string> distinct;
    for (const auto& m : items) {
      distinct.insert(m.variant);
      if (exact(*m.node) != exact(*items[0].node)) all_exact = false;
    }
    if (all_exact && distinct.size() == n) return {items};

    struct Edge {
      int tier;
      double sim;
      Digest lo, hi;
      std::size_t i, j;
    };
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (items[i].variant == items[j].variant) continue;
        const auto& a = *items[i].node;
        const auto& b = *items[j].node;
        int tier = 0;
        double sim = 1.0;
        if (exact(a) == exact(b)) {
          tier = 2;
        } else if (abstracted(a) == abstracted(b)) {
          tier = 1;
        } else {
          if (engine_.upper_bound(a, b) < opts_.theta) continue;
          sim = engine_(a, b);
          if (sim < opts_.theta) continue;
        }
        edges.push_back({tier, sim, std::min(exact(a), exact(b)), std::max(exact(a), exact(b)), i, j});
      }
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
      if (x.tier != y.tier) return x.tier > y.tier;
      if (x.sim != y.sim) return x.sim > y.sim;
      if (x.lo != y.lo) return x.lo < y.lo;
      if (x.hi != y.hi) return x.hi < y.hi;
      if (x.i != y.i) return x.i < y.i;
      return x.j < y.j;
    });
    for (const auto& e : edges) {
      const auto ri = find(e.i), rj = find(e.j);
      if (ri == rj) continue;
      bool disjoint = true;
      for (const auto& v : vars[rj])
        if (vars[ri].count(v)) {
          disjoint = false;
          break;
        }
      if (!disjoint) continue;
      const auto root = std::min(ri, rj), other = std::max(ri, rj);
      parent[other] = root;
      vars[root].insert(vars[other].begin(), vars[other].end());
    }
    std::map<std::size_t, std::vector<Member>> clusters;
    for (std::size_t i = 0; i < n; ++i) clusters[find(i)].push_back(items[i]);
    std::vector<std::vector<Member>> out;
    for (auto& [_, c] : clusters) out.push_back(std::move(c));
    return out;
  }

  IntegrationOptions opts_;
  SimilarityEngine engine_;
  std::unordered_map<const ArtifactNode*, Digest> abstracted_;
  std::unordered_map<const ArtifactNode*, Condition> conditions_;
  std::deque<ArtifactNode> storage_;
};

inline void add_components(IntegratedPlatform& p, const std::vector<ConfigurableComponent>& comps) {
  for (const auto& c : comps) p.components.emplace(c.component_id, c);
}

}  // namespace detail

/// Platform mirroring one variant.
inline IntegratedPlatform init_platform(const ArtifactGraph& variant,
                                        const std::vector<ConfigurableComponent>& components = {},
                                        const IntegrationOptions& opts = {}) {
  IntegratedPlatform p;
  detail::Integrator integ(opts);
  p.root = integ.build({detail::Member{variant.variant_id(), &variant.root(), 0}});
  p.variants.insert(variant.variant_id());
  detail::add_components(p, components);
  detail::canonicalize(p.root);
  return p;
}

inline IntegratedPlatform integrate_variant(IntegratedPlatform platform, const ArtifactGraph& variant,
                                            const std::vector<ConfigurableComponent>& components = {},
                                            const IntegrationOptions& opts = {}) {
  if (platform.variants.count(variant.variant_id()))
    throw PreconditionError("variant " + variant.variant_id() + " is already integrated");
  if (detail::own_key(platform.root) != detail::own_key(variant.root()))
    throw PreconditionError("root of variant " + variant.variant_id() +
                            " differs in label or attributes from the platform root");
  {
    detail::Integrator integ(opts);
    platform.root.ordering_keys[variant.variant_id()] = 0;
    integ.integrate(platform.root, variant.root(), variant.variant_id());
  }
  platform.variants.insert(variant.variant_id());
  detail::add_components(platform, components);
  detail::canonicalize(platform.root);
  return platform;
}

/// Folds integrate_variant over the taxonomy's merge order, or the given
/// order when no taxonomy is passed.
inline IntegratedPlatform integrate_all(const std::vector<ArtifactGraph>& variants, const Taxonomy* taxonomy,
                                        const std::vector<ConfigurableComponent>& components = {},
                                        const IntegrationOptions& opts = {}) {
  if (variants.empty()) throw PreconditionError("integration needs at least one variant");
  std::vector<const ArtifactGraph*> order;
  if (taxonomy) {
    for (const auto& id : taxonomy->merge_order) {
      auto it = std::find_if(variants.begin(), variants.end(),
                             [&](const ArtifactGraph& g) { return g.variant_id() == id; });
      if (it == variants.end()) throw LookupError("taxonomy names unknown variant " + id);
      order.push_back(&*it);
    }
    if (order.size() != variants.size()) throw PreconditionError("taxonomy does not cover every variant");
  } else {
    for (const auto& v : variants) order.push_back(&v);
  }
  auto platform = init_platform(*order.front(), components, opts);
  for (std::size_t i = 1; i < order.size(); ++i)
    platform = integrate_variant(std::move(platform), *order[i], {}, opts);
  return platform;
}

inline const PlatformNode* find_pid(const PlatformNode& root, std::uint32_t pid) {
  const PlatformNode* hit = nullptr;
  visit_platform(root, [&](const PlatformNode& n) {
    if (n.pid == pid) hit = &n;
  });
  return hit;
}

/// Sets a presence condition on the given nodes; every referenced feature
/// must be declared.
inline IntegratedPlatform annotate_feature(IntegratedPlatform platform, const std::set<std::uint32_t>& pids,
                                           const Condition& condition,
                                           const std::set<std::string>& declared_features) {
  std::set<std::string> used;
  collect_features(condition, used);
  for (const auto& f : used)
    if (!declared_features.count(f)) throw LookupError("unknown feature " + f);
  std::set<std::uint32_t> found;
  visit_platform_mut(platform.root, [&](PlatformNode& n) {
    if (pids.count(n.pid)) {
      n.presence_condition = condition;
      found.insert(n.pid);
    }
  });
  for (auto pid : pids)
    if (!found.count(pid)) throw LookupError("unknown platform node " + std::to_string(pid));
  return platform;
}

/// The stored (possibly refactored) variant, INSTANCE_REF nodes intact.
inline ArtifactGraph derive_stored_variant(const IntegratedPlatform& platform, const std::string& variant_id) {
  if (!platform.variants.count(variant_id)) throw LookupError("unknown variant " + variant_id);
  return ArtifactGraph(variant_id, detail::project(platform.root, variant_id));
}

/// Re-creates an integrated variant exactly, expanding component instances.
inline ArtifactGraph derive_variant(const IntegratedPlatform& platform, const std::string& variant_id) {
  return expand_all(derive_stored_variant(platform, variant_id), platform.components);
}

inline ArtifactNode derive_component(const IntegratedPlatform& platform, const std::string& component_id,
                                     const Binding& binding) {
  auto it = platform.components.find(component_id);
  if (it == platform.components.end()) throw LookupError("unknown component " + component_id);
  return expand_instance(it->second, binding);
}

namespace detail {

inline Json canonical_node(const PlatformNode& n, bool with_ids) {
  Json j;
  if (with_ids) j["pid"] = n.pid;
  j["type"] = std::string(to_string(n.type));
  j["label"] = n.label;
  j["tokens"] = n.tokens;
  Json attrs = Json::object();
  for (const auto& [k, v] : n.attributes) attrs[k] = v;
  j["attributes"] = std::move(attrs);
  j["variants"] = Json::array();
  for (const auto& v : n.variant_set) j["variants"].push_back(v);
  Json keys = Json::object();
  for (const auto& [v, k] : n.ordering_keys) keys[v] = k;
  j["ordering_keys"] = std::move(keys);
  if (n.presence_condition) j["presence_condition"] = to_string(*n.presence_condition);
  if (with_ids) {
    j["member_hashes"] = Json::array();
    for (const auto& h : n.member_hashes) j["member_hashes"].push_back(h.hex());
  }
  j["children"] = Json::array();
  for (const auto& c : n.children) j["children"].push_back(canonical_node(c, with_ids));
  return j;
}

inline Digest digest_from_hex(const std::string& hex) {
  if (hex.size() != 32) throw ParseError("bad digest '" + hex + "'", "/member_hashes");
  Digest d;
  d.hi = std::stoull(hex.substr(0, 16), nullptr, 16);
  d.lo = std::stoull(hex.substr(16), nullptr, 16);
  return d;
}

inline PlatformNode platform_node_from_json(const Json& j) {
  PlatformNode n;
  n.pid = j.at("pid").get<std::uint32_t>();
  const auto type = node_type_from_string(j.at("type").get<std::string>());
  if (!type) throw ParseError("unknown node type in platform", "/root");
  n.type = *type;
  n.label = j.at("label").get<std::string>();
  n.tokens = j.at("tokens").get<std::vector<std::string>>();
  for (const auto& [k, v] : j.at("attributes").items()) n.attributes[k] = v.get<std::string>();
  for (const auto& v : j.at("variants")) n.variant_set.insert(v.get<std::string>());
  for (const auto& [v, k] : j.at("ordering_keys").items()) n.ordering_keys[v] = k.get<std::uint32_t>();
  if (auto it = j.find("presence_condition"); it != j.end())
    n.presence_condition = parse_condition(it->get<std::string>());
  for (const auto& h : j.at("member_hashes")) n.member_hashes.insert(digest_from_hex(h.get<std::string>()));
  for (const auto& c : j.at("children")) n.children.push_back(platform_node_from_json(c));
  return n;
}

}  // namespace detail

/// Deterministic text with pids and member hashes erased.
inline std::string canonical_form(const IntegratedPlatform& platform) {
  Json j;
  j["variants"] = Json::array();
  for (const auto& v : platform.variants) j["variants"].push_back(v);
  j["components"] = Json::array();
  for (const auto& [_, c] : platform.components) j["components"].push_back(component_to_json(c));
  j["root"] = detail::canonical_node(platform.root, false);
  return j.dump(1) + "\n";
}

/// Full platform document (pids, member hashes, annotations, components).
inline Json platform_to_json(const IntegratedPlatform& platform) {
  Json j;
  j["variants"] = Json::array();
  for (const auto& v : platform.variants) j["variants"].push_back(v);
  j["components"] = Json::array();
  for (const auto& [_, c] : platform.components) j["components"].push_back(component_to_json(c));
  j["root"] = detail::canonical_node(platform.root, true);
  return j;
}

inline IntegratedPlatform platform_from_json(const Json& j) {
  IntegratedPlatform p;
  try {
    for (const auto& v : j.at("variants")) p.variants.insert(v.get<std::string>());
    for (const auto& c : j.at("components")) {
      auto comp = component_from_json(c);
      p.components.emplace(comp.component_id, std::move(comp));
    }
    p.root = detail::platform_node_from_json(j.at("root"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed platform document: ") + e.what(), "");
  }
  return p;
}

}  // namespace mple
