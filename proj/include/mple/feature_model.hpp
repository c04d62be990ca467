#pragma once

// Feature-model synthesis over variant signatures of platform nodes.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mple/component.hpp"
#include "mple/error.hpp"
#include "mple/interchange.hpp"
#include "mple/platform.hpp"
#include "mple/presence_condition.hpp"

namespace mple {

inline constexpr std::string_view kRootFeature = "ROOT";

using Signature = std::set<std::string>;

enum class Variability { Mandatory, Optional, InGroup };
enum class GroupKind { Xor, Or };
enum class ConstraintKind { Requires, Excludes };

inline std::string_view to_string(Variability v) {
  switch (v) {
    case Variability::Mandatory: return "MANDATORY";
    case Variability::Optional: return "OPTIONAL";
    default: return "IN_GROUP";
  }
}
inline std::string_view to_string(GroupKind k) { return k == GroupKind::Xor ? "XOR" : "OR"; }
inline std::string_view to_string(ConstraintKind k) {
  return k == ConstraintKind::Requires ? "REQUIRES" : "EXCLUDES";
}

struct Feature {
  std::string name;
  Signature signature;
  std::string parent;  // empty for the root
  Variability variability = Variability::Optional;
  std::optional<std::string> layer_ref;
  std::string value;  // bound text for parameter-value features in layers

  friend bool operator==(const Feature&, const Feature&) = default;
};

struct FeatureGroup {
  std::string parent;
  GroupKind kind = GroupKind::Xor;
  std::vector<std::string> members;

  friend bool operator==(const FeatureGroup&, const FeatureGroup&) = default;
};

struct CrossTreeConstraint {
  ConstraintKind kind = ConstraintKind::Requires;
  std::string lhs;
  std::string rhs;

  friend bool operator==(const CrossTreeConstraint&, const CrossTreeConstraint&) = default;
};

struct FeatureModel {
  std::string root{kRootFeature};
  std::vector<Feature> features;  // root first, then by name
  std::vector<FeatureGroup> groups;
  std::vector<CrossTreeConstraint> constraints;
  std::map<std::string, FeatureModel> layers;

  const Feature* find(const std::string& name) const {
    for (const auto& f : features)
      if (f.name == name) return &f;
    return nullptr;
  }

  const Feature& at(const std::string& name) const {
    if (const auto* f = find(name)) return *f;
    throw LookupError("unknown feature " + name);
  }

  std::set<std::string> names() const {
    std::set<std::string> out;
    for (const auto& f : features) out.insert(f.name);
    return out;
  }

  bool is_ancestor(const std::string& anc, const std::string& name) const {
    for (auto p = at(name).parent; !p.empty(); p = at(p).parent)
      if (p == anc) return true;
    return false;
  }

  friend bool operator==(const FeatureModel&, const FeatureModel&) = default;
};

struct Configuration {
  std::set<std::string> selected;
  std::map<std::string, Binding> layer_bindings;  // instance feature -> binding

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct Block {
  Signature signature;
  std::vector<std::uint32_t> pids;  // ascending
};

/// Platform nodes grouped by variant set: larger signatures first, then
/// lexicographic, so the core block (every variant) leads.
inline std::vector<Block> compute_blocks(const IntegratedPlatform& platform) {
  std::map<Signature, std::vector<std::uint32_t>> by_sig;
  visit_platform(platform.root, [&](const PlatformNode& n) { by_sig[n.variant_set].push_back(n.pid); });
  std::vector<Block> blocks;
  for (auto& [sig, pids] : by_sig) {
    std::sort(pids.begin(), pids.end());
    blocks.push_back({sig, pids});
  }
  std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    return a.signature.size() > b.signature.size();
  });
  return blocks;
}

namespace detail {

inline bool proper_subset(const Signature& a, const Signature& b) {
  return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool disjoint(const Signature& a, const Signature& b) {
  for (const auto& x : a)
    if (b.count(x)) return false;
  return true;
}

inline void sort_features(FeatureModel& fm) {
  std::stable_sort(fm.features.begin(), fm.features.end(), [&](const Feature& a, const Feature& b) {
    if ((a.name == fm.root) != (b.name == fm.root)) return a.name == fm.root;
    return a.name < b.name;
  });
}

}  // namespace detail

/// Cross-tree constraints between signature-carrying features (features with
/// a layer reference are skipped). REQUIRES is kept only where no feature sits
/// strictly between the two signatures; EXCLUDES only for maximal disjoint
/// pairs not already enforced by an XOR group.
inline std::vector<CrossTreeConstraint> mine_constraints(const FeatureModel& fm) {
  std::vector<const Feature*> fs;
  for (const auto& f : fm.features)
    if (f.name != fm.root && !f.layer_ref) fs.push_back(&f);
  std::set<std::pair<std::string, std::string>> xor_pairs;
  for (const auto& g : fm.groups)
    if (g.kind == GroupKind::Xor)
      for (const auto& a : g.members)
        for (const auto& b : g.members)
          if (a != b) xor_pairs.insert({a, b});

  std::vector<CrossTreeConstraint> out;
  for (const auto* a : fs)
    for (const auto* b : fs) {
      if (a == b || !detail::proper_subset(a->signature, b->signature)) continue;
      if (fm.is_ancestor(b->name, a->name)) continue;
      const bool between = std::any_of(fs.begin(), fs.end(), [&](const Feature* c) {
        return detail::proper_subset(a->signature, c->signature) &&
               detail::proper_subset(c->signature, b->signature);
      });
      if (!between) out.push_back({ConstraintKind::Requires, a->name, b->name});
    }

  auto dominated = [&](const Feature* a, const Feature* b) {
    for (const auto* c : fs) {
      if (detail::proper_subset(a->signature, c->signature) && detail::disjoint(c->signature, b->signature))
        return true;
      if (detail::proper_subset(b->signature, c->signature) && detail::disjoint(c->signature, a->signature))
        return true;
    }
    return false;
  };
  for (const auto* a : fs)
    for (const auto* b : fs) {
      if (!(a->name < b->name) || !detail::disjoint(a->signature, b->signature)) continue;
      if (fm.is_ancestor(a->name, b->name) || fm.is_ancestor(b->name, a->name)) continue;
      if (xor_pairs.count({a->name, b->name}) || dominated(a, b)) continue;
      out.push_back({ConstraintKind::Excludes, a->name, b->name});
    }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::tie(x.kind, x.lhs, x.rhs) < std::tie(y.kind, y.lhs, y.rhs);
  });
  return out;
}

namespace detail {

inline void assign_groups(FeatureModel& fm) {
  std::map<std::string, std::vector<Feature*>> kids;
  for (auto& f : fm.features)
    if (!f.parent.empty() && f.variability != Variability::Mandatory) kids[f.parent].push_back(&f);
  for (auto& [parent, list] : kids) {
    if (list.size() < 2) continue;
    const auto& psig = fm.at(parent).signature;
    bool pairwise_disjoint = true;
    Signature uni;
    for (std::size_t i = 0; i < list.size(); ++i) {
      uni.insert(list[i]->signature.begin(), list[i]->signature.end());
      for (std::size_t j = i + 1; j < list.size(); ++j)
        if (!disjoint(list[i]->signature, list[j]->signature)) pairwise_disjoint = false;
    }
    if (uni != psig) continue;
    FeatureGroup g{parent, pairwise_disjoint ? GroupKind::Xor : GroupKind::Or, {}};
    for (auto* f : list) {
      f->variability = Variability::InGroup;
      g.members.push_back(f->name);
    }
    std::sort(g.members.begin(), g.members.end());
    fm.groups.push_back(std::move(g));
  }
  std::sort(fm.groups.begin(), fm.groups.end(),
            [](const auto& a, const auto& b) { return a.parent < b.parent; });
}

inline std::string value_feature(const std::string& comp, const std::string& slot, std::size_t i) {
  return comp + "." + slot + "." + std::to_string(i);
}

inline std::string optional_feature(const std::string& comp, std::uint32_t tid) {
  return comp + ".opt" + std::to_string(tid);
}

// Component layer: root named after the component, an XOR group of observed
// values per slot, one OPTIONAL feature per optional template node.
inline FeatureModel layer_model(const ConfigurableComponent& comp,
                                const std::vector<std::pair<Binding, Signature>>& uses) {
  FeatureModel fm;
  fm.root = comp.component_id;
  Signature all;
  for (const auto& [_, sig] : uses) all.insert(sig.begin(), sig.end());
  fm.features.push_back({comp.component_id, all, "", Variability::Mandatory, std::nullopt, ""});
  for (const auto& p : comp.parameters) {
    const std::string slot_feature = comp.component_id + "." + p;
    fm.features.push_back({slot_feature, all, comp.component_id, Variability::Mandatory, std::nullopt, ""});
    std::map<std::string, Signature> values;
    for (const auto& [b, sig] : uses)
      if (auto it = b.slots.find(p); it != b.slots.end()) values[it->second].insert(sig.begin(), sig.end());
    FeatureGroup g{slot_feature, GroupKind::Xor, {}};
    std::size_t i = 0;
    for (const auto& [value, sig] : values) {
      const auto name = value_feature(comp.component_id, p, i++);
      fm.features.push_back({name, sig, slot_feature, Variability::InGroup, std::nullopt, value});
      g.members.push_back(name);
    }
    std::sort(g.members.begin(), g.members.end());
    fm.groups.push_back(std::move(g));
  }
  for (auto tid : comp.optional_nodes) {
    Signature sig;
    for (const auto& [b, s] : uses)
      if (auto it = b.optional.find(tid); it != b.optional.end() && it->second) sig.insert(s.begin(), s.end());
    fm.features.push_back(
        {optional_feature(comp.component_id, tid), sig, comp.component_id, Variability::Optional, std::nullopt, ""});
  }
  sort_features(fm);
  std::sort(fm.groups.begin(), fm.groups.end(),
            [](const auto& a, const auto& b) { return a.parent < b.parent; });
  return fm;
}

}  // namespace detail

/// Feature of the block whose signature is `sig`, if any.
inline std::optional<std::string> block_feature(const FeatureModel& fm, const Signature& sig) {
  for (const auto& f : fm.features)
    if (f.name != fm.root && !f.layer_ref && f.signature == sig) return f.name;
  return std::nullopt;
}

inline FeatureModel synthesize_feature_model(const IntegratedPlatform& platform) {
  if (platform.variants.empty()) throw PreconditionError("platform has no variants");
  const auto blocks = compute_blocks(platform);
  FeatureModel fm;
  fm.features.push_back({fm.root, platform.variants, "", Variability::Mandatory, std::nullopt, ""});

  std::vector<std::string> names;
  for (std::size_t k = 0; k < blocks.size(); ++k) names.push_back("F_" + std::to_string(k));
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& sig = blocks[k].signature;
    std::string parent = fm.root;
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      if (!detail::proper_subset(sig, blocks[j].signature)) continue;
      if (!best || blocks[j].signature.size() < blocks[*best].signature.size() ||
          (blocks[j].signature.size() == blocks[*best].signature.size() &&
           blocks[j].signature < blocks[*best].signature))
        best = j;
    }
    if (best) parent = names[*best];
    const auto& parent_sig = best ? blocks[*best].signature : platform.variants;
    const auto var = sig == parent_sig ? Variability::Mandatory : Variability::Optional;
    fm.features.push_back({names[k], sig, parent, var, std::nullopt, ""});
  }

  // Component instances: one MANDATORY feature per (block, component).
  std::map<std::string, std::vector<std::pair<Binding, Signature>>> uses;
  std::map<std::uint32_t, std::size_t> block_of_pid;
  for (std::size_t k = 0; k < blocks.size(); ++k)
    for (auto pid : blocks[k].pids) block_of_pid[pid] = k;
  std::set<std::pair<std::size_t, std::string>> instance_features;
  visit_platform(platform.root, [&](const PlatformNode& n) {
    if (n.type != NodeType::InstanceRef) return;
    ArtifactNode ref;
    ref.type = n.type;
    ref.tokens = n.tokens;
    uses[n.label].push_back({binding_from_instance_ref(ref), n.variant_set});
    instance_features.insert({block_of_pid.at(n.pid), n.label});
  });
  for (const auto& [k, comp] : instance_features)
    fm.features.push_back({names[k] + "." + comp, blocks[k].signature, names[k], Variability::Mandatory, comp, ""});
  for (const auto& [id, comp] : platform.components)
    fm.layers.emplace(id, detail::layer_model(comp, uses[id]));

  detail::sort_features(fm);
  detail::assign_groups(fm);
  fm.constraints = mine_constraints(fm);
  return fm;
}

/// Configuration that reproduces an original variant.
inline Configuration variant_configuration(const FeatureModel& fm, const std::string& variant_id) {
  Configuration c;
  for (const auto& f : fm.features)
    if (f.signature.count(variant_id)) c.selected.insert(f.name);
  c.selected.insert(fm.root);
  return c;
}

struct Validation {
  bool valid = true;
  std::vector<std::string> violations;
};

namespace detail {

inline void check_tree(const FeatureModel& fm, const std::set<std::string>& sel, const std::string& prefix,
                       std::vector<std::string>& out) {
  if (!sel.count(fm.root)) out.push_back(prefix + "root feature " + fm.root + " is not selected");
  for (const auto& name : sel)
    if (!fm.find(name)) out.push_back(prefix + "unknown feature " + name);
  for (const auto& f : fm.features) {
    if (f.parent.empty()) continue;
    const bool parent_on = sel.count(f.parent) > 0;
    if (sel.count(f.name) && !parent_on)
      out.push_back(prefix + f.name + " is selected but its parent " + f.parent + " is not");
    if (f.variability == Variability::Mandatory && parent_on && !sel.count(f.name))
      out.push_back(prefix + "mandatory feature " + f.name + " is not selected");
  }
  for (const auto& g : fm.groups) {
    if (!sel.count(g.parent)) continue;
    const auto n = std::count_if(g.members.begin(), g.members.end(),
                                 [&](const std::string& m) { return sel.count(m) > 0; });
    if (g.kind == GroupKind::Xor && n != 1)
      out.push_back(prefix + "XOR group under " + g.parent + " has " + std::to_string(n) + " selected members");
    if (g.kind == GroupKind::Or && n < 1) out.push_back(prefix + "OR group under " + g.parent + " has no selection");
  }
  for (const auto& c : fm.constraints) {
    const bool l = sel.count(c.lhs) > 0, r = sel.count(c.rhs) > 0;
    if (c.kind == ConstraintKind::Requires && l && !r)
      out.push_back(prefix + c.lhs + " requires " + c.rhs);
    if (c.kind == ConstraintKind::Excludes && l && r)
      out.push_back(prefix + c.lhs + " excludes " + c.rhs);
  }
}

// Layer selection implied by a binding.
inline std::optional<std::set<std::string>> layer_selection(const FeatureModel& layer, const Binding& b,
                                                            std::vector<std::string>& out,
                                                            const std::string& prefix) {
  std::set<std::string> sel{layer.root};
  for (const auto& [slot, value] : b.slots) {
    const std::string slot_feature = layer.root + "." + slot;
    if (!layer.find(slot_feature)) {
      out.push_back(prefix + "unknown slot " + slot);
      return std::nullopt;
    }
    sel.insert(slot_feature);
    for (const auto& f : layer.features)
      if (f.parent == slot_feature && f.value == value) sel.insert(f.name);
  }
  for (const auto& [tid, on] : b.optional) {
    const auto name = optional_feature(layer.root, tid);
    if (!layer.find(name)) {
      out.push_back(prefix + "unknown optional node " + std::to_string(tid));
      return std::nullopt;
    }
    if (on) sel.insert(name);
  }
  return sel;
}

}  // namespace detail

inline Validation validate_configuration(const FeatureModel& fm, const Configuration& config) {
  Validation v;
  detail::check_tree(fm, config.selected, "", v.violations);
  for (const auto& [inst, binding] : config.layer_bindings) {
    const auto* f = fm.find(inst);
    if (!f || !f->layer_ref) {
      v.violations.push_back(inst + " is not a component instance feature");
      continue;
    }
    if (!config.selected.count(inst)) v.violations.push_back("binding given for unselected " + inst);
    auto it = fm.layers.find(*f->layer_ref);
    if (it == fm.layers.end()) {
      v.violations.push_back("no layer for component " + *f->layer_ref);
      continue;
    }
    const std::string prefix = inst + ": ";
    if (auto sel = detail::layer_selection(it->second, binding, v.violations, prefix))
      detail::check_tree(it->second, *sel, prefix, v.violations);
  }
  v.valid = v.violations.empty();
  return v;
}

/// Every valid system-layer configuration, by exhaustive search over the
/// feature tree. More than 20 non-root features need an explicit limit.
inline std::vector<Configuration> enumerate_configurations(const FeatureModel& fm,
                                                           std::optional<std::size_t> limit = std::nullopt) {
  std::vector<const Feature*> order;  // parents before children
  std::function<void(const std::string&)> walk = [&](const std::string& parent) {
    std::vector<const Feature*> kids;
    for (const auto& f : fm.features)
      if (f.parent == parent) kids.push_back(&f);
    for (const auto* k : kids) {
      order.push_back(k);
      walk(k->name);
    }
  };
  walk(fm.root);
  if (order.size() > 20 && !limit)
    throw PreconditionError("feature model has " + std::to_string(order.size()) +
                            " features; enumeration needs a limit above 20");

  std::vector<Configuration> out;
  std::set<std::string> sel{fm.root};
  std::function<bool(std::size_t)> rec = [&](std::size_t i) {
    if (limit && out.size() >= *limit) return false;
    if (i == order.size()) {
      Configuration c{sel, {}};
      if (validate_configuration(fm, c).valid) out.push_back(std::move(c));
      return true;
    }
    const auto* f = order[i];
    const bool parent_on = sel.count(f->parent) > 0;
    if (!parent_on || f->variability != Variability::Mandatory)
      if (!rec(i + 1)) return false;
    if (parent_on) {
      sel.insert(f->name);
      const bool go = rec(i + 1);
      sel.erase(f->name);
      if (!go) return false;
    }
    return true;
  };
  rec(0);
  std::sort(out.begin(), out.end(),
            [](const Configuration& a, const Configuration& b) { return a.selected < b.selected; });
  return out;
}

inline IntegratedPlatform annotate_feature(IntegratedPlatform platform, const std::set<std::uint32_t>& pids,
                                           const Condition& condition, const FeatureModel& fm) {
  return annotate_feature(std::move(platform), pids, condition, fm.names());
}

/// Derives a new (or original) product from a valid configuration. A node
/// with a presence condition is kept when the condition holds; otherwise when
/// the feature of its variant set is selected. Siblings are ordered by the
/// mean of their ordering keys.
inline ArtifactGraph derive_variant(const IntegratedPlatform& platform, const FeatureModel& fm,
                                    const Configuration& config, const std::string& variant_id = "derived") {
  const auto check = validate_configuration(fm, config);
  if (!check.valid) {
    std::string msg = "invalid configuration:";
    for (const auto& v : check.violations) msg += "\n  " + v;
    throw PreconditionError(msg);
  }
  std::map<Signature, std::string> feature_of;
  for (const auto& f : fm.features)
    if (f.name != fm.root && !f.layer_ref) feature_of.emplace(f.signature, f.name);
  auto selected = config.selected;
  selected.insert(fm.root);

  auto present = [&](const PlatformNode& n) {
    if (n.presence_condition) return eval_condition(*n.presence_condition, selected);
    auto it = feature_of.find(n.variant_set);
    return it != feature_of.end() && selected.count(it->second) > 0;
  };
  // A configuration that reproduces an original variant keeps its order.
  std::optional<std::string> original;
  for (const auto& v : platform.variants)
    if (variant_configuration(fm, v).selected == selected) original = v;
  auto mean_key = [&](const PlatformNode& n) {
    if (original)
      if (auto it = n.ordering_keys.find(*original); it != n.ordering_keys.end())
        return static_cast<double>(it->second);
    double s = 0;
    for (const auto& [_, k] : n.ordering_keys) s += k;
    return n.ordering_keys.empty() ? 0.0 : s / static_cast<double>(n.ordering_keys.size());
  };

  std::function<ArtifactNode(const PlatformNode&)> build = [&](const PlatformNode& p) {
    ArtifactNode n;
    n.type = p.type;
    n.label = p.label;
    n.tokens = p.tokens;
    n.attributes = p.attributes;
    if (p.type == NodeType::InstanceRef) {
      auto fit = feature_of.find(p.variant_set);
      if (fit != feature_of.end()) {
        auto bit = config.layer_bindings.find(fit->second + "." + p.label);
        if (bit != config.layer_bindings.end()) {
          auto cit = platform.components.find(p.label);
          if (cit == platform.components.end()) throw LookupError("unknown component " + p.label);
          n = make_instance_ref(cit->second, bit->second);
        }
      }
    }
    std::vector<std::pair<std::pair<double, Digest>, const PlatformNode*>> kids;
    for (const auto& c : p.children)
      if (present(c)) kids.push_back({{mean_key(c), detail::platform_digest(c)}, &c});
    std::sort(kids.begin(), kids.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [_, c] : kids) n.children.push_back(build(*c));
    return n;
  };
  ArtifactGraph stored(variant_id, build(platform.root));
  return expand_all(stored, platform.components);
}

// --- documents ---------------------------------------------------------------

namespace detail {

inline void print_tree(const FeatureModel& fm, const std::string& name, int depth, std::ostringstream& os) {
  const auto& f = fm.at(name);
  os << std::string(static_cast<std::size_t>(depth) * 2, ' ') << f.name;
  if (!f.parent.empty()) os << " [" << to_string(f.variability) << "]";
  os << " {";
  bool first = true;
  for (const auto& v : f.signature) {
    os << (first ? "" : ",") << v;
    first = false;
  }
  os << "}";
  if (f.layer_ref) os << " -> layer " << *f.layer_ref;
  if (!f.value.empty()) os << " = " << f.value;
  os << "\n";
  for (const auto& g : fm.groups)
    if (g.parent == name) {
      os << std::string(static_cast<std::size_t>(depth + 1) * 2, ' ') << "<" << to_string(g.kind) << ">";
      for (const auto& m : g.members) os << " " << m;
      os << "\n";
    }
  for (const auto& c : fm.features)
    if (c.parent == name) print_tree(fm, c.name, depth + 1, os);
}

}  // namespace detail

/// Human-readable document: indented tree, group markers, constraints, layers.
inline std::string feature_model_to_text(const FeatureModel& fm) {
  std::ostringstream os;
  os << "feature-model " << fm.root << "\n";
  detail::print_tree(fm, fm.root, 0, os);
  os << "constraints\n";
  for (const auto& c : fm.constraints) os << "  " << c.lhs << " " << to_string(c.kind) << " " << c.rhs << "\n";
  for (const auto& [id, layer] : fm.layers) os << "layer " << id << "\n" << feature_model_to_text(layer);
  return os.str();
}

inline Json feature_model_to_json(const FeatureModel& fm) {
  Json j;
  j["root"] = fm.root;
  j["features"] = Json::array();
  for (const auto& f : fm.features) {
    Json jf;
    jf["name"] = f.name;
    jf["signature"] = f.signature;
    jf["parent"] = f.parent;
    jf["variability"] = std::string(to_string(f.variability));
    if (f.layer_ref) jf["layer_ref"] = *f.layer_ref;
    if (!f.value.empty()) jf["value"] = f.value;
    j["features"].push_back(std::move(jf));
  }
  j["groups"] = Json::array();
  for (const auto& g : fm.groups)
    j["groups"].push_back(Json{{"parent", g.parent}, {"kind", std::string(to_string(g.kind))}, {"members", g.members}});
  j["constraints"] = Json::array();
  for (const auto& c : fm.constraints)
    j["constraints"].push_back(Json{{"kind", std::string(to_string(c.kind))}, {"lhs", c.lhs}, {"rhs", c.rhs}});
  j["layers"] = Json::object();
  for (const auto& [id, layer] : fm.layers) j["layers"][id] = feature_model_to_json(layer);
  return j;
}

inline FeatureModel feature_model_from_json(const Json& j) {
  FeatureModel fm;
  try {
    fm.root = j.at("root").get<std::string>();
    for (const auto& jf : j.at("features")) {
      Feature f;
      f.name = jf.at("name").get<std::string>();
      f.signature = jf.at("signature").get<Signature>();
      f.parent = jf.at("parent").get<std::string>();
      const auto var = jf.at("variability").get<std::string>();
      f.variability = var == "MANDATORY"  ? Variability::Mandatory
                      : var == "OPTIONAL" ? Variability::Optional
                                          : Variability::InGroup;
      if (jf.contains("layer_ref")) f.layer_ref = jf.at("layer_ref").get<std::string>();
      if (jf.contains("value")) f.value = jf.at("value").get<std::string>();
      fm.features.push_back(std::move(f));
    }
    for (const auto& jg : j.at("groups"))
      fm.groups.push_back({jg.at("parent").get<std::string>(),
                           jg.at("kind").get<std::string>() == "XOR" ? GroupKind::Xor : GroupKind::Or,
                           jg.at("members").get<std::vector<std::string>>()});
    for (const auto& jc : j.at("constraints"))
      fm.constraints.push_back({jc.at("kind").get<std::string>() == "REQUIRES" ? ConstraintKind::Requires
                                                                               : ConstraintKind::Excludes,
                                jc.at("lhs").get<std::string>(), jc.at("rhs").get<std::string>()});
    for (const auto& [id, jl] : j.at("layers").items()) fm.layers.emplace(id, feature_model_from_json(jl));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed feature model document: ") + e.what(), "");
  }
  return fm;
}

inline Json configuration_to_json(const Configuration& c) {
  Json j;
  j["selected"] = c.selected;
  j["layer_bindings"] = Json::object();
  for (const auto& [inst, b] : c.layer_bindings) j["layer_bindings"][inst] = binding_to_json(b);
  return j;
}

inline Configuration configuration_from_json(const Json& j) {
  Configuration c;
  try {
    c.selected = j.at("selected").get<std::set<std::string>>();
    if (j.contains("layer_bindings"))
      for (const auto& [inst, jb] : j.at("layer_bindings").items()) c.layer_bindings[inst] = binding_from_json(jb);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed configuration document: ") + e.what(), "");
  }
  return c;
}

}  // namespace mple
