#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mple/artifact_graph.hpp"
#include "mple/canonical_hash.hpp"
#include "mple/clone_detection.hpp"
#include "mple/error.hpp"
#include "mple/interchange.hpp"
#include "mple/similarity.hpp"
#include "mple/tokenizer.hpp"

namespace mple {

/// Reference to parameter slot `index` (0-based; named P<index+1>).
struct Slot {
  std::size_t index = 0;
  friend bool operator==(const Slot&, const Slot&) = default;
};

/// Literal text or a slot. In token lists each piece is one token; in labels
/// the pieces concatenate.
using Piece = std::variant<std::string, Slot>;

struct TemplateNode {
  std::uint32_t tid = 0;
  NodeType type = NodeType::Statement;
  std::vector<Piece> label;
  std::vector<Piece> tokens;
  std::map<std::string, std::string> attributes;
  std::vector<TemplateNode> children;
  bool optional = false;
};

struct ConfigurableComponent {
  std::string component_id;
  NodeType granularity = NodeType::Method;
  TemplateNode root;
  std::vector<std::string> parameters;       // P1, P2, ...
  std::vector<std::uint32_t> optional_nodes;  // ascending tids
};

struct Binding {
  std::map<std::string, std::string> slots;
  std::map<std::uint32_t, bool> optional;

  friend bool operator==(const Binding&, const Binding&) = default;
};

struct ComponentInstance {
  std::string instance_of;
  Binding binding;
  NodeId original_location = 0;
};

inline std::string slot_name(std::size_t index) { return "P" + std::to_string(index + 1); }

namespace detail {

inline std::string bound_value(const Piece& p, const ConfigurableComponent& c, const Binding& b) {
  if (const auto* s = std::get_if<std::string>(&p)) return *s;
  const auto idx = std::get<Slot>(p).index;
  if (idx >= c.parameters.size()) throw BindingError("slot index out of range");
  auto it = b.slots.find(c.parameters[idx]);
  if (it == b.slots.end()) throw BindingError("missing value for slot " + c.parameters[idx]);
  return it->second;
}

inline void expand_into(const TemplateNode& t, const ConfigurableComponent& c, const Binding& b,
                        ArtifactNode& out) {
  out.type = t.type;
  out.label.clear();
  for (const auto& p : t.label) out.label += bound_value(p, c, b);
  out.tokens.clear();
  for (const auto& p : t.tokens) out.tokens.push_back(bound_value(p, c, b));
  out.attributes = t.attributes;
  out.children.clear();
  for (const auto& child : t.children) {
    if (child.optional) {
      auto it = b.optional.find(child.tid);
      if (it == b.optional.end())
        throw BindingError("missing inclusion flag for optional node " + std::to_string(child.tid));
      if (!it->second) continue;
    }
    ArtifactNode n;
    expand_into(child, c, b, n);
    out.children.push_back(std::move(n));
  }
}

}  // namespace detail

/// Instantiates the template under a complete binding.
inline ArtifactNode expand_instance(const ConfigurableComponent& component, const Binding& binding) {
  for (const auto& [name, _] : binding.slots)
    if (std::find(component.parameters.begin(), component.parameters.end(), name) ==
        component.parameters.end())
      throw BindingError("unknown slot " + name + " for component " + component.component_id);
  for (const auto& p : component.parameters)
    if (!binding.slots.count(p)) throw BindingError("missing value for slot " + p);
  for (auto tid : component.optional_nodes)
    if (!binding.optional.count(tid))
      throw BindingError("missing inclusion flag for optional node " + std::to_string(tid));
  ArtifactNode out;
  detail::expand_into(component.root, component, binding, out);
  return out;
}

// --- instance reference encoding -------------------------------------------
//
// An INSTANCE_REF node has label = component id and one token per binding
// entry: "P<k>=<value>" for slots, "?<tid>=0|1" for optional nodes.

inline ArtifactNode make_instance_ref(const ConfigurableComponent& c, const Binding& b) {
  ArtifactNode n;
  n.type = NodeType::InstanceRef;
  n.label = c.component_id;
  for (const auto& p : c.parameters) n.tokens.push_back(p + "=" + b.slots.at(p));
  for (auto tid : c.optional_nodes)
    n.tokens.push_back("?" + std::to_string(tid) + "=" + (b.optional.at(tid) ? "1" : "0"));
  n.attributes["component"] = c.component_id;
  n.attributes["granularity"] = std::string(to_string(c.granularity));
  return n;
}

inline Binding binding_from_instance_ref(const ArtifactNode& ref) {
  if (ref.type != NodeType::InstanceRef) throw BindingError("not an INSTANCE_REF node");
  Binding b;
  for (const auto& tok : ref.tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw BindingError("malformed binding token '" + tok + "'");
    const auto key = tok.substr(0, eq);
    const auto value = tok.substr(eq + 1);
    if (key[0] == '?') {
      if (value != "0" && value != "1") throw BindingError("malformed inclusion flag '" + tok + "'");
      b.optional[static_cast<std::uint32_t>(std::stoul(key.substr(1)))] = value == "1";
    } else {
      b.slots[key] = value;
    }
  }
  return b;
}

// --- serialization -----------------------------------------------------------

namespace detail {

inline Json pieces_to_json(const std::vector<Piece>& pieces, const ConfigurableComponent& c) {
  Json arr = Json::array();
  for (const auto& p : pieces) {
    if (const auto* s = std::get_if<std::string>(&p))
      arr.push_back(*s);
    else
      arr.push_back(Json{{"slot", c.parameters.at(std::get<Slot>(p).index)}});
  }
  return arr;
}

inline std::vector<Piece> pieces_from_json(const Json& arr, const std::vector<std::string>& params) {
  std::vector<Piece> out;
  for (const auto& p : arr) {
    if (p.is_string()) {
      out.emplace_back(p.get<std::string>());
    } else {
      const auto name = p.at("slot").get<std::string>();
      const auto it = std::find(params.begin(), params.end(), name);
      if (it == params.end()) throw ParseError("unknown slot '" + name + "'", "/template");
      out.emplace_back(Slot{static_cast<std::size_t>(it - params.begin())});
    }
  }
  return out;
}

inline Json template_to_json(const TemplateNode& t, const ConfigurableComponent& c) {
  Json j;
  j["tid"] = t.tid;
  j["type"] = std::string(to_string(t.type));
  j["label"] = pieces_to_json(t.label, c);
  j["tokens"] = pieces_to_json(t.tokens, c);
  Json attrs = Json::object();
  for (const auto& [k, v] : t.attributes) attrs[k] = v;
  j["attributes"] = std::move(attrs);
  j["optional"] = t.optional;
  j["children"] = Json::array();
  for (const auto& ch : t.children) j["children"].push_back(template_to_json(ch, c));
  return j;
}

inline TemplateNode template_from_json(const Json& j, const std::vector<std::string>& params) {
  TemplateNode t;
  t.tid = j.at("tid").get<std::uint32_t>();
  const auto type = node_type_from_string(j.at("type").get<std::string>());
  if (!type) throw ParseError("unknown node type in template", "/template");
  t.type = *type;
  t.label = pieces_from_json(j.at("label"), params);
  t.tokens = pieces_from_json(j.at("tokens"), params);
  for (const auto& [k, v] : j.at("attributes").items()) t.attributes[k] = v.get<std::string>();
  t.optional = j.at("optional").get<bool>();
  for (const auto& ch : j.at("children")) t.children.push_back(template_from_json(ch, params));
  return t;
}

}  // namespace detail

inline Json component_to_json(const ConfigurableComponent& c) {
  Json j;
  j["component_id"] = c.component_id;
  j["granularity"] = std::string(to_string(c.granularity));
  j["parameters"] = c.parameters;
  j["optional_nodes"] = c.optional_nodes;
  j["template"] = detail::template_to_json(c.root, c);
  return j;
}

inline ConfigurableComponent component_from_json(const Json& j) {
  ConfigurableComponent c;
  c.component_id = j.at("component_id").get<std::string>();
  const auto gran = node_type_from_string(j.at("granularity").get<std::string>());
  if (!gran) throw ParseError("unknown component granularity", "/granularity");
  c.granularity = *gran;
  c.parameters = j.at("parameters").get<std::vector<std::string>>();
  c.optional_nodes = j.at("optional_nodes").get<std::vector<std::uint32_t>>();
  c.root = detail::template_from_json(j.at("template"), c.parameters);
  return c;
}

inline Json binding_to_json(const Binding& b) {
  Json j;
  Json slots = Json::object();
  for (const auto& [k, v] : b.slots) slots[k] = v;
  j["slots"] = std::move(slots);
  Json opt = Json::object();
  for (const auto& [k, v] : b.optional) opt[std::to_string(k)] = v;
  j["optional"] = std::move(opt);
  return j;
}

inline Binding binding_from_json(const Json& j) {
  Binding b;
  if (auto it = j.find("slots"); it != j.end())
    for (const auto& [k, v] : it->items()) b.slots[k] = v.get<std::string>();
  if (auto it = j.find("optional"); it != j.end())
    for (const auto& [k, v] : it->items())
      b.optional[static_cast<std::uint32_t>(std::stoul(k))] = v.get<bool>();
  return b;
}

// --- extraction --------------------------------------------------------------

namespace detail {

/// Label split into tokens plus the literal text around them.
struct LabelShape {
  std::vector<std::string> separators;  // size = tokens + 1
  std::vector<std::string> tokens;
};

inline LabelShape label_shape(const std::string& label) {
  LabelShape s;
  std::size_t pos = 0;
  for (auto& t : split_label(label)) {
    s.separators.push_back(label.substr(pos, t.offset - pos));
    pos = t.offset + t.text.size();
    s.tokens.push_back(std::move(t.text));
  }
  s.separators.push_back(label.substr(pos));
  return s;
}

/// Equal, or both identifiers, or both literals.
inline bool tokens_unifiable(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    const auto ca = classify_token(a[i]);
    if (ca != classify_token(b[i])) return false;
    if (ca != TokenClass::Identifier && ca != TokenClass::Literal) return false;
  }
  return true;
}

inline bool own_content_unifiable(const ArtifactNode& a, const ArtifactNode& b) {
  if (a.type != b.type || a.attributes != b.attributes) return false;
  if (a.type == NodeType::InstanceRef)  // nested references must agree verbatim
    return a.label == b.label && a.tokens == b.tokens;
  if (!tokens_unifiable(a.tokens, b.tokens)) return false;
  if (a.label == b.label) return true;
  const auto sa = label_shape(a.label), sb = label_shape(b.label);
  return sa.separators == sb.separators && tokens_unifiable(sa.tokens, sb.tokens);
}

struct WorkNode {
  const ArtifactNode* ref = nullptr;          // first member node merged here
  std::vector<const ArtifactNode*> present;   // per member; null when absent
  std::vector<WorkNode> children;
};

inline WorkNode work_from_member(const ArtifactNode& n, std::size_t member, std::size_t count) {
  WorkNode w;
  w.ref = &n;
  w.present.assign(count, nullptr);
  w.present[member] = &n;
  for (const auto& c : n.children) w.children.push_back(work_from_member(c, member, count));
  return w;
}

// Order-preserving alignment of a member's children into the work tree.
inline void align_into(WorkNode& work, const ArtifactNode& node, std::size_t member,
                       std::size_t count, SimilarityEngine& engine) {
  work.present[member] = &node;
  const auto& wc = work.children;
  const auto& mc = node.children;
  const std::size_t p = wc.size(), q = mc.size();
  std::vector<std::vector<double>> score(p + 1, std::vector<double>(q + 1, 0.0));
  std::vector<std::vector<double>> pair(p, std::vector<double>(q, -1.0));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j)
      if (own_content_unifiable(*wc[i].ref, mc[j])) pair[i][j] = 1.0 + engine(*wc[i].ref, mc[j]);
  for (std::size_t i = p; i-- > 0;)
    for (std::size_t j = q; j-- > 0;) {
      double best = std::max(score[i + 1][j], score[i][j + 1]);
      if (pair[i][j] >= 0.0) best = std::max(best, pair[i][j] + score[i + 1][j + 1]);
      score[i][j] = best;
    }
  std::vector<WorkNode> merged;
  std::size_t i = 0, j = 0;
  std::vector<WorkNode> old = std::move(work.children);
  while (i < p || j < q) {
    if (i < p && j < q && pair[i][j] >= 0.0 &&
        score[i][j] == pair[i][j] + score[i + 1][j + 1]) {
      align_into(old[i], mc[j], member, count, engine);
      merged.push_back(std::move(old[i]));
      ++i;
      ++j;
    } else if (i < p && (j == q || score[i][j] == score[i + 1][j])) {
      merged.push_back(std::move(old[i]));
      ++i;
    } else {
      merged.push_back(work_from_member(mc[j], member, count));
      ++j;
    }
  }
  work.children = std::move(merged);
}

struct PositionKey {
  std::vector<std::optional<std::string>> values;
  friend auto operator<=>(const PositionKey&, const PositionKey&) = default;
};

class TemplateBuilder {
 public:
  TemplateBuilder(std::size_t count, ConfigurableComponent& comp) : count_(count), comp_(comp) {}

  TemplateNode build(const WorkNode& w, const std::vector<bool>& parent_included) {
    TemplateNode t;
    t.tid = next_tid_++;
    t.type = w.ref->type;
    t.attributes = w.ref->attributes;
    std::vector<bool> included(count_);
    for (std::size_t m = 0; m < count_; ++m) included[m] = w.present[m] != nullptr;
    t.optional = included != parent_included;
    if (t.optional) {
      comp_.optional_nodes.push_back(t.tid);
      flags_.push_back({t.tid, included});
    }

    // label
    const auto shape = label_shape(w.ref->label);
    std::vector<std::vector<std::string>> member_label_tokens(count_);
    for (std::size_t m = 0; m < count_; ++m)
      if (w.present[m]) member_label_tokens[m] = label_shape(w.present[m]->label).tokens;
    std::string literal = shape.separators[0];
    for (std::size_t k = 0; k < shape.tokens.size(); ++k) {
      PositionKey key;
      for (std::size_t m = 0; m < count_; ++m)
        key.values.push_back(w.present[m] ? std::optional(member_label_tokens[m][k]) : std::nullopt);
      if (auto slot = slot_for(key)) {
        if (!literal.empty()) t.label.emplace_back(literal);
        literal.clear();
        t.label.emplace_back(*slot);
      } else {
        literal += shape.tokens[k];
      }
      literal += shape.separators[k + 1];
    }
    if (!literal.empty()) t.label.emplace_back(literal);

    for (std::size_t k = 0; k < w.ref->tokens.size(); ++k) {
      PositionKey key;
      for (std::size_t m = 0; m < count_; ++m)
        key.values.push_back(w.present[m] ? std::optional(w.present[m]->tokens[k]) : std::nullopt);
      if (auto slot = slot_for(key))
        t.tokens.emplace_back(*slot);
      else
        t.tokens.emplace_back(w.ref->tokens[k]);
    }
    for (const auto& c : w.children) t.children.push_back(build(c, included));
    return t;
  }

  std::vector<Binding> bindings() const {
    std::vector<Binding> out(count_);
    for (std::size_t m = 0; m < count_; ++m) {
      for (std::size_t s = 0; s < slot_keys_.size(); ++s) {
        const auto& vals = slot_keys_[s].values;
        std::string v;
        if (vals[m]) {
          v = *vals[m];
        } else {
          for (const auto& alt : vals)
            if (alt) {
              v = *alt;
              break;
            }
        }
        out[m].slots[slot_name(s)] = v;
      }
      for (const auto& [tid, inc] : flags_) out[m].optional[tid] = inc[m];
    }
    return out;
  }

 private:
  // Positions whose present values all agree stay literal; otherwise the
  // position joins the slot with the identical value signature.
  std::optional<Slot> slot_for(const PositionKey& key) {
    std::optional<std::string> first;
    bool differs = false;
    for (const auto& v : key.values) {
      if (!v) continue;
      if (!first) first = v;
      else if (*first != *v) differs = true;
    }
    if (!differs) return std::nullopt;
    auto it = slot_index_.find(key);
    if (it == slot_index_.end()) {
      it = slot_index_.emplace(key, slot_keys_.size()).first;
      slot_keys_.push_back(key);
      comp_.parameters.push_back(slot_name(it->second));
    }
    return Slot{it->second};
  }

  std::size_t count_;
  ConfigurableComponent& comp_;
  std::uint32_t next_tid_ = 0;
  std::map<PositionKey, std::size_t> slot_index_;
  std::vector<PositionKey> slot_keys_;
  std::vector<std::pair<std::uint32_t, std::vector<bool>>> flags_;
};

inline std::string component_digest_id(const ConfigurableComponent& c) {
  DigestBuilder b;
  b.text(component_to_json(c).dump());
  return "C" + b.finish().hex().substr(0, 12);
}

}  // namespace detail

struct Extraction {
  ConfigurableComponent component;
  std::vector<ComponentInstance> instances;  // one per member, in class member order
};

/// Builds a parameterized template covering every member of the class. The
/// representative's tree seeds the template; the other members are aligned
/// in order of EXACT hash. Throws ExtractionError naming the first member
/// the template cannot reproduce.
inline Extraction extract_component(const CloneClass& cls, const ArtifactGraph& graph,
                                    SimilarityWeights weights = {}) {
  if (cls.members.size() < 2) throw PreconditionError("a clone class needs two members");
  const HashIndex hashes(graph);
  std::vector<NodeId> order = cls.members;
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (a == cls.representative) return b != cls.representative;
    if (b == cls.representative) return false;
    if (hashes.exact(a) != hashes.exact(b)) return hashes.exact(a) < hashes.exact(b);
    return a < b;
  });
  const auto& rep = graph.at(order.front());
  for (auto m : order)
    if (!detail::own_content_unifiable(rep, graph.at(m)))
      throw ExtractionError("member " + std::to_string(m) + " does not unify with the template root", m);

  SimilarityEngine engine(weights);
  const std::size_t count = order.size();
  detail::WorkNode work = detail::work_from_member(rep, 0, count);
  for (std::size_t k = 1; k < count; ++k) detail::align_into(work, graph.at(order[k]), k, count, engine);

  Extraction ex;
  ex.component.granularity = cls.granularity;
  detail::TemplateBuilder builder(count, ex.component);
  ex.component.root = builder.build(work, std::vector<bool>(count, true));
  std::sort(ex.component.optional_nodes.begin(), ex.component.optional_nodes.end());
  ex.component.component_id = detail::component_digest_id(ex.component);

  const auto bindings = builder.bindings();
  std::vector<ComponentInstance> by_order;
  for (std::size_t k = 0; k < count; ++k) {
    const auto& original = graph.at(order[k]);
    if (!content_equal(expand_instance(ex.component, bindings[k]), original))
      throw ExtractionError("member " + std::to_string(order[k]) + " is not reproducible", order[k]);
    by_order.push_back({ex.component.component_id, bindings[k], order[k]});
  }
  for (auto m : cls.members)
    for (const auto& inst : by_order)
      if (inst.original_location == m) ex.instances.push_back(inst);
  return ex;
}

struct RefactorResult {
  ArtifactGraph graph;
  std::vector<ConfigurableComponent> components;  // sorted by id, unique
  std::vector<ComponentInstance> instances;
  std::vector<NodeId> unrefactored;  // members left in place after extraction failures
};

namespace detail {

inline ArtifactNode replace_nodes(const ArtifactNode& n,
                                  const std::unordered_map<NodeId, ArtifactNode>& repl) {
  if (auto it = repl.find(n.id); it != repl.end()) return it->second;
  ArtifactNode out = n;
  out.children.clear();
  for (const auto& c : n.children) out.children.push_back(replace_nodes(c, repl));
  return out;
}

}  // namespace detail

/// Replaces every member subtree by an INSTANCE_REF. Members a template
/// cannot reproduce stay in place; classes left with one member are skipped.
inline RefactorResult refactor_graph(const ArtifactGraph& graph, const std::vector<CloneClass>& classes,
                                     SimilarityWeights weights = {}) {
  std::vector<NodeId> all;
  for (const auto& c : classes) all.insert(all.end(), c.members.begin(), c.members.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i > 0 && all[i] == all[i - 1])
      throw PreconditionError("clone classes share member " + std::to_string(all[i]));
    if (i + 1 < all.size() && graph.is_ancestor(all[i], all[i + 1]))
      throw PreconditionError("clone members " + std::to_string(all[i]) + " and " +
                              std::to_string(all[i + 1]) + " overlap");
  }

  std::unordered_map<NodeId, ArtifactNode> replacements;
  std::map<std::string, ConfigurableComponent> components;
  RefactorResult result;
  for (const auto& original : classes) {
    CloneClass cls = original;
    while (cls.members.size() >= 2) {
      try {
        auto ex = extract_component(cls, graph, weights);
        for (const auto& inst : ex.instances) {
          replacements[inst.original_location] = make_instance_ref(ex.component, inst.binding);
          result.instances.push_back(inst);
        }
        components.emplace(ex.component.component_id, std::move(ex.component));
        break;
      } catch (const ExtractionError& e) {
        result.unrefactored.push_back(e.member());
        std::erase(cls.members, e.member());
        if (cls.representative == e.member() && !cls.members.empty())
          cls.representative = cls.members.front();
      }
    }
    if (cls.members.size() == 1) result.unrefactored.push_back(cls.members.front());
  }
  std::sort(result.unrefactored.begin(), result.unrefactored.end());
  result.graph = ArtifactGraph(graph.variant_id(), detail::replace_nodes(graph.root(), replacements));
  for (auto& [_, c] : components) result.components.push_back(std::move(c));
  return result;
}

using ComponentLibrary = std::map<std::string, ConfigurableComponent>;

inline ComponentLibrary make_library(const std::vector<ConfigurableComponent>& components) {
  ComponentLibrary lib;
  for (const auto& c : components) lib.emplace(c.component_id, c);
  return lib;
}

/// Recursively replaces INSTANCE_REF nodes with their expansions.
inline ArtifactNode expand_references(const ArtifactNode& node, const ComponentLibrary& lib) {
  if (node.type == NodeType::InstanceRef) {
    auto it = lib.find(node.label);
    if (it == lib.end()) throw LookupError("unknown component " + node.label);
    return expand_references(expand_instance(it->second, binding_from_instance_ref(node)), lib);
  }
  ArtifactNode out = node;
  out.children.clear();
  for (const auto& c : node.children) out.children.push_back(expand_references(c, lib));
  return out;
}

inline ArtifactGraph expand_all(const ArtifactGraph& graph, const ComponentLibrary& lib) {
  return ArtifactGraph(graph.variant_id(), expand_references(graph.root(), lib));
}

}  // namespace mple
