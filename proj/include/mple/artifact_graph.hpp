#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mple/error.hpp"

namespace mple {

using NodeId = std::uint32_t;

/// Node kinds, declared coarse to fine. INSTANCE_REF is produced by clone
/// refactoring and stands in for an extracted subtree.
enum class NodeType : std::uint8_t {
  System,
  Package,
  Class,
  Method,
  Block,
  Statement,
  InstanceRef,
};

inline constexpr std::array<std::string_view, 7> kNodeTypeNames = {
    "SYSTEM", "PACKAGE", "CLASS", "METHOD", "BLOCK", "STATEMENT", "INSTANCE_REF"};

inline std::string_view to_string(NodeType t) {
  return kNodeTypeNames[static_cast<std::size_t>(t)];
}

inline std::optional<NodeType> node_type_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kNodeTypeNames.size(); ++i)
    if (kNodeTypeNames[i] == s) return static_cast<NodeType>(i);
  return std::nullopt;
}

/// Granularity rank; smaller is coarser.
inline constexpr int granularity_rank(NodeType t) { return static_cast<int>(t); }

inline constexpr bool is_leaf_type(NodeType t) {
  return t == NodeType::Statement || t == NodeType::InstanceRef;
}

/// Containment rules of the generic tree.
inline constexpr bool allowed_child(NodeType parent, NodeType child) {
  if (child == NodeType::InstanceRef) return !is_leaf_type(parent);
  switch (parent) {
    case NodeType::System:
    case NodeType::Package:
      return child == NodeType::Package || child == NodeType::Class;
    case NodeType::Class:
      return child == NodeType::Method;
    case NodeType::Method:
    case NodeType::Block:
      return child == NodeType::Block || child == NodeType::Statement;
    default:
      return false;
  }
}

struct ArtifactNode {
  NodeId id = 0;
  NodeType type = NodeType::Statement;
  std::string label;
  std::vector<std::string> tokens;
  std::vector<ArtifactNode> children;
  std::map<std::string, std::string> attributes;
};

/// Structural equality ignoring ids.
inline bool content_equal(const ArtifactNode& a, const ArtifactNode& b) {
  if (a.type != b.type || a.label != b.label || a.tokens != b.tokens ||
      a.attributes != b.attributes || a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!content_equal(a.children[i], b.children[i])) return false;
  return true;
}

/// Pre-order visit; the callback receives the node and its depth.
template <typename Node, typename Fn>
void visit_preorder(Node& node, Fn&& fn, int depth = 0) {
  fn(node, depth);
  for (auto& child : node.children) visit_preorder(child, fn, depth + 1);
}

inline std::size_t count_nodes(const ArtifactNode& node) {
  std::size_t n = 1;
  for (const auto& c : node.children) n += count_nodes(c);
  return n;
}

/// Number of statement (and instance) tokens below a node.
inline std::size_t token_mass(const ArtifactNode& node) {
  std::size_t n = node.tokens.size();
  for (const auto& c : node.children) n += token_mass(c);
  return n;
}

/// Renumbers ids in pre-order starting at 0 and returns old id -> new id.
/// Old ids need not be unique; later duplicates overwrite earlier entries.
inline std::unordered_map<NodeId, NodeId> renumber_preorder(ArtifactNode& root) {
  std::unordered_map<NodeId, NodeId> mapping;
  NodeId next = 0;
  visit_preorder(root, [&](ArtifactNode& n, int) {
    mapping[n.id] = next;
    n.id = next++;
  });
  return mapping;
}

inline std::string describe(const ArtifactNode& n) {
  std::string s(to_string(n.type));
  if (!n.label.empty()) s += " \"" + n.label + "\"";
  s += " (id " + std::to_string(n.id) + ")";
  return s;
}

/// Checks every tree invariant; throws StructuralError naming the node.
inline void validate_structure(const ArtifactNode& root) {
  if (root.type != NodeType::System)
    throw StructuralError("root must be SYSTEM, found " + describe(root));
  std::function<void(const ArtifactNode&)> check = [&](const ArtifactNode& n) {
    if (!is_leaf_type(n.type) && !n.tokens.empty())
      throw StructuralError("tokens only allowed on STATEMENT/INSTANCE_REF: " +
                            describe(n));
    if ((n.type == NodeType::Class || n.type == NodeType::Method) && n.label.empty())
      throw StructuralError("missing label on " + describe(n));
    for (const auto& c : n.children) {
      if (!allowed_child(n.type, c.type))
        throw StructuralError(describe(c) + " may not be a child of " + describe(n));
      check(c);
    }
  };
  check(root);
}

inline bool is_structurally_valid(const ArtifactNode& root) {
  try {
    validate_structure(root);
    return true;
  } catch (const StructuralError&) {
    return false;
  }
}

/// One parsed variant: a validated tree with pre-order ids and an id index.
/// Immutable once built.
class ArtifactGraph {
 public:
  ArtifactGraph() : ArtifactGraph("", ArtifactNode{0, NodeType::System, "", {}, {}, {}}) {}

  ArtifactGraph(std::string variant_id, ArtifactNode root)
      : variant_id_(std::move(variant_id)), root_(std::move(root)) {
    renumber_preorder(root_);
    validate_structure(root_);
    reindex();
  }

  ArtifactGraph(const ArtifactGraph& other)
      : variant_id_(other.variant_id_), root_(other.root_) {
    reindex();
  }
  ArtifactGraph(ArtifactGraph&& other) noexcept
      : variant_id_(std::move(other.variant_id_)), root_(std::move(other.root_)) {
    reindex();
  }
  ArtifactGraph& operator=(const ArtifactGraph& other) {
    if (this != &other) {
      variant_id_ = other.variant_id_;
      root_ = other.root_;
      reindex();
    }
    return *this;
  }
  ArtifactGraph& operator=(ArtifactGraph&& other) noexcept {
    variant_id_ = std::move(other.variant_id_);
    root_ = std::move(other.root_);
    reindex();
    return *this;
  }

  const std::string& variant_id() const noexcept { return variant_id_; }
  const ArtifactNode& root() const noexcept { return root_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  const ArtifactNode* find(NodeId id) const {
    return id < nodes_.size() ? nodes_[id] : nullptr;
  }

  const ArtifactNode& at(NodeId id) const {
    if (id >= nodes_.size())
      throw LookupError("no node " + std::to_string(id) + " in variant " + variant_id_);
    return *nodes_[id];
  }

  /// Parent id; the root is its own parent.
  NodeId parent(NodeId id) const { return parent_.at(id); }
  int depth(NodeId id) const { return depth_.at(id); }

  /// True when `ancestor` is a proper ancestor of `node`.
  bool is_ancestor(NodeId ancestor, NodeId node) const {
    return ancestor < node && node < end_.at(ancestor);
  }

  /// All nodes in pre-order.
  const std::vector<const ArtifactNode*>& nodes() const noexcept { return nodes_; }

  /// Same tree under a different variant id.
  ArtifactGraph renamed(std::string variant_id) const {
    ArtifactGraph g(*this);
    g.variant_id_ = std::move(variant_id);
    return g;
  }

  friend bool operator==(const ArtifactGraph& a, const ArtifactGraph& b) {
    return a.variant_id_ == b.variant_id_ && content_equal(a.root_, b.root_);
  }

 private:
  void reindex() {
    nodes_.clear();
    parent_.clear();
    depth_.clear();
    end_.clear();
    index(root_, 0, 0);
  }

  void index(const ArtifactNode& n, NodeId parent, int depth) {
    const auto self = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(&n);
    parent_.push_back(parent);
    depth_.push_back(depth);
    end_.push_back(0);
    for (const auto& c : n.children) index(c, self, depth + 1);
    end_[self] = static_cast<NodeId>(nodes_.size());
  }

  std::string variant_id_;
  ArtifactNode root_;
  std::vector<const ArtifactNode*> nodes_;
  std::vector<NodeId> parent_;
  std::vector<int> depth_;
  std::vector<NodeId> end_;
};

}  // namespace mple
