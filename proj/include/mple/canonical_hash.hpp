#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "mple/artifact_graph.hpp"
#include "mple/digest.hpp"
#include "mple/tokenizer.hpp"

namespace mple {

enum class Abstraction { Exact, Abstracted };

struct CanonicalHash {
  Digest value;
  Abstraction abstraction = Abstraction::Exact;

  friend auto operator<=>(const CanonicalHash&, const CanonicalHash&) = default;
};

/// Consistent renaming: the k-th distinct identifier becomes IDk, every
/// literal becomes LIT. One instance spans a whole subtree.
class TokenAbstractor {
 public:
  std::string operator()(const std::string& tok) {
    switch (classify_token(tok)) {
      case TokenClass::Identifier: {
        auto [it, inserted] = names_.try_emplace(tok, names_.size() + 1);
        return "ID" + std::to_string(it->second);
      }
      case TokenClass::Literal:
        return "LIT";
      default:
        return tok;
    }
  }

 private:
  std::unordered_map<std::string, std::size_t> names_;
};

inline std::vector<std::string> abstract_tokens(const std::vector<std::string>& tokens) {
  TokenAbstractor abs;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(abs(t));
  return out;
}

/// Digest of (type, label, tokens, child digests). Ids, attributes and
/// position never contribute.
inline Digest exact_digest(const ArtifactNode& node) {
  DigestBuilder b;
  b.byte('E').byte(static_cast<std::uint8_t>(node.type)).text(node.label);
  b.u64(node.tokens.size());
  for (const auto& t : node.tokens) b.text(t);
  b.u64(node.children.size());
  for (const auto& c : node.children) b.digest(exact_digest(c));
  return b.finish();
}

namespace detail {
inline void feed_abstracted(const ArtifactNode& node, TokenAbstractor& abs,
                            DigestBuilder& b) {
  b.byte(static_cast<std::uint8_t>(node.type));
  const auto label = label_tokens(node.label);
  b.u64(label.size());
  for (const auto& t : label) b.text(abs(t));
  b.u64(node.tokens.size());
  for (const auto& t : node.tokens) b.text(abs(t));
  b.u64(node.children.size());
  for (const auto& c : node.children) feed_abstracted(c, abs, b);
}
}  // namespace detail

inline Digest abstracted_digest(const ArtifactNode& node) {
  TokenAbstractor abs;
  DigestBuilder b;
  b.byte('A');
  detail::feed_abstracted(node, abs, b);
  return b.finish();
}

inline CanonicalHash canonical_hash(const ArtifactNode& node, Abstraction abstraction) {
  return {abstraction == Abstraction::Exact ? exact_digest(node) : abstracted_digest(node),
          abstraction};
}

/// Per-graph hash table: EXACT digests for every node (computed bottom-up
/// once), ABSTRACTED digests on demand.
class HashIndex {
 public:
  explicit HashIndex(const ArtifactGraph& graph) : graph_(&graph) {
    exact_.resize(graph.size());
    fill(graph.root());
  }

  const Digest& exact(NodeId id) const { return exact_.at(id); }

  const Digest& abstracted(NodeId id) const {
    auto it = abstracted_.find(id);
    if (it == abstracted_.end())
      it = abstracted_.emplace(id, abstracted_digest(graph_->at(id))).first;
    return it->second;
  }

  const ArtifactGraph& graph() const { return *graph_; }

 private:
  Digest fill(const ArtifactNode& node) {
    DigestBuilder b;
    b.byte('E').byte(static_cast<std::uint8_t>(node.type)).text(node.label);
    b.u64(node.tokens.size());
    for (const auto& t : node.tokens) b.text(t);
    b.u64(node.children.size());
    for (const auto& c : node.children) b.digest(fill(c));
    return exact_[node.id] = b.finish();
  }

  const ArtifactGraph* graph_;
  std::vector<Digest> exact_;
  mutable std::unordered_map<NodeId, Digest> abstracted_;
};

}  // namespace mple
