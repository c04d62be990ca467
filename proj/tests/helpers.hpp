#pragma once

#include <string>
#include <vector>

#include "mple/artifact_graph.hpp"
#include "mple/tokenizer.hpp"

namespace mple::test {

inline ArtifactNode stmt(std::vector<std::string> tokens) {
  return ArtifactNode{0, NodeType::Statement, "", std::move(tokens), {}, {}};
}

// Statement from space-separated text.
inline ArtifactNode stmt(const std::string& text) {
  std::vector<std::string> tokens;
  for (auto& t : split_label(text)) tokens.push_back(t.text);
  return stmt(std::move(tokens));
}

inline ArtifactNode node(NodeType type, std::string label, std::vector<ArtifactNode> children) {
  return ArtifactNode{0, type, std::move(label), {}, std::move(children), {}};
}

inline ArtifactNode block(std::vector<ArtifactNode> children, std::string label = "") {
  return node(NodeType::Block, std::move(label), std::move(children));
}

inline ArtifactNode method(std::string label, std::vector<ArtifactNode> body) {
  return node(NodeType::Method, std::move(label), {block(std::move(body))});
}

inline ArtifactNode cls(std::string label, std::vector<ArtifactNode> methods) {
  return node(NodeType::Class, std::move(label), std::move(methods));
}

inline ArtifactNode sys(std::vector<ArtifactNode> children) {
  return node(NodeType::System, "", std::move(children));
}

inline ArtifactGraph graph(std::string id, std::vector<ArtifactNode> children) {
  return ArtifactGraph(std::move(id), sys(std::move(children)));
}

}  // namespace mple::test
