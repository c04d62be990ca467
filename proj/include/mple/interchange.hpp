#pragma once

#include <algorithm>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mple/artifact_graph.hpp"
#include "mple/error.hpp"

namespace mple {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text,
                                                       std::size_t byte) {
  std::size_t line = 1, col = 1;
  byte = std::min(byte, text.size());
  for (std::size_t i = 0; i < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing field '") + key + "'", where);
  return *it;
}

inline std::string require_string(const Json& v, const std::string& where) {
  if (!v.is_string()) throw ParseError("expected a string", where);
  return v.get<std::string>();
}

}  // namespace detail

/// Parses any JSON text, mapping syntax errors to ParseError with a position.
inline Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed JSON document", line, col);
  }
}

inline Json node_to_json(const ArtifactNode& node) {
  Json j;
  j["type"] = std::string(to_string(node.type));
  j["label"] = node.label;
  j["tokens"] = node.tokens;
  Json attrs = Json::object();
  for (const auto& [k, v] : node.attributes) attrs[k] = v;
  j["attributes"] = std::move(attrs);
  j["children"] = Json::array();
  for (const auto& c : node.children) j["children"].push_back(node_to_json(c));
  return j;
}

/// Builds a node from its document form; `where` is the JSON pointer used in
/// error messages.
inline ArtifactNode node_from_json(const Json& j, const std::string& where = "") {
  if (!j.is_object()) throw ParseError("expected a node object", where);
  ArtifactNode n;
  const auto type_name = detail::require_string(detail::require(j, "type", where), where + "/type");
  const auto type = node_type_from_string(type_name);
  if (!type) throw ParseError("unknown node type '" + type_name + "'", where + "/type");
  n.type = *type;
  if (auto it = j.find("label"); it != j.end())
    n.label = detail::require_string(*it, where + "/label");
  if (auto it = j.find("tokens"); it != j.end()) {
    if (!it->is_array()) throw ParseError("expected a token array", where + "/tokens");
    for (std::size_t i = 0; i < it->size(); ++i)
      n.tokens.push_back(
          detail::require_string((*it)[i], where + "/tokens/" + std::to_string(i)));
  }
  if (auto it = j.find("attributes"); it != j.end()) {
    if (!it->is_object()) throw ParseError("expected an attribute object", where + "/attributes");
    for (const auto& [k, v] : it->items())
      n.attributes[k] = detail::require_string(v, where + "/attributes/" + k);
  }
  if (auto it = j.find("children"); it != j.end()) {
    if (!it->is_array()) throw ParseError("expected a child array", where + "/children");
    for (std::size_t i = 0; i < it->size(); ++i)
      n.children.push_back(node_from_json((*it)[i], where + "/children/" + std::to_string(i)));
  }
  return n;
}

inline Json graph_to_json(const ArtifactGraph& graph) {
  Json j;
  j["variant_id"] = graph.variant_id();
  j["root"] = node_to_json(graph.root());
  return j;
}

inline ArtifactGraph graph_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("expected a graph document object", "");
  auto variant = detail::require_string(detail::require(j, "variant_id", ""), "/variant_id");
  auto root = node_from_json(detail::require(j, "root", ""), "/root");
  return ArtifactGraph(std::move(variant), std::move(root));
}

/// Interchange document -> graph. Ids are assigned in pre-order.
inline ArtifactGraph parse_generic_tree(std::string_view text) {
  return graph_from_json(parse_json_text(text));
}

/// Graph -> interchange document. Deterministic; round-trips through
/// parse_generic_tree.
inline std::string serialize_graph(const ArtifactGraph& graph) {
  return graph_to_json(graph).dump(2) + "\n";
}

}  // namespace mple
