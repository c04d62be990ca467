#pragma once

// Adapter for a small Java subset:
//
//   unit    := ('package' qname ';')? ('import' ... ';')* class*
//   class   := modifier* ('class' | 'interface') NAME header* '{' method* '}'
//   method  := modifier* type? NAME '(' params ')' ('throws' names)? (body | ';')
//   body    := '{' (stmt | label-tokens body)* '}'
//   stmt    := tokens ';'
//
// Fields, enums, nested and anonymous classes are outside the subset.

#include <string>
#include <string_view>
#include <vector>

#include "mple/artifact_graph.hpp"
#include "mple/error.hpp"
#include "mple/tokenizer.hpp"

namespace mple {

/// Joins tokens with single spaces; used for block labels.
inline std::string render_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

namespace detail {

class JavaSubsetParser {
 public:
  explicit JavaSubsetParser(std::string_view source) : tokens_(tokenize(source)) {
    end_line_ = 1;
    end_col_ = 1;
    for (char c : source) {
      if (c == '\n') {
        ++end_line_;
        end_col_ = 1;
      } else {
        ++end_col_;
      }
    }
  }

  ArtifactNode parse_unit() {
    ArtifactNode system{0, NodeType::System, "", {}, {}, {}};
    ArtifactNode* container = &system;
    ArtifactNode package;
    bool has_package = false;
    if (peek_is("package")) {
      next();
      package = ArtifactNode{0, NodeType::Package, qualified_name(), {}, {}, {}};
      expect(";");
      has_package = true;
      container = &package;
    }
    std::vector<std::string> imports;
    while (peek_is("import")) {
      next();
      std::vector<std::string> parts;
      while (!at_end() && !peek_is(";")) parts.push_back(next().text);
      expect(";");
      std::string joined;
      for (const auto& p : parts) joined += p;
      imports.push_back(joined);
    }
    std::string all;
    for (const auto& i : imports) all += (all.empty() ? "" : ";") + i;
    while (!at_end()) {
      container->children.push_back(parse_class());
      if (!all.empty()) container->children.back().attributes["imports"] = all;
    }
    if (has_package) system.children.push_back(std::move(package));
    return system;
  }

 private:
  bool at_end() const { return pos_ >= tokens_.size(); }
  bool peek_is(std::string_view s) const { return !at_end() && tokens_[pos_].text == s; }

  const Token& next() {
    if (at_end()) fail_eof("unexpected end of input");
    return tokens_[pos_++];
  }

  [[noreturn]] void fail_eof(const std::string& what) const {
    throw ParseError(what, end_line_, end_col_);
  }
  [[noreturn]] void fail_at(const Token& t, const std::string& what) const {
    throw ParseError(what, t.line, t.column);
  }

  void expect(std::string_view s) {
    if (at_end()) fail_eof("expected '" + std::string(s) + "'");
    const auto& t = tokens_[pos_];
    if (t.text != s) fail_at(t, "expected '" + std::string(s) + "', found '" + t.text + "'");
    ++pos_;
  }

  std::string identifier() {
    if (at_end()) fail_eof("expected an identifier");
    const auto& t = tokens_[pos_];
    if (t.cls != TokenClass::Identifier) fail_at(t, "expected an identifier, found '" + t.text + "'");
    ++pos_;
    return t.text;
  }

  std::string qualified_name() {
    std::string name = identifier();
    while (peek_is(".")) {
      next();
      name += "." + identifier();
    }
    return name;
  }

  static bool is_modifier(std::string_view s) {
    return s == "public" || s == "private" || s == "protected" || s == "static" ||
           s == "final" || s == "abstract" || s == "synchronized" || s == "native" ||
           s == "strictfp" || s == "transient" || s == "volatile";
  }

  std::string modifiers() {
    std::string mods;
    while (!at_end() && is_modifier(tokens_[pos_].text)) {
      if (!mods.empty()) mods += ' ';
      mods += next().text;
    }
    return mods;
  }

  ArtifactNode parse_class() {
    ArtifactNode cls{0, NodeType::Class, "", {}, {}, {}};
    const auto mods = modifiers();
    if (!mods.empty()) cls.attributes["modifiers"] = mods;
    if (at_end()) fail_eof("expected a class declaration");
    const auto& kw = tokens_[pos_];
    if (kw.text == "interface") {
      cls.attributes["kind"] = "interface";
    } else if (kw.text != "class") {
      fail_at(kw, "expected 'class', found '" + kw.text + "'");
    }
    ++pos_;
    cls.label = identifier();
    std::vector<std::string> header;
    while (!at_end() && !peek_is("{")) header.push_back(next().text);
    if (!header.empty()) cls.attributes["header"] = render_tokens(header);
    expect("{");
    while (true) {
      if (at_end()) fail_eof("unbalanced braces: class '" + cls.label + "' is not closed");
      if (peek_is("}")) {
        next();
        break;
      }
      cls.children.push_back(parse_method());
    }
    return cls;
  }

  ArtifactNode parse_method() {
    ArtifactNode method{0, NodeType::Method, "", {}, {}, {}};
    const auto mods = modifiers();
    if (!mods.empty()) method.attributes["modifiers"] = mods;
    std::vector<const Token*> head;
    while (true) {
      if (at_end()) fail_eof("unexpected end of input in member declaration");
      const auto& t = tokens_[pos_];
      if (t.text == "(") break;
      if (t.text == ";" || t.text == "=")
        fail_at(t, "field declarations are outside the supported subset");
      if (t.text == "{" || t.text == "}" || t.text == "class")
        fail_at(t, "expected a method declaration, found '" + t.text + "'");
      head.push_back(&t);
      ++pos_;
    }
    if (head.empty() || head.back()->cls != TokenClass::Identifier)
      fail_at(tokens_[pos_], "expected a method name before '('");
    const std::string name = head.back()->text;
    head.pop_back();
    if (!head.empty()) {
      std::vector<std::string> ret;
      for (const auto* t : head) ret.push_back(t->text);
      method.attributes["returns"] = render_tokens(ret);
    }
    expect("(");
    std::string params;
    int depth = 0;
    bool space = false;
    while (true) {
      if (at_end()) fail_eof("unbalanced parentheses in parameter list of '" + name + "'");
      const auto& t = next();
      if (t.text == "(" || t.text == "<") ++depth;
      if (t.text == ">") --depth;
      if (t.text == ")") {
        if (depth == 0) break;
        --depth;
      }
      if (t.text == ",") {
        params += ", ";
        space = false;
        continue;
      }
      if (space) params += ' ';
      params += t.text;
      space = true;
    }
    method.label = name + "(" + params + ")";
    if (peek_is("throws")) {
      next();
      std::vector<std::string> thrown;
      while (!at_end() && !peek_is("{") && !peek_is(";")) thrown.push_back(next().text);
      method.attributes["throws"] = render_tokens(thrown);
    }
    if (peek_is(";")) {
      next();
      return method;
    }
    expect("{");
    method.children.push_back(parse_block_body(""));
    return method;
  }

  static bool opens_initializer(const std::vector<std::string>& pending) {
    if (pending.empty()) return false;
    const auto& last = pending.back();
    return last == "=" || last == "," || last == "(" || last == "]" || last == "->" ||
           last == "{";
  }

  // Called after the opening '{' has been consumed.
  ArtifactNode parse_block_body(std::string label) {
    ArtifactNode block{0, NodeType::Block, std::move(label), {}, {}, {}};
    std::vector<std::string> pending;
    const Token* pending_start = nullptr;
    int parens = 0;
    while (true) {
      if (at_end()) fail_eof("unbalanced braces: block is not closed");
      const auto& t = tokens_[pos_];
      if (t.text == "(") ++parens;
      if (t.text == ")") --parens;
      if (t.text == ";" && parens <= 0) {
        ++pos_;
        pending.push_back(";");
        block.children.push_back(
            ArtifactNode{0, NodeType::Statement, "", std::move(pending), {}, {}});
        pending.clear();
        pending_start = nullptr;
        parens = 0;
        continue;
      }
      if (t.text == "{") {
        ++pos_;
        if (opens_initializer(pending) || parens > 0) {
          pending.push_back("{");
          consume_balanced(pending);
          continue;
        }
        block.children.push_back(parse_block_body(render_tokens(pending)));
        pending.clear();
        pending_start = nullptr;
        continue;
      }
      if (t.text == "}") {
        if (!pending.empty())
          fail_at(t, "missing ';' after statement starting at line " +
                         std::to_string(pending_start->line));
        ++pos_;
        return block;
      }
      if (pending.empty()) pending_start = &t;
      pending.push_back(t.text);
      ++pos_;
    }
  }

  // Copies tokens up to the '}' matching an already consumed '{'.
  void consume_balanced(std::vector<std::string>& out) {
    int depth = 1;
    while (depth > 0) {
      if (at_end()) fail_eof("unbalanced braces in initializer");
      const auto& t = next();
      if (t.text == "{") ++depth;
      if (t.text == "}") --depth;
      out.push_back(t.text);
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t end_line_;
  std::size_t end_col_;
};

}  // namespace detail

/// Java-subset source -> graph. Comments and formatting do not survive.
inline ArtifactGraph parse_java_subset(std::string_view source,
                                       std::string variant_id = "variant") {
  detail::JavaSubsetParser parser(source);
  return ArtifactGraph(std::move(variant_id), parser.parse_unit());
}

}  // namespace mple
