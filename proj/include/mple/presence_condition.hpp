#pragma once

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mple/error.hpp"

namespace mple {

/// Propositional formula over feature names.
///
///   cond := term ('|' term)*
///   term := fact ('&' fact)*
///   fact := '!' fact | '(' cond ')' | NAME
struct Condition {
  enum class Op { Var, Not, And, Or };

  Op op = Op::Var;
  std::string name;             // Var only
  std::vector<Condition> args;  // Not: 1, And/Or: >= 2

  static Condition var(std::string n) { return {Op::Var, std::move(n), {}}; }
  static Condition negate(Condition c) { return {Op::Not, "", {std::move(c)}}; }
  static Condition all_of(std::vector<Condition> cs) { return {Op::And, "", std::move(cs)}; }
  static Condition any_of(std::vector<Condition> cs) { return {Op::Or, "", std::move(cs)}; }

  friend bool operator==(const Condition&, const Condition&) = default;
};

namespace detail {

inline bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

class ConditionParser {
 public:
  explicit ConditionParser(std::string_view text) : text_(text) {}

  Condition parse() {
    auto c = cond();
    skip();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("condition syntax error: " + what, 1, pos_ + 1);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Condition cond() {
    std::vector<Condition> parts{term()};
    while (accept('|')) parts.push_back(term());
    return parts.size() == 1 ? std::move(parts[0]) : Condition::any_of(std::move(parts));
  }

  Condition term() {
    std::vector<Condition> parts{fact()};
    while (accept('&')) parts.push_back(fact());
    return parts.size() == 1 ? std::move(parts[0]) : Condition::all_of(std::move(parts));
  }

  Condition fact() {
    if (accept('!')) return Condition::negate(fact());
    if (accept('(')) {
      auto c = cond();
      if (!accept(')')) fail("expected ')'");
      return c;
    }
    skip();
    const auto start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    if (start == pos_) fail(pos_ < text_.size() ? "expected a feature name" : "unexpected end of condition");
    return Condition::var(std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Condition parse_condition(std::string_view text) {
  return detail::ConditionParser(text).parse();
}

/// Prints with the fewest parentheses that still reparse to the same tree.
inline std::string to_string(const Condition& c) {
  using Op = Condition::Op;
  switch (c.op) {
    case Op::Var:
      return c.name;
    case Op::Not: {
      const auto& a = c.args.at(0);
      const bool bare = a.op == Op::Var || a.op == Op::Not;
      return "!" + (bare ? to_string(a) : "(" + to_string(a) + ")");
    }
    case Op::And:
    case Op::Or: {
      std::string out;
      for (const auto& a : c.args) {
        if (!out.empty()) out += c.op == Op::And ? " & " : " | ";
        const bool wrap = a.op == c.op || (c.op == Op::And && a.op == Op::Or);
        out += wrap ? "(" + to_string(a) + ")" : to_string(a);
      }
      return out;
    }
  }
  return {};
}

inline bool eval_condition(const Condition& c, const std::set<std::string>& selected) {
  using Op = Condition::Op;
  switch (c.op) {
    case Op::Var: return selected.count(c.name) > 0;
    case Op::Not: return !eval_condition(c.args.at(0), selected);
    case Op::And:
      for (const auto& a : c.args)
        if (!eval_condition(a, selected)) return false;
      return true;
    case Op::Or:
      for (const auto& a : c.args)
        if (eval_condition(a, selected)) return true;
      return false;
  }
  return false;
}

inline void collect_features(const Condition& c, std::set<std::string>& out) {
  if (c.op == Condition::Op::Var) out.insert(c.name);
  for (const auto& a : c.args) collect_features(a, out);
}

}  // namespace mple
