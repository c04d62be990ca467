#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "mple/error.hpp"

namespace mple {

enum class TokenClass { Identifier, Keyword, Literal, Operator };

struct Token {
  std::string text;
  TokenClass cls = TokenClass::Operator;
  std::size_t offset = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

namespace detail {

inline constexpr std::array<std::string_view, 50> kJavaKeywords = {
    "abstract", "assert",     "boolean",   "break",      "byte",      "case",
    "catch",    "char",       "class",     "const",      "continue",  "default",
    "do",       "double",     "else",      "enum",       "extends",   "final",
    "finally",  "float",      "for",       "goto",       "if",        "implements",
    "import",   "instanceof", "int",       "interface",  "long",      "native",
    "new",      "package",    "private",   "protected",  "public",    "return",
    "short",    "static",     "strictfp",  "super",      "switch",    "synchronized",
    "this",     "throw",      "throws",    "transient",  "try",       "void",
    "volatile", "while"};

inline constexpr std::array<std::string_view, 20> kTwoCharOps = {
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "->", "::", "<<", ">>"};

inline bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

inline bool is_keyword(std::string_view s) {
  return std::find(kJavaKeywords.begin(), kJavaKeywords.end(), s) != kJavaKeywords.end();
}

inline bool is_punct(char c) {
  static constexpr std::string_view kPunct = "{}()[];,.=<>+-*/%!&|^~?:@";
  return kPunct.find(c) != std::string_view::npos;
}

class Scanner {
 public:
  Scanner(std::string_view src, bool lenient) : src_(src), lenient_(lenient) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (skip_trivia(), pos_ < src_.size()) out.push_back(next());
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t line, std::size_t col) const {
    throw ParseError(what, line, col);
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (!lenient_ && src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (!lenient_ && src_.substr(pos_, 2) == "/*") {
        const auto line = line_, col = col_;
        advance();
        advance();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size()) fail("unterminated comment", line, col);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  Token next() {
    Token t;
    t.offset = pos_;
    t.line = line_;
    t.column = col_;
    const char c = src_[pos_];
    const std::size_t start = pos_;
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
      t.text = std::string(src_.substr(start, pos_ - start));
      if (t.text == "true" || t.text == "false" || t.text == "null")
        t.cls = TokenClass::Literal;
      else
        t.cls = is_keyword(t.text) ? TokenClass::Keyword : TokenClass::Identifier;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() &&
             (is_ident_char(src_[pos_]) || src_[pos_] == '.'))
        advance();
      t.text = std::string(src_.substr(start, pos_ - start));
      t.cls = TokenClass::Literal;
    } else if (c == '"' || c == '\'') {
      advance();
      bool closed = false;
      while (pos_ < src_.size() && src_[pos_] != '\n') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
          advance();
          advance();
          continue;
        }
        if (src_[pos_] == c) {
          advance();
          closed = true;
          break;
        }
        advance();
      }
      if (!closed && !lenient_)
        fail(c == '"' ? "unterminated string literal" : "unterminated character literal",
             t.line, t.column);
      t.text = std::string(src_.substr(start, pos_ - start));
      t.cls = TokenClass::Literal;
    } else {
      const auto two = src_.substr(pos_, 2);
      if (two.size() == 2 &&
          std::find(kTwoCharOps.begin(), kTwoCharOps.end(), two) != kTwoCharOps.end()) {
        advance();
        advance();
      } else {
        if (!lenient_ && !is_punct(c))
          fail(std::string("unexpected character '") + c + "'", t.line, t.column);
        advance();
      }
      t.text = std::string(src_.substr(start, pos_ - start));
      t.cls = TokenClass::Operator;
    }
    return t;
  }

  std::string_view src_;
  bool lenient_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace detail

/// Maximal-munch tokenizer for the Java subset. Comments are dropped.
inline std::vector<Token> tokenize(std::string_view source) {
  return detail::Scanner(source, false).run();
}

/// Splits free-form label text into tokens; never throws.
inline std::vector<Token> split_label(std::string_view label) {
  return detail::Scanner(label, true).run();
}

inline std::vector<std::string> label_tokens(std::string_view label) {
  std::vector<std::string> out;
  for (auto& t : split_label(label)) out.push_back(std::move(t.text));
  return out;
}

/// Class of an already-split token.
inline TokenClass classify_token(std::string_view tok) {
  if (tok.empty()) return TokenClass::Operator;
  if (detail::is_ident_start(tok.front())) {
    if (tok == "true" || tok == "false" || tok == "null") return TokenClass::Literal;
    return detail::is_keyword(tok) ? TokenClass::Keyword : TokenClass::Identifier;
  }
  if (std::isdigit(static_cast<unsigned char>(tok.front())) || tok.front() == '"' ||
      tok.front() == '\'')
    return TokenClass::Literal;
  return TokenClass::Operator;
}

inline bool is_identifier(std::string_view tok) {
  return classify_token(tok) == TokenClass::Identifier;
}
inline bool is_literal(std::string_view tok) {
  return classify_token(tok) == TokenClass::Literal;
}

}  // namespace mple
