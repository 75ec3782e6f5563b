#pragma once

// Tokenizer shared by the color-set, expression and function-definition parsers.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cpnkit/error.hpp"

namespace cpn::detail {

enum class Tok {
  Ident,
  Int,
  Real,
  String,
  LParen,
  RParen,
  Comma,
  Semicolon,
  Assign,     // =
  Eq,         // ==
  Ne,         // !=
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
  Slash,
  Bar,        // |
  DelayMark,  // @+
  End,
};

struct Token {
  Tok kind;
  std::string text;  // identifier spelling, literal digits, or decoded string contents
  std::size_t offset;
  int line;
  int column;
};

/// Splits `src` into tokens, always ending with Tok::End.
/// Throws Error(SyntaxError) on malformed input.
std::vector<Token> tokenize(std::string_view src);

std::string describe(const Token& t);

/// Cursor over a token vector with position-annotated error reporting.
class TokenStream {
 public:
  explicit TokenStream(std::string_view src) : tokens_(tokenize(src)) {}

  const Token& peek(std::size_t ahead = 0) const {
    const auto i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  bool accept_word(std::string_view w) {
    if (!at_word(w)) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, std::string_view what);
  void expect_word(std::string_view w);
  std::string expect_ident(std::string_view what);

  [[noreturn]] void fail(std::string_view expected) const;
  [[noreturn]] void fail_at(const Token& t, std::string_view message) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool is_expression_keyword(std::string_view word);

}  // namespace cpn::detail
