#include "lexer.hpp"

#include <array>
#include <cctype>

namespace cpn::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  std::size_t line_start = 0;

  auto fail = [&](std::size_t at, const std::string& msg) -> void {
    throw Error(ErrorCode::SyntaxError, "line " + std::to_string(line) + ", column " +
                                            std::to_string(at - line_start + 1) + ": " + msg);
  };

  while (true) {
    while (i < src.size()) {
      const char c = src[i];
      if (c == '\n') {
        ++i;
        ++line;
        line_start = i;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
        while (i < src.size() && src[i] != '\n') ++i;
      } else {
        break;
      }
    }
    Token tok{Tok::End, {}, i, line, static_cast<int>(i - line_start + 1)};
    if (i >= src.size()) {
      out.push_back(tok);
      return out;
    }
    const char c = src[i];
    if (ident_start(c)) {
      const auto start = i;
      while (i < src.size() && ident_char(src[i])) ++i;
      tok.kind = Tok::Ident;
      tok.text = std::string(src.substr(start, i - start));
    } else if (digit(c)) {
      const auto start = i;
      while (i < src.size() && digit(src[i])) ++i;
      tok.kind = Tok::Int;
      if (i < src.size() && src[i] == '.') {
        if (i + 1 >= src.size() || !digit(src[i + 1])) fail(i, "digit expected after decimal point");
        ++i;
        while (i < src.size() && digit(src[i])) ++i;
        tok.kind = Tok::Real;
        if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
          std::size_t j = i + 1;
          if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
          if (j >= src.size() || !digit(src[j])) fail(i, "malformed exponent");
          while (j < src.size() && digit(src[j])) ++j;
          i = j;
        }
      }
      if (i < src.size() && ident_start(src[i])) fail(i, "identifier cannot start with a digit");
      tok.text = std::string(src.substr(start, i - start));
    } else if (c == '"') {
      ++i;
      std::string text;
      while (true) {
        if (i >= src.size() || src[i] == '\n') fail(tok.offset, "unterminated string literal");
        const char d = src[i++];
        if (d == '"') break;
        if (d == '\\') {
          if (i >= src.size()) fail(i, "unterminated escape");
          const char e = src[i++];
          switch (e) {
            case 'n': text += '\n'; break;
            case 't': text += '\t'; break;
            case 'r': text += '\r'; break;
            case '"': text += '"'; break;
            case '\\': text += '\\'; break;
            default: fail(i - 1, std::string("unknown escape \\") + e);
          }
        } else {
          text += d;
        }
      }
      tok.kind = Tok::String;
      tok.text = std::move(text);
    } else {
      auto two = [&](char a, char b) { return c == a && i + 1 < src.size() && src[i + 1] == b; };
      std::size_t len = 1;
      if (two('=', '=')) tok.kind = Tok::Eq, len = 2;
      else if (two('!', '=')) tok.kind = Tok::Ne, len = 2;
      else if (two('<', '=')) tok.kind = Tok::Le, len = 2;
      else if (two('>', '=')) tok.kind = Tok::Ge, len = 2;
      else if (two('@', '+')) tok.kind = Tok::DelayMark, len = 2;
      else {
        switch (c) {
          case '(': tok.kind = Tok::LParen; break;
          case ')': tok.kind = Tok::RParen; break;
          case ',': tok.kind = Tok::Comma; break;
          case ';': tok.kind = Tok::Semicolon; break;
          case '=': tok.kind = Tok::Assign; break;
          case '<': tok.kind = Tok::Lt; break;
          case '>': tok.kind = Tok::Gt; break;
          case '+': tok.kind = Tok::Plus; break;
          case '-': tok.kind = Tok::Minus; break;
          case '*': tok.kind = Tok::Star; break;
          case '/': tok.kind = Tok::Slash; break;
          case '|': tok.kind = Tok::Bar; break;
          default: fail(i, std::string("unexpected character '") + c + "'");
        }
      }
      tok.text = std::string(src.substr(i, len));
      i += len;
    }
    out.push_back(std::move(tok));
  }
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "'" + t.text + "'";
    case Tok::String: return "string literal";
    case Tok::Int:
    case Tok::Real: return "number " + t.text;
    default: return "'" + t.text + "'";
  }
}

const Token& TokenStream::expect(Tok k, std::string_view what) {
  if (!at(k)) fail(what);
  return next();
}

void TokenStream::expect_word(std::string_view w) {
  if (!accept_word(w)) fail("'" + std::string(w) + "'");
}

std::string TokenStream::expect_ident(std::string_view what) {
  if (!at(Tok::Ident)) fail(what);
  return next().text;
}

void TokenStream::fail(std::string_view expected) const {
  fail_at(peek(), "expected " + std::string(expected) + ", found " + describe(peek()));
}

void TokenStream::fail_at(const Token& t, std::string_view message) const {
  throw Error(ErrorCode::SyntaxError, "line " + std::to_string(t.line) + ", column " +
                                          std::to_string(t.column) + ": " + std::string(message));
}

bool is_expression_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 7> words{"and", "or", "not", "mod", "true", "false", "fun"};
  for (auto w : words)
    if (w == word) return true;
  return false;
}

}  // namespace cpn::detail
