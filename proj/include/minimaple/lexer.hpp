#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "minimaple/source.hpp"

namespace minimaple {

enum class TokenKind {
  Name,
  Keyword,
  Int,
  Float,
  String,
  Assign,       // :=
  DoubleColon,  // ::
  Colon,
  Semi,
  Comma,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Plus,
  Minus,
  Star,
  Slash,
  Eq,
  NotEq,  // <>
  Less,
  LessEq,
  Greater,
  GreaterEq,
  DotDot,
  AnnotOpen,   // (*@
  AnnotClose,  // @*)
  Eof,
};

const char* to_string(TokenKind k);

struct Token {
  TokenKind kind = TokenKind::Eof;
  std::string lexeme;
  SourceSpan span;
  std::size_t offset = 0;  // byte offset of the lexeme in the source

  bool is(TokenKind k) const { return kind == k; }
  bool is_keyword(std::string_view word) const {
    return kind == TokenKind::Keyword && lexeme == word;
  }
  bool is_name(std::string_view word) const { return kind == TokenKind::Name && lexeme == word; }
};

struct LexResult {
  std::vector<Token> tokens;  // no trailing Eof token
  Diagnostics diagnostics;
};

/// Reserved words of program and formula syntax.
bool is_reserved_word(std::string_view word);

/// Splits MiniMaple source into tokens. `# ...` and `(* ... *)` comments are
/// skipped; an annotation comment `(*@ ... @*)` becomes an AnnotOpen token,
/// the tokens of its body, and an AnnotClose token. Lexing continues past
/// illegal characters so that all of them are reported.
LexResult tokenize(std::string_view source);

}  // namespace minimaple
