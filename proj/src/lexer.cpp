#include "minimaple/lexer.hpp"

#include <array>
#include <cctype>
#include <tuple>

namespace minimaple {

SourceSpan SourceSpan::cover(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan out = a;
  if (std::tie(b.line, b.column) < std::tie(out.line, out.column)) {
    out.line = b.line;
    out.column = b.column;
  }
  if (std::tie(b.end_line, b.end_column) > std::tie(out.end_line, out.end_column)) {
    out.end_line = b.end_line;
    out.end_column = b.end_column;
  }
  return out;
}

bool SourceSpan::contains(const SourceSpan& inner) const {
  return std::tie(line, column) <= std::tie(inner.line, inner.column) &&
         std::tie(inner.end_line, inner.end_column) <= std::tie(end_line, end_column);
}

const char* to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

const char* to_string(TokenKind k) {
  switch (k) {
    case TokenKind::Name: return "NAME";
    case TokenKind::Keyword: return "KEYWORD";
    case TokenKind::Int: return "INT";
    case TokenKind::Float: return "FLOAT";
    case TokenKind::String: return "STRING";
    case TokenKind::Assign: return "ASSIGN";
    case TokenKind::DoubleColon: return "DOUBLECOLON";
    case TokenKind::Colon: return "COLON";
    case TokenKind::Semi: return "SEMI";
    case TokenKind::Comma: return "COMMA";
    case TokenKind::LParen: return "LPAREN";
    case TokenKind::RParen: return "RPAREN";
    case TokenKind::LBracket: return "LBRACKET";
    case TokenKind::RBracket: return "RBRACKET";
    case TokenKind::Plus: return "PLUS";
    case TokenKind::Minus: return "MINUS";
    case TokenKind::Star: return "STAR";
    case TokenKind::Slash: return "SLASH";
    case TokenKind::Eq: return "EQ";
    case TokenKind::NotEq: return "NOTEQ";
    case TokenKind::Less: return "LESS";
    case TokenKind::LessEq: return "LESSEQ";
    case TokenKind::Greater: return "GREATER";
    case TokenKind::GreaterEq: return "GREATEREQ";
    case TokenKind::DotDot: return "DOTDOT";
    case TokenKind::AnnotOpen: return "ANNOT_OPEN";
    case TokenKind::AnnotClose: return "ANNOT_CLOSE";
    case TokenKind::Eof: return "EOF";
  }
  return "?";
}

bool is_reserved_word(std::string_view word) {
  static constexpr std::array<std::string_view, 22> kWords = {
      "and", "or",   "not",  "implies", "proc", "end",   "if",    "then",
      "elif", "else", "fi",  "for",     "from", "by",    "to",    "do",
      "od",  "while", "return", "local", "global", "in"};
  for (auto w : kWords) {
    if (w == word) return true;
  }
  return false;
}

namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  LexResult run() {
    while (true) {
      skip_trivia();
      if (at_end()) break;
      if (starts_with("(*@")) {
        lex_annotation();
        continue;
      }
      lex_one();
    }
    return std::move(out_);
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  bool starts_with(std::string_view s) const { return src_.substr(pos_).starts_with(s); }

  void advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++col_;
    }
  }
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && !at_end(); ++i) advance();
  }

  void skip_trivia() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (starts_with("(*") && !starts_with("(*@")) {
        SourceSpan start = here();
        advance(2);
        while (!at_end() && !starts_with("*)")) advance();
        if (at_end()) {
          error("LEX-ERROR", "unterminated comment", start);
          return;
        }
        advance(2);
      } else {
        return;
      }
    }
  }

  SourceSpan here() const { return {line_, col_, line_, col_}; }

  void error(const char* code, std::string msg, SourceSpan span) {
    out_.diagnostics.push_back(make_error(code, std::move(msg), span));
  }

  void emit(TokenKind kind, std::size_t start, int line, int col) {
    Token t;
    t.kind = kind;
    t.lexeme = std::string(src_.substr(start, pos_ - start));
    t.span = {line, col, line_, col_};
    t.offset = start;
    out_.tokens.push_back(std::move(t));
  }

  void lex_annotation() {
    std::size_t start = pos_;
    int line = line_, col = col_;
    advance(3);
    emit(TokenKind::AnnotOpen, start, line, col);
    SourceSpan open_span = out_.tokens.back().span;
    in_annotation_ = true;
    while (true) {
      skip_trivia();
      if (at_end()) {
        error("LEX-ERROR", "unterminated annotation", open_span);
        break;
      }
      if (starts_with("@*)")) {
        std::size_t s = pos_;
        int l = line_, c = col_;
        advance(3);
        emit(TokenKind::AnnotClose, s, l, c);
        break;
      }
      if (starts_with("(*@")) {
        error("LEX-ERROR", "nested annotation", here());
        advance(3);
        continue;
      }
      lex_one();
    }
    in_annotation_ = false;
  }

  void lex_one() {
    std::size_t start = pos_;
    int line = line_, col = col_;
    char c = peek();

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      auto word = src_.substr(start, pos_ - start);
      emit(is_reserved_word(word) ? TokenKind::Keyword : TokenKind::Name, start, line, col);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        emit(TokenKind::Float, start, line, col);
      } else {
        emit(TokenKind::Int, start, line, col);
      }
      return;
    }
    if (c == '"') {
      advance();
      while (!at_end() && peek() != '"' && peek() != '\n') advance();
      if (peek() != '"') {
        error("LEX-ERROR", "unterminated string", {line, col, line_, col_});
        return;
      }
      advance();
      emit(TokenKind::String, start, line, col);
      return;
    }

    auto two = [&](std::string_view s, TokenKind k) {
      if (starts_with(s)) {
        advance(s.size());
        emit(k, start, line, col);
        return true;
      }
      return false;
    };
    if (two(":=", TokenKind::Assign) || two("::", TokenKind::DoubleColon) ||
        two("<>", TokenKind::NotEq) || two("<=", TokenKind::LessEq) ||
        two(">=", TokenKind::GreaterEq) || two("..", TokenKind::DotDot)) {
      return;
    }

    TokenKind kind;
    switch (c) {
      case ':': kind = TokenKind::Colon; break;
      case ';': kind = TokenKind::Semi; break;
      case ',': kind = TokenKind::Comma; break;
      case '(': kind = TokenKind::LParen; break;
      case ')': kind = TokenKind::RParen; break;
      case '[': kind = TokenKind::LBracket; break;
      case ']': kind = TokenKind::RBracket; break;
      case '+': kind = TokenKind::Plus; break;
      case '-': kind = TokenKind::Minus; break;
      case '*': kind = TokenKind::Star; break;
      case '/': kind = TokenKind::Slash; break;
      case '=': kind = TokenKind::Eq; break;
      case '<': kind = TokenKind::Less; break;
      case '>': kind = TokenKind::Greater; break;
      default: {
        advance();
        std::string shown(src_.substr(start, pos_ - start));
        // Swallow the rest of a multi-byte sequence so it is reported once.
        while (!at_end() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) {
          shown += peek();
          advance();
        }
        error("LEX-ERROR", "illegal character '" + shown + "'", {line, col, line_, col_});
        return;
      }
    }
    advance();
    emit(kind, start, line, col);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  bool in_annotation_ = false;
  LexResult out_;
};

}  // namespace

LexResult tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace minimaple
