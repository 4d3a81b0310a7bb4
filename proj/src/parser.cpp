#include "minimaple/parser.hpp"

#include <set>
#include <string>
#include <utility>
#include <variant>

#include "minimaple/lexer.hpp"

namespace minimaple {

namespace {

struct ParseError {
  Diagnostic diag;
};

struct AssertClause {
  ExprPtr formula;
};

using Annotation = std::variant<AnnotationBlock, LoopAnnotation, AssertClause, std::vector<AdtDecl>>;

bool is_base_type_name(std::string_view n) {
  return n == "integer" || n == "float" || n == "boolean" || n == "string" || n == "symbol" ||
         n == "anything";
}

Type base_type(std::string_view n) {
  if (n == "integer") return Type::integer();
  if (n == "float") return Type::float_();
  if (n == "boolean") return Type::boolean();
  if (n == "string") return Type::string();
  if (n == "symbol") return Type::symbol();
  return Type::anything();
}

SourceSpan end_of(std::string_view src) {
  int line = 1, col = 1;
  for (char c : src) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++col;
    }
  }
  return {line, col, line, col};
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, SourceSpan eof_span) : toks_(std::move(tokens)) {
    Token eof;
    eof.kind = TokenKind::Eof;
    eof.span = eof_span;
    toks_.push_back(eof);
  }

  Program program() {
    Program p;
    p.statements = block([](const Token&) { return false; });
    if (p.statements.empty() && diags_.empty()) {
      diags_.push_back(make_error("SYNTAX-ERROR", "empty program", peek().span));
    }
    if (!peek().is(TokenKind::Eof)) {
      diags_.push_back(make_error("SYNTAX-ERROR", "unexpected " + describe(peek()), peek().span));
    }
    return p;
  }

  Type type_only() {
    Type t = type();
    if (!peek().is(TokenKind::Eof)) fail("unexpected " + describe(peek()) + " after type");
    return t;
  }

  std::vector<ExprPtr> expr_list() {
    std::vector<ExprPtr> out;
    if (peek().is(TokenKind::Eof)) return out;
    out.push_back(expr());
    while (accept(TokenKind::Comma)) out.push_back(expr());
    if (!peek().is(TokenKind::Eof)) fail("unexpected " + describe(peek()));
    return out;
  }

  Diagnostics& diagnostics() { return diags_; }

  [[noreturn]] void fail(std::string msg, SourceSpan span) {
    throw ParseError{make_error("SYNTAX-ERROR", std::move(msg), span)};
  }
  [[noreturn]] void fail(std::string msg) { fail(std::move(msg), peek().span); }

 private:
  // ---- token helpers -------------------------------------------------------
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    prev_ = t.span;
    return t;
  }
  bool accept(TokenKind k) {
    if (!peek().is(k)) return false;
    advance();
    return true;
  }
  bool accept_kw(std::string_view w) {
    if (!peek().is_keyword(w)) return false;
    advance();
    return true;
  }
  const Token& expect(TokenKind k, std::string_view what) {
    if (!peek().is(k)) fail("expected " + std::string(what) + " but found " + describe(peek()));
    return advance();
  }
  const Token& expect_kw(std::string_view w) {
    if (!peek().is_keyword(w)) {
      fail("expected '" + std::string(w) + "' but found " + describe(peek()));
    }
    return advance();
  }
  static std::string describe(const Token& t) {
    if (t.is(TokenKind::Eof)) return "end of input";
    if (t.is(TokenKind::AnnotOpen)) return "annotation";
    return "'" + t.lexeme + "'";
  }
  SourceSpan from(const SourceSpan& start) const {
    return {start.line, start.column, prev_.end_line, prev_.end_column};
  }
  ExprPtr node(SourceSpan start, Expr::Node n) {
    auto e = std::make_unique<Expr>();
    e->span = from(start);
    e->node = std::move(n);
    return e;
  }

  // ---- statements ----------------------------------------------------------
  template <class Pred>
  Block block(Pred is_terminator) {
    Block out;
    while (!peek().is(TokenKind::Eof) && !is_terminator(peek())) {
      std::size_t start = pos_;
      try {
        StmtPtr s = statement();
        bool comment_like = s->is<Assert>() || s->is<SpecDecl>();
        if (accept(TokenKind::Semi)) {
          s->terminator = ";";
        } else if (accept(TokenKind::Colon)) {
          s->terminator = ":";
        } else if (!comment_like && !peek().is(TokenKind::Eof) && !is_terminator(peek())) {
          fail("expected ';' but found " + describe(peek()));
        }
        out.push_back(std::move(s));
      } catch (ParseError& e) {
        diags_.push_back(std::move(e.diag));
        synchronize(start);
      }
    }
    return out;
  }

  void synchronize(std::size_t start) {
    if (pos_ == start && !peek().is(TokenKind::Semi) && !peek().is(TokenKind::Eof)) advance();
    while (!peek().is(TokenKind::Eof)) {
      if (accept(TokenKind::Semi)) return;
      advance();
    }
  }

  static bool ends_if(const Token& t) {
    return t.is_keyword("end") || t.is_keyword("elif") || t.is_keyword("else") ||
           t.is_keyword("fi");
  }
  static bool ends_loop(const Token& t) { return t.is_keyword("end") || t.is_keyword("od"); }
  static bool ends_proc(const Token& t) { return t.is_keyword("end"); }

  StmtPtr make_stmt(SourceSpan start, Stmt::Node n) {
    auto s = std::make_unique<Stmt>();
    s->span = from(start);
    s->node = std::move(n);
    return s;
  }

  void note_statement(bool is_decl, const SourceSpan& span) {
    if (body_decls_ok_.empty()) {
      if (is_decl) {
        diags_.push_back(make_error("SYNTAX-ERROR",
                                    "declarations are only allowed inside procedure bodies", span));
      }
      return;
    }
    if (is_decl && !body_decls_ok_.back()) {
      diags_.push_back(make_error(
          "SYNTAX-ERROR", "declarations must precede the other statements of a procedure", span));
    }
    if (!is_decl) body_decls_ok_.back() = false;
  }

  StmtPtr statement() {
    const Token& t = peek();
    SourceSpan start = t.span;
    if (t.is(TokenKind::AnnotOpen)) return annotated_statement();
    if (t.is_keyword("local")) {
      note_statement(true, start);
      return local_decl();
    }
    if (t.is_keyword("global")) {
      note_statement(true, start);
      return global_decl();
    }
    note_statement(false, start);
    if (t.is_keyword("if")) return if_stmt();
    if (t.is_keyword("for")) return for_stmt(start, std::nullopt);
    if (t.is_keyword("while")) return while_stmt(start, std::nullopt);
    if (t.is_keyword("return")) {
      advance();
      ExprPtr value = expr();
      return make_stmt(start, Return{std::move(value)});
    }
    ExprPtr e = expr();
    if (accept(TokenKind::Assign)) {
      check_target(*e);
      ExprPtr value = expr();
      return make_stmt(start, Assign{std::move(e), std::move(value)});
    }
    return make_stmt(start, ExprStmt{std::move(e)});
  }

  void check_target(const Expr& e) {
    const Expr* cur = &e;
    while (const auto* ix = cur->as<Index>()) cur = ix->base.get();
    if (!cur->is<NameRef>() || e.parens > 0) fail("invalid assignment target", e.span);
  }

  StmtPtr annotated_statement() {
    SourceSpan start = peek().span;
    Annotation a = annotation();
    if (auto* loop = std::get_if<LoopAnnotation>(&a)) {
      note_statement(false, start);
      if (peek().is_keyword("for")) return for_stmt(start, std::move(*loop));
      if (peek().is_keyword("while")) return while_stmt(start, std::move(*loop));
      fail("a loop annotation must be followed by 'for' or 'while'");
    }
    if (auto* as = std::get_if<AssertClause>(&a)) {
      note_statement(false, start);
      return make_stmt(start, Assert{std::move(as->formula)});
    }
    if (auto* decls = std::get_if<std::vector<AdtDecl>>(&a)) {
      return make_stmt(start, SpecDecl{std::move(*decls)});
    }
    auto& block = std::get<AnnotationBlock>(a);
    if (!peek().is_keyword("proc")) {
      fail("a procedure annotation must immediately precede 'proc'", from(start));
    }
    note_statement(false, start);
    ExprPtr e = proc_expr(start, std::move(block));
    return make_stmt(start, ExprStmt{std::move(e)});
  }

  StmtPtr local_decl() {
    SourceSpan start = advance().span;
    LocalDecl d;
    do {
      const Token& n = expect(TokenKind::Name, "a variable name");
      LocalEntry e;
      e.name = n.lexeme;
      SourceSpan es = n.span;
      if (accept(TokenKind::DoubleColon)) e.type = type();
      if (accept(TokenKind::Assign)) e.init = expr();
      e.span = from(es);
      d.entries.push_back(std::move(e));
    } while (accept(TokenKind::Comma));
    return make_stmt(start, std::move(d));
  }

  StmtPtr global_decl() {
    SourceSpan start = advance().span;
    GlobalDecl d;
    do {
      const Token& n = expect(TokenKind::Name, "a variable name");
      d.names.push_back(n.lexeme);
      d.spans.push_back(n.span);
    } while (accept(TokenKind::Comma));
    return make_stmt(start, std::move(d));
  }

  StmtPtr if_stmt() {
    SourceSpan start = advance().span;
    If s;
    do {
      IfBranch br;
      br.condition = expr();
      br.then_span = expect_kw("then").span;
      br.body = block(ends_if);
      s.branches.push_back(std::move(br));
    } while (accept_kw("elif"));
    if (peek().is_keyword("else")) {
      s.else_span = advance().span;
      s.else_body = block(ends_if);
    }
    if (accept_kw("fi")) {
      s.short_close = true;
    } else {
      expect_kw("end");
      expect_kw("if");
    }
    return make_stmt(start, std::move(s));
  }

  void close_loop(bool& short_close) {
    if (accept_kw("od")) {
      short_close = true;
    } else {
      expect_kw("end");
      expect_kw("do");
    }
  }

  StmtPtr for_stmt(SourceSpan start, std::optional<LoopAnnotation> ann) {
    expect_kw("for");
    For s;
    const Token& v = expect(TokenKind::Name, "a loop variable");
    s.var = v.lexeme;
    s.var_span = v.span;
    if (accept_kw("from")) s.from = expr();
    if (accept_kw("by")) s.by = expr();
    expect_kw("to");
    s.to = expr();
    s.do_span = expect_kw("do").span;
    s.annotation = std::move(ann);
    s.body = block(ends_loop);
    close_loop(s.short_close);
    return make_stmt(start, std::move(s));
  }

  StmtPtr while_stmt(SourceSpan start, std::optional<LoopAnnotation> ann) {
    expect_kw("while");
    While s;
    s.condition = expr();
    s.do_span = expect_kw("do").span;
    s.annotation = std::move(ann);
    s.body = block(ends_loop);
    close_loop(s.short_close);
    return make_stmt(start, std::move(s));
  }

  // ---- annotations ---------------------------------------------------------
  struct FormulaMode {
    explicit FormulaMode(bool& flag) : flag_(flag), saved_(flag) { flag_ = true; }
    ~FormulaMode() { flag_ = saved_; }
    bool& flag_;
    bool saved_;
  };

  Annotation annotation() {
    SourceSpan start = expect(TokenKind::AnnotOpen, "annotation").span;
    FormulaMode mode(formula_mode_);
    enum class Category { None, Proc, Loop, Assert, Decl } cat = Category::None;
    AnnotationBlock proc;
    LoopAnnotation loop;
    AssertClause assertion;
    std::vector<AdtDecl> decls;

    auto set_category = [&](Category c, const Token& at) {
      if (cat != Category::None && cat != c) {
        fail("clause '" + at.lexeme + "' cannot be combined with the preceding clauses", at.span);
      }
      cat = c;
    };
    auto once = [&](const std::vector<std::string>& order, const Token& at) {
      for (const auto& o : order) {
        if (o == at.lexeme) fail("duplicate '" + at.lexeme + "' clause", at.span);
      }
    };

    while (!peek().is(TokenKind::AnnotClose)) {
      if (peek().is(TokenKind::Eof)) fail("unterminated annotation");
      const Token& kw = peek();
      SourceSpan cs = kw.span;
      if (kw.is_name("requires") || kw.is_name("ensures") || kw.is_keyword("global")) {
        set_category(Category::Proc, kw);
        once(proc.clause_order, kw);
        std::string word = advance().lexeme;
        proc.clause_order.push_back(word);
        if (word == "requires") {
          proc.precondition = expr();
        } else if (word == "ensures") {
          proc.postcondition = expr();
        } else {
          proc.has_globals = true;
          if (peek().is(TokenKind::Name)) {
            do {
              const Token& n = expect(TokenKind::Name, "a variable name");
              proc.globals.push_back(n.lexeme);
              proc.global_spans.push_back(n.span);
            } while (accept(TokenKind::Comma));
          }
        }
      } else if (kw.is_name("invariant") || kw.is_name("decreases")) {
        set_category(Category::Loop, kw);
        once(loop.clause_order, kw);
        std::string word = advance().lexeme;
        loop.clause_order.push_back(word);
        (word == "invariant" ? loop.invariant : loop.decreases) = expr();
      } else if (kw.is_name("assert")) {
        if (cat == Category::Assert) fail("only one 'assert' clause per annotation", cs);
        set_category(Category::Assert, kw);
        advance();
        assertion.formula = expr();
      } else if (kw.is_name("type") || kw.is_name("func") || kw.is_name("pred")) {
        set_category(Category::Decl, kw);
        decls.push_back(adt_decl());
      } else {
        fail("unknown annotation clause " + describe(kw), cs);
      }
      expect(TokenKind::Semi, "';' after annotation clause");
    }
    advance();  // @*)
    SourceSpan span = from(start);
    switch (cat) {
      case Category::Proc:
        proc.span = span;
        return proc;
      case Category::Loop:
        loop.span = span;
        return loop;
      case Category::Assert:
        return assertion;
      case Category::Decl:
        return decls;
      case Category::None:
        break;
    }
    fail("empty annotation", span);
  }

  AdtDecl adt_decl() {
    SourceSpan start = peek().span;
    std::string word = advance().lexeme;
    AdtDecl d;
    const Token& n = expect(TokenKind::Name, "a declared name");
    d.name = n.lexeme;
    if (word == "type") {
      d.kind = AdtDecl::Kind::Type;
      if (is_base_type_name(d.name) || d.name == "list" || d.name == "Or") {
        fail("cannot redeclare built-in type '" + d.name + "'", n.span);
      }
      abstract_types_.insert(d.name);
      d.result = Type::abstract(d.name);
    } else {
      d.kind = word == "func" ? AdtDecl::Kind::Func : AdtDecl::Kind::Pred;
      expect(TokenKind::LParen, "'('");
      if (!peek().is(TokenKind::RParen)) {
        do {
          d.params.push_back(type());
        } while (accept(TokenKind::Comma));
      }
      expect(TokenKind::RParen, "')'");
      if (d.kind == AdtDecl::Kind::Func) {
        expect(TokenKind::DoubleColon, "'::' and a result type");
        d.result = type();
      } else {
        d.result = Type::boolean();
      }
    }
    d.span = from(start);
    return d;
  }

  // ---- types ---------------------------------------------------------------
  Type type() {
    const Token& t = peek();
    SourceSpan start = t.span;
    if (accept(TokenKind::LBracket)) {
      std::vector<Type> elems;
      do {
        elems.push_back(type());
      } while (accept(TokenKind::Comma));
      expect(TokenKind::RBracket, "']'");
      return Type::tuple(std::move(elems));
    }
    if (t.is_keyword("proc")) {
      advance();
      expect(TokenKind::LParen, "'('");
      std::vector<Type> params;
      if (!peek().is(TokenKind::RParen)) {
        do {
          params.push_back(type());
        } while (accept(TokenKind::Comma));
      }
      expect(TokenKind::RParen, "')'");
      expect(TokenKind::DoubleColon, "'::'");
      Type ret = type();
      return Type::proc(std::move(params), std::move(ret));
    }
    if (!t.is(TokenKind::Name)) fail("expected a type but found " + describe(t));
    std::string name = advance().lexeme;
    if (is_base_type_name(name)) return base_type(name);
    if (abstract_types_.count(name)) return Type::abstract(name);
    if (name == "list") {
      expect(TokenKind::LParen, "'(' after 'list'");
      Type elem = type();
      expect(TokenKind::RParen, "')'");
      return Type::list(std::move(elem));
    }
    if (name == "Or") {
      expect(TokenKind::LParen, "'(' after 'Or'");
      std::vector<Type> members;
      do {
        members.push_back(type());
      } while (accept(TokenKind::Comma));
      expect(TokenKind::RParen, "')'");
      if (members.size() < 2) fail("Or(...) needs at least two member types", from(start));
      return Type::union_of(std::move(members));
    }
    fail("unknown type name '" + name + "'", from(start));
  }

  // ---- expressions ---------------------------------------------------------
  ExprPtr expr() { return implies_expr(); }

  ExprPtr binary(SourceSpan start, BinaryOp op, ExprPtr l, ExprPtr r) {
    return node(start, Binary{op, std::move(l), std::move(r)});
  }

  ExprPtr implies_expr() {
    SourceSpan start = peek().span;
    ExprPtr lhs = or_expr();
    if (peek().is_keyword("implies")) {
      if (!formula_mode_) fail("'implies' is only allowed in specification formulas");
      advance();
      ExprPtr rhs = implies_expr();
      return binary(start, BinaryOp::Implies, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr or_expr() {
    SourceSpan start = peek().span;
    ExprPtr lhs = and_expr();
    while (accept_kw("or")) lhs = binary(start, BinaryOp::Or, std::move(lhs), and_expr());
    return lhs;
  }

  ExprPtr and_expr() {
    SourceSpan start = peek().span;
    ExprPtr lhs = not_expr();
    while (accept_kw("and")) lhs = binary(start, BinaryOp::And, std::move(lhs), not_expr());
    return lhs;
  }

  ExprPtr not_expr() {
    SourceSpan start = peek().span;
    if (accept_kw("not")) {
      ExprPtr operand = not_expr();
      return node(start, Unary{UnaryOp::Not, std::move(operand)});
    }
    return relational();
  }

  ExprPtr relational() {
    SourceSpan start = peek().span;
    ExprPtr lhs = additive();
    BinaryOp op;
    switch (peek().kind) {
      case TokenKind::Eq: op = BinaryOp::Eq; break;
      case TokenKind::NotEq: op = BinaryOp::NotEq; break;
      case TokenKind::Less: op = BinaryOp::Less; break;
      case TokenKind::LessEq: op = BinaryOp::LessEq; break;
      case TokenKind::Greater: op = BinaryOp::Greater; break;
      case TokenKind::GreaterEq: op = BinaryOp::GreaterEq; break;
      default: return lhs;
    }
    advance();
    ExprPtr rhs = additive();
    return binary(start, op, std::move(lhs), std::move(rhs));
  }

  ExprPtr additive() {
    SourceSpan start = peek().span;
    ExprPtr lhs = multiplicative();
    while (true) {
      BinaryOp op;
      if (peek().is(TokenKind::Plus)) {
        op = BinaryOp::Add;
      } else if (peek().is(TokenKind::Minus)) {
        op = BinaryOp::Sub;
      } else {
        return lhs;
      }
      advance();
      lhs = binary(start, op, std::move(lhs), multiplicative());
    }
  }

  ExprPtr multiplicative() {
    SourceSpan start = peek().span;
    ExprPtr lhs = unary();
    while (true) {
      BinaryOp op;
      if (peek().is(TokenKind::Star)) {
        op = BinaryOp::Mul;
      } else if (peek().is(TokenKind::Slash)) {
        op = BinaryOp::Div;
      } else {
        return lhs;
      }
      advance();
      lhs = binary(start, op, std::move(lhs), unary());
    }
  }

  ExprPtr unary() {
    SourceSpan start = peek().span;
    if (accept(TokenKind::Minus)) {
      ExprPtr operand = unary();
      return node(start, Unary{UnaryOp::Neg, std::move(operand)});
    }
    return postfix();
  }

  ExprPtr postfix() {
    SourceSpan start = peek().span;
    ExprPtr e = primary();
    while (accept(TokenKind::LBracket)) {
      ExprPtr idx = expr();
      expect(TokenKind::RBracket, "']'");
      e = node(start, Index{std::move(e), std::move(idx)});
    }
    return e;
  }

  std::vector<ExprPtr> call_args() {
    std::vector<ExprPtr> args;
    expect(TokenKind::LParen, "'('");
    if (!peek().is(TokenKind::RParen)) {
      do {
        args.push_back(expr());
      } while (accept(TokenKind::Comma));
    }
    expect(TokenKind::RParen, "')'");
    return args;
  }

  ExprPtr primary() {
    const Token& t = peek();
    SourceSpan start = t.span;
    switch (t.kind) {
      case TokenKind::Int: {
        std::string digits = advance().lexeme;
        return node(start, IntLit{std::move(digits)});
      }
      case TokenKind::Float: {
        std::string text = advance().lexeme;
        double v = std::stod(text);
        return node(start, FloatLit{std::move(text), v});
      }
      case TokenKind::String: {
        std::string lex = advance().lexeme;
        return node(start, StringLit{lex.substr(1, lex.size() - 2)});
      }
      case TokenKind::LParen: {
        advance();
        ExprPtr e = expr();
        expect(TokenKind::RParen, "')'");
        ++e->parens;
        return e;
      }
      case TokenKind::LBracket: {
        advance();
        ListLit lit;
        if (!peek().is(TokenKind::RBracket)) {
          do {
            lit.elements.push_back(expr());
          } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RBracket, "']'");
        return node(start, std::move(lit));
      }
      case TokenKind::AnnotOpen: {
        Annotation a = annotation();
        auto* block = std::get_if<AnnotationBlock>(&a);
        if (!block) fail("only a procedure annotation may appear inside an expression", from(start));
        if (!peek().is_keyword("proc")) fail("a procedure annotation must be followed by 'proc'");
        return proc_expr(start, std::move(*block));
      }
      case TokenKind::Keyword:
        if (t.is_keyword("proc")) return proc_expr(start, std::nullopt);
        break;
      case TokenKind::Name:
        return name_expr();
      default:
        break;
    }
    fail("expected an expression but found " + describe(t));
  }

  ExprPtr name_expr() {
    const Token& t = advance();
    SourceSpan start = t.span;
    std::string name = t.lexeme;
    bool call = peek().is(TokenKind::LParen);
    if (!call) {
      if (name == "true" || name == "false") return node(start, BoolLit{name == "true"});
      return node(start, NameRef{std::move(name)});
    }
    if (name == "type") {
      advance();
      ExprPtr subject = expr();
      if (!accept(TokenKind::Comma)) fail("type(E, T) expects exactly two arguments", from(start));
      SourceSpan ts = peek().span;
      Type tested = type();
      SourceSpan type_span = from(ts);
      if (!peek().is(TokenKind::RParen)) fail("type(E, T) expects exactly two arguments");
      advance();
      return node(start, TypeTest{std::move(subject), std::move(tested), type_span});
    }
    if (formula_mode_ && (name == "forall" || name == "exists")) return quantified(start, name);
    if (formula_mode_ && (name == "add" || name == "mul" || name == "min" || name == "max" ||
                          name == "seq")) {
      return fold(start, name);
    }
    Call c;
    c.callee = std::move(name);
    c.callee_span = start;
    c.args = call_args();
    return node(start, std::move(c));
  }

  ExprPtr quantified(SourceSpan start, const std::string& name) {
    expect(TokenKind::LParen, "'('");
    Quantified q;
    q.kind = name == "forall" ? QuantKind::Forall : QuantKind::Exists;
    const Token& v = expect(TokenKind::Name, "a quantified variable");
    q.var = v.lexeme;
    q.var_span = v.span;
    expect(TokenKind::DoubleColon, "'::' (quantified variables must be typed)");
    q.var_type = type();
    expect(TokenKind::Comma, "','");
    q.body = expr();
    expect(TokenKind::RParen, "')'");
    return node(start, std::move(q));
  }

  ExprPtr fold(SourceSpan start, const std::string& name) {
    expect(TokenKind::LParen, "'('");
    Fold f;
    if (name == "add") f.kind = FoldKind::Add;
    else if (name == "mul") f.kind = FoldKind::Mul;
    else if (name == "min") f.kind = FoldKind::Min;
    else if (name == "max") f.kind = FoldKind::Max;
    else f.kind = FoldKind::Seq;
    f.term = expr();
    expect(TokenKind::Comma, "',' and a range");
    const Token& v = expect(TokenKind::Name, "a range variable");
    f.range.var = v.lexeme;
    f.range.var_span = v.span;
    if (accept(TokenKind::Eq)) {
      f.range.kind = Range::Kind::Numeric;
      f.range.lo = additive();
      expect(TokenKind::DotDot, "'..'");
      f.range.hi = additive();
    } else if (accept_kw("in")) {
      f.range.kind = Range::Kind::Member;
      f.range.collection = additive();
    } else {
      fail("expected '=' or 'in' in quantifier range");
    }
    if (accept(TokenKind::Comma)) f.filter = expr();
    expect(TokenKind::RParen, "')'");
    return node(start, std::move(f));
  }

  ExprPtr proc_expr(SourceSpan start, std::optional<AnnotationBlock> ann) {
    SourceSpan hs = expect_kw("proc").span;
    ProcExpr p;
    p.annotation = std::move(ann);
    expect(TokenKind::LParen, "'('");
    if (!peek().is(TokenKind::RParen)) {
      do {
        const Token& n = expect(TokenKind::Name, "a parameter name");
        Param prm;
        prm.name = n.lexeme;
        SourceSpan ps = n.span;
        if (accept(TokenKind::DoubleColon)) {
          prm.type = type();
          prm.annotated = true;
        }
        prm.span = from(ps);
        p.params.push_back(std::move(prm));
      } while (accept(TokenKind::Comma));
    }
    expect(TokenKind::RParen, "')'");
    if (accept(TokenKind::DoubleColon)) {
      p.return_type = type();
      p.return_annotated = true;
    }
    p.header_span = from(hs);
    p.header_semicolon = accept(TokenKind::Semi);

    bool saved_mode = formula_mode_;
    formula_mode_ = false;
    body_decls_ok_.push_back(true);
    try {
      p.body = block(ends_proc);
    } catch (...) {
      body_decls_ok_.pop_back();
      formula_mode_ = saved_mode;
      throw;
    }
    body_decls_ok_.pop_back();
    formula_mode_ = saved_mode;

    expect_kw("end");
    p.short_close = !accept_kw("proc");
    return node(start, std::move(p));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SourceSpan prev_;
  Diagnostics diags_;
  bool formula_mode_ = false;
  std::set<std::string> abstract_types_;
  std::vector<bool> body_decls_ok_;
};

}  // namespace

ParseResult parse_program(std::string_view source) {
  ParseResult out;
  LexResult lex = tokenize(source);
  out.diagnostics = std::move(lex.diagnostics);
  Parser parser(std::move(lex.tokens), end_of(source));
  Program program;
  try {
    program = parser.program();
  } catch (ParseError& e) {
    parser.diagnostics().push_back(std::move(e.diag));
  }
  for (auto& d : parser.diagnostics()) out.diagnostics.push_back(std::move(d));
  if (!has_errors(out.diagnostics)) {
    out.program = std::make_shared<const Program>(std::move(program));
  }
  return out;
}

TypeParseResult parse_type(std::string_view text) {
  TypeParseResult out;
  LexResult lex = tokenize(text);
  out.diagnostics = std::move(lex.diagnostics);
  if (has_errors(out.diagnostics)) return out;
  Parser parser(std::move(lex.tokens), end_of(text));
  try {
    out.type = parser.type_only();
  } catch (ParseError& e) {
    out.diagnostics.push_back(std::move(e.diag));
  }
  return out;
}

namespace {

bool is_literal(const Expr& e) {
  if (e.is<IntLit>() || e.is<FloatLit>() || e.is<StringLit>() || e.is<BoolLit>()) return true;
  if (const auto* u = e.as<Unary>()) {
    return u->op == UnaryOp::Neg && (u->operand->is<IntLit>() || u->operand->is<FloatLit>());
  }
  if (const auto* l = e.as<ListLit>()) {
    for (const auto& el : l->elements) {
      if (!is_literal(*el)) return false;
    }
    return true;
  }
  return false;
}

}  // namespace

ExprListParseResult parse_literal_list(std::string_view text) {
  ExprListParseResult out;
  LexResult lex = tokenize(text);
  out.diagnostics = std::move(lex.diagnostics);
  if (has_errors(out.diagnostics)) return out;
  Parser parser(std::move(lex.tokens), end_of(text));
  try {
    out.exprs = parser.expr_list();
  } catch (ParseError& e) {
    out.diagnostics.push_back(std::move(e.diag));
    out.exprs.clear();
    return out;
  }
  for (const auto& e : out.exprs) {
    if (!is_literal(*e)) {
      out.diagnostics.push_back(
          make_error("SYNTAX-ERROR", "argument is not a literal value", e->span));
    }
  }
  if (has_errors(out.diagnostics)) out.exprs.clear();
  return out;
}

}  // namespace minimaple
