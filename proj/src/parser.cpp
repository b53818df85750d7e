#include "lazyref/parser.hpp"

#include <cctype>
#include <map>
#include <set>

#include "lazyref/constants.hpp"
#include "lazyref/pretty.hpp"

namespace lazyref {

std::string ParseError::render() const {
  std::string head;
  switch (kind) {
    case Kind::Syntax: head = "parse error"; break;
    case Kind::Scope: head = "unbound name"; break;
    case Kind::Annotation: head = "missing signature"; break;
  }
  return pretty(span) + ": " + head + ": " + message;
}

namespace {

enum class Tok {
  Ident,
  Int,
  KwVal,
  KwDecreases,
  KwLet,
  KwRec,
  KwIf,
  KwThen,
  KwElse,
  KwIn,
  KwTrue,
  KwFalse,
  ColonColon,
  Colon,
  Semi,
  Comma,
  Eq,        // =
  Lambda,    // backslash
  Dot,
  Arrow,     // ->
  Bar,       // |
  Tilde,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  OpAdd,
  OpSub,
  OpMul,
  OpDiv,
  OpLt,
  OpLe,
  OpGt,
  OpGe,
  OpEq,   // ==
  OpNe,   // /=
  OpAnd,  // &&
  OpOr,   // ||
  End,
};

struct Token {
  Tok kind = Tok::End;
  Span span;
  std::string text;
  std::int64_t value = 0;
};

[[noreturn]] void fail(Span sp, std::string msg,
                       ParseError::Kind kind = ParseError::Kind::Syntax,
                       std::string name = {}) {
  throw ParseError{kind, sp, std::move(msg), std::move(name)};
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { tokenize(); }
  const std::vector<Token>& tokens() const { return toks_; }

 private:
  void tokenize() {
    std::uint32_t line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
      for (std::size_t k = 0; k < n; ++k) {
        if (src_[i + k] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      i += n;
    };
    while (i < src_.size()) {
      char c = src_[i];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance(1);
        continue;
      }
      if (c == '-' && i + 1 < src_.size() && src_[i + 1] == '-') {
        while (i < src_.size() && src_[i] != '\n') advance(1);
        continue;
      }
      Span sp{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1),
              line, col};
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j])))
          ++j;
        std::string text(src_.substr(i, j - i));
        sp.end = static_cast<std::uint32_t>(j);
        std::int64_t v = 0;
        try {
          v = std::stoll(text);
        } catch (const std::exception&) {
          fail(sp, "integer literal out of range: " + text);
        }
        toks_.push_back({Tok::Int, sp, text, v});
        advance(j - i);
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[j])) ||
                src_[j] == '_' || src_[j] == '\''))
          ++j;
        std::string text(src_.substr(i, j - i));
        sp.end = static_cast<std::uint32_t>(j);
        Tok kind = keyword(text);
        toks_.push_back({kind, sp, text, 0});
        advance(j - i);
        continue;
      }
      auto two = i + 1 < src_.size() ? src_.substr(i, 2) : std::string_view{};
      auto push2 = [&](Tok k) {
        sp.end = static_cast<std::uint32_t>(i + 2);
        toks_.push_back({k, sp, std::string(two), 0});
        advance(2);
      };
      if (two == "::") { push2(Tok::ColonColon); continue; }
      if (two == "->") { push2(Tok::Arrow); continue; }
      if (two == "<=") { push2(Tok::OpLe); continue; }
      if (two == ">=") { push2(Tok::OpGe); continue; }
      if (two == "==") { push2(Tok::OpEq); continue; }
      if (two == "/=") { push2(Tok::OpNe); continue; }
      if (two == "&&") { push2(Tok::OpAnd); continue; }
      if (two == "||") { push2(Tok::OpOr); continue; }
      auto push1 = [&](Tok k) {
        toks_.push_back({k, sp, std::string(1, c), 0});
        advance(1);
      };
      switch (c) {
        case ':': push1(Tok::Colon); break;
        case ';': push1(Tok::Semi); break;
        case ',': push1(Tok::Comma); break;
        case '=': push1(Tok::Eq); break;
        case '\\': push1(Tok::Lambda); break;
        case '.': push1(Tok::Dot); break;
        case '|': push1(Tok::Bar); break;
        case '~': push1(Tok::Tilde); break;
        case '(': push1(Tok::LParen); break;
        case ')': push1(Tok::RParen); break;
        case '{': push1(Tok::LBrace); break;
        case '}': push1(Tok::RBrace); break;
        case '[': push1(Tok::LBracket); break;
        case ']': push1(Tok::RBracket); break;
        case '+': push1(Tok::OpAdd); break;
        case '-': push1(Tok::OpSub); break;
        case '*': push1(Tok::OpMul); break;
        case '/': push1(Tok::OpDiv); break;
        case '<': push1(Tok::OpLt); break;
        case '>': push1(Tok::OpGt); break;
        default:
          fail(sp, std::string("unexpected character '") + c + "'");
      }
    }
    Span eof{static_cast<std::uint32_t>(src_.size()),
             static_cast<std::uint32_t>(src_.size()), line, col};
    toks_.push_back({Tok::End, eof, "<end of input>", 0});
  }

  static Tok keyword(const std::string& s) {
    if (s == "val") return Tok::KwVal;
    if (s == "decreases") return Tok::KwDecreases;
    if (s == "let") return Tok::KwLet;
    if (s == "rec") return Tok::KwRec;
    if (s == "if") return Tok::KwIf;
    if (s == "then") return Tok::KwThen;
    if (s == "else") return Tok::KwElse;
    if (s == "in") return Tok::KwIn;
    if (s == "true") return Tok::KwTrue;
    if (s == "false") return Tok::KwFalse;
    return Tok::Ident;
  }

  std::string_view src_;
  std::vector<Token> toks_;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) {}

  Program program() {
    Program p;
    std::map<std::string, RTypePtr> pending_sigs;
    std::map<std::string, std::pair<MetricSpec, Span>> pending_metrics;
    std::set<std::string> defined;
    while (true) {
      const Token& t = peek();
      if (t.kind == Tok::KwVal) {
        next();
        Token name = expect_ident("signature name");
        expect(Tok::ColonColon, "'::'");
        RTypePtr ty = type();
        expect(Tok::Semi, "';'");
        if (name.text == "main") {
          if (p.main_sig) fail(name.span, "duplicate signature for main");
          p.main_sig = ty;
          continue;
        }
        if (!pending_sigs.emplace(name.text, ty).second)
          fail(name.span, "duplicate signature for '" + name.text + "'");
        continue;
      }
      if (t.kind == Tok::KwDecreases) {
        next();
        Token name = expect_ident("function name");
        expect(Tok::LBracket, "'['");
        MetricSpec m;
        m.kind = MetricSpec::Kind::Lex;
        m.entries.push_back(expr());
        while (peek().kind == Tok::Comma) {
          next();
          m.entries.push_back(expr());
        }
        expect(Tok::RBracket, "']'");
        expect(Tok::Semi, "';'");
        if (!pending_metrics.emplace(name.text, std::make_pair(m, name.span)).second)
          fail(name.span, "duplicate decreases hint for '" + name.text + "'");
        continue;
      }
      if (t.kind == Tok::KwLet || t.kind == Tok::KwRec) {
        bool is_rec = t.kind == Tok::KwRec;
        next();
        Token name = expect_ident("binding name");
        if (name.text == "main")
          fail(name.span, "'main' is reserved for the final definition");
        std::vector<std::string> params;
        std::set<std::string> seen;
        while (peek().kind == Tok::Ident) {
          Token par = next_tok();
          if (!seen.insert(par.text).second)
            fail(par.span, "duplicate parameter '" + par.text + "'");
          params.push_back(par.text);
        }
        if (is_rec && params.empty())
          fail(name.span, "recursive binding needs at least one parameter");
        expect(Tok::Eq, "'='");
        ExprPtr body = expr();
        expect(Tok::Semi, "';'");
        if (!defined.insert(name.text).second)
          fail(name.span, "duplicate binding for '" + name.text + "'");
        Decl d;
        d.kind = is_rec ? Decl::Kind::Rec : Decl::Kind::Let;
        d.name = name.text;
        d.span = name.span;
        d.params = std::move(params);
        d.body = body;
        auto sig = pending_sigs.find(name.text);
        if (sig == pending_sigs.end())
          fail(name.span,
               (is_rec ? "recursive binding '" : "binding '") + name.text +
                   "' has no 'val' signature",
               ParseError::Kind::Annotation, name.text);
        d.signature = sig->second;
        pending_sigs.erase(sig);
        p.decls.push_back(std::move(d));
        continue;
      }
      if (t.kind == Tok::Ident && t.text == "main") {
        next();
        expect(Tok::Eq, "'='");
        p.main_span = t.span;
        p.main_expr = expr();
        expect(Tok::End, "end of input after main");
        break;
      }
      fail(t.span, "expected a top-level item or 'main = ...', got '" + t.text + "'");
    }
    if (!pending_sigs.empty())
      fail(p.main_span, "signature for '" + pending_sigs.begin()->first +
                            "' has no matching binding");
    attach_metrics(p, pending_metrics);
    validate(p);
    return p;
  }

  // Used by the expression-only entry point: primitive names resolve to
  // constants, anything else stays a free variable.
  ExprPtr expr_only() {
    ExprPtr e = expr();
    expect(Tok::End, "end of input");
    std::set<std::string> scope;
    for (const auto& name : free_vars(e))
      if (!const_table().count(name)) scope.insert(name);
    return resolve(e, scope);
  }

 private:
  // ---- token plumbing ----
  const Token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, lexer_.tokens().size() - 1);
    return lexer_.tokens()[i];
  }
  Token next_tok() { return lexer_.tokens()[pos_++]; }
  void next() { ++pos_; }
  Token expect(Tok k, const std::string& what) {
    if (peek().kind != k)
      fail(peek().span, "expected " + what + ", got '" + peek().text + "'");
    return next_tok();
  }
  Token expect_ident(const std::string& what) {
    if (peek().kind != Tok::Ident)
      fail(peek().span, "expected " + what + ", got '" + peek().text + "'");
    return next_tok();
  }

  // ---- types ----
  RTypePtr type() {
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Colon) {
      Token binder = next_tok();
      next();  // ':'
      RTypePtr input = type_operand();
      expect(Tok::Arrow, "'->' after dependent binder");
      RTypePtr output = type();
      return rt_fun(binder.text, input, output);
    }
    RTypePtr operand = type_operand();
    if (peek().kind == Tok::Arrow) {
      next();
      RTypePtr output = type();
      return rt_fun("_", operand, output);
    }
    return operand;
  }

  RTypePtr type_operand() {
    const Token& t = peek();
    if (t.kind == Tok::Tilde) {
      next();
      Token base = expect_ident("'Int' or 'Bool'");
      return rt_unrefined(base_type(base), Label::Div);
    }
    if (t.kind == Tok::LBrace) {
      next();
      Token binder = expect_ident("value binder");
      expect(Tok::Colon, "':'");
      Token base = expect_ident("'Int' or 'Bool'");
      expect(Tok::Bar, "'|'");
      ExprPtr refinement = expr();
      expect(Tok::RBrace, "'}'");
      return rt_base(binder.text, base_type(base), Label::Fin, refinement);
    }
    if (t.kind == Tok::LParen) {
      next();
      RTypePtr inner = type();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind == Tok::Ident) {
      Token base = next_tok();
      // Builtin aliases: Nat = {v:Int | 0 <= v}, Pos = {v:Int | 0 < v}.
      if (base.text == "Nat")
        return rt_base("v", BaseType::Int, Label::Fin,
                       mk_binop(PrimOp::Le, mk_int(0), mk_var("v"), base.span));
      if (base.text == "Pos")
        return rt_base("v", BaseType::Int, Label::Fin,
                       mk_binop(PrimOp::Lt, mk_int(0), mk_var("v"), base.span));
      return rt_unrefined(base_type(base), Label::Fin);
    }
    fail(t.span, "expected a type, got '" + t.text + "'");
  }

  static BaseType base_type(const Token& t) {
    if (t.text == "Int") return BaseType::Int;
    if (t.text == "Bool") return BaseType::Bool;
    fail(t.span, "expected 'Int' or 'Bool', got '" + t.text + "'");
  }

  // ---- expressions ----
  ExprPtr expr() {
    const Token& t = peek();
    if (t.kind == Tok::Lambda) {
      next();
      Token binder = expect_ident("lambda parameter");
      expect(Tok::Colon, "':' before the parameter type");
      RTypePtr ann = type();
      expect(Tok::Dot, "'.'");
      ExprPtr body = expr();
      return mk_lam(binder.text, ann, body, t.span);
    }
    if (t.kind == Tok::KwLet) {
      next();
      Token binder = expect_ident("let binder");
      expect(Tok::Eq, "'='");
      ExprPtr bound = expr();
      expect(Tok::KwIn, "'in'");
      ExprPtr body = expr();
      return mk_let(binder.text, bound, body, t.span);
    }
    if (t.kind == Tok::KwIf) {
      next();
      ExprPtr cond = expr();
      expect(Tok::KwThen, "'then'");
      ExprPtr then_e = expr();
      expect(Tok::KwElse, "'else'");
      ExprPtr else_e = expr();
      return mk_if(cond, then_e, else_e, t.span);
    }
    return expr_or();
  }

  ExprPtr expr_or() {
    ExprPtr e = expr_and();
    while (peek().kind == Tok::OpOr) {
      Span sp = next_tok().span;
      e = mk_binop(PrimOp::Or, e, expr_and(), sp);
    }
    return e;
  }

  ExprPtr expr_and() {
    ExprPtr e = expr_cmp();
    while (peek().kind == Tok::OpAnd) {
      Span sp = next_tok().span;
      e = mk_binop(PrimOp::And, e, expr_cmp(), sp);
    }
    return e;
  }

  ExprPtr expr_cmp() {
    ExprPtr e = expr_add();
    PrimOp op;
    switch (peek().kind) {
      case Tok::OpLt: op = PrimOp::Lt; break;
      case Tok::OpLe: op = PrimOp::Le; break;
      case Tok::OpGt: op = PrimOp::Gt; break;
      case Tok::OpGe: op = PrimOp::Ge; break;
      case Tok::OpEq: op = PrimOp::Eq; break;
      case Tok::OpNe: op = PrimOp::Ne; break;
      default: return e;
    }
    Span sp = next_tok().span;
    return mk_binop(op, e, expr_add(), sp);  // comparisons are non-associative
  }

  ExprPtr expr_add() {
    ExprPtr e = expr_mul();
    while (peek().kind == Tok::OpAdd || peek().kind == Tok::OpSub) {
      Token t = next_tok();
      e = mk_binop(t.kind == Tok::OpAdd ? PrimOp::Add : PrimOp::Sub, e, expr_mul(),
                   t.span);
    }
    return e;
  }

  ExprPtr expr_mul() {
    ExprPtr e = expr_unary();
    while (peek().kind == Tok::OpMul || peek().kind == Tok::OpDiv) {
      Token t = next_tok();
      e = mk_binop(t.kind == Tok::OpMul ? PrimOp::Mul : PrimOp::Div, e,
                   expr_unary(), t.span);
    }
    return e;
  }

  ExprPtr expr_unary() {
    if (peek().kind == Tok::OpSub) {
      Token t = next_tok();
      ExprPtr operand = expr_unary();
      if (const auto* c = std::get_if<ConE>(&operand->node))
        if (const auto* n = std::get_if<std::int64_t>(&c->val))
          return mk_int(-*n, t.span);
      return mk_binop(PrimOp::Sub, mk_int(0, t.span), operand, t.span);
    }
    return expr_app();
  }

  ExprPtr expr_app() {
    ExprPtr e = atom();
    while (starts_atom(peek().kind)) {
      ExprPtr arg = atom();
      e = mk_app(e, arg, e->span);
    }
    return e;
  }

  static bool starts_atom(Tok k) {
    return k == Tok::Int || k == Tok::Ident || k == Tok::KwTrue ||
           k == Tok::KwFalse || k == Tok::LParen;
  }

  ExprPtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: {
        Token tok = next_tok();
        return mk_int(tok.value, tok.span);
      }
      case Tok::KwTrue: next(); return mk_boolc(true, t.span);
      case Tok::KwFalse: next(); return mk_boolc(false, t.span);
      case Tok::Ident: {
        Token tok = next_tok();
        return mk_var(tok.text, tok.span);
      }
      case Tok::LParen: {
        next();
        ExprPtr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      default:
        fail(t.span, "expected an expression, got '" + t.text + "'");
    }
  }

  // ---- resolution and validation ----

  // Rewrites free variables: bound names stay, primitive constant names
  // become constant nodes, anything else is a scope error.
  ExprPtr resolve(const ExprPtr& e, std::set<std::string>& scope) {
    struct Guard {
      std::set<std::string>& s;
      std::string name;
      bool added;
      Guard(std::set<std::string>& s, const std::string& n)
          : s(s), name(n), added(s.insert(n).second) {}
      ~Guard() {
        if (added) s.erase(name);
      }
    };
    return std::visit(
        [&](const auto& node) -> ExprPtr {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, VarE>) {
            if (scope.count(node.name)) return e;
            auto it = const_table().find(node.name);
            if (it != const_table().end())
              return std::make_shared<Expr>(Expr{e->span, ConE{it->second.val}});
            fail(e->span, "'" + node.name + "' is not in scope",
                 ParseError::Kind::Scope, node.name);
          } else if constexpr (std::is_same_v<T, ConE>) {
            return e;
          } else if constexpr (std::is_same_v<T, LamE>) {
            RTypePtr ann = node.ann ? resolve_type(node.ann, scope) : nullptr;
            Guard g(scope, node.binder);
            return mk_lam(node.binder, ann, resolve(node.body, scope), e->span);
          } else if constexpr (std::is_same_v<T, AppE>) {
            ExprPtr fn = resolve(node.fn, scope);
            return mk_app(fn, resolve(node.arg, scope), e->span);
          } else if constexpr (std::is_same_v<T, LetE>) {
            ExprPtr bound = resolve(node.bound, scope);
            Guard g(scope, node.binder);
            return mk_let(node.binder, bound, resolve(node.body, scope), e->span);
          } else if constexpr (std::is_same_v<T, FixE>) {
            RTypePtr pt = resolve_type(node.param_type, scope);
            Guard gx(scope, node.binder);
            RTypePtr rt = resolve_type(node.result_type, scope);
            Guard gf(scope, node.fname);
            return mk_fix(node.fname, node.binder, pt, rt, node.metric,
                          resolve(node.body, scope), e->span);
          } else {
            static_assert(std::is_same_v<T, IfE>);
            return mk_if(resolve(node.cond, scope), resolve(node.then_e, scope),
                         resolve(node.else_e, scope), e->span);
          }
        },
        e->node);
  }

  RTypePtr resolve_type(const RTypePtr& t, std::set<std::string>& scope) {
    struct Guard {
      std::set<std::string>& s;
      std::string name;
      bool added;
      Guard(std::set<std::string>& s, const std::string& n)
          : s(s), name(n), added(s.insert(n).second) {}
      ~Guard() {
        if (added) s.erase(name);
      }
    };
    if (const auto* b = std::get_if<RBase>(&t->node)) {
      Guard g(scope, b->value_binder);
      ExprPtr refinement = resolve(b->refinement, scope);
      return rt_base(b->value_binder, b->base, b->label, refinement);
    }
    const auto& f = std::get<RFun>(t->node);
    RTypePtr input = resolve_type(f.input, scope);
    Guard g(scope, f.binder);
    return rt_fun(f.binder, input, resolve_type(f.output, scope));
  }

  void attach_metrics(
      Program& p,
      const std::map<std::string, std::pair<MetricSpec, Span>>& metrics) {
    for (const auto& [name, entry] : metrics) {
      bool found = false;
      for (auto& d : p.decls) {
        if (d.name != name) continue;
        found = true;
        if (d.kind != Decl::Kind::Rec)
          fail(entry.second, "'decreases' applies to recursive bindings only");
        d.metric = entry.first;
      }
      if (!found)
        fail(entry.second, "'decreases' names unknown binding '" + name + "'",
             ParseError::Kind::Scope, name);
    }
  }

  void validate(Program& p) {
    std::set<std::string> globals;
    for (auto& d : p.decls) {
      std::vector<std::pair<std::string, RTypePtr>> binds;
      RTypePtr result;
      if (!split_signature(d.signature, d.params, binds, result))
        fail(d.span, "binding '" + d.name +
                         "' has more parameters than arrows in its signature");
      std::set<std::string> scope = globals;
      {
        std::set<std::string> sig_scope;
        d.signature = resolve_type(d.signature, sig_scope);
      }
      for (const auto& par : d.params) scope.insert(par);
      if (d.kind == Decl::Kind::Rec) scope.insert(d.name);
      d.body = resolve(d.body, scope);
      if (d.metric) {
        std::set<std::string> params(d.params.begin(), d.params.end());
        for (auto& m : d.metric->entries) {
          for (const auto& v : free_vars(m))
            if (!params.count(v))
              fail(d.span,
                   "decreases metric for '" + d.name +
                       "' mentions '" + v + "', which is not a parameter",
                   ParseError::Kind::Scope, v);
          m = resolve(m, params);
        }
      }
      globals.insert(d.name);
    }
    if (p.main_sig) {
      std::set<std::string> sig_scope;
      p.main_sig = resolve_type(*p.main_sig, sig_scope);
    }
    p.main_expr = resolve(p.main_expr, globals);
  }

  Lexer lexer_;
  std::size_t pos_ = 0;
};

}  // namespace

std::variant<Program, ParseError> parse_program(std::string_view source) {
  try {
    Parser parser(source);
    return parser.program();
  } catch (const ParseError& e) {
    return e;
  }
}

std::variant<ExprPtr, ParseError> parse_expr_text(std::string_view source) {
  try {
    Parser parser(source);
    return parser.expr_only();
  } catch (const ParseError& e) {
    return e;
  }
}

}  // namespace lazyref
