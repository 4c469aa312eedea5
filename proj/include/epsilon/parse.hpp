#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "critical.hpp"
#include "injury.hpp"
#include "subst.hpp"
#include "syntax.hpp"

namespace eps {

// ---------------------------------------------------------------------------
// Instance files
//
//   skolem c(0) := exists x. x = 2     # declaration: name(arity), matrix
//   crit existence c() witness 2
//   crit induction f() bound 5
//   crit pred S S S 0
//
// Terms: 0, S t, decimal numerals, name(args). Formulas: atoms with = < <=,
// ! on atoms, & over |, right associative, parentheses. The matrix may use
// the bound variable and the parameters y1..yk; a skolem term with no
// variable under it must be passed in as a parameter instead.
// ---------------------------------------------------------------------------

struct ParsedInstance {
  Signature sig;
  std::vector<CriticalFormula> crits;
  std::map<std::string, SkolemId> names;
};

namespace detail {

struct Token {
  enum Kind { Ident, Number, Sym, End };
  Kind kind = End;
  std::string text;
  std::uint64_t value = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, tok_.line, tok_.col);
  }

 private:
  static bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool ident_char(char c) {
    return ident_start(c) || (c >= '0' && c <= '9');
  }

  char cur() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void advance() {
    while (pos_ < src_.size()) {
      char c = cur();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else if (c == '#') {
        while (pos_ < src_.size() && cur() != '\n') bump();
      } else {
        break;
      }
    }
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) return;

    char c = cur();
    if (ident_start(c)) {
      tok_.kind = Token::Ident;
      while (pos_ < src_.size() && ident_char(cur())) {
        tok_.text += cur();
        bump();
      }
      return;
    }
    if (c >= '0' && c <= '9') {
      tok_.kind = Token::Number;
      std::string digits;
      while (pos_ < src_.size() && cur() >= '0' && cur() <= '9') {
        digits += cur();
        bump();
      }
      if (digits.size() > 19)
        throw ParseError("numeral too large", tok_.line, tok_.col);
      tok_.value = std::stoull(digits);
      tok_.text = digits;
      return;
    }
    tok_.kind = Token::Sym;
    switch (c) {
      case ':':
        bump();
        if (cur() != '=') throw ParseError("expected ':='", line_, col_);
        bump();
        tok_.text = ":=";
        return;
      case '<':
        bump();
        if (cur() == '=') {
          bump();
          tok_.text = "<=";
        } else {
          tok_.text = "<";
        }
        return;
      case '(':
      case ')':
      case ',':
      case '.':
      case '!':
      case '&':
      case '|':
      case '=':
      case '?':
      case '{':
      case '}':
        tok_.text = std::string(1, c);
        bump();
        return;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'",
                         line_, col_);
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

inline bool term_has_var(const Term& t) {
  switch (t->kind) {
    case TermKind::Var:
      return true;
    case TermKind::Zero:
      return false;
    case TermKind::Succ:
      return term_has_var(t->args[0]);
    case TermKind::App:
      for (const auto& a : t->args)
        if (term_has_var(a)) return true;
      return false;
  }
  return false;
}

// y1, y2, ... -> parameter index; anything else -> 0
inline std::uint32_t param_index(const std::string& name) {
  if (name.size() < 2 || name[0] != 'y' || name[1] == '0') return 0;
  std::uint64_t k = 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return 0;
    k = k * 10 + static_cast<std::uint64_t>(name[i] - '0');
    if (k > 1'000'000) return 0;
  }
  return static_cast<std::uint32_t>(k);
}

inline bool reserved_name(const std::string& name) {
  static const char* kws[] = {"skolem", "crit",    "exists", "witness",
                              "bound",  "pred",    "S",      "existence",
                              "induction"};
  for (const char* k : kws)
    if (name == k) return true;
  return param_index(name) != 0;
}

class InstanceParser {
 public:
  InstanceParser(std::string_view src, Signature& sig,
                 std::map<std::string, SkolemId>& names)
      : lx_(src), sig_(sig), names_(names) {}

  // Term/formula context: closed terms (criticals) have no bound variable.
  struct Ctx {
    const std::string* bound = nullptr;  // nullptr: closed context
    std::uint32_t arity = 0;
    bool allow_heads = false;  // rendered alias_{exists x. ...} heads
  };

  void run(std::vector<CriticalFormula>& crits) {
    while (lx_.peek().kind != Token::End) {
      Token t = lx_.next();
      if (t.kind != Token::Ident)
        throw ParseError("expected a declaration", t.line, t.col);
      if (t.text == "skolem")
        parse_skolem();
      else if (t.text == "crit")
        crits.push_back(parse_crit());
      else
        throw ParseError("expected 'skolem' or 'crit'", t.line, t.col);
    }
  }

  Term parse_term(const Ctx& ctx) {
    Token t = lx_.next();
    if (t.kind == Token::Number) return t_num(t.value);
    if (t.kind != Token::Ident)
      throw ParseError("expected a term", t.line, t.col);
    if (t.text == "S") return t_succ(parse_term(ctx));
    if (ctx.bound && t.text == *ctx.bound) return t_var(0);
    if (std::uint32_t k = param_index(t.text); k != 0) {
      if (!ctx.bound)
        throw ParseError("parameter outside a matrix", t.line, t.col);
      if (k > ctx.arity)
        throw ParseError("parameter beyond the declared arity", t.line, t.col);
      return t_var(k);
    }
    SkolemId id = 0;
    bool from_head = false;
    std::string alias;
    Formula head_matrix;
    if (auto it = names_.find(t.text); it != names_.end()) {
      id = it->second;
    } else if (ctx.allow_heads && !t.text.empty() && t.text.back() == '_' &&
               lx_.peek().kind == Token::Sym && lx_.peek().text == "{") {
      // arity comes from the argument list, not the matrix: a parameter
      // the matrix never mentions must still count
      from_head = true;
      alias = t.text.substr(0, t.text.size() - 1);
      head_matrix = parse_head_matrix();
    } else {
      throw ParseError("undeclared name '" + t.text + "'", t.line, t.col);
    }
    expect_sym("(");
    std::vector<Term> args;
    if (!(lx_.peek().kind == Token::Sym && lx_.peek().text == ")")) {
      args.push_back(parse_term(ctx));
      while (lx_.peek().kind == Token::Sym && lx_.peek().text == ",") {
        lx_.next();
        args.push_back(parse_term(ctx));
      }
    }
    expect_sym(")");
    if (from_head) {
      if (max_param(head_matrix) > args.size())
        throw ParseError("matrix parameter beyond the argument count", t.line,
                         t.col);
      id = sig_.intern(head_matrix, static_cast<std::uint32_t>(args.size()),
                       alias);
    } else if (args.size() != sig_.fn(id).arity) {
      throw ParseError("wrong number of arguments for '" + t.text + "'",
                       t.line, t.col);
    }
    Term app = t_app(id, std::move(args));
    if (ctx.bound && !term_has_var(app))
      throw ParseError(
          "closed skolem term in a matrix; pass it as a parameter", t.line,
          t.col);
    return app;
  }

  Formula parse_formula(const Ctx& ctx) {
    Formula lhs = parse_conj(ctx);
    if (lx_.peek().kind == Token::Sym && lx_.peek().text == "|") {
      lx_.next();
      return f_or(std::move(lhs), parse_formula(ctx));
    }
    return lhs;
  }

  // {exists x. matrix} as printed after an alias; returns the matrix.
  Formula parse_head_matrix() {
    expect_sym("{");
    expect_ident("exists");
    Token bt = lx_.next();
    if (bt.kind != Token::Ident)
      throw ParseError("expected a bound variable", bt.line, bt.col);
    expect_sym(".");
    Ctx mctx;
    std::string bound = bt.text;
    mctx.bound = &bound;
    mctx.arity = 1'000'000;  // validated against the argument count after
    mctx.allow_heads = true;
    Formula matrix = parse_formula(mctx);
    expect_sym("}");
    return matrix;
  }

  void expect_sym(const char* s) {
    Token t = lx_.next();
    if (t.kind != Token::Sym || t.text != s)
      throw ParseError(std::string("expected '") + s + "'", t.line, t.col);
  }

  void expect_ident(const char* s) {
    Token t = lx_.next();
    if (t.kind != Token::Ident || t.text != s)
      throw ParseError(std::string("expected '") + s + "'", t.line, t.col);
  }

  const Token& peek() const { return lx_.peek(); }
  Token next() { return lx_.next(); }

 private:
  Formula parse_conj(const Ctx& ctx) {
    Formula lhs = parse_unit(ctx);
    if (lx_.peek().kind == Token::Sym && lx_.peek().text == "&") {
      lx_.next();
      return f_and(std::move(lhs), parse_conj(ctx));
    }
    return lhs;
  }

  Formula parse_unit(const Ctx& ctx) {
    const Token& p = lx_.peek();
    if (p.kind == Token::Sym && p.text == "!") {
      lx_.next();
      bool parens = lx_.peek().kind == Token::Sym && lx_.peek().text == "(";
      if (parens) lx_.next();
      Formula a = parse_atom(ctx);
      if (parens) expect_sym(")");
      return f_neg_atom(a->pred, a->args);
    }
    if (p.kind == Token::Sym && p.text == "(") {
      lx_.next();
      Formula f = parse_formula(ctx);
      expect_sym(")");
      return f;
    }
    return parse_atom(ctx);
  }

  Formula parse_atom(const Ctx& ctx) {
    Term lhs = parse_term(ctx);
    Token op = lx_.next();
    if (op.kind != Token::Sym || (op.text != "=" && op.text != "<" &&
                                  op.text != "<="))
      throw ParseError("expected '=', '<' or '<='", op.line, op.col);
    Term rhs = parse_term(ctx);
    PredId pid = op.text == "=" ? kEq : op.text == "<" ? kLt : kLe;
    return f_atom(pid, {std::move(lhs), std::move(rhs)});
  }

  static std::uint32_t max_param_term(const Term& t) {
    switch (t->kind) {
      case TermKind::Var:
        return t->var;
      case TermKind::Zero:
        return 0;
      case TermKind::Succ:
        return max_param_term(t->args[0]);
      case TermKind::App: {
        std::uint32_t m = 0;
        for (const auto& a : t->args) m = std::max(m, max_param_term(a));
        return m;
      }
    }
    return 0;
  }

  static std::uint32_t max_param(const Formula& f) {
    switch (f->kind) {
      case FormulaKind::Atom:
      case FormulaKind::NegAtom: {
        std::uint32_t m = 0;
        for (const auto& a : f->args) m = std::max(m, max_param_term(a));
        return m;
      }
      case FormulaKind::And:
      case FormulaKind::Or:
        return std::max(max_param(f->lhs), max_param(f->rhs));
    }
    return 0;
  }

  void parse_skolem() {
    Token name = lx_.next();
    if (name.kind != Token::Ident)
      throw ParseError("expected a function name", name.line, name.col);
    if (reserved_name(name.text))
      throw ParseError("'" + name.text + "' is reserved", name.line, name.col);
    if (names_.count(name.text))
      throw ParseError("'" + name.text + "' is already declared", name.line,
                       name.col);
    expect_sym("(");
    Token ar = lx_.next();
    if (ar.kind != Token::Number)
      throw ParseError("expected the arity", ar.line, ar.col);
    expect_sym(")");
    expect_sym(":=");
    expect_ident("exists");
    Token bt = lx_.next();
    if (bt.kind != Token::Ident)
      throw ParseError("expected a bound variable", bt.line, bt.col);
    if (reserved_name(bt.text) || names_.count(bt.text))
      throw ParseError("'" + bt.text + "' cannot be a bound variable", bt.line,
                       bt.col);
    expect_sym(".");
    Ctx ctx;
    ctx.bound = &bt.text;
    ctx.arity = static_cast<std::uint32_t>(ar.value);
    Formula matrix = parse_formula(ctx);
    names_[name.text] =
        sig_.intern(matrix, static_cast<std::uint32_t>(ar.value), name.text);
  }

  CriticalFormula parse_crit() {
    Token kind = lx_.next();
    if (kind.kind != Token::Ident)
      throw ParseError("expected a critical-formula kind", kind.line,
                       kind.col);
    Ctx closed;
    if (kind.text == "pred") return make_predecessor(sig_, parse_term(closed));
    if (kind.text != "existence" && kind.text != "induction")
      throw ParseError("expected 'existence', 'induction' or 'pred'",
                       kind.line, kind.col);
    Token name = lx_.next();
    if (name.kind != Token::Ident || !names_.count(name.text))
      throw ParseError("undeclared name '" + name.text + "'", name.line,
                       name.col);
    SkolemId id = names_[name.text];
    expect_sym("(");
    std::vector<Term> args;
    if (!(lx_.peek().kind == Token::Sym && lx_.peek().text == ")")) {
      args.push_back(parse_term(closed));
      while (lx_.peek().kind == Token::Sym && lx_.peek().text == ",") {
        lx_.next();
        args.push_back(parse_term(closed));
      }
    }
    expect_sym(")");
    if (args.size() != sig_.fn(id).arity)
      throw ParseError("wrong number of arguments for '" + name.text + "'",
                       name.line, name.col);
    expect_ident(kind.text == "existence" ? "witness" : "bound");
    Term aux = parse_term(closed);
    return kind.text == "existence"
               ? make_existence(sig_, id, std::move(args), std::move(aux))
               : make_induction(sig_, id, std::move(args), std::move(aux));
  }

  Lexer lx_;
  Signature& sig_;
  std::map<std::string, SkolemId>& names_;
};

}  // namespace detail

inline ParsedInstance parse_instance(std::string_view text) {
  ParsedInstance inst;
  detail::InstanceParser p(text, inst.sig, inst.names);
  p.run(inst.crits);
  return inst;
}

// Substitution files: the "term := value" lines printed by solve, terms in
// the rendered alias_{exists x. matrix}(args) form, value a numeral or "?".
inline EpsSubstitution parse_substitution(std::string_view text,
                                          Signature& sig) {
  std::map<std::string, SkolemId> names;
  detail::InstanceParser p(text, sig, names);
  detail::InstanceParser::Ctx ctx;
  ctx.allow_heads = true;
  EpsSubstitution s;
  while (p.peek().kind != detail::Token::End) {
    Term t = p.parse_term(ctx);
    auto ct = as_canonical(t);
    if (!ct)
      throw ParseError("expected a skolem term with numeral arguments",
                       p.peek().line, p.peek().col);
    std::uint32_t arity = sig.fn(ct->fn).arity;
    if (ct->args.size() != arity)
      throw ParseError("wrong number of arguments in a substitution entry",
                       p.peek().line, p.peek().col);
    p.expect_sym(":=");
    detail::Token v = p.next();
    if (v.kind == detail::Token::Number) {
      s.set(*ct, Value::num(v.value));
    } else if (v.kind == detail::Token::Sym && v.text == "?") {
      s.set(*ct, Value::unknown());
    } else {
      throw ParseError("expected a numeral or '?'", v.line, v.col);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Rendering back to instance-file syntax. Skolem applications print by name,
// so only instances whose functions all carry names round-trip; derived
// induction functions are rebuilt by their crit lines.
// ---------------------------------------------------------------------------

inline std::string term_to_source(const Signature& sig, const Term& t,
                                  const std::map<SkolemId, std::string>& names);

inline std::string formula_to_source(
    const Signature& sig, const Formula& f,
    const std::map<SkolemId, std::string>& names) {
  auto wrap = [&](const Formula& g, bool parens) {
    std::string s = formula_to_source(sig, g, names);
    return parens ? "(" + s + ")" : s;
  };
  switch (f->kind) {
    case FormulaKind::Atom:
    case FormulaKind::NegAtom: {
      std::string s = term_to_source(sig, f->args[0], names) + " " +
                      sig.predicate(f->pred).name + " " +
                      term_to_source(sig, f->args[1], names);
      return f->kind == FormulaKind::NegAtom ? "!" + s : s;
    }
    case FormulaKind::And:
      return wrap(f->lhs, f->lhs->kind == FormulaKind::And ||
                              f->lhs->kind == FormulaKind::Or) +
             " & " + wrap(f->rhs, f->rhs->kind == FormulaKind::Or);
    case FormulaKind::Or:
      return wrap(f->lhs, f->lhs->kind == FormulaKind::Or) + " | " +
             formula_to_source(sig, f->rhs, names);
  }
  throw InternalError("formula_to_source: bad formula kind");
}

inline std::string term_to_source(
    const Signature& sig, const Term& t,
    const std::map<SkolemId, std::string>& names) {
  if (auto n = numeral_value(t)) return std::to_string(*n);
  switch (t->kind) {
    case TermKind::Zero:
      return "0";
    case TermKind::Var:
      return var_name(t->var);
    case TermKind::Succ:
      return "S " + term_to_source(sig, t->args[0], names);
    case TermKind::App: {
      auto it = names.find(t->fn);
      if (it == names.end())
        throw InternalError("term_to_source: unnamed function");
      std::string out = it->second + "(";
      for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (i) out += ", ";
        out += term_to_source(sig, t->args[i], names);
      }
      return out + ")";
    }
  }
  throw InternalError("term_to_source: bad term kind");
}

inline std::string instance_to_source(const ParsedInstance& inst) {
  // declarations in interning order so a re-parse assigns the same ids
  std::map<SkolemId, std::string> by_id;
  for (const auto& [name, id] : inst.names) by_id.emplace(id, name);
  std::string out;
  for (const auto& [id, name] : by_id) {
    const auto& fn = inst.sig.fn(id);
    out += "skolem " + name + "(" + std::to_string(fn.arity) +
           ") := exists x. " +
           formula_to_source(inst.sig, fn.matrix, by_id) + "\n";
  }
  for (const auto& f : inst.crits) {
    switch (f.kind) {
      case CriticalKind::Predecessor:
        out += "crit pred " + term_to_source(inst.sig, f.aux, by_id) + "\n";
        break;
      case CriticalKind::Existence:
      case CriticalKind::Induction: {
        bool ex = f.kind == CriticalKind::Existence;
        SkolemId named = ex ? f.key_fn : f.hyp_fn;
        auto it = by_id.find(named);
        if (it == by_id.end())
          throw InternalError("instance_to_source: unnamed function");
        out += std::string("crit ") + (ex ? "existence " : "induction ") +
               it->second + "(";
        for (std::size_t i = 0; i < f.params.size(); ++i) {
          if (i) out += ", ";
          out += term_to_source(inst.sig, f.params[i], by_id);
        }
        out += std::string(") ") + (ex ? "witness " : "bound ") +
               term_to_source(inst.sig, f.aux, by_id) + "\n";
        break;
      }
    }
  }
  return out;
}

// Path syntax as printed: "()", "(3,?,2)".
inline Path parse_path(std::string_view s, int line = 1, int col = 1) {
  auto bad = [&]() -> ParseError {
    return ParseError("malformed path '" + std::string(s) + "'", line, col);
  };
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw bad();
  Path p;
  std::size_t i = 1;
  const std::size_t end = s.size() - 1;
  if (i == end) return p;
  while (true) {
    if (i >= end) throw bad();
    if (s[i] == '?') {
      p.push_back(Label::q());
      ++i;
    } else if (s[i] >= '0' && s[i] <= '9') {
      std::uint64_t n = 0;
      std::size_t d = 0;
      while (i < end && s[i] >= '0' && s[i] <= '9') {
        n = n * 10 + static_cast<std::uint64_t>(s[i] - '0');
        ++i;
        if (++d > 19) throw bad();
      }
      p.push_back(Label::num(n));
    } else {
      throw bad();
    }
    if (i == end) return p;
    if (s[i] != ',') throw bad();
    ++i;
  }
}

}  // namespace eps
