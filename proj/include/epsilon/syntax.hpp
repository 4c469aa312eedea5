#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace eps {

using SkolemId = std::uint32_t;
using PredId = std::uint32_t;

// Built-in predicate ids. A Signature always registers these three first.
inline constexpr PredId kEq = 0;
inline constexpr PredId kLt = 1;
inline constexpr PredId kLe = 2;

// ---------------------------------------------------------------------------
// Terms
//
// Var indices are positional: index 0 is the variable bound by the leading
// quantifier of a Skolem matrix, index i >= 1 is the i-th parameter slot.
// Closed terms never contain Var nodes.
// ---------------------------------------------------------------------------

enum class TermKind : std::uint8_t { Zero, Succ, App, Var };

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TermNode {
  TermKind kind = TermKind::Zero;
  std::uint32_t var = 0;    // Var only
  SkolemId fn = 0;          // App only
  std::vector<Term> args;   // Succ: exactly one; App: arity many
};

inline Term t_zero() {
  static const Term z = std::make_shared<TermNode>();
  return z;
}

inline Term t_succ(Term t) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Succ;
  n->args.push_back(std::move(t));
  return Term(std::move(n));
}

inline Term t_var(std::uint32_t index) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Var;
  n->var = index;
  return Term(std::move(n));
}

inline Term t_app(SkolemId fn, std::vector<Term> args = {}) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::App;
  n->fn = fn;
  n->args = std::move(args);
  return Term(std::move(n));
}

inline Term t_num(std::uint64_t n) {
  Term t = t_zero();
  for (std::uint64_t i = 0; i < n; ++i) t = t_succ(std::move(t));
  return t;
}

inline std::optional<std::uint64_t> numeral_value(const Term& t) {
  std::uint64_t n = 0;
  const TermNode* p = t.get();
  while (p->kind == TermKind::Succ) {
    ++n;
    p = p->args[0].get();
  }
  if (p->kind == TermKind::Zero) return n;
  return std::nullopt;
}

inline bool is_numeral(const Term& t) { return numeral_value(t).has_value(); }

inline bool term_eq(const Term& a, const Term& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Zero:
      return true;
    case TermKind::Var:
      return a->var == b->var;
    case TermKind::Succ:
      return term_eq(a->args[0], b->args[0]);
    case TermKind::App:
      if (a->fn != b->fn || a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!term_eq(a->args[i], b->args[i])) return false;
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Formulas (negation normal form: negation only on atoms)
// ---------------------------------------------------------------------------

enum class FormulaKind : std::uint8_t { Atom, NegAtom, And, Or };

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
  FormulaKind kind = FormulaKind::Atom;
  PredId pred = 0;          // atoms only
  std::vector<Term> args;   // atoms only
  Formula lhs, rhs;         // And / Or only
};

inline Formula f_atom(PredId pred, std::vector<Term> args) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = FormulaKind::Atom;
  n->pred = pred;
  n->args = std::move(args);
  return Formula(std::move(n));
}

inline Formula f_atom(PredId pred, Term lhs, Term rhs) {
  return f_atom(pred, std::vector<Term>{std::move(lhs), std::move(rhs)});
}

inline Formula f_neg_atom(PredId pred, std::vector<Term> args) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = FormulaKind::NegAtom;
  n->pred = pred;
  n->args = std::move(args);
  return Formula(std::move(n));
}

inline Formula f_neg_atom(PredId pred, Term lhs, Term rhs) {
  return f_neg_atom(pred, std::vector<Term>{std::move(lhs), std::move(rhs)});
}

inline Formula f_and(Formula lhs, Formula rhs) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = FormulaKind::And;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Formula(std::move(n));
}

inline Formula f_or(Formula lhs, Formula rhs) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = FormulaKind::Or;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Formula(std::move(n));
}

inline Formula negate(const Formula& f) {
  switch (f->kind) {
    case FormulaKind::Atom:
      return f_neg_atom(f->pred, f->args);
    case FormulaKind::NegAtom:
      return f_atom(f->pred, f->args);
    case FormulaKind::And:
      return f_or(negate(f->lhs), negate(f->rhs));
    case FormulaKind::Or:
      return f_and(negate(f->lhs), negate(f->rhs));
  }
  throw InternalError("negate: bad formula kind");
}

inline bool formula_eq(const Formula& a, const Formula& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FormulaKind::Atom:
    case FormulaKind::NegAtom:
      if (a->pred != b->pred || a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!term_eq(a->args[i], b->args[i])) return false;
      return true;
    case FormulaKind::And:
    case FormulaKind::Or:
      return formula_eq(a->lhs, b->lhs) && formula_eq(a->rhs, b->rhs);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Variable instantiation. env[i] replaces Var i; every Var index occurring
// must be covered.
// ---------------------------------------------------------------------------

inline Term subst_vars(const Term& t, const std::vector<Term>& env) {
  switch (t->kind) {
    case TermKind::Zero:
      return t;
    case TermKind::Var:
      if (t->var >= env.size())
        throw InternalError("subst_vars: unbound variable index " +
                            std::to_string(t->var));
      return env[t->var];
    case TermKind::Succ:
      return t_succ(subst_vars(t->args[0], env));
    case TermKind::App: {
      std::vector<Term> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(subst_vars(a, env));
      return t_app(t->fn, std::move(args));
    }
  }
  throw InternalError("subst_vars: bad term kind");
}

inline Formula subst_vars(const Formula& f, const std::vector<Term>& env) {
  switch (f->kind) {
    case FormulaKind::Atom:
    case FormulaKind::NegAtom: {
      std::vector<Term> args;
      args.reserve(f->args.size());
      for (const auto& a : f->args) args.push_back(subst_vars(a, env));
      return f->kind == FormulaKind::Atom ? f_atom(f->pred, std::move(args))
                                          : f_neg_atom(f->pred, std::move(args));
    }
    case FormulaKind::And:
      return f_and(subst_vars(f->lhs, env), subst_vars(f->rhs, env));
    case FormulaKind::Or:
      return f_or(subst_vars(f->lhs, env), subst_vars(f->rhs, env));
  }
  throw InternalError("subst_vars: bad formula kind");
}

// matrix[x := x_term, y_i := params[i-1]]
inline Formula instantiate(const Formula& matrix, const Term& x_term,
                           const std::vector<Term>& params) {
  std::vector<Term> env;
  env.reserve(params.size() + 1);
  env.push_back(x_term);
  for (const auto& p : params) env.push_back(p);
  return subst_vars(matrix, env);
}

// ---------------------------------------------------------------------------
// Signature: interned Skolem functions plus the predicate vocabulary.
//
// Interning is structural: two declarations whose matrices are identical up
// to bound-variable names (Var indices erase names) yield the same id. The
// first declaration's name becomes the display alias.
// ---------------------------------------------------------------------------

struct SkolemFunction {
  Formula matrix;       // one free Var 0 (the quantified slot) + params 1..arity
  std::uint32_t arity;
  std::uint32_t rank;   // 1 + rank of matrix
  std::string alias;
};

struct Predicate {
  std::string name;
  std::uint32_t arity;
  std::function<bool(const std::vector<std::uint64_t>&)> holds;
};

class Signature;

inline std::uint32_t term_rank(const Signature& sig, const Term& t);
inline std::uint32_t formula_rank(const Signature& sig, const Formula& f);

class Signature {
 public:
  Signature() {
    preds_.push_back({"=", 2, [](const std::vector<std::uint64_t>& a) {
                        return a[0] == a[1];
                      }});
    preds_.push_back({"<", 2, [](const std::vector<std::uint64_t>& a) {
                        return a[0] < a[1];
                      }});
    preds_.push_back({"<=", 2, [](const std::vector<std::uint64_t>& a) {
                        return a[0] <= a[1];
                      }});
  }

  SkolemId intern(const Formula& matrix, std::uint32_t arity,
                  const std::string& alias_hint = {}) {
    std::string key = std::to_string(arity) + "|" + serialize(matrix);
    auto it = intern_.find(key);
    if (it != intern_.end()) return it->second;
    SkolemId id = static_cast<SkolemId>(fns_.size());
    std::string alias = alias_hint.empty() ? "f" + std::to_string(id) : alias_hint;
    std::uint32_t rank = 1 + formula_rank(*this, matrix);
    fns_.push_back({matrix, arity, rank, std::move(alias)});
    intern_.emplace(std::move(key), id);
    return id;
  }

  const SkolemFunction& fn(SkolemId id) const {
    if (id >= fns_.size()) throw InternalError("unknown skolem id");
    return fns_[id];
  }

  std::size_t fn_count() const { return fns_.size(); }

  PredId register_predicate(std::string name, std::uint32_t arity,
                            std::function<bool(const std::vector<std::uint64_t>&)> holds) {
    for (const auto& p : preds_)
      if (p.name == name) throw InternalError("predicate registered twice: " + name);
    preds_.push_back({std::move(name), arity, std::move(holds)});
    return static_cast<PredId>(preds_.size() - 1);
  }

  const Predicate& predicate(PredId id) const {
    if (id >= preds_.size()) throw InternalError("unknown predicate id");
    return preds_[id];
  }

  std::optional<PredId> find_predicate(std::string_view name) const {
    for (std::size_t i = 0; i < preds_.size(); ++i)
      if (preds_[i].name == name) return static_cast<PredId>(i);
    return std::nullopt;
  }

  std::size_t predicate_count() const { return preds_.size(); }

 private:
  // Compact structural key; Var indices make it invariant under renaming.
  static void serialize(const Term& t, std::string& out) {
    switch (t->kind) {
      case TermKind::Zero:
        out += 'z';
        return;
      case TermKind::Var:
        out += 'v';
        out += std::to_string(t->var);
        return;
      case TermKind::Succ:
        out += 's';
        serialize(t->args[0], out);
        return;
      case TermKind::App:
        out += 'a';
        out += std::to_string(t->fn);
        out += '(';
        for (const auto& a : t->args) serialize(a, out);
        out += ')';
        return;
    }
  }

  static void serialize(const Formula& f, std::string& out) {
    switch (f->kind) {
      case FormulaKind::Atom:
      case FormulaKind::NegAtom:
        out += f->kind == FormulaKind::Atom ? 'A' : 'N';
        out += std::to_string(f->pred);
        out += '(';
        for (const auto& a : f->args) serialize(a, out);
        out += ')';
        return;
      case FormulaKind::And:
      case FormulaKind::Or:
        out += f->kind == FormulaKind::And ? '&' : '|';
        out += '(';
        serialize(f->lhs, out);
        serialize(f->rhs, out);
        out += ')';
        return;
    }
  }

  static std::string serialize(const Formula& f) {
    std::string out;
    serialize(f, out);
    return out;
  }

  std::vector<SkolemFunction> fns_;
  std::map<std::string, SkolemId> intern_;
  std::vector<Predicate> preds_;
};

// Rank: numerals and variables rank 0; an application's rank is the max of
// its function's rank and its arguments'; a function's rank is one more than
// its matrix's.
inline std::uint32_t term_rank(const Signature& sig, const Term& t) {
  switch (t->kind) {
    case TermKind::Zero:
    case TermKind::Var:
      return 0;
    case TermKind::Succ:
      return term_rank(sig, t->args[0]);
    case TermKind::App: {
      std::uint32_t r = sig.fn(t->fn).rank;
      for (const auto& a : t->args) r = std::max(r, term_rank(sig, a));
      return r;
    }
  }
  throw InternalError("term_rank: bad term kind");
}

inline std::uint32_t formula_rank(const Signature& sig, const Formula& f) {
  switch (f->kind) {
    case FormulaKind::Atom:
    case FormulaKind::NegAtom: {
      std::uint32_t r = 0;
      for (const auto& a : f->args) r = std::max(r, term_rank(sig, a));
      return r;
    }
    case FormulaKind::And:
    case FormulaKind::Or:
      return std::max(formula_rank(sig, f->lhs), formula_rank(sig, f->rhs));
  }
  throw InternalError("formula_rank: bad formula kind");
}

// ---------------------------------------------------------------------------
// Canonical terms: a Skolem function applied to numerals. These are the only
// terms a substitution maps.
// ---------------------------------------------------------------------------

struct CanonicalTerm {
  SkolemId fn;
  std::vector<std::uint64_t> args;
  auto operator<=>(const CanonicalTerm&) const = default;
};

inline std::optional<CanonicalTerm> as_canonical(const Term& t) {
  if (t->kind != TermKind::App) return std::nullopt;
  CanonicalTerm ct{t->fn, {}};
  ct.args.reserve(t->args.size());
  for (const auto& a : t->args) {
    auto n = numeral_value(a);
    if (!n) return std::nullopt;
    ct.args.push_back(*n);
  }
  return ct;
}

inline Term canonical_to_term(const CanonicalTerm& ct) {
  std::vector<Term> args;
  args.reserve(ct.args.size());
  for (auto n : ct.args) args.push_back(t_num(n));
  return t_app(ct.fn, std::move(args));
}

// ---------------------------------------------------------------------------
// Rendering. Numerals print in decimal; Skolem applications print with the
// self-describing head alias_{exists x. matrix}.
// ---------------------------------------------------------------------------

inline std::string term_to_string(const Signature& sig, const Term& t);
inline std::string formula_to_string(const Signature& sig, const Formula& f);

inline std::string var_name(std::uint32_t index) {
  return index == 0 ? "x" : "y" + std::to_string(index);
}

inline std::string skolem_head(const Signature& sig, SkolemId id) {
  const auto& fn = sig.fn(id);
  return fn.alias + "_{exists x. " + formula_to_string(sig, fn.matrix) + "}";
}

inline std::string term_to_string(const Signature& sig, const Term& t) {
  if (auto n = numeral_value(t)) return std::to_string(*n);
  switch (t->kind) {
    case TermKind::Zero:
      return "0";
    case TermKind::Var:
      return var_name(t->var);
    case TermKind::Succ:
      return "S " + term_to_string(sig, t->args[0]);
    case TermKind::App: {
      std::string out = skolem_head(sig, t->fn) + "(";
      for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (i) out += ", ";
        out += term_to_string(sig, t->args[i]);
      }
      out += ")";
      return out;
    }
  }
  throw InternalError("term_to_string: bad term kind");
}

namespace detail {

inline std::string atom_to_string(const Signature& sig, const FormulaNode& f) {
  const auto& p = sig.predicate(f.pred);
  if (f.pred <= kLe) {
    return term_to_string(sig, f.args[0]) + " " + p.name + " " +
           term_to_string(sig, f.args[1]);
  }
  std::string out = p.name + "(";
  for (std::size_t i = 0; i < f.args.size(); ++i) {
    if (i) out += ", ";
    out += term_to_string(sig, f.args[i]);
  }
  return out + ")";
}

}  // namespace detail

// Minimal-parenthesis rendering for the right-associative grammar where &
// binds tighter than |. Re-parsing the output reproduces the exact tree.
inline std::string formula_to_string(const Signature& sig, const Formula& f) {
  auto wrap = [&](const Formula& g, bool parens) {
    std::string s = formula_to_string(sig, g);
    return parens ? "(" + s + ")" : s;
  };
  switch (f->kind) {
    case FormulaKind::Atom:
      return detail::atom_to_string(sig, *f);
    case FormulaKind::NegAtom:
      return "!" + detail::atom_to_string(sig, *f);
    case FormulaKind::And:
      return wrap(f->lhs, f->lhs->kind == FormulaKind::And ||
                              f->lhs->kind == FormulaKind::Or) +
             " & " + wrap(f->rhs, f->rhs->kind == FormulaKind::Or);
    case FormulaKind::Or:
      return wrap(f->lhs, f->lhs->kind == FormulaKind::Or) + " | " +
             formula_to_string(sig, f->rhs);
  }
  throw InternalError("formula_to_string: bad formula kind");
}

// Largest numeric weight mentioned anywhere in a term or formula: numerals
// count their value, successor chains their length. Used for scan caps.
inline std::uint64_t num_weight(const Term& t) {
  switch (t->kind) {
    case TermKind::Zero:
    case TermKind::Var:
      return 0;
    case TermKind::Succ:
      return 1 + num_weight(t->args[0]);
    case TermKind::App: {
      std::uint64_t w = 0;
      for (const auto& a : t->args) w = std::max(w, num_weight(a));
      return w;
    }
  }
  return 0;
}

inline std::uint64_t num_weight(const Formula& f) {
  switch (f->kind) {
    case FormulaKind::Atom:
    case FormulaKind::NegAtom: {
      std::uint64_t w = 0;
      for (const auto& a : f->args) w = std::max(w, num_weight(a));
      return w;
    }
    case FormulaKind::And:
    case FormulaKind::Or:
      return std::max(num_weight(f->lhs), num_weight(f->rhs));
  }
  return 0;
}

}  // namespace eps
