#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "syntax.hpp"

namespace eps {

// A committed value: either a numeral or the default marker "?".
struct Value {
  bool is_num = false;
  std::uint64_t n = 0;
  static Value unknown() { return {}; }
  static Value num(std::uint64_t v) { return {true, v}; }
  friend bool operator==(const Value&, const Value&) = default;
};

inline std::string value_to_string(const Value& v) {
  return v.is_num ? std::to_string(v.n) : "?";
}

// Finite partial map from canonical terms to values. Updates go through
// with(), which overrides an existing entry (later commitments win).
class EpsSubstitution {
 public:
  bool contains(const CanonicalTerm& ct) const { return map_.count(ct) > 0; }

  std::optional<Value> lookup(const CanonicalTerm& ct) const {
    auto it = map_.find(ct);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  EpsSubstitution with(CanonicalTerm ct, Value v) const {
    EpsSubstitution out = *this;
    out.map_[std::move(ct)] = v;
    return out;
  }

  void set(CanonicalTerm ct, Value v) { map_[std::move(ct)] = v; }

  const std::map<CanonicalTerm, Value>& entries() const { return map_; }
  std::size_t size() const { return map_.size(); }

  friend bool operator==(const EpsSubstitution&, const EpsSubstitution&) = default;

 private:
  std::map<CanonicalTerm, Value> map_;
};

// Keep only entries whose key term has rank <= max_rank. A canonical term's
// rank is its head function's.
inline EpsSubstitution restrict_rank(const Signature& sig,
                                     const EpsSubstitution& s,
                                     std::uint32_t max_rank) {
  EpsSubstitution out;
  for (const auto& [ct, v] : s.entries())
    if (sig.fn(ct.fn).rank <= max_rank) out.set(ct, v);
  return out;
}

// Largest numeral mentioned by the substitution, over both domain arguments
// and committed values.
inline std::uint64_t max_numeral(const EpsSubstitution& s) {
  std::uint64_t m = 0;
  for (const auto& [ct, v] : s.entries()) {
    for (auto a : ct.args) m = std::max(m, a);
    if (v.is_num) m = std::max(m, v.n);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Term evaluation.
//
// Numerals and successor chains evaluate pointwise. An application first
// evaluates its arguments; if any stays non-numeral the application is
// returned with evaluated arguments, otherwise the canonical term is looked
// up: a committed numeral evaluates to it, a committed "?" evaluates to the
// default 0, and an uncommitted term is returned as itself (Partial mode) or
// defaults to 0 (Defaulted mode, the standard extension).
// ---------------------------------------------------------------------------

enum class EvalMode { Partial, Defaulted };

inline constexpr std::uint64_t kEvalBudget = 1'000'000;

namespace detail {

inline Term seval_rec(const EpsSubstitution& s, const Term& t, EvalMode mode,
                      std::uint64_t& budget) {
  if (budget-- == 0) throw FuelExhausted("term evaluation");
  switch (t->kind) {
    case TermKind::Zero:
      return t;
    case TermKind::Var:
      throw InternalError("seval: open term");
    case TermKind::Succ:
      return t_succ(seval_rec(s, t->args[0], mode, budget));
    case TermKind::App: {
      std::vector<Term> args;
      args.reserve(t->args.size());
      bool canonical = true;
      CanonicalTerm ct{t->fn, {}};
      for (const auto& a : t->args) {
        Term ea = seval_rec(s, a, mode, budget);
        if (auto n = numeral_value(ea); n && canonical)
          ct.args.push_back(*n);
        else
          canonical = false;
        args.push_back(std::move(ea));
      }
      if (!canonical) return t_app(t->fn, std::move(args));
      if (auto v = s.lookup(ct)) return t_num(v->is_num ? v->n : 0);
      if (mode == EvalMode::Defaulted) return t_num(0);
      return t_app(t->fn, std::move(args));
    }
  }
  throw InternalError("seval: bad term kind");
}

}  // namespace detail

inline Term seval(const EpsSubstitution& s, const Term& t,
                  EvalMode mode = EvalMode::Partial) {
  std::uint64_t budget = kEvalBudget;
  return detail::seval_rec(s, t, mode, budget);
}

inline std::optional<std::uint64_t> seval_num(const EpsSubstitution& s,
                                              const Term& t,
                                              EvalMode mode = EvalMode::Partial) {
  return numeral_value(seval(s, t, mode));
}

// Evaluate every atom argument. Under Partial mode uncommitted canonical
// subterms survive; everything committed disappears into numerals.
inline Formula reduce_formula(const EpsSubstitution& s, const Formula& f,
                              EvalMode mode = EvalMode::Partial) {
  switch (f->kind) {
    case FormulaKind::Atom:
    case FormulaKind::NegAtom: {
      std::vector<Term> args;
      args.reserve(f->args.size());
      for (const auto& a : f->args) args.push_back(seval(s, a, mode));
      return f->kind == FormulaKind::Atom ? f_atom(f->pred, std::move(args))
                                          : f_neg_atom(f->pred, std::move(args));
    }
    case FormulaKind::And:
      return f_and(reduce_formula(s, f->lhs, mode),
                   reduce_formula(s, f->rhs, mode));
    case FormulaKind::Or:
      return f_or(reduce_formula(s, f->lhs, mode),
                  reduce_formula(s, f->rhs, mode));
  }
  throw InternalError("reduce_formula: bad formula kind");
}

// ---------------------------------------------------------------------------
// Three-valued satisfaction (strong Kleene). An atom is decided exactly when
// all its arguments evaluate to numerals.
// ---------------------------------------------------------------------------

enum class Truth : std::uint8_t { False, Unknown, True };

inline Truth truth_value(const Signature& sig, const EpsSubstitution& s,
                         const Formula& f, EvalMode mode = EvalMode::Partial) {
  switch (f->kind) {
    case FormulaKind::Atom:
    case FormulaKind::NegAtom: {
      std::vector<std::uint64_t> vals;
      vals.reserve(f->args.size());
      for (const auto& a : f->args) {
        auto n = seval_num(s, a, mode);
        if (!n) return Truth::Unknown;
        vals.push_back(*n);
      }
      bool holds = sig.predicate(f->pred).holds(vals);
      if (f->kind == FormulaKind::NegAtom) holds = !holds;
      return holds ? Truth::True : Truth::False;
    }
    case FormulaKind::And: {
      Truth a = truth_value(sig, s, f->lhs, mode);
      if (a == Truth::False) return Truth::False;
      Truth b = truth_value(sig, s, f->rhs, mode);
      if (b == Truth::False) return Truth::False;
      if (a == Truth::True && b == Truth::True) return Truth::True;
      return Truth::Unknown;
    }
    case FormulaKind::Or: {
      Truth a = truth_value(sig, s, f->lhs, mode);
      if (a == Truth::True) return Truth::True;
      Truth b = truth_value(sig, s, f->rhs, mode);
      if (b == Truth::True) return Truth::True;
      if (a == Truth::False && b == Truth::False) return Truth::False;
      return Truth::Unknown;
    }
  }
  throw InternalError("truth_value: bad formula kind");
}

inline bool models(const Signature& sig, const EpsSubstitution& s,
                   const Formula& f) {
  return truth_value(sig, s, f) == Truth::True;
}

inline bool decides(const Signature& sig, const EpsSubstitution& s,
                    const Formula& f) {
  return truth_value(sig, s, f) != Truth::Unknown;
}

// Total semantics: every uncommitted canonical term reads as 0.
inline bool models_defaulted(const Signature& sig, const EpsSubstitution& s,
                             const Formula& f) {
  return truth_value(sig, s, f, EvalMode::Defaulted) == Truth::True;
}

// ---------------------------------------------------------------------------
// Uncommitted canonical terms blocking a formula's evaluation, in
// leftmost-innermost order, first occurrence kept.
//
// An application whose arguments all evaluate to numerals names a canonical
// term; if that term is uncommitted it is collected (after its arguments'
// own blockers, which is what makes the order innermost).
// ---------------------------------------------------------------------------

namespace detail {

inline void unev_term(const EpsSubstitution& s, const Term& t,
                      std::vector<Term>& out, std::uint64_t& budget) {
  if (budget-- == 0) throw FuelExhausted("blocker collection");
  switch (t->kind) {
    case TermKind::Zero:
      return;
    case TermKind::Var:
      throw InternalError("unev: open term");
    case TermKind::Succ:
      unev_term(s, t->args[0], out, budget);
      return;
    case TermKind::App: {
      CanonicalTerm ct{t->fn, {}};
      bool canonical = true;
      for (const auto& a : t->args) {
        unev_term(s, a, out, budget);
        if (!canonical) continue;
        if (auto n = numeral_value(seval(s, a))) {
          ct.args.push_back(*n);
        } else {
          canonical = false;
        }
      }
      if (canonical && !s.contains(ct)) {
        Term named = canonical_to_term(ct);
        for (const auto& seen : out)
          if (term_eq(seen, named)) return;
        out.push_back(std::move(named));
      }
      return;
    }
  }
}

inline void unev_formula(const EpsSubstitution& s, const Formula& f,
                         std::vector<Term>& out, std::uint64_t& budget) {
  switch (f->kind) {
    case FormulaKind::Atom:
    case FormulaKind::NegAtom:
      for (const auto& a : f->args) unev_term(s, a, out, budget);
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
      unev_formula(s, f->lhs, out, budget);
      unev_formula(s, f->rhs, out, budget);
      return;
  }
}

}  // namespace detail

inline std::vector<Term> unev(const EpsSubstitution& s, const Formula& f) {
  std::vector<Term> out;
  std::uint64_t budget = kEvalBudget;
  detail::unev_formula(s, f, out, budget);
  return out;
}

// "term := value" lines sorted by rendered term, the canonical external form
// of a substitution.
inline std::vector<std::string> substitution_lines(const Signature& sig,
                                                   const EpsSubstitution& s) {
  std::vector<std::string> lines;
  lines.reserve(s.size());
  for (const auto& [ct, v] : s.entries())
    lines.push_back(term_to_string(sig, canonical_to_term(ct)) +
                    " := " + value_to_string(v));
  std::sort(lines.begin(), lines.end());
  return lines;
}

}  // namespace eps
