#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subst.hpp"
#include "syntax.hpp"

namespace eps {

// ---------------------------------------------------------------------------
// Critical formulas. Each names one key term (a Skolem function over the
// instance's parameters) whose committed value is meant to realize it.
//
//   Existence    phi[aux] -> phi[key]            key fn: the declared fn
//   Induction    phi[0] & !phi[aux] -> psi[key]  key fn matrix: phi[x] & !phi[Sx]
//   Predecessor  !(aux = 0) -> aux = S key       key fn matrix: y1 = S x
//
// aux is the witness / bound / subject respectively; for Predecessor it also
// serves as the key function's one parameter.
// ---------------------------------------------------------------------------

enum class CriticalKind : std::uint8_t { Existence, Induction, Predecessor };

struct CriticalFormula {
  CriticalKind kind;
  SkolemId key_fn;
  SkolemId hyp_fn;           // Induction: the stated fn; otherwise == key_fn
  std::vector<Term> params;  // arguments of the key term
  Term aux;
};

inline CriticalFormula make_existence(const Signature& sig, SkolemId fn,
                                      std::vector<Term> params, Term witness) {
  if (params.size() != sig.fn(fn).arity)
    throw InternalError("existence: arity mismatch");
  return {CriticalKind::Existence, fn, fn, std::move(params),
          std::move(witness)};
}

inline CriticalFormula make_induction(Signature& sig, SkolemId phi_fn,
                                      std::vector<Term> params, Term bound) {
  const auto& phi = sig.fn(phi_fn);
  if (params.size() != phi.arity)
    throw InternalError("induction: arity mismatch");
  // matrix[x := S x], parameters untouched
  std::vector<Term> env;
  env.push_back(t_succ(t_var(0)));
  for (std::uint32_t i = 1; i <= phi.arity; ++i) env.push_back(t_var(i));
  Formula step = f_and(phi.matrix, negate(subst_vars(phi.matrix, env)));
  SkolemId key = sig.intern(step, phi.arity, phi.alias + "_stop");
  return {CriticalKind::Induction, key, phi_fn, std::move(params),
          std::move(bound)};
}

inline CriticalFormula make_predecessor(Signature& sig, Term subject) {
  Formula m = f_atom(kEq, t_var(1), t_succ(t_var(0)));
  SkolemId key = sig.intern(m, 1, "pd");
  return {CriticalKind::Predecessor, key, key, {subject}, std::move(subject)};
}

// ---------------------------------------------------------------------------
// Component formulas
// ---------------------------------------------------------------------------

// Key function's matrix instantiated at z over this formula's parameters.
inline Formula key_matrix_at(const Signature& sig, const CriticalFormula& f,
                             const Term& z) {
  return instantiate(sig.fn(f.key_fn).matrix, z, f.params);
}

inline Term key_term(const CriticalFormula& f) {
  return t_app(f.key_fn, f.params);
}

// Key term with parameters evaluated under a substitution.
inline Term key_term_at(const EpsSubstitution& s, const CriticalFormula& f) {
  std::vector<Term> ps;
  ps.reserve(f.params.size());
  for (const auto& p : f.params) ps.push_back(seval(s, p));
  return t_app(f.key_fn, std::move(ps));
}

inline std::optional<CanonicalTerm> key_canonical_at(const EpsSubstitution& s,
                                                     const CriticalFormula& f) {
  return as_canonical(key_term_at(s, f));
}

inline Formula hypothesis(const Signature& sig, const CriticalFormula& f) {
  switch (f.kind) {
    case CriticalKind::Existence:
      return instantiate(sig.fn(f.hyp_fn).matrix, f.aux, f.params);
    case CriticalKind::Induction: {
      const Formula& m = sig.fn(f.hyp_fn).matrix;
      return f_and(instantiate(m, t_zero(), f.params),
                   negate(instantiate(m, f.aux, f.params)));
    }
    case CriticalKind::Predecessor:
      return f_neg_atom(kEq, f.aux, t_zero());
  }
  throw InternalError("hypothesis: bad kind");
}

inline Formula conclusion(const Signature& sig, const CriticalFormula& f) {
  return key_matrix_at(sig, f, key_term(f));
}

inline Formula as_implication(const Signature& sig, const CriticalFormula& f) {
  return f_or(negate(hypothesis(sig, f)), conclusion(sig, f));
}

// Evaluate the stored component terms; the record keeps its shape.
inline CriticalFormula reduce_critical(const EpsSubstitution& s,
                                       const CriticalFormula& f) {
  CriticalFormula out = f;
  for (auto& p : out.params) p = seval(s, p);
  out.aux = seval(s, out.aux);
  return out;
}

inline std::uint32_t crit_rank(const Signature& sig, const CriticalFormula& f) {
  return formula_rank(sig, as_implication(sig, f));
}

inline std::string crit_to_string(const Signature& sig,
                                  const CriticalFormula& f) {
  std::string head;
  switch (f.kind) {
    case CriticalKind::Existence:
      head = "existence";
      break;
    case CriticalKind::Induction:
      head = "induction";
      break;
    case CriticalKind::Predecessor:
      head = "pred";
      break;
  }
  return head + " " + term_to_string(sig, key_term(f)) + " / " +
         term_to_string(sig, f.aux);
}

// ---------------------------------------------------------------------------
// Minimal witnesses
// ---------------------------------------------------------------------------

// phi[v] & !phi[0] & ... & !phi[v-1], folded left from phi[v].
inline Formula min_witness_formula(const Signature& sig, SkolemId fn,
                                   const std::vector<Term>& params,
                                   std::uint64_t v) {
  const Formula& m = sig.fn(fn).matrix;
  Formula acc = instantiate(m, t_num(v), params);
  for (std::uint64_t u = 0; u < v; ++u)
    acc = f_and(acc, negate(instantiate(m, t_num(u), params)));
  return acc;
}

// Least u <= cap with the key matrix true at u, by walking upward through
// false instances. Blocked reports the first undecided instance: no larger u
// can be a least witness past one, because its minimal-witness formula keeps
// the undecided instance as a negated conjunct.
struct ScanResult {
  enum Kind : std::uint8_t { Witness, Blocked, AllFalse } kind;
  std::uint64_t u = 0;
};

inline ScanResult scan_least_witness(const Signature& sig,
                                     const EpsSubstitution& s, SkolemId fn,
                                     const std::vector<Term>& params,
                                     std::uint64_t cap,
                                     EvalMode mode = EvalMode::Partial) {
  const Formula& m = sig.fn(fn).matrix;
  for (std::uint64_t u = 0; u <= cap; ++u) {
    Truth t = truth_value(sig, s, instantiate(m, t_num(u), params), mode);
    if (t == Truth::True) return {ScanResult::Witness, u};
    if (t == Truth::Unknown) return {ScanResult::Blocked, u};
  }
  return {ScanResult::AllFalse, 0};
}

// Scan cap: beyond every numeral the substitution or the formula mentions,
// built-in atom truth is constant in the scanned value, so two spare steps
// past that bound decide AllFalse soundly. Registered predicates get the
// same bound as a documented heuristic.
inline std::uint64_t scan_cap(const Signature& sig, const EpsSubstitution& s,
                              const CriticalFormula& f) {
  std::uint64_t hint = 0;
  if (auto n = seval_num(s, f.aux, EvalMode::Defaulted)) hint = *n;
  return std::max({hint, max_numeral(s), num_weight(as_implication(sig, f))}) +
         2;
}

// Least value realizing the key matrix under defaulted semantics. Defined
// whenever the hypothesis holds under defaulted semantics:
//   Existence:   the witness's value realizes it, so a least one is <= that;
//   Induction:   phi[0] & !phi[bound] forces a stop below the bound's value;
//   Predecessor: the subject is nonzero and the matrix pins value - 1.
inline std::optional<std::uint64_t> find_minimal_witness(
    const Signature& sig, const EpsSubstitution& s, const CriticalFormula& f) {
  if (f.kind == CriticalKind::Predecessor) {
    auto n = seval_num(s, f.aux, EvalMode::Defaulted);
    if (!n || *n == 0) return std::nullopt;
    return *n - 1;
  }
  ScanResult r = scan_least_witness(sig, s, f.key_fn, f.params,
                                    scan_cap(sig, s, f), EvalMode::Defaulted);
  if (r.kind != ScanResult::Witness) return std::nullopt;
  return r.u;
}

// ---------------------------------------------------------------------------
// Substitution-level checks
// ---------------------------------------------------------------------------

// Every committed numeral is the least witness of its own term's matrix
// under defaulted semantics. Entries committed to "?" carry no claim.
inline bool is_correct(const Signature& sig, const EpsSubstitution& s) {
  for (const auto& [ct, v] : s.entries()) {
    if (!v.is_num) continue;
    std::vector<Term> params;
    params.reserve(ct.args.size());
    for (auto a : ct.args) params.push_back(t_num(a));
    if (!models_defaulted(sig, s,
                          min_witness_formula(sig, ct.fn, params, v.n)))
      return false;
  }
  return true;
}

// The substitution settles every critical formula under defaulted semantics.
inline bool is_solving(const Signature& sig, const EpsSubstitution& s,
                       const std::vector<CriticalFormula>& crits) {
  for (const auto& f : crits)
    if (!models_defaulted(sig, s, as_implication(sig, f))) return false;
  return true;
}

}  // namespace eps
