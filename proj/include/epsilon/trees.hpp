#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "critical.hpp"
#include "injury.hpp"
#include "subst.hpp"
#include "syntax.hpp"

namespace eps {

// ---------------------------------------------------------------------------
// Node labels. A node either asks for one canonical term's value (ETerm),
// carries a critical formula still in need of settling (CForm), or closes a
// branch (Leaf).
// ---------------------------------------------------------------------------

struct NodeLabel {
  enum class Kind : std::uint8_t { ETerm, CForm, Leaf } kind = Kind::Leaf;
  Term term;                            // ETerm: canonical
  std::optional<CriticalFormula> form;  // CForm

  static NodeLabel leaf() { return {}; }
  static NodeLabel eterm(Term t) { return {Kind::ETerm, std::move(t), {}}; }
  static NodeLabel cform(CriticalFormula f) {
    return {Kind::CForm, nullptr, std::move(f)};
  }
};

enum class NodeStatus : std::uint8_t { Interior, Leaf, Invalid };

struct TowerConfig {
  std::uint64_t fuel = 1'000'000;  // budget for label searches and lifts
};

namespace detail {

// Maximal application occurrences: applications not nested inside another.
inline void max_apps(const Term& t, std::vector<Term>& out) {
  switch (t->kind) {
    case TermKind::App:
      out.push_back(t);
      return;
    case TermKind::Succ:
      max_apps(t->args[0], out);
      return;
    default:
      return;
  }
}

inline void max_apps(const Formula& f, std::vector<Term>& out) {
  switch (f->kind) {
    case FormulaKind::Atom:
    case FormulaKind::NegAtom:
      for (const auto& a : f->args) max_apps(a, out);
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
      max_apps(f->lhs, out);
      max_apps(f->rhs, out);
      return;
  }
}

inline bool contains_term(const Term& hay, const Term& needle) {
  if (term_eq(hay, needle)) return true;
  for (const auto& a : hay->args)
    if (contains_term(a, needle)) return true;
  return false;
}

// An application occurrence neither equal to the key nor built over it.
inline bool has_stray_apps(const Formula& f, const Term& key) {
  std::vector<Term> occs;
  max_apps(f, occs);
  for (const auto& o : occs)
    if (!term_eq(o, key) && !contains_term(o, key)) return true;
  return false;
}

// Leftmost-innermost canonical application other than the key.
inline std::optional<Term> innermost_canonical(const Term& t, const Term& key) {
  switch (t->kind) {
    case TermKind::Zero:
    case TermKind::Var:
      return std::nullopt;
    case TermKind::Succ:
      return innermost_canonical(t->args[0], key);
    case TermKind::App: {
      for (const auto& a : t->args)
        if (auto r = innermost_canonical(a, key)) return r;
      if (as_canonical(t) && !term_eq(t, key)) return t;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

inline std::optional<Term> innermost_canonical(const Formula& f,
                                               const Term& key) {
  switch (f->kind) {
    case FormulaKind::Atom:
    case FormulaKind::NegAtom:
      for (const auto& a : f->args)
        if (auto r = innermost_canonical(a, key)) return r;
      return std::nullopt;
    case FormulaKind::And:
    case FormulaKind::Or:
      if (auto r = innermost_canonical(f->lhs, key)) return r;
      return innermost_canonical(f->rhs, key);
  }
  return std::nullopt;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The tower of trees the construction walks. Tree 1 is what the driver
// searches; tree N+1 hands out the critical formulas by depth and bottoms
// out at depth K; each tree in between is labeled against the one above it.
//
// Every tree folds its own substitution along a branch: the branch value at
// a node is recorded for the node label's term (an ETerm's own term, a
// CForm's key term), later entries overriding earlier ones.
// ---------------------------------------------------------------------------

class Tower {
 public:
  Tower(const Signature& sig, std::vector<CriticalFormula> crits,
        TowerConfig cfg = {})
      : sig_(sig), crits_(std::move(crits)), cfg_(cfg) {
    std::uint32_t n = 1;
    for (const auto& f : crits_) n = std::max(n, crit_rank(sig_, f));
    top_rank_ = n;
    depth_cap_ = crits_.size();
  }

  const Signature& sig() const { return sig_; }
  const std::vector<CriticalFormula>& crits() const { return crits_; }
  std::uint32_t top_rank() const { return top_rank_; }          // N
  std::uint32_t top_level() const { return top_rank_ + 1; }     // N + 1
  std::uint64_t depth_cap() const { return depth_cap_; }        // K

  const std::vector<std::string>& events() const { return events_; }

  // -------------------------------------------------------------------------
  // Substitution folded along a branch.
  // -------------------------------------------------------------------------
  EpsSubstitution subst_at(std::uint32_t level, const Path& p) {
    if (p.empty()) return {};
    auto key = std::make_pair(level, p);
    if (auto it = subst_memo_.find(key); it != subst_memo_.end())
      return it->second;
    Path parent(p.begin(), p.end() - 1);
    EpsSubstitution s = subst_at(level, parent);
    const NodeLabel& l = label(level, parent);
    Term t;
    switch (l.kind) {
      case NodeLabel::Kind::ETerm:
        t = l.term;
        break;
      case NodeLabel::Kind::CForm:
        t = key_term_at(s, *l.form);
        break;
      case NodeLabel::Kind::Leaf:
        throw InternalError("branch below a leaf");
    }
    const Label& b = p.back();
    if (auto ct = as_canonical(t)) {
      s.set(*ct, b.is_q ? Value::unknown() : Value::num(b.n));
    } else if (!b.is_q) {
      throw InternalError("numeral branch at a blocked key term");
    }
    subst_memo_.emplace(std::move(key), s);
    return s;
  }

  // -------------------------------------------------------------------------
  // Node status: a node is a leaf intrinsically (nothing left to settle) or
  // by truncation (its lift image reaches a leaf above). Nodes below a leaf
  // are outside the tree.
  // -------------------------------------------------------------------------
  NodeStatus status(std::uint32_t level, const Path& p) {
    if (level == top_level()) {
      if (p.size() > depth_cap_) return NodeStatus::Invalid;
      return p.size() == depth_cap_ ? NodeStatus::Leaf : NodeStatus::Interior;
    }
    if (!p.empty()) {
      Path parent(p.begin(), p.end() - 1);
      if (status(level, parent) != NodeStatus::Interior)
        return NodeStatus::Invalid;
    }
    return leaf_here(level, p) ? NodeStatus::Leaf : NodeStatus::Interior;
  }

  bool is_leaf(std::uint32_t level, const Path& p) {
    return status(level, p) == NodeStatus::Leaf;
  }

  // -------------------------------------------------------------------------
  // Labels. The top tree hands out critical formulas by depth; every other
  // tree labels a node from the first node of the tree above that the node's
  // substitution leaves unsettled.
  // -------------------------------------------------------------------------
  const NodeLabel& label(std::uint32_t level, const Path& p) {
    auto key = std::make_pair(level, p);
    if (auto it = label_memo_.find(key); it != label_memo_.end())
      return it->second;
    NodeLabel l = level == top_level() ? top_label(p) : compute_label(level, p);
    return label_memo_.emplace(std::move(key), std::move(l)).first->second;
  }

  // -------------------------------------------------------------------------
  // settles: does this substitution leave nothing to do at the labeled node
  // above? Term nodes settle once committed (any value) or when their rank
  // exceeds the level. Formula nodes of rank within the level settle once
  // their key is committed and the recorded implication holds; others settle
  // when the zero-instance implication holds outright or fails with a
  // reachable witness.
  // -------------------------------------------------------------------------
  bool settles(std::uint32_t level, const EpsSubstitution& s,
               const Path& beta) {
    const NodeLabel& l = label(level + 1, beta);
    switch (l.kind) {
      case NodeLabel::Kind::Leaf:
        throw InternalError("settles asked at a leaf");
      case NodeLabel::Kind::ETerm: {
        if (term_rank(sig_, l.term) > level) return true;
        auto ct = as_canonical(l.term);
        if (!ct) throw InternalError("term label not canonical");
        return s.contains(*ct);
      }
      case NodeLabel::Kind::CForm: {
        const CriticalFormula& f = *l.form;
        if (crit_rank(sig_, f) <= level) {
          auto kc = key_canonical_at(s, f);
          if (!kc || !s.contains(*kc)) return false;
          CriticalFormula red = reduce_critical(s, f);
          Formula r = reduce_formula(s, as_implication(sig_, red));
          return models(sig_, s, r);
        }
        Formula impl0 = zero_implication(f);
        Truth tv = truth_value(sig_, s, impl0);
        if (tv == Truth::True) return true;
        if (tv != Truth::False) return false;
        ScanResult sc = scan_least_witness(sig_, s, f.key_fn, f.params,
                                           scan_cap(sig_, s, f));
        return sc.kind == ScanResult::Witness;
      }
    }
    throw InternalError("settles: bad label kind");
  }

  // -------------------------------------------------------------------------
  // Lift: push one node's substitution through the tree above, following
  // committed values at settled nodes, until an unsettled node or a leaf
  // stops the walk. A violated formula node whose key was interpolated
  // earlier on the image path backs up to that point and corrects it.
  // -------------------------------------------------------------------------
  struct LiftResult {
    Path image;
    bool hit_leaf = false;
    Trace steps;  // source: step counter as a path; image: the walk so far
  };

  const LiftResult& lift(std::uint32_t level, const Path& alpha) {
    auto key = std::make_pair(level, alpha);
    if (auto it = lift_memo_.find(key); it != lift_memo_.end())
      return it->second;
    LiftResult r = compute_lift(level, alpha);
    return lift_memo_.emplace(std::move(key), std::move(r)).first->second;
  }

 private:
  Formula zero_implication(const CriticalFormula& f) {
    return f_or(negate(hypothesis(sig_, f)),
                key_matrix_at(sig_, f, t_zero()));
  }

  NodeLabel top_label(const Path& p) {
    if (p.size() >= depth_cap_) return NodeLabel::leaf();
    return NodeLabel::cform(crits_[p.size()]);
  }

  // Truncation is decided first: it always terminates, and at a truncation
  // node a label search could have nothing left to find.
  bool leaf_here(std::uint32_t level, const Path& p) {
    const LiftResult& lr = lift(level, p);
    if (lr.hit_leaf) {
      record_leaf(level, p, "truncation");
      return true;
    }
    return label(level, p).kind == NodeLabel::Kind::Leaf;
  }

  void record_leaf(std::uint32_t level, const Path& p, const char* why) {
    std::string ev = std::string("leaf level=") + std::to_string(level) +
                     " node=" + path_to_string(p) + " cause=" + why;
    for (const auto& e : events_)
      if (e == ev) return;
    events_.push_back(ev);
  }

  // First unsettled labeled node of the tree above, in code order.
  // Returns nullopt when the tree above is provably exhausted.
  std::optional<Path> least_unsettled(std::uint32_t level,
                                      const EpsSubstitution& s) {
    if (level == top_rank_) {
      // Labels above depend only on depth, so check depths in order; the
      // all-? node is the code-least of its depth.
      for (std::uint64_t d = 0; d < depth_cap_; ++d) {
        Path probe(d, Label::q());
        if (!settles(level, s, probe)) return probe;
      }
      return std::nullopt;
    }
    if (is_leaf(level + 1, {})) return std::nullopt;
    for (std::uint64_t code = 0; code < cfg_.fuel; ++code) {
      Path p = index_to_path(code);
      NodeStatus st = status(level + 1, p);
      if (st != NodeStatus::Interior) continue;
      if (label(level + 1, p).kind == NodeLabel::Kind::Leaf) continue;
      if (!settles(level, s, p)) return p;
    }
    throw FuelExhausted("label search at level " + std::to_string(level));
  }

  NodeLabel compute_label(std::uint32_t level, const Path& p) {
    EpsSubstitution s = subst_at(level, p);
    auto beta = least_unsettled(level, s);
    if (!beta) {
      record_leaf(level, p, "exhaustion");
      return NodeLabel::leaf();
    }
    const NodeLabel& l = label(level + 1, *beta);

    if (l.kind == NodeLabel::Kind::ETerm) {
      if (term_rank(sig_, l.term) > level)
        throw InternalError("unsettled term label above the level");
      return NodeLabel::eterm(l.term);
    }

    const CriticalFormula& f = *l.form;
    if (crit_rank(sig_, f) <= level) return label_from_form(s, f);
    return label_from_high_form(s, f);
  }

  // A formula within the level: interpolate stray applications, record the
  // reduced formula while its key is uncommitted, and once the key is
  // committed re-derive the blocker or re-record for the witness rules.
  NodeLabel label_from_form(const EpsSubstitution& s,
                            const CriticalFormula& f) {
    CriticalFormula red = reduce_critical(s, f);
    Formula r = reduce_formula(s, as_implication(sig_, red));
    Term key = key_term_at(s, f);

    if (detail::has_stray_apps(r, key)) {
      auto pick = detail::innermost_canonical(r, key);
      if (!pick) throw InternalError("stray application without a canonical core");
      return NodeLabel::eterm(*pick);
    }

    auto kc = as_canonical(key);
    if (!kc) throw InternalError("blocked key term with no stray applications");
    if (!s.contains(*kc)) return NodeLabel::cform(red);

    Truth tv = truth_value(sig_, s, r);
    if (tv == Truth::True)
      throw InternalError("label requested for a settled formula node");
    if (tv == Truth::Unknown) {
      auto bs = unev(s, r);
      if (bs.empty()) throw InternalError("undecided formula with no blockers");
      return NodeLabel::eterm(bs.front());
    }
    ScanResult sc = scan_least_witness(sig_, s, f.key_fn, red.params,
                                       scan_cap(sig_, s, red));
    switch (sc.kind) {
      case ScanResult::Witness:
        return NodeLabel::cform(red);
      case ScanResult::Blocked: {
        Formula psi = key_matrix_at(sig_, red, t_num(sc.u));
        auto bs = unev(s, psi);
        if (bs.empty()) throw InternalError("blocked scan with no blockers");
        return NodeLabel::eterm(bs.front());
      }
      case ScanResult::AllFalse:
        throw InternalError("violated formula without a witness in range");
    }
    throw InternalError("unreachable");
  }

  // A formula above the level settles by its zero-instance implication; an
  // unsettled one is undecided or blocked, and contributes the blocker.
  NodeLabel label_from_high_form(const EpsSubstitution& s,
                                 const CriticalFormula& f) {
    Formula impl0 = zero_implication(f);
    Truth tv = truth_value(sig_, s, impl0);
    if (tv == Truth::True)
      throw InternalError("label requested for a settled formula node");
    if (tv == Truth::Unknown) {
      auto bs = unev(s, impl0);
      if (bs.empty()) throw InternalError("undecided implication with no blockers");
      return NodeLabel::eterm(bs.front());
    }
    ScanResult sc = scan_least_witness(sig_, s, f.key_fn, f.params,
                                       scan_cap(sig_, s, f));
    if (sc.kind != ScanResult::Blocked)
      throw InternalError("violated high formula not blocked");
    Formula psi = key_matrix_at(sig_, f, t_num(sc.u));
    auto bs = unev(s, psi);
    if (bs.empty()) throw InternalError("blocked scan with no blockers");
    return NodeLabel::eterm(bs.front());
  }

  LiftResult compute_lift(std::uint32_t level, const Path& alpha) {
    EpsSubstitution s = subst_at(level, alpha);
    LiftResult r;
    Path step_src;
    r.steps.push_back({step_src, r.image});
    for (std::uint64_t n = 0; n < cfg_.fuel; ++n) {
      if (is_leaf(level + 1, r.image)) {
        r.hit_leaf = true;
        return r;
      }
      if (!settles(level, s, r.image)) return r;
      r.image = lift_step(level, s, r.image);
      step_src.push_back(Label::num(0));
      r.steps.push_back({step_src, r.image});
    }
    throw FuelExhausted("lift at level " + std::to_string(level));
  }

  Path lift_step(std::uint32_t level, const EpsSubstitution& s,
                 const Path& p) {
    const NodeLabel& l = label(level + 1, p);
    switch (l.kind) {
      case NodeLabel::Kind::Leaf:
        throw InternalError("lift stepped onto a leaf");
      case NodeLabel::Kind::ETerm: {
        if (term_rank(sig_, l.term) <= level) {
          auto ct = as_canonical(l.term);
          auto v = ct ? s.lookup(*ct) : std::nullopt;
          if (!v) throw InternalError("settled term without a committed value");
          return extend(p, v->is_num ? Label::num(v->n) : Label::q());
        }
        // Above the level: follow its own least witness if one is visible.
        const TermNode& t = *l.term;
        std::vector<Term> args;
        for (const auto& a : t.args) args.push_back(a);
        std::uint64_t cap =
            std::max(max_numeral(s),
                     num_weight(instantiate(sig_.fn(t.fn).matrix, t_zero(),
                                            args))) +
            2;
        ScanResult sc = scan_least_witness(sig_, s, t.fn, args, cap);
        if (sc.kind == ScanResult::Witness)
          return extend(p, Label::num(sc.u));
        return extend(p, Label::q());
      }
      case NodeLabel::Kind::CForm: {
        const CriticalFormula& f = *l.form;
        if (crit_rank(sig_, f) <= level) {
          auto kc = key_canonical_at(s, f);
          auto v = kc ? s.lookup(*kc) : std::nullopt;
          if (!v) throw InternalError("settled formula without a committed key");
          return extend(p, v->is_num ? Label::num(v->n) : Label::q());
        }
        Formula impl0 = zero_implication(f);
        Truth tv = truth_value(sig_, s, impl0);
        if (tv == Truth::True) return extend(p, Label::q());
        if (tv != Truth::False)
          throw InternalError("settled high formula left undecided");
        ScanResult sc = scan_least_witness(sig_, s, f.key_fn, f.params,
                                           scan_cap(sig_, s, f));
        if (sc.kind != ScanResult::Witness)
          throw InternalError("settled high formula without a witness");
        // The witness corrects the point where this key was interpolated,
        // provided that branch still carries the default; a committed
        // numeral branch is never stepped back.
        Term key = key_term_at(s, f);
        for (std::size_t k = 0; k < p.size(); ++k) {
          Path gamma(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k));
          const NodeLabel& gl = label(level + 1, gamma);
          if (gl.kind == NodeLabel::Kind::ETerm && term_eq(gl.term, key) &&
              p[k].is_q) {
            events_.push_back("lift backtrack level=" + std::to_string(level) +
                              " to=" + path_to_string(gamma));
            return extend(gamma, Label::num(sc.u));
          }
        }
        return extend(p, Label::num(sc.u));
      }
    }
    throw InternalError("lift_step: bad label kind");
  }

  const Signature& sig_;
  std::vector<CriticalFormula> crits_;
  TowerConfig cfg_;
  std::uint32_t top_rank_ = 1;
  std::uint64_t depth_cap_ = 0;

  std::map<std::pair<std::uint32_t, Path>, NodeLabel> label_memo_;
  std::map<std::pair<std::uint32_t, Path>, EpsSubstitution> subst_memo_;
  std::map<std::pair<std::uint32_t, Path>, LiftResult> lift_memo_;
  std::vector<std::string> events_;
};

}  // namespace eps
