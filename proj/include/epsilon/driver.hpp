#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "critical.hpp"
#include "injury.hpp"
#include "subst.hpp"
#include "trees.hpp"

namespace eps {

// ---------------------------------------------------------------------------
// Path selection walks tree 1 from the root. Leaf status is decided before
// anything else: at a terminal node there may be nothing left for a label
// search to find. At a term node the branch takes the committed value (in
// practice the default). At a formula node an implication holding under the
// total standard extension passes through the key's committed value; a
// failing one commits the least witness, correcting the branch where the key
// was interpolated earlier if that branch still carries the default.
// ---------------------------------------------------------------------------

struct SelectResult {
  Path path;
  Trace trace;  // source: step counter as a path; image: the node reached
};

inline SelectResult select_path(Tower& tw) {
  const Signature& sig = tw.sig();
  SelectResult r;
  Path alpha;
  Path src;
  for (std::uint64_t n = 0;; ++n) {
    r.trace.push_back({src, alpha});
    if (n >= 1'000'000) throw FuelExhausted("path selection");
    if (tw.is_leaf(1, alpha)) {
      r.path = alpha;
      return r;
    }
    const NodeLabel& l = tw.label(1, alpha);
    EpsSubstitution s = tw.subst_at(1, alpha);
    switch (l.kind) {
      case NodeLabel::Kind::Leaf:
        throw InternalError("leaf label on an interior node");
      case NodeLabel::Kind::ETerm: {
        auto ct = as_canonical(l.term);
        auto v = ct ? s.lookup(*ct) : std::nullopt;
        alpha = extend(alpha,
                       v && v->is_num ? Label::num(v->n) : Label::q());
        break;
      }
      case NodeLabel::Kind::CForm: {
        // Judged under the total standard extension: the walk is steering
        // toward a defaulted solution, and a hypothesis blocked only by the
        // formula's own uncommitted key must not force a witness search.
        const CriticalFormula& f = *l.form;
        CriticalFormula red = reduce_critical(s, f);
        if (models_defaulted(sig, s, as_implication(sig, red))) {
          auto kc = key_canonical_at(s, f);
          auto v = kc ? s.lookup(*kc) : std::nullopt;
          alpha = extend(alpha,
                         v && v->is_num ? Label::num(v->n) : Label::q());
          break;
        }
        ScanResult sc = scan_least_witness(sig, s, f.key_fn, red.params,
                                           scan_cap(sig, s, red));
        if (sc.kind != ScanResult::Witness)
          throw InternalError("failing formula on the path has no witness");
        Term key = key_term_at(s, f);
        bool backtracked = false;
        for (std::size_t k = 0; k < alpha.size() && !backtracked; ++k) {
          Path g(alpha.begin(), alpha.begin() + static_cast<std::ptrdiff_t>(k));
          const NodeLabel& gl = tw.label(1, g);
          if (gl.kind == NodeLabel::Kind::ETerm && term_eq(gl.term, key) &&
              alpha[k].is_q) {
            alpha = extend(g, Label::num(sc.u));
            backtracked = true;
          }
        }
        if (!backtracked) alpha = extend(alpha, Label::num(sc.u));
        break;
      }
    }
    src.push_back(Label::num(0));
  }
}

// ---------------------------------------------------------------------------
// Solving composes the walk with one lift per level: the answer is the
// substitution at the level-N image of the selected path. The answer is
// always re-checked against the critical formulas with the substitution
// primitives alone; a failing check is reported, never patched.
// ---------------------------------------------------------------------------

struct SolveOutcome {
  EpsSubstitution answer;
  SelectResult selection;
  std::vector<Path> final_paths;        // final_paths[i-1]: level-i node
  std::vector<Trace> chain_traces;      // level i: lift images of the prefixes
  std::vector<Trace> lift_step_traces;  // level i: the final lift's own walk
  bool solved = false;
  std::string note;
};

inline SolveOutcome solve(Tower& tw) {
  const Signature& sig = tw.sig();
  SolveOutcome out;
  out.selection = select_path(tw);
  std::uint32_t n_levels = tw.top_rank();

  Path cur = out.selection.path;
  out.final_paths.push_back(cur);
  for (std::uint32_t i = 1; i < n_levels; ++i) {
    cur = tw.lift(i, cur).image;
    out.final_paths.push_back(cur);
  }

  for (std::uint32_t i = 1; i <= n_levels; ++i) {
    const Path& p = out.final_paths[i - 1];
    Trace chain;
    for (std::size_t j = 0; j <= p.size(); ++j) {
      Path pre(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(j));
      chain.push_back({pre, tw.lift(i, pre).image});
    }
    out.chain_traces.push_back(std::move(chain));
    out.lift_step_traces.push_back(tw.lift(i, p).steps);
  }

  out.answer = tw.subst_at(n_levels, out.final_paths[n_levels - 1]);
  if (is_solving(sig, out.answer, tw.crits()) &&
      is_correct(sig, out.answer)) {
    out.solved = true;
    return out;
  }
  out.solved = false;
  const auto& top = tw.lift(n_levels, out.final_paths[n_levels - 1]);
  EpsSubstitution alt = tw.subst_at(tw.top_level(), top.image);
  out.note = std::string("answer failed verification; top-level composition ") +
             (is_solving(sig, alt, tw.crits()) ? "solves" : "does not solve");
  return out;
}

// ---------------------------------------------------------------------------
// Diagnostics over the base tree
// ---------------------------------------------------------------------------

// Committed numeral values of the key terms taken in priority order: extend
// while the next formula's key is committed to a numeral. Agrees with the
// all-numeral prefix of the node's lift image.
inline Path committed_key_run(Tower& tw, const Path& alpha) {
  EpsSubstitution s = tw.subst_at(1, alpha);
  Path run;
  while (run.size() < tw.depth_cap()) {
    const CriticalFormula& f = tw.crits()[run.size()];
    auto kc = key_canonical_at(s, f);
    if (!kc) break;
    auto v = s.lookup(*kc);
    if (!v || !v->is_num) break;
    run.push_back(Label::num(v->n));
  }
  return run;
}

inline Path integer_prefix(const Path& p) {
  Path out;
  for (const auto& l : p) {
    if (l.is_q) break;
    out.push_back(l);
  }
  return out;
}

// Key term's value under the answer, defaults applied.
inline std::uint64_t extract_value(const EpsSubstitution& answer,
                                   const CriticalFormula& f) {
  auto n = seval_num(answer, key_term(f), EvalMode::Defaulted);
  if (!n) throw InternalError("key term failed to evaluate");
  return *n;
}

// Stall allowance for the weak injury check: how many source growths an
// image may sit still. One round of interpolations can touch every formula
// and every numeral the instance can mention, once per recorded step.
inline std::uint64_t weak_run_bound(const Signature& sig,
                                    const std::vector<CriticalFormula>& crits,
                                    const Trace& t) {
  std::uint64_t m = 0;
  for (const auto& f : crits)
    m = std::max(m, num_weight(as_implication(sig, f)));
  return (crits.size() + m + 2) *
         std::max<std::uint64_t>(t.size(), 1);
}

}  // namespace eps
