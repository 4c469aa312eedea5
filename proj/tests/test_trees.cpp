#include <catch2/catch_amalgamated.hpp>

#include "epsilon/trees.hpp"

using namespace eps;

namespace {

Path P(std::initializer_list<long long> labels) {
  Path p;
  for (auto v : labels)
    p.push_back(v < 0 ? Label::q() : Label::num(static_cast<std::uint64_t>(v)));
  return p;
}
constexpr long long Q = -1;

}  // namespace

TEST_CASE("an instance with no critical formulas is a bare leaf") {
  Signature sig;
  Tower tw(sig, {});
  CHECK(tw.top_rank() == 1);
  CHECK(tw.depth_cap() == 0);
  CHECK(tw.is_leaf(2, P({})));
  CHECK(tw.is_leaf(1, P({})));
}

TEST_CASE("single existence: labels, settling, lift") {
  Signature sig;
  SkolemId c = sig.intern(f_atom(kEq, t_var(0), t_num(2)), 0, "c");
  CriticalFormula cr = make_existence(sig, c, {}, t_num(2));
  Tower tw(sig, {cr});

  CHECK(tw.top_rank() == 1);
  CHECK(tw.top_level() == 2);
  CHECK(tw.depth_cap() == 1);

  // Top tree: the formula at depth 0, leaves at depth 1.
  CHECK(tw.status(2, P({})) == NodeStatus::Interior);
  CHECK(tw.label(2, P({})).kind == NodeLabel::Kind::CForm);
  CHECK(tw.status(2, P({2})) == NodeStatus::Leaf);
  CHECK(tw.status(2, P({2, 0})) == NodeStatus::Invalid);

  // Root of tree 1: formula unsettled, recorded as the node's label.
  EpsSubstitution empty;
  CHECK_FALSE(tw.settles(1, empty, P({})));
  const NodeLabel& l = tw.label(1, P({}));
  REQUIRE(l.kind == NodeLabel::Kind::CForm);
  CHECK(l.form->key_fn == c);

  // Branch fold records the key term.
  EpsSubstitution s2 = tw.subst_at(1, P({2}));
  CHECK(s2.lookup({c, {}}) == Value::num(2));
  EpsSubstitution sq = tw.subst_at(1, P({Q}));
  CHECK(sq.lookup({c, {}}) == Value::unknown());

  // The right value settles the node above; the default does not.
  CHECK(tw.settles(1, s2, P({})));
  CHECK_FALSE(tw.settles(1, sq, P({})));

  // Lift of the committed branch walks to a leaf above.
  const auto& lr = tw.lift(1, P({2}));
  CHECK(lr.hit_leaf);
  CHECK(lr.image == P({2}));
  CHECK(tw.status(1, P({2})) == NodeStatus::Leaf);
  CHECK(check_finite_injury(lr.steps).ok);

  // The default branch stays interior: the violated formula is relabeled
  // for the witness rules.
  CHECK(tw.status(1, P({Q})) == NodeStatus::Interior);
  const NodeLabel& lq = tw.label(1, P({Q}));
  REQUIRE(lq.kind == NodeLabel::Kind::CForm);
  const auto& lrq = tw.lift(1, P({Q}));
  CHECK_FALSE(lrq.hit_leaf);
  CHECK(lrq.image == P({}));

  // A wrong committed value leaves the formula unsettled too.
  EpsSubstitution s0 = tw.subst_at(1, P({0}));
  CHECK_FALSE(tw.settles(1, s0, P({})));
}

TEST_CASE("two formulas sharing a key: override settles both") {
  Signature sig;
  SkolemId c = sig.intern(f_atom(kEq, t_var(0), t_num(2)), 0, "c");
  CriticalFormula cr1 = make_existence(sig, c, {}, t_num(1));  // hyp false
  CriticalFormula cr2 = make_existence(sig, c, {}, t_num(2));  // hyp true
  Tower tw(sig, {cr1, cr2});
  CHECK(tw.depth_cap() == 2);

  // Root: the first formula is unsettled (key uncommitted).
  const NodeLabel& l0 = tw.label(1, P({}));
  REQUIRE(l0.kind == NodeLabel::Kind::CForm);
  CHECK(term_eq(l0.form->aux, t_num(1)));

  // After committing ?, the false-hypothesis formula settles, the second
  // one is violated and relabeled with the same key.
  EpsSubstitution sq = tw.subst_at(1, P({Q}));
  CHECK(tw.settles(1, sq, P({})));
  CHECK_FALSE(tw.settles(1, sq, P({Q})));
  const NodeLabel& l1 = tw.label(1, P({Q}));
  REQUIRE(l1.kind == NodeLabel::Kind::CForm);
  CHECK(term_eq(l1.form->aux, t_num(2)));

  // The second branch value overrides the shared key.
  EpsSubstitution s = tw.subst_at(1, P({Q, 2}));
  CHECK(s.size() == 1);
  CHECK(s.lookup({c, {}}) == Value::num(2));

  // Everything settles; the branch truncates at a leaf above.
  const auto& lr = tw.lift(1, P({Q, 2}));
  CHECK(lr.hit_leaf);
  CHECK(lr.image == P({2, 2}));
  CHECK(tw.status(1, P({Q, 2})) == NodeStatus::Leaf);
  CHECK(check_finite_injury(lr.steps).ok);
  CHECK(is_solving(sig, s, tw.crits()));
}

TEST_CASE("stray applications are interpolated innermost-first") {
  Signature sig;
  SkolemId d = sig.intern(f_atom(kEq, t_var(0), t_var(1)), 1, "d");
  SkolemId g = sig.intern(f_atom(kEq, t_var(0), t_var(1)), 1, "g");
  // key term g(d(5)): the parameter blocks the key, d(5) is stray.
  CriticalFormula cr = make_existence(sig, g, {t_app(d, {t_num(5)})}, t_zero());
  Tower tw(sig, {cr});

  const NodeLabel& l = tw.label(1, P({}));
  REQUIRE(l.kind == NodeLabel::Kind::ETerm);
  CHECK(term_eq(l.term, t_app(d, {t_num(5)})));

  // Committing the stray term unblocks the key, which is recorded next.
  EpsSubstitution s7 = tw.subst_at(1, P({7}));
  CHECK(s7.lookup({d, {5}}) == Value::num(7));
  const NodeLabel& l2 = tw.label(1, P({7}));
  REQUIRE(l2.kind == NodeLabel::Kind::CForm);
  CHECK(term_eq(key_term_at(s7, *l2.form), t_app(g, {t_num(7)})));
}

TEST_CASE("undecided recorded formula interpolates its blocker") {
  Signature sig;
  SkolemId c = sig.intern(f_atom(kEq, t_var(0), t_num(2)), 0, "c");
  // phi(x): x = c(), with the key's own witness decided: e(x): x = 0.
  SkolemId e = sig.intern(f_atom(kEq, t_var(0), t_app(c)), 0, "e");
  CriticalFormula cr = make_existence(sig, e, {}, t_zero());
  Tower tw(sig, {cr});

  // Root: no strays (c() is inside the hypothesis; key e() contains no c()?
  // hypothesis is 0 = c(): c() is stray relative to key e()).
  const NodeLabel& l = tw.label(1, P({}));
  REQUIRE(l.kind == NodeLabel::Kind::ETerm);
  CHECK(term_eq(l.term, t_app(c)));
}

TEST_CASE("events record leaves") {
  Signature sig;
  SkolemId c = sig.intern(f_atom(kEq, t_var(0), t_num(2)), 0, "c");
  CriticalFormula cr = make_existence(sig, c, {}, t_num(2));
  Tower tw(sig, {cr});
  tw.is_leaf(1, P({2}));
  bool saw = false;
  for (const auto& ev : tw.events())
    if (ev.find("leaf level=1") != std::string::npos) saw = true;
  CHECK(saw);
}
