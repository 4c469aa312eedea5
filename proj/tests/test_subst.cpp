#include <catch2/catch_amalgamated.hpp>

#include "epsilon/subst.hpp"

using namespace eps;

namespace {

struct Fix {
  Signature sig;
  SkolemId c, d;
  Fix() {
    c = sig.intern(f_atom(kEq, t_var(0), t_num(2)), 0, "c");
    d = sig.intern(f_atom(kLt, t_var(1), t_var(0)), 1, "d");
  }
};

}  // namespace

TEST_CASE("evaluation chains through committed terms") {
  Fix fx;
  EpsSubstitution s;
  s.set({fx.c, {}}, Value::num(2));
  s.set({fx.d, {2}}, Value::num(5));

  Term t = t_app(fx.d, {t_app(fx.c)});
  CHECK(seval_num(s, t) == 5);
  CHECK(seval_num(s, t_succ(t)) == 6);
}

TEST_CASE("a committed ? reads as 0, an uncommitted term stays put") {
  Fix fx;
  EpsSubstitution s;
  s.set({fx.c, {}}, Value::unknown());

  CHECK(seval_num(s, t_app(fx.c)) == 0);

  Term u = t_app(fx.d, {t_num(1)});
  CHECK_FALSE(seval_num(s, u).has_value());
  CHECK(term_eq(seval(s, u), u));
  CHECK(seval_num(s, u, EvalMode::Defaulted) == 0);

  // Arguments evaluate even when the application stays stuck.
  Term v = t_app(fx.d, {t_app(fx.c)});
  CHECK(term_eq(seval(s, v), t_app(fx.d, {t_num(0)})));
}

TEST_CASE("blocker collection is innermost-first and deduplicated") {
  Fix fx;
  EpsSubstitution s;

  Formula g = f_atom(kEq, t_app(fx.c), t_num(2));
  auto bs = unev(s, g);
  REQUIRE(bs.size() == 1);
  CHECK(term_eq(bs[0], t_app(fx.c)));

  // d(c()) with c committed ?: the blocker is the named term d(0).
  s.set({fx.c, {}}, Value::unknown());
  Formula h = f_atom(kEq, t_app(fx.d, {t_app(fx.c)}), t_num(0));
  bs = unev(s, h);
  REQUIRE(bs.size() == 1);
  CHECK(term_eq(bs[0], t_app(fx.d, {t_num(0)})));

  // Uncommitted inner before outer, one copy each.
  EpsSubstitution empty;
  Formula k = f_and(f_atom(kEq, t_app(fx.d, {t_app(fx.c)}), t_num(0)),
                    f_atom(kLt, t_app(fx.c), t_num(9)));
  bs = unev(empty, k);
  REQUIRE(bs.size() == 1);  // d(c()) is not canonical while c() blocks it
  CHECK(term_eq(bs[0], t_app(fx.c)));
}

TEST_CASE("three-valued satisfaction") {
  Fix fx;
  EpsSubstitution s;
  Formula undecided = f_atom(kEq, t_app(fx.c), t_num(2));
  Formula yes = f_atom(kLt, t_num(1), t_num(2));
  Formula no = f_atom(kLt, t_num(2), t_num(1));

  CHECK(truth_value(fx.sig, s, undecided) == Truth::Unknown);
  CHECK_FALSE(decides(fx.sig, s, undecided));
  CHECK(truth_value(fx.sig, s, f_or(yes, undecided)) == Truth::True);
  CHECK(truth_value(fx.sig, s, f_and(no, undecided)) == Truth::False);
  CHECK(truth_value(fx.sig, s, f_and(yes, undecided)) == Truth::Unknown);
  CHECK(truth_value(fx.sig, s, f_or(no, undecided)) == Truth::Unknown);
  CHECK(truth_value(fx.sig, s, negate(undecided)) == Truth::Unknown);

  // Defaulted semantics decides everything.
  CHECK(models_defaulted(fx.sig, s, f_or(undecided, negate(undecided))));
  CHECK(truth_value(fx.sig, s, undecided, EvalMode::Defaulted) == Truth::False);

  // Committed values decide.
  s.set({fx.c, {}}, Value::num(2));
  CHECK(truth_value(fx.sig, s, undecided) == Truth::True);
}

TEST_CASE("reduce evaluates atom arguments in place") {
  Fix fx;
  EpsSubstitution s;
  s.set({fx.c, {}}, Value::num(2));
  Formula g = f_atom(kEq, t_app(fx.d, {t_app(fx.c)}), t_succ(t_num(1)));
  Formula r = reduce_formula(s, g);
  CHECK(formula_eq(r, f_atom(kEq, t_app(fx.d, {t_num(2)}), t_num(2))));
}

TEST_CASE("substitution bookkeeping") {
  Fix fx;
  EpsSubstitution s;
  s.set({fx.c, {}}, Value::unknown());
  EpsSubstitution s2 = s.with({fx.c, {}}, Value::num(3));
  CHECK(s.lookup({fx.c, {}}) == Value::unknown());
  CHECK(s2.lookup({fx.c, {}}) == Value::num(3));

  s2.set({fx.d, {7}}, Value::num(1));
  CHECK(max_numeral(s2) == 7);
  CHECK(restrict_rank(fx.sig, s2, 0).size() == 0);
  CHECK(restrict_rank(fx.sig, s2, 1).size() == 2);

  auto lines = substitution_lines(fx.sig, s2);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "c_{exists x. x = 2}() := 3");
  CHECK(lines[1] == "d_{exists x. y1 < x}(7) := 1");
}
