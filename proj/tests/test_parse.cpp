#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include <epsilon/driver.hpp>
#include <epsilon/parse.hpp>

using namespace eps;

namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("a minimal instance parses to one function and one formula") {
  auto inst = parse_instance(
      "skolem c(0) := exists x. x = 2\n"
      "crit existence c() witness 2\n");
  REQUIRE(inst.names.size() == 1);
  REQUIRE(inst.crits.size() == 1);
  SkolemId c = inst.names.at("c");
  CHECK(inst.sig.fn(c).arity == 0);
  CHECK(inst.sig.fn(c).rank == 1);
  CHECK(formula_eq(inst.sig.fn(c).matrix, f_atom(kEq, t_var(0), t_num(2))));
  CHECK(inst.crits[0].kind == CriticalKind::Existence);
  CHECK(inst.crits[0].key_fn == c);
  CHECK(term_eq(inst.crits[0].aux, t_num(2)));
}

TEST_CASE("numeral sugar and successor spelling agree") {
  auto a = parse_instance(
      "skolem c(0) := exists x. x = 2\ncrit existence c() witness 2\n");
  auto b = parse_instance(
      "skolem c(0) := exists x. x = S S 0\n"
      "crit existence c() witness S S 0\n");
  CHECK(term_eq(a.crits[0].aux, b.crits[0].aux));
  CHECK(formula_eq(a.sig.fn(a.names.at("c")).matrix,
                   b.sig.fn(b.names.at("c")).matrix));
}

TEST_CASE("conjunction binds tighter than disjunction, both to the right") {
  auto inst = parse_instance(
      "skolem c(0) := exists x. x = 0 & x < 2 | x = 3\n");
  const Formula& m = inst.sig.fn(inst.names.at("c")).matrix;
  REQUIRE(m->kind == FormulaKind::Or);
  CHECK(m->lhs->kind == FormulaKind::And);
  CHECK(m->rhs->kind == FormulaKind::Atom);
  CHECK(formula_eq(m, f_or(f_and(f_atom(kEq, t_var(0), t_zero()),
                                 f_atom(kLt, t_var(0), t_num(2))),
                           f_atom(kEq, t_var(0), t_num(3)))));

  auto paren = parse_instance(
      "skolem c(0) := exists x. x = 0 & (x < 2 | x = 3)\n");
  const Formula& p = paren.sig.fn(paren.names.at("c")).matrix;
  REQUIRE(p->kind == FormulaKind::And);
  CHECK(p->rhs->kind == FormulaKind::Or);
}

TEST_CASE("negation applies to an atom") {
  auto inst = parse_instance("skolem c(1) := exists x. ! x = y1\n");
  CHECK(inst.sig.fn(inst.names.at("c")).matrix->kind == FormulaKind::NegAtom);
  auto paren = parse_instance("skolem c(1) := exists x. !(x = y1)\n");
  CHECK(formula_eq(inst.sig.fn(inst.names.at("c")).matrix,
                   paren.sig.fn(paren.names.at("c")).matrix));
}

TEST_CASE("rejections carry positions") {
  SECTION("undeclared name") {
    try {
      parse_instance("crit existence d() witness 0\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line == 1);
      CHECK(e.col == 16);
      CHECK(std::string(e.what()).find("undeclared") != std::string::npos);
    }
  }
  SECTION("closed skolem term inside a matrix") {
    CHECK_THROWS_AS(
        parse_instance("skolem c(0) := exists x. x = 2\n"
                       "skolem e(0) := exists x. x = c()\n"),
        ParseError);
  }
  SECTION("parameter beyond the arity") {
    CHECK_THROWS_AS(parse_instance("skolem d(1) := exists x. x = y2\n"),
                    ParseError);
  }
  SECTION("reserved bound variable") {
    CHECK_THROWS_AS(parse_instance("skolem d(0) := exists y1. y1 = 0\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_instance("skolem d(0) := exists S. S = 0\n"),
                    ParseError);
  }
  SECTION("reserved or duplicate function name") {
    CHECK_THROWS_AS(parse_instance("skolem S(0) := exists x. x = 0\n"),
                    ParseError);
    CHECK_THROWS_AS(
        parse_instance("skolem c(0) := exists x. x = 0\n"
                       "skolem c(0) := exists x. x = 1\n"),
        ParseError);
  }
  SECTION("argument count mismatch") {
    CHECK_THROWS_AS(
        parse_instance("skolem d(1) := exists x. x = y1\n"
                       "crit existence d() witness 0\n"),
        ParseError);
  }
}

TEST_CASE("induction and predecessor lines build their formulas") {
  auto inst = parse_instance(
      "# bounded search instance\n"
      "skolem phi(0) := exists x. x < 3\n"
      "crit induction phi() bound 5\n"
      "crit pred S S S 0\n");
  REQUIRE(inst.crits.size() == 2);
  CHECK(inst.crits[0].kind == CriticalKind::Induction);
  CHECK(inst.sig.fn(inst.crits[0].key_fn).alias == "phi_stop");
  CHECK(inst.crits[0].hyp_fn == inst.names.at("phi"));
  CHECK(term_eq(inst.crits[0].aux, t_num(5)));
  CHECK(inst.crits[1].kind == CriticalKind::Predecessor);
  CHECK(term_eq(inst.crits[1].aux, t_num(3)));
}

TEST_CASE("a parsed cross-referencing instance solves end to end") {
  auto inst = parse_instance(
      "skolem c(0) := exists x. x = 2\n"
      "skolem b(1) := exists x. x = 1 & y1 = 2\n"
      "crit existence b(c()) witness 1\n"
      "crit existence c() witness 2\n");
  REQUIRE(inst.crits.size() == 2);
  REQUIRE(term_eq(inst.crits[0].params[0], t_app(inst.names.at("c"), {})));
  Tower tw(inst.sig, inst.crits, {});
  SolveOutcome out = solve(tw);
  REQUIRE(out.solved);
  CHECK(out.answer.lookup(CanonicalTerm{inst.names.at("c"), {}}) ==
        Value::num(2));
  CHECK(out.answer.lookup(CanonicalTerm{inst.names.at("b"), {2}}) ==
        Value::num(1));
}

TEST_CASE("substitution lines round-trip through the reader") {
  SECTION("rank one") {
    auto inst = parse_instance(
        "skolem c(0) := exists x. x = 2\n"
        "skolem e(1) := exists x. y1 < x\n"
        "crit existence c() witness 2\n"
        "crit existence e(3) witness 7\n");
    Tower tw(inst.sig, inst.crits, {});
    SolveOutcome out = solve(tw);
    REQUIRE(out.solved);
    std::string text = join(substitution_lines(inst.sig, out.answer));
    EpsSubstitution back = parse_substitution(text, inst.sig);
    CHECK(back == out.answer);
  }
  SECTION("rank two, unknowns included") {
    auto inst = parse_instance(
        "skolem d(1) := exists x. x = y1\n"
        "skolem c2(0) := exists x. d(x) = 0\n"
        "crit existence c2() witness 5\n");
    REQUIRE(inst.sig.fn(inst.names.at("c2")).rank == 2);
    Tower tw(inst.sig, inst.crits, {});
    SolveOutcome out = solve(tw);
    REQUIRE(out.solved);
    std::string text = join(substitution_lines(inst.sig, out.answer));
    EpsSubstitution back = parse_substitution(text, inst.sig);
    CHECK(back == out.answer);
  }
  SECTION("a hand-edited wrong value still reads back") {
    Signature sig;
    SkolemId c = sig.intern(f_atom(kEq, t_var(0), t_num(2)), 0, "c");
    EpsSubstitution s = parse_substitution("c_{exists x. x = 2}() := 1\n", sig);
    CHECK(s.lookup(CanonicalTerm{c, {}}) == Value::num(1));
    CHECK(!is_correct(sig, s));
  }
}

TEST_CASE("path syntax reads back what it prints") {
  for (const Path& p :
       {Path{}, Path{Label::q()}, Path{Label::num(3), Label::q(), Label::num(2)},
        Path{Label::num(12), Label::num(0)}}) {
    CHECK(parse_path(path_to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_path("3,?"), ParseError);
  CHECK_THROWS_AS(parse_path("(3,,2)"), ParseError);
  CHECK_THROWS_AS(parse_path("(x)"), ParseError);
  CHECK_THROWS_AS(parse_path("(3"), ParseError);
}
