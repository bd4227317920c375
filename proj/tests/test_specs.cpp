#include <doctest.h>

#include "phpsynth/corpus.hpp"
#include "phpsynth/specs.hpp"

using namespace phpsynth;

namespace {

Term I() { return Term::input(1); }
Term J() { return Term::input(2); }
Term K() { return Term::input(3); }
Term x() { return Term::output(1); }

std::vector<std::string> corpus_texts() {
  std::vector<std::string> out;
  for (const auto& t : corpus_theorems()) out.push_back(t.spec);
  for (const auto& s : corpus_specs()) out.push_back(s.spec);
  return out;
}

SpecError::Kind error_kind(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const SpecError& e) {
    return e.kind();
  }
  FAIL("no error for " << text);
  return SpecError::Kind::Syntax;
}

}  // namespace

TEST_CASE("term names follow the rank sequences") {
  CHECK(term_name(Term::input(1)) == "I");
  CHECK(term_name(Term::input(3)) == "K");
  CHECK(term_name(Term::input(4)) == "I4");
  CHECK(term_name(Term::output(2)) == "y");
  CHECK(term_name(Term::output(4)) == "x4");
  CHECK(term_name(Term::bound(1)) == "A");
  CHECK(term_name(Term::bound(5)) == "A5");
  CHECK(term_name(Term::literal(100)) == "\"100\"");
}

TEST_CASE("parse BETW(I,J,K) into one atom over three inputs") {
  CHECK(parse_spec("BETW(I,J,K)") == Wff::atom(Relation::BETW, {I(), J(), K()}));
}

TEST_CASE("parse a conjunction with literals") {
  Wff expected = Wff::conj(Wff::atom(Relation::PRIME, {x()}),
                           Wff::atom(Relation::BETW, {Term::literal(1), x(), Term::literal(100)}));
  CHECK(parse_spec("PRIME(x) ^ BETW(\"1\",x,\"100\")") == expected);
}

TEST_CASE("parse errors carry a kind and a position") {
  CHECK(error_kind("LT(I)") == SpecError::Kind::Arity);
  CHECK(error_kind("LT(I") == SpecError::Kind::Syntax);
  CHECK(error_kind("FOO(I)") == SpecError::Kind::Syntax);
  CHECK(error_kind("LT(A,I)") == SpecError::Kind::Unbound);
  CHECK(error_kind("(exists A)(exists A)LT(A,I)") == SpecError::Kind::Unbound);
  try {
    parse_spec("LT(I");
  } catch (const SpecError& e) {
    CHECK(e.position() == 4);
  }
  CHECK_THROWS_AS(Wff::atom(Relation::LT, {I()}), SpecError);
}

TEST_CASE("precedence: ~ over ^ over v, quantifier takes the next unary unit") {
  Wff w = parse_spec("~LT(I,J) ^ EQ(I,x) v EQ(J,x)");
  REQUIRE(w.kind == WffKind::Or);
  CHECK(w.sub[0].kind == WffKind::And);
  CHECK(w.sub[0].sub[0].kind == WffKind::Not);

  Wff q = parse_spec("(exists A)MUL(A,x,I)^~LT(I,x)");
  REQUIRE(q.kind == WffKind::And);
  CHECK(q.sub[0].kind == WffKind::Exists);
}

TEST_CASE("render examples") {
  CHECK(render_spec(Wff::conj(Wff::atom(Relation::LT, {I(), J()}),
                              Wff::atom(Relation::LT, {J(), K()}))) == "LT(I,J)^LT(J,K)");
  CHECK(render_spec(Wff::negation(Wff::exists(
            1, Wff::atom(Relation::PFAC, {Term::bound(1), I()})))) == "~(exists A)PFAC(A,I)");
  CHECK(render_spec(Wff::atom(Relation::EQ, {I(), x()})) == "EQ(I,x)");
}

TEST_CASE("render/parse round trip over the corpus") {
  for (const auto& text : corpus_texts()) {
    CAPTURE(text);
    Wff w = parse_spec(text);
    CHECK(parse_spec(render_spec(w)) == w);
    CHECK(spec_from_json(spec_to_json(w)) == w);
  }
}

TEST_CASE("classify") {
  CHECK(classify(parse_spec("BETW(I,J,K)")) == SpecKind::Decide);
  CHECK(classify(parse_spec("BETW(I,x,J)")) == SpecKind::List);
  CHECK(classify(parse_spec("LT(I,J)^EQ(I,x)")) == SpecKind::ConditionalList);
  CHECK(classify(parse_spec("(exists A)PFAC(A,I)")) == SpecKind::Decide);
  CHECK_THROWS_AS(classify(parse_spec("MUL(x,x,I)")), SpecError);
  CHECK_THROWS_AS(classify(parse_spec("(all A)LT(A,x)")), SpecError);
  CHECK_THROWS_AS(classify(parse_spec("LT(x,y)")), SpecError);
  CHECK_FALSE(try_classify(parse_spec("MUL(x,x,I)")).has_value());
}

TEST_CASE("variable queries") {
  Wff w = parse_spec("PRIME(x)^BETW(J,x,I)");
  CHECK(input_ranks(w) == std::vector<std::uint64_t>{2, 1});
  CHECK(output_ranks(w) == std::vector<std::uint64_t>{1});
  CHECK(max_input_rank(w) == 2);
  CHECK(max_bound_rank(parse_spec("(exists B)LT(B,I)")) == 2);
  CHECK(mentions(w, J()));
  CHECK_FALSE(mentions(w, K()));
}

TEST_CASE("DEF-BETW rewrites BETW into two LT atoms") {
  CHECK(apply_def(DefId::BETW, parse_spec("BETW(I,J,K)"), {}, Direction::Forward) ==
        parse_spec("LT(I,J)^LT(J,K)"));
  CHECK(apply_def(DefId::BETW, parse_spec("BETW(I,x,J)"), {}, Direction::Forward) ==
        parse_spec("LT(I,x)^LT(x,J)"));
  CHECK(apply_def(DefId::BETW, parse_spec("LT(I,J)^LT(J,K)"), {}, Direction::Backward) ==
        parse_spec("BETW(I,J,K)"));
}

TEST_CASE("DEF-^ swaps the conjuncts") {
  CHECK(apply_def(DefId::AND_COMM, parse_spec("LT(I,x)^LT(x,J)"), {}, Direction::Forward) ==
        parse_spec("LT(x,J)^LT(I,x)"));
}

TEST_CASE("DEF-REM turns FAC(I,J) into a zero remainder") {
  CHECK(apply_def(DefId::REM, parse_spec("FAC(I,J)"), {}, Direction::Forward) ==
        parse_spec("REM(J,I,\"0\")"));
}

TEST_CASE("DEF-FAC, DEF-MUL and DEF-MULT reproduce the factor-listing steps") {
  Wff w = parse_spec("FAC(x,I)");
  w = apply_def(DefId::FAC, w, {}, Direction::Forward);
  CHECK(same_spec(w, parse_spec("(exists A)MUL(A,x,I)")));
  w = apply_def(DefId::MUL, w, {0}, Direction::Forward);
  CHECK(same_spec(w, parse_spec("(exists A)MUL(x,A,I)")));
  w = apply_def(DefId::MULT, w, {0}, Direction::Forward);
  CHECK(same_spec(w, parse_spec("(exists A)(MUL(x,A,I)^~LT(I,x))")));
}

TEST_CASE("DEF-PRIME and DEF-PFAC") {
  CHECK(same_spec(apply_def(DefId::PRIME, parse_spec("PRIME(I)"), {}, Direction::Forward),
                  parse_spec("~(exists A)PFAC(A,I) ^ ~LT(I,\"2\")")));
  CHECK(same_spec(apply_def(DefId::PFAC, parse_spec("PFAC(x,I)"), {}, Direction::Forward),
                  parse_spec("FAC(x,I)^BETW(\"1\",x,I)")));
}

TEST_CASE("DEF-EQ abstracts a literal argument") {
  Wff w = apply_def(DefId::EQ, parse_spec("REM(J,I,\"0\")"), {}, Direction::Forward);
  CHECK(same_spec(w, parse_spec("(exists A)(REM(J,I,A)^EQ(A,\"0\"))")));
  CHECK(apply_def(DefId::EQ, w, {}, Direction::Backward) == parse_spec("REM(J,I,\"0\")"));
}

TEST_CASE("DEF errors") {
  CHECK_THROWS_AS(apply_def(DefId::BETW, parse_spec("LT(I,J)"), {}, Direction::Forward), SpecError);
  CHECK_THROWS_AS(apply_def(DefId::BETW, parse_spec("BETW(I,J,K)"), {3}, Direction::Forward),
                  SpecError);
  CHECK_FALSE(try_apply_def(DefId::PRIME, parse_spec("LT(I,J)"), {}, Direction::Forward));
}

TEST_CASE("DEF involution on every corpus wff at every path") {
  std::size_t applications = 0;
  for (const auto& text : corpus_texts()) {
    Wff w = eliminate_forall(parse_spec(text));
    for (const Path& p : all_paths(w)) {
      for (DefId d : kAllDefs) {
        for (Direction dir : {Direction::Forward, Direction::Backward}) {
          auto once = try_apply_def(d, w, p, dir);
          if (!once) continue;
          ++applications;
          CAPTURE(text);
          CAPTURE(def_name(d));
          auto back = try_apply_def(d, *once, p, reverse(dir));
          REQUIRE(back.has_value());
          CHECK(same_spec(*back, w));
        }
      }
    }
  }
  CHECK(applications > 50);
}

TEST_CASE("AND_COMM twice is the identity") {
  Wff w = parse_spec("FAC(x,I)^BETW(\"1\",x,I)");
  Wff twice = apply_def(DefId::AND_COMM,
                        apply_def(DefId::AND_COMM, w, {}, Direction::Forward), {},
                        Direction::Forward);
  CHECK(twice == w);
}

TEST_CASE("SCOPE narrows and widens an existential over a conjunction") {
  Wff w = parse_spec("(exists A)(MUL(A,x,I)^~LT(I,x))");
  auto narrow = try_apply_scope(w, {}, Direction::Forward);
  REQUIRE(narrow);
  CHECK(same_spec(*narrow, parse_spec("(exists A)MUL(A,x,I)^~LT(I,x)")));
  auto wide = try_apply_scope(*narrow, {}, Direction::Backward);
  REQUIRE(wide);
  CHECK(same_spec(*wide, w));
  CHECK_FALSE(try_apply_scope(parse_spec("(exists A)(LT(A,I)^LT(I,A))"), {}, Direction::Forward));
}

TEST_CASE("match_axiom") {
  auto b = match_axiom(parse_spec("LT(J,K)"), parse_spec("LT(I,J)"));
  REQUIRE(b);
  CHECK(*b == InputBinding{{1, J()}, {2, K()}});

  auto lit = match_axiom(parse_spec("LT(I,\"2\")"), parse_spec("LT(I,J)"));
  REQUIRE(lit);
  CHECK(*lit == InputBinding{{2, Term::literal(2)}});

  CHECK_FALSE(match_axiom(parse_spec("LT(x,I)"), parse_spec("LT(I,J)")));
  CHECK_FALSE(match_axiom(parse_spec("LT(I,I)"), parse_spec("LT(I,J)")) == std::nullopt);
  CHECK_FALSE(match_axiom(parse_spec("EQ(I,J)"), parse_spec("LT(I,J)")));
}

TEST_CASE("match_axiom soundness: the binding maps the pattern onto the goal") {
  const char* goals[] = {"LT(J,K)", "LT(I,\"2\")", "FAC(K,I)", "BETW(\"1\",x,I)", "LT(x,J)",
                         "~LT(J,x)", "PRIME(J)", "REM(J,I,x)", "EQ(K,\"0\")"};
  const char* patterns[] = {"LT(I,J)", "LT(I,J)", "FAC(I,J)", "BETW(I,x,J)", "LT(x,I)",
                            "~LT(I,x)", "PRIME(I)", "REM(I,J,x)", "EQ(I,J)"};
  for (std::size_t i = 0; i < std::size(goals); ++i) {
    CAPTURE(goals[i]);
    Wff g = parse_spec(goals[i]);
    auto b = match_axiom(g, parse_spec(patterns[i]));
    REQUIRE(b);
    CHECK(same_spec(apply_binding(parse_spec(patterns[i]), *b), g));
  }
}

TEST_CASE("canonical forms and goal keys") {
  CHECK(same_spec(parse_spec("(exists B)LT(B,I)"), parse_spec("(exists A)LT(A,I)")));
  CHECK(same_spec(parse_spec("~~LT(I,J)"), parse_spec("LT(I,J)")));
  CHECK_FALSE(same_spec(parse_spec("LT(J,I)"), parse_spec("LT(I,J)")));
  CHECK(goal_key(parse_spec("FAC(K,I)")) == goal_key(parse_spec("FAC(I,J)")));
  CHECK(goal_key(parse_spec("LT(I,I)")) != goal_key(parse_spec("LT(I,J)")));
}

TEST_CASE("forall is rewritten through De Morgan") {
  CHECK(same_spec(eliminate_forall(parse_spec("(all A)(~LT(A,I) v LT(I,A))")),
                  parse_spec("~(exists A)~(~LT(A,I) v LT(I,A))")));
}

TEST_CASE("replace_terms leaves bound occurrences alone") {
  Wff w = parse_spec("LT(I,x)^(exists A)LT(A,I)");
  Wff r = replace_terms(w, {{I(), K()}});
  CHECK(r == parse_spec("LT(K,x)^(exists A)LT(A,K)"));
  CHECK(render_binding({{1, J()}, {2, Term::literal(7)}}) == "I=J,J=\"7\"");
}
