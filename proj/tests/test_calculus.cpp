#include <doctest.h>

#include "oracles.hpp"
#include "phpsynth/calculus.hpp"
#include "phpsynth/runtime.hpp"

using namespace phpsynth;

namespace {

using EK = DerivationEntry::Kind;

std::string norm(const Program& p) { return normalize_text(render(p)); }
std::string norm(const std::string& s) { return normalize_text(s); }

Judgment sub(const Judgment& j, InputBinding b) { return rule_sub(j, b); }
const Judgment& ax(int id) { return axiom_lookup(id); }

Term in(std::uint64_t r) { return Term::input(r); }
Term lit(std::uint64_t v) { return Term::literal(v); }

std::vector<std::uint64_t> ints(const RunResult& r) {
  std::vector<std::uint64_t> out;
  for (const auto& v : r.outputs) out.push_back(v.v);
  return out;
}

Judgment fac_decider() {
  // "echo ($j % $i) == 0 ;" # FAC(I,J), built by the REM route and CR1.
  Judgment rem = sub(ax(5), {{1, in(2)}, {2, in(1)}});
  Judgment zero = sub(ax(2), {{1, in(3)}, {2, lit(0)}});
  Judgment q = rule_quit(rule_do(rem, zero, 3));
  Judgment j{simplify_cr1(q.program), apply_def(DefId::REM,
                                                apply_def(DefId::EQ, q.spec, {}, Direction::Backward),
                                                {}, Direction::Backward)};
  return j;
}

Judgment betw_lister() {
  return rule_do(sub(ax(6), {{1, in(2)}}), sub(ax(3), {{2, in(3)}}), 3);
}

}  // namespace

TEST_CASE("axiom table") {
  REQUIRE(axioms().size() == 7);
  CHECK(norm(ax(3).program) == norm("echo $i < $j ;"));
  CHECK(ax(3).spec == parse_spec("LT(I,J)"));
  CHECK(norm(ax(7).program) == norm("for ($a=1 ; !($i<$a) ; ++$a) echo $a ;"));
  CHECK(ax(7).spec == parse_spec("~LT(I,x)"));
  CHECK(norm(ax(1).program) == norm("echo $i ;"));
  CHECK(ax(1).spec == parse_spec("EQ(I,x)"));
  CHECK_THROWS_AS(axiom_lookup(0), CalculusError);
  CHECK_THROWS_AS(axiom_lookup(8), CalculusError);
}

TEST_CASE("SUB") {
  Judgment j = sub(ax(3), {{1, in(2)}, {2, in(3)}});
  CHECK(norm(j.program) == norm("echo $j < $k ;"));
  CHECK(j.spec == parse_spec("LT(J,K)"));
  Judgment l = sub(ax(6), {{1, in(2)}});
  CHECK(norm(l.program) == norm("for ($a=1 ; $a<$j ; ++$a) echo $a ;"));
  CHECK(l.spec == parse_spec("LT(x,J)"));
  CHECK(sub(ax(3), {}) == ax(3));
  CHECK_THROWS_AS(sub(ax(1), {{2, in(3)}}), CalculusError);
  CHECK_THROWS_AS(sub(ax(1), {{1, Term::output(1)}}), CalculusError);
}

TEST_CASE("SUB by a bijective renaming and its inverse restores the judgment") {
  Judgment j = ax(5);
  Judgment there = sub(j, {{1, in(2)}, {2, in(1)}});
  CHECK(sub(there, {{1, in(2)}, {2, in(1)}}) == j);
}

TEST_CASE("NOT") {
  Judgment n = rule_not(ax(3));
  CHECK(norm(n.program) == norm("echo !($i<$j) ;"));
  CHECK(n.spec == parse_spec("~LT(I,J)"));
  Judgment nn = rule_not(n);
  CHECK(nn.spec == ax(3).spec);
  CHECK(norm(nn.program) == norm("echo !(!($i<$j)) ;"));
  CHECK_THROWS_AS(rule_not(ax(6)), CalculusError);
}

TEST_CASE("AND") {
  Judgment a = rule_and(ax(3), sub(ax(3), {{1, in(2)}, {2, in(3)}}));
  CHECK(norm(a.program) == norm("echo ($i<$j)&&($j<$k) ;"));
  CHECK(a.spec == parse_spec("LT(I,J)^LT(J,K)"));
  CHECK(norm(rule_and(ax(3), ax(3)).program) == norm("echo ($i<$j)&&($i<$j) ;"));
  CHECK_THROWS_AS(rule_and(ax(3), ax(1)), CalculusError);
}

TEST_CASE("DO builds the between-lister") {
  Judgment j = betw_lister();
  CHECK(norm(j.program) == norm("for ($a=1;$a<$j;++$a) { if ($i<$a) echo $a; } ;"));
  CHECK(j.spec == parse_spec("LT(x,J)^LT(I,x)"));
  CHECK(same_spec(apply_def(DefId::BETW, apply_def(DefId::AND_COMM, j.spec, {}, Direction::Forward),
                            {}, Direction::Backward),
                  parse_spec("BETW(I,x,J)")));
  CHECK_THROWS_AS(rule_do(sub(ax(6), {{1, in(2)}}), ax(3), 3), CalculusError);
  CHECK_THROWS_AS(rule_do(ax(3), ax(3), 2), CalculusError);
}

TEST_CASE("DO builds the factor lister") {
  Judgment fac = fac_decider();
  REQUIRE(norm(fac.program) == norm("echo ($j % $i) == 0 ;"));
  Judgment n = sub(fac, {{1, in(2)}, {2, in(1)}});
  CHECK(norm(n.program) == norm("echo ($i % $j) == 0 ;"));
  Judgment j = rule_do(ax(7), n, 2);
  CHECK(norm(j.program) == norm("for ($a=1 ; !($i<$a) ; ++$a) { if (($i%$a) == 0) echo $a ; }"));
  CHECK(j.spec == parse_spec("~LT(I,x)^FAC(x,I)"));
  for (std::uint64_t i = 1; i <= 60; ++i) CHECK(ints(run(j.program, {{1, i}})) == ref::divisors(i));
}

TEST_CASE("DO inlines a multi-statement decider per echo site") {
  // factors of I, filtered by a primality decider with its own loop and flag
  Judgment fac = fac_decider();
  Judgment factors = rule_do(ax(7), sub(fac, {{1, in(2)}, {2, in(1)}}), 2);
  Judgment betw1 = rule_do(sub(ax(6), {{1, in(1)}}), sub(ax(3), {{1, lit(1)}, {2, in(2)}}), 2);
  Judgment pfac_lister = rule_do(betw1, sub(fac, {{1, in(2)}, {2, in(1)}}), 2);
  Judgment prime = rule_and(rule_not(rule_quit(pfac_lister)), rule_not(sub(ax(3), {{2, lit(2)}})));
  Judgment pf = rule_do(factors, sub(prime, {{1, in(2)}}), 2);

  std::string text = render(pf.program);
  CHECK(text.find("for ($a=1 ; !($i < $a) ; ++$a)") == 0);
  CHECK(text.find("$A=FALSE ; for ($b=1") != std::string::npos);  // flag reset inside the loop
  for (std::uint64_t i = 1; i <= 60; ++i) {
    std::vector<std::uint64_t> expect;
    for (auto d : ref::divisors(i))
      if (ref::is_prime(d)) expect.push_back(d);
    CAPTURE(i);
    CHECK(ints(run(pf.program, {{1, i}})) == expect);
  }
}

TEST_CASE("IF") {
  Judgment a = rule_if(ax(3), ax(1));
  CHECK(norm(a.program) == norm("{ if ($i<$j) echo $i ; } ;"));
  CHECK(a.spec == parse_spec("LT(I,J)^EQ(I,x)"));
  Judgment b = rule_if(rule_not(ax(3)), sub(ax(1), {{1, in(2)}}));
  CHECK(norm(b.program) == norm("{ if (!($i<$j)) echo $j ; } ;"));

  Judgment always{parse_program("echo 1 == 1 ;"), parse_spec("EQ(\"1\",\"1\")")};
  Judgment l = rule_if(always, sub(ax(6), {{1, in(1)}}));
  CHECK(ints(run(l.program, {{1, 6}})) == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
  CHECK_THROWS_AS(rule_if(ax(1), ax(3)), CalculusError);
}

TEST_CASE("UNION") {
  Judgment u = rule_union(rule_if(ax(3), ax(1)), rule_if(rule_not(ax(3)), sub(ax(1), {{1, in(2)}})));
  CHECK(norm(u.program) == norm("{if ($i<$j) echo $i;} ; {if (!($i<$j)) echo $j;} ;"));
  CHECK(u.spec == parse_spec("(LT(I,J)^EQ(I,x)) v (~LT(I,J)^EQ(J,x))"));

  Judgment l = ax(6);
  Judgment empty{Program{}, parse_spec("LT(x,\"1\")")};
  CHECK(ints(run(rule_union(l, empty).program, {{1, 5}})) == ints(run(l.program, {{1, 5}})));
  CHECK(ints(run(rule_union(l, l).program, {{1, 3}})) == std::vector<std::uint64_t>{1, 2, 1, 2});
  CHECK_THROWS_AS(rule_union(ax(3), ax(1)), CalculusError);
}

TEST_CASE("QUIT") {
  Judgment rem = sub(ax(5), {{1, in(2)}, {2, in(1)}});
  Judgment zero = sub(ax(2), {{1, in(3)}, {2, lit(0)}});
  Judgment d = rule_do(rem, zero, 3);
  CHECK(norm(d.program) == norm("{ if (($j % $i) == 0) echo $j % $i ; } ;"));
  Judgment q = rule_quit(d);
  CHECK(norm(q.program) == norm("$A=FALSE ; { if (($j % $i) == 0) $A=TRUE ; } ; echo $A ;"));
  CHECK(same_spec(q.spec, parse_spec("(exists A)(REM(J,I,A)^EQ(A,\"0\"))")));

  Judgment betw1 = rule_do(sub(ax(6), {{1, in(1)}}), sub(ax(3), {{1, lit(1)}, {2, in(2)}}), 2);
  Judgment pfac = rule_do(betw1, sub(fac_decider(), {{1, in(2)}, {2, in(1)}}), 2);
  CHECK(norm(rule_quit(pfac).program) ==
        norm("$A=FALSE ; for ($a=1;$a<$i;++$a) { if (1<$a) { if (($i % $a) == 0) $A=TRUE ; } ; } ; "
             "echo $A ;"));
  CHECK(norm(rule_not(rule_quit(pfac)).program).find(norm("echo !($A) ;")) != std::string::npos);

  Judgment empty{Program{}, parse_spec("LT(x,\"1\")")};
  Judgment qe = rule_quit(empty);
  CHECK(norm(qe.program) == norm("$A=FALSE ; echo $A ;"));
  CHECK(run(qe.program, {}).outputs == std::vector<Value>{Value::boolean(false)});
  CHECK_THROWS_AS(rule_quit(ax(3)), CalculusError);
}

TEST_CASE("the prime checker's final AND") {
  Judgment betw1 = rule_do(sub(ax(6), {{1, in(1)}}), sub(ax(3), {{1, lit(1)}, {2, in(2)}}), 2);
  Judgment pfac = rule_do(betw1, sub(fac_decider(), {{1, in(2)}, {2, in(1)}}), 2);
  Judgment prime = rule_and(rule_not(rule_quit(pfac)), rule_not(sub(ax(3), {{2, lit(2)}})));
  CHECK(norm(prime.program) ==
        norm("$A=FALSE ; for ($a=1;$a<$i;++$a){ if (1<$a) { if (($i % $a) == 0) $A=TRUE ; } ; } ; "
             "echo (!($A)) && (!($i<2)) ;"));
}

TEST_CASE("binary rules keep the operands' program variables apart") {
  Judgment q = rule_quit(ax(6));
  Judgment both = rule_and(q, q);
  auto vars = assigned_vars(both.program);
  CHECK(vars.count({VarKind::Prog, 1}) == 1);
  CHECK(vars.count({VarKind::Prog, 2}) == 1);
  CHECK(vars.count({VarKind::Flag, 1}) == 1);
  CHECK(vars.count({VarKind::Flag, 2}) == 1);
}

TEST_CASE("derivation evaluation") {
  Derivation d;
  d.goal = parse_spec("BETW(I,J,K)");
  d.entries = {DerivationEntry::axiom_ref(3), DerivationEntry::axiom_ref(3),
               DerivationEntry::sub({{1, in(2)}, {2, in(3)}}), DerivationEntry::rule(EK::And),
               DerivationEntry::def_app(DefId::BETW, {}, Direction::Backward)};
  Judgment j = eval_derivation(d);
  CHECK(norm(j.program) == norm("echo ($i<$j)&&($j<$k) ;"));
  CHECK(replay_check(d));

  Derivation wrong = d;
  wrong.goal = parse_spec("BETW(I,K,J)");
  CHECK_FALSE(replay_check(wrong));

  Derivation truncated = d;
  truncated.entries.resize(2);
  auto r = replay(truncated);
  CHECK_FALSE(r.ok);
  CHECK(r.reason.find("stack") != std::string::npos);

  Derivation underflow;
  underflow.goal = parse_spec("LT(I,J)");
  underflow.entries = {DerivationEntry::rule(EK::Not)};
  CHECK_FALSE(replay_check(underflow));

  Derivation lister;
  lister.goal = parse_spec("LT(x,J)^LT(I,x)");
  lister.entries = {DerivationEntry::axiom_ref(6), DerivationEntry::sub({{1, in(2)}}),
                    DerivationEntry::axiom_ref(3), DerivationEntry::sub({{2, in(3)}}),
                    DerivationEntry::do_rule(3)};
  CHECK(norm(eval_derivation(lister).program) ==
        norm("for ($a=1;$a<$j;++$a) { if ($i<$a) echo $a; } ;"));

  Derivation single{{DerivationEntry::axiom_ref(1)}, parse_spec("EQ(I,x)")};
  CHECK(eval_derivation(single) == ax(1));
}

TEST_CASE("derivation JSON round trip and trace") {
  Derivation d;
  d.goal = parse_spec("FAC(I,J)");
  d.entries = {DerivationEntry::axiom_ref(5),
               DerivationEntry::sub({{1, in(2)}, {2, in(1)}}),
               DerivationEntry::axiom_ref(2),
               DerivationEntry::sub({{1, in(3)}, {2, lit(0)}}),
               DerivationEntry::do_rule(3),
               DerivationEntry::rule(EK::Quit),
               DerivationEntry::def_app(DefId::EQ, {}, Direction::Backward),
               DerivationEntry::def_app(DefId::REM, {}, Direction::Backward)};
  REQUIRE(replay_check(d));
  Derivation back = derivation_from_json(derivation_to_json(d));
  CHECK(back.entries == d.entries);
  CHECK(back.goal == d.goal);
  std::string trace = forward_trace(d);
  CHECK(trace.find("1. AX5") == 0);
  CHECK(trace.find("5. DO:K=x") != std::string::npos);
  CHECK(trace.find("8. DEF-REM") != std::string::npos);
}

TEST_CASE("theorem references resolve through the resolver") {
  Judgment fac = fac_decider();
  TheoremResolver r = [&](const std::string& n) -> const Judgment* {
    return n == "4" ? &fac : nullptr;
  };
  Derivation d{{DerivationEntry::axiom_ref(7), DerivationEntry::theorem_ref("4"),
                DerivationEntry::sub({{1, in(2)}, {2, in(1)}}), DerivationEntry::do_rule(2)},
               parse_spec("~LT(I,x)^FAC(x,I)")};
  CHECK(replay_check(d, r));
  CHECK_FALSE(replay_check(d));
}

TEST_CASE("NOT twice is oracle-equivalent to the original") {
  Judgment j = fac_decider();
  Judgment nn = rule_not(rule_not(j));
  auto rep = check_judgment(nn, Grid::uniform({1, 2}, 1, 20));
  CHECK(rep.envs == 400);
  CHECK(rep.ok());
}
