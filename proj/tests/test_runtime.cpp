#include <doctest.h>

#include "oracles.hpp"
#include "phpsynth/runtime.hpp"

using namespace phpsynth;

namespace {

const char* kFactors = "for ($a=1 ; !($i<$a) ; ++$a) { if (($i % $a) == 0) echo $a ; }";
const char* kPrime =
    "$A=FALSE ; for ($a=1;$a<$i;++$a){ if (1<$a) { if (($i % $a) == 0) $A=TRUE ; } ; } ; "
    "echo (!($A)) && (!($i<2)) ;";

std::vector<std::uint64_t> ints(const std::vector<Value>& vs) {
  std::vector<std::uint64_t> out;
  for (const auto& v : vs) out.push_back(v.v);
  return out;
}

RuntimeError::Kind error_kind(const Program& p, const Env& env, std::uint64_t limit = kDefaultStepLimit) {
  try {
    run(p, env, limit);
  } catch (const RuntimeError& e) {
    return e.kind();
  }
  FAIL("expected a runtime error");
  return RuntimeError::Kind::BadInput;
}

}  // namespace

TEST_CASE("values print as integers or TRUE/FALSE") {
  CHECK(to_string(Value::integer(42)) == "42");
  CHECK(to_string(Value::boolean(true)) == "TRUE");
  CHECK(to_string(Value::boolean(false)) == "FALSE");
}

TEST_CASE("factor lister on 12") {
  auto r = run(parse_program(kFactors), {{1, 12}});
  CHECK(ints(r.outputs) == ref::divisors(12));
  CHECK(ints(r.outputs) == std::vector<std::uint64_t>{1, 2, 3, 4, 6, 12});
  CHECK(r.steps > 0);
}

TEST_CASE("prime checker") {
  Program p = parse_program(kPrime);
  CHECK(run(p, {{1, 1}}).outputs == std::vector<Value>{Value::boolean(false)});
  for (std::uint64_t i = 1; i <= 200; ++i) {
    CAPTURE(i);
    CHECK(run(p, {{1, i}}).outputs == std::vector<Value>{Value::boolean(ref::is_prime(i))});
  }
}

TEST_CASE("between lister and minimum") {
  Program b = parse_program("for ($a=1;$a<$j;++$a) { if ($i<$a) echo $a; } ;");
  CHECK(ints(run(b, {{1, 3}, {2, 7}}).outputs) == std::vector<std::uint64_t>{4, 5, 6});
  CHECK(run(b, {{1, 7}, {2, 3}}).outputs.empty());
  Program m = parse_program("{if ($i<$j) echo $i;} ; {if (!($i<$j)) echo $j;} ;");
  CHECK(ints(run(m, {{1, 9}, {2, 4}}).outputs) == std::vector<std::uint64_t>{4});
  CHECK(ints(run(m, {{1, 4}, {2, 4}}).outputs) == std::vector<std::uint64_t>{4});
}

TEST_CASE("runtime errors") {
  CHECK(error_kind(parse_program("echo $a ;"), {}) == RuntimeError::Kind::UnboundVariable);
  CHECK(error_kind(parse_program("echo $j ;"), {{1, 3}}) == RuntimeError::Kind::UnboundInput);
  CHECK(error_kind(parse_program("echo $i ;"), {{1, 0}}) == RuntimeError::Kind::BadInput);
  CHECK(error_kind(parse_program("echo $i % 0 ;"), {{1, 3}}) == RuntimeError::Kind::DivisionByZero);
  CHECK(error_kind(parse_program("echo $i && TRUE ;"), {{1, 3}}) == RuntimeError::Kind::Type);
  CHECK(error_kind(parse_program("echo $i < TRUE ;"), {{1, 3}}) == RuntimeError::Kind::Type);
  CHECK(error_kind(parse_program("for ($a=1 ; $a ; ++$a) echo $a ;"), {}) == RuntimeError::Kind::Type);
  CHECK(error_kind(parse_program("for ($a=1 ; 0<$a ; ++$a) echo $a ;"), {}, 10'000) ==
        RuntimeError::Kind::StepLimit);
  CHECK(error_kind(parse_program("echo $i * $i * $i ;"), {{1, 1ull << 32}}) ==
        RuntimeError::Kind::Overflow);
}

TEST_CASE("step counting is deterministic and bounded") {
  Program p = parse_program(kFactors);
  auto a = run(p, {{1, 30}});
  auto b = run(p, {{1, 30}});
  CHECK(a.steps == b.steps);
  CHECK(error_kind(p, {{1, 30}}, a.steps - 1) == RuntimeError::Kind::StepLimit);
  CHECK_NOTHROW(run(p, {{1, 30}}, a.steps));
}

TEST_CASE("oracle agrees with independent arithmetic") {
  Wff prime = parse_spec("PRIME(I)");
  Wff fac = parse_spec("FAC(x,I)");
  Wff pfac = parse_spec("PFAC(x,I)");
  Wff primes = parse_spec("PRIME(x)^BETW(I,x,J)");
  auto sieve = ref::sieve(100);
  for (std::uint64_t i = 1; i <= 100; ++i) {
    CAPTURE(i);
    CHECK(oracle_decide(prime, {{1, i}}) == sieve[i]);
    CHECK(oracle_list(fac, {{1, i}}) == ref::divisors(i));
    std::vector<std::uint64_t> proper;
    for (auto d : ref::divisors(i))
      if (d > 1 && d < i) proper.push_back(d);
    CHECK(oracle_list(pfac, {{1, i}}) == proper);
  }
  CHECK(oracle_list(primes, {{1, 10}, {2, 30}}) == ref::primes_between(10, 30));
  CHECK(oracle_list(primes, {{1, 10}, {2, 30}}) == std::vector<std::uint64_t>{11, 13, 17, 19, 23, 29});
}

TEST_CASE("oracle relations on literal arguments") {
  CHECK(oracle_decide(parse_spec("FAC(\"0\",\"0\")"), {}));
  CHECK_FALSE(oracle_decide(parse_spec("FAC(\"0\",\"3\")"), {}));
  CHECK_FALSE(oracle_decide(parse_spec("FAC(\"3\",\"0\")"), {}));
  CHECK(oracle_decide(parse_spec("REM(\"7\",\"3\",\"1\")"), {}));
  CHECK_FALSE(oracle_decide(parse_spec("REM(\"7\",\"0\",\"7\")"), {}));
  CHECK(oracle_decide(parse_spec("MUL(\"3\",\"4\",\"12\")"), {}));
  CHECK(oracle_decide(parse_spec("BETW(\"1\",\"2\",\"3\")"), {}));
  CHECK_FALSE(oracle_decide(parse_spec("BETW(\"1\",\"1\",\"3\")"), {}));
  CHECK(oracle_decide(parse_spec("(exists A)REM(\"7\",\"7\",A)"), {}));
}

TEST_CASE("quantifiers in the oracle") {
  Wff w = parse_spec("(exists A)(PRIME(A)^BETW(I,A,J))");
  for (std::uint64_t i = 1; i <= 20; ++i)
    for (std::uint64_t j = 1; j <= 20; ++j)
      CHECK(oracle_decide(w, {{1, i}, {2, j}}) == !ref::primes_between(i, j).empty());
  Wff smallest = parse_spec("PFAC(x,I) ^ (all A)(~PFAC(A,I) v ~LT(A,x))");
  for (std::uint64_t i = 1; i <= 60; ++i) {
    std::vector<std::uint64_t> expect;
    for (auto d : ref::divisors(i))
      if (d > 1 && d < i) {
        expect.push_back(d);
        break;
      }
    CAPTURE(i);
    CHECK(oracle_list(smallest, {{1, i}}) == expect);
  }
}

TEST_CASE("the product oracle reaches past the default bound") {
  CHECK(oracle_list(parse_spec("MUL(I,J,x)"), {{1, 25}, {2, 25}}) == std::vector<std::uint64_t>{625});
}

TEST_CASE("grid enumeration") {
  Grid g = Grid::uniform({1, 2}, 1, 3);
  CHECK(g.size() == 9);
  auto envs = g.envs();
  REQUIRE(envs.size() == 9);
  CHECK(envs.front() == Env{{1, 1}, {2, 1}});
  CHECK(envs.back() == Env{{1, 3}, {2, 3}});
  CHECK(Grid::uniform({}, 1, 3).size() == 1);
}

TEST_CASE("check_judgment passes a correct judgment and reports a broken one") {
  Judgment good{parse_program(kFactors), parse_spec("~LT(I,x)^FAC(x,I)")};
  auto ok = check_judgment(good, Grid::uniform({1}, 1, 40));
  CHECK(ok.envs == 40);
  CHECK(ok.ok());
  CHECK(ok.max_steps > 0);

  // Off by one in the loop bound: misses I itself.
  Judgment broken{parse_program("for ($a=1 ; $a<$i ; ++$a) { if (($i % $a) == 0) echo $a ; }"),
                  good.spec};
  auto bad = check_judgment(broken, Grid::uniform({1}, 1, 40));
  CHECK(bad.disagreements == 40);
  REQUIRE_FALSE(bad.verdicts.empty());
  CHECK(bad.verdicts.front().env == Env{{1, 1}});
  auto js = bad.to_json();
  CHECK(js["disagreements"] == 40);

  Judgment decider{parse_program(kPrime), parse_spec("PRIME(I)")};
  CHECK(check_judgment(decider, Grid::uniform({1}, 1, 60)).ok());
  Judgment wrong_kind{parse_program("echo $i ;"), parse_spec("PRIME(I)")};
  CHECK_FALSE(check_judgment(wrong_kind, Grid::uniform({1}, 1, 5)).ok());
  CHECK_THROWS_AS(check_judgment(decider, Grid::uniform({2}, 1, 5)), SpecError);
}

TEST_CASE("list comparison ignores order and honours multiplicity") {
  Wff spec = parse_spec("LT(x,I)");
  Judgment reversed{parse_program("echo 2 ; echo 1 ;"), spec};
  CHECK(check_judgment(reversed, Grid::uniform({1}, 3, 3)).ok());
  Judgment doubled{parse_program("echo 1 ; echo 1 ; echo 2 ;"), spec};
  CHECK_FALSE(check_judgment(doubled, Grid::uniform({1}, 3, 3)).ok());
  CheckOptions set;
  set.mode = CompareMode::Set;
  CHECK(check_judgment(doubled, Grid::uniform({1}, 3, 3), set).ok());
}

TEST_CASE("every axiom agrees with the oracle") {
  for (const auto& ax : axioms()) {
    CAPTURE(ax.id);
    auto ranks = input_ranks(ax.judgment.spec);
    auto rep = check_judgment(ax.judgment, Grid::uniform(ranks, 1, 25));
    CHECK(rep.ok());
    CHECK(rep.envs == Grid::uniform(ranks, 1, 25).size());
  }
}

TEST_CASE("small run and oracle examples") {
  CHECK(run(parse_program("echo ($i<$j)&&($j<$k) ;"), {{1, 2}, {2, 3}, {3, 5}}).outputs ==
        std::vector<Value>{Value::boolean(true)});
  CHECK(oracle_decide(parse_spec("FAC(I,J)"), {{1, 3}, {2, 12}}));
  CHECK(oracle_decide(parse_spec("PRIME(I)"), {{1, 97}}) == ref::sieve(100)[97]);
  CHECK_FALSE(oracle_decide(parse_spec("BETW(I,J,K)"), {{1, 5}, {2, 5}, {3, 9}}));
  CHECK(oracle_list(parse_spec("BETW(I,x,J)"), {{1, 3}, {2, 9}}) ==
        std::vector<std::uint64_t>{4, 5, 6, 7, 8});

  std::vector<std::uint64_t> prime_factors;
  for (auto d : ref::divisors(12))
    if (ref::sieve(12)[d]) prime_factors.push_back(d);
  CHECK(oracle_list(parse_spec("FAC(x,I)^PRIME(x)"), {{1, 12}}) == prime_factors);

  auto primes = oracle_list(parse_spec("PRIME(x)^BETW(\"1\",x,\"100\")"), {});
  CHECK(primes == ref::primes_between(1, 100));
  CHECK(primes.size() == 25);
}

TEST_CASE("grid checks of small judgments") {
  Judgment betw{parse_program("echo ($i<$j)&&($j<$k) ;"), parse_spec("BETW(I,J,K)")};
  auto r = check_judgment(betw, Grid::uniform({1, 2, 3}, 1, 12));
  CHECK(r.envs == 1728);
  CHECK(r.disagreements == 0);

  Judgment min{parse_program("{if ($i<$j) echo $i;} ; {if (!($i<$j)) echo $j;} ;"),
               parse_spec("(LT(I,J)^EQ(I,x)) v (~LT(I,J)^EQ(J,x))")};
  auto m = check_judgment(min, Grid::uniform({1, 2}, 1, 30));
  CHECK(m.envs == 900);
  CHECK(m.disagreements == 0);
  for (const auto& env : Grid::uniform({1, 2}, 1, 30).envs()) {
    auto out = run(min.program, env).outputs;
    REQUIRE(out.size() == 1);
    CHECK(out[0].v == std::min(env.at(1), env.at(2)));
  }

  Judgment broken{parse_program("echo $i<$i ;"), parse_spec("LT(I,J)")};
  CheckOptions keep;
  keep.keep_passes = true;
  auto b = check_judgment(broken, Grid::uniform({1, 2}, 1, 10), keep);
  std::size_t expected = 0;
  for (std::uint64_t i = 1; i <= 10; ++i)
    for (std::uint64_t j = 1; j <= 10; ++j) expected += i < j;
  CHECK(b.disagreements == expected);
  for (const auto& v : b.verdicts) CHECK(v.ok == !(v.env.at(1) < v.env.at(2)));
}
