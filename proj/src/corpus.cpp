#include "phpsynth/corpus.hpp"

namespace phpsynth {

const std::vector<CorpusTheorem>& corpus_theorems() {
  static const std::vector<CorpusTheorem> table = {
      {"1", "BETW(I,J,K)", "Is a number strictly between two others?",
       "echo ($i<$j)&&($j<$k);"},
      {"2", "BETW(I,x,J)", "List the numbers strictly between two numbers.",
       "for ($a=1;$a<$j;++$a) { if ($i<$a) echo $a; } ;"},
      {"3", "(LT(I,J)^EQ(I,x)) v (~LT(I,J)^EQ(J,x))", "Minimum of two numbers.",
       "{if ($i<$j) echo $i;} ; {if (!($i<$j)) echo $j;} ;"},
      {"4", "FAC(I,J)", "Is I a factor of J?", "echo ($j % $i) == 0 ;"},
      {"5", "FAC(x,I)", "List the factors of a number.",
       "for ($a=1 ; !($i<$a) ; ++$a) {if (($i%$a) == 0) echo $a ; }"},
      {"6", "PFAC(x,I)", "List the proper factors of a number.",
       "for ($a=1;$a<$i;++$a) { if (1<$a) { if (($i % $a) == 0) echo $a ; } ; } ;"},
      {"7", "PRIME(I)", "Is a number prime?",
       "$A=FALSE ; for ($a=1;$a<$i;++$a){ if (1<$a) { if (($i % $a) == 0) $A=TRUE ; } ; } ; "
       "echo (!($A)) && (!($i<2)) ;"},
      {"8", "FAC(x,I)^PRIME(x)", "List the prime factors of a number.", std::nullopt},
      {"9", "PRIME(x)^BETW(I,x,J)", "List the primes between two numbers.", std::nullopt},
      {"10", "PRIME(x)^BETW(\"1\",x,\"100\")", "List the primes between 1 and 100.",
       std::nullopt},
  };
  return table;
}

const std::vector<CorpusSpec>& corpus_specs() {
  using E = CorpusSpec::Expect;
  static const std::vector<CorpusSpec> table = {
      {1, "PFAC(I,J)", "Is I a proper factor of J?", E::Synthesize},
      {2, "PFAC(x,I) ^ (all A)(~PFAC(A,I) v ~LT(A,x))", "Smallest proper factor.", E::Stretch},
      {3, "PRIME(x) ^ FAC(x,I) ^ (all A)(~PRIME(A) v ~FAC(A,I) v ~LT(A,x))",
       "Smallest prime factor.", E::Stretch},
      {4, "LT(I,x) ^ PRIME(x) ^ (all A)(~LT(I,A) v ~LT(A,x) v ~PRIME(A))",
       "Next prime after I.", E::Stretch},
      {5, "(exists A)(PRIME(A) ^ BETW(I,A,J))", "Is there a prime between two numbers?",
       E::Synthesize},
      {6, "~PRIME(x) ^ BETW(I,x,J)", "List the composites between two numbers.", E::Synthesize},
      {7, "FAC(x,I) ^ FAC(x,J)", "List the common factors of two numbers.", E::Synthesize},
      {8, "(exists A)(PFAC(A,I) ^ PFAC(A,J))", "Do two numbers share a proper factor?",
       E::Synthesize},
      {9, "(exists A)(FAC(A,I) ^ FAC(A,J) ^ PRIME(A))", "Do two numbers share a prime factor?",
       E::Synthesize},
      {10, "MUL(x,x,I)", "Integer square root, if it exists.", E::Unsupported},
  };
  return table;
}

}  // namespace phpsynth
