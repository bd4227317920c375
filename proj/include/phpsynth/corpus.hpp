#pragma once

#include <optional>
#include <string>
#include <vector>

namespace phpsynth {

/// Theorems 1..10, in dependency order. `golden` is the reference program
/// text (compared with normalize_text) where one is published.
struct CorpusTheorem {
  std::string name;
  std::string spec;
  std::string description;
  std::optional<std::string> golden;
};
const std::vector<CorpusTheorem>& corpus_theorems();

/// Further specifications exercised by `corpus`. Required rows must
/// synthesize and verify; the others must at least be reported correctly.
struct CorpusSpec {
  int number;
  std::string spec;
  std::string description;
  enum class Expect { Synthesize, Stretch, Unsupported } expect;
};
const std::vector<CorpusSpec>& corpus_specs();

}  // namespace phpsynth
