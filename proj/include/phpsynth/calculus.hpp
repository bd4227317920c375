#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phpsynth/programs.hpp"
#include "phpsynth/specs.hpp"

namespace phpsynth {

/// `PROG # SPEC`: the program meets the specification.
struct Judgment {
  Program program;
  Wff spec;
  friend bool operator==(const Judgment&, const Judgment&) = default;
};

struct Axiom {
  int id;
  Judgment judgment;
};

class CalculusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<Axiom>& axioms();
const Judgment& axiom_lookup(int id);

// Rules of inference. Each throws CalculusError when its precondition fails.
Judgment rule_sub(const Judgment& j, const InputBinding& binding);
Judgment rule_not(const Judgment& j);
Judgment rule_and(const Judgment& m, const Judgment& n);
Judgment rule_do(const Judgment& m, const Judgment& n, std::uint64_t target);
Judgment rule_if(const Judgment& m, const Judgment& n);
Judgment rule_union(const Judgment& m, const Judgment& n);
Judgment rule_quit(const Judgment& m);

struct DerivationEntry {
  enum class Kind { Axiom, Theorem, Sub, Not, And, Do, If, Union, Quit, Def, Scope };
  Kind kind = Kind::Axiom;
  int axiom = 0;
  std::string theorem;
  InputBinding binding;       // Sub
  std::uint64_t target = 0;   // Do: input rank receiving the listed value
  DefId def = DefId::BETW;    // Def
  Path path;                  // Def, Scope
  Direction dir = Direction::Forward;
  std::optional<std::size_t> arg;  // Def EQ

  static DerivationEntry axiom_ref(int id);
  static DerivationEntry theorem_ref(std::string name);
  static DerivationEntry sub(InputBinding b);
  static DerivationEntry rule(Kind k);
  static DerivationEntry do_rule(std::uint64_t target);
  static DerivationEntry def_app(DefId d, Path p, Direction dir,
                                 std::optional<std::size_t> arg = std::nullopt);
  static DerivationEntry scope(Path p, Direction dir);

  /// Number of stack items consumed (0 for pushes).
  std::size_t arity() const;
  friend bool operator==(const DerivationEntry&, const DerivationEntry&) = default;
};

std::string entry_text(const DerivationEntry& e);
nlohmann::json entry_to_json(const DerivationEntry& e);
DerivationEntry entry_from_json(const nlohmann::json& j);

/// Postfix list of entries evaluated on an execution stack.
struct Derivation {
  std::vector<DerivationEntry> entries;
  Wff goal;
};

nlohmann::json derivation_to_json(const Derivation& d);
Derivation derivation_from_json(const nlohmann::json& j);

/// Resolves TheoremRef entries; returns nullptr for unknown names.
using TheoremResolver = std::function<const Judgment*(const std::string&)>;

Judgment apply_entry(const DerivationEntry& e, std::vector<Judgment>& stack,
                     const TheoremResolver& theorems);
Judgment eval_derivation(const Derivation& d, const TheoremResolver& theorems = {});

struct ReplayResult {
  bool ok = false;
  std::string reason;
  std::optional<Judgment> judgment;
};
ReplayResult replay(const Derivation& d, const TheoremResolver& theorems = {});
inline bool replay_check(const Derivation& d, const TheoremResolver& theorems = {}) {
  return replay(d, theorems).ok;
}

/// Numbered `n. <entry> <program> # <spec>` lines of the stack construction.
std::string forward_trace(const Derivation& d, const TheoremResolver& theorems = {});

}  // namespace phpsynth
