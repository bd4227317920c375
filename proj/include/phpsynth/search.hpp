#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phpsynth/calculus.hpp"
#include "phpsynth/specs.hpp"

namespace phpsynth {

struct Theorem {
  std::string name;
  Wff goal;            // as requested, before forall elimination
  Judgment judgment;   // program possibly CR1-simplified
  Derivation derivation;
};

/// Previously synthesized judgments, looked up modulo bijective renaming of
/// inputs. Readers may run concurrently; adds take an exclusive lock.
class TheoremStore {
 public:
  TheoremStore() = default;
  TheoremStore(const TheoremStore& other);
  TheoremStore& operator=(const TheoremStore& other);

  /// Validates the derivation by replay before storing. Replaces an entry
  /// with the same name.
  void add(Theorem t);
  const Theorem* by_name(const std::string& name) const;
  /// Theorem whose goal equals `goal` up to input renaming.
  const Theorem* find(const Wff& goal) const;
  std::vector<const Theorem*> all() const;  // insertion order
  std::size_t size() const;
  TheoremResolver resolver() const;

  nlohmann::json to_json() const;
  static TheoremStore from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  /// Missing file yields an empty store.
  static TheoremStore load(const std::string& path);

 private:
  mutable std::shared_mutex mu_;
  std::vector<std::unique_ptr<Theorem>> items_;
  std::map<std::string, std::size_t> by_name_;
  std::map<std::string, std::size_t> by_key_;
};

struct SearchConfig {
  std::size_t max_depth = 24;     // proof-tree height
  std::size_t max_def_chain = 6;  // consecutive DEF rewrites
  bool unrestricted_eq = false;   // DEF-EQ on variable arguments too
  bool theorems_first = true;     // else axioms are tried before theorems
};

/// One way to replace a goal: entries resolved now plus argument subgoals.
/// The entries of a decomposition follow the subgoal solutions in postfix
/// order; for leaves there are no subgoals.
struct Alternative {
  enum class Kind { Theorem, Axiom, Def, Rule };
  Kind kind = Kind::Axiom;
  std::string label;  // e.g. "AX3", "DEF-BETW", "inverse DO:K=x"
  std::vector<Wff> subgoals;
  std::vector<DerivationEntry> entries;
};

std::vector<Alternative> expand(const Wff& goal, const TheoremStore& store,
                                const SearchConfig& cfg = {});

class SearchExhausted : public std::runtime_error {
 public:
  SearchExhausted(std::string msg, std::vector<std::string> frontier)
      : std::runtime_error(std::move(msg)), frontier_(std::move(frontier)) {}
  /// Dead-end subgoals, most telling first.
  const std::vector<std::string>& frontier() const { return frontier_; }

 private:
  std::vector<std::string> frontier_;
};

/// Proof tree as found by the backward search.
struct ProofNode {
  Wff goal;
  Alternative alt;
  std::vector<ProofNode> children;
  std::size_t height() const;
};

struct SynthesisResult {
  Derivation derivation;
  Judgment judgment;
  ProofNode proof;
  std::size_t goals_expanded = 0;
};

/// Throws SpecError for unclassifiable goals and SearchExhausted when no
/// proof exists within the configured bounds. With a name, the result is
/// also stored as a theorem.
SynthesisResult synthesize(const Wff& goal, const SearchConfig& cfg, TheoremStore& store,
                           const std::optional<std::string>& name = std::nullopt);

/// Numbered backward proof: each step replaces the first open specification.
/// Newly created wffs are wrapped in `**`.
std::string backward_trace(const ProofNode& proof);
nlohmann::json backward_trace_json(const ProofNode& proof);

struct BootstrapRow {
  std::string name;
  std::string spec;
  std::string program;
  std::size_t entries = 0;
};

/// Synthesizes theorems 1..10 in dependency order, skipping names already
/// present in the store.
std::vector<BootstrapRow> bootstrap_theorems(TheoremStore& store, const SearchConfig& cfg = {});

}  // namespace phpsynth
