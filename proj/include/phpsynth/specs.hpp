#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace phpsynth {

/// Variable and literal terms of a specification.
///
/// Input ranks render as I, J, K, I4, ...; outputs as x, y, z, x4, ...;
/// quantified variables as A, B, C, A4, ....  Component terms (a, b, c, ...)
/// only occur inside DEF patterns.
enum class TermKind { Input, Output, Bound, Literal, Component };

struct Term {
  TermKind kind = TermKind::Literal;
  std::uint64_t value = 0;  // rank, or the literal's value

  static Term input(std::uint64_t rank) { return {TermKind::Input, rank}; }
  static Term output(std::uint64_t rank) { return {TermKind::Output, rank}; }
  static Term bound(std::uint64_t rank) { return {TermKind::Bound, rank}; }
  static Term literal(std::uint64_t v) { return {TermKind::Literal, v}; }
  static Term component(std::uint64_t rank) { return {TermKind::Component, rank}; }

  bool is_var() const { return kind != TermKind::Literal; }
  friend auto operator<=>(const Term&, const Term&) = default;
};

enum class Relation { EQ, LT, BETW, MUL, FAC, REM, PFAC, PRIME };

std::size_t arity(Relation r);
std::string_view relation_name(Relation r);
std::optional<Relation> relation_from_name(std::string_view name);

/// Name of a term in spec notation, e.g. "J", "x4", "A", "\"100\"".
std::string term_name(const Term& t);

enum class WffKind { Atom, Not, And, Or, Exists, Forall };

/// A predicate-calculus specification. Immutable by convention: every
/// transformation returns a new tree.
struct Wff {
  WffKind kind = WffKind::Atom;
  Relation rel = Relation::EQ;
  std::vector<Term> args;    // Atom
  std::uint64_t var = 0;     // Exists / Forall: bound rank
  std::vector<Wff> sub;      // children

  static Wff atom(Relation r, std::vector<Term> args);
  static Wff negation(Wff p);
  static Wff conj(Wff p, Wff q);
  static Wff disj(Wff p, Wff q);
  static Wff exists(std::uint64_t rank, Wff body);
  static Wff forall(std::uint64_t rank, Wff body);

  friend bool operator==(const Wff&, const Wff&) = default;
};

using Path = std::vector<std::size_t>;

/// Error raised by the spec parser and DEF machinery.
class SpecError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Arity, Unbound, NoMatch, BadPath, Unsupported };
  SpecError(Kind kind, std::string msg, std::size_t pos = 0)
      : std::runtime_error(std::move(msg)), kind_(kind), pos_(pos) {}
  Kind kind() const { return kind_; }
  std::size_t position() const { return pos_; }

 private:
  Kind kind_;
  std::size_t pos_;
};

// Concrete notation: `^` and, `v` or, `~` not, `(exists A)` / `(all A)`,
// quoted decimal literals. Precedence ~ > ^ > v; a quantifier binds the
// next unary unit only, so `(exists A)P(A)^Q` is `((exists A)P(A))^Q`.
Wff parse_spec(std::string_view text);
std::string render_spec(const Wff& w);

nlohmann::json spec_to_json(const Wff& w);
Wff spec_from_json(const nlohmann::json& j);

enum class SpecKind { Decide, List, ConditionalList };
std::string_view kind_name(SpecKind k);

/// Throws SpecError(Unsupported) for shapes no rule can discharge.
SpecKind classify(const Wff& w);
std::optional<SpecKind> try_classify(const Wff& w);

// Variable queries.
std::vector<std::uint64_t> input_ranks(const Wff& w);   // first-occurrence order
std::vector<std::uint64_t> output_ranks(const Wff& w);  // first-occurrence order
std::uint64_t max_input_rank(const Wff& w);
std::uint64_t max_bound_rank(const Wff& w);
bool mentions(const Wff& w, const Term& t);
bool is_closed(const Wff& w);

/// Simultaneous replacement of terms (free occurrences only for bound vars).
Wff replace_terms(const Wff& w, const std::map<Term, Term>& repl);

/// Input binding used by SUB: input rank -> input variable or literal.
using InputBinding = std::map<std::uint64_t, Term>;
Wff apply_binding(const Wff& w, const InputBinding& b);
std::string render_binding(const InputBinding& b);

/// Bound variables renamed in binder pre-order and double negations removed.
/// Two wffs are the same specification iff their canonical forms are equal.
Wff canonical(const Wff& w);
bool same_spec(const Wff& a, const Wff& b);

/// Canonical key up to bijective renaming of inputs as well.
std::string goal_key(const Wff& w);

/// `(all A)P` rewritten to `~(exists A)~P` everywhere.
Wff eliminate_forall(const Wff& w);

const Wff& subtree(const Wff& w, const Path& p);
Wff replace_subtree(const Wff& w, const Path& p, Wff repl);
std::vector<Path> all_paths(const Wff& w);  // pre-order

// ---------------------------------------------------------------------------
// DEF table

enum class DefId { BETW, FAC, PFAC, PRIME, REM, MUL, MULT, AND_COMM, EQ };
inline constexpr DefId kAllDefs[] = {DefId::BETW, DefId::FAC,  DefId::PFAC,
                                     DefId::PRIME, DefId::REM, DefId::MUL,
                                     DefId::MULT, DefId::AND_COMM, DefId::EQ};

std::string_view def_name(DefId d);
std::optional<DefId> def_from_name(std::string_view name);

/// forward rewrites the left side of a DEF into its right side.
enum class Direction { Forward, Backward };
inline Direction reverse(Direction d) {
  return d == Direction::Forward ? Direction::Backward : Direction::Forward;
}

struct DefRule {
  DefId id;
  Wff lhs;  // patterns over component terms; DEF-EQ is schematic (lhs empty)
  Wff rhs;
};
const std::vector<DefRule>& def_table();

/// Rewrites the subtree at `path`. For DEF-EQ forward, `arg` selects the atom
/// argument that is abstracted (default: last literal argument).
Wff apply_def(DefId def, const Wff& w, const Path& path, Direction dir,
              std::optional<std::size_t> arg = std::nullopt);
std::optional<Wff> try_apply_def(DefId def, const Wff& w, const Path& path,
                                 Direction dir,
                                 std::optional<std::size_t> arg = std::nullopt);

/// Structural quantifier-scope move, not one of the DEFs:
/// forward  `(exists A)(P ^ Q)` -> `((exists A)P) ^ Q` (A not free in Q) and
/// the mirrored `(exists A)(P ^ Q)` -> `P ^ (exists A)Q`;
/// backward is the inverse.
std::optional<Wff> try_apply_scope(const Wff& w, const Path& path, Direction dir);

/// Finds the SUB that maps `axiom_spec` onto `goal`.
std::optional<InputBinding> match_axiom(const Wff& goal, const Wff& axiom_spec);

}  // namespace phpsynth
