#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "phpsynth/calculus.hpp"
#include "phpsynth/programs.hpp"
#include "phpsynth/specs.hpp"

namespace phpsynth {

struct Value {
  enum class Kind { Int, Bool };
  Kind kind = Kind::Int;
  std::uint64_t v = 0;

  static Value integer(std::uint64_t x) { return {Kind::Int, x}; }
  static Value boolean(bool b) { return {Kind::Bool, b ? 1u : 0u}; }
  bool is_bool() const { return kind == Kind::Bool; }

  friend auto operator<=>(const Value&, const Value&) = default;
};

/// Integers print in decimal, booleans as TRUE / FALSE.
std::string to_string(const Value& v);

/// Input rank -> value. Every value is a positive integer.
using Env = std::map<std::uint64_t, std::uint64_t>;

struct RunResult {
  std::vector<Value> outputs;
  std::uint64_t steps = 0;
};

class RuntimeError : public std::runtime_error {
 public:
  enum class Kind { StepLimit, UnboundVariable, UnboundInput, Type, DivisionByZero, Overflow, BadInput };
  RuntimeError(Kind k, std::string msg) : std::runtime_error(std::move(msg)), kind_(k) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint64_t kDefaultStepLimit = 10'000'000;
inline constexpr std::uint64_t kDefaultOracleBound = 128;

/// Big-step evaluation; one step per command and per expression node.
RunResult run(const Program& p, const Env& env, std::uint64_t step_limit = kDefaultStepLimit);

/// Direct semantics of the eight relations. Quantifiers range over
/// [1..B] (or [0..B] for a variable used as a REM remainder) with
/// B = max(bound, largest input).
bool oracle_decide(const Wff& w, const Env& env, std::uint64_t bound = kDefaultOracleBound);
std::vector<std::uint64_t> oracle_list(const Wff& w, const Env& env,
                                       std::uint64_t bound = kDefaultOracleBound);

enum class CompareMode { Set, Multiset };

/// Inclusive value range per input rank.
struct Grid {
  std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> ranges;
  static Grid uniform(const std::vector<std::uint64_t>& ranks, std::uint64_t lo, std::uint64_t hi);
  std::size_t size() const;
  std::vector<Env> envs() const;
};

struct EnvVerdict {
  Env env;
  bool ok = false;
  std::string detail;
  std::uint64_t steps = 0;
};

struct CheckReport {
  std::size_t envs = 0;
  std::size_t disagreements = 0;
  std::uint64_t max_steps = 0;
  std::uint64_t total_steps = 0;
  std::vector<EnvVerdict> verdicts;  // failures always; passes when keep_passes
  bool ok() const { return disagreements == 0; }
  nlohmann::json to_json() const;
};

struct CheckOptions {
  CompareMode mode = CompareMode::Multiset;
  std::uint64_t bound = kDefaultOracleBound;
  std::uint64_t step_limit = kDefaultStepLimit;
  bool keep_passes = false;
};

/// Runs the judgment's program on every grid point and compares with the
/// oracle of its specification.
CheckReport check_judgment(const Judgment& j, const Grid& grid, const CheckOptions& opts = {});

}  // namespace phpsynth
