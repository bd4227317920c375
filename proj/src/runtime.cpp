#include "phpsynth/runtime.hpp"

#include <algorithm>
#include <functional>

namespace phpsynth {

std::string to_string(const Value& v) {
  if (v.is_bool()) return v.v ? "TRUE" : "FALSE";
  return std::to_string(v.v);
}

// ---------------------------------------------------------------------------
// Interpreter

namespace {

class Machine {
 public:
  Machine(const Env& env, std::uint64_t limit) : env_(env), limit_(limit) {}

  void exec(const Cmd& c) {
    tick();
    switch (c.kind) {
      case CmdKind::Echo:
        out_.outputs.push_back(eval(c.expr));
        break;
      case CmdKind::Assign:
        assign(c.target, eval(c.expr));
        break;
      case CmdKind::Inc: {
        Value v = read(c.target);
        if (v.is_bool()) type_error("++ on a boolean");
        assign(c.target, Value::integer(v.v + 1));
        break;
      }
      case CmdKind::If:
        if (truth(eval(c.expr))) exec(c.body[0]);
        break;
      case CmdKind::For:
        exec(c.body[0]);
        while (truth(eval(c.expr))) {
          exec(c.body[2]);
          exec(c.body[1]);
        }
        break;
      case CmdKind::Block:
        for (const auto& s : c.body) exec(s);
        break;
    }
  }

  RunResult result() && {
    out_.steps = steps_;
    return std::move(out_);
  }

 private:
  void tick() {
    if (++steps_ > limit_)
      throw RuntimeError(RuntimeError::Kind::StepLimit,
                         "step limit of " + std::to_string(limit_) + " exceeded");
  }

  [[noreturn]] static void type_error(const std::string& what) {
    throw RuntimeError(RuntimeError::Kind::Type, "type error: " + what);
  }

  static bool truth(const Value& v) {
    if (!v.is_bool()) type_error("condition is not boolean");
    return v.v != 0;
  }

  static std::uint64_t number(const Value& v) {
    if (v.is_bool()) type_error("boolean used as integer");
    return v.v;
  }

  void assign(const Var& v, Value x) {
    if (v.kind == VarKind::Input)
      throw RuntimeError(RuntimeError::Kind::Type, "assignment to input " + var_name(v));
    vars_[v] = x;
  }

  Value read(const Var& v) const {
    if (v.kind == VarKind::Input) {
      auto it = env_.find(v.rank);
      if (it == env_.end())
        throw RuntimeError(RuntimeError::Kind::UnboundInput, "input " + var_name(v) + " not given");
      return Value::integer(it->second);
    }
    auto it = vars_.find(v);
    if (it == vars_.end())
      throw RuntimeError(RuntimeError::Kind::UnboundVariable,
                         "read of unassigned variable " + var_name(v));
    return it->second;
  }

  Value eval(const Expr& e) {
    tick();
    switch (e.kind) {
      case ExprKind::Bool:
        return Value::boolean(e.value != 0);
      case ExprKind::Int:
        return Value::integer(e.value);
      case ExprKind::Var:
        return read(e.var);
      case ExprKind::Paren:
        return eval(e.ops[0]);
      case ExprKind::Not:
        return Value::boolean(!truth(eval(e.ops[0])));
      case ExprKind::And:
        return Value::boolean(truth(eval(e.ops[0])) && truth(eval(e.ops[1])));
      case ExprKind::Or:
        return Value::boolean(truth(eval(e.ops[0])) || truth(eval(e.ops[1])));
      case ExprKind::Eq: {
        auto l = number(eval(e.ops[0]));
        return Value::boolean(l == number(eval(e.ops[1])));
      }
      case ExprKind::Lt: {
        auto l = number(eval(e.ops[0]));
        return Value::boolean(l < number(eval(e.ops[1])));
      }
      case ExprKind::Mul: {
        auto l = number(eval(e.ops[0]));
        auto r = number(eval(e.ops[1]));
        std::uint64_t p;
        if (__builtin_mul_overflow(l, r, &p))
          throw RuntimeError(RuntimeError::Kind::Overflow, "integer overflow in *");
        return Value::integer(p);
      }
      case ExprKind::Rem: {
        auto l = number(eval(e.ops[0]));
        auto r = number(eval(e.ops[1]));
        if (r == 0) throw RuntimeError(RuntimeError::Kind::DivisionByZero, "remainder by zero");
        return Value::integer(l % r);
      }
      case ExprKind::Hole:
        break;
    }
    throw RuntimeError(RuntimeError::Kind::Type, "template hole in executable program");
  }

  const Env& env_;
  std::uint64_t limit_;
  std::uint64_t steps_ = 0;
  std::map<Var, Value> vars_;
  RunResult out_;
};

}  // namespace

RunResult run(const Program& p, const Env& env, std::uint64_t step_limit) {
  for (const auto& [rank, v] : env)
    if (v == 0)
      throw RuntimeError(RuntimeError::Kind::BadInput,
                         "input " + var_name({VarKind::Input, rank}) + " must be a positive integer");
  Machine m(env, step_limit);
  for (const auto& c : p.cmds) m.exec(c);
  return std::move(m).result();
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

bool has_factor(std::uint64_t a, std::uint64_t b) {
  // exists A >= 1 with A*a = b
  if (a == 0) return b == 0;
  return b != 0 && b % a == 0;
}

bool proper_factor(std::uint64_t a, std::uint64_t b) {
  return has_factor(a, b) && 1 < a && a < b;
}

bool prime(std::uint64_t a) {
  if (a < 2) return false;
  for (std::uint64_t d = 2; d * d <= a; ++d)
    if (a % d == 0) return false;
  return true;
}

bool relation_holds(Relation r, const std::vector<std::uint64_t>& v) {
  switch (r) {
    case Relation::EQ:
      return v[0] == v[1];
    case Relation::LT:
      return v[0] < v[1];
    case Relation::BETW:
      return v[0] < v[1] && v[1] < v[2];
    case Relation::MUL:
      return v[0] * v[1] == v[2];
    case Relation::FAC:
      return has_factor(v[0], v[1]);
    case Relation::REM:
      return v[1] != 0 && v[0] % v[1] == v[2];
    case Relation::PFAC:
      return proper_factor(v[0], v[1]);
    case Relation::PRIME:
      return prime(v[0]);
  }
  return false;
}

// Lowest value a variable ranges over: remainders may be 0.
std::uint64_t lowest_value(const Wff& w, const Term& t) {
  bool remainder = false;
  std::function<void(const Wff&)> go = [&](const Wff& x) {
    if (x.kind == WffKind::Atom && x.rel == Relation::REM && x.args[2] == t) remainder = true;
    for (const auto& s : x.sub) go(s);
  };
  go(w);
  return remainder ? 0 : 1;
}

struct Oracle {
  std::uint64_t limit;
  std::map<Term, std::uint64_t> values;

  std::uint64_t value(const Term& t) const {
    if (t.kind == TermKind::Literal) return t.value;
    auto it = values.find(t);
    if (it == values.end())
      throw RuntimeError(RuntimeError::Kind::UnboundInput, "oracle: " + term_name(t) + " has no value");
    return it->second;
  }

  bool eval(const Wff& w) {
    switch (w.kind) {
      case WffKind::Atom: {
        std::vector<std::uint64_t> v;
        v.reserve(w.args.size());
        for (const auto& t : w.args) v.push_back(value(t));
        return relation_holds(w.rel, v);
      }
      case WffKind::Not:
        return !eval(w.sub[0]);
      case WffKind::And:
        return eval(w.sub[0]) && eval(w.sub[1]);
      case WffKind::Or:
        return eval(w.sub[0]) || eval(w.sub[1]);
      case WffKind::Exists:
      case WffKind::Forall: {
        Term a = Term::bound(w.var);
        bool want = w.kind == WffKind::Exists;
        bool result = !want;
        for (std::uint64_t i = lowest_value(w.sub[0], a); i <= limit; ++i) {
          values[a] = i;
          if (eval(w.sub[0]) == want) {
            result = want;
            break;
          }
        }
        values.erase(a);
        return result;
      }
    }
    return false;
  }
};

// The domain covers every input and literal; a product needs the square of
// the largest of them.
Oracle make_oracle(const Wff& w, const Env& env, std::uint64_t bound) {
  Oracle o{bound, {}};
  std::uint64_t largest = 0;
  for (const auto& [rank, v] : env) {
    o.values[Term::input(rank)] = v;
    largest = std::max(largest, v);
  }
  bool product = false;
  std::function<void(const Wff&)> scan = [&](const Wff& x) {
    if (x.kind == WffKind::Atom) {
      if (x.rel == Relation::MUL) product = true;
      for (const auto& t : x.args)
        if (t.kind == TermKind::Literal) largest = std::max(largest, t.value);
    }
    for (const auto& s : x.sub) scan(s);
  };
  scan(w);
  o.limit = std::max(o.limit, largest);
  if (product) o.limit = std::max(o.limit, largest * largest);
  return o;
}

}  // namespace

bool oracle_decide(const Wff& w, const Env& env, std::uint64_t bound) {
  Oracle o = make_oracle(w, env, bound);
  return o.eval(w);
}

std::vector<std::uint64_t> oracle_list(const Wff& w, const Env& env, std::uint64_t bound) {
  auto outs = output_ranks(w);
  if (outs.size() != 1) throw SpecError(SpecError::Kind::Unsupported, "oracle_list needs one output variable");
  Term x = Term::output(outs[0]);
  Oracle o = make_oracle(w, env, bound);
  std::vector<std::uint64_t> result;
  for (std::uint64_t v = lowest_value(w, x); v <= o.limit; ++v) {
    o.values[x] = v;
    if (o.eval(w)) result.push_back(v);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Checking

Grid Grid::uniform(const std::vector<std::uint64_t>& ranks, std::uint64_t lo, std::uint64_t hi) {
  Grid g;
  for (auto r : ranks) g.ranges[r] = {lo, hi};
  return g;
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (const auto& [r, range] : ranges) n *= range.second >= range.first ? range.second - range.first + 1 : 0;
  return n;
}

std::vector<Env> Grid::envs() const {
  std::vector<Env> out;
  Env cur;
  std::vector<std::pair<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>>> rs(ranges.begin(),
                                                                                    ranges.end());
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == rs.size()) {
      out.push_back(cur);
      return;
    }
    for (std::uint64_t v = rs[i].second.first; v <= rs[i].second.second; ++v) {
      cur[rs[i].first] = v;
      go(i + 1);
    }
    cur.erase(rs[i].first);
  };
  go(0);
  return out;
}

namespace {

std::string env_text(const Env& env) {
  std::string s;
  for (const auto& [r, v] : env) {
    if (!s.empty()) s += ",";
    s += var_name({VarKind::Input, r}).substr(1) + "=" + std::to_string(v);
  }
  return s;
}

std::string values_text(const std::vector<Value>& vs) {
  std::string s = "[";
  for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? "," : "") + to_string(vs[i]);
  return s + "]";
}

}  // namespace

nlohmann::json CheckReport::to_json() const {
  nlohmann::json verdict_list = nlohmann::json::array();
  nlohmann::json first_failure = nullptr;
  for (const auto& v : verdicts) {
    nlohmann::json jv{{"env", env_text(v.env)}, {"ok", v.ok}, {"steps", v.steps}};
    if (!v.ok) {
      jv["detail"] = v.detail;
      if (first_failure.is_null()) first_failure = jv;
    }
    verdict_list.push_back(jv);
  }
  return {{"envs", envs},           {"disagreements", disagreements},
          {"max_steps", max_steps}, {"total_steps", total_steps},
          {"first_failure", first_failure}, {"verdicts", verdict_list}};
}

CheckReport check_judgment(const Judgment& j, const Grid& grid, const CheckOptions& opts) {
  Wff spec = eliminate_forall(j.spec);
  SpecKind kind = classify(spec);
  for (auto r : input_ranks(spec))
    if (!grid.ranges.count(r))
      throw SpecError(SpecError::Kind::Unsupported,
                      "grid does not cover input " + term_name(Term::input(r)));
  CheckReport report;
  for (const Env& env : grid.envs()) {
    ++report.envs;
    EnvVerdict verdict{env, false, {}, 0};
    try {
      RunResult r = run(j.program, env, opts.step_limit);
      verdict.steps = r.steps;
      report.max_steps = std::max(report.max_steps, r.steps);
      report.total_steps += r.steps;
      if (kind == SpecKind::Decide) {
        bool expect = oracle_decide(spec, env, opts.bound);
        verdict.ok = r.outputs.size() == 1 && r.outputs[0] == Value::boolean(expect);
        if (!verdict.ok)
          verdict.detail = "expected [" + std::string(expect ? "TRUE" : "FALSE") + "], got " +
                           values_text(r.outputs);
      } else {
        auto expect = oracle_list(spec, env, opts.bound);
        std::vector<std::uint64_t> got;
        bool typed = true;
        for (const auto& v : r.outputs) {
          if (v.is_bool()) typed = false;
          got.push_back(v.v);
        }
        std::sort(got.begin(), got.end());
        if (opts.mode == CompareMode::Set) got.erase(std::unique(got.begin(), got.end()), got.end());
        verdict.ok = typed && got == expect;
        if (!verdict.ok) {
          std::vector<Value> ev;
          for (auto v : expect) ev.push_back(Value::integer(v));
          verdict.detail = "expected " + values_text(ev) + ", got " + values_text(r.outputs);
        }
      }
    } catch (const RuntimeError& err) {
      verdict.detail = err.what();
    }
    if (!verdict.ok) ++report.disagreements;
    if (!verdict.ok || opts.keep_passes) report.verdicts.push_back(std::move(verdict));
  }
  return report;
}

}  // namespace phpsynth
