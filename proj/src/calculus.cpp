#include "phpsynth/calculus.hpp"

#include <algorithm>

namespace phpsynth {

const std::vector<Axiom>& axioms() {
  static const std::vector<Axiom> table = [] {
    auto ax = [](int id, std::string_view prog, std::string_view spec) {
      return Axiom{id, Judgment{parse_program(prog), parse_spec(spec)}};
    };
    return std::vector<Axiom>{
        ax(1, "echo $i ;", "EQ(I,x)"),
        ax(2, "echo $i == $j ;", "EQ(I,J)"),
        ax(3, "echo $i < $j ;", "LT(I,J)"),
        ax(4, "echo $i * $j ;", "MUL(I,J,x)"),
        ax(5, "echo $i % $j ;", "REM(I,J,x)"),
        ax(6, "for ($a=1 ; $a < $i ; ++$a) echo $a ;", "LT(x,I)"),
        ax(7, "for ($a=1 ; !($i < $a) ; ++$a) echo $a ;", "~LT(I,x)"),
    };
  }();
  return table;
}

const Judgment& axiom_lookup(int id) {
  if (id < 1 || id > 7) throw CalculusError("unknown axiom " + std::to_string(id));
  return axioms()[static_cast<std::size_t>(id - 1)].judgment;
}

namespace {

// Rule templates, parsed once (function-local statics are thread-safe).
const Template& tpl(std::string_view text) {
  static const std::vector<std::pair<std::string, Template>> table = [] {
    std::vector<std::pair<std::string, Template>> t;
    for (const char* s : {"echo !([M]) ;", "echo ([M]) && ([N]) ;",
                          "{ if ([N]) echo [M] ; } ;", "{ if ([M]) echo [N] ; } ;"})
      t.emplace_back(s, parse_template(s));
    return t;
  }();
  for (const auto& [k, v] : table)
    if (k == text) return v;
  throw CalculusError("unknown rule template");
}

bool is_lister(const Wff& spec) {
  auto k = try_classify(spec);
  return k && *k != SpecKind::Decide;
}

void require_decide(const Judgment& j, const char* rule) {
  auto k = try_classify(j.spec);
  if (!k || *k != SpecKind::Decide)
    throw CalculusError(std::string(rule) + ": " + render_spec(j.spec) +
                        " is not a decide specification");
}

std::uint64_t require_lister(const Judgment& j, const char* rule) {
  if (!is_lister(j.spec))
    throw CalculusError(std::string(rule) + ": " + render_spec(j.spec) +
                        " is not a list specification");
  return output_ranks(j.spec).front();
}

// splice that leaves echo-free programs unchanged (listers of the empty set).
Program splice_all(const Program& m, const EchoReplacer& r) {
  if (echo_count(m) == 0) return m;
  return splice(m, r);
}

std::vector<Cmd> cmds_of(Program p) { return std::move(p.cmds); }

RankBound offset_for(const Program& host) { return max_prog_rank(host); }

}  // namespace

Judgment rule_sub(const Judgment& j, const InputBinding& binding) {
  auto inputs = input_ranks(j.spec);
  ExprBinding eb;
  for (const auto& [rank, t] : binding) {
    if (std::find(inputs.begin(), inputs.end(), rank) == inputs.end())
      throw CalculusError("SUB: " + term_name(Term::input(rank)) + " does not occur in " +
                          render_spec(j.spec));
    if (t.kind == TermKind::Input)
      eb[rank] = Expr::input(t.value);
    else if (t.kind == TermKind::Literal)
      eb[rank] = Expr::integer(t.value);
    else
      throw CalculusError("SUB: inputs may only be replaced by inputs or literals");
  }
  return {subst_inputs(j.program, eb), apply_binding(j.spec, binding)};
}

Judgment rule_not(const Judgment& j) {
  require_decide(j, "NOT");
  Program p = splice(j.program, tpl("echo !([M]) ;"));
  Wff spec = j.spec.kind == WffKind::Not ? j.spec.sub[0] : Wff::negation(j.spec);
  return {std::move(p), std::move(spec)};
}

Judgment rule_and(const Judgment& m, const Judgment& n) {
  require_decide(m, "AND");
  require_decide(n, "AND");
  Program n1 = shift_ranks(n.program, offset_for(m.program));
  const Template& t = tpl("echo ([M]) && ([N]) ;");
  Program p = splice(m.program, [&](const Expr& e) {
    return cmds_of(splice(n1, [&](const Expr& f) {
      return fill(t, {{HoleId::M, e}, {HoleId::N, f}});
    }));
  });
  return {std::move(p), Wff::conj(m.spec, n.spec)};
}

Judgment rule_do(const Judgment& m, const Judgment& n, std::uint64_t target) {
  std::uint64_t x = require_lister(m, "DO");
  require_decide(n, "DO");
  auto inputs = input_ranks(n.spec);
  if (std::find(inputs.begin(), inputs.end(), target) == inputs.end())
    throw CalculusError("DO: " + term_name(Term::input(target)) + " is not an input of " +
                        render_spec(n.spec));
  Program n1 = shift_ranks(n.program, offset_for(m.program));
  const Template& t = tpl("{ if ([N]) echo [M] ; } ;");
  Program p = splice(m.program, [&](const Expr& e) {
    Expr arg = e.is_leaf() || e.kind == ExprKind::Paren ? e : Expr::paren(e);
    Program n2 = subst_inputs(n1, {{target, arg}});
    return cmds_of(splice(n2, [&](const Expr& f) {
      return fill(t, {{HoleId::N, f}, {HoleId::M, e}});
    }));
  });
  Wff q = replace_terms(n.spec, {{Term::input(target), Term::output(x)}});
  return {std::move(p), Wff::conj(m.spec, std::move(q))};
}

Judgment rule_if(const Judgment& m, const Judgment& n) {
  require_decide(m, "IF");
  require_lister(n, "IF");
  Program n1 = shift_ranks(n.program, offset_for(m.program));
  const Template& t = tpl("{ if ([M]) echo [N] ; } ;");
  Program p = splice(m.program, [&](const Expr& e) {
    return cmds_of(splice_all(n1, [&](const Expr& f) {
      return fill(t, {{HoleId::M, e}, {HoleId::N, f}});
    }));
  });
  return {std::move(p), Wff::conj(m.spec, n.spec)};
}

Judgment rule_union(const Judgment& m, const Judgment& n) {
  std::uint64_t x = require_lister(m, "UNION");
  std::uint64_t y = require_lister(n, "UNION");
  if (x != y) throw CalculusError("UNION: operands list different output variables");
  Program p = m.program;
  for (auto& c : shift_ranks(n.program, offset_for(m.program)).cmds) p.cmds.push_back(c);
  return {std::move(p), Wff::disj(m.spec, n.spec)};
}

Judgment rule_quit(const Judgment& m) {
  std::uint64_t x = require_lister(m, "QUIT");
  Var flag{VarKind::Flag, max_prog_rank(m.program).flag + 1};
  Program p;
  p.cmds.push_back(Cmd::assign(flag, Expr::boolean(false)));
  for (auto& c : splice_all(m.program, [&](const Expr&) {
                   return std::vector<Cmd>{Cmd::assign(flag, Expr::boolean(true))};
                 }).cmds)
    p.cmds.push_back(std::move(c));
  p.cmds.push_back(Cmd::echo(Expr::variable(flag)));
  std::uint64_t a = max_bound_rank(m.spec) + 1;
  Wff body = replace_terms(m.spec, {{Term::output(x), Term::bound(a)}});
  return {std::move(p), Wff::exists(a, std::move(body))};
}

// ---------------------------------------------------------------------------
// Entries

using Kind = DerivationEntry::Kind;

DerivationEntry DerivationEntry::axiom_ref(int id) {
  DerivationEntry e;
  e.kind = Kind::Axiom;
  e.axiom = id;
  return e;
}

DerivationEntry DerivationEntry::theorem_ref(std::string name) {
  DerivationEntry e;
  e.kind = Kind::Theorem;
  e.theorem = std::move(name);
  return e;
}

DerivationEntry DerivationEntry::sub(InputBinding b) {
  DerivationEntry e;
  e.kind = Kind::Sub;
  e.binding = std::move(b);
  return e;
}

DerivationEntry DerivationEntry::rule(Kind k) {
  DerivationEntry e;
  e.kind = k;
  return e;
}

DerivationEntry DerivationEntry::do_rule(std::uint64_t target) {
  DerivationEntry e;
  e.kind = Kind::Do;
  e.target = target;
  return e;
}

DerivationEntry DerivationEntry::def_app(DefId d, Path p, Direction dir,
                                         std::optional<std::size_t> arg) {
  DerivationEntry e;
  e.kind = Kind::Def;
  e.def = d;
  e.path = std::move(p);
  e.dir = dir;
  e.arg = arg;
  return e;
}

DerivationEntry DerivationEntry::scope(Path p, Direction dir) {
  DerivationEntry e;
  e.kind = Kind::Scope;
  e.path = std::move(p);
  e.dir = dir;
  return e;
}

std::size_t DerivationEntry::arity() const {
  switch (kind) {
    case Kind::Axiom:
    case Kind::Theorem:
      return 0;
    case Kind::And:
    case Kind::Do:
    case Kind::If:
    case Kind::Union:
      return 2;
    default:
      return 1;
  }
}

namespace {

std::string path_text(const Path& p) {
  std::string s = "@";
  if (p.empty()) return s + "root";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(p[i]);
  }
  return s;
}

constexpr std::pair<Kind, const char*> kKindNames[] = {
    {Kind::Axiom, "axiom"}, {Kind::Theorem, "theorem"}, {Kind::Sub, "sub"},
    {Kind::Not, "not"},     {Kind::And, "and"},         {Kind::Do, "do"},
    {Kind::If, "if"},       {Kind::Union, "union"},     {Kind::Quit, "quit"},
    {Kind::Def, "def"},     {Kind::Scope, "scope"}};

const char* kind_text(Kind k) {
  for (auto& [kk, n] : kKindNames)
    if (kk == k) return n;
  return "?";
}

Kind kind_from(const std::string& s) {
  for (auto& [kk, n] : kKindNames)
    if (s == n) return kk;
  throw CalculusError("unknown derivation entry kind '" + s + "'");
}

}  // namespace

std::string entry_text(const DerivationEntry& e) {
  switch (e.kind) {
    case Kind::Axiom:
      return "AX" + std::to_string(e.axiom);
    case Kind::Theorem:
      return "THM:" + e.theorem;
    case Kind::Sub:
      return "SUB:" + render_binding(e.binding);
    case Kind::Not:
      return "NOT";
    case Kind::And:
      return "AND";
    case Kind::Do:
      return "DO:" + term_name(Term::input(e.target)) + "=x";
    case Kind::If:
      return "IF";
    case Kind::Union:
      return "UNION";
    case Kind::Quit:
      return "QUIT";
    case Kind::Def: {
      std::string s = "DEF-" + std::string(def_name(e.def)) + " " + path_text(e.path);
      if (e.dir == Direction::Backward) s += " fold";
      if (e.arg) s += " arg" + std::to_string(*e.arg);
      return s;
    }
    case Kind::Scope:
      return std::string("SCOPE ") + path_text(e.path) +
             (e.dir == Direction::Forward ? " narrow" : " widen");
  }
  return "?";
}

nlohmann::json entry_to_json(const DerivationEntry& e) {
  nlohmann::json j{{"kind", kind_text(e.kind)}};
  switch (e.kind) {
    case Kind::Axiom:
      j["axiom"] = e.axiom;
      break;
    case Kind::Theorem:
      j["theorem"] = e.theorem;
      break;
    case Kind::Sub: {
      nlohmann::json b = nlohmann::json::object();
      for (const auto& [rank, t] : e.binding) {
        nlohmann::json jt{{"kind", t.kind == TermKind::Literal ? "literal" : "input"}};
        jt[t.kind == TermKind::Literal ? "value" : "rank"] = t.value;
        b[std::to_string(rank)] = jt;
      }
      j["binding"] = b;
      break;
    }
    case Kind::Do:
      j["target"] = e.target;
      break;
    case Kind::Def:
      j["def"] = def_name(e.def);
      [[fallthrough]];
    case Kind::Scope:
      j["path"] = e.path;
      j["direction"] = e.dir == Direction::Forward ? "forward" : "backward";
      if (e.arg) j["arg"] = *e.arg;
      break;
    default:
      break;
  }
  return j;
}

DerivationEntry entry_from_json(const nlohmann::json& j) {
  DerivationEntry e;
  e.kind = kind_from(j.at("kind").get<std::string>());
  switch (e.kind) {
    case Kind::Axiom:
      e.axiom = j.at("axiom").get<int>();
      break;
    case Kind::Theorem:
      e.theorem = j.at("theorem").get<std::string>();
      break;
    case Kind::Sub:
      for (const auto& [key, jt] : j.at("binding").items()) {
        bool lit = jt.at("kind").get<std::string>() == "literal";
        Term t = lit ? Term::literal(jt.at("value").get<std::uint64_t>())
                     : Term::input(jt.at("rank").get<std::uint64_t>());
        e.binding[std::stoull(key)] = t;
      }
      break;
    case Kind::Do:
      e.target = j.at("target").get<std::uint64_t>();
      break;
    case Kind::Def: {
      auto d = def_from_name(j.at("def").get<std::string>());
      if (!d) throw CalculusError("unknown DEF in derivation");
      e.def = *d;
      [[fallthrough]];
    }
    case Kind::Scope:
      e.path = j.at("path").get<Path>();
      e.dir = j.at("direction").get<std::string>() == "forward" ? Direction::Forward
                                                                 : Direction::Backward;
      if (j.contains("arg")) e.arg = j.at("arg").get<std::size_t>();
      break;
    default:
      break;
  }
  return e;
}

nlohmann::json derivation_to_json(const Derivation& d) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : d.entries) entries.push_back(entry_to_json(e));
  return {{"goal", render_spec(d.goal)}, {"entries", entries}};
}

Derivation derivation_from_json(const nlohmann::json& j) {
  Derivation d;
  d.goal = parse_spec(j.at("goal").get<std::string>());
  for (const auto& je : j.at("entries")) d.entries.push_back(entry_from_json(je));
  return d;
}

// ---------------------------------------------------------------------------
// Evaluation

Judgment apply_entry(const DerivationEntry& e, std::vector<Judgment>& stack,
                     const TheoremResolver& theorems) {
  if (stack.size() < e.arity())
    throw CalculusError("stack underflow at " + entry_text(e));
  auto pop = [&] {
    Judgment j = std::move(stack.back());
    stack.pop_back();
    return j;
  };
  Judgment out;
  switch (e.kind) {
    case Kind::Axiom:
      out = axiom_lookup(e.axiom);
      break;
    case Kind::Theorem: {
      const Judgment* t = theorems ? theorems(e.theorem) : nullptr;
      if (!t) throw CalculusError("unknown theorem '" + e.theorem + "'");
      out = *t;
      break;
    }
    case Kind::Sub:
      out = rule_sub(pop(), e.binding);
      break;
    case Kind::Not:
      out = rule_not(pop());
      break;
    case Kind::Quit:
      out = rule_quit(pop());
      break;
    case Kind::Def: {
      Judgment j = pop();
      try {
        j.spec = apply_def(e.def, j.spec, e.path, e.dir, e.arg);
      } catch (const SpecError& err) {
        throw CalculusError(err.what());
      }
      out = std::move(j);
      break;
    }
    case Kind::Scope: {
      Judgment j = pop();
      auto w = try_apply_scope(j.spec, e.path, e.dir);
      if (!w) throw CalculusError("SCOPE does not apply to " + render_spec(j.spec));
      j.spec = std::move(*w);
      out = std::move(j);
      break;
    }
    default: {
      Judgment n = pop();
      Judgment m = pop();
      switch (e.kind) {
        case Kind::And:
          out = rule_and(m, n);
          break;
        case Kind::Do:
          out = rule_do(m, n, e.target);
          break;
        case Kind::If:
          out = rule_if(m, n);
          break;
        default:
          out = rule_union(m, n);
          break;
      }
    }
  }
  stack.push_back(out);
  return out;
}

Judgment eval_derivation(const Derivation& d, const TheoremResolver& theorems) {
  std::vector<Judgment> stack;
  for (const auto& e : d.entries) apply_entry(e, stack, theorems);
  if (stack.size() != 1)
    throw CalculusError("derivation leaves " + std::to_string(stack.size()) +
                        " items on the stack");
  return std::move(stack.back());
}

ReplayResult replay(const Derivation& d, const TheoremResolver& theorems) {
  ReplayResult r;
  try {
    Judgment j = eval_derivation(d, theorems);
    if (!same_spec(j.spec, eliminate_forall(d.goal))) {
      r.reason = "derived " + render_spec(j.spec) + " but the goal is " + render_spec(d.goal);
      return r;
    }
    r.ok = true;
    r.judgment = std::move(j);
  } catch (const std::exception& err) {
    r.reason = err.what();
  }
  return r;
}

std::string forward_trace(const Derivation& d, const TheoremResolver& theorems) {
  std::string out;
  std::vector<Judgment> stack;
  std::size_t n = 0;
  for (const auto& e : d.entries) {
    Judgment j = apply_entry(e, stack, theorems);
    out += std::to_string(++n) + ". " + entry_text(e) + "  \"" + render(j.program) +
           "\" # " + render_spec(j.spec) + "\n";
  }
  return out;
}

}  // namespace phpsynth
