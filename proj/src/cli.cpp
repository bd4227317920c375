#include "phpsynth/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "phpsynth/corpus.hpp"
#include "phpsynth/runtime.hpp"
#include "phpsynth/search.hpp"

namespace phpsynth {

namespace {

using json = nlohmann::json;

struct Options {
  std::size_t depth = 24;
  std::size_t def_chain = 6;
  std::uint64_t steps = kDefaultStepLimit;
  std::string format = "text";
  std::string store_path;
  bool fresh = false;
  bool unrestricted_eq = false;

  SearchConfig search() const {
    SearchConfig c;
    c.max_depth = depth;
    c.max_def_chain = def_chain;
    c.unrestricted_eq = unrestricted_eq;
    return c;
  }
  bool json() const { return format == "json"; }
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--depth", o.depth, "Maximum proof-tree height")->check(CLI::PositiveNumber);
  cmd->add_option("--def-chain", o.def_chain, "Maximum consecutive DEF rewrites")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--steps", o.steps, "Interpreter step limit")->check(CLI::PositiveNumber);
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--store", o.store_path, "Theorem store (JSON file)");
  cmd->add_flag("--fresh", o.fresh, "Ignore the theorem store file");
  cmd->add_flag("--unrestricted-eq", o.unrestricted_eq, "Allow DEF-EQ on variable arguments");
}

TheoremStore open_store(const Options& o) {
  if (o.store_path.empty() || o.fresh) return {};
  return TheoremStore::load(o.store_path);
}

void save_store(const Options& o, const TheoremStore& store) {
  if (!o.store_path.empty()) store.save(o.store_path);
}

bool uses_union(const Derivation& d, const TheoremStore& store) {
  for (const auto& e : d.entries) {
    if (e.kind == DerivationEntry::Kind::Union) return true;
    if (e.kind == DerivationEntry::Kind::Theorem)
      if (const Theorem* t = store.by_name(e.theorem); t && uses_union(t->derivation, store))
        return true;
  }
  return false;
}

CheckReport verify(const Judgment& j, const Derivation& d, const TheoremStore& store,
                   std::uint64_t range, std::uint64_t steps) {
  CheckOptions opts;
  opts.mode = uses_union(d, store) ? CompareMode::Set : CompareMode::Multiset;
  opts.step_limit = steps;
  return check_judgment(j, Grid::uniform(input_ranks(j.spec), 1, range), opts);
}

std::string verify_line(const CheckReport& r, std::uint64_t range, std::size_t arity) {
  std::ostringstream s;
  s << "verify [1.." << range << "]^" << arity << ": " << r.envs << " envs, " << r.disagreements
    << " disagreements, max steps " << r.max_steps;
  if (!r.ok()) {
    const EnvVerdict& v = r.verdicts.front();
    s << "\nfirst failure at";
    for (const auto& [rank, val] : v.env)
      s << " " << var_name({VarKind::Input, rank}).substr(1) << "=" << val;
    s << ": " << v.detail;
  }
  return s.str();
}

std::string unsupported_reason(const SpecError& e) {
  std::string m = e.what();
  if (m.find("repeated output") != std::string::npos) return "repeated output variable";
  return m;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string spec;
  bool trace = false;
  std::optional<std::uint64_t> verify_range;
  bool simplify = false;
  std::string name;
};

int cmd_synth(const SynthArgs& a, const Options& o, std::ostream& out, std::ostream& err) {
  Wff goal;
  SpecKind kind;
  try {
    goal = parse_spec(a.spec);
  } catch (const SpecError& e) {
    err << "error: cannot parse specification " << a.spec << ": " << e.what() << "\n";
    return kExitParse;
  }
  try {
    kind = classify(eliminate_forall(goal));
  } catch (const SpecError& e) {
    if (e.kind() != SpecError::Kind::Unsupported) {
      err << "error: " << e.what() << "\n";
      return kExitParse;
    }
    err << "unsupported (" << unsupported_reason(e) << "): " << render_spec(goal) << "\n";
    return kExitSearch;
  }

  TheoremStore store = open_store(o);
  SynthesisResult r;
  try {
    r = synthesize(goal, o.search(), store,
                   a.name.empty() ? std::nullopt : std::optional<std::string>(a.name));
  } catch (const SearchExhausted& e) {
    if (o.json()) {
      out << json{{"spec", render_spec(goal)}, {"ok", false}, {"error", e.what()},
                  {"frontier", e.frontier()}}
                 .dump(2)
          << "\n";
    }
    err << "error: " << e.what() << "\n";
    for (const auto& f : e.frontier()) err << "  dead end: " << f << "\n";
    return kExitSearch;
  }
  if (!a.name.empty()) save_store(o, store);

  Judgment result = r.judgment;
  if (a.simplify) result.program = simplify_cr1(result.program);
  auto resolver = store.resolver();

  std::optional<CheckReport> report;
  if (a.verify_range) {
    try {
      report = verify(result, r.derivation, store, *a.verify_range, o.steps);
    } catch (const SpecError& e) {
      err << "error: " << e.what() << "\n";
      return kExitVerify;
    }
  }

  if (o.json()) {
    json j{{"spec", render_spec(goal)},
           {"kind", kind_name(kind)},
           {"ok", true},
           {"program", render(result.program)},
           {"derivation", derivation_to_json(r.derivation)}};
    if (a.trace) {
      j["backward"] = backward_trace_json(r.proof);
      j["forward"] = forward_trace(r.derivation, resolver);
    }
    if (report) j["verify"] = report->to_json();
    out << j.dump(2) << "\n";
  } else {
    out << render(result.program) << "\n";
    if (a.trace) {
      out << "\nbackward proof:\n" << backward_trace(r.proof);
      out << "\nexecution stack:\n" << forward_trace(r.derivation, resolver);
      if (a.simplify && !(result.program == r.judgment.program))
        out << "CR1  \"" << render(result.program) << "\"\n";
    }
    if (report) out << verify_line(*report, *a.verify_range, input_ranks(result.spec).size()) << "\n";
  }
  if (report && !report->ok()) return kExitVerify;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run

Env parse_inputs(const std::string& text) {
  Env env;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected name=value, got '" + item + "'");
    std::string name = "$" + item.substr(0, eq);
    Program probe = parse_program("echo " + name + " ;");
    const Expr& e = probe.cmds.at(0).expr;
    if (e.kind != ExprKind::Var || e.var.kind != VarKind::Input)
      throw std::invalid_argument("'" + item.substr(0, eq) + "' is not an input name");
    std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty() || v < 0)
      throw std::invalid_argument("bad value '" + value + "' for " + name);
    env[e.var.rank] = static_cast<std::uint64_t>(v);
  }
  return env;
}

int cmd_run(const std::string& file, const std::string& inputs, const Options& o, std::ostream& out,
            std::ostream& err) {
  std::string text;
  if (file == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(file);
    if (!in) {
      err << "error: cannot read " << file << "\n";
      return kExitUsage;
    }
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  Program p;
  try {
    p = parse_program(text);
  } catch (const ProgramError& e) {
    err << "error: cannot parse program: " << e.what() << "\n";
    return kExitParse;
  }
  Env env;
  try {
    env = parse_inputs(inputs);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    RunResult r = run(p, env, o.steps);
    if (o.json()) {
      json vals = json::array();
      for (const auto& v : r.outputs) {
        if (v.is_bool()) vals.push_back(v.v != 0);
        else vals.push_back(v.v);
      }
      out << json{{"outputs", vals}, {"steps", r.steps}}.dump(2) << "\n";
    } else {
      for (const auto& v : r.outputs) out << to_string(v) << "\n";
    }
  } catch (const RuntimeError& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// corpus

struct Row {
  std::string label;
  std::string spec;
  std::string status;
  bool required = true;
  bool passed = false;
  std::string program;
  std::string verdict;
  double ms = 0;
};

std::string pad(const std::string& s, std::size_t w) {
  return s.size() + 1 >= w ? s + " " : s + std::string(w - s.size(), ' ');
}

int cmd_corpus(std::uint64_t range, bool timing, bool show_programs, const Options& o,
               std::ostream& out, std::ostream& err) {
  TheoremStore store = open_store(o);
  SearchConfig cfg = o.search();
  std::vector<Row> rows;
  using clock = std::chrono::steady_clock;

  auto verify_row = [&](Row& row, const Judgment& j, const Derivation& d) {
    try {
      CheckReport rep = verify(j, d, store, range, o.steps);
      std::size_t k = input_ranks(j.spec).size();
      row.verdict = (rep.ok() ? "pass " : "FAIL ") + std::to_string(rep.envs - rep.disagreements) +
                    "/" + std::to_string(rep.envs) +
                    (k ? " on [1.." + std::to_string(range) + "]^" + std::to_string(k) : "");
      return rep.ok();
    } catch (const std::exception& e) {
      row.verdict = std::string("FAIL ") + e.what();
      return false;
    }
  };

  for (const auto& ct : corpus_theorems()) {
    Row row;
    row.label = "thm " + ct.name;
    row.spec = ct.spec;
    auto t0 = clock::now();
    try {
      if (!store.by_name(ct.name)) synthesize(parse_spec(ct.spec), cfg, store, ct.name);
      const Theorem* t = store.by_name(ct.name);
      row.program = render(t->judgment.program);
      row.status = "synthesized";
      bool golden = !ct.golden || normalize_text(row.program) == normalize_text(*ct.golden);
      if (!golden) row.status = "synthesized (differs from reference)";
      row.passed = verify_row(row, t->judgment, t->derivation) && golden;
    } catch (const std::exception& e) {
      row.status = std::string("failed: ") + e.what();
    }
    row.ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    rows.push_back(std::move(row));
  }

  for (const auto& cs : corpus_specs()) {
    Row row;
    row.label = "spec " + std::to_string(cs.number);
    row.spec = cs.spec;
    row.required = cs.expect != CorpusSpec::Expect::Stretch;
    auto t0 = clock::now();
    try {
      Wff goal = parse_spec(cs.spec);
      classify(eliminate_forall(goal));
      auto r = synthesize(goal, cfg, store);
      Judgment j{simplify_cr1(r.judgment.program), r.judgment.spec};
      row.program = render(j.program);
      row.status = "synthesized";
      row.passed = verify_row(row, j, r.derivation) && cs.expect != CorpusSpec::Expect::Unsupported;
    } catch (const SpecError& e) {
      row.status = "unsupported (" + unsupported_reason(e) + ")";
      row.passed = cs.expect == CorpusSpec::Expect::Unsupported;
    } catch (const SearchExhausted& e) {
      row.status = "unsupported (blocking subgoal: " +
                   (e.frontier().empty() ? std::string("none") : e.frontier().front()) + ")";
      row.passed = cs.expect == CorpusSpec::Expect::Stretch;
    }
    row.ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    rows.push_back(std::move(row));
  }
  save_store(o, store);

  bool ok = true;
  for (const auto& r : rows)
    if (r.required && !r.passed) ok = false;

  if (o.json()) {
    json arr = json::array();
    for (const auto& r : rows) {
      json j{{"row", r.label}, {"spec", r.spec},     {"status", r.status}, {"required", r.required},
             {"passed", r.passed}, {"program", r.program}, {"length", r.program.size()},
             {"verify", r.verdict}};
      if (timing) j["ms"] = r.ms;
      arr.push_back(j);
    }
    out << json{{"rows", arr}, {"ok", ok}}.dump(2) << "\n";
  } else {
    out << pad("row", 8) << pad("specification", 66) << pad("len", 5) << pad("verify", 28)
        << (timing ? pad("ms", 10) : "") << "status\n";
    for (const auto& r : rows) {
      std::ostringstream ms;
      ms << std::fixed << std::setprecision(1) << r.ms;
      out << pad(r.label, 8) << pad(r.spec, 66) << pad(std::to_string(r.program.size()), 5)
          << pad(r.verdict.empty() ? "-" : r.verdict, 28) << (timing ? pad(ms.str(), 10) : "")
          << r.status << (r.required ? "" : " [stretch]") << "\n";
      if (show_programs && !r.program.empty()) out << "        " << r.program << "\n";
    }
    out << (ok ? "all required rows passed" : "some required rows FAILED") << "\n";
  }
  if (!ok) err << "error: corpus has failing required rows\n";
  return ok ? kExitOk : kExitCorpusFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deductive synthesis of PHP programs from predicate-calculus specifications",
               "phpsynth"};
  app.require_subcommand(1);
  Options o;

  SynthArgs sa;
  std::uint64_t verify_range = 0;
  auto* synth = app.add_subcommand("synth", "Synthesize a program for a specification");
  synth->add_option("spec", sa.spec, "Specification, e.g. \"BETW(I,x,J)\"")->required();
  synth->add_flag("--trace", sa.trace, "Print the backward proof and the stack construction");
  synth->add_option("--verify", verify_range, "Check against the oracle on inputs [1..N]")
      ->check(CLI::PositiveNumber);
  synth->add_flag("--simplify", sa.simplify, "Apply code rule CR1");
  synth->add_option("--name", sa.name, "Store the result as a theorem with this name");
  add_common(synth, o);

  std::string file, inputs;
  auto* runc = app.add_subcommand("run", "Run a program file (use - for stdin)");
  runc->add_option("file", file, "Program file")->required();
  runc->add_option("--inputs", inputs, "Inputs, e.g. i=12,j=5");
  add_common(runc, o);

  std::uint64_t corpus_range = 40;
  bool timing = false, programs = false;
  auto* corpus = app.add_subcommand("corpus", "Bootstrap theorems 1-10 and run the corpus");
  corpus->add_option("--verify", corpus_range, "Verification range [1..N]")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  corpus->add_flag("--timing", timing, "Add wall time per row");
  corpus->add_flag("--programs", programs, "Print each synthesized program");
  add_common(corpus, o);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front())
      err << sub->help();
    return kExitUsage;
  }

  try {
    if (*synth) {
      if (synth->count("--verify")) sa.verify_range = verify_range;
      return cmd_synth(sa, o, out, err);
    }
    if (*runc) return cmd_run(file, inputs, o, out, err);
    return cmd_corpus(corpus_range, timing, programs, o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace phpsynth
