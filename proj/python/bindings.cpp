#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phpsynth/corpus.hpp"
#include "phpsynth/runtime.hpp"
#include "phpsynth/search.hpp"

namespace py = pybind11;
using namespace phpsynth;

namespace {

py::object to_py(const Value& v) {
  if (v.is_bool()) return py::bool_(v.v != 0);
  return py::int_(v.v);
}

// Inputs are given by name ("i", "j", "i4") or by rank.
Env make_env(const std::map<std::string, std::uint64_t>& inputs) {
  Env env;
  for (const auto& [name, value] : inputs) {
    Expr e = parse_expr("$" + name);
    if (e.kind != ExprKind::Var || e.var.kind != VarKind::Input)
      throw py::value_error("not an input variable: " + name);
    env[e.var.rank] = value;
  }
  return env;
}

py::dict result_dict(const SynthesisResult& r, const TheoremStore& store) {
  py::dict d;
  d["program"] = render(r.judgment.program);
  d["spec"] = render_spec(r.judgment.spec);
  std::vector<std::string> entries;
  for (const auto& e : r.derivation.entries) entries.push_back(entry_text(e));
  d["derivation"] = entries;
  d["backward_trace"] = backward_trace(r.proof);
  d["forward_trace"] = forward_trace(r.derivation, store.resolver());
  d["goals_expanded"] = r.goals_expanded;
  return d;
}

}  // namespace

PYBIND11_MODULE(_phpsynth, m) {
  m.doc() = "Deductive synthesis of small PHP programs from predicate-calculus specifications";

  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<ProgramError>(m, "ProgramError", PyExc_ValueError);
  py::register_exception<SearchExhausted>(m, "SearchExhausted");
  py::register_exception<RuntimeError>(m, "ProgramRuntimeError");

  m.def("normalize_spec", [](const std::string& s) { return render_spec(parse_spec(s)); },
        "Parse and re-render a specification");
  m.def("classify", [](const std::string& s) {
    return std::string(kind_name(classify(eliminate_forall(parse_spec(s)))));
  });
  m.def("normalize_program", [](const std::string& s) { return render(parse_program(s)); });
  m.def("normalize_text", [](const std::string& s) { return normalize_text(s); });
  m.def("simplify", [](const std::string& s) { return render(simplify_cr1(parse_program(s))); },
        "Apply code rule CR1");

  py::class_<TheoremStore>(m, "TheoremStore")
      .def(py::init<>())
      .def_static("load", &TheoremStore::load, py::arg("path"))
      .def("save", &TheoremStore::save, py::arg("path"))
      .def("__len__", &TheoremStore::size)
      .def("names", [](const TheoremStore& s) {
        std::vector<std::string> out;
        for (const auto* t : s.all()) out.push_back(t->name);
        return out;
      })
      .def("program", [](const TheoremStore& s, const std::string& name) -> std::optional<std::string> {
        if (const Theorem* t = s.by_name(name)) return render(t->judgment.program);
        return std::nullopt;
      })
      .def("bootstrap", [](TheoremStore& s) {
        std::vector<std::pair<std::string, std::string>> rows;
        for (const auto& r : bootstrap_theorems(s)) rows.emplace_back(r.name, r.program);
        return rows;
      });

  m.def(
      "synthesize",
      [](const std::string& spec, std::size_t depth, std::size_t def_chain, TheoremStore* store,
         std::optional<std::string> name) {
        SearchConfig cfg;
        cfg.max_depth = depth;
        cfg.max_def_chain = def_chain;
        TheoremStore scratch;
        TheoremStore& s = store ? *store : scratch;
        auto r = synthesize(parse_spec(spec), cfg, s, name);
        return result_dict(r, s);
      },
      py::arg("spec"), py::arg("depth") = 24, py::arg("def_chain") = 6,
      py::arg("store") = nullptr, py::arg("name") = py::none());

  m.def(
      "run",
      [](const std::string& program, const std::map<std::string, std::uint64_t>& inputs,
         std::uint64_t steps) {
        auto r = run(parse_program(program), make_env(inputs), steps);
        py::list out;
        for (const auto& v : r.outputs) out.append(to_py(v));
        return out;
      },
      py::arg("program"), py::arg("inputs") = std::map<std::string, std::uint64_t>{},
      py::arg("steps") = kDefaultStepLimit);

  m.def(
      "oracle",
      [](const std::string& spec, const std::map<std::string, std::uint64_t>& inputs) -> py::object {
        Wff w = eliminate_forall(parse_spec(spec));
        Env env = make_env(inputs);
        if (output_ranks(w).empty()) return py::bool_(oracle_decide(w, env));
        return py::cast(oracle_list(w, env));
      },
      py::arg("spec"), py::arg("inputs") = std::map<std::string, std::uint64_t>{});

  m.def(
      "check",
      [](const std::string& program, const std::string& spec, std::uint64_t hi, bool as_set) {
        Judgment j{parse_program(program), parse_spec(spec)};
        CheckOptions opts;
        if (as_set) opts.mode = CompareMode::Set;
        auto rep = check_judgment(j, Grid::uniform(input_ranks(eliminate_forall(j.spec)), 1, hi), opts);
        py::dict d;
        d["envs"] = rep.envs;
        d["disagreements"] = rep.disagreements;
        d["max_steps"] = rep.max_steps;
        return d;
      },
      py::arg("program"), py::arg("spec"), py::arg("hi") = 20, py::arg("as_set") = false);

  m.def("corpus_theorems", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& t : corpus_theorems()) out.emplace_back(t.name, t.spec);
    return out;
  });
}
