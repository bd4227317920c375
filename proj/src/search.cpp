#include "phpsynth/search.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "phpsynth/corpus.hpp"

namespace phpsynth {

// ---------------------------------------------------------------------------
// Theorem store

TheoremStore::TheoremStore(const TheoremStore& other) { *this = other; }

TheoremStore& TheoremStore::operator=(const TheoremStore& other) {
  if (this == &other) return *this;
  std::shared_lock lk(other.mu_);
  std::unique_lock mine(mu_);
  items_.clear();
  for (const auto& t : other.items_) items_.push_back(std::make_unique<Theorem>(*t));
  by_name_ = other.by_name_;
  by_key_ = other.by_key_;
  return *this;
}

void TheoremStore::add(Theorem t) {
  ReplayResult r = replay(t.derivation, resolver());
  if (!r.ok) throw CalculusError("theorem " + t.name + " does not replay: " + r.reason);
  const Program& derived = r.judgment->program;
  if (!(t.judgment.program == derived) && !(t.judgment.program == simplify_cr1(derived)))
    throw CalculusError("theorem " + t.name + ": program is not the derived one");
  if (!same_spec(t.judgment.spec, r.judgment->spec))
    throw CalculusError("theorem " + t.name + ": specification is not the derived one");

  std::unique_lock lk(mu_);
  std::string key = goal_key(t.judgment.spec);
  if (auto it = by_name_.find(t.name); it != by_name_.end()) {
    by_key_.erase(goal_key(items_[it->second]->judgment.spec));
    *items_[it->second] = std::move(t);
    by_key_[key] = it->second;
    return;
  }
  items_.push_back(std::make_unique<Theorem>(std::move(t)));
  by_name_[items_.back()->name] = items_.size() - 1;
  by_key_.emplace(key, items_.size() - 1);
}

const Theorem* TheoremStore::by_name(const std::string& name) const {
  std::shared_lock lk(mu_);
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : items_[it->second].get();
}

const Theorem* TheoremStore::find(const Wff& goal) const {
  std::string key = goal_key(eliminate_forall(goal));
  std::shared_lock lk(mu_);
  auto it = by_key_.find(key);
  return it == by_key_.end() ? nullptr : items_[it->second].get();
}

std::vector<const Theorem*> TheoremStore::all() const {
  std::shared_lock lk(mu_);
  std::vector<const Theorem*> out;
  for (const auto& t : items_) out.push_back(t.get());
  return out;
}

std::size_t TheoremStore::size() const {
  std::shared_lock lk(mu_);
  return items_.size();
}

TheoremResolver TheoremStore::resolver() const {
  return [this](const std::string& name) -> const Judgment* {
    const Theorem* t = by_name(name);
    return t ? &t->judgment : nullptr;
  };
}

nlohmann::json TheoremStore::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const Theorem* t : all())
    arr.push_back({{"name", t->name},
                   {"goal", render_spec(t->goal)},
                   {"program", render(t->judgment.program)},
                   {"derivation", derivation_to_json(t->derivation)}});
  return {{"theorems", arr}};
}

TheoremStore TheoremStore::from_json(const nlohmann::json& j) {
  TheoremStore store;
  for (const auto& jt : j.at("theorems")) {
    Theorem t;
    t.name = jt.at("name").get<std::string>();
    t.goal = parse_spec(jt.at("goal").get<std::string>());
    t.derivation = derivation_from_json(jt.at("derivation"));
    t.judgment.program = parse_program(jt.at("program").get<std::string>());
    t.judgment.spec = eliminate_forall(t.goal);
    store.add(std::move(t));
  }
  return store;
}

void TheoremStore::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write theorem store " + path);
  out << to_json().dump(2) << "\n";
}

TheoremStore TheoremStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  return from_json(nlohmann::json::parse(in));
}

// ---------------------------------------------------------------------------
// Expansion

namespace {

using Kind = Alternative::Kind;
using EK = DerivationEntry::Kind;

bool has_double_negation(const Wff& w) {
  if (w.kind == WffKind::Not && w.sub[0].kind == WffKind::Not) return true;
  return std::any_of(w.sub.begin(), w.sub.end(), has_double_negation);
}

bool has_output(const Wff& w) { return !output_ranks(w).empty(); }

Wff output_to_input(const Wff& w, std::uint64_t target) {
  auto outs = output_ranks(w);
  if (outs.empty()) return w;
  return replace_terms(w, {{Term::output(outs[0]), Term::input(target)}});
}

std::string path_label(const Path& p) {
  if (p.empty()) return "";
  std::string s = " @";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "." : "") + std::to_string(p[i]);
  return s;
}

Alternative leaf(Kind k, std::string label, std::vector<DerivationEntry> entries) {
  Alternative a;
  a.kind = k;
  a.label = std::move(label);
  a.entries = std::move(entries);
  return a;
}

Alternative decomposition(std::string label, std::vector<Wff> subgoals,
                          std::vector<DerivationEntry> entries) {
  Alternative a;
  a.kind = Kind::Rule;
  a.label = std::move(label);
  a.subgoals = std::move(subgoals);
  a.entries = std::move(entries);
  return a;
}

void push_matches(const Wff& goal, const TheoremStore& store, std::vector<Alternative>& out) {
  for (const Theorem* t : store.all()) {
    auto b = match_axiom(goal, t->judgment.spec);
    if (!b) continue;
    std::vector<DerivationEntry> es{DerivationEntry::theorem_ref(t->name)};
    if (!b->empty()) es.push_back(DerivationEntry::sub(*b));
    out.push_back(leaf(Kind::Theorem, "THM:" + t->name, std::move(es)));
  }
}

void push_axioms(const Wff& goal, std::vector<Alternative>& out) {
  for (const Axiom& ax : axioms()) {
    auto b = match_axiom(goal, ax.judgment.spec);
    if (!b) continue;
    std::vector<DerivationEntry> es{DerivationEntry::axiom_ref(ax.id)};
    if (!b->empty()) es.push_back(DerivationEntry::sub(*b));
    out.push_back(leaf(Kind::Axiom, "AX" + std::to_string(ax.id), std::move(es)));
  }
}

// A rewrite is usable when the opposite rewrite at the same place restores
// the goal; that opposite rewrite is the derivation entry.
void push_rewrite(const Wff& goal, Wff next, DerivationEntry back, std::string label,
                  std::vector<Alternative>& out) {
  if (has_double_negation(next) || !try_classify(next)) return;
  std::vector<Judgment> stack{{Program{}, next}};
  try {
    Judgment j = apply_entry(back, stack, {});
    if (!same_spec(j.spec, goal)) return;
  } catch (const std::exception&) {
    return;
  }
  Alternative a;
  a.kind = Kind::Def;
  a.label = std::move(label);
  a.subgoals.push_back(std::move(next));
  a.entries.push_back(std::move(back));
  out.push_back(std::move(a));
}

void push_defs(const Wff& goal, const SearchConfig& cfg, bool root_only,
               std::vector<Alternative>& out) {
  for (const Path& path : root_only ? std::vector<Path>{Path{}} : all_paths(goal)) {
    const Wff& at = subtree(goal, path);
    for (DefId d : kAllDefs) {
      for (Direction dir : {Direction::Forward, Direction::Backward}) {
        std::string label = "DEF-" + std::string(def_name(d)) + path_label(path) +
                            (dir == Direction::Backward ? " fold" : "");
        if (d != DefId::EQ) {
          auto next = try_apply_def(d, goal, path, dir);
          if (next)
            push_rewrite(goal, std::move(*next), DerivationEntry::def_app(d, path, reverse(dir)),
                         label, out);
          continue;
        }
        if (dir == Direction::Forward) {
          if (at.kind != WffKind::Atom) continue;
          for (std::size_t i = 0; i < at.args.size(); ++i) {
            if (at.args[i].kind != TermKind::Literal && !cfg.unrestricted_eq) continue;
            auto next = try_apply_def(d, goal, path, dir, i);
            if (next)
              push_rewrite(goal, std::move(*next),
                           DerivationEntry::def_app(d, path, Direction::Backward), label, out);
          }
        } else if (cfg.unrestricted_eq) {
          auto next = try_apply_def(d, goal, path, dir);
          if (!next) continue;
          const Wff& folded = subtree(*next, path);
          for (std::size_t i = 0; i < folded.args.size(); ++i)
            push_rewrite(goal, *next, DerivationEntry::def_app(d, path, Direction::Forward, i),
                         label, out);
        }
      }
    }
    for (Direction dir : {Direction::Forward, Direction::Backward}) {
      auto next = try_apply_scope(goal, path, dir);
      if (next)
        push_rewrite(goal, std::move(*next), DerivationEntry::scope(path, reverse(dir)),
                     std::string("SCOPE") + path_label(path) +
                         (dir == Direction::Forward ? " narrow" : " widen"),
                     out);
    }
  }
}

void push_rules(const Wff& goal, SpecKind kind, std::vector<Alternative>& out) {
  auto rule = [](EK k) { return DerivationEntry::rule(k); };
  auto commute = [] { return DerivationEntry::def_app(DefId::AND_COMM, {}, Direction::Forward); };
  switch (goal.kind) {
    case WffKind::Not:
      if (kind == SpecKind::Decide && goal.sub[0].kind != WffKind::Not)
        out.push_back(decomposition("inverse NOT", {goal.sub[0]}, {rule(EK::Not)}));
      break;
    case WffKind::And: {
      const Wff& p = goal.sub[0];
      const Wff& q = goal.sub[1];
      bool px = has_output(p), qx = has_output(q);
      if (!px && !qx) {
        out.push_back(decomposition("inverse AND", {p, q}, {rule(EK::And)}));
      } else if (!px) {
        out.push_back(decomposition("inverse IF", {p, q}, {rule(EK::If)}));
      } else if (!qx) {
        out.push_back(decomposition("DEF-^ then inverse IF", {q, p}, {rule(EK::If), commute()}));
      } else {
        std::uint64_t k = max_input_rank(goal) + 1;
        std::string target = term_name(Term::input(k));
        out.push_back(decomposition("DEF-^ then inverse DO:" + target + "=x",
                                    {q, output_to_input(p, k)},
                                    {DerivationEntry::do_rule(k), commute()}));
        out.push_back(decomposition("inverse DO:" + target + "=x", {p, output_to_input(q, k)},
                                    {DerivationEntry::do_rule(k)}));
      }
      break;
    }
    case WffKind::Or:
      if (kind != SpecKind::Decide && has_output(goal.sub[0]) && has_output(goal.sub[1]))
        out.push_back(decomposition("inverse UNION", {goal.sub[0], goal.sub[1]}, {rule(EK::Union)}));
      break;
    case WffKind::Exists:
      if (kind == SpecKind::Decide) {
        Wff body = replace_terms(goal.sub[0], {{Term::bound(goal.var), Term::output(1)}});
        if (!has_double_negation(body))
          out.push_back(decomposition("inverse QUIT", {std::move(body)}, {rule(EK::Quit)}));
      }
      break;
    default:
      break;
  }
}

}  // namespace

std::vector<Alternative> expand(const Wff& goal, const TheoremStore& store,
                                const SearchConfig& cfg) {
  std::vector<Alternative> out;
  auto kind = try_classify(goal);
  if (!kind) return out;
  if (cfg.theorems_first) {
    push_matches(goal, store, out);
    push_axioms(goal, out);
  } else {
    push_axioms(goal, out);
    push_matches(goal, store, out);
  }
  // No rule or DEF removes a negation sitting over an output variable, so a
  // negated listing is met by a direct match or not at all.
  if (goal.kind == WffKind::Not && *kind != SpecKind::Decide) return out;
  // Rewrites strictly inside one operand commute with the inverse rule that
  // splits the goal, so when such a rule exists only the root is rewritten.
  std::vector<Alternative> rules;
  push_rules(goal, *kind, rules);
  push_defs(goal, cfg, !rules.empty(), out);
  for (auto& r : rules) out.push_back(std::move(r));
  return out;
}

// ---------------------------------------------------------------------------
// Search

std::size_t ProofNode::height() const {
  std::size_t h = 0;
  for (const auto& c : children) h = std::max(h, c.height());
  return h + 1;
}

namespace {

void flatten(const ProofNode& n, std::vector<DerivationEntry>& out) {
  for (const auto& c : n.children) flatten(c, out);
  out.insert(out.end(), n.alt.entries.begin(), n.alt.entries.end());
}

struct Solved {
  ProofNode node;
  Judgment judgment;
};

class Searcher {
 public:
  Searcher(const SearchConfig& cfg, const TheoremStore& store)
      : cfg_(cfg), store_(store), resolve_(store.resolver()) {}

  std::optional<Solved> solve(const Wff& goal, std::size_t depth, std::size_t chain) {
    if (depth == 0) return std::nullopt;
    std::string exact = render_spec(canonical(goal));
    if (auto it = solved_.find(exact); it != solved_.end() && it->second.node.height() <= depth)
      return it->second;
    std::string key = goal_key(goal);
    std::string fail_key = key + "|" + std::to_string(depth) + "|" + std::to_string(chain);
    if (failed_.count(fail_key)) return std::nullopt;
    if (on_branch_.count(key)) return std::nullopt;

    on_branch_.insert(key);
    ++expanded_;
    std::vector<Alternative> alts = expand(goal, store_, cfg_);
    if (alts.empty()) note_dead_end(goal);
    std::optional<Solved> found;
    bool cut = false;
    for (auto& alt : alts) {
      if (alt.kind == Kind::Def && chain == 0) continue;
      if (!alt.subgoals.empty() && depth == 1) {
        cut = true;
        continue;
      }
      std::size_t next_chain = alt.kind == Kind::Def ? chain - 1 : cfg_.max_def_chain;
      std::vector<Solved> parts;
      for (const Wff& sg : alt.subgoals) {
        auto s = solve(sg, depth - 1, next_chain);
        if (!s) break;
        parts.push_back(std::move(*s));
      }
      if (parts.size() != alt.subgoals.size()) continue;
      auto j = combine(alt, parts);
      if (!j || !same_spec(j->spec, goal)) continue;
      ProofNode node{goal, std::move(alt), {}};
      for (auto& p : parts) node.children.push_back(std::move(p.node));
      found = Solved{std::move(node), std::move(*j)};
      break;
    }
    on_branch_.erase(key);
    if (!found && cut) note_depth_cut(goal);
    if (found)
      solved_.insert_or_assign(exact, *found);
    else
      failed_.insert(fail_key);
    return found;
  }

  void reset_frontier() {
    frontier_.clear();
    frontier_seen_.clear();
  }
  std::vector<std::string> frontier() const {
    std::vector<std::string> out;
    for (const auto& [rank, text] : frontier_) out.push_back(text);
    return out;
  }
  std::size_t expanded() const { return expanded_; }

 private:
  std::optional<Judgment> combine(const Alternative& alt, const std::vector<Solved>& parts) {
    std::vector<Judgment> stack;
    for (const auto& p : parts) stack.push_back(p.judgment);
    try {
      for (const auto& e : alt.entries) apply_entry(e, stack, resolve_);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (stack.size() != 1) return std::nullopt;
    return std::move(stack.back());
  }

  // Complements of listed sets are the shape no rule can build, so those
  // dead ends are reported ahead of ordinary ones.
  void note_dead_end(const Wff& goal) {
    std::string text = render_spec(goal);
    if (!frontier_seen_.insert(text).second) return;
    bool complement = false;
    std::vector<const Wff*> todo{&goal};
    while (!todo.empty()) {
      const Wff* w = todo.back();
      todo.pop_back();
      if (w->kind == WffKind::Not && has_output(w->sub[0])) complement = true;
      for (const auto& s : w->sub) todo.push_back(&s);
    }
    std::string reason = complement ? "  (negated listing: no rule lists a complement)" : "";
    if (!try_classify(goal)) reason = "  (unclassifiable)";
    frontier_.emplace(std::make_pair(complement ? 0 : 1, frontier_.size()), text + reason);
  }

  // Goals that only failed for lack of depth come last.
  void note_depth_cut(const Wff& goal) {
    std::string text = render_spec(goal);
    if (!frontier_seen_.insert(text).second) return;
    frontier_.emplace(std::make_pair(2, frontier_.size()), text + "  (depth limit)");
  }

  const SearchConfig& cfg_;
  const TheoremStore& store_;
  TheoremResolver resolve_;
  std::unordered_map<std::string, Solved> solved_;
  std::unordered_set<std::string> failed_;
  std::unordered_set<std::string> on_branch_;
  std::map<std::pair<int, std::size_t>, std::string> frontier_;
  std::unordered_set<std::string> frontier_seen_;
  std::size_t expanded_ = 0;
};

}  // namespace

SynthesisResult synthesize(const Wff& goal, const SearchConfig& cfg, TheoremStore& store,
                           const std::optional<std::string>& name) {
  if (cfg.max_depth == 0 || cfg.max_def_chain == 0)
    throw std::invalid_argument("search bounds must be at least 1");
  Wff target = eliminate_forall(goal);
  classify(target);

  Searcher s(cfg, store);
  std::optional<Solved> found;
  for (std::size_t d = 1; d <= cfg.max_depth && !found; ++d) {
    s.reset_frontier();
    found = s.solve(target, d, cfg.max_def_chain);
  }
  if (!found) {
    auto frontier = s.frontier();
    std::string msg = "search exhausted at depth " + std::to_string(cfg.max_depth) + " for " +
                      render_spec(goal);
    if (!frontier.empty()) msg += "; blocking subgoal: " + frontier.front();
    throw SearchExhausted(msg, std::move(frontier));
  }

  SynthesisResult r;
  r.derivation.goal = goal;
  flatten(found->node, r.derivation.entries);
  r.judgment = std::move(found->judgment);
  r.proof = std::move(found->node);
  r.goals_expanded = s.expanded();

  auto check = replay(r.derivation, store.resolver());
  if (!check.ok) throw CalculusError("internal: derivation does not replay: " + check.reason);

  if (name) {
    Theorem t{*name, goal, {simplify_cr1(r.judgment.program), r.judgment.spec}, r.derivation};
    store.add(std::move(t));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Backward trace

namespace {

struct TraceItem {
  const ProofNode* open = nullptr;  // unresolved specification
  std::string text;
  bool fresh = false;
};

std::vector<TraceItem> resolve_node(const ProofNode& n) {
  std::vector<TraceItem> items;
  if (n.children.empty()) {
    for (std::size_t i = 0; i < n.alt.entries.size(); ++i) {
      std::string t = entry_text(n.alt.entries[i]);
      if (i == 0) t = render_spec(n.goal) + " = " + t;
      items.push_back({nullptr, t, false});
    }
    return items;
  }
  for (const auto& c : n.children) items.push_back({&c, render_spec(c.goal), true});
  for (const auto& e : n.alt.entries) items.push_back({nullptr, entry_text(e), false});
  return items;
}

template <typename Emit>
void walk_trace(const ProofNode& proof, Emit emit) {
  std::vector<TraceItem> items{{&proof, render_spec(proof.goal), true}};
  emit(std::string("Given"), items);
  for (auto& it : items) it.fresh = false;
  while (true) {
    auto pos = std::find_if(items.begin(), items.end(), [](const TraceItem& i) { return i.open; });
    if (pos == items.end()) break;
    const ProofNode& n = *pos->open;
    auto repl = resolve_node(n);
    std::size_t at = pos - items.begin();
    items.erase(items.begin() + at);
    items.insert(items.begin() + at, repl.begin(), repl.end());
    emit(n.alt.label + (at ? " at entry " + std::to_string(at + 1) : ""), items);
    for (auto& it : items) it.fresh = false;
  }
}

}  // namespace

std::string backward_trace(const ProofNode& proof) {
  std::ostringstream out;
  int step = 0;
  walk_trace(proof, [&](const std::string& action, const std::vector<TraceItem>& items) {
    out << ++step << ". " << action << "\n";
    for (const auto& i : items) {
      out << "   ";
      if (i.fresh) out << "**" << i.text << "**";
      else out << i.text;
      out << "\n";
    }
  });
  return out.str();
}

nlohmann::json backward_trace_json(const ProofNode& proof) {
  nlohmann::json steps = nlohmann::json::array();
  walk_trace(proof, [&](const std::string& action, const std::vector<TraceItem>& items) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& i : items)
      list.push_back({{"text", i.text}, {"open", i.open != nullptr}, {"new", i.fresh}});
    steps.push_back({{"step", steps.size() + 1}, {"action", action}, {"entries", list}});
  });
  return steps;
}

// ---------------------------------------------------------------------------
// Bootstrap

std::vector<BootstrapRow> bootstrap_theorems(TheoremStore& store, const SearchConfig& cfg) {
  std::vector<BootstrapRow> rows;
  for (const auto& ct : corpus_theorems()) {
    if (!store.by_name(ct.name)) {
      try {
        synthesize(parse_spec(ct.spec), cfg, store, ct.name);
      } catch (const SearchExhausted& e) {
        throw SearchExhausted("theorem " + ct.name + ": " + e.what(), e.frontier());
      }
    }
    const Theorem* t = store.by_name(ct.name);
    rows.push_back({ct.name, ct.spec, render(t->judgment.program), t->derivation.entries.size()});
  }
  return rows;
}

}  // namespace phpsynth
