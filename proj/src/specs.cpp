#include "phpsynth/specs.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

namespace phpsynth {

namespace {

constexpr std::pair<Relation, std::string_view> kRelations[] = {
    {Relation::EQ, "EQ"},     {Relation::LT, "LT"},   {Relation::BETW, "BETW"},
    {Relation::MUL, "MUL"},   {Relation::FAC, "FAC"}, {Relation::REM, "REM"},
    {Relation::PFAC, "PFAC"}, {Relation::PRIME, "PRIME"}};

std::string ranked_name(std::string_view seq, std::uint64_t rank) {
  if (rank >= 1 && rank <= 3) return std::string(1, seq[rank - 1]);
  return std::string(1, seq[0]) + std::to_string(rank);
}

// Parses names like "I", "J", "K", "I7" against the sequence `seq`.
std::optional<std::uint64_t> ranked_from_name(std::string_view seq,
                                              std::string_view name) {
  if (name.size() == 1) {
    auto pos = seq.find(name[0]);
    if (pos == std::string_view::npos) return std::nullopt;
    return pos + 1;
  }
  if (name[0] != seq[0]) return std::nullopt;
  std::uint64_t v = 0;
  for (char c : name.substr(1)) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  if (v < 4 || name[1] == '0') return std::nullopt;
  return v;
}

}  // namespace

std::size_t arity(Relation r) {
  switch (r) {
    case Relation::PRIME:
      return 1;
    case Relation::BETW:
    case Relation::MUL:
    case Relation::REM:
      return 3;
    default:
      return 2;
  }
}

std::string_view relation_name(Relation r) {
  for (auto& [rel, name] : kRelations)
    if (rel == r) return name;
  return "?";
}

std::optional<Relation> relation_from_name(std::string_view name) {
  for (auto& [rel, n] : kRelations)
    if (n == name) return rel;
  return std::nullopt;
}

std::string term_name(const Term& t) {
  switch (t.kind) {
    case TermKind::Input:
      return ranked_name("IJK", t.value);
    case TermKind::Output:
      return ranked_name("xyz", t.value);
    case TermKind::Bound:
      return ranked_name("ABC", t.value);
    case TermKind::Component:
      return ranked_name("abc", t.value);
    case TermKind::Literal:
      return "\"" + std::to_string(t.value) + "\"";
  }
  return "?";
}

Wff Wff::atom(Relation r, std::vector<Term> args) {
  if (args.size() != arity(r))
    throw SpecError(SpecError::Kind::Arity,
                    std::string(relation_name(r)) + " takes " +
                        std::to_string(arity(r)) + " arguments, got " +
                        std::to_string(args.size()));
  Wff w;
  w.kind = WffKind::Atom;
  w.rel = r;
  w.args = std::move(args);
  return w;
}

Wff Wff::negation(Wff p) {
  Wff w;
  w.kind = WffKind::Not;
  w.sub.push_back(std::move(p));
  return w;
}

Wff Wff::conj(Wff p, Wff q) {
  Wff w;
  w.kind = WffKind::And;
  w.sub.push_back(std::move(p));
  w.sub.push_back(std::move(q));
  return w;
}

Wff Wff::disj(Wff p, Wff q) {
  Wff w;
  w.kind = WffKind::Or;
  w.sub.push_back(std::move(p));
  w.sub.push_back(std::move(q));
  return w;
}

Wff Wff::exists(std::uint64_t rank, Wff body) {
  Wff w;
  w.kind = WffKind::Exists;
  w.var = rank;
  w.sub.push_back(std::move(body));
  return w;
}

Wff Wff::forall(std::uint64_t rank, Wff body) {
  Wff w;
  w.kind = WffKind::Forall;
  w.var = rank;
  w.sub.push_back(std::move(body));
  return w;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class SpecParser {
 public:
  SpecParser(std::string_view text, bool patterns)
      : text_(text), patterns_(patterns) {}

  Wff parse() {
    Wff w = disjunction();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return w;
  }

 private:
  [[noreturn]] void fail(const std::string& msg,
                         SpecError::Kind kind = SpecError::Kind::Syntax) {
    throw SpecError(kind,
                    "at position " + std::to_string(pos_) + ": " + msg, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string_view ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalnum(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_) fail("expected identifier");
    return text_.substr(start, pos_ - start);
  }

  // The disjunction keyword is a lone `v`.
  bool at_or() {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != 'v') return false;
    return pos_ + 1 == text_.size() ||
           !std::isalnum(static_cast<unsigned char>(text_[pos_ + 1]));
  }

  Wff disjunction() {
    Wff w = conjunction();
    while (at_or()) {
      ++pos_;
      w = Wff::disj(std::move(w), conjunction());
    }
    return w;
  }

  Wff conjunction() {
    Wff w = unary();
    while (peek('^')) {
      ++pos_;
      w = Wff::conj(std::move(w), unary());
    }
    return w;
  }

  std::optional<std::pair<bool, std::size_t>> quantifier_ahead() {
    skip_ws();
    std::size_t save = pos_;
    if (!peek('(')) return std::nullopt;
    ++pos_;
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    std::string_view word = text_.substr(start, pos_ - start);
    pos_ = save;
    if (word == "exists") return std::make_pair(true, start);
    if (word == "all" || word == "forall") return std::make_pair(false, start);
    return std::nullopt;
  }

  Wff unary() {
    skip_ws();
    if (peek('~')) {
      ++pos_;
      return Wff::negation(unary());
    }
    if (auto q = quantifier_ahead()) {
      expect('(');
      ident();  // keyword
      std::size_t at = pos_;
      std::string_view name = ident();
      auto rank = ranked_from_name("ABC", name);
      if (!rank) {
        pos_ = at;
        fail("expected a quantified variable (A, B, C, A4, ...)");
      }
      if (std::find(scope_.begin(), scope_.end(), *rank) != scope_.end()) {
        pos_ = at;
        fail("quantified variable " + std::string(name) + " shadows itself",
             SpecError::Kind::Unbound);
      }
      expect(')');
      scope_.push_back(*rank);
      Wff body = unary();
      scope_.pop_back();
      return q->first ? Wff::exists(*rank, std::move(body))
                      : Wff::forall(*rank, std::move(body));
    }
    if (peek('(')) {
      ++pos_;
      Wff w = disjunction();
      expect(')');
      return w;
    }
    return atom();
  }

  Term term() {
    skip_ws();
    if (peek('"')) {
      ++pos_;
      std::size_t start = pos_;
      std::uint64_t v = 0;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        v = v * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
        ++pos_;
      }
      if (start == pos_) fail("expected decimal literal");
      expect('"');
      return Term::literal(v);
    }
    std::size_t at = pos_;
    std::string_view name = ident();
    if (auto r = ranked_from_name("IJK", name)) return Term::input(*r);
    if (auto r = ranked_from_name("xyz", name)) return Term::output(*r);
    if (auto r = ranked_from_name("ABC", name)) {
      if (std::find(scope_.begin(), scope_.end(), *r) == scope_.end() &&
          !patterns_) {
        pos_ = at;
        fail("quantified variable " + std::string(name) + " is not bound",
             SpecError::Kind::Unbound);
      }
      return Term::bound(*r);
    }
    if (patterns_) {
      if (auto r = ranked_from_name("abc", name)) return Term::component(*r);
    }
    pos_ = at;
    fail("unknown variable '" + std::string(name) + "'");
  }

  Wff atom() {
    std::size_t at = pos_;
    std::string_view name = ident();
    auto rel = relation_from_name(name);
    if (!rel) {
      pos_ = at;
      fail("unknown relation '" + std::string(name) + "'");
    }
    expect('(');
    std::vector<Term> args;
    args.push_back(term());
    while (peek(',')) {
      ++pos_;
      args.push_back(term());
    }
    expect(')');
    if (args.size() != arity(*rel)) {
      pos_ = at;
      fail(std::string(name) + " takes " + std::to_string(arity(*rel)) +
               " arguments, got " + std::to_string(args.size()),
           SpecError::Kind::Arity);
    }
    return Wff::atom(*rel, std::move(args));
  }

  std::string_view text_;
  bool patterns_;
  std::size_t pos_ = 0;
  std::vector<std::uint64_t> scope_;
};

int precedence(const Wff& w) {
  switch (w.kind) {
    case WffKind::Or:
      return 1;
    case WffKind::And:
      return 2;
    default:
      return 3;
  }
}

void render_into(const Wff& w, int need, std::string& out) {
  bool wrap = precedence(w) < need;
  if (wrap) out += '(';
  switch (w.kind) {
    case WffKind::Atom: {
      out += relation_name(w.rel);
      out += '(';
      for (std::size_t i = 0; i < w.args.size(); ++i) {
        if (i) out += ',';
        out += term_name(w.args[i]);
      }
      out += ')';
      break;
    }
    case WffKind::Not:
      out += '~';
      render_into(w.sub[0], 3, out);
      break;
    case WffKind::Exists:
    case WffKind::Forall:
      out += w.kind == WffKind::Exists ? "(exists " : "(all ";
      out += term_name(Term::bound(w.var));
      out += ')';
      render_into(w.sub[0], 3, out);
      break;
    case WffKind::And:
      render_into(w.sub[0], 2, out);
      out += '^';
      render_into(w.sub[1], 3, out);
      break;
    case WffKind::Or:
      render_into(w.sub[0], 1, out);
      out += " v ";
      render_into(w.sub[1], 2, out);
      break;
  }
  if (wrap) out += ')';
}

Wff parse_pattern(std::string_view text) { return SpecParser(text, true).parse(); }

}  // namespace

Wff parse_spec(std::string_view text) { return SpecParser(text, false).parse(); }

std::string render_spec(const Wff& w) {
  std::string out;
  render_into(w, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::string_view term_kind_name(TermKind k) {
  switch (k) {
    case TermKind::Input:
      return "input";
    case TermKind::Output:
      return "output";
    case TermKind::Bound:
      return "bound";
    case TermKind::Literal:
      return "literal";
    case TermKind::Component:
      return "component";
  }
  return "?";
}

TermKind term_kind_from(const std::string& s) {
  if (s == "input") return TermKind::Input;
  if (s == "output") return TermKind::Output;
  if (s == "bound") return TermKind::Bound;
  if (s == "literal") return TermKind::Literal;
  if (s == "component") return TermKind::Component;
  throw SpecError(SpecError::Kind::Syntax, "bad term kind '" + s + "'");
}

}  // namespace

nlohmann::json spec_to_json(const Wff& w) {
  using nlohmann::json;
  switch (w.kind) {
    case WffKind::Atom: {
      json terms = json::array();
      for (const auto& t : w.args) {
        json jt{{"kind", term_kind_name(t.kind)}};
        jt[t.kind == TermKind::Literal ? "value" : "rank"] = t.value;
        terms.push_back(jt);
      }
      return {{"kind", "atom"},
              {"relation", relation_name(w.rel)},
              {"terms", terms}};
    }
    case WffKind::Not:
      return {{"kind", "not"}, {"body", spec_to_json(w.sub[0])}};
    case WffKind::And:
    case WffKind::Or:
      return {{"kind", w.kind == WffKind::And ? "and" : "or"},
              {"left", spec_to_json(w.sub[0])},
              {"right", spec_to_json(w.sub[1])}};
    case WffKind::Exists:
    case WffKind::Forall:
      return {{"kind", w.kind == WffKind::Exists ? "exists" : "forall"},
              {"var", w.var},
              {"body", spec_to_json(w.sub[0])}};
  }
  return {};
}

Wff spec_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "atom") {
    auto rel = relation_from_name(j.at("relation").get<std::string>());
    if (!rel) throw SpecError(SpecError::Kind::Syntax, "bad relation in JSON");
    std::vector<Term> args;
    for (const auto& jt : j.at("terms")) {
      Term t;
      t.kind = term_kind_from(jt.at("kind").get<std::string>());
      t.value = jt.at(t.kind == TermKind::Literal ? "value" : "rank")
                    .get<std::uint64_t>();
      args.push_back(t);
    }
    return Wff::atom(*rel, std::move(args));
  }
  if (kind == "not") return Wff::negation(spec_from_json(j.at("body")));
  if (kind == "and")
    return Wff::conj(spec_from_json(j.at("left")), spec_from_json(j.at("right")));
  if (kind == "or")
    return Wff::disj(spec_from_json(j.at("left")), spec_from_json(j.at("right")));
  if (kind == "exists")
    return Wff::exists(j.at("var").get<std::uint64_t>(),
                       spec_from_json(j.at("body")));
  if (kind == "forall")
    return Wff::forall(j.at("var").get<std::uint64_t>(),
                       spec_from_json(j.at("body")));
  throw SpecError(SpecError::Kind::Syntax, "bad wff kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Variable queries

namespace {

template <typename F>
void visit_terms(const Wff& w, F&& f) {
  if (w.kind == WffKind::Atom) {
    for (const auto& t : w.args) f(t);
    return;
  }
  for (const auto& s : w.sub) visit_terms(s, f);
}

std::vector<std::uint64_t> ranks_of(const Wff& w, TermKind kind) {
  std::vector<std::uint64_t> out;
  visit_terms(w, [&](const Term& t) {
    if (t.kind == kind && std::find(out.begin(), out.end(), t.value) == out.end())
      out.push_back(t.value);
  });
  return out;
}

bool closed_under(const Wff& w, std::vector<std::uint64_t>& scope) {
  switch (w.kind) {
    case WffKind::Atom:
      for (const auto& t : w.args)
        if (t.kind == TermKind::Bound &&
            std::find(scope.begin(), scope.end(), t.value) == scope.end())
          return false;
      return true;
    case WffKind::Exists:
    case WffKind::Forall: {
      if (std::find(scope.begin(), scope.end(), w.var) != scope.end())
        return false;  // shadowing
      scope.push_back(w.var);
      bool ok = closed_under(w.sub[0], scope);
      scope.pop_back();
      return ok;
    }
    default:
      for (const auto& s : w.sub)
        if (!closed_under(s, scope)) return false;
      return true;
  }
}

}  // namespace

std::vector<std::uint64_t> input_ranks(const Wff& w) {
  return ranks_of(w, TermKind::Input);
}

std::vector<std::uint64_t> output_ranks(const Wff& w) {
  return ranks_of(w, TermKind::Output);
}

std::uint64_t max_input_rank(const Wff& w) {
  auto r = input_ranks(w);
  return r.empty() ? 0 : *std::max_element(r.begin(), r.end());
}

std::uint64_t max_bound_rank(const Wff& w) {
  std::uint64_t m = 0;
  std::function<void(const Wff&)> go = [&](const Wff& x) {
    if (x.kind == WffKind::Exists || x.kind == WffKind::Forall)
      m = std::max(m, x.var);
    if (x.kind == WffKind::Atom)
      for (const auto& t : x.args)
        if (t.kind == TermKind::Bound) m = std::max(m, t.value);
    for (const auto& s : x.sub) go(s);
  };
  go(w);
  return m;
}

bool mentions(const Wff& w, const Term& t) {
  bool found = false;
  visit_terms(w, [&](const Term& u) { found = found || u == t; });
  return found;
}

bool is_closed(const Wff& w) {
  std::vector<std::uint64_t> scope;
  return closed_under(w, scope);
}

Wff replace_terms(const Wff& w, const std::map<Term, Term>& repl) {
  Wff out = w;
  switch (w.kind) {
    case WffKind::Atom:
      for (auto& t : out.args)
        if (auto it = repl.find(t); it != repl.end()) t = it->second;
      return out;
    case WffKind::Exists:
    case WffKind::Forall:
      if (repl.count(Term::bound(w.var))) {
        auto inner = repl;
        inner.erase(Term::bound(w.var));
        out.sub[0] = replace_terms(w.sub[0], inner);
        return out;
      }
      [[fallthrough]];
    default:
      for (auto& s : out.sub) s = replace_terms(s, repl);
      return out;
  }
}

Wff apply_binding(const Wff& w, const InputBinding& b) {
  std::map<Term, Term> repl;
  for (const auto& [rank, t] : b) repl[Term::input(rank)] = t;
  return replace_terms(w, repl);
}

std::string render_binding(const InputBinding& b) {
  std::string out;
  for (const auto& [rank, t] : b) {
    if (!out.empty()) out += ",";
    out += term_name(Term::input(rank)) + "=" + term_name(t);
  }
  return out;
}

namespace {

Wff canonical_rec(const Wff& w, std::map<std::uint64_t, std::uint64_t>& names,
                  std::uint64_t& counter) {
  switch (w.kind) {
    case WffKind::Atom: {
      Wff out = w;
      for (auto& t : out.args)
        if (t.kind == TermKind::Bound)
          if (auto it = names.find(t.value); it != names.end()) t.value = it->second;
      return out;
    }
    case WffKind::Not:
      if (w.sub[0].kind == WffKind::Not)
        return canonical_rec(w.sub[0].sub[0], names, counter);
      return Wff::negation(canonical_rec(w.sub[0], names, counter));
    case WffKind::Exists:
    case WffKind::Forall: {
      auto saved = names;
      std::uint64_t fresh = ++counter;
      names[w.var] = fresh;
      Wff body = canonical_rec(w.sub[0], names, counter);
      names = std::move(saved);
      return w.kind == WffKind::Exists ? Wff::exists(fresh, std::move(body))
                                       : Wff::forall(fresh, std::move(body));
    }
    default: {
      Wff out = w;
      for (auto& s : out.sub) s = canonical_rec(s, names, counter);
      return out;
    }
  }
}

}  // namespace

Wff canonical(const Wff& w) {
  std::map<std::uint64_t, std::uint64_t> names;
  std::uint64_t counter = 0;
  return canonical_rec(w, names, counter);
}

bool same_spec(const Wff& a, const Wff& b) { return canonical(a) == canonical(b); }

std::string goal_key(const Wff& w) {
  Wff c = canonical(w);
  std::map<Term, Term> repl;
  std::uint64_t next = 0;
  for (auto r : input_ranks(c)) repl[Term::input(r)] = Term::input(++next);
  return render_spec(replace_terms(c, repl));
}

Wff eliminate_forall(const Wff& w) {
  if (w.kind == WffKind::Forall)
    return Wff::negation(
        Wff::exists(w.var, Wff::negation(eliminate_forall(w.sub[0]))));
  Wff out = w;
  for (auto& s : out.sub) s = eliminate_forall(s);
  return out;
}

const Wff& subtree(const Wff& w, const Path& p) {
  const Wff* cur = &w;
  for (auto i : p) {
    if (i >= cur->sub.size())
      throw SpecError(SpecError::Kind::BadPath, "path out of bounds");
    cur = &cur->sub[i];
  }
  return *cur;
}

Wff replace_subtree(const Wff& w, const Path& p, Wff repl) {
  if (p.empty()) return repl;
  Wff out = w;
  Wff* cur = &out;
  for (auto i : p) {
    if (i >= cur->sub.size())
      throw SpecError(SpecError::Kind::BadPath, "path out of bounds");
    cur = &cur->sub[i];
  }
  *cur = std::move(repl);
  return out;
}

std::vector<Path> all_paths(const Wff& w) {
  std::vector<Path> out;
  Path cur;
  std::function<void(const Wff&)> go = [&](const Wff& x) {
    out.push_back(cur);
    for (std::size_t i = 0; i < x.sub.size(); ++i) {
      cur.push_back(i);
      go(x.sub[i]);
      cur.pop_back();
    }
  };
  go(w);
  return out;
}

std::string_view kind_name(SpecKind k) {
  switch (k) {
    case SpecKind::Decide:
      return "decide";
    case SpecKind::List:
      return "list";
    case SpecKind::ConditionalList:
      return "conditional-list";
  }
  return "?";
}

namespace {

void check_shape(const Wff& w, bool under_forall) {
  if (w.kind == WffKind::Atom) {
    std::set<std::uint64_t> seen;
    for (const auto& t : w.args) {
      if (t.kind != TermKind::Output) continue;
      if (under_forall)
        throw SpecError(SpecError::Kind::Unsupported,
                        "output variable under (all ...)");
      if (!seen.insert(t.value).second)
        throw SpecError(SpecError::Kind::Unsupported,
                        "repeated output variable in " + render_spec(w));
    }
    return;
  }
  for (const auto& s : w.sub)
    check_shape(s, under_forall || w.kind == WffKind::Forall);
}

void conjuncts(const Wff& w, std::vector<const Wff*>& out) {
  if (w.kind == WffKind::And) {
    conjuncts(w.sub[0], out);
    conjuncts(w.sub[1], out);
  } else {
    out.push_back(&w);
  }
}

}  // namespace

SpecKind classify(const Wff& w) {
  if (!is_closed(w))
    throw SpecError(SpecError::Kind::Unbound, "unbound quantified variable");
  check_shape(w, false);
  auto outs = output_ranks(w);
  if (outs.empty()) return SpecKind::Decide;
  if (outs.size() > 1)
    throw SpecError(SpecError::Kind::Unsupported, "more than one output variable");
  std::vector<const Wff*> parts;
  conjuncts(w, parts);
  for (const Wff* p : parts)
    if (output_ranks(*p).empty()) return SpecKind::ConditionalList;
  return SpecKind::List;
}

std::optional<SpecKind> try_classify(const Wff& w) {
  try {
    return classify(w);
  } catch (const SpecError&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// DEF table

std::string_view def_name(DefId d) {
  switch (d) {
    case DefId::BETW:
      return "BETW";
    case DefId::FAC:
      return "FAC";
    case DefId::PFAC:
      return "PFAC";
    case DefId::PRIME:
      return "PRIME";
    case DefId::REM:
      return "REM";
    case DefId::MUL:
      return "MUL";
    case DefId::MULT:
      return "MULT";
    case DefId::AND_COMM:
      return "^";
    case DefId::EQ:
      return "EQ";
  }
  return "?";
}

std::optional<DefId> def_from_name(std::string_view name) {
  if (name == "AND_COMM" || name == "AND") return DefId::AND_COMM;
  for (DefId d : kAllDefs)
    if (def_name(d) == name) return d;
  return std::nullopt;
}

const std::vector<DefRule>& def_table() {
  static const std::vector<DefRule> table = [] {
    auto p = [](std::string_view s) { return parse_pattern(s); };
    std::vector<DefRule> t;
    t.push_back({DefId::BETW, p("BETW(a,b,c)"), p("LT(a,b)^LT(b,c)")});
    t.push_back({DefId::FAC, p("FAC(a,b)"), p("(exists A)MUL(A,a,b)")});
    t.push_back({DefId::PFAC, p("PFAC(a,b)"), p("FAC(a,b)^BETW(\"1\",a,b)")});
    t.push_back({DefId::PRIME, p("PRIME(a)"),
                 p("~(exists A)PFAC(A,a)^~LT(a,\"2\")")});
    t.push_back({DefId::REM, p("FAC(a,b)"), p("REM(b,a,\"0\")")});
    t.push_back({DefId::MUL, p("MUL(a,b,c)"), p("MUL(b,a,c)")});
    t.push_back({DefId::MULT, p("MUL(a,b,c)"), p("MUL(a,b,c)^~LT(c,a)")});
    // Schematic entries: P^Q = Q^P and P(a) = (exists A)(P(A)^EQ(A,a)).
    t.push_back({DefId::AND_COMM, {}, {}});
    t.push_back({DefId::EQ, {}, {}});
    return t;
  }();
  return table;
}

namespace {

struct Unifier {
  std::map<std::uint64_t, Term> comps;
  std::map<std::uint64_t, std::uint64_t> bound;  // pattern rank -> wff rank

  bool term(const Term& pat, const Term& t) {
    switch (pat.kind) {
      case TermKind::Component: {
        auto [it, fresh] = comps.emplace(pat.value, t);
        return fresh || it->second == t;
      }
      case TermKind::Bound: {
        auto it = bound.find(pat.value);
        return it != bound.end() && t == Term::bound(it->second);
      }
      default:
        return pat == t;
    }
  }

  bool wff(const Wff& pat, const Wff& w) {
    if (pat.kind != w.kind) return false;
    switch (pat.kind) {
      case WffKind::Atom:
        if (pat.rel != w.rel) return false;
        for (std::size_t i = 0; i < pat.args.size(); ++i)
          if (!term(pat.args[i], w.args[i])) return false;
        return true;
      case WffKind::Exists:
      case WffKind::Forall:
        bound[pat.var] = w.var;
        return wff(pat.sub[0], w.sub[0]);
      default:
        for (std::size_t i = 0; i < pat.sub.size(); ++i)
          if (!wff(pat.sub[i], w.sub[i])) return false;
        return true;
    }
  }

  Wff instantiate(const Wff& pat, std::uint64_t& next_fresh) {
    Wff out = pat;
    if (pat.kind == WffKind::Exists || pat.kind == WffKind::Forall) {
      if (!bound.count(pat.var)) bound[pat.var] = ++next_fresh;
      out.var = bound[pat.var];
    }
    if (pat.kind == WffKind::Atom) {
      for (auto& t : out.args) {
        if (t.kind == TermKind::Component) {
          t = comps.at(t.value);
        } else if (t.kind == TermKind::Bound) {
          if (!bound.count(t.value)) bound[t.value] = ++next_fresh;
          t = Term::bound(bound[t.value]);
        }
      }
    }
    for (auto& s : out.sub) s = instantiate(s, next_fresh);
    return out;
  }
};

std::optional<Wff> rewrite_eq(const Wff& node, Direction dir,
                              std::optional<std::size_t> arg,
                              std::uint64_t& next_fresh) {
  if (dir == Direction::Forward) {
    if (node.kind != WffKind::Atom) return std::nullopt;
    std::size_t idx;
    if (arg) {
      if (*arg >= node.args.size()) return std::nullopt;
      idx = *arg;
    } else {
      auto it = std::find_if(node.args.rbegin(), node.args.rend(),
                             [](const Term& t) { return t.kind == TermKind::Literal; });
      if (it == node.args.rend()) return std::nullopt;
      idx = static_cast<std::size_t>(node.args.rend() - it) - 1;
    }
    Term value = node.args[idx];
    Term fresh = Term::bound(++next_fresh);
    Wff inner = node;
    inner.args[idx] = fresh;
    return Wff::exists(fresh.value,
                       Wff::conj(inner, Wff::atom(Relation::EQ, {fresh, value})));
  }
  // (exists A)(P(A) ^ EQ(A,a)) -> P(a)
  if (node.kind != WffKind::Exists) return std::nullopt;
  const Wff& body = node.sub[0];
  if (body.kind != WffKind::And) return std::nullopt;
  const Wff& p = body.sub[0];
  const Wff& eq = body.sub[1];
  Term a = Term::bound(node.var);
  if (p.kind != WffKind::Atom || eq.kind != WffKind::Atom ||
      eq.rel != Relation::EQ || eq.args[0] != a || eq.args[1] == a)
    return std::nullopt;
  if (std::count(p.args.begin(), p.args.end(), a) != 1) return std::nullopt;
  Wff out = p;
  for (auto& t : out.args)
    if (t == a) t = eq.args[1];
  return out;
}

}  // namespace

std::optional<Wff> try_apply_def(DefId def, const Wff& w, const Path& path,
                                 Direction dir, std::optional<std::size_t> arg) {
  const Wff* node_ptr;
  try {
    node_ptr = &subtree(w, path);
  } catch (const SpecError&) {
    return std::nullopt;
  }
  const Wff& node = *node_ptr;
  std::uint64_t next_fresh = max_bound_rank(w);
  std::optional<Wff> repl;
  if (def == DefId::AND_COMM) {
    if (node.kind != WffKind::And) return std::nullopt;
    repl = Wff::conj(node.sub[1], node.sub[0]);
  } else if (def == DefId::EQ) {
    repl = rewrite_eq(node, dir, arg, next_fresh);
  } else {
    const auto& rule = def_table()[static_cast<std::size_t>(def)];
    const Wff& from = dir == Direction::Forward ? rule.lhs : rule.rhs;
    const Wff& to = dir == Direction::Forward ? rule.rhs : rule.lhs;
    Unifier u;
    if (!u.wff(from, node)) return std::nullopt;
    repl = u.instantiate(to, next_fresh);
  }
  if (!repl) return std::nullopt;
  Wff out = replace_subtree(w, path, std::move(*repl));
  if (!is_closed(out)) return std::nullopt;
  return out;
}

Wff apply_def(DefId def, const Wff& w, const Path& path, Direction dir,
              std::optional<std::size_t> arg) {
  subtree(w, path);  // throws BadPath
  auto out = try_apply_def(def, w, path, dir, arg);
  if (!out)
    throw SpecError(SpecError::Kind::NoMatch,
                    "DEF-" + std::string(def_name(def)) + " does not apply to " +
                        render_spec(subtree(w, path)));
  return *out;
}

std::optional<Wff> try_apply_scope(const Wff& w, const Path& path, Direction dir) {
  const Wff* node_ptr;
  try {
    node_ptr = &subtree(w, path);
  } catch (const SpecError&) {
    return std::nullopt;
  }
  const Wff& node = *node_ptr;
  if (dir == Direction::Forward) {
    if (node.kind != WffKind::Exists || node.sub[0].kind != WffKind::And)
      return std::nullopt;
    Term a = Term::bound(node.var);
    const Wff& p = node.sub[0].sub[0];
    const Wff& q = node.sub[0].sub[1];
    if (!mentions(q, a))
      return replace_subtree(w, path, Wff::conj(Wff::exists(node.var, p), q));
    if (!mentions(p, a))
      return replace_subtree(w, path, Wff::conj(p, Wff::exists(node.var, q)));
    return std::nullopt;
  }
  if (node.kind != WffKind::And) return std::nullopt;
  const Wff& l = node.sub[0];
  const Wff& r = node.sub[1];
  auto widen = [&](const Wff& ex, const Wff& other, bool ex_left) -> std::optional<Wff> {
    std::uint64_t var = ex.var;
    Wff body = ex.sub[0];
    if (max_bound_rank(other) >= var || mentions(other, Term::bound(var))) {
      // Rename to avoid capturing or shadowing inside `other`.
      std::uint64_t fresh = max_bound_rank(w) + 1;
      body = replace_terms(body, {{Term::bound(var), Term::bound(fresh)}});
      var = fresh;
    }
    Wff inner = ex_left ? Wff::conj(body, other) : Wff::conj(other, body);
    Wff out = replace_subtree(w, path, Wff::exists(var, std::move(inner)));
    if (!is_closed(out)) return std::nullopt;
    return out;
  };
  if (l.kind == WffKind::Exists) return widen(l, r, true);
  if (r.kind == WffKind::Exists) return widen(r, l, false);
  return std::nullopt;
}

std::optional<InputBinding> match_axiom(const Wff& goal, const Wff& axiom_spec) {
  InputBinding binding;
  std::map<std::uint64_t, std::uint64_t> bound;
  std::function<bool(const Wff&, const Wff&)> go = [&](const Wff& a,
                                                       const Wff& g) -> bool {
    if (a.kind != g.kind) return false;
    switch (a.kind) {
      case WffKind::Atom:
        if (a.rel != g.rel) return false;
        for (std::size_t i = 0; i < a.args.size(); ++i) {
          const Term& at = a.args[i];
          const Term& gt = g.args[i];
          if (at.kind == TermKind::Input) {
            if (gt.kind != TermKind::Input && gt.kind != TermKind::Literal)
              return false;
            auto [it, fresh] = binding.emplace(at.value, gt);
            if (!fresh && it->second != gt) return false;
          } else if (at.kind == TermKind::Bound) {
            auto it = bound.find(at.value);
            if (it == bound.end() || gt != Term::bound(it->second)) return false;
          } else if (at != gt) {
            return false;
          }
        }
        return true;
      case WffKind::Exists:
      case WffKind::Forall:
        bound[a.var] = g.var;
        return go(a.sub[0], g.sub[0]);
      default:
        for (std::size_t i = 0; i < a.sub.size(); ++i)
          if (!go(a.sub[i], g.sub[i])) return false;
        return true;
    }
  };
  if (!go(canonical(axiom_spec), canonical(goal))) return std::nullopt;
  for (auto it = binding.begin(); it != binding.end();) {
    if (it->second == Term::input(it->first))
      it = binding.erase(it);
    else
      ++it;
  }
  return binding;
}

}  // namespace phpsynth
