#include "phpsynth/programs.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace phpsynth {

std::string var_name(const Var& v) {
  const char* seq = v.kind == VarKind::Input ? "ijk" : v.kind == VarKind::Prog ? "abc" : "ABC";
  if (v.rank >= 1 && v.rank <= 3) return std::string("$") + seq[v.rank - 1];
  return std::string("$") + seq[0] + std::to_string(v.rank);
}

Expr Expr::boolean(bool b) {
  Expr e;
  e.kind = ExprKind::Bool;
  e.value = b ? 1 : 0;
  return e;
}

Expr Expr::integer(std::uint64_t v) {
  Expr e;
  e.kind = ExprKind::Int;
  e.value = v;
  return e;
}

Expr Expr::variable(Var v) {
  Expr e;
  e.kind = ExprKind::Var;
  e.var = v;
  return e;
}

Expr Expr::unary(ExprKind k, Expr x) {
  Expr e;
  e.kind = k;
  e.ops.push_back(std::move(x));
  return e;
}

Expr Expr::binary(ExprKind k, Expr l, Expr r) {
  Expr e;
  e.kind = k;
  e.ops.push_back(std::move(l));
  e.ops.push_back(std::move(r));
  return e;
}

Expr Expr::hole(HoleId h) {
  Expr e;
  e.kind = ExprKind::Hole;
  e.value = static_cast<std::uint64_t>(h);
  return e;
}

Cmd Cmd::echo(Expr e) {
  Cmd c;
  c.kind = CmdKind::Echo;
  c.expr = std::move(e);
  return c;
}

Cmd Cmd::assign(Var v, Expr e) {
  Cmd c;
  c.kind = CmdKind::Assign;
  c.target = v;
  c.expr = std::move(e);
  return c;
}

Cmd Cmd::if_(Expr cond, Cmd then) {
  Cmd c;
  c.kind = CmdKind::If;
  c.expr = std::move(cond);
  c.body.push_back(std::move(then));
  return c;
}

Cmd Cmd::for_(Cmd init, Expr cond, Cmd step, Cmd stmt) {
  Cmd c;
  c.kind = CmdKind::For;
  c.expr = std::move(cond);
  c.body = {std::move(init), std::move(step), std::move(stmt)};
  return c;
}

Cmd Cmd::inc(Var v) {
  Cmd c;
  c.kind = CmdKind::Inc;
  c.target = v;
  return c;
}

Cmd Cmd::block(std::vector<Cmd> cmds) {
  Cmd c;
  c.kind = CmdKind::Block;
  c.body = std::move(cmds);
  return c;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Or:
      return 1;
    case ExprKind::And:
      return 2;
    case ExprKind::Eq:
      return 3;
    case ExprKind::Lt:
      return 4;
    case ExprKind::Mul:
    case ExprKind::Rem:
      return 5;
    case ExprKind::Not:
      return 6;
    default:
      return 7;
  }
}

const char* op_text(ExprKind k) {
  switch (k) {
    case ExprKind::Or:
      return " || ";
    case ExprKind::And:
      return " && ";
    case ExprKind::Eq:
      return " == ";
    case ExprKind::Lt:
      return " < ";
    case ExprKind::Mul:
      return " * ";
    case ExprKind::Rem:
      return " % ";
    default:
      return " ? ";
  }
}

void render_expr(const Expr& e, int need, std::string& out) {
  bool wrap = precedence(e) < need;
  if (wrap) out += '(';
  switch (e.kind) {
    case ExprKind::Bool:
      out += e.value ? "TRUE" : "FALSE";
      break;
    case ExprKind::Int:
      out += std::to_string(e.value);
      break;
    case ExprKind::Var:
      out += var_name(e.var);
      break;
    case ExprKind::Hole:
      out += e.value == static_cast<std::uint64_t>(HoleId::M) ? "[M]" : "[N]";
      break;
    case ExprKind::Paren:
      out += '(';
      render_expr(e.ops[0], 0, out);
      out += ')';
      break;
    case ExprKind::Not:
      out += '!';
      render_expr(e.ops[0], 6, out);
      break;
    default: {
      int p = precedence(e);
      render_expr(e.ops[0], p, out);
      out += op_text(e.kind);
      render_expr(e.ops[1], p + 1, out);
    }
  }
  if (wrap) out += ')';
}

void render_cmd(const Cmd& c, std::string& out) {
  switch (c.kind) {
    case CmdKind::Echo:
      out += "echo " + render(c.expr) + " ;";
      break;
    case CmdKind::Assign:
      out += var_name(c.target) + "=" + render(c.expr) + " ;";
      break;
    case CmdKind::Inc:
      out += "++" + var_name(c.target) + " ;";
      break;
    case CmdKind::If:
      out += "if (" + render(c.expr) + ") ";
      render_cmd(c.body[0], out);
      break;
    case CmdKind::For:
      out += "for (" + var_name(c.body[0].target) + "=" + render(c.body[0].expr) +
             " ; " + render(c.expr) + " ; ++" + var_name(c.body[1].target) + ") ";
      render_cmd(c.body[2], out);
      break;
    case CmdKind::Block:
      out += "{ ";
      for (const auto& s : c.body) {
        render_cmd(s, out);
        out += ' ';
      }
      out += "} ;";
      break;
  }
}

}  // namespace

std::string render(const Expr& e) {
  std::string out;
  render_expr(e, 0, out);
  return out;
}

std::string render(const Cmd& c) {
  std::string out;
  render_cmd(c, out);
  return out;
}

std::string render(const Program& p) {
  std::string out;
  for (const auto& c : p.cmds) {
    if (!out.empty()) out += ' ';
    render_cmd(c, out);
  }
  return out;
}

std::string normalize_text(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  std::string out;
  for (char c : s) {
    if (c == ';' && !out.empty() && out.back() == '}') continue;
    out += c;
  }
  while (!out.empty() && out.back() == ';') out.pop_back();
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class ProgramParser {
 public:
  ProgramParser(std::string_view text, bool holes) : text_(text), holes_(holes) {}

  std::vector<Cmd> commands_until_end() {
    std::vector<Cmd> out;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) break;
      if (text_[pos_] == ';') {
        ++pos_;
        continue;
      }
      out.push_back(command());
    }
    return out;
  }

  Expr expression_only() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ProgramError("at position " + std::to_string(pos_) + ": " + msg, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool lit(std::string_view s) {
    skip_ws();
    if (text_.substr(pos_, s.size()) != s) return false;
    // keywords must not run into identifiers
    if (std::isalpha(static_cast<unsigned char>(s.back())) && pos_ + s.size() < text_.size() &&
        std::isalnum(static_cast<unsigned char>(text_[pos_ + s.size()])))
      return false;
    pos_ += s.size();
    return true;
  }

  void expect(std::string_view s) {
    if (!lit(s)) fail("expected '" + std::string(s) + "'");
  }

  bool at(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  Var variable() {
    skip_ws();
    if (!at('$')) fail("expected variable");
    std::size_t start = ++pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    if (name.empty()) fail("empty variable name");
    VarKind kind;
    std::string_view seq;
    char c0 = name[0];
    if (std::string_view("ijk").find(c0) != std::string_view::npos) {
      kind = VarKind::Input;
      seq = "ijk";
    } else if (std::string_view("abc").find(c0) != std::string_view::npos) {
      kind = VarKind::Prog;
      seq = "abc";
    } else if (std::string_view("ABC").find(c0) != std::string_view::npos) {
      kind = VarKind::Flag;
      seq = "ABC";
    } else {
      pos_ = start;
      fail("unknown variable $" + std::string(name));
    }
    if (name.size() == 1) return {kind, seq.find(c0) + 1};
    if (c0 != seq[0]) fail("bad variable $" + std::string(name));
    std::uint64_t r = 0;
    for (char ch : name.substr(1)) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) fail("bad variable $" + std::string(name));
      r = r * 10 + static_cast<std::uint64_t>(ch - '0');
    }
    if (r < 4) fail("bad variable $" + std::string(name));
    return {kind, r};
  }

  Cmd command() {
    skip_ws();
    if (lit("echo")) {
      Expr e = expr();
      expect(";");
      return Cmd::echo(std::move(e));
    }
    if (lit("if")) {
      expect("(");
      Expr cond = expr();
      expect(")");
      return Cmd::if_(std::move(cond), command());
    }
    if (lit("for")) {
      expect("(");
      Var v = variable();
      expect("=");
      Expr init = expr();
      expect(";");
      Expr cond = expr();
      expect(";");
      expect("++");
      Var s = variable();
      expect(")");
      return Cmd::for_(Cmd::assign(v, std::move(init)), std::move(cond), Cmd::inc(s),
                       command());
    }
    if (lit("{")) {
      std::vector<Cmd> body;
      while (!lit("}")) {
        if (pos_ >= text_.size()) fail("unterminated block");
        if (lit(";")) continue;
        body.push_back(command());
      }
      lit(";");
      return Cmd::block(std::move(body));
    }
    if (lit("++")) {
      Var v = variable();
      if (v.kind == VarKind::Input) fail("input variables are never assigned");
      expect(";");
      return Cmd::inc(v);
    }
    if (at('$')) {
      Var v = variable();
      if (v.kind == VarKind::Input) fail("input variables are never assigned");
      expect("=");
      Expr e = expr();
      expect(";");
      return Cmd::assign(v, std::move(e));
    }
    fail("expected a command");
  }

  Expr expr() {
    Expr l = conj();
    while (lit("||")) l = Expr::binary(ExprKind::Or, std::move(l), conj());
    return l;
  }
  Expr conj() {
    Expr l = equality();
    while (lit("&&")) l = Expr::binary(ExprKind::And, std::move(l), equality());
    return l;
  }
  Expr equality() {
    Expr l = less();
    while (lit("==")) l = Expr::binary(ExprKind::Eq, std::move(l), less());
    return l;
  }
  Expr less() {
    Expr l = product();
    while (lit("<")) l = Expr::binary(ExprKind::Lt, std::move(l), product());
    return l;
  }
  Expr product() {
    Expr l = unary();
    while (true) {
      if (lit("*"))
        l = Expr::binary(ExprKind::Mul, std::move(l), unary());
      else if (lit("%"))
        l = Expr::binary(ExprKind::Rem, std::move(l), unary());
      else
        return l;
    }
  }
  Expr unary() {
    if (lit("!")) return Expr::unary(ExprKind::Not, unary());
    return primary();
  }
  Expr primary() {
    skip_ws();
    if (lit("(")) {
      Expr e = expr();
      expect(")");
      return Expr::paren(std::move(e));
    }
    if (holes_ && lit("[M]")) return Expr::hole(HoleId::M);
    if (holes_ && lit("[N]")) return Expr::hole(HoleId::N);
    if (lit("TRUE")) return Expr::boolean(true);
    if (lit("FALSE")) return Expr::boolean(false);
    if (at('$')) return Expr::variable(variable());
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      std::uint64_t v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        v = v * 10 + static_cast<std::uint64_t>(text_[pos_++] - '0');
      return Expr::integer(v);
    }
    fail("expected an expression");
  }

  std::string_view text_;
  bool holes_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse_program(std::string_view text) {
  return Program{ProgramParser(text, false).commands_until_end()};
}

Expr parse_expr(std::string_view text) { return ProgramParser(text, false).expression_only(); }

Template parse_template(std::string_view text) {
  return Template{ProgramParser(text, true).commands_until_end()};
}

// ---------------------------------------------------------------------------
// Queries

namespace {

template <typename F>
void visit_expr_vars(const Expr& e, F&& f) {
  if (e.kind == ExprKind::Var) f(e.var);
  for (const auto& o : e.ops) visit_expr_vars(o, f);
}

template <typename F>
void visit_cmd(const Cmd& c, F&& f) {
  f(c);
  for (const auto& s : c.body) visit_cmd(s, f);
}

template <typename F>
void visit_vars(const Program& p, F&& f) {
  for (const auto& c : p.cmds)
    visit_cmd(c, [&](const Cmd& x) {
      if (x.kind == CmdKind::Assign || x.kind == CmdKind::Inc) f(x.target);
      if (x.kind != CmdKind::Inc && x.kind != CmdKind::Block) visit_expr_vars(x.expr, f);
    });
}

}  // namespace

RankBound max_prog_rank(const Program& p) {
  RankBound r;
  visit_vars(p, [&](const Var& v) {
    if (v.kind == VarKind::Prog) r.prog = std::max(r.prog, v.rank);
    if (v.kind == VarKind::Flag) r.flag = std::max(r.flag, v.rank);
  });
  return r;
}

std::map<Var, int> assigned_vars(const Program& p) {
  std::map<Var, int> out;
  for (const auto& c : p.cmds)
    visit_cmd(c, [&](const Cmd& x) {
      if (x.kind == CmdKind::Assign || x.kind == CmdKind::Inc) ++out[x.target];
    });
  return out;
}

std::size_t echo_count(const Program& p) {
  std::size_t n = 0;
  for (const auto& c : p.cmds)
    visit_cmd(c, [&](const Cmd& x) { n += x.kind == CmdKind::Echo; });
  return n;
}

std::size_t occurrences(const Program& p, const Var& v) {
  std::size_t n = 0;
  visit_vars(p, [&](const Var& u) { n += u == v; });
  return n;
}

std::vector<std::uint64_t> program_inputs(const Program& p) {
  std::vector<std::uint64_t> out;
  visit_vars(p, [&](const Var& v) {
    if (v.kind == VarKind::Input && std::find(out.begin(), out.end(), v.rank) == out.end())
      out.push_back(v.rank);
  });
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Transformations

Expr subst_inputs(const Expr& e, const ExprBinding& b) {
  if (e.kind == ExprKind::Var && e.var.kind == VarKind::Input) {
    if (auto it = b.find(e.var.rank); it != b.end()) return it->second;
    return e;
  }
  Expr out = e;
  for (auto& o : out.ops) o = subst_inputs(o, b);
  return out;
}

namespace {

template <typename F>
Cmd map_exprs(const Cmd& c, F&& f) {
  Cmd out = c;
  if (c.kind != CmdKind::Inc && c.kind != CmdKind::Block) out.expr = f(c.expr);
  for (auto& s : out.body) s = map_exprs(s, f);
  return out;
}

Var shifted(Var v, RankBound off) {
  if (v.kind == VarKind::Prog) v.rank += off.prog;
  if (v.kind == VarKind::Flag) v.rank += off.flag;
  return v;
}

Expr shift_expr(const Expr& e, RankBound off) {
  Expr out = e;
  if (e.kind == ExprKind::Var) out.var = shifted(e.var, off);
  for (auto& o : out.ops) o = shift_expr(o, off);
  return out;
}

Cmd shift_cmd(const Cmd& c, RankBound off) {
  Cmd out = c;
  if (c.kind == CmdKind::Assign || c.kind == CmdKind::Inc) out.target = shifted(c.target, off);
  if (c.kind != CmdKind::Inc && c.kind != CmdKind::Block) out.expr = shift_expr(c.expr, off);
  for (auto& s : out.body) s = shift_cmd(s, off);
  return out;
}

}  // namespace

Program subst_inputs(const Program& p, const ExprBinding& b) {
  if (b.empty()) return p;
  Program out;
  for (const auto& c : p.cmds)
    out.cmds.push_back(map_exprs(c, [&](const Expr& e) { return subst_inputs(e, b); }));
  return out;
}

Program shift_ranks(const Program& p, RankBound offset) {
  Program out;
  for (const auto& c : p.cmds) out.cmds.push_back(shift_cmd(c, offset));
  return out;
}

Expr fill(const Expr& e, const std::map<HoleId, Expr>& holes) {
  if (e.kind == ExprKind::Hole) {
    auto it = holes.find(static_cast<HoleId>(e.value));
    return it == holes.end() ? e : it->second;
  }
  Expr out = e;
  for (auto& o : out.ops) o = fill(o, holes);
  return out;
}

std::vector<Cmd> fill(const Template& t, const std::map<HoleId, Expr>& holes) {
  std::vector<Cmd> out;
  for (const auto& c : t.cmds)
    out.push_back(map_exprs(c, [&](const Expr& e) { return fill(e, holes); }));
  return out;
}

namespace {

struct Splicer {
  const EchoReplacer& replace;

  std::vector<Cmd> seq(const std::vector<Cmd>& cmds) const {
    std::vector<Cmd> out;
    for (const auto& c : cmds) {
      if (c.kind == CmdKind::Echo) {
        auto r = replace(c.expr);
        out.insert(out.end(), std::make_move_iterator(r.begin()),
                   std::make_move_iterator(r.end()));
      } else {
        out.push_back(inner(c));
      }
    }
    return out;
  }

  Cmd single(const Cmd& c) const {
    if (c.kind != CmdKind::Echo) return inner(c);
    auto r = replace(c.expr);
    if (r.size() == 1) return std::move(r[0]);
    return Cmd::block(std::move(r));
  }

  Cmd inner(const Cmd& c) const {
    Cmd out = c;
    switch (c.kind) {
      case CmdKind::If:
        out.body[0] = single(c.body[0]);
        break;
      case CmdKind::For:
        out.body[2] = single(c.body[2]);
        break;
      case CmdKind::Block:
        out.body = seq(c.body);
        break;
      default:
        break;
    }
    return out;
  }
};

}  // namespace

Program splice(const Program& m, const EchoReplacer& replace) {
  if (echo_count(m) == 0) throw ProgramError("splice: program has no echo command");
  return Program{Splicer{replace}.seq(m.cmds)};
}

Program splice(const Program& m, const Template& tpl) {
  return splice(m, [&](const Expr& e) { return fill(tpl, {{HoleId::M, e}}); });
}

namespace {

const Cmd& unwrap(const Cmd& c) {
  const Cmd* cur = &c;
  while (cur->kind == CmdKind::Block && cur->body.size() == 1) cur = &cur->body[0];
  return *cur;
}

bool is_bool_assign(const Cmd& c, bool value, Var* v) {
  if (c.kind != CmdKind::Assign || c.expr.kind != ExprKind::Bool || c.expr.value != value)
    return false;
  if (v) *v = c.target;
  return true;
}

std::optional<Expr> match_cr1(const Program& whole, const Cmd& a, const Cmd& b, const Cmd& c) {
  Var v;
  if (!is_bool_assign(unwrap(a), false, &v)) return std::nullopt;
  const Cmd& guard = unwrap(b);
  if (guard.kind != CmdKind::If) return std::nullopt;
  const Cmd& set = unwrap(guard.body[0]);
  Var w;
  if (!is_bool_assign(set, true, &w) || w != v) return std::nullopt;
  const Cmd& out = unwrap(c);
  if (out.kind != CmdKind::Echo || out.expr.kind != ExprKind::Var || out.expr.var != v)
    return std::nullopt;
  if (occurrences(whole, v) != 3) return std::nullopt;
  return guard.expr;
}

bool rewrite_seq(const Program& whole, std::vector<Cmd>& cmds);

bool rewrite_cmd(const Program& whole, Cmd& c) {
  switch (c.kind) {
    case CmdKind::Block:
      return rewrite_seq(whole, c.body);
    case CmdKind::If:
      return rewrite_cmd(whole, c.body[0]);
    case CmdKind::For:
      return rewrite_cmd(whole, c.body[2]);
    default:
      return false;
  }
}

bool rewrite_seq(const Program& whole, std::vector<Cmd>& cmds) {
  for (std::size_t i = 0; i + 2 < cmds.size(); ++i) {
    if (auto p = match_cr1(whole, cmds[i], cmds[i + 1], cmds[i + 2])) {
      cmds[i] = Cmd::echo(std::move(*p));
      cmds.erase(cmds.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                 cmds.begin() + static_cast<std::ptrdiff_t>(i) + 3);
      return true;
    }
  }
  for (auto& c : cmds)
    if (rewrite_cmd(whole, c)) return true;
  return false;
}

}  // namespace

Program simplify_cr1(const Program& p) {
  Program cur = p;
  while (true) {
    Program next = cur;
    if (!rewrite_seq(cur, next.cmds)) return cur;
    cur = std::move(next);
  }
}

}  // namespace phpsynth
