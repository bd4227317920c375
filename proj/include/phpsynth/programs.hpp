#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phpsynth {

/// Program variables. Inputs ($i, $j, $k, $i4, ...) are never assigned;
/// ordinary program variables are $a, $b, $c, $a4, ...; flags introduced by
/// QUIT are $A, $B, $C, $A4, ... and live in their own rank namespace.
enum class VarKind { Input, Prog, Flag };

struct Var {
  VarKind kind = VarKind::Prog;
  std::uint64_t rank = 1;
  friend auto operator<=>(const Var&, const Var&) = default;
};

std::string var_name(const Var& v);  // "$i", "$a4", "$B", ...

enum class ExprKind { Bool, Int, Var, Not, And, Or, Eq, Lt, Mul, Rem, Paren, Hole };

/// Hole markers inside rule templates: `[M]` and `[N]`.
enum class HoleId : std::uint8_t { M, N };

struct Expr {
  ExprKind kind = ExprKind::Int;
  std::uint64_t value = 0;  // Int value, Bool (0/1), Hole id
  Var var;                  // Var
  std::vector<Expr> ops;    // operands

  static Expr boolean(bool b);
  static Expr integer(std::uint64_t v);
  static Expr variable(Var v);
  static Expr input(std::uint64_t rank) { return variable({VarKind::Input, rank}); }
  static Expr prog(std::uint64_t rank) { return variable({VarKind::Prog, rank}); }
  static Expr flag(std::uint64_t rank) { return variable({VarKind::Flag, rank}); }
  static Expr unary(ExprKind k, Expr e);
  static Expr binary(ExprKind k, Expr l, Expr r);
  static Expr paren(Expr e) { return unary(ExprKind::Paren, std::move(e)); }
  static Expr hole(HoleId h);

  bool is_leaf() const {
    return kind == ExprKind::Bool || kind == ExprKind::Int || kind == ExprKind::Var;
  }

  friend bool operator==(const Expr&, const Expr&) = default;
};

enum class CmdKind { Echo, Assign, If, For, Inc, Block };

/// One command. Field use by kind:
///   Echo   expr
///   Assign target = expr
///   If     expr, body[0]
///   For    body[0] init (Assign), expr cond, body[1] step (Inc), body[2] stmt
///   Inc    target
///   Block  body
struct Cmd {
  CmdKind kind = CmdKind::Echo;
  Expr expr;
  Var target;
  std::vector<Cmd> body;

  static Cmd echo(Expr e);
  static Cmd assign(Var v, Expr e);
  static Cmd if_(Expr cond, Cmd then);
  static Cmd for_(Cmd init, Expr cond, Cmd step, Cmd stmt);
  static Cmd inc(Var v);
  static Cmd block(std::vector<Cmd> cmds);

  friend bool operator==(const Cmd&, const Cmd&) = default;
};

struct Program {
  std::vector<Cmd> cmds;
  friend bool operator==(const Program&, const Program&) = default;
};

class ProgramError : public std::runtime_error {
 public:
  ProgramError(std::string msg, std::size_t pos = 0)
      : std::runtime_error(std::move(msg)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

std::string render(const Expr& e);
std::string render(const Cmd& c);
std::string render(const Program& p);

/// Parses the target-language subset. Parenthesised subexpressions become
/// Paren nodes so that render(parse_program(t)) keeps the author's grouping.
Program parse_program(std::string_view text);
Expr parse_expr(std::string_view text);

/// Whitespace-free form with `;` dropped after `}` and at the very end, used
/// to compare program text against reference listings.
std::string normalize_text(std::string_view text);

struct RankBound {
  std::uint64_t prog = 0;
  std::uint64_t flag = 0;
};

/// Highest assigned rank per namespace (0 if none).
RankBound max_prog_rank(const Program& p);
std::map<Var, int> assigned_vars(const Program& p);
std::size_t echo_count(const Program& p);
/// Number of occurrences (reads and writes) of `v`.
std::size_t occurrences(const Program& p, const Var& v);
std::vector<std::uint64_t> program_inputs(const Program& p);

/// M:I=E1,J=E2,... applied simultaneously.
using ExprBinding = std::map<std::uint64_t, Expr>;
Program subst_inputs(const Program& p, const ExprBinding& b);
Expr subst_inputs(const Expr& e, const ExprBinding& b);

/// Shifts every program variable and flag rank (reads and writes).
Program shift_ranks(const Program& p, RankBound offset);

/// A command list that may contain `[M]` / `[N]` holes in expressions.
struct Template {
  std::vector<Cmd> cmds;
};
Template parse_template(std::string_view text);
std::vector<Cmd> fill(const Template& t, const std::map<HoleId, Expr>& holes);
Expr fill(const Expr& e, const std::map<HoleId, Expr>& holes);

/// Replaces every echo of `m` with the commands produced for its argument.
/// A replacement of several commands lands inline in a command sequence and
/// as a block in a single-command slot (if/for body).
using EchoReplacer = std::function<std::vector<Cmd>(const Expr& echoed)>;
Program splice(const Program& m, const EchoReplacer& replace);
/// s(M, tpl): each echo replaced by `tpl` with `[M]` bound to its argument.
Program splice(const Program& m, const Template& tpl);

/// Code Rule 1: `$v=FALSE ; if (P) $v=TRUE ; echo $v ;` becomes `echo P ;`
/// when $v is used nowhere else.
Program simplify_cr1(const Program& p);

}  // namespace phpsynth
