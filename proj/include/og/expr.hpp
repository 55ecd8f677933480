#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "og/errors.hpp"
#include "og/state.hpp"
#include "og/value.hpp"

namespace og {

/// Expression operators. Expressions are inspectable syntax trees so that
/// guards and assertions can be analysed (not only evaluated).
enum class Op : std::uint8_t {
  Lit,
  Var,
  At,  // at(task, label): the task's next atomic point is `label`
  // Boolean connectives
  Not,
  And,
  Or,
  Implies,
  // Comparisons (naturals, or structural equality for Eq/Ne)
  Eq,
  Ne,
  Lt,
  Le,
  // Sets
  SetLit,
  Union,
  Diff,
  Inter,
  Member,
  Card,
  // Stacks (head = most recent)
  StackLit,
  Push,
  Head,
  Tail,
  Len,
  Last,
  ButLast,
  ToSet,
  NoDup,
  Restrict,
  // Options, pairs, maps
  SomeOf,
  IsSome,
  The,
  MkPair,
  Fst,
  Snd,
  MapLit,  // args: k0, v0, k1, v1, ...
  MapGet,  // m[k] -> option
  MapSet,  // m[k := opt]
  Ite,
  // Built-ins parameterised by the system Context
  Policy,           // interrupt_policy(r) -> set
  SchedPolicy,      // sched_policy(R) -> option
  HighestRunnable,  // reference max-priority policy, independent of sched_order
  HandleEvents,     // handle_events(E, R) -> R'
  IsUser,
  IsInterrupt,
  IsSvc,
};

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  Op op = Op::Lit;
  std::vector<Expr> args;
  Value lit;
  VarId var = kNoVar;
  // Variable name, named-constant name (Lit), or task name (At).
  std::string name;
  std::string label;  // At
  std::uint32_t task = 0;
  std::uint32_t point = 0;
  bool resolved = false;  // Var/At bound to table indices
  SrcPos pos;
};

/// Evaluation environment. `pcs` is the control state (one program point per
/// task); it is only needed for `at(...)` predicates.
struct EvalEnv {
  const Context* ctx = nullptr;
  std::span<const std::uint16_t> pcs{};
  bool has_control = false;
};

Value eval(const Expr& e, const GlobalState& s, const EvalEnv& env);
bool eval_pred(const Expr& p, const GlobalState& s, const EvalEnv& env);

/// Builders.
namespace ex {
Expr lit(Value v);
Expr named(std::string name, Value v);
Expr tt();
Expr ff();
Expr num(std::uint32_t n);
Expr var(VarId id, std::string name);
Expr unresolved_var(std::string name, SrcPos pos = {});
Expr at(std::uint32_t task, std::uint32_t point, std::string task_name, std::string label);
Expr unresolved_at(std::string task_name, std::string label, SrcPos pos = {});
Expr make(Op op, std::vector<Expr> args, SrcPos pos = {});

Expr not_(Expr a);
Expr and_(std::vector<Expr> conj);
Expr and_(Expr a, Expr b);
Expr or_(Expr a, Expr b);
Expr implies(Expr a, Expr b);
Expr eq(Expr a, Expr b);
Expr ne(Expr a, Expr b);
Expr member(Expr x, Expr s);
Expr set_lit(std::vector<Expr> elems);
Expr union_(Expr a, Expr b);
Expr diff(Expr a, Expr b);
Expr push(Expr x, Expr s);
Expr head(Expr s);
Expr tail(Expr s);
Expr to_set(Expr s);
Expr some(Expr x);
Expr none();
Expr the(Expr o);
Expr pair(Expr a, Expr b);
Expr fst(Expr p);
Expr snd(Expr p);
Expr map_get(Expr m, Expr k);
Expr map_set(Expr m, Expr k, Expr v);
Expr ite(Expr c, Expr a, Expr b);
Expr policy(Expr r);
Expr sched_policy(Expr runnable);
Expr highest_runnable(Expr runnable);
Expr handle_events(Expr events, Expr runnable);
}  // namespace ex

enum class RenderMode {
  Source,     // named constants by name; re-parseable
  Canonical,  // named constants as plain literals
};

std::string render(const Expr& e, RenderMode mode = RenderMode::Source);

/// Structural equality (ignores source positions).
bool same(const Expr& a, const Expr& b);

/// Flattens nested conjunctions into `out`.
void conjuncts(const Expr& e, std::vector<Expr>& out);

/// Sorted, de-duplicated variables read by `e`.
std::vector<VarId> free_vars(const Expr& e);
bool mentions_control(const Expr& e);

/// Simultaneous substitution of variables by expressions.
Expr substitute(const Expr& e, const std::vector<std::pair<VarId, Expr>>& subst);

/// Constant folding plus boolean unit rules. Sound over all states: the result
/// evaluates identically wherever the input evaluates without error.
Expr simplify(const Expr& e, const Context& ctx);

struct TypeEnv {
  const VarTable* vars = nullptr;
  const Context* ctx = nullptr;
};

/// Infers the type of a resolved expression; throws ParseError(TypeError).
Type typecheck(const Expr& e, const TypeEnv& env);

}  // namespace og
