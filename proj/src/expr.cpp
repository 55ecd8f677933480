#include "og/expr.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace og {

namespace {

[[noreturn]] void bad(EvalErrorKind k, const std::string& msg) { throw EvalError(k, msg); }

const Context& need_ctx(const EvalEnv& env) {
  if (!env.ctx) bad(EvalErrorKind::TypeMismatch, "built-in requires a system context");
  return *env.ctx;
}

std::uint64_t bit_of(std::uint32_t n) {
  if (n >= 64) bad(EvalErrorKind::DomainViolation, "set element " + std::to_string(n) + " >= 64");
  return std::uint64_t{1} << n;
}

std::optional<RoutineId> pick_runnable(const Value& runnable, const Context& ctx,
                                       SchedOrder order) {
  std::optional<RoutineId> best;
  std::uint32_t best_prio = 0;
  for (auto [key, payload] : runnable.map_entries()) {
    if (!ctx.is_user(key) || !payload->as_bool()) continue;
    std::uint32_t prio = key < ctx.user_priority.size() ? ctx.user_priority[key] : 0;
    bool better = !best || (order == SchedOrder::Max ? prio > best_prio : prio < best_prio);
    if (better) {
      best = key;
      best_prio = prio;
    }
  }
  return best;
}

Value opt_nat(std::optional<RoutineId> r) { return r ? Value::some(Value::nat(*r)) : Value::none(); }

}  // namespace

// ---------------------------------------------------------------------------
// Evaluation

Value eval(const Expr& e, const GlobalState& s, const EvalEnv& env) {
  const auto& a = e->args;
  auto arg = [&](std::size_t i) { return eval(a[i], s, env); };
  switch (e->op) {
    case Op::Lit: return e->lit;
    case Op::Var:
      if (e->var == kNoVar || e->var >= s.values.size())
        bad(EvalErrorKind::TypeMismatch, "unresolved variable " + e->name);
      return s.values[e->var];
    case Op::At:
      if (!env.has_control || e->task >= env.pcs.size())
        bad(EvalErrorKind::ControlPredicate, "at(" + e->name + ", " + e->label +
                                                 ") needs a control state");
      return Value::boolean(env.pcs[e->task] == e->point);
    case Op::Not: return Value::boolean(!arg(0).as_bool());
    case Op::And:
      for (const auto& c : a)
        if (!eval(c, s, env).as_bool()) return Value::boolean(false);
      return Value::boolean(true);
    case Op::Or:
      for (const auto& c : a)
        if (eval(c, s, env).as_bool()) return Value::boolean(true);
      return Value::boolean(false);
    case Op::Implies:
      if (!arg(0).as_bool()) return Value::boolean(true);
      return Value::boolean(arg(1).as_bool());
    case Op::Eq: return Value::boolean(arg(0) == arg(1));
    case Op::Ne: return Value::boolean(arg(0) != arg(1));
    case Op::Lt: return Value::boolean(arg(0).as_nat() < arg(1).as_nat());
    case Op::Le: return Value::boolean(arg(0).as_nat() <= arg(1).as_nat());
    case Op::SetLit: {
      std::uint64_t bits = 0;
      for (const auto& c : a) bits |= bit_of(eval(c, s, env).as_nat());
      return Value::set(bits);
    }
    case Op::Union: return Value::set(arg(0).as_set() | arg(1).as_set());
    case Op::Diff: return Value::set(arg(0).as_set() & ~arg(1).as_set());
    case Op::Inter: return Value::set(arg(0).as_set() & arg(1).as_set());
    case Op::Member: {
      auto n = arg(0).as_nat();
      return Value::boolean(n < 64 && ((arg(1).as_set() >> n) & 1));
    }
    case Op::Card: return Value::nat(static_cast<std::uint32_t>(std::popcount(arg(0).as_set())));
    case Op::StackLit: {
      std::vector<Value> items;
      items.reserve(a.size());
      for (const auto& c : a) items.push_back(eval(c, s, env));
      return Value::stack(std::move(items));
    }
    case Op::Push: {
      auto x = arg(0);
      auto st = arg(1);
      std::vector<Value> items;
      items.reserve(st.as_stack().size() + 1);
      items.push_back(std::move(x));
      for (const auto& it : st.as_stack()) items.push_back(it);
      return Value::stack(std::move(items));
    }
    case Op::Head: {
      auto st = arg(0);
      if (st.as_stack().empty()) bad(EvalErrorKind::EmptyStackAccess, "hd of empty stack");
      return st.as_stack().front();
    }
    case Op::Tail: {
      auto st = arg(0);
      if (st.as_stack().empty()) bad(EvalErrorKind::EmptyStackAccess, "tl of empty stack");
      return Value::stack({st.as_stack().begin() + 1, st.as_stack().end()});
    }
    case Op::Len: return Value::nat(static_cast<std::uint32_t>(arg(0).as_stack().size()));
    case Op::Last: {
      auto st = arg(0);
      if (st.as_stack().empty()) bad(EvalErrorKind::EmptyStackAccess, "last of empty stack");
      return st.as_stack().back();
    }
    case Op::ButLast: {
      auto st = arg(0);
      if (st.as_stack().empty()) bad(EvalErrorKind::EmptyStackAccess, "butlast of empty stack");
      return Value::stack({st.as_stack().begin(), st.as_stack().end() - 1});
    }
    case Op::ToSet: {
      auto st = arg(0);
      std::uint64_t bits = 0;
      for (const auto& it : st.as_stack()) bits |= bit_of(it.as_nat());
      return Value::set(bits);
    }
    case Op::NoDup: {
      auto st = arg(0);
      const auto& items = st.as_stack();
      for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t j = i + 1; j < items.size(); ++j)
          if (items[i] == items[j]) return Value::boolean(false);
      return Value::boolean(true);
    }
    case Op::Restrict: {
      auto st = arg(0);
      auto keep = arg(1).as_set();
      std::vector<Value> items;
      for (const auto& it : st.as_stack()) {
        auto n = it.as_nat();
        if (n < 64 && ((keep >> n) & 1)) items.push_back(it);
      }
      return Value::stack(std::move(items));
    }
    case Op::SomeOf: return Value::some(arg(0));
    case Op::IsSome: return Value::boolean(arg(0).is_some());
    case Op::The: return arg(0).the();
    case Op::MkPair: return Value::pair(arg(0), arg(1));
    case Op::Fst: return arg(0).first();
    case Op::Snd: return arg(0).second();
    case Op::MapLit: {
      std::vector<std::pair<std::uint32_t, Value>> entries;
      for (std::size_t i = 0; i + 1 < a.size(); i += 2)
        entries.emplace_back(eval(a[i], s, env).as_nat(), eval(a[i + 1], s, env));
      return Value::map(std::move(entries));
    }
    case Op::MapGet: return arg(0).map_get(arg(1).as_nat());
    case Op::MapSet: {
      auto m = arg(0);
      auto k = arg(1).as_nat();
      return m.map_set(k, arg(2));
    }
    case Op::Ite: return arg(0).as_bool() ? arg(1) : arg(2);
    case Op::Policy: {
      const auto& ctx = need_ctx(env);
      auto r = arg(0).as_nat();
      if (r >= ctx.allowed.size())
        bad(EvalErrorKind::DomainViolation, "interrupt_policy of unknown routine " + std::to_string(r));
      return Value::set(ctx.allowed[r]);
    }
    case Op::SchedPolicy: {
      const auto& ctx = need_ctx(env);
      return opt_nat(pick_runnable(arg(0), ctx, ctx.sched_order));
    }
    case Op::HighestRunnable: return opt_nat(pick_runnable(arg(0), need_ctx(env), SchedOrder::Max));
    case Op::HandleEvents: {
      const auto& ctx = need_ctx(env);
      auto events = arg(0).as_set();
      auto runnable = arg(1);
      for (std::uint32_t ev = 0; ev < 64; ++ev) {
        if (!((events >> ev) & 1)) continue;
        if (ev >= ctx.event_task.size())
          bad(EvalErrorKind::DomainViolation, "event " + std::to_string(ev) + " has no task");
        runnable = runnable.map_set(ctx.event_task[ev], Value::some(Value::boolean(true)));
      }
      return runnable;
    }
    case Op::IsUser: return Value::boolean(need_ctx(env).is_user(arg(0).as_nat()));
    case Op::IsInterrupt: return Value::boolean(need_ctx(env).is_interrupt(arg(0).as_nat()));
    case Op::IsSvc: return Value::boolean(need_ctx(env).is_svc(arg(0).as_nat()));
  }
  bad(EvalErrorKind::TypeMismatch, "unknown operator");
}

bool eval_pred(const Expr& p, const GlobalState& s, const EvalEnv& env) {
  return eval(p, s, env).as_bool();
}

// ---------------------------------------------------------------------------
// Builders

namespace ex {

namespace {
bool plain_lit(const Expr& e) { return e->op == Op::Lit && e->name.empty(); }
bool all_plain(const std::vector<Expr>& v) {
  return std::all_of(v.begin(), v.end(), plain_lit);
}
}  // namespace

Expr lit(Value v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Lit;
  n->lit = std::move(v);
  return n;
}

Expr named(std::string name, Value v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Lit;
  n->lit = std::move(v);
  n->name = std::move(name);
  return n;
}

Expr tt() { return lit(Value::boolean(true)); }
Expr ff() { return lit(Value::boolean(false)); }
Expr num(std::uint32_t n) { return lit(Value::nat(n)); }

Expr var(VarId id, std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  n->var = id;
  n->name = std::move(name);
  n->resolved = true;
  return n;
}

Expr unresolved_var(std::string name, SrcPos pos) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  n->name = std::move(name);
  n->pos = pos;
  return n;
}

Expr at(std::uint32_t task, std::uint32_t point, std::string task_name, std::string label) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::At;
  n->task = task;
  n->point = point;
  n->name = std::move(task_name);
  n->label = std::move(label);
  n->resolved = true;
  return n;
}

Expr unresolved_at(std::string task_name, std::string label, SrcPos pos) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::At;
  n->name = std::move(task_name);
  n->label = std::move(label);
  n->pos = pos;
  return n;
}

Expr make(Op op, std::vector<Expr> args, SrcPos pos) {
  // Composite literals built only from plain literals are kept as a single
  // literal so that printing and re-parsing is structurally stable.
  bool foldable = (op == Op::SetLit || op == Op::StackLit || op == Op::MapLit ||
                   op == Op::SomeOf || op == Op::MkPair) &&
                  all_plain(args);
  if (foldable) {
    try {
      auto n = std::make_shared<ExprNode>();
      n->op = op;
      n->args = args;
      auto v = eval(n, GlobalState{}, EvalEnv{});
      auto l = std::make_shared<ExprNode>();
      l->op = Op::Lit;
      l->lit = std::move(v);
      l->pos = pos;
      return l;
    } catch (const EvalError&) {
    }
  }
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->args = std::move(args);
  n->pos = pos;
  return n;
}

Expr not_(Expr a) { return make(Op::Not, {std::move(a)}); }
Expr and_(std::vector<Expr> conj) {
  if (conj.empty()) return tt();
  if (conj.size() == 1) return conj.front();
  return make(Op::And, std::move(conj));
}
Expr and_(Expr a, Expr b) { return and_(std::vector<Expr>{std::move(a), std::move(b)}); }
Expr or_(Expr a, Expr b) { return make(Op::Or, {std::move(a), std::move(b)}); }
Expr implies(Expr a, Expr b) { return make(Op::Implies, {std::move(a), std::move(b)}); }
Expr eq(Expr a, Expr b) { return make(Op::Eq, {std::move(a), std::move(b)}); }
Expr ne(Expr a, Expr b) { return make(Op::Ne, {std::move(a), std::move(b)}); }
Expr member(Expr x, Expr s) { return make(Op::Member, {std::move(x), std::move(s)}); }
Expr set_lit(std::vector<Expr> elems) { return make(Op::SetLit, std::move(elems)); }
Expr union_(Expr a, Expr b) { return make(Op::Union, {std::move(a), std::move(b)}); }
Expr diff(Expr a, Expr b) { return make(Op::Diff, {std::move(a), std::move(b)}); }
Expr push(Expr x, Expr s) { return make(Op::Push, {std::move(x), std::move(s)}); }
Expr head(Expr s) { return make(Op::Head, {std::move(s)}); }
Expr tail(Expr s) { return make(Op::Tail, {std::move(s)}); }
Expr to_set(Expr s) { return make(Op::ToSet, {std::move(s)}); }
Expr some(Expr x) { return make(Op::SomeOf, {std::move(x)}); }
Expr none() { return lit(Value::none()); }
Expr the(Expr o) { return make(Op::The, {std::move(o)}); }
Expr pair(Expr a, Expr b) { return make(Op::MkPair, {std::move(a), std::move(b)}); }
Expr fst(Expr p) { return make(Op::Fst, {std::move(p)}); }
Expr snd(Expr p) { return make(Op::Snd, {std::move(p)}); }
Expr map_get(Expr m, Expr k) { return make(Op::MapGet, {std::move(m), std::move(k)}); }
Expr map_set(Expr m, Expr k, Expr v) {
  return make(Op::MapSet, {std::move(m), std::move(k), std::move(v)});
}
Expr ite(Expr c, Expr a, Expr b) { return make(Op::Ite, {std::move(c), std::move(a), std::move(b)}); }
Expr policy(Expr r) { return make(Op::Policy, {std::move(r)}); }
Expr sched_policy(Expr runnable) { return make(Op::SchedPolicy, {std::move(runnable)}); }
Expr highest_runnable(Expr runnable) { return make(Op::HighestRunnable, {std::move(runnable)}); }
Expr handle_events(Expr events, Expr runnable) {
  return make(Op::HandleEvents, {std::move(events), std::move(runnable)});
}

}  // namespace ex

// ---------------------------------------------------------------------------
// Rendering

namespace {

const char* call_name(Op op) {
  switch (op) {
    case Op::Card: return "card";
    case Op::Inter: return "inter";
    case Op::Head: return "hd";
    case Op::Tail: return "tl";
    case Op::Len: return "len";
    case Op::Last: return "last";
    case Op::ButLast: return "butlast";
    case Op::ToSet: return "set";
    case Op::NoDup: return "nodup";
    case Op::Restrict: return "restrict";
    case Op::SomeOf: return "some";
    case Op::IsSome: return "is_some";
    case Op::The: return "the";
    case Op::MkPair: return "pair";
    case Op::Fst: return "fst";
    case Op::Snd: return "snd";
    case Op::Ite: return "ite";
    case Op::Policy: return "interrupt_policy";
    case Op::SchedPolicy: return "sched_policy";
    case Op::HighestRunnable: return "highest_runnable";
    case Op::HandleEvents: return "handle_events";
    case Op::IsUser: return "is_user";
    case Op::IsInterrupt: return "is_interrupt";
    case Op::IsSvc: return "is_svc";
    default: return nullptr;
  }
}

int prec(Op op) {
  switch (op) {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Not: return 4;
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Member: return 5;
    case Op::Union:
    case Op::Diff: return 6;
    case Op::Push: return 7;
    case Op::MapGet:
    case Op::MapSet: return 8;
    default: return 9;
  }
}

void render_to(std::ostream& os, const Expr& e, RenderMode mode, int min_prec);

void child(std::ostream& os, const Expr& e, RenderMode mode, int min_prec) {
  render_to(os, e, mode, min_prec);
}

void render_to(std::ostream& os, const Expr& e, RenderMode mode, int min_prec) {
  int p = prec(e->op);
  bool paren = p < min_prec;
  if (paren) os << '(';
  const auto& a = e->args;
  switch (e->op) {
    case Op::Lit:
      if (mode == RenderMode::Source && !e->name.empty())
        os << e->name;
      else
        os << e->lit.str();
      break;
    case Op::Var: os << e->name; break;
    case Op::At: os << "at(" << e->name << ", " << e->label << ')'; break;
    case Op::Not:
      os << '!';
      child(os, a[0], mode, 4);
      break;
    case Op::And:
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) os << " && ";
        child(os, a[i], mode, 4);
      }
      break;
    case Op::Or:
      child(os, a[0], mode, 2);
      os << " || ";
      child(os, a[1], mode, 3);
      break;
    case Op::Implies:
      child(os, a[0], mode, 2);
      os << " -> ";
      child(os, a[1], mode, 1);
      break;
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Member: {
      const char* sym = e->op == Op::Eq   ? " = "
                        : e->op == Op::Ne ? " != "
                        : e->op == Op::Lt ? " < "
                        : e->op == Op::Le ? " <= "
                                          : " in ";
      child(os, a[0], mode, 6);
      os << sym;
      child(os, a[1], mode, 6);
      break;
    }
    case Op::Union:
    case Op::Diff:
      child(os, a[0], mode, 6);
      os << (e->op == Op::Union ? " + " : " - ");
      child(os, a[1], mode, 7);
      break;
    case Op::Push:
      child(os, a[0], mode, 8);
      os << " # ";
      child(os, a[1], mode, 7);
      break;
    case Op::MapGet:
      child(os, a[0], mode, 8);
      os << '[';
      child(os, a[1], mode, 0);
      os << ']';
      break;
    case Op::MapSet:
      child(os, a[0], mode, 8);
      os << '[';
      child(os, a[1], mode, 0);
      os << " := ";
      child(os, a[2], mode, 0);
      os << ']';
      break;
    case Op::SetLit:
    case Op::StackLit: {
      os << (e->op == Op::SetLit ? '{' : '[');
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) os << ", ";
        child(os, a[i], mode, 0);
      }
      os << (e->op == Op::SetLit ? '}' : ']');
      break;
    }
    case Op::MapLit:
      os << "map{";
      for (std::size_t i = 0; i + 1 < a.size(); i += 2) {
        if (i) os << ", ";
        child(os, a[i], mode, 0);
        os << ": ";
        child(os, a[i + 1], mode, 0);
      }
      os << '}';
      break;
    default: {
      const char* name = call_name(e->op);
      os << (name ? name : "?") << '(';
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) os << ", ";
        child(os, a[i], mode, 0);
      }
      os << ')';
      break;
    }
  }
  if (paren) os << ')';
}

}  // namespace

std::string render(const Expr& e, RenderMode mode) {
  std::ostringstream os;
  render_to(os, e, mode, 0);
  return os.str();
}

// ---------------------------------------------------------------------------
// Structural utilities

bool same(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (a->op != b->op || a->args.size() != b->args.size()) return false;
  switch (a->op) {
    case Op::Lit:
      if (a->lit != b->lit || a->name != b->name) return false;
      break;
    case Op::Var:
      if (a->name != b->name || a->var != b->var) return false;
      break;
    case Op::At:
      if (a->name != b->name || a->label != b->label) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!same(a->args[i], b->args[i])) return false;
  return true;
}

void conjuncts(const Expr& e, std::vector<Expr>& out) {
  if (e->op == Op::And) {
    for (const auto& c : e->args) conjuncts(c, out);
  } else {
    out.push_back(e);
  }
}

namespace {
void collect_vars(const Expr& e, std::vector<VarId>& out) {
  if (e->op == Op::Var) out.push_back(e->var);
  for (const auto& c : e->args) collect_vars(c, out);
}
}  // namespace

std::vector<VarId> free_vars(const Expr& e) {
  std::vector<VarId> out;
  collect_vars(e, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool mentions_control(const Expr& e) {
  if (e->op == Op::At) return true;
  return std::any_of(e->args.begin(), e->args.end(), mentions_control);
}

Expr substitute(const Expr& e, const std::vector<std::pair<VarId, Expr>>& subst) {
  if (e->op == Op::Var) {
    for (const auto& [v, repl] : subst)
      if (v == e->var) return repl;
    return e;
  }
  if (e->args.empty()) return e;
  bool changed = false;
  std::vector<Expr> args;
  args.reserve(e->args.size());
  for (const auto& c : e->args) {
    args.push_back(substitute(c, subst));
    changed |= args.back() != c;
  }
  if (!changed) return e;
  auto n = std::make_shared<ExprNode>(*e);
  n->args = std::move(args);
  return n;
}

Expr simplify(const Expr& e, const Context& ctx) {
  if (e->args.empty()) return e;
  std::vector<Expr> args;
  args.reserve(e->args.size());
  for (const auto& c : e->args) args.push_back(simplify(c, ctx));

  auto is_bool = [](const Expr& x, bool v) {
    return x->op == Op::Lit && x->lit.kind() == ValueKind::Bool && x->lit.as_bool() == v;
  };

  switch (e->op) {
    case Op::And: {
      std::vector<Expr> kept;
      for (auto& c : args) {
        if (is_bool(c, false)) return ex::ff();
        if (!is_bool(c, true)) kept.push_back(std::move(c));
      }
      return ex::and_(std::move(kept));
    }
    case Op::Or:
      if (is_bool(args[0], true) || is_bool(args[1], true)) return ex::tt();
      if (is_bool(args[0], false)) return args[1];
      if (is_bool(args[1], false)) return args[0];
      break;
    case Op::Implies:
      if (is_bool(args[0], false) || is_bool(args[1], true)) return ex::tt();
      if (is_bool(args[0], true)) return args[1];
      if (is_bool(args[1], false)) return simplify(ex::not_(args[0]), ctx);
      break;
    case Op::Ite:
      if (is_bool(args[0], true)) return args[1];
      if (is_bool(args[0], false)) return args[2];
      break;
    default: break;
  }

  bool all_lit = std::all_of(args.begin(), args.end(),
                             [](const Expr& c) { return c->op == Op::Lit; });
  auto n = std::make_shared<ExprNode>(*e);
  n->args = std::move(args);
  if (all_lit && e->op != Op::At) {
    try {
      EvalEnv env{&ctx};
      return ex::lit(eval(n, GlobalState{}, env));
    } catch (const EvalError&) {
    }
  }
  return n;
}

// ---------------------------------------------------------------------------
// Type checking

namespace {

Type type_of_value(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Bool: return Type::boolean();
    case ValueKind::Nat: return Type::nat(v.as_nat() + 1);
    case ValueKind::Set: return Type::set(64);
    case ValueKind::Stack: {
      Type t{TypeKind::Stack, 0, 0, {}};
      if (!v.as_stack().empty()) t.args.push_back(type_of_value(v.as_stack().front()));
      return t;
    }
    case ValueKind::None: return Type{TypeKind::Option, 0, 0, {}};
    case ValueKind::Some: return Type::option(type_of_value(v.the()));
    case ValueKind::Pair: return Type::pair(type_of_value(v.first()), type_of_value(v.second()));
    case ValueKind::Map: {
      Type t{TypeKind::Map, 64, 0, {}};
      auto entries = v.map_entries();
      if (!entries.empty()) t.args.push_back(type_of_value(*entries.front().second));
      return t;
    }
  }
  return Type::boolean();
}

[[noreturn]] void type_error(const Expr& e, const std::string& msg) {
  throw ParseError(ParseErrorKind::TypeError, e->pos, msg);
}

Type expect(const Expr& e, const TypeEnv& env, TypeKind kind, const char* what) {
  auto t = typecheck(e, env);
  if (t.kind != kind) type_error(e, std::string("expected ") + what + ", found " + t.str());
  return t;
}

Type merge(const Type& a, const Type& b) { return a.args.empty() ? b : a; }

}  // namespace

Type typecheck(const Expr& e, const TypeEnv& env) {
  const auto& a = e->args;
  auto boolean = Type::boolean();
  switch (e->op) {
    case Op::Lit: return type_of_value(e->lit);
    case Op::Var:
      if (!e->resolved || !env.vars || e->var >= env.vars->size())
        throw ParseError(ParseErrorKind::UnknownIdentifier, e->pos, "unknown identifier " + e->name);
      return (*env.vars)[e->var].type;
    case Op::At: return boolean;
    case Op::Not: expect(a[0], env, TypeKind::Bool, "bool"); return boolean;
    case Op::And:
    case Op::Or:
    case Op::Implies:
      for (const auto& c : a) expect(c, env, TypeKind::Bool, "bool");
      return boolean;
    case Op::Eq:
    case Op::Ne: {
      auto l = typecheck(a[0], env);
      auto r = typecheck(a[1], env);
      if (!compatible(l, r)) type_error(e, "cannot compare " + l.str() + " with " + r.str());
      return boolean;
    }
    case Op::Lt:
    case Op::Le:
      expect(a[0], env, TypeKind::Nat, "nat");
      expect(a[1], env, TypeKind::Nat, "nat");
      return boolean;
    case Op::SetLit:
      for (const auto& c : a) expect(c, env, TypeKind::Nat, "nat");
      return Type::set(64);
    case Op::Union:
    case Op::Diff:
    case Op::Inter: {
      auto l = expect(a[0], env, TypeKind::Set, "set");
      auto r = expect(a[1], env, TypeKind::Set, "set");
      return Type::set(std::max(l.bound, r.bound));
    }
    case Op::Member:
      expect(a[0], env, TypeKind::Nat, "nat");
      expect(a[1], env, TypeKind::Set, "set");
      return boolean;
    case Op::Card: expect(a[0], env, TypeKind::Set, "set"); return Type::nat(65);
    case Op::StackLit: {
      Type t{TypeKind::Stack, 0, 0, {}};
      for (const auto& c : a) {
        auto ct = typecheck(c, env);
        if (t.has_elem() && !compatible(t.elem(), ct))
          type_error(c, "stack elements of different types");
        if (!t.has_elem()) t.args.push_back(ct);
      }
      return t;
    }
    case Op::Push: {
      auto x = typecheck(a[0], env);
      auto s = expect(a[1], env, TypeKind::Stack, "stack");
      if (s.has_elem() && !compatible(s.elem(), x))
        type_error(e, "cannot push " + x.str() + " onto " + s.str());
      if (!s.has_elem()) s.args.push_back(x);
      return s;
    }
    case Op::Head:
    case Op::Last: {
      auto s = expect(a[0], env, TypeKind::Stack, "stack");
      return s.has_elem() ? s.elem() : Type::nat(64);
    }
    case Op::Tail:
    case Op::ButLast: return expect(a[0], env, TypeKind::Stack, "stack");
    case Op::Len: expect(a[0], env, TypeKind::Stack, "stack"); return Type::nat(65);
    case Op::ToSet: {
      auto s = expect(a[0], env, TypeKind::Stack, "stack");
      if (s.has_elem() && s.elem().kind != TypeKind::Nat) type_error(e, "set() needs a stack of nat");
      return Type::set(s.has_elem() ? s.elem().bound : 64);
    }
    case Op::NoDup: expect(a[0], env, TypeKind::Stack, "stack"); return boolean;
    case Op::Restrict: {
      auto s = expect(a[0], env, TypeKind::Stack, "stack");
      expect(a[1], env, TypeKind::Set, "set");
      return s;
    }
    case Op::SomeOf: return Type::option(typecheck(a[0], env));
    case Op::IsSome: expect(a[0], env, TypeKind::Option, "option"); return boolean;
    case Op::The: {
      auto o = expect(a[0], env, TypeKind::Option, "option");
      if (!o.has_elem()) type_error(e, "the() of none");
      return o.elem();
    }
    case Op::MkPair: return Type::pair(typecheck(a[0], env), typecheck(a[1], env));
    case Op::Fst:
    case Op::Snd: {
      auto p = expect(a[0], env, TypeKind::Pair, "pair");
      return p.args.at(e->op == Op::Fst ? 0 : 1);
    }
    case Op::MapLit: {
      Type t{TypeKind::Map, 64, 0, {}};
      for (std::size_t i = 0; i + 1 < a.size(); i += 2) {
        expect(a[i], env, TypeKind::Nat, "nat");
        auto vt = typecheck(a[i + 1], env);
        if (t.has_elem() && !compatible(t.elem(), vt)) type_error(a[i + 1], "map values of different types");
        if (!t.has_elem()) t.args.push_back(vt);
      }
      return t;
    }
    case Op::MapGet: {
      auto m = expect(a[0], env, TypeKind::Map, "map");
      expect(a[1], env, TypeKind::Nat, "nat");
      return m.has_elem() ? Type::option(m.elem()) : Type{TypeKind::Option, 0, 0, {}};
    }
    case Op::MapSet: {
      auto m = expect(a[0], env, TypeKind::Map, "map");
      expect(a[1], env, TypeKind::Nat, "nat");
      auto v = expect(a[2], env, TypeKind::Option, "option");
      if (m.has_elem() && v.has_elem() && !compatible(m.elem(), v.elem()))
        type_error(e, "map value type mismatch");
      return m;
    }
    case Op::Ite: {
      expect(a[0], env, TypeKind::Bool, "bool");
      auto l = typecheck(a[1], env);
      auto r = typecheck(a[2], env);
      if (!compatible(l, r)) type_error(e, "ite branches differ: " + l.str() + " vs " + r.str());
      return merge(l, r);
    }
    case Op::Policy: expect(a[0], env, TypeKind::Nat, "nat"); return Type::set(64);
    case Op::SchedPolicy:
    case Op::HighestRunnable: {
      auto m = expect(a[0], env, TypeKind::Map, "map");
      if (m.has_elem() && m.elem().kind != TypeKind::Bool) type_error(e, "expected map of bool");
      return Type::option(Type::nat(64));
    }
    case Op::HandleEvents: {
      expect(a[0], env, TypeKind::Set, "set");
      return expect(a[1], env, TypeKind::Map, "map");
    }
    case Op::IsUser:
    case Op::IsInterrupt:
    case Op::IsSvc: expect(a[0], env, TypeKind::Nat, "nat"); return boolean;
  }
  type_error(e, "unknown operator");
}

}  // namespace og
