#include <charconv>
#include <set>

#include "og/control.hpp"
#include "og/echronos.hpp"
#include "og/frontend.hpp"
#include "og/hw.hpp"

namespace og {

namespace {

[[noreturn]] void fail(ParseErrorKind k, SrcPos pos, const std::string& msg) { throw ParseError(k, pos, msg); }

std::uint64_t parse_number(const MConfigEntry& e) {
  std::uint64_t v = 0;
  const auto* first = e.value.data();
  const auto* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (e.quoted || ec != std::errc{} || ptr != last)
    fail(ParseErrorKind::ConfigInvalid, e.value_pos, e.key + " expects a number, got '" + e.value + "'");
  return v;
}

std::string word(const MConfigEntry& e) {
  std::string v = e.value;
  for (auto& c : v)
    if (c == '-') c = '_';
  return v;
}

struct ConfigResult {
  SystemConfig cfg;
  bool preset = false;
};

ConfigResult read_config(const ModelFile& m) {
  ConfigResult out;
  auto& cfg = out.cfg;
  std::set<std::pair<std::string, std::int64_t>> seen;
  auto bad_value = [](const MConfigEntry& e, const std::string& allowed) {
    fail(ParseErrorKind::ConfigInvalid, e.value_pos,
         "invalid value '" + e.value + "' for " + e.key + " (expected " + allowed + ")");
  };
  for (const auto& e : m.config) {
    std::int64_t idx = e.index ? static_cast<std::int64_t>(*e.index) : -1;
    if (!seen.insert({e.key, idx}).second)
      fail(ParseErrorKind::ConfigInvalid, e.pos, "duplicate config key " + e.key);
    bool indexed = e.key == "priority" || e.key == "user_priority" || e.key == "event_task";
    if (indexed != e.index.has_value())
      fail(ParseErrorKind::ConfigInvalid, e.pos,
           indexed ? e.key + " needs an index" : e.key + " does not take an index");
    auto small = [&](const MConfigEntry& en) {
      auto v = parse_number(en);
      if (v > 0xffffffffULL) fail(ParseErrorKind::ConfigInvalid, en.value_pos, "value too large");
      return static_cast<std::uint32_t>(v);
    };
    if (e.key == "preset") {
      if (e.value != "echronos") bad_value(e, "echronos");
      out.preset = true;
    } else if (e.key == "users") {
      cfg.nb_users = small(e);
    } else if (e.key == "interrupts") {
      cfg.nb_ints = small(e);
    } else if (e.key == "events") {
      cfg.nb_events = small(e);
    } else if (e.key == "variant") {
      if (word(e) == "arm")
        cfg.variant = HwVariant::Arm;
      else if (word(e) == "generic")
        cfg.variant = HwVariant::Generic;
      else
        bad_value(e, "arm or generic");
    } else if (e.key == "events_mode") {
      if (word(e) == "add_one")
        cfg.events_mode = EventsMode::AddOne;
      else if (word(e) == "any_superset")
        cfg.events_mode = EventsMode::AnySuperset;
      else
        bad_value(e, "add_one or any_superset");
    } else if (e.key == "syscall_wait") {
      if (word(e) == "clear")
        cfg.syscall_wait = SyscallWait::WaitUntilClear;
      else if (word(e) == "literal")
        cfg.syscall_wait = SyscallWait::AsWritten;
      else
        bad_value(e, "clear or literal");
    } else if (e.key == "sched_order") {
      if (word(e) == "max")
        cfg.sched_order = SchedOrder::Max;
      else if (word(e) == "min")
        cfg.sched_order = SchedOrder::Min;
      else
        bad_value(e, "max or min");
    } else if (e.key == "priority") {
      cfg.priority[*e.index] = small(e);
    } else if (e.key == "user_priority") {
      cfg.user_priority[*e.index] = small(e);
    } else if (e.key == "event_task") {
      cfg.event_task[*e.index] = small(e);
    } else if (e.key == "max_states") {
      cfg.state_limit = parse_number(e);
    } else if (e.key == "max_depth") {
      cfg.depth_limit = small(e);
    } else {
      fail(ParseErrorKind::ConfigInvalid, e.pos, "unknown config key " + e.key);
    }
  }
  cfg.fill_defaults();
  try {
    cfg.validate();
    make_context(cfg);
  } catch (const ConfigError& err) {
    fail(ParseErrorKind::ConfigInvalid, m.config_pos, err.what());
  }
  return out;
}

Expr with_pos(const Expr& e, SrcPos pos) {
  auto n = std::make_shared<ExprNode>(*e);
  n->pos = pos;
  return n;
}

class Elaborator {
 public:
  Elaborator(const ModelFile& m, System& sys) : m_(m), sys_(sys) {}

  // Resolves names. `vars` false restricts to named constants; `at` allows
  // control predicates (resolved against compiled task graphs).
  Expr resolve(const Expr& e, bool vars, bool at) const {
    switch (e->op) {
      case Op::Lit: return e;
      case Op::Var: {
        if (e->resolved) return e;
        if (vars)
          if (auto id = sys_.vars.find(e->name)) return with_pos(ex::var(*id, e->name), e->pos);
        if (auto c = constant(e->name)) return with_pos(c, e->pos);
        if (!vars && sys_.vars.find(e->name))
          fail(ParseErrorKind::TypeError, e->pos, e->name + " is not a constant");
        fail(ParseErrorKind::UnknownIdentifier, e->pos, "unknown identifier " + e->name);
      }
      case Op::At: {
        if (!at) fail(ParseErrorKind::TypeError, e->pos, "at() is only allowed in invariants");
        auto ti = sys_.task_index(e->name);
        if (!ti) fail(ParseErrorKind::UnknownIdentifier, e->pos, "unknown task " + e->name);
        auto p = sys_.graphs.at(*ti).find(e->label);
        if (p == kEnd) fail(ParseErrorKind::UnknownIdentifier, e->pos, "unknown label " + e->label + " in task " + e->name);
        return with_pos(ex::at(static_cast<std::uint32_t>(*ti), p, e->name, e->label), e->pos);
      }
      default: {
        std::vector<Expr> args;
        args.reserve(e->args.size());
        for (const auto& a : e->args) args.push_back(resolve(a, vars, at));
        return ex::make(e->op, std::move(args), e->pos);
      }
    }
  }

  Type type_of(const Expr& e) const { return typecheck(e, TypeEnv{&sys_.vars, &sys_.ctx}); }

  Expr predicate(const Expr& raw, bool at = false) const {
    auto e = resolve(raw, true, at);
    auto t = type_of(e);
    if (t.kind != TypeKind::Bool) fail(ParseErrorKind::TypeError, e->pos, "expected bool, found " + t.str());
    return e;
  }

  Value constant_value(const Expr& raw) const {
    auto e = resolve(raw, false, false);
    type_of(e);
    try {
      return eval(e, GlobalState{}, EvalEnv{&sys_.ctx});
    } catch (const EvalError& err) {
      fail(ParseErrorKind::TypeError, raw->pos, err.what());
    }
  }

  Value typed_constant(const Expr& raw, const Type& t) const {
    auto v = constant_value(raw);
    if (!v.conforms(t)) fail(ParseErrorKind::TypeError, raw->pos, "value " + v.str() + " does not fit " + t.str());
    return v;
  }

  RoutineId routine(const Expr& raw) const {
    auto v = constant_value(raw);
    if (v.kind() != ValueKind::Nat || v.as_nat() >= sys_.config.routine_count())
      fail(ParseErrorKind::ConfigInvalid, raw->pos, "not a routine of this configuration: " + v.str());
    return v.as_nat();
  }

  void run() {
    for (const auto& item : m_.items) {
      if (const auto* v = std::get_if<MVar>(&item)) {
        if (sys_.vars.find(v->name) || constant(v->name))
          fail(ParseErrorKind::ConfigInvalid, v->pos, "duplicate variable " + v->name);
        auto init = typed_constant(v->init, v->type);
        sys_.vars.declare(v->name, v->type);
        sys_.init.values.push_back(std::move(init));
      }
    }
    for (const auto& item : m_.items) {
      if (const auto* in = std::get_if<MInit>(&item)) {
        auto id = sys_.vars.find(in->name);
        if (!id) fail(ParseErrorKind::UnknownIdentifier, in->pos, "unknown variable " + in->name);
        sys_.init[*id] = typed_constant(in->value, sys_.vars[*id].type);
      }
    }
    std::set<std::string> names;
    for (const auto& item : m_.items) {
      const auto* t = std::get_if<MTask>(&item);
      if (!t) continue;
      if (!names.insert(t->name).second) fail(ParseErrorKind::ConfigInvalid, t->pos, "duplicate task " + t->name);
      auto owner = routine(t->routine);
      owner_ = owner;
      in_control_ = t->controlled;
      auto body = stmts(t->body);
      if (t->controlled) body = control(owner, body);
      try {
        compile(body);
      } catch (const ConfigError& err) {
        fail(ParseErrorKind::ConfigInvalid, t->pos, err.what());
      }
      sys_.tasks.push_back({owner, t->name, body, t->controlled});
    }
    sys_.finalize();
  }

  std::vector<NamedInvariant> invariants() const {
    std::vector<NamedInvariant> out;
    std::set<std::string> names;
    for (const auto& item : m_.items) {
      const auto* inv = std::get_if<MInvariant>(&item);
      if (!inv) continue;
      if (!names.insert(inv->name).second)
        fail(ParseErrorKind::ConfigInvalid, inv->pos, "duplicate invariant " + inv->name);
      out.push_back({inv->name, predicate(inv->pred, true)});
    }
    return out;
  }

 private:
  const ModelFile& m_;
  System& sys_;
  RoutineId owner_ = 0;
  mutable bool in_control_ = false;

  Expr constant(const std::string& name) const {
    const auto& ctx = sys_.ctx;
    if (name == "SVC_s") return hw::svc_s();
    if (name == "SVC_a") return hw::svc_a();
    if (name == "USERS") return ex::named("USERS", Value::set(ctx.users_mask()));
    if (name == "INTERRUPTS") return ex::named("INTERRUPTS", Value::set(ctx.interrupts_mask()));
    if (name == "SVCS") return ex::named("SVCS", Value::set((std::uint64_t{1} << SVC_s) | (std::uint64_t{1} << SVC_a)));
    return nullptr;
  }

  UpdateList updates(const std::vector<MAssign>& as) const {
    UpdateList out;
    std::set<std::string> targets;
    for (const auto& a : as) {
      auto id = sys_.vars.find(a.name);
      if (!id) fail(ParseErrorKind::UnknownIdentifier, a.pos, "unknown variable " + a.name);
      if (!targets.insert(a.name).second)
        fail(ParseErrorKind::TypeError, a.pos, "variable " + a.name + " assigned twice in one step");
      auto rhs = resolve(a.rhs, true, false);
      auto t = type_of(rhs);
      const auto& decl = sys_.vars[*id].type;
      if (!compatible(t, decl))
        fail(ParseErrorKind::TypeError, a.rhs->pos, "cannot assign " + t.str() + " to " + a.name + " : " + decl.str());
      out.push_back(assign(*id, a.name, rhs));
    }
    return out;
  }

  std::uint64_t mask(const Expr& raw) const {
    auto v = constant_value(raw);
    if (v.kind() != ValueKind::Set) fail(ParseErrorKind::TypeError, raw->pos, "expected a set of routines");
    return v.as_set();
  }

  Cmd macro(const MStmt& s) const {
    const auto variant = sys_.config.variant;
    const auto& n = s.macro;
    if (n == "SVC_now") return hw::svc_now(variant, s.label);
    if (n == "SVCaRequest") return hw::svca_request(s.label);
    if (n == "SVCaEnable") return hw::svca_enable(s.label);
    if (n == "SVCaDisable") return hw::svca_disable(s.label);
    if (n == "IRet") return hw::iret(variant, s.label);
    if (n == "SVCaTake") return hw::svca_take(variant, s.label);
    if (n == "ITake") return hw::itake(routine(s.macro_arg), variant, s.label);
    if (n == "IntEnable") return hw::int_enable(mask(s.macro_arg), s.label);
    if (n == "IntDisable") return hw::int_disable(mask(s.macro_arg), s.label);
    // ChangeEvents
    auto e = sys_.vars.find("E");
    if (!e || sys_.vars[*e].type.kind != TypeKind::Set)
      fail(ParseErrorKind::UnknownIdentifier, s.pos, "ChangeEvents needs a set variable E");
    echronos::Vars v{};
    v.E = *e;
    return echronos::change_events(v, sys_.config, s.label);
  }

  Cmd stmt(const MStmt& s) const {
    Cmd c;
    switch (s.kind) {
      case MStmt::Kind::Skip:
        c = s.label.empty() && !s.assertion ? cmd::skip() : cmd::basic(s.label, {});
        break;
      case MStmt::Kind::Assign: c = cmd::basic(s.label, updates(s.branches.at(0))); break;
      case MStmt::Kind::Await: c = cmd::await(s.label, predicate(s.cond), updates(s.branches.at(0))); break;
      case MStmt::Kind::Choose: {
        std::vector<UpdateList> bs;
        for (const auto& b : s.branches) bs.push_back(updates(b));
        c = cmd::choice(s.label, std::move(bs));
        break;
      }
      case MStmt::Kind::If:
        c = cmd::if_(s.label, predicate(s.cond), stmts(s.body), stmts(s.else_body));
        break;
      case MStmt::Kind::While: c = cmd::while_(s.label, predicate(s.cond), stmts(s.body)); break;
      case MStmt::Kind::Macro: c = macro(s); break;
      case MStmt::Kind::Controlled: {
        if (in_control_) fail(ParseErrorKind::ConfigInvalid, s.pos, "nested control block");
        in_control_ = true;
        c = control(owner_, stmts(s.body));
        in_control_ = false;
        break;
      }
    }
    if (s.assertion) c = cmd::with_assertion(c, predicate(s.assertion));
    return c;
  }

  Cmd stmts(const std::vector<MStmt>& ss) const {
    if (ss.empty()) return cmd::skip();
    if (ss.size() == 1) return stmt(ss[0]);
    std::vector<Cmd> items;
    for (const auto& s : ss) items.push_back(stmt(s));
    return cmd::seq(std::move(items));
  }
};

}  // namespace

LoadedModel elaborate(const ModelFile& m) {
  auto [cfg, preset] = read_config(m);
  LoadedModel out;
  if (preset) {
    for (const auto& item : m.items)
      if (!std::holds_alternative<MInvariant>(item)) {
        SrcPos pos = std::visit([](const auto& it) { return it.pos; }, item);
        fail(ParseErrorKind::ConfigInvalid, pos, "a preset model only takes invariants");
      }
    out.system = echronos::build_system(cfg);
    out.system.name = m.name;
    Elaborator el(m, out.system);
    out.invariants = el.invariants();
    if (out.invariants.empty()) out.invariants = echronos::standard_invariants(out.system);
    return out;
  }
  auto& sys = out.system;
  sys.name = m.name;
  sys.config = cfg;
  sys.ctx = make_context(cfg);
  declare_hw_vars(sys.vars, sys.init, cfg);
  Elaborator el(m, sys);
  el.run();
  out.invariants = el.invariants();
  return out;
}

LoadedModel parse_model(const std::string& text) { return elaborate(parse_model_file(text)); }

}  // namespace og
