#include "og/echronos.hpp"

#include "og/control.hpp"
#include "og/hw.hpp"

namespace og::echronos {

namespace {

struct Refs {
  Expr curUser, contexts, R, E, E_tmp, nextT;
};

Refs refs(const Vars& v) {
  return {ex::var(v.curUser, "curUser"), ex::var(v.contexts, "contexts"), ex::var(v.R, "R"),
          ex::var(v.E, "E"),             ex::var(v.E_tmp, "E_tmp"),       ex::var(v.nextT, "nextT")};
}

}  // namespace

Vars declare_os_vars(VarTable& vars, GlobalState& init, const SystemConfig& cfg) {
  auto rc = cfg.routine_count();
  auto routine = Type::nat(rc);
  auto stack = Type::stack(routine, rc);
  Vars v{};
  v.curUser = vars.declare("curUser", routine);
  v.contexts = vars.declare("contexts", Type::map(rc, Type::pair(Type::boolean(), stack)));
  v.R = vars.declare("R", Type::map(rc, Type::boolean()));
  v.E = vars.declare("E", Type::set(cfg.nb_events));
  v.E_tmp = vars.declare("E_tmp", Type::set(cfg.nb_events));
  v.nextT = vars.declare("nextT", Type::option(routine));

  std::vector<std::pair<std::uint32_t, Value>> ctxs, runnable;
  for (RoutineId n = user0; n < user0 + cfg.nb_users; ++n) {
    ctxs.emplace_back(n, Value::pair(Value::boolean(true), Value::nat_stack({n})));
    runnable.emplace_back(n, Value::boolean(true));
  }
  init.values.resize(vars.size());
  init[v.curUser] = Value::nat(user0);
  init[v.contexts] = Value::map(std::move(ctxs));
  init[v.R] = Value::map(std::move(runnable));
  init[v.E] = Value::set(0);
  init[v.E_tmp] = Value::set(0);
  init[v.nextT] = Value::none();
  return v;
}

Vars os_vars(const VarTable& vars) {
  return Vars{vars.at("curUser"), vars.at("contexts"), vars.at("R"),
              vars.at("E"),       vars.at("E_tmp"),    vars.at("nextT")};
}

Cmd schedule_body(const Vars& v) {
  auto r = refs(v);
  return cmd::seq({
      cmd::basic("sched_init", {assign(v.nextT, "nextT", ex::none())}),
      cmd::while_("sched_loop", ex::eq(r.nextT, ex::none()),
                  cmd::seq({
                      cmd::basic("sched_snapshot", {assign(v.E_tmp, "E_tmp", r.E)}),
                      cmd::basic("sched_handle", {assign(v.R, "R", ex::handle_events(r.E_tmp, r.R))}),
                      cmd::basic("sched_clear", {assign(v.E, "E", ex::diff(r.E, r.E_tmp))}),
                      cmd::basic("sched_pick", {assign(v.nextT, "nextT", ex::sched_policy(r.R))}),
                  })),
  });
}

Cmd context_switch_body(const Vars& v, bool preempt_enabled) {
  auto r = refs(v);
  auto saved = ex::the(ex::map_get(r.contexts, r.curUser));
  return cmd::seq({
      cmd::basic("cs_save",
                 {assign(v.contexts, "contexts",
                         ex::map_set(r.contexts, r.curUser,
                                     ex::some(ex::pair(ex::lit(Value::boolean(preempt_enabled)), hw::ATStack()))))}),
      cmd::basic("cs_cur", {assign(v.curUser, "curUser", ex::the(r.nextT))}),
      cmd::basic("cs_load", {assign(hwvar::ATStack, "ATStack", ex::snd(saved))}),
      cmd::if_("cs_test", ex::fst(saved), hw::svca_enable("cs_enable"), hw::svca_disable("cs_disable")),
  });
}

Cmd change_events(const Vars& v, const SystemConfig& cfg, std::string label) {
  auto E = ex::var(v.E, "E");
  std::vector<UpdateList> branches;
  if (cfg.events_mode == EventsMode::AddOne) {
    for (std::uint32_t e = 0; e < cfg.nb_events; ++e)
      branches.push_back({assign(v.E, "E", ex::union_(E, ex::set_lit({ex::num(e)})))});
  } else {
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << cfg.nb_events); ++s)
      branches.push_back(s == 0 ? UpdateList{} : UpdateList{assign(v.E, "E", ex::union_(E, ex::lit(Value::set(s))))});
  }
  if (branches.empty()) branches.emplace_back();
  return cmd::choice(std::move(label), std::move(branches));
}

Cmd user_task_body(RoutineId i, const Vars& v, const SystemConfig& cfg) {
  auto wait_cond = cfg.syscall_wait == SyscallWait::WaitUntilClear ? hw::SVCaReq() : ex::not_(hw::SVCaReq());
  auto body = cmd::while_(
      "loop", ex::tt(),
      cmd::seq({
          hw::svca_disable("svca_disable"),
          cmd::basic("block", {assign(v.R, "R", ex::map_set(ex::var(v.R, "R"), ex::num(i),
                                                             ex::some(ex::ff())))}),
          hw::svc_now(cfg.variant, "svc_now"),
          hw::svca_enable("svca_enable"),
          cmd::while_("wait", wait_cond, cmd::skip()),
      }));
  return control(i, body);
}

Cmd interrupt_task_body(RoutineId k, const Vars& v, const SystemConfig& cfg) {
  return cmd::while_("loop", ex::tt(),
                     cmd::seq({
                         hw::itake(k, cfg.variant, "itake"),
                         control(k, cmd::seq({change_events(v, cfg, "events"), hw::svca_request("request"),
                                              hw::iret(cfg.variant, "iret")})),
                     }));
}

Cmd svc_task_body(RoutineId svc, const Vars& v, const SystemConfig& cfg) {
  auto body = cmd::while_("loop", ex::tt(),
                          cmd::seq({schedule_body(v), context_switch_body(v, svc == SVC_a),
                                    hw::iret(cfg.variant, "iret")}));
  return control(svc, body);
}

Cmd svca_take_task_body(const SystemConfig& cfg) {
  return cmd::while_("loop", ex::tt(), hw::svca_take(cfg.variant, "take"));
}

std::string user_task_name(RoutineId j) { return "user" + std::to_string(j); }
std::string interrupt_task_name(RoutineId k) { return "int" + std::to_string(k); }

System build_system(SystemConfig cfg) {
  cfg.fill_defaults();
  cfg.validate();
  System sys;
  sys.name = "echronos";
  sys.config = cfg;
  declare_hw_vars(sys.vars, sys.init, cfg);
  auto v = declare_os_vars(sys.vars, sys.init, cfg);
  sys.tasks.push_back({SVC_a, "svca_take", svca_take_task_body(cfg), false});
  sys.tasks.push_back({SVC_a, "svc_a", svc_task_body(SVC_a, v, cfg), true});
  sys.tasks.push_back({SVC_s, "svc_s", svc_task_body(SVC_s, v, cfg), true});
  for (RoutineId k = user0 + cfg.nb_users; k < cfg.routine_count(); ++k)
    sys.tasks.push_back({k, interrupt_task_name(k), interrupt_task_body(k, v, cfg), false});
  for (RoutineId j = user0; j < user0 + cfg.nb_users; ++j)
    sys.tasks.push_back({j, user_task_name(j), user_task_body(j, v, cfg), true});
  sys.finalize();
  return sys;
}

std::vector<NamedInvariant> standard_invariants(const System& sys) {
  const auto& ctx = sys.ctx;
  auto AT = hw::AT();
  auto ATStack = hw::ATStack();
  auto users = ex::named("USERS", Value::set(ctx.users_mask()));
  auto ints = ex::named("INTERRUPTS", Value::set(ctx.interrupts_mask()));
  auto svcs = ex::named("SVCS", Value::set((std::uint64_t{1} << SVC_s) | (std::uint64_t{1} << SVC_a)));
  auto v = os_vars(sys.vars);

  std::vector<NamedInvariant> out;
  out.push_back({"StackShape",
                 ex::and_(ex::not_(ex::member(AT, ex::to_set(ATStack))),
                          ex::make(Op::NoDup, {ex::make(Op::Restrict, {ATStack, ex::union_(ints, svcs)})}))});
  out.push_back(
      {"UserAtBottom",
       ex::eq(ex::make(Op::Restrict, {ex::make(Op::ButLast, {ex::push(AT, ATStack)}), users}),
              ex::lit(Value::stack({})))});

  std::vector<Expr> served, quiescent;
  for (RoutineId j = user0; j < user0 + ctx.nb_users; ++j) {
    auto name = user_task_name(j);
    auto ti = sys.task_index(name);
    if (!ti) continue;
    const auto& g = sys.graphs[*ti];
    auto app = ex::or_(ex::at(static_cast<std::uint32_t>(*ti), g.find("loop"), name, "loop"),
                       ex::at(static_cast<std::uint32_t>(*ti), g.find("svca_disable"), name, "svca_disable"));
    auto is_j = ex::eq(AT, ex::num(j));
    served.push_back(ex::not_(ex::and_({is_j, hw::SVCaReq(), app})));
    quiescent.push_back(ex::implies(
        ex::and_({is_j, ex::not_(hw::SVCaReq()), ex::eq(ex::var(v.E, "E"), ex::lit(Value::set(0))),
                  ex::eq(ATStack, ex::lit(Value::stack({}))), app}),
        ex::eq(ex::highest_runnable(ex::var(v.R, "R")), ex::lit(Value::some(Value::nat(j))))));
  }
  out.push_back({"RequestServed", ex::and_(std::move(served))});
  out.push_back({"QuiescentPriority", ex::and_(std::move(quiescent))});
  return out;
}

}  // namespace og::echronos
