#include "og/hw.hpp"

namespace og {

InterruptPolicy default_interrupt_policy(const SystemConfig& cfg) {
  auto rc = cfg.routine_count();
  auto is_user = [&](RoutineId r) { return r >= user0 && r < user0 + cfg.nb_users; };
  std::uint64_t candidates = 0;
  for (RoutineId r = 0; r < rc; ++r) {
    if (is_user(r)) continue;
    if (!cfg.priority.count(r))
      throw MissingPriority("no priority for routine " + std::to_string(r));
    candidates |= std::uint64_t{1} << r;
  }
  InterruptPolicy p;
  p.allowed.assign(rc, 0);
  for (RoutineId r = 0; r < rc; ++r) {
    if (is_user(r)) {
      p.allowed[r] = candidates;
      continue;
    }
    auto mine = cfg.priority.at(r);
    for (RoutineId y = 0; y < rc; ++y)
      if (((candidates >> y) & 1) && cfg.priority.at(y) > mine) p.allowed[r] |= std::uint64_t{1} << y;
  }
  return p;
}

Context make_context(const SystemConfig& cfg) {
  Context c;
  c.nb_users = cfg.nb_users;
  c.nb_ints = cfg.nb_ints;
  c.nb_events = cfg.nb_events;
  c.allowed = default_interrupt_policy(cfg).allowed;
  c.user_priority.assign(cfg.routine_count(), 0);
  for (auto [r, p] : cfg.user_priority)
    if (r < c.user_priority.size()) c.user_priority[r] = p;
  c.sched_order = cfg.sched_order;
  c.event_task.assign(cfg.nb_events, user0);
  for (auto [e, r] : cfg.event_task)
    if (e < c.event_task.size()) c.event_task[e] = r;
  return c;
}

namespace hw {

Expr AT() { return ex::var(hwvar::AT, "AT"); }
Expr ATStack() { return ex::var(hwvar::ATStack, "ATStack"); }
Expr EIT() { return ex::var(hwvar::EIT, "EIT"); }
Expr SVCaReq() { return ex::var(hwvar::SVCaReq, "SVCaReq"); }
Expr EITStack() { return ex::var(hwvar::EITStack, "EITStack"); }
Expr svc_s() { return ex::named("SVC_s", Value::nat(SVC_s)); }
Expr svc_a() { return ex::named("SVC_a", Value::nat(SVC_a)); }

Expr mask_expr(std::uint64_t mask) {
  std::vector<Expr> elems;
  for (std::uint32_t r = 0; r < 64; ++r) {
    if (!((mask >> r) & 1)) continue;
    if (r == SVC_s)
      elems.push_back(svc_s());
    else if (r == SVC_a)
      elems.push_back(svc_a());
    else
      elems.push_back(ex::num(r));
  }
  return ex::set_lit(std::move(elems));
}

Cmd int_disable(std::uint64_t mask, std::string label) {
  return cmd::basic(std::move(label), {assign(hwvar::EIT, "EIT", ex::diff(EIT(), mask_expr(mask)))});
}

Cmd int_enable(std::uint64_t mask, std::string label) {
  return cmd::basic(std::move(label), {assign(hwvar::EIT, "EIT", ex::union_(EIT(), mask_expr(mask)))});
}

Cmd svca_disable(std::string label) { return int_disable(std::uint64_t{1} << SVC_a, std::move(label)); }
Cmd svca_enable(std::string label) { return int_enable(std::uint64_t{1} << SVC_a, std::move(label)); }

namespace {

Expr may_enter(Expr r) {
  return ex::and_({ex::member(r, EIT()), ex::ne(AT(), r), ex::not_(ex::member(r, ex::to_set(ATStack()))),
                   ex::member(r, ex::policy(AT()))});
}

UpdateList enter(Expr r, HwVariant v) {
  UpdateList u{assign(hwvar::ATStack, "ATStack", ex::push(AT(), ATStack()))};
  if (v == HwVariant::Generic) u.push_back(assign(hwvar::EITStack, "EITStack", ex::push(EIT(), EITStack())));
  u.push_back(assign(hwvar::AT, "AT", std::move(r)));
  return u;
}

}  // namespace

Expr itake_guard(RoutineId i) { return may_enter(ex::num(i)); }

Expr svca_take_guard() {
  std::vector<Expr> c{SVCaReq()};
  conjuncts(may_enter(svc_a()), c);
  return ex::and_(std::move(c));
}

Cmd itake(RoutineId i, HwVariant v, std::string label) {
  return cmd::await(std::move(label), itake_guard(i), enter(ex::num(i), v));
}

Cmd svca_take(HwVariant v, std::string label) {
  auto u = enter(svc_a(), v);
  u.insert(u.begin(), assign(hwvar::SVCaReq, "SVCaReq", ex::ff()));
  return cmd::await(std::move(label), svca_take_guard(), std::move(u));
}

Cmd iret(HwVariant v, std::string label) {
  auto hd_stack = ex::head(ATStack());
  Expr enabled = v == HwVariant::Arm
                     ? ex::diff(EIT(), ex::to_set(ATStack()))
                     : ex::diff(ex::diff(ex::head(EITStack()), ex::set_lit({AT()})), ex::to_set(ATStack()));
  auto chain = ex::and_({SVCaReq(), ex::member(svc_a(), enabled), ex::member(svc_a(), ex::policy(hd_stack))});
  UpdateList u{
      assign(hwvar::AT, "AT", ex::ite(chain, svc_a(), hd_stack)),
      assign(hwvar::ATStack, "ATStack", ex::ite(chain, ATStack(), ex::tail(ATStack()))),
  };
  if (v == HwVariant::Generic) {
    u.push_back(assign(hwvar::EIT, "EIT", ex::head(EITStack())));
    u.push_back(assign(hwvar::EITStack, "EITStack", ex::ite(chain, EITStack(), ex::tail(EITStack()))));
  }
  u.push_back(assign(hwvar::SVCaReq, "SVCaReq", ex::ite(chain, ex::ff(), SVCaReq())));
  return cmd::basic(std::move(label), std::move(u));
}

Cmd svc_now(HwVariant v, std::string label) {
  auto c = std::make_shared<Command>(*cmd::basic(std::move(label), enter(svc_s(), v)));
  c->fault = ex::or_(ex::member(svc_s(), ex::to_set(ATStack())), ex::eq(AT(), svc_s()));
  c->fault_kind = "SvcReentry";
  return c;
}

Cmd svca_request(std::string label) {
  return cmd::basic(std::move(label), {assign(hwvar::SVCaReq, "SVCaReq", ex::tt())});
}

}  // namespace hw

}  // namespace og
