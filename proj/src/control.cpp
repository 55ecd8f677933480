#include "og/control.hpp"

namespace og {

namespace {

Expr with_owner(RoutineId r, const Expr& g) {
  auto own = ex::eq(ex::var(hwvar::AT, "AT"), ex::num(r));
  if (!g) return own;
  std::vector<Expr> parts{own};
  conjuncts(g, parts);
  return ex::and_(std::move(parts));
}

}  // namespace

Cmd control(RoutineId r, const Cmd& c) {
  if (c->kind == CmdKind::Skip) return c;
  auto n = std::make_shared<Command>(*c);
  switch (c->kind) {
    case CmdKind::Basic:
    case CmdKind::Await:
      n->kind = CmdKind::Await;
      n->guard = with_owner(r, c->guard);
      break;
    case CmdKind::If:
    case CmdKind::While:
      n->guard = with_owner(r, c->guard);
      break;
    default: break;
  }
  for (auto& ch : n->children) ch = control(r, ch);
  return n;
}

}  // namespace og
