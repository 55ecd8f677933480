#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "og/command.hpp"
#include "og/system.hpp"

namespace og {

namespace hwvar {
inline constexpr VarId EITStack = 4;  // generic variant only
}

struct InterruptPolicy {
  // allowed[r]: bitmask of routines permitted to interrupt r.
  std::vector<std::uint64_t> allowed;

  bool allows(RoutineId r, RoutineId y) const { return (allowed.at(r) >> y) & 1; }
};

/// User routines may be interrupted by every interrupt, SVC_a and SVC_s; an
/// interrupt or SVC routine only by strictly higher-priority non-user routines.
/// Throws MissingPriority when cfg.priority does not cover I' and SVC_s.
InterruptPolicy default_interrupt_policy(const SystemConfig& cfg);

/// Evaluation context for a configuration (policy, priorities, event map).
Context make_context(const SystemConfig& cfg);

namespace hw {

Expr AT();
Expr ATStack();
Expr EIT();
Expr SVCaReq();
Expr EITStack();
Expr svc_s();
Expr svc_a();

Expr mask_expr(std::uint64_t mask);

Cmd int_disable(std::uint64_t mask, std::string label = "");
Cmd int_enable(std::uint64_t mask, std::string label = "");
Cmd svca_disable(std::string label = "");
Cmd svca_enable(std::string label = "");
Cmd itake(RoutineId i, HwVariant v, std::string label = "");
Cmd svca_take(HwVariant v, std::string label = "");
Cmd iret(HwVariant v, std::string label = "");
Cmd svc_now(HwVariant v, std::string label = "");
Cmd svca_request(std::string label = "");

Expr itake_guard(RoutineId i);
Expr svca_take_guard();

}  // namespace hw

}  // namespace og
