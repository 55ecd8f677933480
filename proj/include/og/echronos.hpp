#pragma once

#include <vector>

#include "og/command.hpp"
#include "og/system.hpp"

namespace og {

namespace echronos {

/// Variable slots after the hardware variables.
struct Vars {
  VarId curUser, contexts, R, E, E_tmp, nextT;
};

/// Declares the OS variables of the preset (hardware variables must exist).
Vars declare_os_vars(VarTable& vars, GlobalState& init, const SystemConfig& cfg);
Vars os_vars(const VarTable& vars);

Cmd schedule_body(const Vars& v);
Cmd context_switch_body(const Vars& v, bool preempt_enabled);
Cmd change_events(const Vars& v, const SystemConfig& cfg, std::string label = "events");
Cmd user_task_body(RoutineId i, const Vars& v, const SystemConfig& cfg);
Cmd interrupt_task_body(RoutineId k, const Vars& v, const SystemConfig& cfg);
Cmd svc_task_body(RoutineId svc, const Vars& v, const SystemConfig& cfg);
Cmd svca_take_task_body(const SystemConfig& cfg);

/// Task names: svca_take, svc_a, svc_s, int<k>, user<j> (routine ids).
std::string user_task_name(RoutineId j);
std::string interrupt_task_name(RoutineId k);

/// Validates cfg (ConfigError) and assembles the finalized preset system.
System build_system(SystemConfig cfg);

/// StackShape, UserAtBottom, RequestServed, QuiescentPriority for `sys`.
std::vector<NamedInvariant> standard_invariants(const System& sys);

}  // namespace echronos

}  // namespace og
