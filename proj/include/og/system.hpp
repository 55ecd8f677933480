#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "og/command.hpp"
#include "og/expr.hpp"
#include "og/state.hpp"

namespace og {

enum class HwVariant : std::uint8_t { Arm, Generic };
enum class EventsMode : std::uint8_t { AddOne, AnySuperset };
enum class SyscallWait : std::uint8_t { WaitUntilClear, AsWritten };

const char* to_string(HwVariant v);
const char* to_string(EventsMode m);
const char* to_string(SyscallWait w);

struct SystemConfig {
  std::uint32_t nb_users = 1;
  std::uint32_t nb_ints = 0;
  std::uint32_t nb_events = 0;
  HwVariant variant = HwVariant::Arm;
  // Interrupt priority of SVC and interrupt routines. Empty means defaults.
  std::map<RoutineId, std::uint32_t> priority;
  // Scheduling priority of user routines. Empty means defaults.
  std::map<RoutineId, std::uint32_t> user_priority;
  // Event -> user routine it wakes. Empty means defaults.
  std::map<std::uint32_t, RoutineId> event_task;
  EventsMode events_mode = EventsMode::AddOne;
  SyscallWait syscall_wait = SyscallWait::WaitUntilClear;
  SchedOrder sched_order = SchedOrder::Max;
  std::uint64_t state_limit = 5'000'000;
  std::uint32_t depth_limit = 0;  // 0: unbounded

  std::uint32_t routine_count() const { return 2 + nb_users + nb_ints; }

  /// Fills every empty table with its default.
  void fill_defaults();
  /// Throws ConfigError when the configuration is unusable.
  void validate() const;

  bool operator==(const SystemConfig&) const = default;
};

/// Default tables: prio(SVC_s) = prio(SVC_a) = 0, the k-th interrupt gets 1+k;
/// user j (0-based) gets nbUsers - j; event e wakes user e mod nbUsers.
std::map<RoutineId, std::uint32_t> default_priority(const SystemConfig& cfg);
std::map<RoutineId, std::uint32_t> default_user_priority(const SystemConfig& cfg);
std::map<std::uint32_t, RoutineId> default_event_task(const SystemConfig& cfg);

struct Task {
  RoutineId owner = 0;
  std::string name;
  Cmd body;
  bool controlled = false;
};

struct NamedInvariant {
  std::string name;
  Expr pred;
};

struct System {
  std::string name;
  SystemConfig config;
  VarTable vars;
  Context ctx;
  std::vector<Task> tasks;
  GlobalState init;
  std::vector<TaskGraph> graphs;  // filled by finalize()

  /// Builds the evaluation context and compiles every task body.
  void finalize();

  std::optional<std::size_t> task_index(const std::string& name) const;

  /// Canonical text of everything that determines the semantics.
  std::string canonical() const;
  std::string config_digest() const;
};

/// Declares AT, ATStack, EIT, SVCaReq (and EITStack for the generic variant)
/// in their fixed slots, with the hardware reset values in `init`.
void declare_hw_vars(VarTable& vars, GlobalState& init, const SystemConfig& cfg);

}  // namespace og
