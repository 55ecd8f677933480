#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "og/value.hpp"

namespace og {

using VarId = std::uint32_t;
inline constexpr VarId kNoVar = 0xffffffffu;

/// Hardware pseudo-variables occupy fixed slots in every variable table.
namespace hwvar {
inline constexpr VarId AT = 0;
inline constexpr VarId ATStack = 1;
inline constexpr VarId EIT = 2;
inline constexpr VarId SVCaReq = 3;
}  // namespace hwvar

/// Routine numbering: SVC_s = 0, SVC_a = 1, users [2, 2+nbUsers), then interrupts.
using RoutineId = std::uint32_t;
inline constexpr RoutineId SVC_s = 0;
inline constexpr RoutineId SVC_a = 1;
inline constexpr RoutineId user0 = 2;

struct VarDecl {
  std::string name;
  Type type;
};

class VarTable {
 public:
  VarId declare(std::string name, Type type);
  std::optional<VarId> find(std::string_view name) const;
  VarId at(std::string_view name) const;  // throws if absent

  const VarDecl& operator[](VarId id) const { return decls_.at(id); }
  std::size_t size() const { return decls_.size(); }
  const std::vector<VarDecl>& decls() const { return decls_; }

  bool operator==(const VarTable&) const;

 private:
  std::vector<VarDecl> decls_;
};

bool operator==(const VarDecl& a, const VarDecl& b);

/// A valuation of every declared variable, indexed by VarId.
struct GlobalState {
  std::vector<Value> values;

  const Value& operator[](VarId id) const { return values.at(id); }
  Value& operator[](VarId id) { return values.at(id); }

  bool operator==(const GlobalState& o) const { return values == o.values; }
  bool operator!=(const GlobalState& o) const { return values != o.values; }
  std::size_t hash() const;

  void encode(std::string& out) const;
  static GlobalState decode(std::string_view in, std::size_t& pos, std::size_t nvars);

  /// `name=value` pairs separated by single spaces, in declaration order.
  std::string render(const VarTable& vars) const;
};

struct GlobalStateHash {
  std::size_t operator()(const GlobalState& s) const { return s.hash(); }
};

enum class SchedOrder : std::uint8_t { Max, Min };

/// Parameters consulted by the built-in expression operators (interrupt
/// policy, scheduling policy, event handling, routine classification).
struct Context {
  std::uint32_t nb_users = 1;
  std::uint32_t nb_ints = 0;
  std::uint32_t nb_events = 0;
  // allowed[r]: bitmask of routines permitted to interrupt routine r.
  std::vector<std::uint64_t> allowed;
  // Per-routine priority used by sched_policy; only user entries matter.
  std::vector<std::uint32_t> user_priority;
  SchedOrder sched_order = SchedOrder::Max;
  // event_task[e]: user routine woken by event e.
  std::vector<RoutineId> event_task;

  std::uint32_t routine_count() const { return 2 + nb_users + nb_ints; }
  bool is_user(RoutineId r) const { return r >= user0 && r < user0 + nb_users; }
  bool is_interrupt(RoutineId r) const {
    return r >= user0 + nb_users && r < routine_count();
  }
  bool is_svc(RoutineId r) const { return r == SVC_s || r == SVC_a; }

  std::uint64_t users_mask() const;
  std::uint64_t interrupts_mask() const;

  bool operator==(const Context&) const = default;
};

}  // namespace og
