#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "og/expr.hpp"
#include "og/state.hpp"

namespace og {

struct Update {
  VarId target = kNoVar;
  std::string name;
  Expr rhs;
};

using UpdateList = std::vector<Update>;

enum class CmdKind : std::uint8_t { Skip, Basic, Await, Seq, If, While };

struct Command;
using Cmd = std::shared_ptr<const Command>;

/// Task body syntax. Basic and Await are atomic transition points, and so are
/// the condition tests of If and While.
struct Command {
  CmdKind kind = CmdKind::Skip;
  std::string label;
  // Enabling condition. Await: the await guard. If/While: the guard on the
  // condition-test transition (added by `control`). Null means always enabled.
  Expr guard;
  Expr cond;  // If/While
  // Basic/Await: alternative effects; more than one makes the step nondeterministic.
  std::vector<UpdateList> branches;
  // When `fault` holds in the pre-state the step is a model error of kind `fault_kind`.
  Expr fault;
  std::string fault_kind;
  Expr assertion;
  std::vector<Cmd> children;  // Seq: items; If: then, else; While: body
};

namespace cmd {
Cmd skip();
Cmd basic(std::string label, UpdateList updates);
Cmd choice(std::string label, std::vector<UpdateList> branches);
Cmd await(std::string label, Expr guard, UpdateList updates);
Cmd seq(std::vector<Cmd> items);
Cmd if_(std::string label, Expr cond, Cmd then_c, Cmd else_c);
Cmd while_(std::string label, Expr cond, Cmd body);
Cmd with_assertion(const Cmd& c, Expr assertion);
Cmd with_label(const Cmd& c, std::string label);
}  // namespace cmd

Update assign(VarId target, std::string name, Expr rhs);

/// Simultaneous assignment: every right-hand side reads `s`. When `vars` is
/// given each written value must conform to its declared type.
GlobalState apply_update(const UpdateList& u, const GlobalState& s, const EvalEnv& env,
                         const VarTable* vars = nullptr);

struct PointInfo {
  std::string label;
  CmdKind kind = CmdKind::Basic;
  Expr guard;
  Expr assertion;
  std::size_t branches = 1;
};

/// Every transition point of `c` in syntactic (pre-order) order.
std::vector<PointInfo> atomic_points(const Cmd& c);

/// Canonical, single-line rendering used for digests and diagnostics.
std::string render_command(const Cmd& c);

enum class PointKind : std::uint8_t { Action, Test };

inline constexpr std::uint16_t kEnd = 0xffff;

/// A task body flattened into a control-flow graph over its transition points.
struct Point {
  PointKind kind = PointKind::Action;
  std::string label;
  Expr guard;
  Expr cond;
  std::vector<UpdateList> branches;
  Expr fault;
  std::string fault_kind;
  Expr assertion;
  std::uint16_t next = kEnd;        // Action successor, or Test true-successor
  std::uint16_t next_false = kEnd;  // Test false-successor
};

struct TaskGraph {
  std::vector<Point> points;
  std::uint16_t entry = kEnd;

  std::uint16_t find(const std::string& label) const;  // kEnd when absent
};

/// Throws ConfigError on duplicate labels or more than 65534 points.
TaskGraph compile(const Cmd& c);

}  // namespace og
