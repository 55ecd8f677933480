#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "og/system.hpp"

namespace og {

/// Global valuation plus the next transition point of every task.
struct FullState {
  GlobalState globals;
  std::vector<std::uint16_t> pcs;

  bool operator==(const FullState&) const = default;

  void encode(std::string& out) const;
  std::string encode() const;
  static FullState decode(std::string_view in, std::size_t nvars, std::size_t ntasks);
  std::string digest() const;
};

FullState initial_state(const System& sys);

struct Successor {
  std::uint32_t task = 0;
  std::uint16_t point = 0;
  std::uint32_t branch = 0;
  FullState state;
};

/// A transition that could not be executed because evaluation failed or its
/// fault condition held.
struct ModelFault {
  std::string kind;
  std::string message;
  std::uint32_t task = 0;
  std::uint16_t point = 0;
};

struct Expansion {
  std::vector<Successor> successors;
  std::vector<ModelFault> faults;
};

/// Enabled transitions of `s` ordered by task index, then branch index.
Expansion expand(const System& sys, const FullState& s);

/// Convenience: successors only (faults dropped).
std::vector<Successor> successors(const System& sys, const FullState& s);

std::string point_label(const System& sys, std::uint32_t task, std::uint16_t point);

struct TraceStep {
  std::uint32_t task = 0;
  std::string task_name;
  std::string label;
  std::string digest;  // post-state digest

  bool operator==(const TraceStep&) const = default;
};

struct Trace {
  std::string config_digest;
  std::string init_digest;
  std::vector<TraceStep> steps;

  bool operator==(const Trace&) const = default;
};

struct Limits {
  std::uint64_t max_states = 5'000'000;
  std::uint32_t max_depth = 0;  // 0: unbounded
  bool keep_graph = false;
  unsigned workers = 0;  // 0: OGCHECK_WORKERS or hardware concurrency (capped)
};

unsigned resolve_workers(unsigned requested);

struct Violation {
  std::string invariant;
  std::string message;  // non-empty when the invariant failed to evaluate
  Trace trace;
};

struct ModelErrorReport {
  std::string kind;
  std::string message;
  std::string task;
  std::string label;
  Trace trace;  // leads to the state where the faulty transition was attempted
};

struct StateGraph {
  std::vector<std::string> states;  // encodings in discovery order
  struct Edge {
    std::uint32_t from, to, task;
    std::string label;
  };
  std::vector<Edge> edges;
};

struct CheckReport {
  std::uint64_t reachable_count = 0;
  std::uint64_t transition_count = 0;
  std::uint32_t depth = 0;  // largest BFS depth reached
  std::vector<std::string> invariants;
  std::vector<Violation> violations;  // at most one per invariant, in invariant order
  std::vector<ModelErrorReport> model_errors;
  bool terminated = true;
  std::string limits_hit;  // "", "states" or "depth"
  std::optional<StateGraph> graph;
};

CheckReport explore(const System& sys, const std::vector<NamedInvariant>& invariants,
                    const Limits& limits = {});

struct ReplayResult {
  bool ok = false;
  std::size_t divergent_step = 0;  // valid when !ok
  std::string reason;
  std::optional<FullState> final_state;
};

ReplayResult replay(const System& sys, const Trace& t);

/// Seeded std::mt19937_64 walk; stops early when no transition is enabled.
Trace random_walk(const System& sys, std::uint64_t seed, std::size_t max_steps);

/// Throws std::logic_error("GraphNotRetained") without a retained graph.
std::string export_dot(const System& sys, const CheckReport& report, int verbosity = 0);

}  // namespace og
