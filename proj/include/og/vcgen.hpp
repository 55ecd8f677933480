#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "og/system.hpp"

namespace og {

enum class VcKind : std::uint8_t { Sequential, Interference };
enum class VcStatus : std::uint8_t { Pending, Trivial, Discharged, Failed, Unknown };

const char* to_string(VcKind k);
const char* to_string(VcStatus s);

struct VC {
  VcKind kind = VcKind::Interference;
  // Assertion origin (owning task and point).
  std::string owner_task;
  std::string owner_label;
  // Acting transition; for sequential VCs the owning task itself.
  std::string actor_task;
  std::string actor_label;
  std::uint32_t branch = 0;

  Expr antecedent;     // canonical conjunction over the pre-state
  Expr consequent;     // predicate required of the post-state
  UpdateList effect;   // simultaneous assignment producing the post-state
  Expr consequent_wp;  // canonical consequent rewritten over the pre-state

  VcStatus status = VcStatus::Pending;
  std::string note;
  std::optional<std::size_t> duplicate_of;
  std::optional<GlobalState> witness;

  /// Canonical identity used for de-duplication (origins excluded).
  std::string key() const;
};

/// Sorted, de-duplicated conjunction after constant folding. Equalities put
/// the literal side last.
Expr canonicalize(const Expr& e, const Context& ctx);

/// Fills every missing assertion: AT = owner where the point's guard has that
/// conjunct, true otherwise. Explicit assertions are kept.
System annotate_guards(const System& sys);

/// Throws ConfigError("UnannotatedPoint ...") when an assertion is missing.
std::vector<VC> gen_interference_vcs(const System& sys);
std::vector<VC> gen_sequential_vcs(const System& sys, std::size_t task, const Expr& post = nullptr);
std::vector<VC> gen_sequential_vcs(const System& sys);

struct SimplifyStats {
  std::size_t at_contradictions = 0;
  std::size_t duplicates = 0;
  std::size_t retained = 0;
};

/// Marks AT-contradictions and duplicates TRIVIAL; returns counts.
SimplifyStats simplify_trivial(std::vector<VC>& vcs);

/// True when the antecedent has conjuncts AT = c1 and AT = c2 with c1 != c2.
bool has_at_contradiction(const Expr& antecedent);

inline constexpr std::uint64_t kDefaultDischargeBound = 4'000'000;

/// Enumerates the finite domains of the VC's free variables. Sets status,
/// note and (for FAILED) a witness over the full variable table.
/// Throws UnboundedDomain when a variable has no finite domain.
void discharge_finite(VC& vc, const System& sys, std::uint64_t bound = kDefaultDischargeBound);

struct VcStats {
  std::size_t total = 0;
  std::size_t trivial = 0;
  std::size_t discharged = 0;
  std::size_t failed = 0;
  std::size_t unknown = 0;
};

VcStats vc_stats(const std::vector<VC>& vcs, VcKind kind);

struct VcOptions {
  std::uint64_t bound = kDefaultDischargeBound;
  bool simplify = true;
  bool sequential = true;
  unsigned workers = 0;
};

struct VcResult {
  std::vector<VC> vcs;  // interference first, then sequential
  VcStats interference;
  VcStats sequential;
};

/// annotate -> generate -> simplify -> discharge. Duplicates inherit the
/// verdict of the VC they duplicate.
VcResult run_vc_pipeline(const System& sys, const VcOptions& opts = {});

/// Multiset of FAILED witnesses (rendered), sorted.
std::vector<std::string> failed_witnesses(const System& sys, const std::vector<VC>& vcs);

std::string vc_report(const System& sys, const VcResult& r);

}  // namespace og
