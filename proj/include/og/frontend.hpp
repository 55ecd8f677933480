#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "og/explorer.hpp"
#include "og/system.hpp"
#include "og/vcgen.hpp"

namespace og {

// ---------------------------------------------------------------------------
// Model file syntax tree. Expressions are kept unresolved (names only) so the
// file can be printed back exactly as structured.

struct MConfigEntry {
  std::string key;
  std::optional<std::uint32_t> index;
  std::string value;
  bool quoted = false;
  SrcPos pos;
  SrcPos value_pos;

  bool operator==(const MConfigEntry& o) const {
    return key == o.key && index == o.index && value == o.value && quoted == o.quoted;
  }
};

struct MAssign {
  std::string name;
  Expr rhs;
  SrcPos pos;
};

struct MStmt {
  enum class Kind : std::uint8_t { Skip, Assign, Await, Choose, If, While, Macro, Controlled };
  Kind kind = Kind::Skip;
  SrcPos pos;
  std::string label;
  Expr assertion;
  std::vector<std::vector<MAssign>> branches;  // Assign: 1, Await: 1, Choose: >= 2
  Expr cond;                                   // Await guard, If/While condition
  std::vector<MStmt> body;                     // If then-block, While/Controlled body
  std::vector<MStmt> else_body;
  bool has_else = false;
  std::string macro;  // SVC_now, SVCaRequest, ..., ITake, IntEnable, IntDisable
  Expr macro_arg;     // ITake routine, IntEnable/IntDisable set
};

struct MVar {
  std::string name;
  Type type;
  Expr init;
  SrcPos pos;
};

struct MInit {
  std::string name;
  Expr value;
  SrcPos pos;
};

struct MTask {
  bool controlled = false;
  std::string name;
  Expr routine;
  std::vector<MStmt> body;
  SrcPos pos;
};

struct MInvariant {
  std::string name;
  Expr pred;
  SrcPos pos;
};

using MItem = std::variant<MVar, MInit, MTask, MInvariant>;

struct ModelFile {
  std::string name;
  std::vector<MConfigEntry> config;
  SrcPos config_pos;
  std::vector<MItem> items;

  /// Sets (or appends) a scalar config entry.
  void set_config(const std::string& key, const std::string& value);
  const MConfigEntry* find_config(const std::string& key) const;
};

/// Throws ParseError(SyntaxError).
ModelFile parse_model_file(const std::string& text);

/// Parses a stand-alone expression (names left unresolved).
Expr parse_expr(const std::string& text);

/// Canonical text of a model file; parse(print(m)) prints identically.
std::string print_model(const ModelFile& m);

/// Structural equality of model files (ignores positions).
bool same_model(const ModelFile& a, const ModelFile& b);

struct LoadedModel {
  System system;
  std::vector<NamedInvariant> invariants;
};

/// Builds the System (preset or generic tasks). Throws ParseError.
LoadedModel elaborate(const ModelFile& m);

/// parse_model_file + elaborate.
LoadedModel parse_model(const std::string& text);

/// The preset as an editable model file: config plus standard invariants.
ModelFile preset_model(const SystemConfig& cfg);

// ---------------------------------------------------------------------------
// Traces and reports

/// verbosity >= 1 adds changed variables per step and needs `sys`;
/// verbosity 2 also adds the full state.
std::string serialize_trace(const Trace& t, int verbosity = 0, const System* sys = nullptr);

/// Throws ParseError(SyntaxError) on malformed input.
Trace parse_trace(const std::string& text);

std::string serialize_check_report(const System& sys, const CheckReport& r);

}  // namespace og
