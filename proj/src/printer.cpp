#include <sstream>

#include "og/echronos.hpp"
#include "og/frontend.hpp"

namespace og {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + '"';
}

std::string expr_text(const Expr& e) { return render(e, RenderMode::Source); }

std::string assigns_text(const std::vector<MAssign>& as) {
  std::string out;
  for (std::size_t i = 0; i < as.size(); ++i) {
    if (i) out += ", ";
    out += as[i].name + " := " + expr_text(as[i].rhs);
  }
  return out;
}

std::string assign_block(const std::vector<MAssign>& as) {
  return as.empty() ? "{ }" : "{ " + assigns_text(as) + "; }";
}

void print_stmts(std::ostream& os, const std::vector<MStmt>& ss, int depth);

void print_stmt(std::ostream& os, const MStmt& s, int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  os << pad;
  if (s.assertion) os << "assert (" << expr_text(s.assertion) << ") ";
  if (!s.label.empty()) os << s.label << ": ";
  switch (s.kind) {
    case MStmt::Kind::Skip: os << "skip;\n"; break;
    case MStmt::Kind::Assign: os << assigns_text(s.branches.at(0)) << ";\n"; break;
    case MStmt::Kind::Await:
      os << "await (" << expr_text(s.cond) << ") " << assign_block(s.branches.at(0)) << '\n';
      break;
    case MStmt::Kind::Choose:
      os << "choose";
      for (std::size_t i = 0; i < s.branches.size(); ++i) os << (i ? " or " : " ") << assign_block(s.branches[i]);
      os << '\n';
      break;
    case MStmt::Kind::If:
      os << "if (" << expr_text(s.cond) << ") {\n";
      print_stmts(os, s.body, depth + 1);
      os << pad << '}';
      if (s.has_else) {
        os << " else {\n";
        print_stmts(os, s.else_body, depth + 1);
        os << pad << '}';
      }
      os << '\n';
      break;
    case MStmt::Kind::While:
      os << "while (" << expr_text(s.cond) << ") {\n";
      print_stmts(os, s.body, depth + 1);
      os << pad << "}\n";
      break;
    case MStmt::Kind::Controlled:
      os << "controlled {\n";
      print_stmts(os, s.body, depth + 1);
      os << pad << "}\n";
      break;
    case MStmt::Kind::Macro:
      os << s.macro;
      if (s.macro_arg) os << '(' << expr_text(s.macro_arg) << ')';
      os << ";\n";
      break;
  }
}

void print_stmts(std::ostream& os, const std::vector<MStmt>& ss, int depth) {
  for (const auto& s : ss) print_stmt(os, s, depth);
}

bool same_opt(const Expr& a, const Expr& b) {
  if (!a || !b) return !a && !b;
  return same(a, b);
}

bool same_assigns(const std::vector<MAssign>& a, const std::vector<MAssign>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || !same(a[i].rhs, b[i].rhs)) return false;
  return true;
}

bool same_stmts(const std::vector<MStmt>& a, const std::vector<MStmt>& b);

bool same_stmt(const MStmt& a, const MStmt& b) {
  if (a.kind != b.kind || a.label != b.label || a.macro != b.macro || a.has_else != b.has_else) return false;
  if (!same_opt(a.assertion, b.assertion) || !same_opt(a.cond, b.cond) || !same_opt(a.macro_arg, b.macro_arg))
    return false;
  if (a.branches.size() != b.branches.size()) return false;
  for (std::size_t i = 0; i < a.branches.size(); ++i)
    if (!same_assigns(a.branches[i], b.branches[i])) return false;
  return same_stmts(a.body, b.body) && same_stmts(a.else_body, b.else_body);
}

bool same_stmts(const std::vector<MStmt>& a, const std::vector<MStmt>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_stmt(a[i], b[i])) return false;
  return true;
}

struct SameItem {
  const MItem& other;

  bool operator()(const MVar& a) const {
    const auto* b = std::get_if<MVar>(&other);
    return b && a.name == b->name && a.type == b->type && same(a.init, b->init);
  }
  bool operator()(const MInit& a) const {
    const auto* b = std::get_if<MInit>(&other);
    return b && a.name == b->name && same(a.value, b->value);
  }
  bool operator()(const MTask& a) const {
    const auto* b = std::get_if<MTask>(&other);
    return b && a.controlled == b->controlled && a.name == b->name && same(a.routine, b->routine) &&
           same_stmts(a.body, b->body);
  }
  bool operator()(const MInvariant& a) const {
    const auto* b = std::get_if<MInvariant>(&other);
    return b && a.name == b->name && same(a.pred, b->pred);
  }
};

}  // namespace

std::string print_model(const ModelFile& m) {
  std::ostringstream os;
  os << "system " << quote(m.name) << "\n\nconfig {\n";
  for (const auto& e : m.config) {
    os << "  " << e.key;
    if (e.index) os << '[' << *e.index << ']';
    os << " = " << (e.quoted ? quote(e.value) : e.value) << ";\n";
  }
  os << "}\n";
  bool prev_simple = false;
  for (const auto& item : m.items) {
    if (const auto* v = std::get_if<MVar>(&item)) {
      if (!prev_simple) os << '\n';
      os << "var " << v->name << " : " << v->type.str() << " = " << expr_text(v->init) << ";\n";
      prev_simple = true;
    } else if (const auto* in = std::get_if<MInit>(&item)) {
      if (!prev_simple) os << '\n';
      os << "init " << in->name << " = " << expr_text(in->value) << ";\n";
      prev_simple = true;
    } else if (const auto* t = std::get_if<MTask>(&item)) {
      os << '\n' << (t->controlled ? "controlled " : "") << "task " << t->name << " as "
         << expr_text(t->routine) << " {\n";
      print_stmts(os, t->body, 1);
      os << "}\n";
      prev_simple = false;
    } else {
      const auto& inv = std::get<MInvariant>(item);
      if (!prev_simple) os << '\n';
      os << "invariant " << inv.name << " : " << expr_text(inv.pred) << ";\n";
      prev_simple = true;
    }
  }
  return os.str();
}

bool same_model(const ModelFile& a, const ModelFile& b) {
  if (a.name != b.name || a.config != b.config || a.items.size() != b.items.size()) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i)
    if (!std::visit(SameItem{b.items[i]}, a.items[i])) return false;
  return true;
}

ModelFile preset_model(const SystemConfig& in) {
  SystemConfig cfg = in;
  cfg.fill_defaults();
  auto sys = echronos::build_system(cfg);
  ModelFile m;
  m.name = "echronos";
  auto add = [&](std::string key, std::string value, std::optional<std::uint32_t> index = std::nullopt) {
    MConfigEntry e;
    e.key = std::move(key);
    e.index = index;
    e.value = std::move(value);
    m.config.push_back(std::move(e));
  };
  add("preset", "echronos");
  add("users", std::to_string(cfg.nb_users));
  add("interrupts", std::to_string(cfg.nb_ints));
  add("events", std::to_string(cfg.nb_events));
  add("variant", to_string(cfg.variant));
  add("events_mode", cfg.events_mode == EventsMode::AddOne ? "add_one" : "any_superset");
  add("syscall_wait", to_string(cfg.syscall_wait));
  add("sched_order", cfg.sched_order == SchedOrder::Max ? "max" : "min");
  if (cfg.priority != default_priority(cfg))
    for (auto [r, p] : cfg.priority) add("priority", std::to_string(p), r);
  if (cfg.user_priority != default_user_priority(cfg))
    for (auto [r, p] : cfg.user_priority) add("user_priority", std::to_string(p), r);
  if (cfg.event_task != default_event_task(cfg))
    for (auto [e, r] : cfg.event_task) add("event_task", std::to_string(r), e);
  if (cfg.state_limit != SystemConfig{}.state_limit) add("max_states", std::to_string(cfg.state_limit));
  if (cfg.depth_limit) add("max_depth", std::to_string(cfg.depth_limit));
  for (const auto& inv : echronos::standard_invariants(sys)) {
    MInvariant mi;
    mi.name = inv.name;
    mi.pred = inv.pred;
    m.items.emplace_back(std::move(mi));
  }
  // Re-read so that the result carries positions and unresolved names.
  return parse_model_file(print_model(m));
}

}  // namespace og
