#include <sstream>

#include "og/frontend.hpp"

namespace og {

namespace {

[[noreturn]] void bad_line(std::uint32_t line, const std::string& msg) {
  throw ParseError(ParseErrorKind::SyntaxError, SrcPos{line, 1}, msg);
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

std::string delta(const System& sys, const GlobalState& before, const GlobalState& after) {
  std::string out;
  for (VarId v = 0; v < sys.vars.size(); ++v) {
    if (before[v] == after[v]) continue;
    if (!out.empty()) out += ' ';
    out += sys.vars[v].name + "=" + after[v].str();
  }
  return out;
}

}  // namespace

std::string serialize_trace(const Trace& t, int verbosity, const System* sys) {
  std::ostringstream os;
  os << "# ogtrace v1\n";
  os << "config " << t.config_digest << '\n';
  os << "init " << t.init_digest << '\n';
  std::optional<FullState> cur;
  if (verbosity >= 1 && sys) cur = initial_state(*sys);
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    os << "step " << i << ' ' << s.task << ' ' << s.task_name << ' ' << s.label << ' ' << s.digest << '\n';
    if (!cur) continue;
    std::optional<FullState> next;
    for (auto& succ : successors(*sys, *cur)) {
      if (succ.task == s.task && point_label(*sys, succ.task, succ.point) == s.label &&
          succ.state.digest() == s.digest) {
        next = std::move(succ.state);
        break;
      }
    }
    if (!next) {
      cur.reset();
      continue;
    }
    auto d = delta(*sys, cur->globals, next->globals);
    os << "  delta" << (d.empty() ? "" : " ") << d << '\n';
    if (verbosity >= 2) {
      os << "  state " << next->globals.render(sys->vars);
      for (std::size_t k = 0; k < sys->tasks.size(); ++k)
        os << ' ' << sys->tasks[k].name << '@'
           << (next->pcs[k] == kEnd ? std::string("end") : sys->graphs[k].points[next->pcs[k]].label);
      os << '\n';
    }
    cur = std::move(next);
  }
  return os.str();
}

Trace parse_trace(const std::string& text) {
  Trace t;
  std::istringstream is(text);
  std::string line;
  std::uint32_t n = 0;
  bool header = false, have_config = false, have_init = false;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("  ")) continue;
    if (!header) {
      if (line != "# ogtrace v1") bad_line(n, "expected '# ogtrace v1' header");
      header = true;
      continue;
    }
    if (line[0] == '#') continue;
    auto w = split(line);
    if (w[0] == "config" && w.size() == 2) {
      t.config_digest = w[1];
      have_config = true;
    } else if (w[0] == "init" && w.size() == 2) {
      t.init_digest = w[1];
      have_init = true;
    } else if (w[0] == "step" && w.size() == 6) {
      if (w[1] != std::to_string(t.steps.size())) bad_line(n, "step index out of sequence");
      TraceStep s;
      try {
        std::size_t used = 0;
        auto task = std::stoul(w[2], &used);
        if (used != w[2].size() || task > 0xffffffffUL) throw std::invalid_argument("task");
        s.task = static_cast<std::uint32_t>(task);
      } catch (const std::exception&) {
        bad_line(n, "bad task index '" + w[2] + "'");
      }
      s.task_name = w[3];
      s.label = w[4];
      s.digest = w[5];
      t.steps.push_back(std::move(s));
    } else {
      bad_line(n, "unrecognised trace line");
    }
  }
  if (!header) bad_line(n ? n : 1, "empty trace");
  if (!have_config || !have_init) bad_line(n, "trace lacks config or init digest");
  return t;
}

std::string serialize_check_report(const System& sys, const CheckReport& r) {
  std::ostringstream os;
  os << "# ogcheck v1\n";
  os << "system " << sys.name << '\n';
  os << "config " << sys.config_digest() << '\n';
  os << "reachable " << r.reachable_count << '\n';
  os << "transitions " << r.transition_count << '\n';
  os << "depth " << r.depth << '\n';
  os << "terminated " << (r.terminated ? "yes" : "no") << '\n';
  os << "limits_hit " << (r.limits_hit.empty() ? "none" : r.limits_hit) << '\n';
  for (const auto& name : r.invariants) {
    const Violation* v = nullptr;
    for (const auto& x : r.violations)
      if (x.invariant == name) v = &x;
    os << "invariant " << name << ' ';
    if (!v) {
      os << "ok\n";
      continue;
    }
    os << "violated steps=" << v->trace.steps.size();
    if (!v->message.empty()) os << " error=" << v->message;
    os << '\n';
  }
  for (const auto& e : r.model_errors)
    os << "model_error " << e.kind << ' ' << e.task << ' ' << e.label << " steps=" << e.trace.steps.size()
       << ' ' << e.message << '\n';
  return os.str();
}

}  // namespace og
