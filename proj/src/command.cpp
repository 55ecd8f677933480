#include "og/command.hpp"

#include <functional>
#include <set>
#include <sstream>

namespace og {

namespace cmd {

namespace {
std::shared_ptr<Command> node(CmdKind k, std::string label) {
  auto c = std::make_shared<Command>();
  c->kind = k;
  c->label = std::move(label);
  return c;
}
}  // namespace

Cmd skip() { return node(CmdKind::Skip, ""); }

Cmd basic(std::string label, UpdateList updates) {
  auto c = node(CmdKind::Basic, std::move(label));
  c->branches.push_back(std::move(updates));
  return c;
}

Cmd choice(std::string label, std::vector<UpdateList> branches) {
  auto c = node(CmdKind::Basic, std::move(label));
  c->branches = std::move(branches);
  if (c->branches.empty()) c->branches.emplace_back();
  return c;
}

Cmd await(std::string label, Expr guard, UpdateList updates) {
  auto c = node(CmdKind::Await, std::move(label));
  c->guard = std::move(guard);
  c->branches.push_back(std::move(updates));
  return c;
}

Cmd seq(std::vector<Cmd> items) {
  auto c = node(CmdKind::Seq, "");
  c->children = std::move(items);
  return c;
}

Cmd if_(std::string label, Expr cond, Cmd then_c, Cmd else_c) {
  auto c = node(CmdKind::If, std::move(label));
  c->cond = std::move(cond);
  c->children = {std::move(then_c), else_c ? std::move(else_c) : skip()};
  return c;
}

Cmd while_(std::string label, Expr cond, Cmd body) {
  auto c = node(CmdKind::While, std::move(label));
  c->cond = std::move(cond);
  c->children = {std::move(body)};
  return c;
}

Cmd with_assertion(const Cmd& c, Expr assertion) {
  auto n = std::make_shared<Command>(*c);
  n->assertion = std::move(assertion);
  return n;
}

Cmd with_label(const Cmd& c, std::string label) {
  auto n = std::make_shared<Command>(*c);
  n->label = std::move(label);
  return n;
}

}  // namespace cmd

Update assign(VarId target, std::string name, Expr rhs) {
  return Update{target, std::move(name), std::move(rhs)};
}

GlobalState apply_update(const UpdateList& u, const GlobalState& s, const EvalEnv& env,
                         const VarTable* vars) {
  std::vector<Value> computed;
  computed.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (u[j].target == u[i].target)
        throw EvalError(EvalErrorKind::DuplicateTarget, "variable " + u[i].name + " assigned twice");
    computed.push_back(eval(u[i].rhs, s, env));
  }
  GlobalState out = s;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i].target >= out.values.size())
      throw EvalError(EvalErrorKind::TypeMismatch, "unresolved target " + u[i].name);
    if (vars && !computed[i].conforms((*vars)[u[i].target].type))
      throw EvalError(EvalErrorKind::DomainViolation,
                      u[i].name + " := " + computed[i].str() + " outside " +
                          (*vars)[u[i].target].type.str());
    out.values[u[i].target] = std::move(computed[i]);
  }
  return out;
}

std::vector<PointInfo> atomic_points(const Cmd& c) {
  std::vector<PointInfo> out;
  std::function<void(const Cmd&)> walk = [&](const Cmd& n) {
    switch (n->kind) {
      case CmdKind::Skip: break;
      case CmdKind::Basic:
      case CmdKind::Await:
        out.push_back({n->label, n->kind, n->guard, n->assertion, n->branches.size()});
        break;
      case CmdKind::If:
      case CmdKind::While:
        out.push_back({n->label, n->kind, n->guard, n->assertion, 1});
        for (const auto& ch : n->children) walk(ch);
        break;
      case CmdKind::Seq:
        for (const auto& ch : n->children) walk(ch);
        break;
    }
  };
  walk(c);
  return out;
}

namespace {

void render_updates(std::ostream& os, const UpdateList& u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) os << ", ";
    os << u[i].name << " := " << render(u[i].rhs, RenderMode::Canonical);
  }
}

void render_to(std::ostream& os, const Cmd& c) {
  auto prefix = [&] {
    if (c->assertion) os << "{" << render(c->assertion, RenderMode::Canonical) << "} ";
    if (!c->label.empty()) os << c->label << ": ";
  };
  switch (c->kind) {
    case CmdKind::Skip: os << "skip"; break;
    case CmdKind::Basic:
    case CmdKind::Await:
      prefix();
      if (c->kind == CmdKind::Await) os << "await (" << render(c->guard, RenderMode::Canonical) << ") ";
      if (c->fault) os << "fault(" << c->fault_kind << ", " << render(c->fault, RenderMode::Canonical) << ") ";
      os << '<';
      for (std::size_t b = 0; b < c->branches.size(); ++b) {
        if (b) os << " | ";
        render_updates(os, c->branches[b]);
      }
      os << '>';
      break;
    case CmdKind::Seq:
      os << '(';
      for (std::size_t i = 0; i < c->children.size(); ++i) {
        if (i) os << "; ";
        render_to(os, c->children[i]);
      }
      os << ')';
      break;
    case CmdKind::If:
    case CmdKind::While:
      prefix();
      os << (c->kind == CmdKind::If ? "if " : "while ");
      if (c->guard) os << "[" << render(c->guard, RenderMode::Canonical) << "] ";
      os << '(' << render(c->cond, RenderMode::Canonical) << ") ";
      render_to(os, c->children[0]);
      if (c->kind == CmdKind::If) {
        os << " else ";
        render_to(os, c->children[1]);
      }
      break;
  }
}

struct IdTree {
  std::uint32_t id = kEnd;
  std::vector<IdTree> kids;
};

IdTree assign_ids(const Cmd& c, std::uint32_t& next) {
  IdTree t;
  if (c->kind == CmdKind::Basic || c->kind == CmdKind::Await || c->kind == CmdKind::If ||
      c->kind == CmdKind::While)
    t.id = next++;
  for (const auto& ch : c->children) t.kids.push_back(assign_ids(ch, next));
  return t;
}

std::uint16_t link(const Cmd& c, const IdTree& t, std::uint16_t cont, std::vector<Point>& pts) {
  auto id = static_cast<std::uint16_t>(t.id);
  switch (c->kind) {
    case CmdKind::Skip: return cont;
    case CmdKind::Basic:
    case CmdKind::Await: {
      auto& p = pts[id];
      p.kind = PointKind::Action;
      p.label = c->label;
      p.guard = c->guard;
      p.branches = c->branches;
      p.fault = c->fault;
      p.fault_kind = c->fault_kind;
      p.assertion = c->assertion;
      p.next = cont;
      return id;
    }
    case CmdKind::Seq: {
      auto entry = cont;
      for (std::size_t i = c->children.size(); i-- > 0;)
        entry = link(c->children[i], t.kids[i], entry, pts);
      return entry;
    }
    case CmdKind::If:
    case CmdKind::While: {
      Point p;
      p.kind = PointKind::Test;
      p.label = c->label;
      p.guard = c->guard;
      p.cond = c->cond;
      p.assertion = c->assertion;
      pts[id] = p;
      if (c->kind == CmdKind::If) {
        auto t_entry = link(c->children[0], t.kids[0], cont, pts);
        auto f_entry = link(c->children[1], t.kids[1], cont, pts);
        pts[id].next = t_entry;
        pts[id].next_false = f_entry;
      } else {
        auto body = link(c->children[0], t.kids[0], id, pts);
        pts[id].next = body;
        pts[id].next_false = cont;
      }
      return id;
    }
  }
  return cont;
}

}  // namespace

std::string render_command(const Cmd& c) {
  std::ostringstream os;
  render_to(os, c);
  return os.str();
}

std::uint16_t TaskGraph::find(const std::string& label) const {
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].label == label) return static_cast<std::uint16_t>(i);
  return kEnd;
}

TaskGraph compile(const Cmd& c) {
  std::uint32_t count = 0;
  auto ids = assign_ids(c, count);
  if (count >= kEnd) throw ConfigError("task has too many transition points");
  TaskGraph g;
  g.points.resize(count);
  g.entry = link(c, ids, kEnd, g.points);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    auto& p = g.points[i];
    if (p.label.empty()) p.label = "p" + std::to_string(i);
    if (!seen.insert(p.label).second) throw ConfigError("duplicate label " + p.label);
  }
  return g;
}

}  // namespace og
