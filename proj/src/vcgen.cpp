#include "og/vcgen.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "og/explorer.hpp"
#include "og/parallel.hpp"

namespace og {

const char* to_string(VcKind k) { return k == VcKind::Sequential ? "SEQUENTIAL" : "INTERFERENCE"; }

const char* to_string(VcStatus s) {
  switch (s) {
    case VcStatus::Pending: return "PENDING";
    case VcStatus::Trivial: return "TRIVIAL";
    case VcStatus::Discharged: return "DISCHARGED";
    case VcStatus::Failed: return "FAILED";
    case VcStatus::Unknown: return "UNKNOWN";
  }
  return "?";
}

std::string VC::key() const {
  return std::string(to_string(kind)) + "|" + render(antecedent, RenderMode::Canonical) + "|" +
         render(consequent_wp, RenderMode::Canonical);
}

namespace {

bool is_bool_lit(const Expr& e, bool v) {
  return e->op == Op::Lit && e->lit.kind() == ValueKind::Bool && e->lit.as_bool() == v;
}

Expr orient(const Expr& e) {
  if ((e->op == Op::Eq || e->op == Op::Ne) && e->args[0]->op == Op::Lit && e->args[1]->op != Op::Lit) {
    auto n = std::make_shared<ExprNode>(*e);
    std::swap(n->args[0], n->args[1]);
    return n;
  }
  return e;
}

std::vector<std::pair<VarId, Expr>> as_subst(const UpdateList& u) {
  std::vector<std::pair<VarId, Expr>> s;
  for (const auto& x : u) s.emplace_back(x.target, x.rhs);
  return s;
}

Expr or_true(const Expr& e) { return e ? e : ex::tt(); }

}  // namespace

Expr canonicalize(const Expr& e, const Context& ctx) {
  auto s = simplify(e, ctx);
  std::vector<Expr> parts;
  conjuncts(s, parts);
  std::map<std::string, Expr> sorted;
  for (auto& c : parts) {
    if (is_bool_lit(c, false)) return ex::ff();
    if (is_bool_lit(c, true)) continue;
    auto o = orient(c);
    sorted.emplace(render(o, RenderMode::Canonical), o);
  }
  std::vector<Expr> out;
  for (auto& [k, c] : sorted) out.push_back(c);
  return ex::and_(std::move(out));
}

System annotate_guards(const System& sys) {
  System out = sys;
  for (auto& t : out.tasks) {
    auto owner_eq = ex::eq(ex::var(hwvar::AT, "AT"), ex::num(t.owner));
    auto guarded = [&](const Expr& g) {
      if (!g) return false;
      std::vector<Expr> cs;
      conjuncts(g, cs);
      return std::any_of(cs.begin(), cs.end(), [&](const Expr& c) { return same(orient(c), owner_eq); });
    };
    std::function<Cmd(const Cmd&)> walk = [&](const Cmd& c) -> Cmd {
      auto n = std::make_shared<Command>(*c);
      if (c->kind != CmdKind::Seq && c->kind != CmdKind::Skip && !c->assertion)
        n->assertion = guarded(c->guard) ? owner_eq : ex::tt();
      for (auto& ch : n->children) ch = walk(ch);
      return n;
    };
    t.body = walk(t.body);
  }
  out.finalize();
  return out;
}

namespace {

void require_assertions(const System& sys, std::size_t t) {
  for (const auto& p : sys.graphs[t].points)
    if (!p.assertion)
      throw ConfigError("UnannotatedPoint: " + sys.tasks[t].name + ":" + p.label + " has no assertion");
}

}  // namespace

std::vector<VC> gen_interference_vcs(const System& sys) {
  std::vector<VC> out;
  for (std::size_t t = 0; t < sys.tasks.size(); ++t) require_assertions(sys, t);
  for (std::size_t x = 0; x < sys.tasks.size(); ++x) {
    for (const auto& p : sys.graphs[x].points) {
      auto P = p.assertion;
      auto P_canon = canonicalize(P, sys.ctx);
      for (std::size_t y = 0; y < sys.tasks.size(); ++y) {
        if (y == x) continue;
        for (const auto& q : sys.graphs[y].points) {
          auto ante = canonicalize(ex::and_({P, or_true(q.guard), q.assertion}), sys.ctx);
          auto emit = [&](std::uint32_t b, UpdateList effect, Expr wp) {
            VC vc;
            vc.kind = VcKind::Interference;
            vc.owner_task = sys.tasks[x].name;
            vc.owner_label = p.label;
            vc.actor_task = sys.tasks[y].name;
            vc.actor_label = q.label;
            vc.branch = b;
            vc.antecedent = ante;
            vc.consequent = P;
            vc.effect = std::move(effect);
            vc.consequent_wp = std::move(wp);
            out.push_back(std::move(vc));
          };
          if (q.kind == PointKind::Test) {
            emit(0, {}, P_canon);
            continue;
          }
          for (std::uint32_t b = 0; b < q.branches.size(); ++b)
            emit(b, q.branches[b], canonicalize(substitute(P, as_subst(q.branches[b])), sys.ctx));
        }
      }
    }
  }
  return out;
}

std::vector<VC> gen_sequential_vcs(const System& sys, std::size_t t, const Expr& post) {
  require_assertions(sys, t);
  const auto& g = sys.graphs[t];
  auto target = [&](std::uint16_t next) { return next == kEnd ? or_true(post) : g.points[next].assertion; };
  auto target_label = [&](std::uint16_t next) { return next == kEnd ? std::string("end") : g.points[next].label; };
  std::vector<VC> out;
  auto emit = [&](const Point& p, Expr ante, std::uint16_t next, std::uint32_t b, UpdateList effect) {
    VC vc;
    vc.kind = VcKind::Sequential;
    vc.owner_task = sys.tasks[t].name;
    vc.owner_label = p.label;
    vc.actor_task = sys.tasks[t].name;
    vc.actor_label = target_label(next);
    vc.branch = b;
    vc.antecedent = canonicalize(ante, sys.ctx);
    vc.consequent = target(next);
    vc.consequent_wp = canonicalize(substitute(vc.consequent, as_subst(effect)), sys.ctx);
    vc.effect = std::move(effect);
    out.push_back(std::move(vc));
  };
  for (const auto& p : g.points) {
    auto base = ex::and_(p.assertion, or_true(p.guard));
    if (p.kind == PointKind::Test) {
      emit(p, ex::and_(base, p.cond), p.next, 0, {});
      emit(p, ex::and_(base, ex::not_(p.cond)), p.next_false, 1, {});
    } else {
      for (std::uint32_t b = 0; b < p.branches.size(); ++b) emit(p, base, p.next, b, p.branches[b]);
    }
  }
  return out;
}

std::vector<VC> gen_sequential_vcs(const System& sys) {
  std::vector<VC> out;
  for (std::size_t t = 0; t < sys.tasks.size(); ++t) {
    auto v = gen_sequential_vcs(sys, t);
    out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  return out;
}

bool has_at_contradiction(const Expr& antecedent) {
  std::vector<Expr> cs;
  conjuncts(antecedent, cs);
  std::optional<Value> seen;
  for (const auto& c0 : cs) {
    auto c = orient(c0);
    if (c->op != Op::Eq || c->args[0]->op != Op::Var || c->args[0]->var != hwvar::AT) continue;
    if (c->args[1]->op != Op::Lit) continue;
    if (seen && *seen != c->args[1]->lit) return true;
    seen = c->args[1]->lit;
  }
  return false;
}

SimplifyStats simplify_trivial(std::vector<VC>& vcs) {
  SimplifyStats st;
  std::unordered_map<std::string, std::size_t> first;
  for (std::size_t i = 0; i < vcs.size(); ++i) {
    auto& vc = vcs[i];
    if (has_at_contradiction(vc.antecedent)) {
      vc.status = VcStatus::Trivial;
      vc.note = "at-contradiction";
      ++st.at_contradictions;
      continue;
    }
    auto [it, fresh] = first.emplace(vc.key(), i);
    if (!fresh) {
      vc.status = VcStatus::Trivial;
      vc.duplicate_of = it->second;
      vc.note = "duplicate";
      ++st.duplicates;
      continue;
    }
    ++st.retained;
  }
  return st;
}

void discharge_finite(VC& vc, const System& sys, std::uint64_t bound) {
  vc.witness.reset();
  if (is_bool_lit(vc.antecedent, false)) {
    vc.status = VcStatus::Discharged;
    vc.note = "antecedent false";
    return;
  }
  if (is_bool_lit(vc.consequent_wp, true)) {
    vc.status = VcStatus::Discharged;
    vc.note = "consequent true";
    return;
  }
  {
    std::vector<Expr> have, need;
    conjuncts(vc.antecedent, have);
    conjuncts(vc.consequent_wp, need);
    bool implied = std::all_of(need.begin(), need.end(), [&](const Expr& n) {
      return std::any_of(have.begin(), have.end(), [&](const Expr& h) { return same(h, n); });
    });
    if (implied) {
      vc.status = VcStatus::Discharged;
      vc.note = "consequent in antecedent";
      return;
    }
  }
  if (mentions_control(vc.antecedent) || mentions_control(vc.consequent_wp)) {
    vc.status = VcStatus::Unknown;
    vc.note = "control predicate";
    return;
  }

  auto vars = free_vars(vc.antecedent);
  for (auto v : free_vars(vc.consequent_wp)) vars.push_back(v);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());

  std::vector<std::uint64_t> sizes;
  std::uint64_t space = 1;
  for (auto v : vars) {
    auto n = domain_size(sys.vars[v].type, bound + 1);
    sizes.push_back(n);
    space = (n != 0 && space > (bound + 1) / n) ? bound + 1 : space * n;
  }
  if (space > bound) {
    vc.status = VcStatus::Unknown;
    vc.note = "valuation space exceeds bound";
    return;
  }

  std::vector<std::size_t> order(vars.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sizes[a] < sizes[b]; });
  std::vector<VarId> ordered;
  for (auto i : order) ordered.push_back(vars[i]);
  std::vector<std::vector<Value>> domains;
  for (auto v : ordered) domains.push_back(enumerate_domain(sys.vars[v].type));

  // Each antecedent conjunct is checked as soon as its last variable is bound.
  std::vector<Expr> parts;
  conjuncts(vc.antecedent, parts);
  std::vector<std::vector<Expr>> at_level(ordered.size() + 1);
  for (const auto& c : parts) {
    std::size_t level = 0;
    for (auto v : free_vars(c)) {
      auto pos = std::find(ordered.begin(), ordered.end(), v) - ordered.begin();
      level = std::max<std::size_t>(level, pos + 1);
    }
    at_level[level].push_back(c);
  }

  EvalEnv env{&sys.ctx};
  GlobalState s = sys.init;
  auto holds = [&](const std::vector<Expr>& cs) {
    for (const auto& c : cs) {
      try {
        if (!eval_pred(c, s, env)) return false;
      } catch (const EvalError&) {
        return false;
      }
    }
    return true;
  };

  bool failed = false;
  std::function<void(std::size_t)> search = [&](std::size_t d) {
    if (failed) return;
    if (d == ordered.size()) {
      bool ok;
      try {
        ok = eval_pred(vc.consequent_wp, s, env);
      } catch (const EvalError& e) {
        ok = false;
        vc.note = std::string("consequent error: ") + to_string(e.kind());
      }
      if (!ok) {
        failed = true;
        vc.witness = s;
      }
      return;
    }
    for (const auto& val : domains[d]) {
      s[ordered[d]] = val;
      if (holds(at_level[d + 1])) search(d + 1);
      if (failed) return;
    }
  };
  if (holds(at_level[0])) search(0);

  if (failed) {
    vc.status = VcStatus::Failed;
    if (vc.note.empty()) vc.note = "witness found";
  } else {
    vc.status = VcStatus::Discharged;
    vc.note = "enumerated";
  }
}

VcStats vc_stats(const std::vector<VC>& vcs, VcKind kind) {
  VcStats st;
  for (const auto& vc : vcs) {
    if (vc.kind != kind) continue;
    ++st.total;
    switch (vc.status) {
      case VcStatus::Trivial: ++st.trivial; break;
      case VcStatus::Discharged: ++st.discharged; break;
      case VcStatus::Failed: ++st.failed; break;
      case VcStatus::Unknown: ++st.unknown; break;
      case VcStatus::Pending: break;
    }
  }
  return st;
}

VcResult run_vc_pipeline(const System& sys, const VcOptions& opts) {
  auto annotated = annotate_guards(sys);
  VcResult r;
  r.vcs = gen_interference_vcs(annotated);
  if (opts.sequential) {
    auto seq = gen_sequential_vcs(annotated);
    r.vcs.insert(r.vcs.end(), std::make_move_iterator(seq.begin()), std::make_move_iterator(seq.end()));
  }
  if (opts.simplify) simplify_trivial(r.vcs);

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < r.vcs.size(); ++i)
    if (r.vcs[i].status == VcStatus::Pending) todo.push_back(i);
  parallel_for(todo.size(), resolve_workers(opts.workers), [&](std::size_t k) {
    auto& vc = r.vcs[todo[k]];
    try {
      discharge_finite(vc, annotated, opts.bound);
    } catch (const UnboundedDomain& e) {
      vc.status = VcStatus::Unknown;
      vc.note = std::string("unbounded domain: ") + e.what();
    }
  });

  r.interference = vc_stats(r.vcs, VcKind::Interference);
  r.sequential = vc_stats(r.vcs, VcKind::Sequential);
  return r;
}

std::vector<std::string> failed_witnesses(const System& sys, const std::vector<VC>& vcs) {
  std::vector<std::string> out;
  for (const auto& vc : vcs) {
    const VC* src = &vc;
    if (vc.duplicate_of) src = &vcs[*vc.duplicate_of];
    if (src->status == VcStatus::Failed && src->witness) out.push_back(src->witness->render(sys.vars));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string vc_report(const System& sys, const VcResult& r) {
  std::ostringstream os;
  auto row = [&](const char* name, const VcStats& s) {
    os << name << " total=" << s.total << " trivial=" << s.trivial << " discharged=" << s.discharged
       << " failed=" << s.failed << " unknown=" << s.unknown << '\n';
  };
  os << "# ogvcs v1\n";
  os << "config " << sys.config_digest() << '\n';
  row("interference", r.interference);
  row("sequential", r.sequential);
  for (std::size_t i = 0; i < r.vcs.size(); ++i) {
    const auto& vc = r.vcs[i];
    auto status = vc.status;
    const VC* src = vc.duplicate_of ? &r.vcs[*vc.duplicate_of] : &vc;
    os << "vc " << i << ' ' << to_string(vc.kind) << ' ' << to_string(status);
    if (vc.duplicate_of) os << " duplicate_of=" << *vc.duplicate_of << " verdict=" << to_string(src->status);
    os << " owner=" << vc.owner_task << ':' << vc.owner_label << " actor=" << vc.actor_task << ':'
       << vc.actor_label;
    if (vc.branch) os << '#' << vc.branch;
    os << '\n';
    os << "  pre  " << render(vc.antecedent, RenderMode::Canonical) << '\n';
    os << "  post " << render(vc.consequent_wp, RenderMode::Canonical) << '\n';
    if (!vc.note.empty()) os << "  note " << vc.note << '\n';
    if (vc.status == VcStatus::Failed && vc.witness) os << "  witness " << vc.witness->render(sys.vars) << '\n';
  }
  return os.str();
}

}  // namespace og
