#include "og/explorer.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "og/digest.hpp"
#include "og/parallel.hpp"

namespace og {

void FullState::encode(std::string& out) const {
  globals.encode(out);
  for (auto pc : pcs) {
    out.push_back(static_cast<char>(pc & 0xff));
    out.push_back(static_cast<char>(pc >> 8));
  }
}

std::string FullState::encode() const {
  std::string out;
  encode(out);
  return out;
}

FullState FullState::decode(std::string_view in, std::size_t nvars, std::size_t ntasks) {
  std::size_t pos = 0;
  FullState s;
  s.globals = GlobalState::decode(in, pos, nvars);
  if (in.size() - pos != 2 * ntasks) throw std::runtime_error("bad state encoding");
  s.pcs.resize(ntasks);
  for (std::size_t i = 0; i < ntasks; ++i) {
    auto lo = static_cast<unsigned char>(in[pos + 2 * i]);
    auto hi = static_cast<unsigned char>(in[pos + 2 * i + 1]);
    s.pcs[i] = static_cast<std::uint16_t>(lo | (hi << 8));
  }
  return s;
}

std::string FullState::digest() const { return digest_hex(encode()); }

FullState initial_state(const System& sys) {
  FullState s;
  s.globals = sys.init;
  for (const auto& g : sys.graphs) s.pcs.push_back(g.entry);
  return s;
}

std::string point_label(const System& sys, std::uint32_t task, std::uint16_t point) {
  return sys.graphs.at(task).points.at(point).label;
}

Expansion expand(const System& sys, const FullState& s) {
  Expansion out;
  EvalEnv env{&sys.ctx, s.pcs, true};
  for (std::uint32_t t = 0; t < sys.graphs.size(); ++t) {
    auto pc = s.pcs[t];
    if (pc == kEnd) continue;
    const auto& p = sys.graphs[t].points[pc];
    try {
      if (p.guard && !eval_pred(p.guard, s.globals, env)) continue;
      if (p.kind == PointKind::Test) {
        bool c = eval_pred(p.cond, s.globals, env);
        FullState n{s.globals, s.pcs};
        n.pcs[t] = c ? p.next : p.next_false;
        out.successors.push_back({t, pc, 0, std::move(n)});
        continue;
      }
      if (p.fault && eval_pred(p.fault, s.globals, env)) {
        out.faults.push_back({p.fault_kind, "fault condition holds", t, pc});
        continue;
      }
    } catch (const EvalError& e) {
      out.faults.push_back({to_string(e.kind()), e.what(), t, pc});
      continue;
    }
    for (std::uint32_t b = 0; b < p.branches.size(); ++b) {
      try {
        FullState n{apply_update(p.branches[b], s.globals, env, &sys.vars), s.pcs};
        n.pcs[t] = p.next;
        out.successors.push_back({t, pc, b, std::move(n)});
      } catch (const EvalError& e) {
        out.faults.push_back({to_string(e.kind()), e.what(), t, pc});
      }
    }
  }
  return out;
}

std::vector<Successor> successors(const System& sys, const FullState& s) {
  return expand(sys, s).successors;
}

unsigned resolve_workers(unsigned requested) {
  if (requested) return requested;
  if (const char* env = std::getenv("OGCHECK_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::clamp(std::thread::hardware_concurrency(), 1u, 8u);
}

namespace {

struct WorkSucc {
  std::uint32_t task;
  std::uint16_t point;
  std::string enc;
};

struct WorkResult {
  std::vector<std::pair<std::size_t, std::string>> failed;  // invariant index, message
  std::vector<WorkSucc> succ;
  std::vector<ModelFault> faults;
};

class Store {
 public:
  std::deque<std::string> enc;
  std::vector<std::uint32_t> parent, depth;
  std::vector<std::uint32_t> ptask;
  std::vector<std::uint16_t> ppoint;

  std::optional<std::uint32_t> find(std::string_view e) const {
    auto it = index_.find(e);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::uint32_t insert(std::string e, std::uint32_t par, std::uint32_t task, std::uint16_t point,
                       std::uint32_t d) {
    auto id = static_cast<std::uint32_t>(enc.size());
    enc.push_back(std::move(e));
    index_.emplace(std::string_view(enc.back()), id);
    parent.push_back(par);
    ptask.push_back(task);
    ppoint.push_back(point);
    depth.push_back(d);
    return id;
  }

  std::size_t size() const { return enc.size(); }

 private:
  std::unordered_map<std::string_view, std::uint32_t> index_;
};

constexpr std::uint32_t kRoot = 0xffffffffu;

Trace trace_to(const System& sys, const Store& st, std::uint32_t id, const std::string& cfg,
               const std::string& init) {
  std::vector<std::uint32_t> path;
  for (auto cur = id; cur != 0; cur = st.parent[cur]) path.push_back(cur);
  std::reverse(path.begin(), path.end());
  Trace t{cfg, init, {}};
  for (auto n : path)
    t.steps.push_back({st.ptask[n], sys.tasks[st.ptask[n]].name, point_label(sys, st.ptask[n], st.ppoint[n]),
                       digest_hex(st.enc[n])});
  return t;
}

}  // namespace

CheckReport explore(const System& sys, const std::vector<NamedInvariant>& invariants,
                    const Limits& limits) {
  const auto nvars = sys.vars.size();
  const auto ntasks = sys.tasks.size();
  const unsigned workers = resolve_workers(limits.workers);
  const auto cfg_digest = sys.config_digest();

  CheckReport rep;
  for (const auto& inv : invariants) rep.invariants.push_back(inv.name);
  if (limits.keep_graph) rep.graph.emplace();

  Store st;
  auto init = initial_state(sys);
  auto init_digest = init.digest();
  st.insert(init.encode(), kRoot, 0, 0, 0);

  std::vector<std::optional<std::pair<std::uint32_t, std::string>>> first_violation(invariants.size());
  std::map<std::tuple<std::string, std::uint32_t, std::uint16_t>, std::pair<std::uint32_t, ModelFault>> faults;

  auto check = [&](const FullState& s, WorkResult& r) {
    EvalEnv env{&sys.ctx, s.pcs, true};
    for (std::size_t i = 0; i < invariants.size(); ++i) {
      try {
        if (!eval_pred(invariants[i].pred, s.globals, env)) r.failed.emplace_back(i, "");
      } catch (const EvalError& e) {
        r.failed.emplace_back(i, std::string(to_string(e.kind())) + ": " + e.what());
      }
    }
  };

  auto record_failures = [&](std::uint32_t id, const WorkResult& r) {
    for (const auto& [i, msg] : r.failed)
      if (!first_violation[i]) first_violation[i] = std::make_pair(id, msg);
  };

  bool stop = false;
  std::size_t lo = 0;
  constexpr std::size_t kChunk = 1 << 14;
  std::vector<WorkResult> results;

  while (lo < st.size() && !stop) {
    std::size_t hi = st.size();
    for (std::size_t c = lo; c < hi && !stop; c += kChunk) {
      std::size_t end = std::min(hi, c + kChunk);
      results.assign(end - c, WorkResult{});
      parallel_for(end - c, workers, [&](std::size_t k) {
        auto id = c + k;
        auto s = FullState::decode(st.enc[id], nvars, ntasks);
        auto& r = results[k];
        check(s, r);
        auto x = expand(sys, s);
        r.faults = std::move(x.faults);
        r.succ.reserve(x.successors.size());
        for (auto& n : x.successors) r.succ.push_back({n.task, n.point, n.state.encode()});
      });
      for (std::size_t k = 0; k < results.size(); ++k) {
        auto id = static_cast<std::uint32_t>(c + k);
        auto& r = results[k];
        record_failures(id, r);
        auto d = st.depth[id];
        if (limits.max_depth && d >= limits.max_depth) {
          for (const auto& n : r.succ)
            if (!st.find(n.enc)) {
              rep.terminated = false;
              rep.limits_hit = "depth";
            }
          continue;
        }
        for (const auto& f : r.faults) {
          auto key = std::make_tuple(f.kind, f.task, f.point);
          if (!faults.count(key)) faults.emplace(key, std::make_pair(id, f));
        }
        for (auto& n : r.succ) {
          ++rep.transition_count;
          auto found = st.find(n.enc);
          std::uint32_t to;
          if (found) {
            to = *found;
          } else {
            if (st.size() >= limits.max_states) {
              stop = true;
              rep.terminated = false;
              rep.limits_hit = "states";
              break;
            }
            to = st.insert(std::move(n.enc), id, n.task, n.point, d + 1);
            rep.depth = std::max(rep.depth, d + 1);
          }
          if (rep.graph) rep.graph->edges.push_back({id, to, n.task, point_label(sys, n.task, n.point)});
        }
        if (stop) {
          lo = id + 1;
          break;
        }
      }
      if (!stop) lo = end;
    }
  }

  // States admitted but never expanded (limit hit) still get their invariants checked.
  if (stop) {
    std::size_t n = st.size() - lo;
    results.assign(n, WorkResult{});
    parallel_for(n, workers, [&](std::size_t k) {
      auto s = FullState::decode(st.enc[lo + k], nvars, ntasks);
      check(s, results[k]);
    });
    for (std::size_t k = 0; k < n; ++k) record_failures(static_cast<std::uint32_t>(lo + k), results[k]);
  }

  rep.reachable_count = st.size();
  for (std::size_t i = 0; i < invariants.size(); ++i)
    if (first_violation[i])
      rep.violations.push_back({invariants[i].name, first_violation[i]->second,
                                trace_to(sys, st, first_violation[i]->first, cfg_digest, init_digest)});

  std::vector<std::pair<std::uint32_t, ModelFault>> ordered;
  for (auto& [key, v] : faults) ordered.push_back(v);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first, a.second.task, a.second.point) < std::tie(b.first, b.second.task, b.second.point);
  });
  for (auto& [id, f] : ordered)
    rep.model_errors.push_back({f.kind, f.message, sys.tasks[f.task].name, point_label(sys, f.task, f.point),
                                trace_to(sys, st, id, cfg_digest, init_digest)});

  if (rep.graph) rep.graph->states.assign(st.enc.begin(), st.enc.end());
  return rep;
}

ReplayResult replay(const System& sys, const Trace& t) {
  ReplayResult r;
  if (t.config_digest != sys.config_digest()) {
    r.reason = "DigestMismatch: configuration digest differs";
    return r;
  }
  auto cur = initial_state(sys);
  if (t.init_digest != cur.digest()) {
    r.reason = "DigestMismatch: initial state digest differs";
    return r;
  }
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& step = t.steps[i];
    bool matched = false;
    if (step.task < sys.tasks.size()) {
      for (auto& s : successors(sys, cur)) {
        if (s.task != step.task || point_label(sys, s.task, s.point) != step.label) continue;
        if (s.state.digest() != step.digest) continue;
        cur = std::move(s.state);
        matched = true;
        break;
      }
    }
    if (!matched) {
      r.divergent_step = i;
      r.reason = "DigestMismatch: step " + std::to_string(i) + " (" + step.task_name + ":" + step.label +
                 ") is not reproducible";
      return r;
    }
  }
  r.ok = true;
  r.final_state = std::move(cur);
  return r;
}

Trace random_walk(const System& sys, std::uint64_t seed, std::size_t max_steps) {
  std::mt19937_64 rng(seed);
  auto cur = initial_state(sys);
  Trace t{sys.config_digest(), cur.digest(), {}};
  for (std::size_t i = 0; i < max_steps; ++i) {
    auto succ = successors(sys, cur);
    if (succ.empty()) break;
    auto& pick = succ[rng() % succ.size()];
    t.steps.push_back({pick.task, sys.tasks[pick.task].name, point_label(sys, pick.task, pick.point),
                       pick.state.digest()});
    cur = std::move(pick.state);
  }
  return t;
}

std::string export_dot(const System& sys, const CheckReport& report, int verbosity) {
  if (!report.graph) throw std::logic_error("GraphNotRetained");
  const auto& g = *report.graph;
  std::ostringstream os;
  os << "digraph states {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    std::string label = digest_hex(g.states[i]);
    if (verbosity >= 2) {
      auto s = FullState::decode(g.states[i], sys.vars.size(), sys.tasks.size());
      label += "\\n" + s.globals.render(sys.vars);
      for (std::size_t t = 0; t < s.pcs.size(); ++t)
        label += "\\n" + sys.tasks[t].name + "@" +
                 (s.pcs[t] == kEnd ? std::string("end") : point_label(sys, static_cast<std::uint32_t>(t), s.pcs[t]));
    }
    os << "  s" << i << " [label=\"" << label << "\"];\n";
  }
  for (const auto& e : g.edges)
    os << "  s" << e.from << " -> s" << e.to << " [label=\"" << sys.tasks[e.task].name << ':' << e.label
       << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace og
