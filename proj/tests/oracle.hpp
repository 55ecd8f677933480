#pragma once

// Hand-written reference semantics of the eChronos preset on the ARM variant
// (wait-until-clear user loop, add-one event changes), explored depth-first.
// Shares no code with the library beyond the standard library.

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_set>
#include <vector>

namespace oracle {

struct Config {
  unsigned users = 1;
  unsigned ints = 0;
  unsigned events = 0;
  bool min_order = false;
};

enum SvcPc : std::uint8_t {
  kLoop,
  kSchedInit,
  kSchedLoop,
  kSnapshot,
  kHandle,
  kClear,
  kPick,
  kCsSave,
  kCsCur,
  kCsLoad,
  kCsTest,
  kCsEnable,
  kCsDisable,
  kIret
};
enum TakePc : std::uint8_t { kTakeLoop, kTake };
enum IntPc : std::uint8_t { kIntLoop, kItake, kEvents, kRequest, kIntIret };
enum UserPc : std::uint8_t { kUserLoop, kMaskA, kBlock, kSvcNow, kUnmaskA, kWait };

struct State {
  unsigned at = 2;
  std::vector<unsigned> stack;  // front = most recent
  std::uint64_t eit = 0;
  bool req = false;
  unsigned cur = 2;
  std::vector<bool> ctx_enabled;             // per user
  std::vector<std::vector<unsigned>> ctx_st;  // per user
  std::vector<bool> runnable;                 // per user
  std::uint64_t e = 0, etmp = 0;
  int next = -1;
  // svca_take, svc_a, svc_s, interrupts..., users...
  std::vector<std::uint8_t> pc;

  std::string key() const {
    std::string k;
    auto put = [&](std::uint64_t v) { k.append(reinterpret_cast<const char*>(&v), sizeof v); };
    put(at);
    put(stack.size());
    for (auto r : stack) put(r);
    put(eit);
    put(req);
    put(cur);
    for (std::size_t u = 0; u < runnable.size(); ++u) {
      put(ctx_enabled[u]);
      put(ctx_st[u].size());
      for (auto r : ctx_st[u]) put(r);
      put(runnable[u]);
    }
    put(e);
    put(etmp);
    put(static_cast<std::uint64_t>(next + 1));
    k.append(pc.begin(), pc.end());
    return k;
  }
};

class Model {
 public:
  explicit Model(Config c) : c_(c) {}

  unsigned routines() const { return 2 + c_.users + c_.ints; }
  bool is_user(unsigned r) const { return r >= 2 && r < 2 + c_.users; }
  unsigned prio(unsigned r) const { return r < 2 ? 0 : 1 + (r - 2 - c_.users); }
  unsigned user_prio(unsigned r) const { return c_.users - (r - 2); }

  bool may_interrupt(unsigned running, unsigned y) const {
    if (is_user(y)) return false;
    if (is_user(running)) return true;
    return prio(y) > prio(running);
  }

  State init() const {
    State s;
    s.eit = 1u << 1;
    for (unsigned k = 0; k < c_.ints; ++k) s.eit |= std::uint64_t{1} << (2 + c_.users + k);
    for (unsigned u = 0; u < c_.users; ++u) {
      s.ctx_enabled.push_back(true);
      s.ctx_st.push_back({2 + u});
      s.runnable.push_back(true);
    }
    s.pc.assign(3 + c_.ints + c_.users, 0);
    return s;
  }

  bool on_stack(const State& s, unsigned r) const {
    for (auto x : s.stack)
      if (x == r) return true;
    return false;
  }

  bool can_take(const State& s, unsigned r) const {
    return ((s.eit >> r) & 1) && s.at != r && !on_stack(s, r) && may_interrupt(s.at, r);
  }

  static void enter(State& s, unsigned r) {
    s.stack.insert(s.stack.begin(), s.at);
    s.at = r;
  }

  // False when the return is impossible (empty stack).
  bool iret(State& s) const {
    if (s.stack.empty()) return false;
    unsigned top = s.stack.front();
    bool chain = s.req && ((s.eit >> 1) & 1) && !on_stack(s, 1) && may_interrupt(top, 1);
    if (chain) {
      s.at = 1;
      s.req = false;
    } else {
      s.at = top;
      s.stack.erase(s.stack.begin());
    }
    return true;
  }

  int pick(const State& s) const {
    int best = -1;
    for (unsigned u = 0; u < c_.users; ++u) {
      if (!s.runnable[u]) continue;
      unsigned r = 2 + u;
      if (best < 0) {
        best = static_cast<int>(r);
        continue;
      }
      unsigned pb = user_prio(static_cast<unsigned>(best)), pr = user_prio(r);
      if (c_.min_order ? pr < pb : pr > pb) best = static_cast<int>(r);
    }
    return best;
  }

  void svc_step(const State& s, std::size_t t, unsigned me, std::vector<State>& out) const {
    if (s.at != me) return;
    State n = s;
    auto& pc = n.pc[t];
    switch (static_cast<SvcPc>(s.pc[t])) {
      case kLoop: pc = kSchedInit; break;
      case kSchedInit:
        n.next = -1;
        pc = kSchedLoop;
        break;
      case kSchedLoop: pc = s.next < 0 ? kSnapshot : kCsSave; break;
      case kSnapshot:
        n.etmp = s.e;
        pc = kHandle;
        break;
      case kHandle:
        for (unsigned ev = 0; ev < c_.events; ++ev)
          if ((s.etmp >> ev) & 1) n.runnable[ev % c_.users] = true;
        pc = kClear;
        break;
      case kClear:
        n.e = s.e & ~s.etmp;
        pc = kPick;
        break;
      case kPick:
        n.next = pick(s);
        pc = kSchedLoop;
        break;
      case kCsSave:
        n.ctx_enabled[s.cur - 2] = me == 1;
        n.ctx_st[s.cur - 2] = s.stack;
        pc = kCsCur;
        break;
      case kCsCur:
        n.cur = static_cast<unsigned>(s.next);
        pc = kCsLoad;
        break;
      case kCsLoad:
        n.stack = s.ctx_st[s.cur - 2];
        pc = kCsTest;
        break;
      case kCsTest: pc = s.ctx_enabled[s.cur - 2] ? kCsEnable : kCsDisable; break;
      case kCsEnable:
        n.eit |= 2;
        pc = kIret;
        break;
      case kCsDisable:
        n.eit &= ~std::uint64_t{2};
        pc = kIret;
        break;
      case kIret:
        if (!iret(n)) return;
        pc = kLoop;
        break;
    }
    out.push_back(std::move(n));
  }

  std::vector<State> successors(const State& s) const {
    std::vector<State> out;
    // svca_take
    if (s.pc[0] == kTakeLoop) {
      State n = s;
      n.pc[0] = kTake;
      out.push_back(std::move(n));
    } else if (s.req && can_take(s, 1)) {
      State n = s;
      n.req = false;
      enter(n, 1);
      n.pc[0] = kTakeLoop;
      out.push_back(std::move(n));
    }
    svc_step(s, 1, 1, out);
    svc_step(s, 2, 0, out);
    for (unsigned k = 0; k < c_.ints; ++k) {
      std::size_t t = 3 + k;
      unsigned r = 2 + c_.users + k;
      switch (static_cast<IntPc>(s.pc[t])) {
        case kIntLoop: {
          State n = s;
          n.pc[t] = kItake;
          out.push_back(std::move(n));
          break;
        }
        case kItake:
          if (can_take(s, r)) {
            State n = s;
            enter(n, r);
            n.pc[t] = kEvents;
            out.push_back(std::move(n));
          }
          break;
        case kEvents:
          if (s.at != r) break;
          if (c_.events == 0) {
            State n = s;
            n.pc[t] = kRequest;
            out.push_back(std::move(n));
          }
          for (unsigned ev = 0; ev < c_.events; ++ev) {
            State n = s;
            n.e |= std::uint64_t{1} << ev;
            n.pc[t] = kRequest;
            out.push_back(std::move(n));
          }
          break;
        case kRequest:
          if (s.at != r) break;
          {
            State n = s;
            n.req = true;
            n.pc[t] = kIntIret;
            out.push_back(std::move(n));
          }
          break;
        case kIntIret:
          if (s.at != r) break;
          {
            State n = s;
            if (!iret(n)) break;
            n.pc[t] = kIntLoop;
            out.push_back(std::move(n));
          }
          break;
      }
    }
    for (unsigned u = 0; u < c_.users; ++u) {
      std::size_t t = 3 + c_.ints + u;
      unsigned r = 2 + u;
      if (s.at != r) continue;
      State n = s;
      auto& pc = n.pc[t];
      switch (static_cast<UserPc>(s.pc[t])) {
        case kUserLoop: pc = kMaskA; break;
        case kMaskA:
          n.eit &= ~std::uint64_t{2};
          pc = kBlock;
          break;
        case kBlock:
          n.runnable[u] = false;
          pc = kSvcNow;
          break;
        case kSvcNow:
          if (on_stack(s, 0)) continue;
          enter(n, 0);
          pc = kUnmaskA;
          break;
        case kUnmaskA:
          n.eit |= 2;
          pc = kWait;
          break;
        case kWait: pc = s.req ? kWait : kUserLoop; break;
      }
      out.push_back(std::move(n));
    }
    return out;
  }

  /// AT not on ATStack and no non-user routine twice on ATStack.
  bool stack_shape(const State& s) const {
    if (on_stack(s, s.at)) return false;
    std::uint64_t seen = 0;
    for (auto r : s.stack) {
      if (is_user(r)) continue;
      if ((seen >> r) & 1) return false;
      seen |= std::uint64_t{1} << r;
    }
    return true;
  }

  /// Users occur only at the bottom of ATStack ++ [AT].
  bool user_at_bottom(const State& s) const {
    std::vector<unsigned> all{s.at};
    all.insert(all.end(), s.stack.begin(), s.stack.end());
    for (std::size_t i = 0; i + 1 < all.size(); ++i)
      if (is_user(all[i])) return false;
    return true;
  }

 private:
  Config c_;
};

struct Result {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  bool stack_shape = true;
  bool user_at_bottom = true;
};

inline Result explore_dfs(const Config& c) {
  Model m(c);
  Result r;
  std::unordered_set<std::string> seen;
  std::vector<State> todo{m.init()};
  seen.insert(todo.back().key());
  while (!todo.empty()) {
    State s = std::move(todo.back());
    todo.pop_back();
    ++r.states;
    r.stack_shape = r.stack_shape && m.stack_shape(s);
    r.user_at_bottom = r.user_at_bottom && m.user_at_bottom(s);
    for (auto& n : m.successors(s)) {
      ++r.transitions;
      if (seen.insert(n.key()).second) todo.push_back(std::move(n));
    }
  }
  return r;
}

// Quiescent priority under the default (max) user order. The BFS returns
// the shortest violation depth, or -1.
inline bool quiescent_ok(const Config& c, const State& s) {
  if (s.req || s.e != 0 || !s.stack.empty()) return true;
  if (s.at < 2 || s.at >= 2 + c.users) return true;
  unsigned u = s.at - 2;
  auto pc = s.pc[3 + c.ints + u];
  if (pc != kUserLoop && pc != kMaskA) return true;
  // Highest runnable under the default (max) user priority: lowest index.
  for (unsigned v = 0; v < c.users; ++v)
    if (s.runnable[v]) return v == u;
  return false;
}

inline int shortest_quiescent_violation(const Config& c) {
  Model m(c);
  std::unordered_set<std::string> seen;
  std::deque<std::pair<State, int>> q;
  q.emplace_back(m.init(), 0);
  seen.insert(q.front().first.key());
  while (!q.empty()) {
    auto [s, d] = std::move(q.front());
    q.pop_front();
    if (!quiescent_ok(c, s)) return d;
    for (auto& n : m.successors(s))
      if (seen.insert(n.key()).second) q.emplace_back(std::move(n), d + 1);
  }
  return -1;
}

}  // namespace oracle
