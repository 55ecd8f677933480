#pragma once

#include <initializer_list>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "og/command.hpp"
#include "og/control.hpp"
#include "og/hw.hpp"
#include "og/system.hpp"

namespace support {

using namespace og;

struct HwFixture {
  SystemConfig cfg;
  VarTable vars;
  GlobalState init;
  Context ctx;
};

inline HwFixture hw_fixture(std::uint32_t users, std::uint32_t ints, HwVariant v = HwVariant::Arm) {
  HwFixture f;
  f.cfg.nb_users = users;
  f.cfg.nb_ints = ints;
  f.cfg.variant = v;
  f.cfg.fill_defaults();
  declare_hw_vars(f.vars, f.init, f.cfg);
  f.ctx = make_context(f.cfg);
  return f;
}

inline GlobalState with(const HwFixture& f, GlobalState s, std::initializer_list<std::pair<const char*, Value>> kv) {
  for (const auto& [name, v] : kv) s[f.vars.at(name)] = v;
  return s;
}

inline const Value& get(const HwFixture& f, const GlobalState& s, const char* name) { return s[f.vars.at(name)]; }

/// Fires the single transition point of `c` (branch `b`); nullopt when its
/// guard is false.
inline std::optional<GlobalState> fire(const Cmd& c, const GlobalState& s, const Context& ctx,
                                       std::uint32_t b = 0) {
  auto g = compile(c);
  const auto& p = g.points.at(g.entry);
  EvalEnv env{&ctx};
  if (p.guard && !eval_pred(p.guard, s, env)) return std::nullopt;
  return apply_update(p.branches.at(b), s, env);
}

inline std::uint64_t bit(std::uint32_t r) { return std::uint64_t{1} << r; }

/// Random hardware state: AT and a duplicate-free ATStack with a user at the
/// bottom, random mask (EIT subset of I'), SVCaReq false.
inline GlobalState random_hw_state(const HwFixture& f, std::mt19937_64& rng) {
  const auto& c = f.ctx;
  std::vector<std::uint32_t> nonusers{SVC_s, SVC_a};
  for (std::uint32_t r = user0 + c.nb_users; r < c.routine_count(); ++r) nonusers.push_back(r);
  std::shuffle(nonusers.begin(), nonusers.end(), rng);
  std::uint32_t user = user0 + static_cast<std::uint32_t>(rng() % c.nb_users);
  std::size_t depth = rng() % (nonusers.size() + 1);
  // chain bottom..top: user, nonusers[0..depth)
  std::vector<std::uint32_t> chain{user};
  for (std::size_t i = 0; i < depth; ++i) chain.push_back(nonusers[i]);
  std::uint32_t at = chain.back();
  std::vector<Value> stack;
  for (std::size_t i = chain.size() - 1; i-- > 0;) stack.push_back(Value::nat(chain[i]));
  std::uint64_t iprime = bit(SVC_a) | c.interrupts_mask();
  std::uint64_t eit = rng() & iprime;
  auto s = f.init;
  s[hwvar::AT] = Value::nat(at);
  s[hwvar::ATStack] = Value::stack(stack);
  s[hwvar::EIT] = Value::set(eit);
  s[hwvar::SVCaReq] = Value::boolean(false);
  if (f.cfg.variant == HwVariant::Generic) {
    std::vector<Value> masks;
    for (std::size_t i = 0; i < stack.size(); ++i) masks.push_back(Value::set(rng() & iprime));
    s[hwvar::EITStack] = Value::stack(masks);
  }
  return s;
}

/// Random command tree of bounded depth over boolean variables `vars`
/// (VarIds 0..n-1 of a table holding only booleans).
class CmdGen {
 public:
  CmdGen(std::mt19937_64& rng, std::uint32_t nvars) : rng_(rng), nvars_(nvars) {}

  Cmd tree(int depth) {
    int pick = static_cast<int>(rng_() % (depth <= 0 ? 3 : 6));
    switch (pick) {
      case 0: return cmd::skip();
      case 1: return cmd::basic("", {random_update()});
      case 2: return cmd::await("", random_pred(), {random_update()});
      case 3: {
        std::vector<Cmd> items;
        auto n = 1 + rng_() % 3;
        for (std::size_t i = 0; i < n; ++i) items.push_back(tree(depth - 1));
        return cmd::seq(std::move(items));
      }
      case 4: return cmd::if_("", random_pred(), tree(depth - 1), tree(depth - 1));
      default: return cmd::while_("", random_pred(), tree(depth - 1));
    }
  }

  Expr var(std::uint32_t i) const { return ex::var(first_ + i, "v" + std::to_string(i)); }

  Expr random_pred() {
    auto v = var(static_cast<std::uint32_t>(rng_() % nvars_));
    return rng_() % 2 ? v : ex::not_(v);
  }

  Update random_update() {
    auto i = static_cast<std::uint32_t>(rng_() % nvars_);
    return assign(first_ + i, "v" + std::to_string(i), random_pred());
  }

  void set_first(VarId first) { first_ = first; }

 private:
  std::mt19937_64& rng_;
  std::uint32_t nvars_;
  VarId first_ = 0;
};

/// Structural shape of a command with guards and updates erased.
inline std::string shape(const Cmd& c) {
  std::string out;
  switch (c->kind) {
    case CmdKind::Skip: return "S";
    case CmdKind::Basic:
    case CmdKind::Await: out = "A"; break;
    case CmdKind::Seq: out = "Q"; break;
    case CmdKind::If: out = "I"; break;
    case CmdKind::While: out = "W"; break;
  }
  out += "(" + c->label + ";";
  for (const auto& ch : c->children) out += shape(ch) + ",";
  return out + ")";
}

struct Counts {
  std::size_t assertions = 0;
  std::size_t actions = 0;
};

// Counts straight off the command tree: every Basic/Await/If/While is an
// annotated point; Basic/Await contribute one action per branch, tests one.
inline void count(const Cmd& c, Counts& n) {
  switch (c->kind) {
    case CmdKind::Skip: return;
    case CmdKind::Seq: break;
    case CmdKind::Basic:
    case CmdKind::Await:
      ++n.assertions;
      n.actions += c->branches.size();
      break;
    case CmdKind::If:
    case CmdKind::While:
      ++n.assertions;
      ++n.actions;
      break;
  }
  for (const auto& ch : c->children) count(ch, n);
}

inline std::size_t closed_form_interference(const System& sys) {
  std::vector<Counts> per(sys.tasks.size());
  for (std::size_t t = 0; t < sys.tasks.size(); ++t) count(sys.tasks[t].body, per[t]);
  std::size_t total = 0;
  for (std::size_t x = 0; x < per.size(); ++x)
    for (std::size_t y = 0; y < per.size(); ++y)
      if (x != y) total += per[x].assertions * per[y].actions;
  return total;
}

}  // namespace support
