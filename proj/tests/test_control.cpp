#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace og;

namespace {

struct BoolTable {
  VarTable vars;
  Context ctx;

  BoolTable() {
    vars.declare("AT", Type::nat(6));
    for (int i = 0; i < 4; ++i) vars.declare("v" + std::to_string(i), Type::boolean());
    ctx.nb_users = 2;
    ctx.nb_ints = 2;
  }

  GlobalState random_state(std::mt19937_64& rng, std::uint32_t at) const {
    GlobalState s;
    s.values.push_back(Value::nat(at));
    for (int i = 0; i < 4; ++i) s.values.push_back(Value::boolean(rng() % 2));
    return s;
  }
};

bool has_owner_conjunct(const Expr& guard, RoutineId r) {
  if (!guard) return false;
  std::vector<Expr> cs;
  conjuncts(guard, cs);
  auto own = ex::eq(ex::var(hwvar::AT, "AT"), ex::num(r));
  for (const auto& c : cs)
    if (same(c, own)) return true;
  return false;
}

bool enabled(const Point& p, const GlobalState& s, const Context& ctx) {
  return !p.guard || eval_pred(p.guard, s, EvalEnv{&ctx});
}

}  // namespace

TEST_SUITE("control") {
  TEST_CASE("three basics become three owner awaits") {
    auto body = cmd::seq({cmd::basic("First", {}), cmd::basic("Second", {}), cmd::basic("Third", {})});
    auto c = control(2, body);
    REQUIRE(c->kind == CmdKind::Seq);
    REQUIRE(c->children.size() == 3);
    const char* labels[] = {"First", "Second", "Third"};
    for (int i = 0; i < 3; ++i) {
      const auto& ch = c->children[i];
      CHECK(ch->kind == CmdKind::Await);
      CHECK(ch->label == labels[i]);
      CHECK(render(ch->guard) == "AT = 2");
    }
  }

  TEST_CASE("skip is unchanged") {
    auto s = cmd::skip();
    CHECK(control(3, s) == s);
  }

  TEST_CASE("scheduler loop is guarded throughout") {
    VarTable vars;
    vars.declare("AT", Type::nat(4));
    auto t = vars.declare("t", Type::nat(4));
    auto loop = cmd::while_("loop", ex::tt(),
                            cmd::seq({cmd::basic("pick", {assign(t, "t", ex::num(2))}),
                                      cmd::basic("switch", {assign(hwvar::AT, "AT", ex::var(t, "t"))})}));
    auto g = compile(control(0, loop));
    REQUIRE(g.points.size() == 3);
    for (const auto& p : g.points) CHECK(has_owner_conjunct(p.guard, 0));
  }

  TEST_CASE("existing await guards are conjoined") {
    auto g = ex::var(1, "v0");
    auto c = control(3, cmd::await("w", g, {}));
    CHECK(render(c->guard) == "AT = 3 && v0");
  }

  TEST_CASE("random trees: count preservation, full guarding, semantic restriction") {
    std::mt19937_64 rng(2024);
    BoolTable tbl;
    support::CmdGen gen(rng, 4);
    gen.set_first(1);
    for (int iter = 0; iter < 500; ++iter) {
      auto c = gen.tree(6);
      auto r = static_cast<RoutineId>(rng() % 6);
      auto cc = control(r, c);
      auto before = atomic_points(c);
      auto after = atomic_points(cc);
      REQUIRE(before.size() == after.size());
      CHECK(support::shape(c) == support::shape(cc));
      for (std::size_t i = 0; i < after.size(); ++i) {
        CHECK(has_owner_conjunct(after[i].guard, r));
        CHECK(after[i].label == before[i].label);
      }
      if (before.empty()) continue;
      auto g0 = compile(c);
      auto g1 = compile(cc);
      REQUIRE(g0.points.size() == g1.points.size());
      for (int k = 0; k < 8; ++k) {
        auto other = static_cast<std::uint32_t>((r + 1 + rng() % 5) % 6);
        auto off = tbl.random_state(rng, other);
        auto on = tbl.random_state(rng, r);
        for (std::size_t p = 0; p < g1.points.size(); ++p) {
          CHECK_FALSE(enabled(g1.points[p], off, tbl.ctx));
          CHECK(enabled(g1.points[p], on, tbl.ctx) == enabled(g0.points[p], on, tbl.ctx));
          CHECK(g1.points[p].next == g0.points[p].next);
          CHECK(g1.points[p].next_false == g0.points[p].next_false);
        }
      }
    }
  }
}
