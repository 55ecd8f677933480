#include <doctest.h>

#include <random>

#include "og/command.hpp"
#include "og/hw.hpp"
#include "support.hpp"

using namespace og;
using support::bit;

namespace {

Value random_value(std::mt19937_64& rng, int depth) {
  switch (rng() % (depth > 0 ? 8 : 3)) {
    case 0: return Value::boolean(rng() % 2);
    case 1: return Value::nat(static_cast<std::uint32_t>(rng() % 50));
    case 2: return Value::set(rng());
    case 3: {
      std::vector<Value> items;
      auto n = rng() % 4;
      auto elem = static_cast<std::uint32_t>(rng() % 7);
      for (std::size_t i = 0; i < n; ++i) items.push_back(Value::nat(elem + static_cast<std::uint32_t>(i)));
      return Value::stack(items);
    }
    case 4: return Value::none();
    case 5: return Value::some(random_value(rng, depth - 1));
    case 6: return Value::pair(random_value(rng, depth - 1), random_value(rng, depth - 1));
    default: {
      std::vector<std::pair<std::uint32_t, Value>> entries;
      for (std::uint32_t k = 0; k < 5; ++k)
        if (rng() % 2) entries.emplace_back(k, Value::boolean(rng() % 2));
      return Value::map(entries);
    }
  }
}

}  // namespace

TEST_SUITE("kernel") {
  TEST_CASE("routine classification partitions the routine range") {
    for (std::uint32_t users = 1; users <= 4; ++users)
      for (std::uint32_t ints = 0; ints <= 4; ++ints) {
        auto f = support::hw_fixture(users, ints);
        for (RoutineId r = 0; r < f.ctx.routine_count(); ++r) {
          int classes = f.ctx.is_user(r) + f.ctx.is_interrupt(r) + f.ctx.is_svc(r);
          CHECK(classes == 1);
        }
        CHECK(f.ctx.is_svc(0));
        CHECK(f.ctx.is_svc(1));
        CHECK(f.ctx.is_user(2));
        CHECK(f.ctx.routine_count() == 2 + users + ints);
      }
  }

  TEST_CASE("eval_pred examples") {
    auto f = support::hw_fixture(2, 2);
    EvalEnv env{&f.ctx};
    auto s = support::with(f, f.init, {{"AT", Value::nat(2)}});
    CHECK(eval_pred(ex::eq(hw::AT(), ex::num(2)), s, env));

    auto s2 = support::with(f, f.init, {{"EIT", Value::set_of({1, 3})}, {"AT", Value::nat(1)}, {"ATStack", Value::stack({})}});
    auto enabled = ex::diff(ex::diff(hw::EIT(), ex::set_lit({hw::AT()})), ex::to_set(hw::ATStack()));
    CHECK_FALSE(eval_pred(ex::member(hw::svc_a(), enabled), s2, env));

    // A user may be interrupted by every non-user routine.
    auto s3 = support::with(f, f.init, {{"AT", Value::nat(user0)}});
    CHECK(eval_pred(ex::member(hw::svc_a(), ex::policy(hw::AT())), s3, env));
  }

  TEST_CASE("evaluation errors") {
    auto f = support::hw_fixture(1, 0);
    EvalEnv env{&f.ctx};
    auto check_kind = [&](const Expr& e, EvalErrorKind k) {
      try {
        eval(e, f.init, env);
        FAIL("expected an evaluation error");
      } catch (const EvalError& err) {
        CHECK(err.kind() == k);
      }
    };
    check_kind(ex::head(hw::ATStack()), EvalErrorKind::EmptyStackAccess);
    check_kind(ex::tail(hw::ATStack()), EvalErrorKind::EmptyStackAccess);
    check_kind(ex::the(ex::none()), EvalErrorKind::AbsentOptional);
    check_kind(ex::member(hw::SVCaReq(), hw::EIT()), EvalErrorKind::TypeMismatch);
  }

  TEST_CASE("apply_update examples") {
    auto f = support::hw_fixture(2, 1);
    EvalEnv env{&f.ctx};
    auto s = support::with(f, f.init, {{"AT", Value::nat(2)}, {"ATStack", Value::stack({})}});
    UpdateList u{assign(hwvar::ATStack, "ATStack", ex::push(hw::AT(), hw::ATStack())),
                 assign(hwvar::AT, "AT", ex::num(0))};
    auto t = apply_update(u, s, env);
    CHECK(support::get(f, t, "AT") == Value::nat(0));
    CHECK(support::get(f, t, "ATStack") == Value::nat_stack({2}));

    auto same = apply_update({assign(hwvar::SVCaReq, "SVCaReq", ex::ff())}, s, env);
    CHECK(same == s);
    CHECK(same.hash() == s.hash());

    VarTable vars;
    auto E = vars.declare("E", Type::set(4));
    auto Et = vars.declare("E_tmp", Type::set(4));
    GlobalState g{{Value::set_of({0, 1}), Value::set_of({0})}};
    auto r = apply_update({assign(E, "E", ex::diff(ex::var(E, "E"), ex::var(Et, "E_tmp")))}, g, env);
    CHECK(r[E] == Value::set_of({1}));
  }

  TEST_CASE("duplicate targets and domain violations are rejected") {
    auto f = support::hw_fixture(1, 0);
    EvalEnv env{&f.ctx};
    UpdateList dup{assign(hwvar::AT, "AT", ex::num(0)), assign(hwvar::AT, "AT", ex::num(1))};
    CHECK_THROWS_AS(apply_update(dup, f.init, env), EvalError);
    UpdateList big{assign(hwvar::AT, "AT", ex::num(40))};
    try {
      apply_update(big, f.init, env, &f.vars);
      FAIL("expected DomainViolation");
    } catch (const EvalError& e) {
      CHECK(e.kind() == EvalErrorKind::DomainViolation);
    }
  }

  TEST_CASE("updates are simultaneous and pure") {
    std::mt19937_64 rng(11);
    VarTable vars;
    for (int i = 0; i < 5; ++i) vars.declare("n" + std::to_string(i), Type::nat(8));
    Context ctx;
    EvalEnv env{&ctx};
    for (int iter = 0; iter < 500; ++iter) {
      GlobalState s;
      for (int i = 0; i < 5; ++i) s.values.push_back(Value::nat(static_cast<std::uint32_t>(rng() % 8)));
      const auto frozen = s;
      // Disjoint targets, right-hand sides reading arbitrary variables.
      std::vector<VarId> targets{0, 1, 2, 3, 4};
      std::shuffle(targets.begin(), targets.end(), rng);
      targets.resize(1 + rng() % 5);
      UpdateList u;
      for (auto t : targets) {
        auto src = static_cast<VarId>(rng() % 5);
        u.push_back(assign(t, vars[t].name, ex::var(src, vars[src].name)));
      }
      auto all = apply_update(u, s, env);
      CHECK(s == frozen);
      auto expect = frozen;
      for (const auto& up : u) expect[up.target] = apply_update({up}, frozen, env)[up.target];
      CHECK(all == expect);
    }
  }

  TEST_CASE("value equality, hashing and encoding agree") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
      auto a = random_value(rng, 3);
      auto b = random_value(rng, 3);
      if (a == b) CHECK(a.hash() == b.hash());
      std::string ea, eb;
      a.encode(ea);
      b.encode(eb);
      CHECK((ea == eb) == (a == b));
      std::size_t pos = 0;
      CHECK(Value::decode(ea, pos) == a);
      CHECK(pos == ea.size());
    }
  }

  TEST_CASE("atomic_points examples") {
    auto a = cmd::basic("a", {});
    auto b = cmd::basic("b", {});
    auto c = cmd::basic("c", {});
    CHECK(atomic_points(cmd::seq({a, b, c})).size() == 3);
    CHECK(atomic_points(cmd::skip()).empty());
    auto w = atomic_points(cmd::while_("w", ex::tt(), b));
    REQUIRE(w.size() == 2);
    CHECK(w[0].label == "w");
    CHECK(w[1].label == "b");
  }

  TEST_CASE("compile rejects duplicate labels") {
    auto a = cmd::basic("x", {});
    CHECK_THROWS_AS(compile(cmd::seq({a, a})), ConfigError);
  }

  TEST_CASE("while graph loops back to its test") {
    auto g = compile(cmd::while_("w", ex::tt(), cmd::basic("b", {})));
    auto w = g.find("w");
    auto b = g.find("b");
    CHECK(g.entry == w);
    CHECK(g.points[w].kind == PointKind::Test);
    CHECK(g.points[w].next == b);
    CHECK(g.points[w].next_false == kEnd);
    CHECK(g.points[b].next == w);
  }
}
