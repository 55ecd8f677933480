#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace og;
using support::bit;
using support::fire;
using support::get;
using support::with;

namespace {

std::uint64_t iprime(const Context& c) { return bit(SVC_a) | c.interrupts_mask(); }

// Hand-derived policy: users admit every non-user routine; others admit
// strictly higher default priority (SVCs 0, k-th interrupt 1 + k).
bool admits(const Context& c, RoutineId r, RoutineId y) {
  if (c.is_user(y)) return false;
  auto prio = [&](RoutineId x) { return x < user0 ? 0u : 1 + (x - user0 - c.nb_users); };
  return c.is_user(r) || prio(y) > prio(r);
}

}  // namespace

TEST_SUITE("hw") {
  TEST_CASE("interrupt masking") {
    auto f = support::hw_fixture(2, 4);
    auto s = with(f, f.init, {{"EIT", Value::set_of({0, 1, 5})}});
    CHECK(get(f, *fire(hw::int_disable(bit(1)), s, f.ctx), "EIT") == Value::set_of({0, 5}));
    CHECK(get(f, *fire(hw::int_disable(0), s, f.ctx), "EIT") == Value::set_of({0, 1, 5}));

    auto ip = iprime(f.ctx);
    auto full = with(f, f.init, {{"EIT", Value::set(ip)}});
    CHECK(get(f, *fire(hw::svca_disable(), full, f.ctx), "EIT") == Value::set(f.ctx.interrupts_mask()));

    auto s0 = with(f, f.init, {{"EIT", Value::set_of({0})}});
    CHECK(get(f, *fire(hw::int_enable(bit(1)), s0, f.ctx), "EIT") == Value::set_of({0, 1}));
    CHECK(get(f, *fire(hw::int_enable(bit(0)), s0, f.ctx), "EIT") == Value::set_of({0}));
    auto noa = with(f, f.init, {{"EIT", Value::set(f.ctx.interrupts_mask())}});
    CHECK(get(f, *fire(hw::svca_enable(), noa, f.ctx), "EIT") == Value::set(ip));
  }

  TEST_CASE("itake examples") {
    auto f = support::hw_fixture(2, 4);  // interrupts 4..7
    auto s = with(f, f.init, {{"AT", Value::nat(2)}, {"ATStack", Value::stack({})}, {"EIT", Value::set(iprime(f.ctx))}});
    auto t = fire(hw::itake(5, HwVariant::Arm), s, f.ctx);
    REQUIRE(t);
    CHECK(get(f, *t, "AT") == Value::nat(5));
    CHECK(get(f, *t, "ATStack") == Value::nat_stack({2}));

    auto masked = with(f, s, {{"EIT", Value::set(iprime(f.ctx) & ~bit(5))}});
    CHECK_FALSE(fire(hw::itake(5, HwVariant::Arm), masked, f.ctx));

    auto pending = with(f, s, {{"AT", Value::nat(6)}, {"ATStack", Value::nat_stack({5, 2})}});
    CHECK_FALSE(fire(hw::itake(5, HwVariant::Arm), pending, f.ctx));
  }

  TEST_CASE("svca_take examples") {
    auto f = support::hw_fixture(2, 1);
    auto s = with(f, f.init, {{"SVCaReq", Value::boolean(true)}, {"AT", Value::nat(2)}, {"EIT", Value::set(iprime(f.ctx))}});
    auto t = fire(hw::svca_take(HwVariant::Arm), s, f.ctx);
    REQUIRE(t);
    CHECK(get(f, *t, "SVCaReq") == Value::boolean(false));
    CHECK(get(f, *t, "AT") == Value::nat(1));
    CHECK(get(f, *t, "ATStack") == Value::nat_stack({2}));

    CHECK_FALSE(fire(hw::svca_take(HwVariant::Arm), with(f, s, {{"SVCaReq", Value::boolean(false)}}), f.ctx));
    auto masked = with(f, s, {{"EIT", Value::set(f.ctx.interrupts_mask())}});
    CHECK_FALSE(fire(hw::svca_take(HwVariant::Arm), masked, f.ctx));
  }

  TEST_CASE("iret on ARM") {
    auto f = support::hw_fixture(2, 4);
    auto s = with(f, f.init, {{"SVCaReq", Value::boolean(false)}, {"AT", Value::nat(5)}, {"ATStack", Value::nat_stack({2})}});
    auto t = fire(hw::iret(HwVariant::Arm), s, f.ctx);
    CHECK(get(f, *t, "AT") == Value::nat(2));
    CHECK(get(f, *t, "ATStack") == Value::stack({}));

    auto chain = with(f, s, {{"SVCaReq", Value::boolean(true)}, {"EIT", Value::set(iprime(f.ctx))}});
    auto u = fire(hw::iret(HwVariant::Arm), chain, f.ctx);
    CHECK(get(f, *u, "AT") == Value::nat(1));
    CHECK(get(f, *u, "SVCaReq") == Value::boolean(false));
    CHECK(get(f, *u, "ATStack") == Value::nat_stack({2}));
    // ARM does not restore the mask.
    CHECK(get(f, *u, "EIT") == Value::set(iprime(f.ctx)));

    auto empty = with(f, f.init, {{"ATStack", Value::stack({})}});
    try {
      fire(hw::iret(HwVariant::Arm), empty, f.ctx);
      FAIL("expected EmptyStackAccess");
    } catch (const EvalError& e) {
      CHECK(e.kind() == EvalErrorKind::EmptyStackAccess);
    }
  }

  TEST_CASE("iret on the generic variant restores the mask") {
    auto f = support::hw_fixture(2, 2, HwVariant::Generic);
    auto saved = Value::set_of({1, 4, 5});
    auto s = with(f, f.init,
                  {{"AT", Value::nat(4)},
                   {"ATStack", Value::nat_stack({2})},
                   {"EIT", Value::set_of({5})},
                   {"EITStack", Value::stack({saved})}});
    auto t = fire(hw::iret(HwVariant::Generic), s, f.ctx);
    CHECK(get(f, *t, "AT") == Value::nat(2));
    CHECK(get(f, *t, "EIT") == saved);
    CHECK(get(f, *t, "EITStack") == Value::stack({}));

    auto chain = with(f, s, {{"SVCaReq", Value::boolean(true)}});
    auto u = fire(hw::iret(HwVariant::Generic), chain, f.ctx);
    CHECK(get(f, *u, "AT") == Value::nat(1));
    CHECK(get(f, *u, "EIT") == saved);
    CHECK(get(f, *u, "ATStack") == Value::nat_stack({2}));
  }

  TEST_CASE("svc_now examples") {
    auto f = support::hw_fixture(2, 6);  // routines 0..9
    auto s = with(f, f.init, {{"AT", Value::nat(3)}, {"ATStack", Value::stack({})}});
    auto t = fire(hw::svc_now(HwVariant::Arm), s, f.ctx);
    CHECK(get(f, *t, "AT") == Value::nat(0));
    CHECK(get(f, *t, "ATStack") == Value::nat_stack({3}));

    auto deep = with(f, s, {{"ATStack", Value::nat_stack({7})}});
    CHECK(get(f, *fire(hw::svc_now(HwVariant::Arm), deep, f.ctx), "ATStack") == Value::nat_stack({3, 7}));

    auto back = fire(hw::iret(HwVariant::Arm), *t, f.ctx);
    CHECK(get(f, *back, "AT") == Value::nat(3));
    CHECK(get(f, *back, "ATStack") == Value::stack({}));

    auto c = hw::svc_now(HwVariant::Arm);
    auto reentry = with(f, s, {{"ATStack", Value::nat_stack({0, 3})}});
    CHECK(eval_pred(c->fault, reentry, EvalEnv{&f.ctx}));
    CHECK_FALSE(eval_pred(c->fault, s, EvalEnv{&f.ctx}));
  }

  TEST_CASE("svca_request then svca_take consumes the request once") {
    auto f = support::hw_fixture(1, 0);
    auto s = *fire(hw::svca_request(), f.init, f.ctx);
    CHECK(get(f, s, "SVCaReq") == Value::boolean(true));
    CHECK(get(f, *fire(hw::svca_request(), s, f.ctx), "SVCaReq") == Value::boolean(true));
    auto t = fire(hw::svca_take(HwVariant::Arm), s, f.ctx);
    REQUIRE(t);
    CHECK(get(f, *t, "SVCaReq") == Value::boolean(false));
    CHECK_FALSE(fire(hw::svca_take(HwVariant::Arm), *t, f.ctx));
  }

  TEST_CASE("default interrupt policy") {
    for (std::uint32_t users = 1; users <= 3; ++users)
      for (std::uint32_t ints = 0; ints <= 4; ++ints) {
        auto f = support::hw_fixture(users, ints);
        auto p = default_interrupt_policy(f.cfg);
        for (RoutineId r = 0; r < f.ctx.routine_count(); ++r)
          for (RoutineId y = 0; y < f.ctx.routine_count(); ++y) CHECK(p.allows(r, y) == admits(f.ctx, r, y));
        for (RoutineId r = user0 + users; r < f.ctx.routine_count(); ++r) CHECK_FALSE(p.allows(r, r));
        auto ip = iprime(f.ctx);
        CHECK((p.allowed[user0] & ip) == ip);
      }
    SystemConfig cfg;
    cfg.nb_users = 1;
    cfg.nb_ints = 1;
    cfg.priority = {{0, 0}, {1, 0}};
    CHECK_THROWS_AS(default_interrupt_policy(cfg), MissingPriority);
  }

  TEST_CASE("round trips over 1000 random well-formed states") {
    std::mt19937_64 rng(99);
    for (auto variant : {HwVariant::Arm, HwVariant::Generic}) {
      auto f = support::hw_fixture(2, 3, variant);
      int itake_cases = 0, svc_cases = 0;
      for (int guard = 0; guard < 200000 && (itake_cases < 1000 || svc_cases < 1000); ++guard) {
        auto s = support::random_hw_state(f, rng);
        if (svc_cases < 1000 && !eval_pred(hw::svc_now(variant)->fault, s, EvalEnv{&f.ctx})) {
          auto t = fire(hw::svc_now(variant), s, f.ctx);
          auto back = fire(hw::iret(variant), *t, f.ctx);
          CHECK(get(f, *back, "AT") == get(f, s, "AT"));
          CHECK(get(f, *back, "ATStack") == get(f, s, "ATStack"));
          if (variant == HwVariant::Generic) CHECK(*back == s);
          ++svc_cases;
        }
        auto i = user0 + f.ctx.nb_users + static_cast<RoutineId>(rng() % f.ctx.nb_ints);
        auto t = fire(hw::itake(i, variant), s, f.ctx);
        if (!t) continue;
        CHECK(get(f, *t, "AT") == Value::nat(i));
        CHECK(get(f, *t, "ATStack").as_stack().front() == get(f, s, "AT"));
        auto back = fire(hw::iret(variant), *t, f.ctx);
        CHECK(get(f, *back, "AT") == get(f, s, "AT"));
        CHECK(get(f, *back, "ATStack") == get(f, s, "ATStack"));
        if (variant == HwVariant::Generic) CHECK(get(f, *back, "EIT") == get(f, s, "EIT"));
        ++itake_cases;
      }
      CHECK(itake_cases == 1000);
      CHECK(svc_cases == 1000);
    }
  }

  TEST_CASE("disable then enable restores the mask") {
    std::mt19937_64 rng(3);
    auto f = support::hw_fixture(2, 4);
    auto ip = iprime(f.ctx);
    for (int i = 0; i < 500; ++i) {
      auto mask = rng() & ip;
      auto eit = rng() & ip;
      auto s = with(f, f.init, {{"EIT", Value::set(eit)}});
      auto t = fire(hw::int_enable(mask), *fire(hw::int_disable(mask), s, f.ctx), f.ctx);
      CHECK(get(f, *t, "EIT") == Value::set(eit | mask));
      if ((eit & mask) == mask) CHECK(*t == s);
    }
  }
}
