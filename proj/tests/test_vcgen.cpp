#include <doctest.h>

#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "og/echronos.hpp"
#include "og/explorer.hpp"
#include "og/frontend.hpp"
#include "og/hw.hpp"
#include "og/vcgen.hpp"
#include "support.hpp"

using namespace og;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

System toy() { return parse_model(slurp(OG_SOURCE_DIR "/tests/corpus/toy.og")).system; }

System desk() {
  SystemConfig c;
  c.nb_users = 2;
  c.nb_ints = 1;
  c.nb_events = 1;
  return echronos::build_system(c);
}

System assert_everywhere(const System& sys, const Expr& p) {
  System out = sys;
  std::function<Cmd(const Cmd&)> walk = [&](const Cmd& c) -> Cmd {
    auto n = std::make_shared<Command>(*c);
    if (c->kind != CmdKind::Seq && c->kind != CmdKind::Skip) n->assertion = p;
    for (auto& ch : n->children) ch = walk(ch);
    return n;
  };
  for (auto& t : out.tasks) t.body = walk(t.body);
  out.finalize();
  return out;
}

Expr wp(const Expr& post, const UpdateList& eff) {
  std::vector<std::pair<VarId, Expr>> sub;
  for (const auto& u : eff) sub.emplace_back(u.target, u.rhs);
  return substitute(post, sub);
}

class PredGen {
 public:
  explicit PredGen(std::mt19937_64& rng) : rng_(rng) {}

  Expr gen(int depth) {
    switch (rng_() % (depth <= 0 ? 3 : 8)) {
      case 0: {
        auto i = static_cast<VarId>(1 + rng_() % 3);
        return ex::var(i, "b" + std::to_string(i));
      }
      case 1: return ex::eq(ex::var(0, "AT"), ex::num(static_cast<std::uint32_t>(rng_() % 4)));
      case 2: return rng_() % 2 ? ex::tt() : ex::ff();
      case 3: return ex::not_(gen(depth - 1));
      case 4: return ex::and_(gen(depth - 1), gen(depth - 1));
      case 5: return ex::or_(gen(depth - 1), gen(depth - 1));
      case 6: return ex::implies(gen(depth - 1), gen(depth - 1));
      default: return ex::and_({gen(depth - 1), gen(depth - 1), gen(depth - 1)});
    }
  }

 private:
  std::mt19937_64& rng_;
};

}  // namespace

TEST_SUITE("vcgen") {
  TEST_CASE("toy: 18 interference VCs, all trivial and unsatisfiable") {
    auto sys = annotate_guards(toy());
    auto vcs = gen_interference_vcs(sys);
    CHECK(vcs.size() == 18);
    CHECK(support::closed_form_interference(sys) == 18);
    auto st = simplify_trivial(vcs);
    CHECK(st.at_contradictions == 18);
    for (auto vc : vcs) {
      CHECK(vc.status == VcStatus::Trivial);
      CHECK(vc.owner_task != vc.actor_task);
      vc.status = VcStatus::Pending;
      VC unsat;
      unsat.antecedent = vc.antecedent;
      unsat.consequent = ex::ff();
      unsat.consequent_wp = ex::ff();
      discharge_finite(unsat, sys);
      CHECK(unsat.status == VcStatus::Discharged);
    }
  }

  TEST_CASE("toy annotations are AT guards") {
    auto sys = annotate_guards(toy());
    for (const auto& g : sys.graphs) {
      REQUIRE(g.points.size() == 3);
      for (const auto& p : g.points) CHECK(render(p.assertion).rfind("AT = ", 0) == 0);
    }
  }

  TEST_CASE("a single task has no interference VCs") {
    auto sys = toy();
    sys.tasks.pop_back();
    sys.finalize();
    CHECK(gen_interference_vcs(annotate_guards(sys)).empty());
    CHECK_THROWS_AS(gen_interference_vcs(sys), ConfigError);
  }

  TEST_CASE("interference VC count matches the closed form on presets") {
    for (std::uint32_t users : {1u, 2u, 3u}) {
      SystemConfig c;
      c.nb_users = users;
      c.nb_ints = users - 1;
      c.nb_events = 1;
      auto sys = annotate_guards(echronos::build_system(c));
      CHECK(gen_interference_vcs(sys).size() == support::closed_form_interference(sys));
    }
    CHECK(support::closed_form_interference(desk()) == 1716);
  }

  TEST_CASE("has_at_contradiction") {
    auto at = ex::var(hwvar::AT, "AT");
    CHECK(has_at_contradiction(ex::and_(ex::eq(at, ex::num(2)), ex::eq(at, ex::num(3)))));
    CHECK_FALSE(has_at_contradiction(ex::and_(ex::eq(at, ex::num(2)), ex::eq(at, ex::num(2)))));
    CHECK_FALSE(has_at_contradiction(ex::eq(at, ex::num(2))));
  }

  TEST_CASE("discharge_finite verdicts") {
    auto sys = toy();
    auto a = ex::var(*sys.vars.find("a"), "a");
    auto b = ex::var(*sys.vars.find("b"), "b");
    auto mk = [&](Expr ante, Expr cons, UpdateList eff) {
      VC vc;
      vc.antecedent = std::move(ante);
      vc.consequent = std::move(cons);
      vc.effect = std::move(eff);
      vc.consequent_wp = wp(vc.consequent, vc.effect);
      discharge_finite(vc, sys);
      return vc;
    };
    CHECK(mk(a, a, {}).status == VcStatus::Discharged);
    CHECK(mk(ex::tt(), a, {assign(*sys.vars.find("a"), "a", ex::tt())}).status == VcStatus::Discharged);
    auto f = mk(a, b, {});
    CHECK(f.status == VcStatus::Failed);
    REQUIRE(f.witness);
    CHECK((*f.witness)[*sys.vars.find("a")] == Value::boolean(true));
    CHECK((*f.witness)[*sys.vars.find("b")] == Value::boolean(false));
    CHECK(mk(ex::and_(a, ex::not_(a)), b, {}).status == VcStatus::Discharged);
    auto tight = VC{};
    tight.antecedent = ex::tt();
    tight.consequent = ex::and_(a, b);
    tight.consequent_wp = tight.consequent;
    discharge_finite(tight, sys, 1);
    CHECK(tight.status == VcStatus::Unknown);
  }

  TEST_CASE("simplify preserves meaning on every state") {
    std::mt19937_64 rng(77);
    PredGen gen(rng);
    Context ctx;
    ctx.nb_users = 2;
    for (int iter = 0; iter < 400; ++iter) {
      auto e = gen.gen(4);
      auto s = simplify(e, ctx);
      auto c = canonicalize(e, ctx);
      for (std::uint32_t at = 0; at < 4; ++at)
        for (std::uint32_t bits = 0; bits < 8; ++bits) {
          GlobalState g{{Value::nat(at), Value::boolean(bits & 1), Value::boolean(bits & 2), Value::boolean(bits & 4)}};
          EvalEnv env{&ctx};
          bool want = eval_pred(e, g, env);
          CHECK(eval_pred(s, g, env) == want);
          CHECK(eval_pred(c, g, env) == want);
        }
    }
  }

  TEST_CASE("desk preset: trivial ratio and verdict invariance") {
    auto sys = desk();
    VcOptions on;
    auto with = run_vc_pipeline(sys, on);
    CHECK(with.interference.total == 1716);
    CHECK(static_cast<double>(with.interference.trivial) / static_cast<double>(with.interference.total) >= 0.90);
    VcOptions off;
    off.simplify = false;
    auto without = run_vc_pipeline(sys, off);
    CHECK(without.interference.trivial == 0);
    CHECK(failed_witnesses(sys, with.vcs) == failed_witnesses(sys, without.vcs));
    for (const auto& vc : with.vcs)
      if (vc.duplicate_of) {
        CHECK(vc.key() == with.vcs[*vc.duplicate_of].key());
        CHECK_FALSE(with.vcs[*vc.duplicate_of].duplicate_of);
      }
  }

  TEST_CASE("inductive invariants agree with exploration") {
    auto sys = desk();
    struct Case {
      Expr pred;
      bool inductive;
    };
    std::vector<Case> cases{
        {ex::not_(ex::member(ex::num(SVC_s), hw::EIT())), true},
        {ex::ne(ex::map_get(ex::var(*sys.vars.find("contexts"), "contexts"), ex::num(2)), ex::none()), true},
        {ex::eq(hw::ATStack(), ex::lit(Value::stack({}))), false},
    };
    for (const auto& c : cases) {
      auto annotated = assert_everywhere(sys, c.pred);
      VcOptions opts;
      auto r = run_vc_pipeline(annotated, opts);
      std::size_t failed = r.interference.failed + r.sequential.failed;
      CHECK_MESSAGE((failed == 0) == c.inductive, render(c.pred));
      auto rep = explore(sys, {{"P", c.pred}});
      CHECK(rep.violations.empty() == c.inductive);
    }
  }
}
