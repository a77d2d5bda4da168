#include <gtest/gtest.h>

#include <limits>

#include "asp/congruence.hpp"
#include "asp/dynamics.hpp"
#include "asp/surface.hpp"

namespace asp {
namespace {

Process P(const char* text) {
  ParseOptions o;
  o.allow_free_channels = true;
  o.allow_free_names = true;
  auto p = parse_process(text, o);
  EXPECT_TRUE(p.ok()) << text;
  return p.ok() ? p.value() : inaction();
}

Value eval(const Expression& e) {
  auto v = eval_expr(e);
  EXPECT_TRUE(v.ok());
  return v.ok() ? v.value() : Value{};
}

Expression I(std::int64_t v) { return Expression::integer(v); }
Expression bin(BinOp op, Expression a, Expression b) { return Expression::binary(op, a, b); }

// Two's complement wrap computed through unsigned arithmetic.
std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}

TEST(Eval, Arithmetic) {
  EXPECT_EQ(eval(bin(BinOp::kAdd, I(2), I(3))), Value{std::int64_t{5}});
  EXPECT_EQ(eval(bin(BinOp::kSub, I(2), I(3))), Value{std::int64_t{-1}});
  EXPECT_EQ(eval(bin(BinOp::kDiv, I(10), I(2))), Value{std::int64_t{5}});
  EXPECT_EQ(eval(bin(BinOp::kDiv, I(-7), I(2))), Value{std::int64_t{-3}});
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  constexpr auto kMin = std::numeric_limits<std::int64_t>::min();
  EXPECT_EQ(eval(bin(BinOp::kAdd, I(kMax), I(1))), Value{wrap_add(kMax, 1)});
  EXPECT_EQ(eval(bin(BinOp::kDiv, I(kMin), I(-1))), Value{kMin});
}

TEST(Eval, EqualityAndConjunction) {
  EXPECT_EQ(eval(bin(BinOp::kEq, Expression::string("ok"), Expression::string("ok"))), Value{true});
  EXPECT_EQ(eval(bin(BinOp::kEq, I(1), I(2))), Value{false});
  EXPECT_EQ(eval(bin(BinOp::kAnd, Expression::boolean(true), Expression::boolean(false))), Value{false});
}

TEST(Eval, Errors) {
  auto z = eval_expr(bin(BinOp::kDiv, I(1), I(0)));
  ASSERT_FALSE(z.ok());
  EXPECT_EQ(z.error().kind, EvalError::Kind::kDivisionByZero);
  auto t = eval_expr(bin(BinOp::kAdd, I(1), Expression::boolean(true)));
  ASSERT_FALSE(t.ok());
  EXPECT_EQ(t.error().kind, EvalError::Kind::kTypeMismatch);
  auto u = eval_expr(Expression::var(name("v")));
  ASSERT_FALSE(u.ok());
  EXPECT_EQ(u.error().kind, EvalError::Kind::kUnboundVariable);
}

std::vector<std::string> summaries(const Process& p) {
  std::vector<std::string> out;
  for (const auto& r : enabled_redexes(p)) out.push_back(r.summary());
  return out;
}

Process fire(const Process& p, const std::string& summary) {
  for (const auto& r : enabled_redexes(p)) {
    if (r.summary() == summary) return step(p, r);
  }
  ADD_FAILURE() << "no redex " << summary << " in " << print(p);
  return p;
}

TEST(Dynamics, OpenCreatesFreshSessionAndBumpsLocations) {
  auto p = P("loc l [ accept a(x). close x ] | loc m [ request a(y). close y ]");
  EXPECT_EQ(summaries(p), (std::vector<std::string>{"r:Open a"}));
  auto q = fire(p, "r:Open a");
  EXPECT_EQ(print(q), "new(k#1) (loc l @1 [ close k#1+ ] | loc m @1 [ close k#1- ])");
}

TEST(Dynamics, FreshIdIsAboveEveryExistingId) {
  auto p = P("close k#4+ | accept a(x). close x | request a(y). close y");
  auto q = fire(p, "r:Open a");
  EXPECT_NE(print(q).find("k#5+"), std::string::npos) << print(q);
}

TEST(Dynamics, ReplicatedAcceptPersists) {
  auto p = P("accept* a(x). close x | request a(y). close y");
  auto q = fire(p, "r:ROpen a");
  EXPECT_EQ(print(q), "new(k#1) (accept* a(x). close x | close k#1+ | close k#1-)");
}

TEST(Dynamics, CommunicationSubstitutesValues) {
  auto p = P("send k#1+(4 + 1, true). close k#1+ | recv k#1-(u, v). send k#2+(u). close k#1-");
  EXPECT_EQ(summaries(p), (std::vector<std::string>{"r:I/O k#1 (5, true)"}));
  auto q = fire(p, "r:I/O k#1 (5, true)");
  EXPECT_EQ(print(q), "close k#1+ | send k#2+(5). close k#1-");
}

TEST(Dynamics, ArityMismatchIsNoRedex) {
  EXPECT_TRUE(summaries(P("send k#1+(1, 2). 0 | recv k#1-(u). 0")).empty());
}

TEST(Dynamics, DelegationMovesAnnotations) {
  auto p = P("loc l @2 [ throw k#1+(k#2-). close k#1+ ] | loc m @1 [ catch k#1-(y). close y. close k#1- ] "
             "| close k#2+");
  auto q = fire(p, "r:Pass k#1 k#2-");
  EXPECT_EQ(print(q), "close k#2+ | loc l @1 [ close k#1+ ] | loc m @2 [ close k#2-. close k#1- ]");
  EXPECT_EQ(recount_annotations(q), q);
}

TEST(Dynamics, SelectionPicksArm) {
  auto p = P("sel k#1+.ok; close k#1+ | case k#1- { fail: 0 || ok: close k#1- }");
  auto q = fire(p, "r:Sel k#1 ok");
  EXPECT_EQ(print(q), "close k#1+ | close k#1-");
  EXPECT_TRUE(summaries(P("sel k#1+.no; 0 | case k#1- { ok: 0 }")).empty());
}

TEST(Dynamics, ComputedSelection) {
  auto p = P("sel k#1+.(\"fail\"); 0 | case k#1- { fail: close k#2+ || ok: 0 }");
  EXPECT_EQ(print(fire(p, "r:Sel k#1 fail")), "close k#2+");
}

TEST(Dynamics, CloseDecrementsAndDropsRestriction) {
  auto p = P("new(k#1) (loc l @1 [ close k#1+ ] | loc m @1 [ close k#1- ])");
  auto q = fire(p, "r:Close k#1");
  EXPECT_TRUE(congruent(q, P("loc l [] | loc m []"))) << print(q);
}

TEST(Dynamics, Conditionals) {
  EXPECT_EQ(print(fire(P("if 1 = 1 then close k#1+ else 0"), "r:IfTr")), "close k#1+");
  EXPECT_EQ(print(fire(P("if 1 = 2 then close k#1+ else 0"), "r:IfFa")), "0");
  // A guard that does not evaluate is stuck.
  EXPECT_TRUE(summaries(P("if 1 / 0 = 1 then 0 else 0")).empty());
}

TEST(Dynamics, UpdateReplacesLocationAndSubstitutesContent) {
  auto p = P("loc w [ accept* a(x). close x ] | update w { loc w [ $X | $X ] }");
  auto q = fire(p, "r:Upd w");
  EXPECT_EQ(print(q), "loc w [ accept* a(x). close x | accept* a(x). close x ]");
}

TEST(Dynamics, UpdateReachesNestedLocations) {
  auto q = P("loc a [ loc b [ accept* s(x). close x ] ] | update b { 0 }");
  EXPECT_EQ(print(fire(q, "r:Upd b")), "loc a []");
}

TEST(Dynamics, UpdateGatedByAnnotation) {
  // A session inside l blocks its update until the session closes.
  auto p = P("loc l [ accept a(x). close x ] | request a(y). close y | update l { 0 }");
  auto before = summaries(p);
  EXPECT_EQ(before, (std::vector<std::string>{"r:Open a", "r:Upd l"}));
  auto opened = fire(p, "r:Open a");
  EXPECT_EQ(summaries(opened), (std::vector<std::string>{"r:Close k#1"}));
  auto closed = fire(opened, "r:Close k#1");
  EXPECT_EQ(summaries(closed), (std::vector<std::string>{"r:Upd l"}));
}

TEST(Dynamics, UpdateInsideItsOwnLocationIsNotARedex) {
  EXPECT_TRUE(summaries(P("loc l [ update l { 0 } ]")).empty());
}

TEST(Dynamics, RedexOrderIsByRuleThenPath) {
  auto p = P("if true then 0 else 0 | close k#1+ | close k#1- | send k#2+(1). 0 | recv k#2-(x). 0");
  EXPECT_EQ(summaries(p), (std::vector<std::string>{"r:I/O k#2 (1)", "r:Close k#1", "r:IfTr"}));
}

TEST(Dynamics, StepRejectsForeignRedex) {
  auto p = P("close k#1+ | close k#1-");
  auto r = enabled_redexes(p).at(0);
  EXPECT_THROW(step(P("close k#2+ | close k#2-"), r), StuckRedex);
}

TEST(Dynamics, ContextOfSite) {
  auto p = P("loc l [ close k#1+ ] | close k#1-");
  auto r = enabled_redexes(p).at(0);
  auto c = context_of(p, r.participants[0]);
  EXPECT_EQ(c.spine(), (std::vector<LocationName>{loc("l")}));
  EXPECT_TRUE(congruent(plug(c, r.participants[0].subterm), p));
}

TEST(Dynamics, RecountCountsDistinctEndpoints) {
  auto p = P("loc l [ send k#1+(1). close k#1+ | close k#2- ] | loc m @5 [ accept a(x). close x ]");
  EXPECT_EQ(print(recount_annotations(p)),
            "loc l @2 [ send k#1+(1). close k#1+ | close k#2- ] | loc m [ accept a(x). close x ]");
}

TEST(Dynamics, Termination) {
  EXPECT_TRUE(is_terminated(P("0")));
  EXPECT_TRUE(is_terminated(P("accept* a(x). close x | loc l [ loc m [] ]")));
  EXPECT_FALSE(is_terminated(P("accept a(x). close x")));
  EXPECT_FALSE(is_terminated(P("new(k#1) (close k#1+ | close k#1-)")));
}

TEST(Run, LeftmostRunToTermination) {
  auto p = P("accept a(x). recv x(v). close x | request a(y). send y(3). close y");
  auto t = run(p, Scheduler::leftmost(), 100);
  EXPECT_EQ(t.status, RunStatus::kTerminated);
  ASSERT_EQ(t.steps.size(), 3U);
  EXPECT_EQ(t.steps[0].redex.summary(), "r:Open a");
  EXPECT_EQ(t.steps[1].redex.summary(), "r:I/O k#1 (3)");
  EXPECT_EQ(t.steps[2].redex.summary(), "r:Close k#1");
  EXPECT_EQ(t.steps[2].index, 3U);
  EXPECT_TRUE(t.final_state().is<Inaction>());
}

TEST(Run, StuckAndFuel) {
  auto stuck = run(P("close k#1+ | close k#2-"), Scheduler::leftmost(), 10);
  EXPECT_EQ(stuck.status, RunStatus::kStuck);
  EXPECT_TRUE(stuck.steps.empty());
  auto p = P("accept a(x). close x | request a(y). close y");
  auto none = run(p, Scheduler::leftmost(), 0);
  EXPECT_EQ(none.status, RunStatus::kFuelExhausted);
  EXPECT_TRUE(none.steps.empty());
  EXPECT_EQ(run(p, Scheduler::leftmost(), 2).status, RunStatus::kTerminated);
}

TEST(Run, RandomSchedulerIsReproducible) {
  auto p = P("accept* a(x). recv x(v). close x | request a(y). send y(1). close y "
             "| request a(y). send y(2). close y | request a(y). send y(3). close y");
  auto a = run(p, Scheduler::random(42), 100);
  auto b = run(p, Scheduler::random(42), 100);
  EXPECT_EQ(trace_jsonl(a, true), trace_jsonl(b, true));
  EXPECT_EQ(a.scheduler_seed, 42U);
  bool differs = false;
  for (std::uint64_t s = 0; s < 20 && !differs; ++s) {
    differs = trace_jsonl(run(p, Scheduler::random(s), 100), false) != trace_jsonl(a, false);
  }
  EXPECT_TRUE(differs);
}

TEST(Run, InteractiveScheduler) {
  auto p = P("if true then 0 else 0 | close k#1+ | close k#1-");
  Scheduler s;
  s.policy = Scheduler::Policy::kInteractive;
  s.pick = [](const Process&, const std::vector<Redex>& rs) { return rs.size() - 1; };
  auto t = run(p, s, 10);
  ASSERT_EQ(t.steps.size(), 2U);
  EXPECT_EQ(t.steps[0].redex.summary(), "r:IfTr");
}

TEST(Run, TraceFormat) {
  auto t = run(P("close k#1+ | loc l @1 [ close k#1- ]"), Scheduler::leftmost(), 10);
  EXPECT_EQ(trace_jsonl(t, false),
            "{\"index\":1,\"rule\":\"r:Close\",\"sites\":[[],[\"l\"]],\"redex\":\"r:Close k#1\"}\n"
            "{\"status\":\"terminated\",\"steps\":1,\"seed\":0}\n");
}

}  // namespace
}  // namespace asp
