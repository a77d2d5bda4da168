#include <gtest/gtest.h>

#include "asp/congruence.hpp"
#include "asp/meta.hpp"
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

TEST(Kappa, ProcessesAndRedexes) {
  auto p = P("loc l [ send k#1+(1). 0 ] | recv k#1-(x). 0 | close k#2+");
  EXPECT_EQ(kappa_processes(p, 1).size(), 2U);
  EXPECT_EQ(kappa_processes(p, 2).size(), 1U);
  EXPECT_TRUE(kappa_processes(p, 3).empty());
  EXPECT_EQ(kappa_redex_channels(p), (std::vector<ChannelId>{1}));
  auto k = kappa_processes(p, 1);
  EXPECT_TRUE(is_kappa_redex(k[0].process, k[1].process) || is_kappa_redex(k[1].process, k[0].process));
}

TEST(Kappa, RedexShapes) {
  EXPECT_TRUE(is_kappa_redex(P("close k#1+"), P("close k#1-")));
  EXPECT_FALSE(is_kappa_redex(P("close k#1+"), P("close k#1+")));
  EXPECT_TRUE(is_kappa_redex(P("throw k#1+(k#2+). 0"), P("catch k#1-(y). 0")));
  EXPECT_TRUE(is_kappa_redex(P("sel k#1+.ok; 0"), P("case k#1- { ok: 0 }")));
  EXPECT_FALSE(is_kappa_redex(P("sel k#1+.no; 0"), P("case k#1- { ok: 0 }")));
  EXPECT_FALSE(is_kappa_redex(P("send k#1+(1). 0"), P("close k#1-")));
}

TEST(Errors, Definition) {
  EXPECT_FALSE(is_error(P("close k#1+ | close k#1-")));
  EXPECT_FALSE(is_error(P("close k#1+")));  // a lone κ-process is fine
  EXPECT_TRUE(is_error(P("send k#1+(1, 2). 0 | recv k#1-(x). 0")));
  EXPECT_TRUE(is_error(P("close k#1+ | close k#1- | close k#1+")));
  EXPECT_TRUE(is_error(P("sel k#1-.bad; 0 | case k#1+ { ok: 0 }")));
  EXPECT_TRUE(is_error(P("close k#1+ | send k#1-(1). 0")));
  EXPECT_EQ(error_channel(P("close k#2+ | send k#2-(1). 0 | close k#1+ | close k#1-")), 2U);
  EXPECT_FALSE(error_channel(P("0")).has_value());
}

TEST(Errors, UpToCongruence) {
  // The offending processes sit in different locations.
  EXPECT_TRUE(is_error(P("loc l [ close k#1+ ] | loc m [ loc n [ recv k#1-(x). 0 ] ]")));
}

TEST(Explore, SmallGraph) {
  auto p = P("accept a(x). close x | request a(y). close y | if true then 0 else 0");
  auto g = explore(p, {});
  // Open and IfTr interleave: 2 x 2 x ... diamond plus the close.
  EXPECT_EQ(g.states.size(), 6U);
  EXPECT_EQ(g.edges.size(), 7U);
  EXPECT_FALSE(g.truncated);
  EXPECT_EQ(g.root, 0U);
  for (std::size_t s = 1; s < g.states.size(); ++s) {
    auto path = g.path_to(s);
    EXPECT_EQ(path.size(), g.depth[s]);
    EXPECT_EQ(path.back().target, s);
  }
  for (std::size_t i = 1; i < g.edges.size(); ++i) EXPECT_LE(g.edges[i - 1].source, g.edges[i].source);
}

TEST(Explore, IndependentOfJobs) {
  auto p = P("accept* a(x). recv x(v). close x | request a(y). send y(1). close y "
             "| request a(y). send y(2). close y | request a(y). send y(3). close y");
  ExploreBounds one;
  ExploreBounds four;
  four.jobs = 4;
  auto g1 = explore(p, one);
  auto g4 = explore(p, four);
  ASSERT_EQ(g1.states.size(), g4.states.size());
  ASSERT_EQ(g1.edges.size(), g4.edges.size());
  for (std::size_t i = 0; i < g1.states.size(); ++i) EXPECT_EQ(term_key(g1.states[i]), term_key(g4.states[i]));
  for (std::size_t i = 0; i < g1.edges.size(); ++i) {
    EXPECT_EQ(g1.edges[i].target, g4.edges[i].target);
    EXPECT_EQ(g1.edges[i].redex.summary(), g4.edges[i].redex.summary());
  }
}

TEST(Explore, Truncation) {
  auto p = P("accept* a(x). recv x(v). close x | request a(y). send y(1). close y "
             "| request a(y). send y(2). close y");
  ExploreBounds b;
  b.max_states = 3;
  auto g = explore(p, b);
  EXPECT_TRUE(g.truncated);
  EXPECT_EQ(g.states.size(), 3U);
  ExploreBounds d;
  d.max_depth = 1;
  EXPECT_TRUE(explore(p, d).truncated);
  // Depth bound reached exactly on a terminal frontier is not truncation.
  ExploreBounds e;
  e.max_depth = 1;
  EXPECT_FALSE(explore(P("close k#1+ | close k#1-"), e).truncated);
}

TEST(PathCounts, MinMaxAndCycles) {
  auto p = P("if true then (close k#1+ | close k#1-) else 0 | if true then 0 else 0");
  auto g = explore(p, {});
  auto ifs = count_on_maximal_paths(g, [](const Edge& e) { return e.redex.rule == Rule::kIfTr; });
  ASSERT_TRUE(ifs.has_value());
  EXPECT_EQ(ifs->min, 2U);
  EXPECT_EQ(ifs->max, 2U);
  auto closes = count_on_maximal_paths(g, [](const Edge& e) { return e.redex.rule == Rule::kClose; });
  ASSERT_TRUE(closes.has_value());
  EXPECT_EQ(closes->min, 1U);
  ExploreBounds tiny;
  tiny.max_states = 2;
  EXPECT_FALSE(count_on_maximal_paths(explore(p, tiny), [](const Edge&) { return true; }).has_value());
}

FirstOrderEnv no_vars() { return {}; }

TEST(Verdicts, IllTypedRootFailsPrecondition) {
  auto p = P("new(k#1) (send k#1+(1, 2). close k#1+ | recv k#1-(x). close k#1-)");
  auto sr = check_subject_reduction(p, no_vars(), {}, {});
  EXPECT_EQ(sr.status, VerdictStatus::kPreconditionFailed);
  auto sf = check_safety(p, no_vars(), {}, {});
  EXPECT_EQ(sf.status, VerdictStatus::kPreconditionFailed);
  EXPECT_FALSE(sf.message.empty());
}

TEST(Verdicts, CorruptedAnnotationBreaksUpdateConsistency) {
  auto p = P("new(k#1) (loc l [ send k#1+(1). close k#1+ ] | recv k#1-(x). close k#1- | update l { 0 })");
  auto v = check_update_consistency(p, {});
  ASSERT_TRUE(v.violated());
  ASSERT_FALSE(v.witness.empty());
  EXPECT_LE(v.witness.size(), 3U);
  EXPECT_EQ(v.witness.back().redex.rule, Rule::kUpd);
  EXPECT_TRUE(replay(v.root, v.witness));
  // Tampering with the witness breaks the replay.
  auto bad = v.witness;
  bad.back().result = P("0");
  EXPECT_FALSE(replay(v.root, bad));
  std::string text = render(v);
  EXPECT_EQ(text.rfind("update-consistency: violated\n", 0), 0U) << text;
  EXPECT_NE(text.find("1. r:Upd l"), std::string::npos);
  EXPECT_EQ(text.find("time:"), std::string::npos);
  EXPECT_NE(render(v, true).find("time:"), std::string::npos);
}

TEST(Verdicts, CorrectAnnotationKeepsConsistency) {
  auto p = P("new(k#1) (loc l @1 [ send k#1+(1). close k#1+ ] | recv k#1-(x). close k#1- | update l { 0 })");
  auto v = check_update_consistency(p, {});
  EXPECT_TRUE(v.holds()) << render(v);
  EXPECT_GT(v.states, 3U);
}

TEST(Verdicts, TruncationIsIndeterminate) {
  auto p = P("accept* a(x). recv x(v). close x | request a(y). send y(1). close y "
             "| request a(y). send y(2). close y");
  ExploreBounds b;
  b.max_states = 2;
  auto v = check_update_consistency(p, b);
  EXPECT_EQ(v.status, VerdictStatus::kIndeterminate);
  EXPECT_TRUE(v.truncated);
  EXPECT_EQ(to_string(VerdictStatus::kIndeterminate), "indeterminate");
}

TEST(Annotations, DiscrepanciesAreFound) {
  auto g = explore(P("loc l [ close k#1+ ] | close k#1-"), {});
  EXPECT_EQ(annotation_discrepancies(g), (std::vector<std::size_t>{0}));
  auto ok = explore(P("loc l @1 [ close k#1+ ] | close k#1-"), {});
  EXPECT_TRUE(annotation_discrepancies(ok).empty());
}

}  // namespace
}  // namespace asp
