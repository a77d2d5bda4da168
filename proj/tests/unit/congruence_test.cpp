#include <gtest/gtest.h>

#include "asp/congruence.hpp"
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

TEST(Congruence, ParallelIsACWithUnit) {
  EXPECT_TRUE(congruent(P("close k#1+ | close k#2+"), P("close k#2+ | close k#1+")));
  EXPECT_TRUE(congruent(P("(close k#1+ | close k#2+) | close k#3+"),
                        P("close k#1+ | (close k#2+ | close k#3+)")));
  EXPECT_TRUE(congruent(P("close k#1+ | 0"), P("close k#1+")));
  EXPECT_FALSE(congruent(P("close k#1+"), P("close k#1-")));
}

TEST(Congruence, InsideLocations) {
  EXPECT_TRUE(congruent(P("loc l [ close k#1+ | close k#2+ ]"), P("loc l [ close k#2+ | close k#1+ ]")));
  EXPECT_FALSE(congruent(P("loc l [ close k#1+ ]"), P("loc m [ close k#1+ ]")));
  EXPECT_FALSE(congruent(P("loc l @1 [ close k#1+ ]"), P("loc l [ close k#1+ ]")));
}

TEST(Congruence, AlphaConversionOfRestrictions) {
  EXPECT_TRUE(congruent(P("new(k#1) (close k#1+ | close k#1-)"),
                        P("new(k#9) (close k#9- | close k#9+)")));
  EXPECT_FALSE(congruent(P("new(k#1) close k#1+"), P("new(k#1) close k#1-")));
}

TEST(Congruence, ScopeExtrusion) {
  EXPECT_TRUE(congruent(P("new(k#1) close k#1+ | close k#2+"), P("new(k#1) (close k#1+ | close k#2+)")));
  EXPECT_TRUE(congruent(P("loc l [ new(k#1) close k#1+ ]"), P("new(k#1) loc l [ close k#1+ ]")));
  EXPECT_TRUE(congruent(P("new(k#1) new(k#2) (close k#1+ | close k#2+)"),
                        P("new(k#2) new(k#1) (close k#1+ | close k#2+)")));
}

TEST(Congruence, NoExtrusionAcrossPrefixes) {
  EXPECT_FALSE(congruent(P("close k#2+. new(k#1) close k#1+"), P("new(k#1) close k#2+. close k#1+")));
}

TEST(Congruence, DeadRestrictionsVanish) {
  EXPECT_TRUE(congruent(P("new(k#1) close k#2+"), P("close k#2+")));
  EXPECT_TRUE(congruent(P("new(k#1) 0"), P("0")));
}

TEST(Congruence, FreeChannelsKeepTheirIds) {
  auto n = normalize(P("new(k#1) (close k#1+ | close k#5-)"));
  // Bound ids start above the largest free id.
  EXPECT_EQ(print(n), "new(k#6) (close k#6+ | close k#5-)");
}

TEST(Congruence, TidyKeepsIdsButSeparatesClashes) {
  auto t = tidy(P("loc l [ new(k#3) close k#3+ ] | new(k#7) close k#7-"));
  auto s = open_scope(t);
  EXPECT_EQ(s.binders.size(), 2U);
  EXPECT_NE(s.binders[0], s.binders[1]);
  auto clash = separate_binders(P("new(k#1) close k#1+ | new(k#1) close k#1-"));
  EXPECT_FALSE(congruent(clash, P("new(k#1) (close k#1+ | close k#1-)")));
}

TEST(Congruence, OpenCloseScopeRoundTrip) {
  auto p = P("new(k#1) new(k#2) (close k#1+ | close k#2+)");
  auto s = open_scope(p);
  EXPECT_EQ(s.binders, (std::vector<ChannelId>{1, 2}));
  EXPECT_EQ(close_scope(s.binders, s.body), p);
}

TEST(Congruence, TermKeyIsIdentity) {
  auto a = normalize(P("close k#1+ | close k#2+"));
  auto b = normalize(P("close k#2+ | close k#1+"));
  EXPECT_EQ(term_key(a), term_key(b));
  EXPECT_NE(term_key(a), term_key(normalize(P("close k#1+"))));
}

TEST(Congruence, AnnotationsAreNeverAltered) {
  auto n = normalize(P("loc l @3 [ close k#1+ ]"));
  EXPECT_EQ(n.as<Located>()->annotation, 3U);
}

}  // namespace
}  // namespace asp
