#include <gtest/gtest.h>

#include "asp/context.hpp"
#include "asp/error.hpp"
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

TEST(Context, PlugHole) {
  auto p = P("close k#1+");
  EXPECT_EQ(plug(EvalContext::hole(), p), p);
}

TEST(Context, PlugNested) {
  auto c = EvalContext::located(loc("l"), 2, EvalContext::beside(EvalContext::hole(), P("close k#2-")),
                                P("close k#3+"));
  EXPECT_EQ(print(plug(c, P("close k#1+"))), "loc l @2 [ (close k#1+ | close k#2-) | close k#3+ ]");
  EXPECT_EQ(c.spine(), (std::vector<LocationName>{loc("l")}));
}

TEST(Context, AdjustAnnotations) {
  auto c = EvalContext::located(loc("a"), 1,
                                EvalContext::located(loc("b"), 0, EvalContext::hole(), inaction()),
                                inaction());
  auto up = adjust_annotations(c, 1);
  EXPECT_EQ(print(plug(up, inaction())), "loc a @2 [ loc b @1 [] ]");
  EXPECT_THROW(adjust_annotations(c, -1), AnnotationUnderflow);
}

TEST(Context, ParallelComponentsFlattenAndDropInaction) {
  auto comps = parallel_components(P("(close k#1+ | 0) | (0 | (close k#2+ | close k#3+))"));
  ASSERT_EQ(comps.size(), 3U);
  EXPECT_EQ(print(comps[0]), "close k#1+");
  EXPECT_EQ(print(comps[2]), "close k#3+");
}

TEST(Context, DecomposeFindsEveryLeaf) {
  auto p = P("close k#1+ | loc l [ close k#2+ | loc m [ close k#3+ ] ] | loc n []");
  auto ds = decompose(p);
  ASSERT_EQ(ds.size(), 3U);
  for (const auto& d : ds) {
    EXPECT_TRUE(d.subterm.is<Close>());
    // Plugging back gives a term with the same components.
    EXPECT_EQ(parallel_components(plug(d.context, d.subterm)).size(),
              parallel_components(p).size());
  }
  std::vector<std::size_t> depth;
  for (const auto& d : ds) depth.push_back(d.context.spine().size());
  std::sort(depth.begin(), depth.end());
  EXPECT_EQ(depth, (std::vector<std::size_t>{0, 1, 2}));
}

}  // namespace
}  // namespace asp
