#include <gtest/gtest.h>

#include "asp/corpus.hpp"
#include "asp/surface.hpp"
#include "asp/typecheck.hpp"

namespace asp {
namespace {

constexpr const char* kDecls = R"(
type alpha = ?(int).?(int).+{fail: end, ok: !(int).end};
type beta = ?(str).+{fail: end, ok: end};
type once = !(int).end;
name a : <alpha un, dual(alpha) lin>;
name b : <beta un, dual(beta) lin>;
name c : <once lin, dual(once) lin>;
locinterface l : {a: alpha @ inf, c: once @ 1, c: dual(once) @ 1};
locinterface m : {};
)";

struct Checked {
  SourceFile file;
  ErrorOr<Judgment, TypeError> result;
};

Checked check(const std::string& main) {
  auto f = parse(std::string(kDecls) + "main = " + main + ";");
  EXPECT_TRUE(f.ok()) << main;
  if (!f.ok()) return {SourceFile{}, TypeError{TypeErrorKind::kUnboundVariable, "", "parse", nullptr}};
  auto r = typecheck(f->gamma, f->theta, f->main);
  return {f.value(), r};
}

TypeErrorKind error_of(const std::string& main) {
  auto c = check(main);
  EXPECT_FALSE(c.result.ok()) << main;
  return c.result.ok() ? TypeErrorKind::kUnboundVariable : c.result.error().kind;
}

TEST(Typecheck, ClientJudgment) {
  auto c = check("request a(x). send x(10). send x(0). case x { fail: close x || ok: recv x(r). close x }");
  ASSERT_TRUE(c.result.ok()) << to_string(c.result.error());
  EXPECT_EQ(judgment_text(*c.result, c.file.aliases), "{} ; {a: dual(alpha) @ 1}");
}

TEST(Typecheck, ReplicatedServerJudgment) {
  auto c = check("accept* c(x). send x(1). close x");
  // accept* on a service whose server side is lin
  EXPECT_FALSE(c.result.ok());
  auto d = check("accept c(x). send x(1). close x | request c(y). recv y(v). close y");
  ASSERT_TRUE(d.result.ok()) << to_string(d.result.error());
  EXPECT_EQ(judgment_text(*d.result, d.file.aliases), "{} ; {c: once @ 1, c: dual(once) @ 1}");
}

TEST(Typecheck, RestrictedSessionIsBalanced) {
  auto c = check("new(k#1) (send k#1+(3). close k#1+ | recv k#1-(v). close k#1-)");
  ASSERT_TRUE(c.result.ok()) << to_string(c.result.error());
  // Restricted entries stay, bracketed.
  EXPECT_EQ(c.result->typing.size(), 2U);
  for (const auto& [k, e] : c.result->typing) EXPECT_TRUE(e.bracketed);
  EXPECT_TRUE(balanced(c.result->typing));
}

TEST(Typecheck, AnnotationMismatch) {
  EXPECT_EQ(error_of("loc m @1 []"), TypeErrorKind::kAnnotationMismatch);
  EXPECT_EQ(error_of("new(k#1) (loc m [ close k#1+ ] | close k#1-)"), TypeErrorKind::kAnnotationMismatch);
  EXPECT_TRUE(check("new(k#1) (loc m @1 [ close k#1+ ] | close k#1-)").result.ok());
}

TEST(Typecheck, UpdateBodyMustBeClosed) {
  EXPECT_EQ(error_of("new(k#1) (update m { close k#1+ } | close k#1-)"), TypeErrorKind::kNonEmptyUpdate);
  EXPECT_TRUE(check("update m { loc m [] }").result.ok());
}

TEST(Typecheck, UpdateVariableTakesLocationInterface) {
  auto c = check("update l { loc l [ $X ] }");
  ASSERT_TRUE(c.result.ok()) << to_string(c.result.error());
  EXPECT_TRUE(c.result->interface.empty());
}

TEST(Typecheck, InterfaceExceeded) {
  EXPECT_EQ(error_of("loc m [ request a(x). send x(1). send x(2). case x { fail: close x || ok: recv x(r). close x } ]"),
            TypeErrorKind::kInterfaceExceeded);
}

TEST(Typecheck, ArityAndSortMismatch) {
  EXPECT_NE(check("new(k#1) (send k#1+(1, 2). close k#1+ | recv k#1-(v). close k#1-)").result.ok(), true);
  EXPECT_FALSE(check("new(k#1) (send k#1+(true). close k#1+ | recv k#1-(v). send k#1-(v + 1). close k#1-)")
                   .result.ok());
  EXPECT_EQ(error_of("if 1 then 0 else 0"), TypeErrorKind::kSortMismatch);
}

TEST(Typecheck, LinearEndpointUsedTwice) {
  EXPECT_FALSE(check("new(k#1) (close k#1+ | close k#1+ | close k#1-)").result.ok());
}

TEST(Typecheck, UnbalancedRestriction) {
  EXPECT_EQ(error_of("new(k#1) close k#1+"), TypeErrorKind::kUnbalancedRestriction);
}

TEST(Typecheck, UnknownLocation) {
  EXPECT_EQ(error_of("loc nowhere []"), TypeErrorKind::kUnknownLocation);
}

TEST(Typecheck, BranchArmsMustAgree) {
  EXPECT_FALSE(check("new(k#1) (case k#1+ { ok: close k#1+ || no: 0 } | sel k#1-.ok; close k#1-)")
                   .result.ok());
}

TEST(Typecheck, SelectUnofferedLabelIsIllTyped) {
  EXPECT_FALSE(check("new(k#1) (sel k#1-.bad; close k#1- | case k#1+ { ok: close k#1+ })").result.ok());
}

TEST(Typecheck, ErrorCarriesNode) {
  auto c = check("loc m @1 []");
  ASSERT_FALSE(c.result.ok());
  EXPECT_NE(c.result.error().node, nullptr);
  EXPECT_EQ(c.result.error().rule, "t:Loc");
  EXPECT_TRUE(c.file.spans.contains(c.result.error().node));
}

}  // namespace
}  // namespace asp
