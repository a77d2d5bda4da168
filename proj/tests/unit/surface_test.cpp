#include <gtest/gtest.h>

#include "asp/surface.hpp"

namespace asp {
namespace {

ParseOptions loose() {
  ParseOptions o;
  o.allow_free_channels = true;
  o.allow_free_names = true;
  return o;
}

std::string reprint(const char* text) {
  auto p = parse_process(text, loose());
  EXPECT_TRUE(p.ok()) << text;
  return p.ok() ? print(*p) : "";
}

TEST(Surface, ProcessesRoundTrip) {
  for (const char* s : {
           "0",
           "close k#1+",
           "request a(x). send x(1, true, \"s\"). close x",
           "accept* a(x). recv x(u, v). if u = v then close x else close x",
           "loc l @2 [ close k#1+ | close k#2- ]",
           "update w3 { loc w3 [ $X ] }",
           "case k#1- { fail: close k#1- || ok: recv k#1-(r). close k#1- }",
           "sel k#1+.ok; close k#1+",
           "recv k#1+(v). sel k#1+.(v); close k#1+",
           "throw k#1+(k#2-). catch k#3+(y). close y",
           "new(k#1) (close k#1+ | close k#1-)",
           "send k#1+(1 + 2 - 3, 10 / 2, true and false)",
       }) {
    EXPECT_EQ(reprint(s), s);
  }
}

TEST(Surface, PrecedenceIsKeptByParentheses) {
  auto p = parse_process("send k#1+(1 - (2 - 3), (1 - 2) - 3). 0", loose());
  ASSERT_TRUE(p.ok());
  auto again = parse_process(print(*p), loose());
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*p, *again);
}

TEST(Surface, StringEscapes) {
  auto p = parse_process(R"(send k#1+("a\"b\\c\n"). 0)", loose());
  ASSERT_TRUE(p.ok());
  auto again = parse_process(print(*p), loose());
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*p, *again);
}

TEST(Surface, MissingMain) {
  auto f = parse("type t = end;");
  ASSERT_FALSE(f.ok());
  EXPECT_NE(f.error()[0].message.find("missing main"), std::string::npos);
  EXPECT_FALSE(parse("").ok());
}

TEST(Surface, UndeclaredServiceHasSpan) {
  std::string text = "main = request zz(x). close x;";
  auto f = parse(text);
  ASSERT_FALSE(f.ok());
  const auto& d = f.error()[0];
  EXPECT_EQ(text.substr(d.span.begin, d.span.end - d.span.begin), "zz");
  std::string shown = format_diagnostic(d, text, "f.asp");
  EXPECT_EQ(shown.rfind("f.asp:1:16: error: ", 0), 0U) << shown;
}

TEST(Surface, UnboundNames) {
  EXPECT_FALSE(parse_process("close x").ok());
  EXPECT_FALSE(parse_process("close k#1+").ok());
  EXPECT_TRUE(parse_process("new(k#1) (close k#1+ | close k#1-)").ok());
  EXPECT_FALSE(parse_process("request a(x). send x(v). close x").ok());
}

TEST(Surface, DuplicateArmRejected) {
  EXPECT_FALSE(parse_process("case k#1+ { ok: 0 || ok: 0 }", loose()).ok());
}

TEST(Surface, DeclarationsAssembleEnvironments) {
  auto f = parse(R"(
type beta = ?(str).+{fail: end, ok: end};
name b : <beta un, dual(beta) lin>;
locinterface w3 : {b: dual(beta) @ inf};
proc S = accept* b(x). recv x(v). sel x.(v); close x;
main = loc w3 [S];
)");
  ASSERT_TRUE(f.ok()) << f.error()[0].message;
  EXPECT_EQ(f->aliases.size(), 1U);
  EXPECT_EQ(f->gamma.services.at(name("b")).server_qualifier, Qualifier::kUn);
  EXPECT_TRUE(f->theta.locations.contains(loc("w3")));
  ASSERT_NE(f->find_proc("S"), nullptr);
  EXPECT_EQ(f->find_proc("T"), nullptr);
  // Named processes fold back on printing.
  std::string printed = print(*f);
  EXPECT_NE(printed.find("loc w3 [ S ];"), std::string::npos) << printed;
  auto again = parse(printed);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(again->main, f->main);
  EXPECT_EQ(print(*again), printed);
}

TEST(Surface, TypesParseAndPrint) {
  for (const char* s : {"end", "!(int, bool).end", "?(str).&{a: end, b: !(int).end}",
                        "!!(?(int).end).end", "?" "?(!(int).end).+{ok: end}"}) {
    auto t = parse_type(s);
    ASSERT_TRUE(t.ok()) << s;
    EXPECT_EQ(print(*t), s);
  }
  EXPECT_FALSE(parse_type("!(float).end").ok());
}

}  // namespace
}  // namespace asp
