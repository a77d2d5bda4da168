#include "asp/corpus.hpp"

#include <stdexcept>

#include <json.hpp>

namespace asp {

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size())) {
    s.replace(at, from.size(), to);
  }
}

CorpusEntry make_entry(std::string name, std::string source) {
  auto parsed = parse(source);
  if (!parsed) {
    std::string msg = "corpus entry '" + name + "' does not parse:";
    for (const auto& d : parsed.error()) msg += "\n" + format_diagnostic(d, source, name);
    throw std::logic_error(msg);
  }
  CorpusEntry e;
  e.name = std::move(name);
  e.source = std::move(source);
  e.file = std::move(parsed).value();
  return e;
}

constexpr std::string_view kWorkflow = R"(// Workflow application: the engine at we runs workflow w1, whose logic WL
// decides for each activity whether its environment gets updated.
// Activity 1 is told yes, activity 2 no.

type echo = ?(int).!(int).end;
type verdict = !(bool).end;

name e1 : <echo un, dual(echo) lin>;
name e2 : <echo un, dual(echo) lin>;
name act1 : <verdict lin, dual(verdict) lin>;
name act2 : <verdict lin, dual(verdict) lin>;

locinterface wfa : {act1: verdict @ 1, act1: dual(verdict) @ 1, act2: verdict @ 1,
                    act2: dual(verdict) @ 1, e1: echo @ inf, e1: dual(echo) @ 1,
                    e2: echo @ inf, e2: dual(echo) @ 1};
locinterface we : {act1: verdict @ 1, act1: dual(verdict) @ 1, act2: verdict @ 1,
                   act2: dual(verdict) @ 1, e1: echo @ inf, e1: dual(echo) @ 1,
                   e2: echo @ inf, e2: dual(echo) @ 1};
locinterface w1 : {act1: verdict @ 1, act1: dual(verdict) @ 1, act2: verdict @ 1,
                   act2: dual(verdict) @ 1, e1: dual(echo) @ 1, e2: dual(echo) @ 1};
locinterface env1 : {e1: dual(echo) @ 1};
locinterface env2 : {e2: dual(echo) @ 1};
locinterface a1 : {act1: dual(verdict) @ 1};
locinterface a2 : {act2: dual(verdict) @ 1};
locinterface wbl : {};

// Engine services the activity environments talk to.
proc WE = accept* e1(x). recv x(n). send x(n). close x
        | accept* e2(x). recv x(n). send x(n). close x;

proc WL = accept act1(y). send y(true). close y
        | accept act2(y). send y(false). close y;

// Current and replacement environments: one echo round each.
proc P1 = request e1(x). send x(1). recv x(r). close x;
proc P2 = request e2(x). send x(2). recv x(r). close x;
proc Q1 = request e1(x). send x(10). recv x(r). close x;
proc Q2 = request e2(x). send x(20). recv x(r). close x;

proc R1 = request act1(x). recv x(b).
  if b = true then (update env1 { loc env1 [Q1] } | close x) else close x;
proc R2 = request act2(x). recv x(b).
  if b = true then (update env2 { loc env2 [Q2] } | close x) else close x;

main = loc wfa [
  loc we [
    WE
  | loc w1 [ WL | loc env1 [P1] | loc a1 [R1] | loc env2 [P2] | loc a2 [R2] ]
  | loc wbl []
  ]
];
)";

constexpr std::string_view kOneForOneHead = R"(// One-for-one supervision. The client asks the division server W3 for
// {C1} / {C2}. W3 reports whether the denominator is usable to its supervisor
// S2 over b; S2 echoes the verdict and, on fail, restarts w3.

type alpha = ?(int).?(int).+{fail: end, ok: !(int).end};
type beta = ?(str).+{fail: end, ok: end};

name a : <alpha un, dual(alpha) lin>;
name b : <beta un, dual(beta) lin>;

locinterface l1 : {a: alpha @ inf, b: beta @ inf, b: dual(beta) @ inf};
locinterface l2 : {a: alpha @ inf, b: beta @ inf, b: dual(beta) @ inf};
locinterface w2 : {};
locinterface w3 : {a: alpha @ inf, b: dual(beta) @ inf};
locinterface w4 : {};

// Answer the client once S2 has echoed the verdict.
proc P(xa, xb, u, v) =
  case xb {
    fail: sel xa.fail; close xa. close xb
 || ok: sel xa.ok; send xa(u / v). close xa. close xb
  };

proc W3 =
  accept* a(xa). request b(xb). recv xa(u). recv xa(v).
  if v = 0 then send xb("fail"). P else send xb("ok"). P;
)";

constexpr std::string_view kOneForOneS2 = R"(
proc S2 =
  accept* b(xb). recv xb(v). sel xb.(v);
  if v = "fail" then close xb. update w3 { loc w3 [W3] } else close xb;
)";

constexpr std::string_view kOneForOneUpgraded = R"(
// Handles a zero denominator itself, without a supervisor session.
proc W3' =
  accept* a(xa). recv xa(u). recv xa(v).
  if v = 0 then sel xa.fail; close xa else sel xa.ok; send xa(u / v). close xa;

proc S2 =
  accept* b(xb). recv xb(v). sel xb.(v); close xb.
  if v = "fail" then update w3 { loc w3 [W3'] } else 0;
)";

constexpr std::string_view kOneForOneTail = R"(
proc C =
  request a(xa). send xa({C1}). send xa({C2}).
  case xa { fail: close xa || ok: recv xa(r). close xa };

// S1, W2 and W4 take no part in this scenario.
main = loc l1 [ loc l2 [ S2 | loc w3 [W3] | loc w4 [] ] | loc w2 [] ] | C;
)";

constexpr std::string_view kOneForAll = R"(// One-for-all supervision. Each worker gets a value from its client,
// reports its validity to its supervisor, and waits for the verdict that
// cascades down from S1. Every worker is then recreated by its supervisor.
// Clients send {V2}, {V3}, {V4}; a worker accepts only 1.

// worker side towards its client
type iota = ?(int).+{fail: end, ok: ?(int).!(int).end};
// supervisor side towards a worker: validity in, verdict out, the verdict
// echoed back as a selection, then confirmed
type sigma = ?(bool).!(str).&{fail: +{fail: end, ok: end}, ok: +{fail: end, ok: end}};
// S1 side towards S2
type rho = ?(bool).!(str).&{fail: end, ok: end};

name i2 : <iota lin, dual(iota) lin>;
name i3 : <iota lin, dual(iota) lin>;
name i4 : <iota lin, dual(iota) lin>;
name a : <rho un, dual(rho) lin>;
name b : <sigma lin, dual(sigma) lin>;
name c : <sigma un, dual(sigma) lin>;
name d : <sigma lin, dual(sigma) lin>;

locinterface l1 : {a: rho @ inf, a: dual(rho) @ inf, b: sigma @ inf, b: dual(sigma) @ 1,
                   c: sigma @ inf, c: dual(sigma) @ 1, d: sigma @ inf, d: dual(sigma) @ 1,
                   i2: iota @ 1, i3: iota @ 1, i4: iota @ 1};
locinterface l2 : {a: dual(rho) @ inf, c: sigma @ inf, c: dual(sigma) @ 1, d: sigma @ inf,
                   d: dual(sigma) @ 1, i3: iota @ 1, i4: iota @ 1};
locinterface w2 : {b: dual(sigma) @ 1, i2: iota @ 1};
locinterface w3 : {c: dual(sigma) @ 1, i3: iota @ 1};
locinterface w4 : {d: dual(sigma) @ 1, i4: iota @ 1};

// Worker after reporting: take the verdict, echo it, act on the
// confirmation. On ok the client gets one echo round.
proc PW(xj, xs) =
  recv xs(y). sel xs.(y);
  case xs {
    fail: sel xj.fail; close xj. close xs
 || ok: sel xj.ok; recv xj(m). send xj(m). close xj. close xs
  };

proc W2 = accept i2(xj). request b(xs). recv xj(v).
  if v = 1 then send xs(true). PW else send xs(false). PW;
proc W3 = accept i3(xj). request c(xs). recv xj(v).
  if v = 1 then send xs(true). PW else send xs(false). PW;
proc W4 = accept i4(xj). request d(xs). recv xj(v).
  if v = 1 then send xs(true). PW else send xs(false). PW;

proc Q = update w3 { loc w3 [W3] } | update w4 { loc w4 [W4] };

// Confirm each worker's echoed verdict, then restart both workers.
proc R(xc, xd, xa) =
  case xc {
    fail: sel xc.fail;
      case xd {
        fail: sel xd.fail; close xc. close xd. close xa. Q
     || ok: sel xd.ok; close xc. close xd. close xa. Q
      }
 || ok: sel xc.ok;
      case xd {
        fail: sel xd.fail; close xc. close xd. close xa. Q
     || ok: sel xd.ok; close xc. close xd. close xa. Q
      }
  };

proc S2 =
  accept* c(xc). accept d(xd). request a(xa). recv xc(u). recv xd(v).
  send xa(true). recv xa(z). sel xa.(z);
  if u and v and z = "ok" then send xc("ok"). send xd("ok"). R
  else send xc("fail"). send xd("fail"). R;

// S2 offers no choice on xa after its selection, so S1 only branches.
proc T(xa, xb) =
  case xa {
    fail:
      case xb {
        fail: sel xb.fail; close xa. close xb. update w2 { loc w2 [W2] }
     || ok: sel xb.ok; close xa. close xb. update w2 { loc w2 [W2] }
      }
 || ok:
      case xb {
        fail: sel xb.fail; close xa. close xb. update w2 { loc w2 [W2] }
     || ok: sel xb.ok; close xa. close xb. update w2 { loc w2 [W2] }
      }
  };

proc S1 =
  accept* a(xa). accept b(xb). recv xa(u). recv xb(v).
  if u and v then send xa("ok"). send xb("ok"). T else send xa("fail"). send xb("fail"). T;

proc C2 = request i2(xj). send xj({V2}).
  case xj { fail: close xj || ok: send xj(42). recv xj(r). close xj };
proc C3 = request i3(xj). send xj({V3}).
  case xj { fail: close xj || ok: send xj(42). recv xj(r). close xj };
proc C4 = request i4(xj). send xj({V4}).
  case xj { fail: close xj || ok: send xj(42). recv xj(r). close xj };

main = loc l1 [ S1 | loc l2 [ S2 | loc w3 [W3] | loc w4 [W4] ] | loc w2 [W2] ]
     | C2 | C3 | C4;
)";

}  // namespace

CorpusEntry build_workflow() {
  CorpusEntry e = make_entry("workflow", std::string(kWorkflow));
  e.facts.max_states = 10000;
  e.facts.must_occur = {"r:Upd env1"};
  e.facts.must_not_occur = {"r:Upd env2"};
  return e;
}

CorpusEntry build_one_for_one(std::int64_t c1, std::int64_t c2, bool upgraded) {
  std::string src(kOneForOneHead);
  src += upgraded ? kOneForOneUpgraded : kOneForOneS2;
  src += kOneForOneTail;
  replace_all(src, "{C1}", std::to_string(c1));
  replace_all(src, "{C2}", std::to_string(c2));
  std::string name = "one_for_one";
  if (upgraded) name += "_upgraded";
  if (c2 != 0) name += "_ok";
  CorpusEntry e = make_entry(name, std::move(src));
  e.judgments = {
      {"S2", "{} ; {b: beta @ inf}"},
      {"W3", "{} ; {a: alpha @ inf, b: dual(beta) @ inf}"},
      {"C", "{} ; {a: dual(alpha) @ 1}"},
  };
  e.facts.max_states = 10000;
  if (c2 == 0) {
    e.facts.must_occur = {"r:Upd w3"};
  } else {
    e.facts.must_occur = {"r:I/O"};
    e.facts.must_not_occur = {"r:Upd"};
  }
  return e;
}

CorpusEntry build_one_for_all(const std::set<std::string>& fail_at) {
  std::string src(kOneForAll);
  std::string name = "one_for_all";
  for (const char* w : {"w2", "w3", "w4"}) {
    const bool fails = fail_at.contains(w);
    replace_all(src, std::string("{V") + (w + 1) + "}", fails ? "0" : "1");
    if (fails) name += std::string("_") + w;
  }
  CorpusEntry e = make_entry(name, std::move(src));
  e.facts.max_states = 10000;
  e.facts.must_occur = {"r:Upd w2", "r:Upd w3", "r:Upd w4"};
  return e;
}

std::vector<CorpusEntry> all_corpus_entries() {
  return {
      build_workflow(),
      build_one_for_one(10, 0),
      build_one_for_one(10, 2),
      build_one_for_one(10, 0, true),
      build_one_for_all(),
      build_one_for_all({"w3"}),
  };
}

std::string expectations_json(const CorpusEntry& e) {
  nlohmann::ordered_json j;
  j["name"] = e.name;
  nlohmann::ordered_json judgments = nlohmann::ordered_json::object();
  for (const auto& x : e.judgments) judgments[x.process] = x.judgment;
  j["judgments"] = judgments;
  j["max_states"] = e.facts.max_states;
  j["must_occur"] = e.facts.must_occur;
  j["must_not_occur"] = e.facts.must_not_occur;
  return j.dump(2) + "\n";
}

std::string judgment_text(const Judgment& j, const TypeAliases& aliases) {
  return to_string(j.typing, aliases) + " ; " + to_string(j.interface, aliases);
}

std::vector<DeclaredJudgment> check_declarations(const SourceFile& f) {
  std::vector<DeclaredJudgment> out;
  for (const auto& d : f.declarations) {
    if (const auto* p = std::get_if<ProcDecl>(&d)) {
      TypecheckOptions opts;
      opts.allow_free_endpoints = !p->params.empty();
      opts.allow_free_values = !p->params.empty();
      out.push_back({p->name, typecheck(f.gamma, f.theta, p->body, opts)});
    } else if (const auto* m = std::get_if<MainDecl>(&d)) {
      out.push_back({"main", typecheck(f.gamma, f.theta, m->body)});
    }
  }
  return out;
}

}  // namespace asp
