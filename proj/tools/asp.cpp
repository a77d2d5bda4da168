// asp: parse, typecheck, run, explore and check adaptable session programs.
//
// Exit codes: 0 ok, 1 property violated, 2 type error, 3 parse error,
// 4 usage error.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "asp/corpus.hpp"
#include "asp/dynamics.hpp"
#include "asp/meta.hpp"
#include "asp/surface.hpp"
#include "asp/typecheck.hpp"

namespace {

using nlohmann::ordered_json;

enum Exit : int { kOk = 0, kViolation = 1, kTypeError = 2, kParseError = 3, kUsage = 4 };

struct Options {
  std::string file;
  std::string format = "text";
  std::string scheduler = "leftmost";
  std::uint64_t seed = 0;
  std::size_t fuel = 1000;
  std::size_t max_states = 10000;
  std::size_t max_depth = 200;
  unsigned jobs = 1;
  bool terms = false;
  bool unchecked = false;
  bool timing = false;
};

bool color_enabled() {
  const char* v = std::getenv("ASP_COLOR");
  if (v == nullptr) return false;
  std::string s(v);
  return s == "1" || s == "always" || s == "true" || s == "yes";
}

std::string paint(const std::string& text, const char* code) {
  if (!color_enabled()) return text;
  return std::string("\033[") + code + "m" + text + "\033[0m";
}

std::string status_color(asp::VerdictStatus s) {
  switch (s) {
    case asp::VerdictStatus::kHolds: return "32";
    case asp::VerdictStatus::kViolated: return "31";
    default: return "33";
  }
}

bool structured(const Options& o) { return o.format == "structured"; }

struct Loaded {
  std::string text;
  asp::SourceFile file;
};

// Returns an exit code on failure.
int load(const Options& o, Loaded& out) {
  std::ifstream in(o.file, std::ios::binary);
  if (!in) {
    std::cerr << "asp: cannot read '" << o.file << "'\n";
    return kUsage;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  out.text = ss.str();
  auto parsed = asp::parse(out.text);
  if (!parsed) {
    for (const auto& d : parsed.error()) {
      std::cerr << asp::format_diagnostic(d, out.text, o.file);
    }
    return kParseError;
  }
  out.file = std::move(parsed).value();
  return kOk;
}

void report_type_error(const Loaded& l, const Options& o, const std::string& process,
                       const asp::TypeError& e) {
  asp::Diagnostic d;
  d.message = "in " + process + ": " + asp::to_string(e);
  auto it = l.file.spans.find(e.node);
  if (it != l.file.spans.end()) d.span = it->second;
  std::cerr << asp::format_diagnostic(d, l.text, o.file);
}

// Typechecks main unless --unchecked.
int require_typed(const Loaded& l, const Options& o) {
  if (o.unchecked) return kOk;
  auto j = asp::typecheck(l.file.gamma, l.file.theta, l.file.main);
  if (j) return kOk;
  report_type_error(l, o, "main", j.error());
  return kTypeError;
}

int cmd_parse(const Options& o) {
  Loaded l;
  if (int rc = load(o, l)) return rc;
  if (structured(o)) {
    ordered_json j;
    j["file"] = o.file;
    j["main"] = asp::print(l.file.main);
    j["source"] = asp::print(l.file);
    std::cout << j.dump() << "\n";
  } else {
    std::cout << asp::print(l.file);
  }
  return kOk;
}

int cmd_typecheck(const Options& o) {
  Loaded l;
  if (int rc = load(o, l)) return rc;
  int rc = kOk;
  ordered_json out = ordered_json::array();
  for (const auto& d : asp::check_declarations(l.file)) {
    ordered_json rec;
    rec["process"] = d.process;
    if (d.result) {
      std::string text = asp::judgment_text(*d.result, l.file.aliases);
      rec["judgment"] = text;
      if (!structured(o)) std::cout << d.process << ": " << text << "\n";
    } else {
      rec["error"] = asp::to_string(d.result.error());
      if (!structured(o)) std::cout << d.process << ": " << paint("ill-typed", "31") << "\n";
      report_type_error(l, o, d.process, d.result.error());
      rc = kTypeError;
    }
    out.push_back(rec);
  }
  if (structured(o)) std::cout << out.dump() << "\n";
  return rc;
}

int cmd_run(const Options& o) {
  Loaded l;
  if (int rc = load(o, l)) return rc;
  if (int rc = require_typed(l, o)) return rc;
  asp::Scheduler sched =
      o.scheduler == "random" ? asp::Scheduler::random(o.seed) : asp::Scheduler::leftmost();
  asp::ReductionTrace t = asp::run(l.file.main, sched, o.fuel);
  if (structured(o)) {
    std::cout << asp::trace_jsonl(t, o.terms);
    return kOk;
  }
  if (o.terms) std::cout << "   " << asp::print(t.initial) << "\n";
  for (const auto& s : t.steps) {
    std::cout << s.index << ". " << s.redex.summary() << "\n";
    if (o.terms) std::cout << "   " << asp::print(s.result) << "\n";
  }
  std::cout << "status: " << asp::to_string(t.status) << ", steps: " << t.steps.size()
            << ", seed: " << t.scheduler_seed << "\n";
  return kOk;
}

asp::ExploreBounds bounds_of(const Options& o) {
  asp::ExploreBounds b;
  b.max_states = o.max_states;
  b.max_depth = o.max_depth;
  b.jobs = o.jobs;
  return b;
}

int cmd_explore(const Options& o) {
  Loaded l;
  if (int rc = load(o, l)) return rc;
  if (int rc = require_typed(l, o)) return rc;
  auto start = std::chrono::steady_clock::now();
  asp::StateGraph g = asp::explore(l.file.main, bounds_of(o));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::size_t maximal = 0;
  std::size_t errors = 0;
  std::size_t max_depth = 0;
  for (std::size_t s = 0; s < g.states.size(); ++s) {
    if (g.out(s).empty()) ++maximal;
    if (asp::is_error(g.states[s])) ++errors;
    max_depth = std::max(max_depth, g.depth[s]);
  }
  if (structured(o)) {
    ordered_json j;
    j["states"] = g.states.size();
    j["edges"] = g.edges.size();
    j["truncated"] = g.truncated;
    j["depth"] = max_depth;
    j["maximal_states"] = maximal;
    j["error_states"] = errors;
    if (o.timing) j["seconds"] = secs;
    if (o.terms) {
      ordered_json st = ordered_json::array();
      for (const auto& s : g.states) st.push_back(asp::print(s));
      j["terms"] = st;
      ordered_json es = ordered_json::array();
      for (const auto& e : g.edges) es.push_back({e.source, e.target, e.redex.summary()});
      j["transitions"] = es;
    }
    std::cout << j.dump() << "\n";
    return kOk;
  }
  std::cout << "states: " << g.states.size() << "\n"
            << "edges: " << g.edges.size() << "\n"
            << "truncated: " << (g.truncated ? "true" : "false") << "\n"
            << "depth: " << max_depth << "\n"
            << "maximal states: " << maximal << "\n"
            << "error states: " << errors << "\n";
  if (o.timing) std::cout << "time: " << secs << "s\n";
  if (o.terms) {
    for (std::size_t s = 0; s < g.states.size(); ++s) {
      std::cout << "s" << s << ": " << asp::print(g.states[s]) << "\n";
    }
    for (const auto& e : g.edges) {
      std::cout << "s" << e.source << " -> s" << e.target << ": " << e.redex.summary() << "\n";
    }
  }
  return kOk;
}

ordered_json verdict_json(const asp::Verdict& v, const Options& o) {
  ordered_json j;
  j["property"] = v.property;
  j["status"] = asp::to_string(v.status);
  j["states"] = v.states;
  j["edges"] = v.edges;
  j["truncated"] = v.truncated;
  if (o.timing) j["seconds"] = v.seconds;
  if (!v.message.empty()) j["message"] = v.message;
  if (v.violated()) {
    ordered_json w = ordered_json::array();
    for (const auto& s : v.witness) {
      ordered_json step;
      step["redex"] = s.redex.summary();
      ordered_json sites = ordered_json::array();
      for (const auto& site : s.redex.participants) {
        ordered_json locs = ordered_json::array();
        for (const auto& l : site.locations) locs.push_back(l.str());
        sites.push_back(locs);
      }
      step["sites"] = sites;
      if (o.terms) step["term"] = asp::print(s.result);
      w.push_back(step);
    }
    j["witness"] = w;
    if (o.terms) j["root"] = asp::print(v.root);
  }
  return j;
}

int cmd_check(const Options& o) {
  Loaded l;
  if (int rc = load(o, l)) return rc;
  if (int rc = require_typed(l, o)) return rc;
  const auto b = bounds_of(o);
  const auto& f = l.file;
  asp::Verdict verdicts[] = {
      asp::check_subject_reduction(f.main, f.gamma, f.theta, b),
      asp::check_safety(f.main, f.gamma, f.theta, b),
      asp::check_update_consistency(f.main, b),
  };
  int rc = kOk;
  ordered_json out = ordered_json::array();
  for (const auto& v : verdicts) {
    if (v.violated()) rc = kViolation;
    if (structured(o)) {
      out.push_back(verdict_json(v, o));
      continue;
    }
    std::string text = asp::render(v, o.timing);
    std::string status = asp::to_string(v.status);
    auto at = text.find(status);
    if (at != std::string::npos) text.replace(at, status.size(), paint(status, status_color(v.status).c_str()));
    std::cout << text;
    if (v.violated() && o.terms) {
      std::cout << "  root: " << asp::print(v.root) << "\n";
      for (std::size_t i = 0; i < v.witness.size(); ++i) {
        std::cout << "  after " << i + 1 << ": " << asp::print(v.witness[i].result) << "\n";
      }
    }
  }
  if (structured(o)) std::cout << out.dump() << "\n";
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptable session processes: parse, typecheck, run, explore, check."};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", o.file, "Source file")->required();
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"text", "structured"}));
  };
  auto add_typing = [&](CLI::App* sub) {
    sub->add_flag("--unchecked", o.unchecked, "Skip typechecking main");
    sub->add_flag("--terms", o.terms, "Print terms alongside redexes");
  };
  auto add_bounds = [&](CLI::App* sub) {
    sub->add_option("--max-states", o.max_states, "State bound")->check(CLI::PositiveNumber);
    sub->add_option("--max-depth", o.max_depth, "Depth bound");
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1U, 256U));
    sub->add_flag("--timing", o.timing, "Report wall time");
  };

  auto* parse = app.add_subcommand("parse", "Parse and pretty-print");
  add_common(parse);
  auto* tc = app.add_subcommand("typecheck", "Print the judgment of every declared process");
  add_common(tc);
  auto* run = app.add_subcommand("run", "Reduce main and print the trace");
  add_common(run);
  add_typing(run);
  run->add_option("--scheduler", o.scheduler, "Redex choice")
      ->check(CLI::IsMember({"leftmost", "random"}));
  run->add_option("--seed", o.seed, "Seed for the random scheduler");
  run->add_option("--fuel", o.fuel, "Maximum number of steps");
  auto* explore = app.add_subcommand("explore", "Enumerate the reachable state space");
  add_common(explore);
  add_typing(explore);
  add_bounds(explore);
  auto* check = app.add_subcommand("check", "Run the subject reduction, safety and update "
                                            "consistency checks");
  add_common(check);
  add_typing(check);
  add_bounds(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (parse->parsed()) return cmd_parse(o);
    if (tc->parsed()) return cmd_typecheck(o);
    if (run->parsed()) return cmd_run(o);
    if (explore->parsed()) return cmd_explore(o);
    if (check->parsed()) return cmd_check(o);
  } catch (const std::exception& e) {
    std::cerr << "asp: " << e.what() << "\n";
    return kViolation;
  }
  return kUsage;
}
