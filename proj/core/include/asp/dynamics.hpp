#pragma once

// Small-step reduction: expression evaluation, redex search, rule
// application, schedulers and traces.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "asp/context.hpp"
#include "asp/error.hpp"
#include "asp/term.hpp"

namespace asp {

struct EvalError {
  enum class Kind : std::uint8_t { kDivisionByZero, kTypeMismatch, kUnboundVariable };
  Kind kind;
  std::string message;
};

// e ↓ c. Integer arithmetic is exact two's complement; `/` truncates toward
// zero.
ErrorOr<Value, EvalError> eval_expr(const Expression& e);

std::string to_string(const Value& v);

enum class Rule : std::uint8_t { kOpen, kROpen, kUpd, kIO, kPass, kSel, kClose, kIfTr, kIfFa };

// "r:Open", "r:I/O", ...
std::string to_string(Rule r);

// A position in a term's parallel soup. The engine always works on tidy
// terms: restrictions on top, then nested parallel/located structure.
struct Site {
  // Component index at each nesting level of the restriction-free body; all
  // but the last index select located components.
  std::vector<std::size_t> path;
  // Locations enclosing the subterm, outermost first.
  std::vector<LocationName> locations;
  Process subterm;

  friend bool operator==(const Site&, const Site&) = default;
};

struct Redex {
  Rule rule;
  // One site for r:IfTr/r:IfFa, two otherwise, in this order:
  // accept/request, located/update, send/receive, throw/catch,
  // select/branch, κ⁺-close/κ⁻-close.
  std::vector<Site> participants;
  std::optional<Label> selected_label;  // r:Sel
  std::optional<ChannelId> channel;     // session rules
  std::optional<Name> service;          // r:Open/r:ROpen

  // e.g. "r:Upd w3", "r:I/O k#1", "r:Sel k#2 ok".
  std::string summary() const;

  friend bool operator==(const Redex&, const Redex&) = default;
};

// Redexes of p (taken up to structural congruence, via tidy), ordered by
// rule (Open, ROpen, Upd, I/O, Pass, Sel, Close, IfTr, IfFa) and then by
// participant paths.
std::vector<Redex> enabled_redexes(const Process& p);

// Applies r to p. The result is tidy. Throws StuckRedex when r does not
// match p.
Process step(const Process& p, const Redex& r);

// The evaluation context around a site of tidy(p)'s body.
EvalContext context_of(const Process& p, const Site& s);

// Every located annotation recomputed from scratch as the number of distinct
// channel endpoints occurring in the location's body.
Process recount_annotations(const Process& p);

struct Scheduler {
  enum class Policy : std::uint8_t { kLeftmost, kRandom, kInteractive };
  Policy policy = Policy::kLeftmost;
  std::uint64_t seed = 0;
  // Interactive policy: returns the index of the redex to fire.
  std::function<std::size_t(const Process&, const std::vector<Redex>&)> pick;

  static Scheduler leftmost() { return {}; }
  static Scheduler random(std::uint64_t seed) { return {Policy::kRandom, seed, {}}; }
};

enum class RunStatus : std::uint8_t { kTerminated, kStuck, kFuelExhausted };

std::string to_string(RunStatus s);

struct TraceStep {
  std::size_t index = 0;  // 1-based
  Redex redex;
  Process result;
};

struct ReductionTrace {
  Process initial;
  std::vector<TraceStep> steps;
  std::uint64_t scheduler_seed = 0;
  RunStatus status = RunStatus::kTerminated;

  const Process& final_state() const { return steps.empty() ? initial : steps.back().result; }
};

// Nothing left but replicated servers and locations holding nothing else.
bool is_terminated(const Process& p);

ReductionTrace run(const Process& p, const Scheduler& sched, std::size_t fuel);

// One JSON object per line: each step, then a final status record.
std::string trace_jsonl(const ReductionTrace& t, bool with_terms);

}  // namespace asp
