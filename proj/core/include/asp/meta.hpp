#pragma once

// Executable metatheory: κ-processes and errors, bounded state-space
// exploration, and the subject reduction / safety / update consistency
// harnesses.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "asp/context.hpp"
#include "asp/dynamics.hpp"
#include "asp/session_types.hpp"
#include "asp/term.hpp"
#include "asp/typecheck.hpp"

namespace asp {

struct KappaProcess {
  EvalContext context;
  Process process;
};

// Components of tidy(p) whose next action has subject κ⁺ or κ⁻.
std::vector<KappaProcess> kappa_processes(const Process& p, ChannelId k);

// Complementary prefixes on dual endpoints: send/receive of equal arity,
// throw/catch, select/branch offering the label, close/close.
bool is_kappa_redex(const Process& a, const Process& b);

// Some κ has exactly two κ-processes that do not form a redex, or three or
// more. A lone κ-process is not an error.
bool is_error(const Process& p);
std::optional<ChannelId> error_channel(const Process& p);

// Channels κ for which p contains a κ-redex.
std::vector<ChannelId> kappa_redex_channels(const Process& p);

struct ExploreBounds {
  std::size_t max_states = 10000;
  std::size_t max_depth = 200;
  unsigned jobs = 1;
};

struct Edge {
  std::size_t source = 0;
  std::size_t target = 0;
  Redex redex;  // relative to states[source]
};

struct StateGraph {
  std::vector<Process> states;  // normalized; states[root] is the start
  std::vector<std::size_t> depth;
  std::vector<Edge> edges;      // grouped by source, in discovery order
  std::vector<std::size_t> parent_edge;  // BFS tree; unused for the root
  std::size_t root = 0;
  bool truncated = false;

  // Edges leaving state s.
  std::vector<const Edge*> out(std::size_t s) const;
  // Edge sequence from the root to s along the BFS tree.
  std::vector<Edge> path_to(std::size_t s) const;
};

// Breadth-first closure of normalize∘step. Successors of a BFS layer are
// computed on up to bounds.jobs threads and inserted in a fixed order, so
// the graph does not depend on the thread count.
StateGraph explore(const Process& p, const ExploreBounds& bounds);

struct WitnessStep {
  Redex redex;
  Process result;
};

enum class VerdictStatus : std::uint8_t { kHolds, kViolated, kPreconditionFailed, kIndeterminate };

std::string to_string(VerdictStatus s);

struct Verdict {
  std::string property;
  VerdictStatus status = VerdictStatus::kHolds;
  Process root;
  std::vector<WitnessStep> witness;  // only when violated
  std::string message;
  std::size_t states = 0;
  std::size_t edges = 0;
  bool truncated = false;
  double seconds = 0;

  bool holds() const { return status == VerdictStatus::kHolds; }
  bool violated() const { return status == VerdictStatus::kViolated; }
};

// Re-applies each witness step from root and compares against the recorded
// results (the last step of an update-consistency witness is compared up to
// tidy rather than normalize).
bool replay(const Process& root, const std::vector<WitnessStep>& witness);

Verdict check_subject_reduction(const Process& p, const FirstOrderEnv& g, const HigherOrderEnv& t,
                                const ExploreBounds& bounds);
Verdict check_safety(const Process& p, const FirstOrderEnv& g, const HigherOrderEnv& t,
                     const ExploreBounds& bounds);
// Typing is not required: the checker also runs on untyped counterexamples.
Verdict check_update_consistency(const Process& p, const ExploreBounds& bounds);

// Every state whose annotations disagree with recount_annotations.
std::vector<std::size_t> annotation_discrepancies(const StateGraph& g);

// Over all maximal paths (root to a state with no successors), the fewest
// and most edges satisfying pred. nullopt when the graph is truncated or a
// cycle is reachable.
struct PathCount {
  std::size_t min = 0;
  std::size_t max = 0;
};
std::optional<PathCount> count_on_maximal_paths(const StateGraph& g,
                                                const std::function<bool(const Edge&)>& pred);

// Property, status, counts and the numbered witness. Wall time only on
// request, so default output stays byte-stable.
std::string render(const Verdict& v, bool with_time = false);

}  // namespace asp
