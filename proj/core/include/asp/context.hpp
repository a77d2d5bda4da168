#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "asp/term.hpp"

namespace asp {

struct Locus {
  LocationName loc;
  std::uint32_t annotation = 0;

  friend bool operator==(const Locus&, const Locus&) = default;
};

// One layer of an evaluation context: `l[h]{ inner | siblings }` when a locus
// is present, or the bare `inner | siblings` found at the outermost level.
struct Frame {
  std::optional<Locus> locus;
  Process siblings;

  friend bool operator==(const Frame&, const Frame&) = default;
};

// Evaluation context with exactly one hole. Frames run outermost first; an
// empty frame list is the hole itself.
class EvalContext {
 public:
  EvalContext() = default;
  explicit EvalContext(std::vector<Frame> frames) : frames_(std::move(frames)) {}

  static EvalContext hole() { return {}; }
  // l[h]{ inner | frame }
  static EvalContext located(LocationName loc, std::uint32_t h, EvalContext inner,
                             Process frame);
  // inner | frame
  static EvalContext beside(EvalContext inner, Process frame);

  bool is_hole() const { return frames_.empty(); }
  const std::vector<Frame>& frames() const { return frames_; }

  // Location names along the spine, outermost first.
  std::vector<LocationName> spine() const;

  friend bool operator==(const EvalContext&, const EvalContext&) = default;

 private:
  std::vector<Frame> frames_;
};

// C{p}.
Process plug(const EvalContext& c, const Process& p);

// C+ / C- / E++ / E--: adds delta to every annotation on the spine.
// Throws AnnotationUnderflow if any annotation would become negative.
EvalContext adjust_annotations(const EvalContext& c, int delta);

struct Decomposition {
  EvalContext context;
  Process subterm;
};

// Every way of writing p as C{q} where q is neither a parallel composition,
// a located process nor inaction. Restrictions are leaves; callers work on
// the restriction-free body (see open_scope in congruence.hpp).
std::vector<Decomposition> decompose(const Process& p);

// Flattens nested parallel compositions, dropping inaction.
std::vector<Process> parallel_components(const Process& p);

}  // namespace asp
