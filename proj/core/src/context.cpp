#include "asp/context.hpp"

#include <string>

#include "asp/error.hpp"

namespace asp {

EvalContext EvalContext::located(LocationName l, std::uint32_t h, EvalContext inner,
                                 Process frame) {
  std::vector<Frame> frames;
  frames.push_back(Frame{Locus{std::move(l), h}, std::move(frame)});
  frames.insert(frames.end(), inner.frames_.begin(), inner.frames_.end());
  return EvalContext(std::move(frames));
}

EvalContext EvalContext::beside(EvalContext inner, Process frame) {
  std::vector<Frame> frames;
  frames.push_back(Frame{std::nullopt, std::move(frame)});
  frames.insert(frames.end(), inner.frames_.begin(), inner.frames_.end());
  return EvalContext(std::move(frames));
}

std::vector<LocationName> EvalContext::spine() const {
  std::vector<LocationName> out;
  for (const auto& f : frames_) {
    if (f.locus) out.push_back(f.locus->loc);
  }
  return out;
}

Process plug(const EvalContext& c, const Process& p) {
  Process cur = p;
  const auto& frames = c.frames();
  for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
    if (!it->siblings.is<Inaction>()) cur = parallel(cur, it->siblings);
    if (it->locus) cur = located(it->locus->loc, it->locus->annotation, cur);
  }
  return cur;
}

EvalContext adjust_annotations(const EvalContext& c, int delta) {
  std::vector<Frame> frames = c.frames();
  for (auto& f : frames) {
    if (!f.locus) continue;
    const long long next = static_cast<long long>(f.locus->annotation) + delta;
    if (next < 0) {
      throw AnnotationUnderflow("annotation of location '" + f.locus->loc.str() +
                                "' would become " + std::to_string(next));
    }
    f.locus->annotation = static_cast<std::uint32_t>(next);
  }
  return EvalContext(std::move(frames));
}

std::vector<Process> parallel_components(const Process& p) {
  std::vector<Process> out;
  std::vector<Process> stack{p};
  while (!stack.empty()) {
    Process cur = stack.back();
    stack.pop_back();
    if (const auto* par = cur.as<Parallel>()) {
      stack.push_back(par->right);
      stack.push_back(par->left);
    } else if (!cur.is<Inaction>()) {
      out.push_back(cur);
    }
  }
  return out;
}

namespace {

Process siblings_of(const std::vector<Process>& comps, std::size_t skip) {
  std::vector<Process> rest;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (i != skip) rest.push_back(comps[i]);
  }
  return parallel_all(rest);
}

// Decompositions of the soup `comps`, where the innermost frame produced at
// this level gets the locus `here` (nullopt at the outermost level).
void decompose_level(const std::vector<Process>& comps, const std::optional<Locus>& here,
                     std::vector<Decomposition>& out) {
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const Process& c = comps[i];
    std::vector<Frame> prefix;
    // A lone component at the outermost level needs no frame at all.
    if (here || comps.size() > 1) prefix.push_back(Frame{here, siblings_of(comps, i)});

    if (const auto* l = c.as<Located>()) {
      std::vector<Decomposition> inner;
      decompose_level(parallel_components(l->body), Locus{l->loc, l->annotation}, inner);
      for (auto& d : inner) {
        std::vector<Frame> frames = prefix;
        frames.insert(frames.end(), d.context.frames().begin(), d.context.frames().end());
        out.push_back({EvalContext(std::move(frames)), d.subterm});
      }
    } else {
      out.push_back({EvalContext(prefix), c});
    }
  }
}

}  // namespace

std::vector<Decomposition> decompose(const Process& p) {
  std::vector<Decomposition> out;
  decompose_level(parallel_components(p), std::nullopt, out);
  return out;
}

}  // namespace asp
