#include "asp/meta.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "asp/congruence.hpp"

namespace asp {

namespace {

std::optional<Channel> channel_subject(const Process& p) {
  auto s = subject(p);
  if (!s || !s->is_channel()) return std::nullopt;
  return s->channel();
}

// Leaves of tidy(p) grouped by the channel id of their subject.
std::map<ChannelId, std::vector<Process>> kappa_groups(const Process& p) {
  std::map<ChannelId, std::vector<Process>> out;
  for (const auto& d : decompose(open_scope(tidy(p)).body)) {
    if (auto c = channel_subject(d.subterm)) out[c->id].push_back(d.subterm);
  }
  return out;
}

bool ordered_redex(const Process& a, const Process& b) {
  if (const auto* s = a.as<Send>()) {
    const auto* r = b.as<Receive>();
    return r != nullptr && r->binders.size() == s->payload.size();
  }
  if (a.is<Throw>()) return b.is<Catch>();
  if (const auto* s = a.as<Select>()) {
    const auto* br = b.as<Branch>();
    if (br == nullptr) return false;
    if (const auto* l = std::get_if<Label>(&s->label)) return br->arms.contains(*l);
    auto v = eval_expr(std::get<Expression>(s->label));
    if (!v) return false;
    const auto* str = std::get_if<std::string>(&v.value());
    return str != nullptr && br->arms.contains(Label(*str));
  }
  if (a.is<Close>()) return b.is<Close>();
  return false;
}

}  // namespace

std::vector<KappaProcess> kappa_processes(const Process& p, ChannelId k) {
  std::vector<KappaProcess> out;
  for (auto& d : decompose(open_scope(tidy(p)).body)) {
    auto c = channel_subject(d.subterm);
    if (c && c->id == k) out.push_back(KappaProcess{std::move(d.context), std::move(d.subterm)});
  }
  return out;
}

bool is_kappa_redex(const Process& a, const Process& b) {
  auto ca = channel_subject(a);
  auto cb = channel_subject(b);
  if (!ca || !cb || !are_dual(*ca, *cb)) return false;
  return ordered_redex(a, b) || ordered_redex(b, a);
}

std::optional<ChannelId> error_channel(const Process& p) {
  for (const auto& [k, group] : kappa_groups(p)) {
    if (group.size() >= 3) return k;
    if (group.size() == 2 && !is_kappa_redex(group[0], group[1])) return k;
  }
  return std::nullopt;
}

bool is_error(const Process& p) { return error_channel(p).has_value(); }

std::vector<ChannelId> kappa_redex_channels(const Process& p) {
  std::vector<ChannelId> out;
  for (const auto& [k, group] : kappa_groups(p)) {
    bool found = false;
    for (std::size_t i = 0; i < group.size() && !found; ++i) {
      for (std::size_t j = i + 1; j < group.size() && !found; ++j) {
        found = is_kappa_redex(group[i], group[j]);
      }
    }
    if (found) out.push_back(k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exploration

std::vector<const Edge*> StateGraph::out(std::size_t s) const {
  auto lo = std::lower_bound(edges.begin(), edges.end(), s,
                             [](const Edge& e, std::size_t v) { return e.source < v; });
  std::vector<const Edge*> res;
  for (auto it = lo; it != edges.end() && it->source == s; ++it) res.push_back(&*it);
  return res;
}

std::vector<Edge> StateGraph::path_to(std::size_t s) const {
  std::vector<Edge> path;
  while (s != root) {
    const Edge& e = edges.at(parent_edge.at(s));
    path.push_back(e);
    s = e.source;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

struct Successor {
  Redex redex;
  Process state;
  std::string key;
};

std::vector<Successor> successors(const Process& s) {
  std::vector<Successor> out;
  for (auto& r : enabled_redexes(s)) {
    Process next;
    try {
      next = normalize(step(s, r));
    } catch (const AnnotationUnderflow&) {
      // Only reachable from ill-annotated input; the redex cannot fire.
      continue;
    }
    std::string key = term_key(next);
    out.push_back(Successor{std::move(r), std::move(next), std::move(key)});
  }
  return out;
}

std::vector<std::vector<Successor>> expand_layer(const StateGraph& g,
                                                 const std::vector<std::size_t>& frontier,
                                                 unsigned jobs) {
  std::vector<std::vector<Successor>> out(frontier.size());
  const unsigned workers =
      std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(frontier.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < frontier.size(); ++i) out[i] = successors(g.states[frontier[i]]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < frontier.size(); i = next++) {
        out[i] = successors(g.states[frontier[i]]);
      }
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace

StateGraph explore(const Process& p, const ExploreBounds& bounds) {
  StateGraph g;
  std::unordered_map<std::string, std::size_t> index;
  Process root = normalize(p);
  index.emplace(term_key(root), 0);
  g.states.push_back(root);
  g.depth.push_back(0);
  g.parent_edge.push_back(0);

  std::vector<std::size_t> frontier{0};
  for (std::size_t depth = 0; !frontier.empty(); ++depth) {
    if (depth >= bounds.max_depth) {
      for (std::size_t s : frontier) {
        if (!enabled_redexes(g.states[s]).empty()) g.truncated = true;
      }
      break;
    }
    auto layer = expand_layer(g, frontier, bounds.jobs);
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      for (auto& succ : layer[i]) {
        auto it = index.find(succ.key);
        std::size_t target = 0;
        if (it != index.end()) {
          target = it->second;
        } else {
          if (g.states.size() >= bounds.max_states) {
            g.truncated = true;
            continue;
          }
          target = g.states.size();
          index.emplace(std::move(succ.key), target);
          g.states.push_back(std::move(succ.state));
          g.depth.push_back(depth + 1);
          g.parent_edge.push_back(g.edges.size());
          next.push_back(target);
        }
        g.edges.push_back(Edge{frontier[i], target, std::move(succ.redex)});
      }
    }
    frontier = std::move(next);
  }
  return g;
}

std::vector<std::size_t> annotation_discrepancies(const StateGraph& g) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    if (!(recount_annotations(g.states[i]) == g.states[i])) out.push_back(i);
  }
  return out;
}

std::optional<PathCount> count_on_maximal_paths(const StateGraph& g,
                                                const std::function<bool(const Edge&)>& pred) {
  if (g.truncated) return std::nullopt;
  enum Color : std::uint8_t { kWhite, kGrey, kBlack };
  std::vector<Color> color(g.states.size(), kWhite);
  std::vector<PathCount> memo(g.states.size());
  // Iterative post-order DFS: (state, next out-edge position).
  std::vector<std::pair<std::size_t, std::size_t>> stack{{g.root, 0}};
  std::vector<std::vector<const Edge*>> outs(g.states.size());
  outs[g.root] = g.out(g.root);
  color[g.root] = kGrey;
  while (!stack.empty()) {
    auto& [s, pos] = stack.back();
    if (pos < outs[s].size()) {
      const std::size_t t = outs[s][pos++]->target;
      if (color[t] == kGrey) return std::nullopt;
      if (color[t] == kWhite) {
        color[t] = kGrey;
        outs[t] = g.out(t);
        stack.emplace_back(t, 0);
      }
      continue;
    }
    PathCount c;
    bool first = true;
    for (const Edge* e : outs[s]) {
      const std::size_t add = pred(*e) ? 1 : 0;
      const PathCount& sub = memo[e->target];
      if (first) {
        c = {sub.min + add, sub.max + add};
        first = false;
      } else {
        c.min = std::min(c.min, sub.min + add);
        c.max = std::max(c.max, sub.max + add);
      }
    }
    memo[s] = c;
    color[s] = kBlack;
    stack.pop_back();
  }
  return memo[g.root];
}

// ---------------------------------------------------------------------------
// Harnesses

std::string to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::kHolds:
      return "holds";
    case VerdictStatus::kViolated:
      return "violated";
    case VerdictStatus::kPreconditionFailed:
      return "precondition-failed";
    case VerdictStatus::kIndeterminate:
      return "indeterminate";
  }
  return "?";
}

bool replay(const Process& root, const std::vector<WitnessStep>& witness) {
  Process state = normalize(root);
  for (std::size_t i = 0; i < witness.size(); ++i) {
    Process raw;
    try {
      raw = step(state, witness[i].redex);
    } catch (const StuckRedex&) {
      return false;
    }
    Process next = normalize(raw);
    const bool last = i + 1 == witness.size();
    if (!(next == witness[i].result) && !(last && raw == witness[i].result)) return false;
    state = next;
  }
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_ = Clock::now();
};

std::vector<WitnessStep> witness_to(const StateGraph& g, std::size_t s) {
  std::vector<WitnessStep> w;
  for (const auto& e : g.path_to(s)) w.push_back(WitnessStep{e.redex, g.states[e.target]});
  return w;
}

void fill_counts(Verdict& v, const StateGraph& g) {
  v.states = g.states.size();
  v.edges = g.edges.size();
  v.truncated = g.truncated;
}

// Typing precondition shared by the subject reduction and safety harnesses.
std::optional<std::string> typing_precondition(const Process& p, const FirstOrderEnv& g,
                                               const HigherOrderEnv& t) {
  auto j = typecheck(g, t, p);
  if (!j) return "initial term is ill-typed: " + to_string(j.error());
  if (!balanced(j->typing)) return "initial typing is not balanced: " + to_string(j->typing);
  return std::nullopt;
}

template <class Bad>
Verdict reachability(std::string property, const Process& p, const ExploreBounds& bounds,
                     Bad bad) {
  Timer timer;
  Verdict v;
  v.property = std::move(property);
  v.root = normalize(p);
  StateGraph g = explore(p, bounds);
  fill_counts(v, g);
  for (std::size_t s = 0; s < g.states.size(); ++s) {
    if (auto why = bad(g.states[s])) {
      v.status = VerdictStatus::kViolated;
      v.message = *why;
      v.witness = witness_to(g, s);
      break;
    }
  }
  if (!v.violated()) v.status = g.truncated ? VerdictStatus::kIndeterminate : VerdictStatus::kHolds;
  v.seconds = timer.seconds();
  return v;
}

Verdict precondition_failed(std::string property, const Process& p, std::string message) {
  Verdict v;
  v.property = std::move(property);
  v.status = VerdictStatus::kPreconditionFailed;
  v.root = normalize(p);
  v.message = std::move(message);
  return v;
}

}  // namespace

Verdict check_subject_reduction(const Process& p, const FirstOrderEnv& g, const HigherOrderEnv& t,
                                const ExploreBounds& bounds) {
  if (auto why = typing_precondition(p, g, t)) return precondition_failed("subject-reduction", p, *why);
  return reachability("subject-reduction", p, bounds,
                      [&](const Process& s) -> std::optional<std::string> {
                        auto j = typecheck(g, t, s);
                        if (!j) return "state does not retype: " + to_string(j.error());
                        if (!balanced(j->typing)) {
                          return "retyped typing is not balanced: " + to_string(j->typing);
                        }
                        return std::nullopt;
                      });
}

Verdict check_safety(const Process& p, const FirstOrderEnv& g, const HigherOrderEnv& t,
                     const ExploreBounds& bounds) {
  if (auto why = typing_precondition(p, g, t)) return precondition_failed("safety", p, *why);
  return reachability("safety", p, bounds, [](const Process& s) -> std::optional<std::string> {
    if (auto k = error_channel(s)) return "error on channel k#" + std::to_string(*k);
    return std::nullopt;
  });
}

Verdict check_update_consistency(const Process& p, const ExploreBounds& bounds) {
  Timer timer;
  Verdict v;
  v.property = "update-consistency";
  v.root = normalize(p);
  StateGraph g = explore(p, bounds);
  fill_counts(v, g);
  for (const auto& e : g.edges) {
    if (e.redex.rule != Rule::kUpd) continue;
    const Process& before = g.states[e.source];
    auto live = kappa_redex_channels(before);
    if (live.empty()) continue;
    // The raw successor keeps channel ids, so κ means the same session.
    const Process after = step(before, e.redex);
    auto still = kappa_redex_channels(after);
    for (ChannelId k : live) {
      if (std::find(still.begin(), still.end(), k) != still.end()) continue;
      v.status = VerdictStatus::kViolated;
      v.message = "update on " + e.redex.participants.at(1).subterm.as<Update>()->loc.str() +
                  " destroys the k#" + std::to_string(k) + " redex";
      v.witness = witness_to(g, e.source);
      v.witness.push_back(WitnessStep{e.redex, after});
      break;
    }
    if (v.violated()) break;
  }
  if (!v.violated()) v.status = g.truncated ? VerdictStatus::kIndeterminate : VerdictStatus::kHolds;
  v.seconds = timer.seconds();
  return v;
}

std::string render(const Verdict& v, bool with_time) {
  std::ostringstream os;
  os << v.property << ": " << to_string(v.status) << "\n";
  os << "  states: " << v.states << ", edges: " << v.edges
     << ", truncated: " << (v.truncated ? "true" : "false") << "\n";
  if (with_time) os << "  time: " << v.seconds << "s\n";
  if (!v.message.empty()) os << "  " << v.message << "\n";
  if (v.violated()) {
    os << "  witness (" << v.witness.size() << " steps):\n";
    for (std::size_t i = 0; i < v.witness.size(); ++i) {
      os << "    " << i + 1 << ". " << v.witness[i].redex.summary();
      for (const auto& site : v.witness[i].redex.participants) {
        os << " [";
        for (std::size_t j = 0; j < site.locations.size(); ++j) {
          os << (j > 0 ? "/" : "") << site.locations[j].str();
        }
        os << "]";
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace asp
