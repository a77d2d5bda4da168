#include "asp/dynamics.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <type_traits>

#include <json.hpp>

#include "asp/congruence.hpp"
#include "asp/substitution.hpp"
#include "asp/surface.hpp"
#include "term_internal.hpp"

namespace asp {

// ---------------------------------------------------------------------------
// Expressions

namespace {

EvalError mismatch(const std::string& what) {
  return EvalError{EvalError::Kind::kTypeMismatch, what};
}

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}

}  // namespace

ErrorOr<Value, EvalError> eval_expr(const Expression& e) {
  return std::visit(
      detail::Overloaded{
          [](const ExprConst& c) -> ErrorOr<Value, EvalError> { return c.value; },
          [](const ExprVar& v) -> ErrorOr<Value, EvalError> {
            return EvalError{EvalError::Kind::kUnboundVariable,
                             "unbound variable '" + v.name.str() + "'"};
          },
          [](const ExprBinary& b) -> ErrorOr<Value, EvalError> {
            auto l = eval_expr(b.lhs);
            if (!l) return l;
            auto r = eval_expr(b.rhs);
            if (!r) return r;
            const Value& x = l.value();
            const Value& y = r.value();
            auto ints = [&]() -> std::optional<std::pair<std::int64_t, std::int64_t>> {
              const auto* i = std::get_if<std::int64_t>(&x);
              const auto* j = std::get_if<std::int64_t>(&y);
              if (i == nullptr || j == nullptr) return std::nullopt;
              return std::pair{*i, *j};
            };
            switch (b.op) {
              case BinOp::kAdd:
              case BinOp::kSub:
              case BinOp::kDiv: {
                auto v = ints();
                if (!v) return mismatch("arithmetic on non-integers");
                auto [i, j] = *v;
                if (b.op == BinOp::kAdd) return Value{wrap_add(i, j)};
                if (b.op == BinOp::kSub) return Value{wrap_sub(i, j)};
                if (j == 0) return EvalError{EvalError::Kind::kDivisionByZero, "division by zero"};
                if (i == std::numeric_limits<std::int64_t>::min() && j == -1) return Value{i};
                return Value{i / j};
              }
              case BinOp::kEq:
                if (x.index() != y.index()) return mismatch("comparison of different sorts");
                return Value{x == y};
              case BinOp::kAnd: {
                const auto* i = std::get_if<bool>(&x);
                const auto* j = std::get_if<bool>(&y);
                if (i == nullptr || j == nullptr) return mismatch("'and' on non-booleans");
                return Value{*i && *j};
              }
            }
            return mismatch("unknown operator");
          },
      },
      e.node().v);
}

std::string to_string(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return print(Expression::string(std::get<std::string>(v)));
}

std::string to_string(Rule r) {
  switch (r) {
    case Rule::kOpen:
      return "r:Open";
    case Rule::kROpen:
      return "r:ROpen";
    case Rule::kUpd:
      return "r:Upd";
    case Rule::kIO:
      return "r:I/O";
    case Rule::kPass:
      return "r:Pass";
    case Rule::kSel:
      return "r:Sel";
    case Rule::kClose:
      return "r:Close";
    case Rule::kIfTr:
      return "r:IfTr";
    case Rule::kIfFa:
      return "r:IfFa";
  }
  return "r:?";
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kTerminated:
      return "terminated";
    case RunStatus::kStuck:
      return "stuck";
    case RunStatus::kFuelExhausted:
      return "fuel-exhausted";
  }
  return "?";
}

namespace {

std::string channel_text(ChannelId id) { return "k#" + std::to_string(id); }

std::optional<Channel> channel_subject(const Process& p) {
  auto s = subject(p);
  if (!s || !s->is_channel()) return std::nullopt;
  return s->channel();
}

// Label chosen by a selection, if it can be determined now.
std::optional<Label> selection_label(const Select& s) {
  if (const auto* l = std::get_if<Label>(&s.label)) return *l;
  auto v = eval_expr(std::get<Expression>(s.label));
  if (!v) return std::nullopt;
  const auto* str = std::get_if<std::string>(&v.value());
  if (str == nullptr) return std::nullopt;
  return Label(*str);
}

std::optional<std::vector<Value>> eval_all(const std::vector<Expression>& es) {
  std::vector<Value> out;
  for (const auto& e : es) {
    auto v = eval_expr(e);
    if (!v) return std::nullopt;
    out.push_back(v.value());
  }
  return out;
}

}  // namespace

std::string Redex::summary() const {
  std::string out = to_string(rule);
  switch (rule) {
    case Rule::kOpen:
    case Rule::kROpen:
      if (service) out += " " + service->str();
      break;
    case Rule::kUpd:
      out += " " + participants.at(1).subterm.as<Update>()->loc.str();
      break;
    case Rule::kIO: {
      out += " " + channel_text(channel.value_or(0)) + " (";
      const auto* s = participants.at(0).subterm.as<Send>();
      for (std::size_t i = 0; i < s->payload.size(); ++i) {
        if (i > 0) out += ", ";
        auto v = eval_expr(s->payload[i]);
        out += v ? to_string(v.value()) : "?";
      }
      out += ")";
      break;
    }
    case Rule::kPass: {
      const auto* t = participants.at(0).subterm.as<Throw>();
      out += " " + channel_text(channel.value_or(0)) + " " + print(t->delegated);
      break;
    }
    case Rule::kSel:
      out += " " + channel_text(channel.value_or(0)) + " " +
             (selected_label ? selected_label->str() : "?");
      break;
    case Rule::kClose:
      out += " " + channel_text(channel.value_or(0));
      break;
    case Rule::kIfTr:
    case Rule::kIfFa:
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Redex search

namespace {

struct Sites {
  std::vector<Site> leaves;
  std::vector<Site> locations;  // located components, subterm = the located node
};

void collect_sites(const Process& level, std::vector<std::size_t>& path,
                   std::vector<LocationName>& locs, Sites& out) {
  auto comps = parallel_components(level);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    path.push_back(i);
    if (const auto* l = comps[i].as<Located>()) {
      out.locations.push_back(Site{path, locs, comps[i]});
      locs.push_back(l->loc);
      collect_sites(l->body, path, locs, out);
      locs.pop_back();
    } else {
      out.leaves.push_back(Site{path, locs, comps[i]});
    }
    path.pop_back();
  }
}

Sites sites_of(const Process& body) {
  Sites s;
  std::vector<std::size_t> path;
  std::vector<LocationName> locs;
  collect_sites(body, path, locs, s);
  return s;
}

bool is_prefix(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

std::vector<Redex> redexes_of_body(const Process& body) {
  const Sites s = sites_of(body);
  std::vector<Redex> out;

  // Leaves grouped by channel endpoint.
  std::map<Channel, std::vector<const Site*>> by_channel;
  for (const auto& leaf : s.leaves) {
    if (auto c = channel_subject(leaf.subterm)) by_channel[*c].push_back(&leaf);
  }
  auto partners = [&](const Channel& c) -> const std::vector<const Site*>& {
    static const std::vector<const Site*> none;
    auto it = by_channel.find(c.dual());
    return it == by_channel.end() ? none : it->second;
  };

  for (const auto& a : s.leaves) {
    const Process& p = a.subterm;
    const Name* service = nullptr;
    Rule open_rule = Rule::kOpen;
    if (const auto* acc = p.as<Accept>()) {
      service = &acc->service;
    } else if (const auto* racc = p.as<ReplicatedAccept>()) {
      service = &racc->service;
      open_rule = Rule::kROpen;
    }
    if (service != nullptr) {
      for (const auto& b : s.leaves) {
        const auto* req = b.subterm.as<Request>();
        if (req == nullptr || req->service != *service) continue;
        Redex r{open_rule, {a, b}, std::nullopt, std::nullopt, *service};
        out.push_back(std::move(r));
      }
      continue;
    }
    if (const auto* upd = p.as<Update>()) {
      for (const auto& l : s.locations) {
        const auto* loc = l.subterm.as<Located>();
        if (loc->loc != upd->loc || loc->annotation != 0) continue;
        if (is_prefix(l.path, a.path)) continue;
        out.push_back(Redex{Rule::kUpd, {l, a}, std::nullopt, std::nullopt, std::nullopt});
      }
      continue;
    }
    if (const auto* c = p.as<Conditional>()) {
      auto v = eval_expr(c->cond);
      if (!v) continue;
      const auto* b = std::get_if<bool>(&v.value());
      if (b == nullptr) continue;
      out.push_back(Redex{*b ? Rule::kIfTr : Rule::kIfFa, {a}, std::nullopt, std::nullopt,
                          std::nullopt});
      continue;
    }
    auto k = channel_subject(p);
    if (!k) continue;
    for (const Site* b : partners(*k)) {
      const Process& q = b->subterm;
      if (const auto* snd = p.as<Send>()) {
        const auto* rcv = q.as<Receive>();
        if (rcv == nullptr || rcv->binders.size() != snd->payload.size()) continue;
        if (!eval_all(snd->payload)) continue;
        out.push_back(Redex{Rule::kIO, {a, *b}, std::nullopt, k->id, std::nullopt});
      } else if (const auto* thr = p.as<Throw>()) {
        if (!q.is<Catch>() || !thr->delegated.is_channel()) continue;
        out.push_back(Redex{Rule::kPass, {a, *b}, std::nullopt, k->id, std::nullopt});
      } else if (const auto* sel = p.as<Select>()) {
        const auto* br = q.as<Branch>();
        if (br == nullptr) continue;
        auto l = selection_label(*sel);
        if (!l || !br->arms.contains(*l)) continue;
        out.push_back(Redex{Rule::kSel, {a, *b}, *l, k->id, std::nullopt});
      } else if (p.is<Close>() && k->polarity == Polarity::kPlus) {
        if (!q.is<Close>()) continue;
        out.push_back(Redex{Rule::kClose, {a, *b}, std::nullopt, k->id, std::nullopt});
      }
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const Redex& x, const Redex& y) {
    if (x.rule != y.rule) return x.rule < y.rule;
    for (std::size_t i = 0; i < std::min(x.participants.size(), y.participants.size()); ++i) {
      if (x.participants[i].path != y.participants[i].path) {
        return x.participants[i].path < y.participants[i].path;
      }
    }
    return false;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Rule application by surgery on the soup.

struct Target {
  std::vector<std::size_t> path;
  std::optional<Process> replacement;  // nullopt: keep the node
  int delta = 0;                       // added to every enclosing location
};

Process node_at(const Process& body, const std::vector<std::size_t>& path) {
  Process cur = body;
  for (std::size_t depth = 0; depth < path.size(); ++depth) {
    auto comps = parallel_components(cur);
    if (path[depth] >= comps.size()) throw StuckRedex("site path out of range");
    cur = comps[path[depth]];
    if (depth + 1 < path.size()) {
      const auto* l = cur.as<Located>();
      if (l == nullptr) throw StuckRedex("site path crosses a non-located component");
      cur = l->body;
    }
  }
  return cur;
}

Process rebuild(const Process& level, const std::vector<Target>& targets, std::size_t depth) {
  auto comps = parallel_components(level);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::vector<Target> inner;
    std::optional<Process> replaced;
    int delta = 0;
    for (const auto& t : targets) {
      if (t.path.size() <= depth || t.path[depth] != i) continue;
      if (t.path.size() == depth + 1) {
        if (t.replacement) replaced = t.replacement;
      } else {
        inner.push_back(t);
        delta += t.delta;
      }
    }
    if (replaced) {
      comps[i] = *replaced;
    } else if (!inner.empty()) {
      const auto* l = comps[i].as<Located>();
      const long long h = static_cast<long long>(l->annotation) + delta;
      if (h < 0) {
        throw AnnotationUnderflow("annotation of location '" + l->loc.str() + "' would become " +
                                  std::to_string(h));
      }
      comps[i] = located(l->loc, static_cast<std::uint32_t>(h), rebuild(l->body, inner, depth + 1));
    }
  }
  return parallel_all(comps);
}

}  // namespace

std::vector<Redex> enabled_redexes(const Process& p) {
  return redexes_of_body(open_scope(tidy(p)).body);
}

Process step(const Process& p, const Redex& r) {
  const Process t = tidy(p);
  Scope scope = open_scope(t);
  const Process& body = scope.body;

  std::vector<Process> found;
  for (const auto& site : r.participants) {
    Process here = node_at(body, site.path);
    if (!(here == site.subterm)) throw StuckRedex(to_string(r.rule) + ": site no longer matches");
    found.push_back(here);
  }
  auto expect_count = [&](std::size_t n) {
    if (found.size() != n) throw StuckRedex(to_string(r.rule) + ": wrong number of participants");
  };

  std::vector<Target> targets;
  const auto& ps = r.participants;
  switch (r.rule) {
    case Rule::kOpen:
    case Rule::kROpen: {
      expect_count(2);
      const ChannelId fresh = max_channel_id(t).value_or(0) + 1;
      const auto* req = found[1].as<Request>();
      if (req == nullptr) throw StuckRedex("r:Open: second participant is not a request");
      Process server;
      if (r.rule == Rule::kOpen) {
        const auto* acc = found[0].as<Accept>();
        if (acc == nullptr || acc->service != req->service) throw StuckRedex("r:Open: no accept");
        server = substitute_endpoint(acc->body, acc->binder, plus(fresh));
      } else {
        const auto* acc = found[0].as<ReplicatedAccept>();
        if (acc == nullptr || acc->service != req->service) throw StuckRedex("r:ROpen: no accept*");
        server = parallel(substitute_endpoint(acc->body, acc->binder, plus(fresh)), found[0]);
      }
      Process client = substitute_endpoint(req->body, req->binder, minus(fresh));
      targets.push_back({ps[0].path, server, +1});
      targets.push_back({ps[1].path, client, +1});
      scope.binders.push_back(fresh);
      break;
    }
    case Rule::kUpd: {
      expect_count(2);
      const auto* loc = found[0].as<Located>();
      const auto* upd = found[1].as<Update>();
      if (loc == nullptr || upd == nullptr || loc->loc != upd->loc || loc->annotation != 0 ||
          is_prefix(ps[0].path, ps[1].path)) {
        throw StuckRedex("r:Upd: shape mismatch");
      }
      Process result = upd->body;
      for (const auto& x : free_process_vars(upd->body)) {
        result = substitute_process(result, x, loc->body);
      }
      targets.push_back({ps[0].path, result, 0});
      targets.push_back({ps[1].path, inaction(), 0});
      break;
    }
    case Rule::kIO: {
      expect_count(2);
      const auto* snd = found[0].as<Send>();
      const auto* rcv = found[1].as<Receive>();
      if (snd == nullptr || rcv == nullptr || snd->payload.size() != rcv->binders.size() ||
          !snd->ep.is_channel() || !rcv->ep.is_channel() ||
          !are_dual(snd->ep.channel(), rcv->ep.channel())) {
        throw StuckRedex("r:I/O: shape mismatch");
      }
      auto values = eval_all(snd->payload);
      if (!values) throw StuckRedex("r:I/O: payload does not evaluate");
      targets.push_back({ps[0].path, snd->cont, 0});
      targets.push_back({ps[1].path, substitute_values(rcv->cont, rcv->binders, *values), 0});
      break;
    }
    case Rule::kPass: {
      expect_count(2);
      const auto* thr = found[0].as<Throw>();
      const auto* cat = found[1].as<Catch>();
      if (thr == nullptr || cat == nullptr || !thr->delegated.is_channel() ||
          !thr->ep.is_channel() || !cat->ep.is_channel() ||
          !are_dual(thr->ep.channel(), cat->ep.channel())) {
        throw StuckRedex("r:Pass: shape mismatch");
      }
      targets.push_back({ps[0].path, thr->cont, -1});
      targets.push_back(
          {ps[1].path, substitute_endpoint(cat->cont, cat->binder, thr->delegated.channel()), +1});
      break;
    }
    case Rule::kSel: {
      expect_count(2);
      const auto* sel = found[0].as<Select>();
      const auto* br = found[1].as<Branch>();
      if (sel == nullptr || br == nullptr || !sel->ep.is_channel() || !br->ep.is_channel() ||
          !are_dual(sel->ep.channel(), br->ep.channel())) {
        throw StuckRedex("r:Sel: shape mismatch");
      }
      auto l = selection_label(*sel);
      if (!l || !br->arms.contains(*l)) throw StuckRedex("r:Sel: label not offered");
      targets.push_back({ps[0].path, sel->cont, 0});
      targets.push_back({ps[1].path, br->arms.at(*l), 0});
      break;
    }
    case Rule::kClose: {
      expect_count(2);
      const auto* a = found[0].as<Close>();
      const auto* b = found[1].as<Close>();
      if (a == nullptr || b == nullptr || !a->ep.is_channel() || !b->ep.is_channel() ||
          !are_dual(a->ep.channel(), b->ep.channel())) {
        throw StuckRedex("r:Close: shape mismatch");
      }
      targets.push_back({ps[0].path, a->cont, -1});
      targets.push_back({ps[1].path, b->cont, -1});
      break;
    }
    case Rule::kIfTr:
    case Rule::kIfFa: {
      expect_count(1);
      const auto* c = found[0].as<Conditional>();
      if (c == nullptr) throw StuckRedex("r:If: not a conditional");
      auto v = eval_expr(c->cond);
      const bool* b = v ? std::get_if<bool>(&v.value()) : nullptr;
      if (b == nullptr || *b != (r.rule == Rule::kIfTr)) throw StuckRedex("r:If: guard mismatch");
      targets.push_back({ps[0].path, *b ? c->then_branch : c->else_branch, 0});
      break;
    }
  }
  return tidy(close_scope(scope.binders, rebuild(body, targets, 0)));
}

EvalContext context_of(const Process& p, const Site& s) {
  Process level = open_scope(tidy(p)).body;
  std::vector<Frame> frames;
  std::optional<Locus> here;
  for (std::size_t depth = 0; depth < s.path.size(); ++depth) {
    auto comps = parallel_components(level);
    const std::size_t i = s.path[depth];
    if (i >= comps.size()) throw StuckRedex("site path out of range");
    std::vector<Process> rest;
    for (std::size_t j = 0; j < comps.size(); ++j) {
      if (j != i) rest.push_back(comps[j]);
    }
    if (here || comps.size() > 1) frames.push_back(Frame{here, parallel_all(rest)});
    if (depth + 1 < s.path.size()) {
      const auto* l = comps[i].as<Located>();
      if (l == nullptr) throw StuckRedex("site path crosses a non-located component");
      here = Locus{l->loc, l->annotation};
      level = l->body;
    }
  }
  return EvalContext(std::move(frames));
}

namespace {

void endpoints_in(const Process& p, std::set<Channel>& out) {
  if (auto s = subject(p); s && s->is_channel()) out.insert(s->channel());
  if (const auto* t = p.as<Throw>(); t != nullptr && t->delegated.is_channel()) {
    out.insert(t->delegated.channel());
  }
  for (const auto& c : children(p)) endpoints_in(c, out);
}

}  // namespace

Process recount_annotations(const Process& p) {
  if (const auto* l = p.as<Located>()) {
    std::set<Channel> eps;
    endpoints_in(l->body, eps);
    return located(l->loc, static_cast<std::uint32_t>(eps.size()), recount_annotations(l->body));
  }
  return detail::map_children(p, [](const Process& c) { return recount_annotations(c); });
}

namespace {

bool terminated_soup(const Process& level) {
  for (const auto& c : parallel_components(level)) {
    if (c.is<ReplicatedAccept>()) continue;
    if (const auto* l = c.as<Located>(); l != nullptr && terminated_soup(l->body)) continue;
    return false;
  }
  return true;
}

}  // namespace

bool is_terminated(const Process& p) {
  Scope s = open_scope(tidy(p));
  return s.binders.empty() && terminated_soup(s.body);
}

ReductionTrace run(const Process& p, const Scheduler& sched, std::size_t fuel) {
  ReductionTrace trace;
  trace.initial = p;
  trace.scheduler_seed = sched.seed;
  std::mt19937_64 rng(sched.seed);
  Process state = tidy(p);
  for (;;) {
    auto redexes = enabled_redexes(state);
    if (redexes.empty()) {
      trace.status = is_terminated(state) ? RunStatus::kTerminated : RunStatus::kStuck;
      break;
    }
    if (trace.steps.size() >= fuel) {
      trace.status = RunStatus::kFuelExhausted;
      break;
    }
    std::size_t pick = 0;
    switch (sched.policy) {
      case Scheduler::Policy::kLeftmost:
        break;
      case Scheduler::Policy::kRandom:
        pick = static_cast<std::size_t>(rng() % redexes.size());
        break;
      case Scheduler::Policy::kInteractive:
        pick = sched.pick ? sched.pick(state, redexes) : 0;
        if (pick >= redexes.size()) throw std::out_of_range("interactive pick out of range");
        break;
    }
    state = step(state, redexes[pick]);
    trace.steps.push_back(TraceStep{trace.steps.size() + 1, redexes[pick], state});
  }
  return trace;
}

std::string trace_jsonl(const ReductionTrace& t, bool with_terms) {
  using nlohmann::ordered_json;
  std::string out;
  for (const auto& s : t.steps) {
    ordered_json rec;
    rec["index"] = s.index;
    rec["rule"] = to_string(s.redex.rule);
    ordered_json sites = ordered_json::array();
    for (const auto& site : s.redex.participants) {
      ordered_json locs = ordered_json::array();
      for (const auto& l : site.locations) locs.push_back(l.str());
      sites.push_back(locs);
    }
    rec["sites"] = sites;
    rec["redex"] = s.redex.summary();
    if (with_terms) rec["term"] = print(s.result);
    out += rec.dump() + "\n";
  }
  ordered_json fin;
  fin["status"] = to_string(t.status);
  fin["steps"] = t.steps.size();
  fin["seed"] = t.scheduler_seed;
  if (with_terms) fin["term"] = print(t.final_state());
  out += fin.dump() + "\n";
  return out;
}

}  // namespace asp
