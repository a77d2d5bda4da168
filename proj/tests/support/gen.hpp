#pragma once

// Hand-rolled random generators for the property tests. Every generator
// takes the engine by reference; tests seed it with a fixed constant.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "asp/session_types.hpp"
#include "asp/term.hpp"

namespace asp::testgen {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
inline bool coin(Rng& rng, unsigned percent) { return pick(rng, 100) < percent; }

inline BasicType random_sort(Rng& rng) {
  static constexpr BasicType kSorts[] = {BasicType::kInt, BasicType::kBool, BasicType::kStr};
  return kSorts[pick(rng, 3)];
}

inline std::vector<BasicType> random_sorts(Rng& rng) {
  std::vector<BasicType> out(1 + pick(rng, 2));
  for (auto& s : out) s = random_sort(rng);
  return out;
}

inline std::map<Label, SessionType> random_arms(Rng& rng, int depth,
                                                SessionType (*gen)(Rng&, int, bool),
                                                bool delegation) {
  static const char* kLabels[] = {"ok", "fail", "more", "stop"};
  std::map<Label, SessionType> arms;
  const std::size_t n = 1 + pick(rng, 3);
  for (std::size_t i = 0; i < n; ++i) arms.emplace(Label(kLabels[pick(rng, 4)]), gen(rng, depth - 1, delegation));
  return arms;
}

// Session type of depth at most `depth` (end has depth 0).
inline SessionType random_type(Rng& rng, int depth, bool delegation = true) {
  if (depth <= 0 || coin(rng, 15)) return SessionType::end();
  switch (pick(rng, delegation ? 6 : 4)) {
    case 0: return SessionType::send(random_sorts(rng), random_type(rng, depth - 1, delegation));
    case 1: return SessionType::receive(random_sorts(rng), random_type(rng, depth - 1, delegation));
    case 2: return SessionType::branch(random_arms(rng, depth, random_type, delegation));
    case 3: return SessionType::select(random_arms(rng, depth, random_type, delegation));
    case 4:
      return SessionType::throw_(random_type(rng, depth - 1, delegation),
                                 random_type(rng, depth - 1, delegation));
    default:
      return SessionType::catch_(random_type(rng, depth - 1, delegation),
                                 random_type(rng, depth - 1, delegation));
  }
}

inline Expression random_constant(Rng& rng, BasicType s) {
  switch (s) {
    case BasicType::kInt: return Expression::integer(static_cast<std::int64_t>(pick(rng, 100)));
    case BasicType::kBool: return Expression::boolean(coin(rng, 50));
    default: {
      static const char* kWords[] = {"ok", "fail", "a b", "x\"y", ""};
      return Expression::string(kWords[pick(rng, 5)]);
    }
  }
}

inline Expression random_expression(Rng& rng, int depth, const std::vector<Name>& vars) {
  if (depth <= 0 || coin(rng, 40)) {
    if (!vars.empty() && coin(rng, 30)) return Expression::var(vars[pick(rng, vars.size())]);
    return random_constant(rng, random_sort(rng));
  }
  static constexpr BinOp kOps[] = {BinOp::kAdd, BinOp::kSub, BinOp::kDiv, BinOp::kEq, BinOp::kAnd};
  return Expression::binary(kOps[pick(rng, 5)], random_expression(rng, depth - 1, vars),
                            random_expression(rng, depth - 1, vars));
}

// ---------------------------------------------------------------------------
// Untyped terms: every constructor, free names, channels k#1..k#3 bound or
// free. Meant for syntactic properties, not for reduction.

struct RawGen {
  Rng& rng;
  std::vector<Name> values;
  std::vector<Name> sessions;
  int update_depth = 0;  // $X is only written inside update bodies

  Endpoint endpoint() {
    if (!sessions.empty() && coin(rng, 50)) return sessions[pick(rng, sessions.size())];
    const ChannelId id = 1 + static_cast<ChannelId>(pick(rng, 3));
    return coin(rng, 50) ? Endpoint(plus(id)) : Endpoint(minus(id));
  }

  Name fresh_value() { return Name("v" + std::to_string(values.size())); }
  Name fresh_session() { return Name("x" + std::to_string(sessions.size())); }

  template <class F>
  Process with_session(const Name& x, F&& f) {
    sessions.push_back(x);
    Process p = f();
    sessions.pop_back();
    return p;
  }

  Process term(int depth) {
    if (depth <= 0) return update_depth == 0 || coin(rng, 50) ? inaction() : process_var(pvar("X"));
    static const char* kServices[] = {"a", "b", "c"};
    static const char* kLocs[] = {"l1", "l2", "w3"};
    static const char* kLabels[] = {"ok", "fail", "more"};
    switch (pick(rng, 17)) {
      case 0: {
        Name x = fresh_session();
        return request(Name(kServices[pick(rng, 3)]), x, with_session(x, [&] { return term(depth - 1); }));
      }
      case 1: {
        Name x = fresh_session();
        return accept(Name(kServices[pick(rng, 3)]), x, with_session(x, [&] { return term(depth - 1); }));
      }
      case 2: {
        Name x = fresh_session();
        return replicated_accept(Name(kServices[pick(rng, 3)]), x,
                                 with_session(x, [&] { return term(depth - 1); }));
      }
      case 3:
        return located(LocationName(kLocs[pick(rng, 3)]), static_cast<std::uint32_t>(pick(rng, 3)),
                       term(depth - 1));
      case 4: {
        ++update_depth;
        Process body = term(depth - 1);
        --update_depth;
        return update(LocationName(kLocs[pick(rng, 3)]), body);
      }
      case 5: {
        std::vector<Expression> payload;
        const std::size_t n = 1 + pick(rng, 2);
        for (std::size_t i = 0; i < n; ++i) payload.push_back(random_expression(rng, 2, values));
        return send(endpoint(), std::move(payload), term(depth - 1));
      }
      case 6: {
        std::vector<Name> xs;
        const std::size_t n = 1 + pick(rng, 2);
        for (std::size_t i = 0; i < n; ++i) {
          xs.push_back(fresh_value());
          values.push_back(xs.back());
        }
        Endpoint k = endpoint();
        Process body = term(depth - 1);
        values.resize(values.size() - n);
        return receive(k, std::move(xs), body);
      }
      case 7: {
        Endpoint k = endpoint();
        return throw_(k, endpoint(), term(depth - 1));
      }
      case 8: {
        Endpoint k = endpoint();
        Name x = fresh_session();
        return catch_(k, x, with_session(x, [&] { return term(depth - 1); }));
      }
      case 9: {
        Endpoint k = endpoint();
        std::map<Label, Process> arms;
        const std::size_t n = 1 + pick(rng, 2);
        for (std::size_t i = 0; i < n; ++i) arms.emplace(Label(kLabels[pick(rng, 3)]), term(depth - 1));
        return branch(k, std::move(arms));
      }
      case 10: {
        Endpoint k = endpoint();
        if (coin(rng, 20)) return select(k, random_expression(rng, 1, values), term(depth - 1));
        return select(k, Label(kLabels[pick(rng, 3)]), term(depth - 1));
      }
      case 11:
      case 12: return parallel(term(depth - 1), term(depth - 1));
      case 13:
        return conditional(random_expression(rng, 2, values), term(depth - 1), term(depth - 1));
      case 14: return close(endpoint(), term(depth - 1));
      case 15: return restrict(1 + static_cast<ChannelId>(pick(rng, 3)), term(depth - 1));
      default: return inaction();
    }
  }
};

inline Process random_term(Rng& rng, int depth) {
  RawGen g{rng, {}, {}, 0};
  return g.term(depth);
}

// ---------------------------------------------------------------------------
// Well-typed systems: a few sessions, each a client/server pair following a
// random type and its dual, some with a delegated side session. Components
// are scattered over nested locations; some locations get an update.

struct TypedSystem {
  FirstOrderEnv gamma;
  HigherOrderEnv theta;
  Process main;
};

struct TypedGen {
  Rng& rng;
  int fresh = 0;
  // Open sessions the current component may use for delegation: endpoint
  // name and the type it still has to follow.
  FirstOrderEnv gamma;

  Name fresh_name(const char* prefix) { return Name(prefix + std::to_string(fresh++)); }

  // Follows t on endpoint x. Delegations are built from a helper session,
  // collected in `side` and spliced in next to the component.
  Process follow(const SessionType& t, const Name& x, std::vector<Process>& side,
                 std::vector<Name>& vars) {
    if (t.is_end()) return close(x, inaction());
    if (const auto* s = t.as<TSend>()) {
      std::vector<Expression> payload;
      for (auto sort : s->sorts) payload.push_back(random_constant(rng, sort));
      return send(x, std::move(payload), follow(s->cont, x, side, vars));
    }
    if (const auto* r = t.as<TReceive>()) {
      std::vector<Name> xs;
      for (std::size_t i = 0; i < r->sorts.size(); ++i) xs.push_back(fresh_name("v"));
      vars.insert(vars.end(), xs.begin(), xs.end());
      return receive(x, std::move(xs), follow(r->cont, x, side, vars));
    }
    if (const auto* b = t.as<TBranch>()) {
      std::map<Label, Process> arms;
      for (const auto& [l, c] : b->arms) arms.emplace(l, follow(c, x, side, vars));
      return branch(x, std::move(arms));
    }
    if (const auto* s = t.as<TSelect>()) {
      auto it = s->arms.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(pick(rng, s->arms.size())));
      return select(x, it->first, follow(it->second, x, side, vars));
    }
    if (const auto* th = t.as<TThrow>()) {
      // request h(z). throw x(z). ...   with   accept h(w). <dual side on w>
      Name h = fresh_name("h");
      Name z = fresh_name("z");
      Name w = fresh_name("w");
      gamma.services[h] = ServiceType{dual(th->delegated), Qualifier::kLin, th->delegated,
                                      Qualifier::kLin};
      std::vector<Name> sv;
      side.push_back(accept(h, w, follow(dual(th->delegated), w, side, sv)));
      return request(h, z, throw_(x, z, follow(th->cont, x, side, vars)));
    }
    if (const auto* c = t.as<TCatch>()) {
      Name y = fresh_name("y");
      Process after = follow(c->cont, x, side, vars);
      // Finish the caught endpoint before going on with x.
      Process caught = follow(c->delegated, y, side, vars);
      return catch_(x, y, sequence(caught, after));
    }
    return close(x, inaction());
  }

  // Replaces the trailing 0s of p with q (one copy per leaf).
  static Process sequence(const Process& p, const Process& q) {
    if (p.is<Inaction>()) return q;
    if (const auto* n = p.as<Send>()) return send(n->ep, n->payload, sequence(n->cont, q));
    if (const auto* n = p.as<Receive>()) return receive(n->ep, n->binders, sequence(n->cont, q));
    if (const auto* n = p.as<Throw>()) return throw_(n->ep, n->delegated, sequence(n->cont, q));
    if (const auto* n = p.as<Catch>()) return catch_(n->ep, n->binder, sequence(n->cont, q));
    if (const auto* n = p.as<Select>()) return select(n->ep, n->label, sequence(n->cont, q));
    if (const auto* n = p.as<Close>()) return close(n->ep, sequence(n->cont, q));
    if (const auto* n = p.as<Request>()) return request(n->service, n->binder, sequence(n->body, q));
    if (const auto* n = p.as<Branch>()) {
      std::map<Label, Process> arms;
      for (const auto& [l, a] : n->arms) arms.emplace(l, sequence(a, q));
      return branch(n->ep, std::move(arms));
    }
    return p;
  }

  TypedSystem system() {
    TypedSystem out;
    std::vector<Process> components;
    const std::size_t sessions = 1 + pick(rng, 2);
    for (std::size_t i = 0; i < sessions; ++i) {
      SessionType t = random_type(rng, 1 + static_cast<int>(pick(rng, 3)), coin(rng, 40));
      Name s = fresh_name("s");
      gamma.services[s] = ServiceType{t, Qualifier::kLin, dual(t), Qualifier::kLin};
      std::vector<Process> side;
      std::vector<Name> vars;
      Name x = fresh_name("x");
      Name y = fresh_name("x");
      components.push_back(accept(s, x, follow(t, x, side, vars)));
      components.push_back(request(s, y, follow(dual(t), y, side, vars)));
      components.insert(components.end(), side.begin(), side.end());
    }
    if (coin(rng, 30)) components.push_back(conditional(
        Expression::binary(BinOp::kEq, Expression::integer(1), Expression::integer(1)),
        inaction(), inaction()));

    // Scatter over locations l0..l2, nested at random.
    const std::size_t nlocs = pick(rng, 4);
    std::vector<std::vector<Process>> buckets(nlocs + 1);
    for (auto& c : components) buckets[pick(rng, nlocs + 1)].push_back(c);
    std::vector<Process> top = buckets[0];
    Process inner;
    bool have_inner = false;
    for (std::size_t l = nlocs; l >= 1; --l) {
      std::vector<Process> body = buckets[l];
      if (have_inner && coin(rng, 50)) {
        body.push_back(inner);
        have_inner = false;
      }
      LocationName ln("l" + std::to_string(l));
      Process loc_p = located(ln, 0, parallel_all(body));
      if (have_inner) top.push_back(inner);
      inner = loc_p;
      have_inner = true;
      out.theta.locations[ln];  // filled below
      if (coin(rng, 60)) {
        Process u;
        switch (pick(rng, 3)) {
          case 0: u = located(ln, 0, process_var(pvar("X"))); break;
          case 1: u = located(ln, 0, inaction()); break;
          default: u = inaction(); break;
        }
        top.push_back(update(ln, u));
      }
    }
    if (have_inner) top.push_back(inner);
    std::shuffle(top.begin(), top.end(), rng);
    out.main = parallel_all(top);
    out.gamma = gamma;
    // Every location may offer everything; declared interfaces are not what
    // these systems are about.
    Interface all;
    for (const auto& [s, st] : gamma.services) {
      all.add(s, st.server, Multiplicity::infinite());
      all.add(s, st.client, Multiplicity::infinite());
    }
    for (auto& [l, iface] : out.theta.locations) iface = all;
    return out;
  }
};

inline TypedSystem random_typed_system(Rng& rng) {
  TypedGen g{rng, 0, {}};
  return g.system();
}

}  // namespace asp::testgen
