#include "asp/substitution.hpp"

#include <algorithm>
#include <functional>
#include <type_traits>

#include "term_internal.hpp"

namespace asp {

namespace detail {

Process map_children(const Process& p, const std::function<Process(const Process&)>& f) {
  // Unchanged children give back p itself, so untouched subterms stay shared.
  auto same = [](const Process& a, const Process& b) { return a.get() == b.get(); };
  return std::visit(
      [&](const auto& n) -> Process {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Request> || std::is_same_v<T, Accept> ||
                      std::is_same_v<T, ReplicatedAccept> || std::is_same_v<T, Located> ||
                      std::is_same_v<T, Update> || std::is_same_v<T, Restrict>) {
          Process body = f(n.body);
          if (same(body, n.body)) return p;
          T copy = n;
          copy.body = std::move(body);
          return make_process({std::move(copy)});
        } else if constexpr (std::is_same_v<T, Send> || std::is_same_v<T, Receive> ||
                             std::is_same_v<T, Throw> || std::is_same_v<T, Catch> ||
                             std::is_same_v<T, Select> || std::is_same_v<T, Close>) {
          Process cont = f(n.cont);
          if (same(cont, n.cont)) return p;
          T copy = n;
          copy.cont = std::move(cont);
          return make_process({std::move(copy)});
        } else if constexpr (std::is_same_v<T, Branch>) {
          Branch copy = n;
          bool changed = false;
          for (auto& [l, arm] : copy.arms) {
            Process next = f(arm);
            changed = changed || !same(next, arm);
            arm = std::move(next);
          }
          return changed ? make_process({std::move(copy)}) : p;
        } else if constexpr (std::is_same_v<T, Parallel>) {
          Process l = f(n.left);
          Process r = f(n.right);
          if (same(l, n.left) && same(r, n.right)) return p;
          return parallel(std::move(l), std::move(r));
        } else if constexpr (std::is_same_v<T, Conditional>) {
          Process a = f(n.then_branch);
          Process b = f(n.else_branch);
          if (same(a, n.then_branch) && same(b, n.else_branch)) return p;
          return conditional(n.cond, std::move(a), std::move(b));
        } else {
          return p;
        }
      },
      p.node().v);
}

void for_each_expression(const Process& p, const std::function<void(const Expression&)>& f) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Send>) {
          for (const auto& e : n.payload) f(e);
        } else if constexpr (std::is_same_v<T, Conditional>) {
          f(n.cond);
        } else if constexpr (std::is_same_v<T, Select>) {
          if (const auto* e = std::get_if<Expression>(&n.label)) f(*e);
        }
      },
      p.node().v);
}

// Names bound by the node itself (for its body/continuation).
std::vector<Name> bound_names(const Process& p) {
  if (const auto* r = p.as<Request>()) return {r->binder};
  if (const auto* a = p.as<Accept>()) return {a->binder};
  if (const auto* a = p.as<ReplicatedAccept>()) return {a->binder};
  if (const auto* c = p.as<Catch>()) return {c->binder};
  if (const auto* r = p.as<Receive>()) return r->binders;
  return {};
}

}  // namespace detail

namespace {

using detail::bound_names;
using detail::map_children;

bool binds(const Process& p, const Name& x) {
  auto names = bound_names(p);
  return std::find(names.begin(), names.end(), x) != names.end();
}

Endpoint subst_ep(const Endpoint& ep, const Name& x, const Channel& k) {
  if (ep.is_name() && ep.name() == x) return k;
  return ep;
}

void collect_expr_vars(const Expression& e, std::set<Name>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ExprVar>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, ExprBinary>) {
          collect_expr_vars(n.lhs, out);
          collect_expr_vars(n.rhs, out);
        }
      },
      e.node().v);
}

}  // namespace

Process substitute_endpoint(const Process& p, const Name& x, const Channel& k) {
  auto rec = [&](const Process& q) { return substitute_endpoint(q, x, k); };
  // The binder itself shadows x inside the body, but the node's own subject
  // is still in scope of the outer x.
  const bool shadowed = binds(p, x);
  auto body_fn = [&](const Process& q) { return shadowed ? q : rec(q); };

  return std::visit(
      [&](const auto& n) -> Process {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Send>) {
          return send(subst_ep(n.ep, x, k), n.payload, body_fn(n.cont));
        } else if constexpr (std::is_same_v<T, Receive>) {
          return receive(subst_ep(n.ep, x, k), n.binders, body_fn(n.cont));
        } else if constexpr (std::is_same_v<T, Throw>) {
          return throw_(subst_ep(n.ep, x, k), subst_ep(n.delegated, x, k), rec(n.cont));
        } else if constexpr (std::is_same_v<T, Catch>) {
          return catch_(subst_ep(n.ep, x, k), n.binder, body_fn(n.cont));
        } else if constexpr (std::is_same_v<T, Branch>) {
          std::map<Label, Process> arms;
          for (const auto& [l, arm] : n.arms) arms.emplace(l, rec(arm));
          return branch(subst_ep(n.ep, x, k), std::move(arms));
        } else if constexpr (std::is_same_v<T, Select>) {
          return select(subst_ep(n.ep, x, k), n.label, rec(n.cont));
        } else if constexpr (std::is_same_v<T, Close>) {
          return close(subst_ep(n.ep, x, k), rec(n.cont));
        } else {
          return map_children(p, body_fn);
        }
      },
      p.node().v);
}

Process substitute_process(const Process& u, const ProcessVarName& x, const Process& q) {
  if (const auto* v = u.as<ProcVar>()) return v->name == x ? q : u;
  return map_children(u, [&](const Process& c) { return substitute_process(c, x, q); });
}

Expression substitute_values(const Expression& e, const Name& x, const Value& c) {
  return std::visit(
      [&](const auto& n) -> Expression {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ExprVar>) {
          return n.name == x ? Expression::constant(c) : e;
        } else if constexpr (std::is_same_v<T, ExprBinary>) {
          return Expression::binary(n.op, substitute_values(n.lhs, x, c),
                                    substitute_values(n.rhs, x, c));
        } else {
          return e;
        }
      },
      e.node().v);
}

namespace {

Expression subst_all(Expression e, const std::vector<Name>& xs, const std::vector<Value>& cs) {
  for (std::size_t i = 0; i < xs.size(); ++i) e = substitute_values(e, xs[i], cs[i]);
  return e;
}

}  // namespace

Process substitute_values(const Process& p, const std::vector<Name>& xs,
                          const std::vector<Value>& cs) {
  if (xs.empty()) return p;
  // Drop variables rebound by this node before descending into its body.
  std::vector<Name> inner_xs;
  std::vector<Value> inner_cs;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!binds(p, xs[i])) {
      inner_xs.push_back(xs[i]);
      inner_cs.push_back(cs[i]);
    }
  }
  auto body_fn = [&](const Process& q) { return substitute_values(q, inner_xs, inner_cs); };
  auto same_fn = [&](const Process& q) { return substitute_values(q, xs, cs); };

  if (const auto* s = p.as<Send>()) {
    std::vector<Expression> payload;
    for (const auto& e : s->payload) payload.push_back(subst_all(e, xs, cs));
    return send(s->ep, std::move(payload), same_fn(s->cont));
  }
  if (const auto* c = p.as<Conditional>()) {
    return conditional(subst_all(c->cond, xs, cs), same_fn(c->then_branch),
                       same_fn(c->else_branch));
  }
  if (const auto* s = p.as<Select>()) {
    SelectLabel l = s->label;
    if (const auto* e = std::get_if<Expression>(&l)) l = subst_all(*e, xs, cs);
    return select(s->ep, std::move(l), same_fn(s->cont));
  }
  return map_children(p, body_fn);
}

Process rename_channel(const Process& p, ChannelId from, ChannelId to) {
  auto fix = [&](const Endpoint& ep) -> Endpoint {
    if (ep.is_channel() && ep.channel().id == from) return Channel{to, ep.channel().polarity};
    return ep;
  };
  auto rec = [&](const Process& q) { return rename_channel(q, from, to); };
  return std::visit(
      [&](const auto& n) -> Process {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Send>) {
          return send(fix(n.ep), n.payload, rec(n.cont));
        } else if constexpr (std::is_same_v<T, Receive>) {
          return receive(fix(n.ep), n.binders, rec(n.cont));
        } else if constexpr (std::is_same_v<T, Throw>) {
          return throw_(fix(n.ep), fix(n.delegated), rec(n.cont));
        } else if constexpr (std::is_same_v<T, Catch>) {
          return catch_(fix(n.ep), n.binder, rec(n.cont));
        } else if constexpr (std::is_same_v<T, Branch>) {
          std::map<Label, Process> arms;
          for (const auto& [l, arm] : n.arms) arms.emplace(l, rec(arm));
          return branch(fix(n.ep), std::move(arms));
        } else if constexpr (std::is_same_v<T, Select>) {
          return select(fix(n.ep), n.label, rec(n.cont));
        } else if constexpr (std::is_same_v<T, Close>) {
          return close(fix(n.ep), rec(n.cont));
        } else if constexpr (std::is_same_v<T, Restrict>) {
          return restrict(n.channel == from ? to : n.channel, rec(n.body));
        } else {
          return map_children(p, rec);
        }
      },
      p.node().v);
}

namespace {

void collect_free_channels(const Process& p, std::set<ChannelId>& bound, std::set<Channel>& out) {
  if (!p.node().has_channels) return;
  auto note = [&](const Endpoint& ep) {
    if (ep.is_channel() && !bound.contains(ep.channel().id)) out.insert(ep.channel());
  };
  if (const auto* r = p.as<Restrict>()) {
    const bool fresh = bound.insert(r->channel).second;
    collect_free_channels(r->body, bound, out);
    if (fresh) bound.erase(r->channel);
    return;
  }
  if (auto s = subject(p)) note(*s);
  if (const auto* t = p.as<Throw>()) note(t->delegated);
  for (const auto& c : children(p)) collect_free_channels(c, bound, out);
}

void collect_free_names(const Process& p, std::set<Name>& bound, std::set<Name>& out) {
  auto note = [&](const Endpoint& ep) {
    if (ep.is_name() && !bound.contains(ep.name())) out.insert(ep.name());
  };
  if (auto s = subject(p)) note(*s);
  if (const auto* t = p.as<Throw>()) note(t->delegated);
  std::vector<Name> added;
  for (const auto& b : bound_names(p)) {
    if (bound.insert(b).second) added.push_back(b);
  }
  for (const auto& c : children(p)) collect_free_names(c, bound, out);
  for (const auto& b : added) bound.erase(b);
}

void collect_value_vars(const Process& p, std::set<Name>& bound, std::set<Name>& out) {
  detail::for_each_expression(p, [&](const Expression& e) {
    std::set<Name> vars;
    collect_expr_vars(e, vars);
    for (const auto& v : vars) {
      if (!bound.contains(v)) out.insert(v);
    }
  });
  std::vector<Name> added;
  for (const auto& b : bound_names(p)) {
    if (bound.insert(b).second) added.push_back(b);
  }
  for (const auto& c : children(p)) collect_value_vars(c, bound, out);
  for (const auto& b : added) bound.erase(b);
}

void collect_services(const Process& p, std::set<Name>& out) {
  if (const auto* r = p.as<Request>()) out.insert(r->service);
  if (const auto* a = p.as<Accept>()) out.insert(a->service);
  if (const auto* a = p.as<ReplicatedAccept>()) out.insert(a->service);
  for (const auto& c : children(p)) collect_services(c, out);
}

void collect_pvars(const Process& p, bool inside_update, bool only_outside,
                   std::set<ProcessVarName>& out) {
  if (const auto* v = p.as<ProcVar>()) {
    if (!only_outside || !inside_update) out.insert(v->name);
    return;
  }
  const bool in_upd = inside_update || p.is<Update>();
  for (const auto& c : children(p)) collect_pvars(c, in_upd, only_outside, out);
}

void collect_ids(const Process& p, std::set<ChannelId>& out) {
  if (!p.node().has_channels) return;
  if (const auto* r = p.as<Restrict>()) out.insert(r->channel);
  if (auto s = subject(p); s && s->is_channel()) out.insert(s->channel().id);
  if (const auto* t = p.as<Throw>(); t && t->delegated.is_channel()) {
    out.insert(t->delegated.channel().id);
  }
  for (const auto& c : children(p)) collect_ids(c, out);
}

}  // namespace

std::set<Channel> free_channels(const Process& p) {
  std::set<ChannelId> bound;
  std::set<Channel> out;
  collect_free_channels(p, bound, out);
  return out;
}

std::set<Name> free_service_names(const Process& p) {
  std::set<Name> out;
  collect_services(p, out);
  return out;
}

std::set<Name> free_endpoint_names(const Process& p) {
  std::set<Name> bound;
  std::set<Name> out;
  collect_free_names(p, bound, out);
  return out;
}

std::set<Name> free_value_vars(const Process& p) {
  std::set<Name> bound;
  std::set<Name> out;
  collect_value_vars(p, bound, out);
  return out;
}

std::set<ProcessVarName> free_process_vars(const Process& p) {
  std::set<ProcessVarName> out;
  collect_pvars(p, false, false, out);
  return out;
}

std::set<ProcessVarName> process_vars_outside_updates(const Process& p) {
  std::set<ProcessVarName> out;
  collect_pvars(p, false, true, out);
  return out;
}

std::set<ChannelId> channel_ids(const Process& p) {
  std::set<ChannelId> out;
  collect_ids(p, out);
  return out;
}

std::optional<ChannelId> max_channel_id(const Process& p) {
  auto ids = channel_ids(p);
  if (ids.empty()) return std::nullopt;
  return *ids.rbegin();
}

}  // namespace asp
