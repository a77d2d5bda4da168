#include "asp/congruence.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <type_traits>

#include "asp/context.hpp"
#include "asp/substitution.hpp"
#include "term_internal.hpp"

namespace asp {

namespace {

// Serializes terms. When `bound` is given, channels in it are written as
// their first-occurrence index within the serialized term, so that keys do
// not depend on how bound channels happen to be numbered.
class KeyWriter {
 public:
  explicit KeyWriter(const std::set<ChannelId>* bound = nullptr) : bound_(bound) {}

  std::string run(const Process& p) {
    out_.clear();
    local_.clear();
    proc(p);
    return out_;
  }

 private:
  void text(const std::string& s) {
    out_ += std::to_string(s.size());
    out_ += ':';
    out_ += s;
  }

  void chan_id(ChannelId id) {
    if (bound_ != nullptr && bound_->contains(id)) {
      auto [it, fresh] = local_.emplace(id, static_cast<ChannelId>(local_.size()));
      out_ += 'b';
      out_ += std::to_string(it->second);
    } else {
      out_ += 'f';
      out_ += std::to_string(id);
    }
  }

  void ep(const Endpoint& e) {
    if (e.is_name()) {
      out_ += 'n';
      text(e.name().str());
    } else {
      chan_id(e.channel().id);
      out_ += e.channel().polarity == Polarity::kPlus ? '+' : '-';
    }
  }

  void value(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      out_ += 'i';
      out_ += std::to_string(*i);
      out_ += ';';
    } else if (const auto* b = std::get_if<bool>(&v)) {
      out_ += *b ? "T" : "F";
    } else {
      out_ += 's';
      text(std::get<std::string>(v));
    }
  }

  void expr(const Expression& e) {
    std::visit(detail::Overloaded{
                   [&](const ExprConst& c) { value(c.value); },
                   [&](const ExprVar& v) {
                     out_ += 'v';
                     text(v.name.str());
                   },
                   [&](const ExprBinary& b) {
                     out_ += '(';
                     out_ += static_cast<char>('0' + static_cast<int>(b.op));
                     expr(b.lhs);
                     expr(b.rhs);
                     out_ += ')';
                   },
               },
               e.node().v);
  }

  void proc(const Process& p) {
    // For ordering, a channel-free subterm is fully described by its hash.
    if (bound_ != nullptr && !p.node().has_channels) {
      out_ += '#';
      out_ += std::to_string(p.node().hash);
      return;
    }
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Request>) {
            out_ += "(rq";
            text(n.service.str());
            text(n.binder.str());
            proc(n.body);
          } else if constexpr (std::is_same_v<T, Accept>) {
            out_ += "(ac";
            text(n.service.str());
            text(n.binder.str());
            proc(n.body);
          } else if constexpr (std::is_same_v<T, ReplicatedAccept>) {
            out_ += "(ra";
            text(n.service.str());
            text(n.binder.str());
            proc(n.body);
          } else if constexpr (std::is_same_v<T, Located>) {
            out_ += "(lc";
            text(n.loc.str());
            out_ += std::to_string(n.annotation);
            out_ += ';';
            proc(n.body);
          } else if constexpr (std::is_same_v<T, ProcVar>) {
            out_ += "(pv";
            text(n.name.str());
          } else if constexpr (std::is_same_v<T, Update>) {
            out_ += "(up";
            text(n.loc.str());
            proc(n.body);
          } else if constexpr (std::is_same_v<T, Send>) {
            out_ += "(sn";
            ep(n.ep);
            out_ += '[';
            for (const auto& e : n.payload) expr(e);
            out_ += ']';
            proc(n.cont);
          } else if constexpr (std::is_same_v<T, Receive>) {
            out_ += "(rv";
            ep(n.ep);
            out_ += '[';
            for (const auto& b : n.binders) text(b.str());
            out_ += ']';
            proc(n.cont);
          } else if constexpr (std::is_same_v<T, Throw>) {
            out_ += "(th";
            ep(n.ep);
            ep(n.delegated);
            proc(n.cont);
          } else if constexpr (std::is_same_v<T, Catch>) {
            out_ += "(ct";
            ep(n.ep);
            text(n.binder.str());
            proc(n.cont);
          } else if constexpr (std::is_same_v<T, Branch>) {
            out_ += "(br";
            ep(n.ep);
            for (const auto& [l, arm] : n.arms) {
              text(l.str());
              proc(arm);
            }
          } else if constexpr (std::is_same_v<T, Select>) {
            out_ += "(sl";
            ep(n.ep);
            if (const auto* l = std::get_if<Label>(&n.label)) {
              out_ += 'L';
              text(l->str());
            } else {
              out_ += 'E';
              expr(std::get<Expression>(n.label));
            }
            proc(n.cont);
          } else if constexpr (std::is_same_v<T, Parallel>) {
            out_ += "(pa";
            proc(n.left);
            proc(n.right);
          } else if constexpr (std::is_same_v<T, Conditional>) {
            out_ += "(if";
            expr(n.cond);
            proc(n.then_branch);
            proc(n.else_branch);
          } else if constexpr (std::is_same_v<T, Close>) {
            out_ += "(cl";
            ep(n.ep);
            proc(n.cont);
          } else if constexpr (std::is_same_v<T, Restrict>) {
            out_ += "(nu";
            chan_id(n.channel);
            proc(n.body);
          } else {
            out_ += "(0";
          }
          out_ += ')';
        },
        p.node().v);
  }

  const std::set<ChannelId>* bound_;
  std::map<ChannelId, ChannelId> local_;
  std::string out_;
};

void collect_binders(const Process& p, std::vector<ChannelId>& out) {
  if (!p.node().has_channels) return;
  if (const auto* r = p.as<Restrict>()) out.push_back(r->channel);
  for (const auto& c : children(p)) collect_binders(c, out);
}

Endpoint map_ep(const Endpoint& e, const std::map<ChannelId, ChannelId>& m) {
  if (!e.is_channel()) return e;
  auto it = m.find(e.channel().id);
  if (it == m.end()) return e;
  return Channel{it->second, e.channel().polarity};
}

// Applies a simultaneous renaming to every channel occurrence and binder.
Process rename_channels(const Process& p, const std::map<ChannelId, ChannelId>& m) {
  if (!p.node().has_channels) return p;
  auto rec = [&](const Process& q) { return rename_channels(q, m); };
  return std::visit(
      [&](const auto& n) -> Process {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Send>) {
          return send(map_ep(n.ep, m), n.payload, rec(n.cont));
        } else if constexpr (std::is_same_v<T, Receive>) {
          return receive(map_ep(n.ep, m), n.binders, rec(n.cont));
        } else if constexpr (std::is_same_v<T, Throw>) {
          return throw_(map_ep(n.ep, m), map_ep(n.delegated, m), rec(n.cont));
        } else if constexpr (std::is_same_v<T, Catch>) {
          return catch_(map_ep(n.ep, m), n.binder, rec(n.cont));
        } else if constexpr (std::is_same_v<T, Branch>) {
          std::map<Label, Process> arms;
          for (const auto& [l, arm] : n.arms) arms.emplace(l, rec(arm));
          return branch(map_ep(n.ep, m), std::move(arms));
        } else if constexpr (std::is_same_v<T, Select>) {
          return select(map_ep(n.ep, m), n.label, rec(n.cont));
        } else if constexpr (std::is_same_v<T, Close>) {
          return close(map_ep(n.ep, m), rec(n.cont));
        } else if constexpr (std::is_same_v<T, Restrict>) {
          auto it = m.find(n.channel);
          return restrict(it == m.end() ? n.channel : it->second, rec(n.body));
        } else {
          return detail::map_children(p, rec);
        }
      },
      p.node().v);
}

// Gives every binder a distinct id above every id in the term. Scoping is
// respected: an occurrence refers to its nearest enclosing binder.
Process separate_binders(const Process& p, std::map<ChannelId, ChannelId>& scope,
                         ChannelId& next) {
  if (!p.node().has_channels) return p;
  if (const auto* r = p.as<Restrict>()) {
    const ChannelId fresh = next++;
    auto saved = scope.find(r->channel) == scope.end()
                     ? std::optional<ChannelId>{}
                     : std::optional<ChannelId>{scope[r->channel]};
    scope[r->channel] = fresh;
    Process body = separate_binders(r->body, scope, next);
    if (saved) {
      scope[r->channel] = *saved;
    } else {
      scope.erase(r->channel);
    }
    return restrict(fresh, body);
  }
  // Rename this node's own endpoints, then recurse.
  Process here = std::visit(
      [&](const auto& n) -> Process {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Send>) {
          return send(map_ep(n.ep, scope), n.payload, n.cont);
        } else if constexpr (std::is_same_v<T, Receive>) {
          return receive(map_ep(n.ep, scope), n.binders, n.cont);
        } else if constexpr (std::is_same_v<T, Throw>) {
          return throw_(map_ep(n.ep, scope), map_ep(n.delegated, scope), n.cont);
        } else if constexpr (std::is_same_v<T, Catch>) {
          return catch_(map_ep(n.ep, scope), n.binder, n.cont);
        } else if constexpr (std::is_same_v<T, Branch>) {
          return branch(map_ep(n.ep, scope), n.arms);
        } else if constexpr (std::is_same_v<T, Select>) {
          return select(map_ep(n.ep, scope), n.label, n.cont);
        } else if constexpr (std::is_same_v<T, Close>) {
          return close(map_ep(n.ep, scope), n.cont);
        } else {
          return p;
        }
      },
      p.node().v);
  return detail::map_children(
      here, [&](const Process& c) { return separate_binders(c, scope, next); });
}

bool binders_clash(const Process& p) {
  std::vector<ChannelId> binders;
  collect_binders(p, binders);
  std::set<ChannelId> seen;
  for (auto b : binders) {
    if (!seen.insert(b).second) return true;
  }
  for (const auto& c : free_channels(p)) {
    if (seen.contains(c.id)) return true;
  }
  return false;
}

class Canonicalizer {
 public:
  explicit Canonicalizer(std::set<ChannelId> bound) : bound_(std::move(bound)), keys_(&bound_) {}

  // Floats restrictions out of a soup and returns its sorted components.
  void flatten(const Process& p, std::vector<ChannelId>& binders, std::vector<Process>& comps) {
    if (const auto* par = p.as<Parallel>()) {
      flatten(par->left, binders, comps);
      flatten(par->right, binders, comps);
    } else if (const auto* r = p.as<Restrict>()) {
      binders.push_back(r->channel);
      flatten(r->body, binders, comps);
    } else if (const auto* l = p.as<Located>()) {
      std::vector<Process> inner;
      flatten(l->body, binders, inner);
      sort(inner);
      comps.push_back(located(l->loc, l->annotation, parallel_all(inner)));
    } else if (!p.is<Inaction>()) {
      comps.push_back(detail::map_children(p, [&](const Process& c) { return scope(c); }));
    }
  }

  // A self-contained scope (a continuation, or the whole term).
  Process scope(const Process& p) {
    if (!p.node().has_channels && !p.node().has_parallel) return p;
    std::vector<ChannelId> binders;
    std::vector<Process> comps;
    flatten(p, binders, comps);
    if (binders.empty() && comps.size() == 1) return comps.front();
    sort(comps);
    Process body = parallel_all(comps);
    if (binders.empty()) return body;
    auto live = channel_ids(body);
    std::vector<ChannelId> kept;
    for (auto b : binders) {
      if (live.contains(b)) kept.push_back(b);
    }
    std::sort(kept.begin(), kept.end());
    return close_scope(kept, body);
  }

 private:
  void sort(std::vector<Process>& comps) {
    if (comps.size() < 2) return;
    std::vector<std::pair<std::string, Process>> keyed;
    keyed.reserve(comps.size());
    for (auto& c : comps) keyed.emplace_back(keys_.run(c), c);
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < comps.size(); ++i) comps[i] = keyed[i].second;
  }

  std::set<ChannelId> bound_;
  KeyWriter keys_;
};

void first_occurrences(const Process& p, const std::set<ChannelId>& bound,
                       std::vector<ChannelId>& order, std::set<ChannelId>& seen) {
  if (!p.node().has_channels) return;
  auto note = [&](const Endpoint& e) {
    if (e.is_channel() && bound.contains(e.channel().id) && seen.insert(e.channel().id).second) {
      order.push_back(e.channel().id);
    }
  };
  if (auto s = subject(p)) note(*s);
  if (const auto* t = p.as<Throw>()) note(t->delegated);
  for (const auto& c : children(p)) first_occurrences(c, bound, order, seen);
}

// Consecutive restrictions commute; keep each chain sorted by id.
Process sort_restriction_chains(const Process& p) {
  if (!p.node().has_channels) return p;
  if (p.is<Restrict>()) {
    std::vector<ChannelId> ids;
    Process cur = p;
    while (const auto* r = cur.as<Restrict>()) {
      ids.push_back(r->channel);
      cur = r->body;
    }
    std::sort(ids.begin(), ids.end());
    return close_scope(ids, sort_restriction_chains(cur));
  }
  return detail::map_children(p, [](const Process& c) { return sort_restriction_chains(c); });
}

Process canonicalize(const Process& p, bool renumber) {
  Process work = p;
  const bool clash = binders_clash(p);
  if (renumber || clash) {
    std::map<ChannelId, ChannelId> scope;
    ChannelId next = max_channel_id(p).value_or(0) + 1;
    work = separate_binders(p, scope, next);
  }
  std::vector<ChannelId> binder_list;
  collect_binders(work, binder_list);
  std::set<ChannelId> bound(binder_list.begin(), binder_list.end());

  Canonicalizer canon(bound);
  Process out = canon.scope(work);

  if (!renumber) {
    if (!clash) return out;
    // Binders were separated only to avoid capture; restore compact ids in
    // first-occurrence order above the free ones, as renumbering would.
  }

  std::set<ChannelId> free_ids;
  for (const auto& c : free_channels(out)) free_ids.insert(c.id);
  ChannelId base = free_ids.empty() ? 0 : *free_ids.rbegin() + 1;

  std::vector<ChannelId> order;
  std::set<ChannelId> seen;
  first_occurrences(out, bound, order, seen);
  std::map<ChannelId, ChannelId> mapping;
  for (auto old : order) mapping[old] = base++;
  out = rename_channels(out, mapping);
  return sort_restriction_chains(out);
}

}  // namespace

Process separate_binders(const Process& p) {
  if (!binders_clash(p)) return p;
  std::map<ChannelId, ChannelId> scope;
  ChannelId next = max_channel_id(p).value_or(0) + 1;
  return separate_binders(p, scope, next);
}

Process normalize(const Process& p) { return canonicalize(p, true); }

Process tidy(const Process& p) { return canonicalize(p, false); }

bool congruent(const Process& p, const Process& q) { return normalize(p) == normalize(q); }

Scope open_scope(const Process& p) {
  Scope s;
  Process cur = p;
  while (const auto* r = cur.as<Restrict>()) {
    s.binders.push_back(r->channel);
    cur = r->body;
  }
  s.body = cur;
  return s;
}

Process close_scope(const std::vector<ChannelId>& binders, Process body) {
  for (auto it = binders.rbegin(); it != binders.rend(); ++it) body = restrict(*it, body);
  return body;
}

std::string term_key(const Process& p) { return KeyWriter().run(p); }

}  // namespace asp
