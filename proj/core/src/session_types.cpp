#include "asp/session_types.hpp"

#include <algorithm>
#include <type_traits>

namespace asp {

std::string to_string(BasicType b) {
  switch (b) {
    case BasicType::kInt:
      return "int";
    case BasicType::kBool:
      return "bool";
    case BasicType::kStr:
      return "str";
  }
  return "?";
}

SessionType::SessionType() : node_(end().node_) {}

SessionType SessionType::end() {
  static const SessionType e(std::make_shared<const SessionTypeNode>(SessionTypeNode{TEnd{}}));
  return e;
}

SessionType SessionType::send(std::vector<BasicType> sorts, SessionType cont) {
  return SessionType(
      std::make_shared<const SessionTypeNode>(SessionTypeNode{TSend{std::move(sorts), cont}}));
}
SessionType SessionType::receive(std::vector<BasicType> sorts, SessionType cont) {
  return SessionType(
      std::make_shared<const SessionTypeNode>(SessionTypeNode{TReceive{std::move(sorts), cont}}));
}
SessionType SessionType::throw_(SessionType delegated, SessionType cont) {
  return SessionType(
      std::make_shared<const SessionTypeNode>(SessionTypeNode{TThrow{delegated, cont}}));
}
SessionType SessionType::catch_(SessionType delegated, SessionType cont) {
  return SessionType(
      std::make_shared<const SessionTypeNode>(SessionTypeNode{TCatch{delegated, cont}}));
}
SessionType SessionType::branch(std::map<Label, SessionType> arms) {
  return SessionType(
      std::make_shared<const SessionTypeNode>(SessionTypeNode{TBranch{std::move(arms)}}));
}
SessionType SessionType::select(std::map<Label, SessionType> arms) {
  return SessionType(
      std::make_shared<const SessionTypeNode>(SessionTypeNode{TSelect{std::move(arms)}}));
}

bool SessionType::is_end() const { return std::holds_alternative<TEnd>(node_->v); }

std::strong_ordering operator<=>(const SessionType& a, const SessionType& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = a.node_->v;
  const auto& y = b.node_->v;
  if (x.index() != y.index()) return x.index() <=> y.index();
  return std::visit(
      [&](const auto& n) -> std::strong_ordering {
        using T = std::decay_t<decltype(n)>;
        const auto& o = std::get<T>(y);
        if constexpr (std::is_same_v<T, TEnd>) {
          return std::strong_ordering::equal;
        } else if constexpr (std::is_same_v<T, TSend> || std::is_same_v<T, TReceive>) {
          if (auto c = n.sorts <=> o.sorts; c != 0) return c;
          return n.cont <=> o.cont;
        } else if constexpr (std::is_same_v<T, TThrow> || std::is_same_v<T, TCatch>) {
          if (auto c = n.delegated <=> o.delegated; c != 0) return c;
          return n.cont <=> o.cont;
        } else {
          auto i = n.arms.begin();
          auto j = o.arms.begin();
          for (; i != n.arms.end() && j != o.arms.end(); ++i, ++j) {
            if (auto c = i->first <=> j->first; c != 0) return c;
            if (auto c = i->second <=> j->second; c != 0) return c;
          }
          return n.arms.size() <=> o.arms.size();
        }
      },
      x);
}

bool operator==(const SessionType& a, const SessionType& b) { return (a <=> b) == 0; }

SessionType dual(const SessionType& t) {
  return std::visit(
      [](const auto& n) -> SessionType {
        using T = std::decay_t<decltype(n)>;
        auto dual_arms = [](const std::map<Label, SessionType>& arms) {
          std::map<Label, SessionType> out;
          for (const auto& [l, a] : arms) out.emplace(l, dual(a));
          return out;
        };
        if constexpr (std::is_same_v<T, TEnd>) {
          return SessionType::end();
        } else if constexpr (std::is_same_v<T, TSend>) {
          return SessionType::receive(n.sorts, dual(n.cont));
        } else if constexpr (std::is_same_v<T, TReceive>) {
          return SessionType::send(n.sorts, dual(n.cont));
        } else if constexpr (std::is_same_v<T, TThrow>) {
          return SessionType::catch_(n.delegated, dual(n.cont));
        } else if constexpr (std::is_same_v<T, TCatch>) {
          return SessionType::throw_(n.delegated, dual(n.cont));
        } else if constexpr (std::is_same_v<T, TBranch>) {
          return SessionType::select(dual_arms(n.arms));
        } else {
          return SessionType::branch(dual_arms(n.arms));
        }
      },
      t.node().v);
}

namespace {

std::string sorts_text(const std::vector<BasicType>& sorts) {
  std::string out;
  for (std::size_t i = 0; i < sorts.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(sorts[i]);
  }
  return out;
}

}  // namespace

std::string to_string(const SessionType& t, const TypeAliases& aliases) {
  for (const auto& [name, a] : aliases) {
    if (a == t) return name;
  }
  for (const auto& [name, a] : aliases) {
    if (dual(a) == t) return "dual(" + name + ")";
  }
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        auto arms_text = [&](const std::map<Label, SessionType>& arms) {
          std::string out = "{";
          bool first = true;
          for (const auto& [l, a] : arms) {
            if (!first) out += ", ";
            first = false;
            out += l.str() + ": " + to_string(a, aliases);
          }
          return out + "}";
        };
        if constexpr (std::is_same_v<T, TEnd>) {
          return "end";
        } else if constexpr (std::is_same_v<T, TSend>) {
          return "!(" + sorts_text(n.sorts) + ")." + to_string(n.cont, aliases);
        } else if constexpr (std::is_same_v<T, TReceive>) {
          return "?(" + sorts_text(n.sorts) + ")." + to_string(n.cont, aliases);
        } else if constexpr (std::is_same_v<T, TThrow>) {
          return "!!(" + to_string(n.delegated, aliases) + ")." + to_string(n.cont, aliases);
        } else if constexpr (std::is_same_v<T, TCatch>) {
          return "?" "?(" + to_string(n.delegated, aliases) + ")." + to_string(n.cont, aliases);
        } else if constexpr (std::is_same_v<T, TBranch>) {
          return "&" + arms_text(n.arms);
        } else {
          return "+" + arms_text(n.arms);
        }
      },
      t.node().v);
}

std::string to_string(Qualifier q) { return q == Qualifier::kLin ? "lin" : "un"; }

Multiplicity operator+(Multiplicity a, Multiplicity b) {
  if (a.inf_ || b.inf_) return Multiplicity::infinite();
  return Multiplicity(a.n_ + b.n_);
}

bool operator<=(Multiplicity a, Multiplicity b) {
  if (b.inf_) return true;
  if (a.inf_) return false;
  return a.n_ <= b.n_;
}

std::string to_string(Multiplicity m) {
  return m.is_infinite() ? "inf" : std::to_string(m.count());
}

void Interface::add(const Name& a, const SessionType& t, Multiplicity m) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{&a, &t},
                             [](const InterfaceEntry& e, const auto& key) {
                               if (e.name != *key.first) return e.name < *key.first;
                               return e.type < *key.second;
                             });
  if (it != entries_.end() && it->name == a && it->type == t) {
    it->multiplicity = it->multiplicity + m;
  } else {
    entries_.insert(it, InterfaceEntry{a, t, m});
  }
}

void Interface::add_all(const Interface& other) {
  for (const auto& e : other.entries_) add(e.name, e.type, e.multiplicity);
}

Interface Interface::replicated() const {
  Interface out = *this;
  for (auto& e : out.entries_) e.multiplicity = Multiplicity::infinite();
  return out;
}

std::optional<Multiplicity> Interface::lookup(const Name& a, const SessionType& t) const {
  for (const auto& e : entries_) {
    if (e.name == a && e.type == t) return e.multiplicity;
  }
  return std::nullopt;
}

Interface sum(const Interface& a, const Interface& b) {
  Interface out = a;
  out.add_all(b);
  return out;
}

bool interface_leq(const Interface& a, const Interface& b) {
  for (const auto& e : a.entries()) {
    auto m = b.lookup(e.name, e.type);
    if (!m || !(e.multiplicity <= *m)) return false;
  }
  return true;
}

std::string to_string(const Interface& i, const TypeAliases& aliases) {
  if (i.empty()) return "{}";
  std::string out = "{";
  bool first = true;
  for (const auto& e : i.entries()) {
    if (!first) out += ", ";
    first = false;
    out += e.name.str() + ": " + to_string(e.type, aliases) + " @ " + to_string(e.multiplicity);
  }
  return out + "}";
}

bool balanced(const Typing& d) {
  for (const auto& [ep, entry] : d) {
    if (!ep.is_channel()) return false;
    auto it = d.find(Endpoint(ep.channel().dual()));
    if (it == d.end()) return false;
    if (it->second.bracketed != entry.bracketed) return false;
    if (it->second.type != dual(entry.type)) return false;
  }
  return true;
}

std::string to_string(const Typing& d, const TypeAliases& aliases) {
  if (d.empty()) return "{}";
  std::string out = "{";
  bool first = true;
  for (const auto& [ep, entry] : d) {
    if (!first) out += ", ";
    first = false;
    std::string key;
    if (ep.is_channel()) {
      key = "k#" + std::to_string(ep.channel().id) +
            (ep.channel().polarity == Polarity::kPlus ? "+" : "-");
    } else {
      key = ep.name().str();
    }
    std::string item = key + ": " + to_string(entry.type, aliases);
    out += entry.bracketed ? "[" + item + "]" : item;
  }
  return out + "}";
}

}  // namespace asp
