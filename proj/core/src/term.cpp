#include "asp/term.hpp"

#include <type_traits>

namespace asp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const Process& shared_inaction() {
  static const Process zero = make_process(ProcNode{Inaction{}});
  return zero;
}

}  // namespace

Expression Expression::constant(Value v) {
  return Expression(std::make_shared<const ExprNode>(ExprNode{ExprConst{std::move(v)}}));
}

Expression Expression::var(Name n) {
  return Expression(std::make_shared<const ExprNode>(ExprNode{ExprVar{std::move(n)}}));
}

Expression Expression::binary(BinOp op, Expression lhs, Expression rhs) {
  return Expression(std::make_shared<const ExprNode>(
      ExprNode{ExprBinary{op, std::move(lhs), std::move(rhs)}}));
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = a.node_->v;
  const auto& y = b.node_->v;
  if (x.index() != y.index()) return false;
  return std::visit(
      Overloaded{
          [&](const ExprConst& c) { return c.value == std::get<ExprConst>(y).value; },
          [&](const ExprVar& v) { return v.name == std::get<ExprVar>(y).name; },
          [&](const ExprBinary& bin) {
            const auto& o = std::get<ExprBinary>(y);
            return bin.op == o.op && bin.lhs == o.lhs && bin.rhs == o.rhs;
          },
      },
      x);
}

Process::Process() : node_(shared_inaction().node_) {}

namespace {

// FNV-1a over a fixed byte layout.
class Hasher {
 public:
  void byte(std::uint8_t b) {
    h_ ^= b;
    h_ *= 0x100000001b3ULL;
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void text(const std::string& s) {
    u64(s.size());
    for (char c : s) byte(static_cast<std::uint8_t>(c));
  }
  void expr(const Expression& e) {
    std::visit(Overloaded{
                   [&](const ExprConst& c) {
                     byte(0);
                     byte(static_cast<std::uint8_t>(c.value.index()));
                     if (const auto* i = std::get_if<std::int64_t>(&c.value)) {
                       u64(static_cast<std::uint64_t>(*i));
                     } else if (const auto* b = std::get_if<bool>(&c.value)) {
                       byte(*b ? 1 : 0);
                     } else {
                       text(std::get<std::string>(c.value));
                     }
                   },
                   [&](const ExprVar& v) {
                     byte(1);
                     text(v.name.str());
                   },
                   [&](const ExprBinary& b) {
                     byte(2);
                     byte(static_cast<std::uint8_t>(b.op));
                     expr(b.lhs);
                     expr(b.rhs);
                   },
               },
               e.node().v);
  }
  void endpoint(const Endpoint& e) {
    if (e.is_name()) {
      byte(0);
      text(e.name().str());
    } else {
      byte(e.channel().polarity == Polarity::kPlus ? 1 : 2);
      u64(e.channel().id);
    }
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace

Process make_process(ProcNode node) {
  bool chans = false;
  bool par = false;
  Hasher h;
  h.byte(static_cast<std::uint8_t>(node.v.index()));
  auto child = [&](const Process& c) {
    chans = chans || c.node().has_channels;
    par = par || c.node().has_parallel;
    h.u64(c.node().hash);
  };
  auto ep = [&](const Endpoint& e) {
    chans = chans || e.is_channel();
    h.endpoint(e);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (requires { n.service; }) h.text(n.service.str());
        if constexpr (requires { n.binder; }) h.text(n.binder.str());
        if constexpr (requires { n.loc; }) h.text(n.loc.str());
        if constexpr (requires { n.annotation; }) h.u64(n.annotation);
        if constexpr (std::is_same_v<T, ProcVar>) h.text(n.name.str());
        if constexpr (std::is_same_v<T, Send>) {
          h.u64(n.payload.size());
          for (const auto& e : n.payload) h.expr(e);
        }
        if constexpr (std::is_same_v<T, Receive>) {
          h.u64(n.binders.size());
          for (const auto& b : n.binders) h.text(b.str());
        }
        if constexpr (std::is_same_v<T, Select>) {
          if (const auto* l = std::get_if<Label>(&n.label)) {
            h.byte(0);
            h.text(l->str());
          } else {
            h.byte(1);
            h.expr(std::get<Expression>(n.label));
          }
        }
        if constexpr (std::is_same_v<T, Conditional>) h.expr(n.cond);
        if constexpr (std::is_same_v<T, Restrict>) h.u64(n.channel);
        if constexpr (std::is_same_v<T, Branch>) {
          for (const auto& [l, arm] : n.arms) h.text(l.str());
        }
        if constexpr (requires { n.ep; }) ep(n.ep);
        if constexpr (std::is_same_v<T, Throw>) ep(n.delegated);
        if constexpr (std::is_same_v<T, Restrict>) chans = true;
        if constexpr (std::is_same_v<T, Parallel>) {
          par = true;
          child(n.left);
          child(n.right);
        }
        if constexpr (requires { n.body; }) child(n.body);
        if constexpr (requires { n.cont; }) child(n.cont);
        if constexpr (std::is_same_v<T, Branch>) {
          for (const auto& [l, arm] : n.arms) child(arm);
        }
        if constexpr (std::is_same_v<T, Conditional>) {
          child(n.then_branch);
          child(n.else_branch);
        }
      },
      node.v);
  node.has_channels = chans;
  node.has_parallel = par;
  node.hash = h.value();
  return Process(std::make_shared<const ProcNode>(std::move(node)));
}

bool operator==(const Process& a, const Process& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = a.node_->v;
  const auto& y = b.node_->v;
  if (x.index() != y.index()) return false;
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        const auto& o = std::get<T>(y);
        if constexpr (std::is_same_v<T, Request> || std::is_same_v<T, Accept> ||
                      std::is_same_v<T, ReplicatedAccept>) {
          return n.service == o.service && n.binder == o.binder && n.body == o.body;
        } else if constexpr (std::is_same_v<T, Located>) {
          return n.loc == o.loc && n.annotation == o.annotation && n.body == o.body;
        } else if constexpr (std::is_same_v<T, ProcVar>) {
          return n.name == o.name;
        } else if constexpr (std::is_same_v<T, Update>) {
          return n.loc == o.loc && n.body == o.body;
        } else if constexpr (std::is_same_v<T, Send>) {
          return n.ep == o.ep && n.payload == o.payload && n.cont == o.cont;
        } else if constexpr (std::is_same_v<T, Receive>) {
          return n.ep == o.ep && n.binders == o.binders && n.cont == o.cont;
        } else if constexpr (std::is_same_v<T, Throw>) {
          return n.ep == o.ep && n.delegated == o.delegated && n.cont == o.cont;
        } else if constexpr (std::is_same_v<T, Catch>) {
          return n.ep == o.ep && n.binder == o.binder && n.cont == o.cont;
        } else if constexpr (std::is_same_v<T, Branch>) {
          return n.ep == o.ep && n.arms == o.arms;
        } else if constexpr (std::is_same_v<T, Select>) {
          return n.ep == o.ep && n.label == o.label && n.cont == o.cont;
        } else if constexpr (std::is_same_v<T, Parallel>) {
          return n.left == o.left && n.right == o.right;
        } else if constexpr (std::is_same_v<T, Conditional>) {
          return n.cond == o.cond && n.then_branch == o.then_branch &&
                 n.else_branch == o.else_branch;
        } else if constexpr (std::is_same_v<T, Close>) {
          return n.ep == o.ep && n.cont == o.cont;
        } else if constexpr (std::is_same_v<T, Restrict>) {
          return n.channel == o.channel && n.body == o.body;
        } else {
          return true;
        }
      },
      x);
}

Process inaction() { return shared_inaction(); }

Process request(Name service, Name binder, Process body) {
  return make_process({Request{std::move(service), std::move(binder), std::move(body)}});
}
Process accept(Name service, Name binder, Process body) {
  return make_process({Accept{std::move(service), std::move(binder), std::move(body)}});
}
Process replicated_accept(Name service, Name binder, Process body) {
  return make_process(
      {ReplicatedAccept{std::move(service), std::move(binder), std::move(body)}});
}
Process located(LocationName l, std::uint32_t annotation, Process body) {
  return make_process({Located{std::move(l), annotation, std::move(body)}});
}
Process process_var(ProcessVarName n) { return make_process({ProcVar{std::move(n)}}); }
Process update(LocationName l, Process body) {
  return make_process({Update{std::move(l), std::move(body)}});
}
Process send(Endpoint ep, std::vector<Expression> payload, Process cont) {
  return make_process({Send{std::move(ep), std::move(payload), std::move(cont)}});
}
Process receive(Endpoint ep, std::vector<Name> binders, Process cont) {
  return make_process({Receive{std::move(ep), std::move(binders), std::move(cont)}});
}
Process throw_(Endpoint ep, Endpoint delegated, Process cont) {
  return make_process({Throw{std::move(ep), std::move(delegated), std::move(cont)}});
}
Process catch_(Endpoint ep, Name binder, Process cont) {
  return make_process({Catch{std::move(ep), std::move(binder), std::move(cont)}});
}
Process branch(Endpoint ep, std::map<Label, Process> arms) {
  return make_process({Branch{std::move(ep), std::move(arms)}});
}
Process select(Endpoint ep, SelectLabel l, Process cont) {
  return make_process({Select{std::move(ep), std::move(l), std::move(cont)}});
}
Process parallel(Process left, Process right) {
  return make_process({Parallel{std::move(left), std::move(right)}});
}
Process conditional(Expression cond, Process then_branch, Process else_branch) {
  return make_process(
      {Conditional{std::move(cond), std::move(then_branch), std::move(else_branch)}});
}
Process close(Endpoint ep, Process cont) {
  return make_process({Close{std::move(ep), std::move(cont)}});
}
Process restrict(ChannelId channel, Process body) {
  return make_process({Restrict{channel, std::move(body)}});
}

Process parallel_all(const std::vector<Process>& parts) {
  if (parts.empty()) return inaction();
  Process acc = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) acc = parallel(*it, acc);
  return acc;
}

std::optional<Endpoint> subject(const Process& p) {
  return std::visit(
      [](const auto& n) -> std::optional<Endpoint> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Send> || std::is_same_v<T, Receive> ||
                      std::is_same_v<T, Throw> || std::is_same_v<T, Catch> ||
                      std::is_same_v<T, Branch> || std::is_same_v<T, Select> ||
                      std::is_same_v<T, Close>) {
          return n.ep;
        } else {
          return std::nullopt;
        }
      },
      p.node().v);
}

std::vector<Process> children(const Process& p) {
  return std::visit(
      [](const auto& n) -> std::vector<Process> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Request> || std::is_same_v<T, Accept> ||
                      std::is_same_v<T, ReplicatedAccept> || std::is_same_v<T, Located> ||
                      std::is_same_v<T, Update> || std::is_same_v<T, Restrict>) {
          return {n.body};
        } else if constexpr (std::is_same_v<T, Send> || std::is_same_v<T, Receive> ||
                             std::is_same_v<T, Throw> || std::is_same_v<T, Catch> ||
                             std::is_same_v<T, Select> || std::is_same_v<T, Close>) {
          return {n.cont};
        } else if constexpr (std::is_same_v<T, Branch>) {
          std::vector<Process> out;
          for (const auto& [l, arm] : n.arms) out.push_back(arm);
          return out;
        } else if constexpr (std::is_same_v<T, Parallel>) {
          return {n.left, n.right};
        } else if constexpr (std::is_same_v<T, Conditional>) {
          return {n.then_branch, n.else_branch};
        } else {
          return {};
        }
      },
      p.node().v);
}

}  // namespace asp
