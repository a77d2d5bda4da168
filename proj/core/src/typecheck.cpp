#include "asp/typecheck.hpp"

#include <map>
#include <optional>
#include <set>
#include <type_traits>
#include <vector>

#include "asp/congruence.hpp"
#include "asp/substitution.hpp"
#include "term_internal.hpp"

namespace asp {

std::string to_string(TypeErrorKind k) {
  switch (k) {
    case TypeErrorKind::kAnnotationMismatch:
      return "AnnotationMismatch";
    case TypeErrorKind::kInterfaceExceeded:
      return "InterfaceExceeded";
    case TypeErrorKind::kUnbalancedRestriction:
      return "UnbalancedRestriction";
    case TypeErrorKind::kLinearityViolation:
      return "LinearityViolation";
    case TypeErrorKind::kEndpointTypeMismatch:
      return "EndpointTypeMismatch";
    case TypeErrorKind::kSortMismatch:
      return "SortMismatch";
    case TypeErrorKind::kQualifierMismatch:
      return "QualifierMismatch";
    case TypeErrorKind::kArmMismatch:
      return "ArmMismatch";
    case TypeErrorKind::kNonEmptyUpdate:
      return "NonEmptyUpdate";
    case TypeErrorKind::kUnknownService:
      return "UnknownService";
    case TypeErrorKind::kUnknownLocation:
      return "UnknownLocation";
    case TypeErrorKind::kUnknownProcessVar:
      return "UnknownProcessVar";
    case TypeErrorKind::kUnboundVariable:
      return "UnboundVariable";
    case TypeErrorKind::kUnboundEndpoint:
      return "UnboundEndpoint";
  }
  return "TypeError";
}

std::string to_string(const TypeError& e) {
  return to_string(e.kind) + " (" + e.rule + "): " + e.message;
}

namespace {

// ---------------------------------------------------------------------------
// Inference terms. A TRef names a node together with a duality flag, so a
// type variable and its dual share one node.

struct TRef {
  std::uint32_t id = 0;
  bool dual = false;
};

TRef flip(TRef r, bool d) { return {r.id, r.dual != d}; }

enum class TK : std::uint8_t { kVar, kEnd, kSend, kRecv, kThrow, kCatch, kBranch, kSelect };

TK dualize(TK k, bool d) {
  if (!d) return k;
  switch (k) {
    case TK::kSend:
      return TK::kRecv;
    case TK::kRecv:
      return TK::kSend;
    case TK::kThrow:
      return TK::kCatch;
    case TK::kCatch:
      return TK::kThrow;
    case TK::kBranch:
      return TK::kSelect;
    case TK::kSelect:
      return TK::kBranch;
    default:
      return k;
  }
}

struct TNode {
  TK kind = TK::kVar;
  std::optional<TRef> link;          // bound variables only
  std::vector<std::uint32_t> sorts;  // send/receive
  TRef del;                          // throw/catch; never dualized
  TRef cont;
  std::uint32_t row = 0;             // branch/select
};

// Label set of a branch or select. Open rows may still gain labels; a
// uniform row requires every arm to have the same continuation (selection
// of a computed label).
struct RowNode {
  std::optional<TRef> link;  // id is a row index here
  std::map<Label, TRef> arms;
  bool open = false;
  std::optional<TRef> uniform;
};

struct SortNode {
  std::optional<std::uint32_t> link;
  std::optional<BasicType> value;
};

struct Failure {
  TypeError error;
};

class Unifier {
 public:
  TRef var() { return push(TNode{}); }
  TRef end() {
    TNode n;
    n.kind = TK::kEnd;
    return push(n);
  }
  TRef comm(TK kind, std::vector<std::uint32_t> sorts, TRef cont) {
    TNode n;
    n.kind = kind;
    n.sorts = std::move(sorts);
    n.cont = cont;
    return push(n);
  }
  TRef deleg(TK kind, TRef del, TRef cont) {
    TNode n;
    n.kind = kind;
    n.del = del;
    n.cont = cont;
    return push(n);
  }
  TRef choice(TK kind, RowNode row) {
    rows_.push_back(std::move(row));
    TNode n;
    n.kind = kind;
    n.row = static_cast<std::uint32_t>(rows_.size() - 1);
    return push(n);
  }

  std::uint32_t sort_var() {
    sorts_.push_back({});
    return static_cast<std::uint32_t>(sorts_.size() - 1);
  }
  std::uint32_t sort(BasicType b) {
    sorts_.push_back({std::nullopt, b});
    return static_cast<std::uint32_t>(sorts_.size() - 1);
  }

  TRef import(const SessionType& t) {
    return std::visit(
        [&](const auto& n) -> TRef {
          using T = std::decay_t<decltype(n)>;
          auto sorts = [&](const std::vector<BasicType>& bs) {
            std::vector<std::uint32_t> out;
            for (auto b : bs) out.push_back(sort(b));
            return out;
          };
          auto row = [&](const std::map<Label, SessionType>& arms) {
            RowNode r;
            for (const auto& [l, a] : arms) r.arms.emplace(l, import(a));
            return r;
          };
          if constexpr (std::is_same_v<T, TEnd>) {
            return end();
          } else if constexpr (std::is_same_v<T, TSend>) {
            return comm(TK::kSend, sorts(n.sorts), import(n.cont));
          } else if constexpr (std::is_same_v<T, TReceive>) {
            return comm(TK::kRecv, sorts(n.sorts), import(n.cont));
          } else if constexpr (std::is_same_v<T, TThrow>) {
            return deleg(TK::kThrow, import(n.delegated), import(n.cont));
          } else if constexpr (std::is_same_v<T, TCatch>) {
            return deleg(TK::kCatch, import(n.delegated), import(n.cont));
          } else if constexpr (std::is_same_v<T, TBranch>) {
            return choice(TK::kBranch, row(n.arms));
          } else {
            return choice(TK::kSelect, row(n.arms));
          }
        },
        t.node().v);
  }

  TRef resolve(TRef r) const {
    while (nodes_[r.id].kind == TK::kVar && nodes_[r.id].link) r = flip(*nodes_[r.id].link, r.dual);
    return r;
  }
  TK kind(TRef r) const {
    r = resolve(r);
    return dualize(nodes_[r.id].kind, r.dual);
  }

  // Returns an empty string on success, otherwise the reason.
  std::string unify(TRef a, TRef b) {
    a = resolve(a);
    b = resolve(b);
    if (a.id == b.id) {
      if (a.dual == b.dual) return {};
      // t = dual(t) only holds for end.
      if (nodes_[a.id].kind == TK::kVar) {
        const TRef e = end();
        nodes_[a.id].link = e;
        return {};
      }
      if (nodes_[a.id].kind == TK::kEnd) return {};
      return "a type cannot equal its own dual";
    }
    if (nodes_[a.id].kind == TK::kVar) return bind(a, b);
    if (nodes_[b.id].kind == TK::kVar) return bind(b, a);
    const TK ka = dualize(nodes_[a.id].kind, a.dual);
    const TK kb = dualize(nodes_[b.id].kind, b.dual);
    if (ka != kb) return "expected " + describe(b) + ", found " + describe(a);
    const TNode na = nodes_[a.id];
    const TNode nb = nodes_[b.id];
    switch (ka) {
      case TK::kEnd:
        return {};
      case TK::kSend:
      case TK::kRecv: {
        if (na.sorts.size() != nb.sorts.size()) {
          return "payload arity " + std::to_string(na.sorts.size()) + " vs " +
                 std::to_string(nb.sorts.size());
        }
        for (std::size_t i = 0; i < na.sorts.size(); ++i) {
          if (auto why = unify_sort(na.sorts[i], nb.sorts[i]); !why.empty()) return why;
        }
        return unify(flip(na.cont, a.dual), flip(nb.cont, b.dual));
      }
      case TK::kThrow:
      case TK::kCatch: {
        if (auto why = unify(na.del, nb.del); !why.empty()) return why;
        return unify(flip(na.cont, a.dual), flip(nb.cont, b.dual));
      }
      case TK::kBranch:
      case TK::kSelect:
        return unify_rows({na.row, a.dual}, {nb.row, b.dual});
      case TK::kVar:
        break;
    }
    return {};
  }

  std::string unify_sort(std::uint32_t a, std::uint32_t b) {
    a = find_sort(a);
    b = find_sort(b);
    if (a == b) return {};
    auto va = sorts_[a].value;
    auto vb = sorts_[b].value;
    if (va && vb && *va != *vb) return "sort " + to_string(*va) + " vs " + to_string(*vb);
    sorts_[a].link = b;
    if (!vb) sorts_[b].value = va;
    return {};
  }

  std::optional<BasicType> sort_value(std::uint32_t s) const { return sorts_[find_sort(s)].value; }

  SessionType zonk(TRef r) const {
    r = resolve(r);
    const TNode& n = nodes_[r.id];
    switch (dualize(n.kind, r.dual)) {
      case TK::kVar:
      case TK::kEnd:
        return SessionType::end();
      case TK::kSend:
        return SessionType::send(zonk_sorts(n.sorts), zonk(flip(n.cont, r.dual)));
      case TK::kRecv:
        return SessionType::receive(zonk_sorts(n.sorts), zonk(flip(n.cont, r.dual)));
      case TK::kThrow:
        return SessionType::throw_(zonk(n.del), zonk(flip(n.cont, r.dual)));
      case TK::kCatch:
        return SessionType::catch_(zonk(n.del), zonk(flip(n.cont, r.dual)));
      case TK::kBranch:
        return SessionType::branch(zonk_arms(n.row, r.dual));
      case TK::kSelect:
        return SessionType::select(zonk_arms(n.row, r.dual));
    }
    return SessionType::end();
  }

  BasicType zonk_sort(std::uint32_t s) const { return sort_value(s).value_or(BasicType::kInt); }

 private:
  TRef push(TNode n) {
    nodes_.push_back(std::move(n));
    return {static_cast<std::uint32_t>(nodes_.size() - 1), false};
  }

  std::uint32_t find_sort(std::uint32_t s) const {
    while (sorts_[s].link) s = *sorts_[s].link;
    return s;
  }

  TRef resolve_row(TRef r) const {
    while (rows_[r.id].link) r = flip(*rows_[r.id].link, r.dual);
    return r;
  }

  std::string describe(TRef r) const {
    switch (kind(r)) {
      case TK::kVar:
        return "a type variable";
      case TK::kEnd:
        return "end";
      case TK::kSend:
        return "a send";
      case TK::kRecv:
        return "a receive";
      case TK::kThrow:
        return "a throw";
      case TK::kCatch:
        return "a catch";
      case TK::kBranch:
        return "a branch";
      case TK::kSelect:
        return "a select";
    }
    return "?";
  }

  bool occurs(std::uint32_t var, TRef in) const {
    in = resolve(in);
    if (in.id == var) return true;
    const TNode& n = nodes_[in.id];
    switch (n.kind) {
      case TK::kSend:
      case TK::kRecv:
        return occurs(var, n.cont);
      case TK::kThrow:
      case TK::kCatch:
        return occurs(var, n.del) || occurs(var, n.cont);
      case TK::kBranch:
      case TK::kSelect: {
        const RowNode& row = rows_[resolve_row({n.row, false}).id];
        for (const auto& [l, a] : row.arms) {
          if (occurs(var, a)) return true;
        }
        return row.uniform && occurs(var, *row.uniform);
      }
      default:
        return false;
    }
  }

  std::string bind(TRef v, TRef t) {
    if (occurs(v.id, t)) return "recursive session type";
    nodes_[v.id].link = flip(t, v.dual);
    return {};
  }

  std::string unify_rows(TRef a, TRef b) {
    a = resolve_row(a);
    b = resolve_row(b);
    if (a.id == b.id) {
      if (a.dual == b.dual) return {};
      RowNode r = rows_[a.id];
      for (const auto& [l, arm] : r.arms) {
        if (auto why = unify(flip(arm, a.dual), flip(arm, b.dual)); !why.empty()) return why;
      }
      return {};
    }
    const RowNode ra = rows_[a.id];
    const RowNode rb = rows_[b.id];
    const bool offset = a.dual != b.dual;
    std::vector<std::pair<TRef, TRef>> pending;
    RowNode merged = rb;
    for (const auto& [l, arm] : ra.arms) {
      auto it = rb.arms.find(l);
      if (it != rb.arms.end()) {
        pending.emplace_back(flip(arm, a.dual), flip(it->second, b.dual));
      } else if (!rb.open) {
        return "label '" + l.str() + "' is not offered";
      } else {
        merged.arms.emplace(l, flip(arm, offset));
      }
    }
    for (const auto& [l, arm] : rb.arms) {
      if (!ra.arms.contains(l) && !ra.open) return "label '" + l.str() + "' is not offered";
    }
    merged.open = ra.open && rb.open;
    if (ra.uniform) {
      if (rb.uniform) {
        pending.emplace_back(flip(*ra.uniform, a.dual), flip(*rb.uniform, b.dual));
      } else {
        merged.uniform = flip(*ra.uniform, offset);
      }
    }
    if (merged.uniform) {
      for (const auto& [l, arm] : merged.arms) {
        pending.emplace_back(flip(arm, b.dual), flip(*merged.uniform, b.dual));
      }
    }
    rows_[a.id].link = TRef{b.id, offset};
    rows_[b.id] = merged;
    for (const auto& [x, y] : pending) {
      if (auto why = unify(x, y); !why.empty()) return why;
    }
    return {};
  }

  std::vector<BasicType> zonk_sorts(const std::vector<std::uint32_t>& ss) const {
    std::vector<BasicType> out;
    for (auto s : ss) out.push_back(zonk_sort(s));
    return out;
  }

  std::map<Label, SessionType> zonk_arms(std::uint32_t row, bool d) const {
    TRef r = resolve_row({row, d});
    std::map<Label, SessionType> out;
    for (const auto& [l, arm] : rows_[r.id].arms) out.emplace(l, zonk(flip(arm, r.dual)));
    return out;
  }

  std::vector<TNode> nodes_;
  std::vector<RowNode> rows_;
  std::vector<SortNode> sorts_;
};

// ---------------------------------------------------------------------------
// The checker proper.

struct Entry {
  TRef type;
  bool bracketed = false;
};

struct Result {
  std::map<Endpoint, Entry> delta;
  Interface iface;
};

std::string show(const Endpoint& e) {
  if (e.is_name()) return e.name().str();
  return "k#" + std::to_string(e.channel().id) +
         (e.channel().polarity == Polarity::kPlus ? "+" : "-");
}

class Checker {
 public:
  Checker(const FirstOrderEnv& g, const HigherOrderEnv& t, const TypecheckOptions& opts)
      : g_(g), theta_(t), opts_(opts) {
    for (const auto& [n, b] : g.vars) values_[n] = u_.sort(b);
  }

  Result check(const Process& p) {
    cur_ = p.get();
    return std::visit([&](const auto& n) { return rule(n, p); }, p.node().v);
  }

  Judgment finish(const Result& r) {
    Judgment j;
    for (const auto& [ep, e] : r.delta) {
      if (ep.is_name() && !opts_.allow_free_endpoints) {
        fail(TypeErrorKind::kUnboundEndpoint, "t:Top", "free session name " + show(ep), nullptr);
      }
      j.typing.emplace(ep, TypingEntry{u_.zonk(e.type), e.bracketed});
    }
    j.interface = r.iface;
    return j;
  }

 private:
  [[noreturn]] void fail(TypeErrorKind k, std::string rule, std::string msg,
                         const ProcNode* node) {
    throw Failure{TypeError{k, std::move(rule), std::move(msg), node}};
  }
  [[noreturn]] void fail(TypeErrorKind k, std::string rule, std::string msg) {
    fail(k, std::move(rule), std::move(msg), cur_);
  }

  void unify(TRef a, TRef b, const std::string& rule, const std::string& what) {
    if (auto why = u_.unify(a, b); !why.empty()) {
      fail(TypeErrorKind::kEndpointTypeMismatch, rule, what + ": " + why);
    }
  }

  // Sort of an expression, as a sort variable.
  std::uint32_t sort_of(const Expression& e) {
    return std::visit(
        detail::Overloaded{
            [&](const ExprConst& c) -> std::uint32_t {
              if (std::holds_alternative<std::int64_t>(c.value)) return u_.sort(BasicType::kInt);
              if (std::holds_alternative<bool>(c.value)) return u_.sort(BasicType::kBool);
              return u_.sort(BasicType::kStr);
            },
            [&](const ExprVar& v) -> std::uint32_t {
              auto it = values_.find(v.name);
              if (it != values_.end()) return it->second;
              if (!opts_.allow_free_values) {
                fail(TypeErrorKind::kUnboundVariable, "t:Expr",
                     "unbound variable '" + v.name.str() + "'");
              }
              return values_[v.name] = u_.sort_var();
            },
            [&](const ExprBinary& b) -> std::uint32_t {
              auto l = sort_of(b.lhs);
              auto r = sort_of(b.rhs);
              auto need = [&](std::uint32_t s, BasicType t) {
                if (auto why = u_.unify_sort(s, u_.sort(t)); !why.empty()) {
                  fail(TypeErrorKind::kSortMismatch, "t:Expr", why);
                }
              };
              switch (b.op) {
                case BinOp::kAdd:
                case BinOp::kSub:
                case BinOp::kDiv:
                  need(l, BasicType::kInt);
                  need(r, BasicType::kInt);
                  return u_.sort(BasicType::kInt);
                case BinOp::kEq:
                  if (auto why = u_.unify_sort(l, r); !why.empty()) {
                    fail(TypeErrorKind::kSortMismatch, "t:Expr", why);
                  }
                  return u_.sort(BasicType::kBool);
                case BinOp::kAnd:
                  need(l, BasicType::kBool);
                  need(r, BasicType::kBool);
                  return u_.sort(BasicType::kBool);
              }
              return u_.sort(BasicType::kInt);
            },
        },
        e.node().v);
  }

  void expect_sort(const Expression& e, BasicType b, const std::string& rule) {
    auto s = sort_of(e);
    if (auto why = u_.unify_sort(s, u_.sort(b)); !why.empty()) {
      fail(TypeErrorKind::kSortMismatch, rule, why);
    }
  }

  // Removes k from Δ and returns its type; k must have been used.
  TRef take(Result& r, const Endpoint& k, const std::string& rule) {
    auto it = r.delta.find(k);
    if (it == r.delta.end()) {
      fail(TypeErrorKind::kLinearityViolation, rule,
           "session " + show(k) + " is not completed (missing close) in the continuation");
    }
    if (it->second.bracketed) {
      fail(TypeErrorKind::kLinearityViolation, rule, "session " + show(k) + " is restricted");
    }
    TRef t = it->second.type;
    r.delta.erase(it);
    return t;
  }

  void put(Result& r, const Endpoint& k, TRef t, const std::string& rule) {
    if (!r.delta.emplace(k, Entry{t, false}).second) {
      fail(TypeErrorKind::kLinearityViolation, rule, "session " + show(k) + " used twice");
    }
  }

  const ServiceType& service(const Name& a, const std::string& rule) {
    auto it = g_.services.find(a);
    if (it == g_.services.end()) {
      fail(TypeErrorKind::kUnknownService, rule, "service '" + a.str() + "' is not declared");
    }
    return it->second;
  }

  Interface location(const LocationName& l, const std::string& rule) {
    auto it = theta_.locations.find(l);
    if (it == theta_.locations.end()) {
      fail(TypeErrorKind::kUnknownLocation, rule,
           "location '" + l.str() + "' has no declared interface");
    }
    return it->second;
  }

  // Both results must carry the same typing and interface (branch arms and
  // conditional branches).
  void same(const Result& a, const Result& b, const std::string& rule) {
    if (a.delta.size() != b.delta.size()) {
      fail(TypeErrorKind::kArmMismatch, rule, "arms use different sessions");
    }
    for (const auto& [ep, e] : a.delta) {
      auto it = b.delta.find(ep);
      if (it == b.delta.end() || it->second.bracketed != e.bracketed) {
        fail(TypeErrorKind::kArmMismatch, rule,
             "session " + show(ep) + " is not used alike in every arm");
      }
      unify(e.type, it->second.type, rule, "session " + show(ep) + " in different arms");
    }
    if (!(a.iface == b.iface)) {
      fail(TypeErrorKind::kArmMismatch, rule, "arms declare different interfaces");
    }
  }

  Result rule(const Inaction&, const Process&) { return {}; }

  Result rule(const Request& n, const Process& p) {
    const auto& st = service(n.service, "t:Req");
    Result r = check(n.body);
    cur_ = p.get();
    TRef x = take(r, n.binder, "t:Req");
    unify(x, u_.import(st.client), "t:Req", "client of '" + n.service.str() + "'");
    r.iface.add(n.service, st.client, Multiplicity(1));
    return r;
  }

  Result rule(const Accept& n, const Process& p) {
    const auto& st = service(n.service, "t:Acc");
    if (st.server_qualifier != Qualifier::kLin) {
      fail(TypeErrorKind::kQualifierMismatch, "t:Acc",
           "service '" + n.service.str() + "' is unrestricted; use a replicated accept");
    }
    Result r = check(n.body);
    cur_ = p.get();
    TRef x = take(r, n.binder, "t:Acc");
    unify(x, u_.import(st.server), "t:Acc", "server of '" + n.service.str() + "'");
    r.iface.add(n.service, st.server, Multiplicity(1));
    return r;
  }

  Result rule(const ReplicatedAccept& n, const Process& p) {
    const auto& st = service(n.service, "t:RAcc");
    if (st.server_qualifier != Qualifier::kUn) {
      fail(TypeErrorKind::kQualifierMismatch, "t:RAcc",
           "service '" + n.service.str() + "' is linear and cannot be replicated");
    }
    Result r = check(n.body);
    cur_ = p.get();
    TRef x = take(r, n.binder, "t:RAcc");
    if (!r.delta.empty()) {
      fail(TypeErrorKind::kLinearityViolation, "t:RAcc",
           "replicated body uses session " + show(r.delta.begin()->first));
    }
    unify(x, u_.import(st.server), "t:RAcc", "server of '" + n.service.str() + "'");
    Interface iface = r.iface.replicated();
    iface.add(n.service, st.server, Multiplicity::infinite());
    return {{}, iface};
  }

  Result rule(const Located& n, const Process& p) {
    const Interface declared = location(n.loc, "t:Loc");
    Result r = check(n.body);
    cur_ = p.get();
    if (n.annotation != r.delta.size()) {
      fail(TypeErrorKind::kAnnotationMismatch, "t:Loc",
           "location '" + n.loc.str() + "' is annotated " + std::to_string(n.annotation) +
               " but holds " + std::to_string(r.delta.size()) + " session endpoint(s)");
    }
    if (!interface_leq(r.iface, declared)) {
      fail(TypeErrorKind::kInterfaceExceeded, "t:Loc",
           "location '" + n.loc.str() + "' declares " + to_string(declared) + " but contains " +
               to_string(r.iface));
    }
    return r;
  }

  Result rule(const ProcVar& n, const Process&) {
    auto it = theta_.process_vars.find(n.name);
    if (it == theta_.process_vars.end()) {
      fail(TypeErrorKind::kUnknownProcessVar, "t:PVar",
           "process variable '$" + n.name.str() + "' has no interface");
    }
    return {{}, it->second};
  }

  Result rule(const Update& n, const Process& p) {
    const Interface declared = location(n.loc, "t:Adapt");
    HigherOrderEnv saved = theta_;
    for (const auto& x : free_process_vars(n.body)) theta_.process_vars[x] = declared;
    Result r = check(n.body);
    theta_ = std::move(saved);
    cur_ = p.get();
    if (!r.delta.empty()) {
      fail(TypeErrorKind::kNonEmptyUpdate, "t:Adapt",
           "update body for '" + n.loc.str() + "' has open session " +
               show(r.delta.begin()->first));
    }
    return {};
  }

  Result rule(const Send& n, const Process& p) {
    Result r = check(n.cont);
    cur_ = p.get();
    std::vector<std::uint32_t> sorts;
    for (const auto& e : n.payload) sorts.push_back(sort_of(e));
    TRef k = take(r, n.ep, "t:Out");
    put(r, n.ep, u_.comm(TK::kSend, sorts, k), "t:Out");
    return r;
  }

  Result rule(const Receive& n, const Process& p) {
    std::vector<std::uint32_t> sorts;
    std::map<Name, std::optional<std::uint32_t>> shadowed;
    for (const auto& x : n.binders) {
      auto it = values_.find(x);
      if (!shadowed.contains(x)) {
        shadowed[x] = it == values_.end() ? std::nullopt : std::optional{it->second};
      }
      sorts.push_back(values_[x] = u_.sort_var());
    }
    Result r = check(n.cont);
    cur_ = p.get();
    for (const auto& [x, s] : shadowed) {
      if (s) {
        values_[x] = *s;
      } else {
        values_.erase(x);
      }
    }
    TRef k = take(r, n.ep, "t:In");
    put(r, n.ep, u_.comm(TK::kRecv, sorts, k), "t:In");
    return r;
  }

  Result rule(const Throw& n, const Process& p) {
    Result r = check(n.cont);
    cur_ = p.get();
    if (r.delta.contains(n.delegated)) {
      fail(TypeErrorKind::kLinearityViolation, "t:Thr",
           "delegated session " + show(n.delegated) + " is still used after the throw");
    }
    TRef k = take(r, n.ep, "t:Thr");
    TRef d = u_.var();
    put(r, n.ep, u_.deleg(TK::kThrow, d, k), "t:Thr");
    put(r, n.delegated, d, "t:Thr");
    return r;
  }

  Result rule(const Catch& n, const Process& p) {
    Result r = check(n.cont);
    cur_ = p.get();
    TRef d = take(r, n.binder, "t:Cat");
    TRef k = take(r, n.ep, "t:Cat");
    put(r, n.ep, u_.deleg(TK::kCatch, d, k), "t:Cat");
    return r;
  }

  Result rule(const Branch& n, const Process& p) {
    std::optional<Result> first;
    RowNode row;
    for (const auto& [l, arm] : n.arms) {
      Result r = check(arm);
      cur_ = p.get();
      row.arms.emplace(l, take(r, n.ep, "t:Brch"));
      if (first) {
        same(*first, r, "t:Brch");
      } else {
        first = std::move(r);
      }
    }
    Result out = first ? *first : Result{};
    put(out, n.ep, u_.choice(TK::kBranch, std::move(row)), "t:Brch");
    return out;
  }

  Result rule(const Select& n, const Process& p) {
    Result r = check(n.cont);
    cur_ = p.get();
    TRef k = take(r, n.ep, "t:Sel");
    RowNode row;
    row.open = true;
    if (const auto* l = std::get_if<Label>(&n.label)) {
      row.arms.emplace(*l, k);
    } else {
      expect_sort(std::get<Expression>(n.label), BasicType::kStr, "t:Sel");
      row.uniform = k;
    }
    put(r, n.ep, u_.choice(TK::kSelect, std::move(row)), "t:Sel");
    return r;
  }

  Result rule(const Parallel& n, const Process& p) {
    Result a = check(n.left);
    Result b = check(n.right);
    cur_ = p.get();
    for (const auto& [ep, e] : b.delta) {
      if (!a.delta.emplace(ep, e).second) {
        fail(TypeErrorKind::kLinearityViolation, "t:Par",
             "session " + show(ep) + " is used on both sides of a parallel composition");
      }
    }
    a.iface.add_all(b.iface);
    return a;
  }

  Result rule(const Conditional& n, const Process& p) {
    expect_sort(n.cond, BasicType::kBool, "t:If");
    Result a = check(n.then_branch);
    Result b = check(n.else_branch);
    cur_ = p.get();
    same(a, b, "t:If");
    return a;
  }

  Result rule(const Close& n, const Process& p) {
    Result r = check(n.cont);
    cur_ = p.get();
    if (r.delta.contains(n.ep)) {
      fail(TypeErrorKind::kLinearityViolation, "t:Cls",
           "session " + show(n.ep) + " is used after being closed");
    }
    put(r, n.ep, u_.end(), "t:Cls");
    return r;
  }

  Result rule(const Restrict& n, const Process& p) {
    Result r = check(n.body);
    cur_ = p.get();
    const Endpoint pos = Channel{n.channel, Polarity::kPlus};
    const Endpoint neg = Channel{n.channel, Polarity::kMinus};
    auto ip = r.delta.find(pos);
    auto in = r.delta.find(neg);
    if (ip == r.delta.end() && in == r.delta.end()) return r;
    if (ip == r.delta.end() || in == r.delta.end()) {
      fail(TypeErrorKind::kUnbalancedRestriction, "t:Res",
           "only one endpoint of restricted session k#" + std::to_string(n.channel) +
               " is in use");
    }
    unify(ip->second.type, flip(in->second.type, true), "t:Res",
          "endpoints of k#" + std::to_string(n.channel) + " are not dual");
    ip->second.bracketed = true;
    in->second.bracketed = true;
    return r;
  }

  const FirstOrderEnv& g_;
  HigherOrderEnv theta_;
  TypecheckOptions opts_;
  Unifier u_;
  std::map<Name, std::uint32_t> values_;
  const ProcNode* cur_ = nullptr;
};

}  // namespace

ErrorOr<Judgment, TypeError> typecheck(const FirstOrderEnv& g, const HigherOrderEnv& t,
                                       const Process& p, const TypecheckOptions& opts) {
  try {
    Checker c(g, t, opts);
    Result r = c.check(separate_binders(p));
    return c.finish(r);
  } catch (const Failure& f) {
    return f.error;
  }
}

}  // namespace asp
