#pragma once

// Abstract syntax of adaptable session processes: names, polarized channels,
// expressions and process terms. Terms are immutable and freely shared.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace asp {

// Strongly typed identifier. Tags keep names, labels, locations and process
// variables from being mixed up.
template <class Tag>
class Ident {
 public:
  Ident() = default;
  explicit Ident(std::string text) : text_(std::move(text)) {}

  const std::string& str() const { return text_; }
  bool empty() const { return text_.empty(); }

  friend bool operator==(const Ident&, const Ident&) = default;
  friend auto operator<=>(const Ident&, const Ident&) = default;

 private:
  std::string text_;
};

using Name = Ident<struct NameTag>;
using Label = Ident<struct LabelTag>;
using LocationName = Ident<struct LocationTag>;
using ProcessVarName = Ident<struct ProcessVarTag>;

enum class Polarity : std::uint8_t { kPlus, kMinus };

constexpr Polarity complement(Polarity p) {
  return p == Polarity::kPlus ? Polarity::kMinus : Polarity::kPlus;
}

using ChannelId = std::uint32_t;

struct Channel {
  ChannelId id = 0;
  Polarity polarity = Polarity::kPlus;

  Channel dual() const { return {id, complement(polarity)}; }

  friend bool operator==(const Channel&, const Channel&) = default;
  friend auto operator<=>(const Channel&, const Channel&) = default;
};

inline bool are_dual(const Channel& a, const Channel& b) {
  return a.id == b.id && a.polarity != b.polarity;
}

// A session endpoint: a name bound by request/accept/catch before the session
// exists, or a runtime channel end afterwards.
class Endpoint {
 public:
  Endpoint(Name n) : v_(std::move(n)) {}  // NOLINT: implicit by design of use sites
  Endpoint(Channel c) : v_(c) {}          // NOLINT

  bool is_channel() const { return std::holds_alternative<Channel>(v_); }
  bool is_name() const { return std::holds_alternative<Name>(v_); }
  const Channel& channel() const { return std::get<Channel>(v_); }
  const Name& name() const { return std::get<Name>(v_); }

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
  friend auto operator<=>(const Endpoint& a, const Endpoint& b) { return a.v_ <=> b.v_; }

 private:
  std::variant<Name, Channel> v_;
};

// ---------------------------------------------------------------------------
// Expressions

using Value = std::variant<std::int64_t, bool, std::string>;

enum class BinOp : std::uint8_t { kAdd, kSub, kDiv, kEq, kAnd };

struct ExprNode;

class Expression {
 public:
  static Expression constant(Value v);
  static Expression integer(std::int64_t v) { return constant(Value{v}); }
  static Expression boolean(bool v) { return constant(Value{v}); }
  static Expression string(std::string v) { return constant(Value{std::move(v)}); }
  static Expression var(Name n);
  static Expression binary(BinOp op, Expression lhs, Expression rhs);

  const ExprNode& node() const { return *node_; }
  const ExprNode* get() const { return node_.get(); }

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  explicit Expression(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ExprConst {
  Value value;
};
struct ExprVar {
  Name name;
};
struct ExprBinary {
  BinOp op;
  Expression lhs;
  Expression rhs;
};

struct ExprNode {
  std::variant<ExprConst, ExprVar, ExprBinary> v;
};

// ---------------------------------------------------------------------------
// Processes

struct ProcNode;

class Process {
 public:
  // Default-constructed processes are inaction.
  Process();

  const ProcNode& node() const { return *node_; }
  const ProcNode* get() const { return node_.get(); }

  template <class T>
  const T* as() const;
  template <class T>
  bool is() const {
    return as<T>() != nullptr;
  }

  friend bool operator==(const Process& a, const Process& b);

 private:
  friend Process make_process(ProcNode node);
  explicit Process(std::shared_ptr<const ProcNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ProcNode> node_;
};

struct Request {
  Name service;
  Name binder;
  Process body;
};
struct Accept {
  Name service;
  Name binder;
  Process body;
};
struct ReplicatedAccept {
  Name service;
  Name binder;
  Process body;
};
struct Located {
  LocationName loc;
  std::uint32_t annotation = 0;
  Process body;
};
struct ProcVar {
  ProcessVarName name;
};
struct Update {
  LocationName loc;
  Process body;
};
struct Send {
  Endpoint ep;
  std::vector<Expression> payload;
  Process cont;
};
struct Receive {
  Endpoint ep;
  std::vector<Name> binders;
  Process cont;
};
struct Throw {
  Endpoint ep;
  Endpoint delegated;
  Process cont;
};
struct Catch {
  Endpoint ep;
  Name binder;
  Process cont;
};
struct Branch {
  Endpoint ep;
  std::map<Label, Process> arms;
};
// A selection names its label directly, or computes it from an expression
// that must evaluate to a string (e.g. a label received earlier).
using SelectLabel = std::variant<Label, Expression>;
struct Select {
  Endpoint ep;
  SelectLabel label;
  Process cont;
};
struct Parallel {
  Process left;
  Process right;
};
struct Conditional {
  Expression cond;
  Process then_branch;
  Process else_branch;
};
struct Close {
  Endpoint ep;
  Process cont;
};
struct Restrict {
  ChannelId channel = 0;
  Process body;
};
struct Inaction {};

struct ProcNode {
  std::variant<Request, Accept, ReplicatedAccept, Located, ProcVar, Update, Send, Receive, Throw,
               Catch, Branch, Select, Parallel, Conditional, Close, Restrict, Inaction>
      v;
  // Subtree summaries, filled in by make_process. Passes that only care
  // about channels or soups skip subtrees without them.
  bool has_channels = false;  // a channel endpoint or a restriction
  bool has_parallel = false;
  std::uint64_t hash = 0;     // structural, platform independent
};

template <class T>
const T* Process::as() const {
  return std::get_if<T>(&node_->v);
}

Process make_process(ProcNode node);

// Constructors.
Process inaction();
Process request(Name service, Name binder, Process body);
Process accept(Name service, Name binder, Process body);
Process replicated_accept(Name service, Name binder, Process body);
Process located(LocationName loc, std::uint32_t annotation, Process body);
Process process_var(ProcessVarName name);
Process update(LocationName loc, Process body);
Process send(Endpoint ep, std::vector<Expression> payload, Process cont);
Process receive(Endpoint ep, std::vector<Name> binders, Process cont);
Process throw_(Endpoint ep, Endpoint delegated, Process cont);
Process catch_(Endpoint ep, Name binder, Process cont);
Process branch(Endpoint ep, std::map<Label, Process> arms);
Process select(Endpoint ep, SelectLabel label, Process cont);
Process parallel(Process left, Process right);
Process conditional(Expression cond, Process then_branch, Process else_branch);
Process close(Endpoint ep, Process cont);
Process restrict(ChannelId channel, Process body);

// Right-nested parallel composition of all parts; inaction for none.
Process parallel_all(const std::vector<Process>& parts);

// Short-hand helpers used heavily by tests and the corpus builders.
inline Name name(std::string s) { return Name(std::move(s)); }
inline Label label(std::string s) { return Label(std::move(s)); }
inline LocationName loc(std::string s) { return LocationName(std::move(s)); }
inline ProcessVarName pvar(std::string s) { return ProcessVarName(std::move(s)); }
inline Channel plus(ChannelId id) { return {id, Polarity::kPlus}; }
inline Channel minus(ChannelId id) { return {id, Polarity::kMinus}; }

// The endpoint a prefix acts on, if the process starts with a session prefix
// (send, receive, throw, catch, branch, select, close).
std::optional<Endpoint> subject(const Process& p);

// The continuation-bearing children of a node, in a fixed order.
std::vector<Process> children(const Process& p);

}  // namespace asp
