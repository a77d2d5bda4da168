#pragma once

// Session types, qualifiers, interfaces, typings and the two typing
// environments.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "asp/term.hpp"

namespace asp {

enum class BasicType : std::uint8_t { kInt, kBool, kStr };

std::string to_string(BasicType b);

struct SessionTypeNode;

class SessionType {
 public:
  // Default-constructed types are `end`.
  SessionType();

  static SessionType end();
  static SessionType send(std::vector<BasicType> sorts, SessionType cont);
  static SessionType receive(std::vector<BasicType> sorts, SessionType cont);
  static SessionType throw_(SessionType delegated, SessionType cont);
  static SessionType catch_(SessionType delegated, SessionType cont);
  static SessionType branch(std::map<Label, SessionType> arms);
  static SessionType select(std::map<Label, SessionType> arms);

  const SessionTypeNode& node() const { return *node_; }
  template <class T>
  const T* as() const;
  bool is_end() const;

  friend bool operator==(const SessionType& a, const SessionType& b);
  friend std::strong_ordering operator<=>(const SessionType& a, const SessionType& b);

 private:
  explicit SessionType(std::shared_ptr<const SessionTypeNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const SessionTypeNode> node_;
};

struct TEnd {};
struct TSend {
  std::vector<BasicType> sorts;
  SessionType cont;
};
struct TReceive {
  std::vector<BasicType> sorts;
  SessionType cont;
};
struct TThrow {
  SessionType delegated;
  SessionType cont;
};
struct TCatch {
  SessionType delegated;
  SessionType cont;
};
struct TBranch {
  std::map<Label, SessionType> arms;
};
struct TSelect {
  std::map<Label, SessionType> arms;
};

struct SessionTypeNode {
  std::variant<TEnd, TSend, TReceive, TThrow, TCatch, TBranch, TSelect> v;
};

template <class T>
const T* SessionType::as() const {
  return std::get_if<T>(&node_->v);
}

SessionType dual(const SessionType& t);

// Named types used when printing: a type equal to an alias prints as the
// alias, and its dual as `dual(alias)`.
using TypeAliases = std::vector<std::pair<std::string, SessionType>>;

std::string to_string(const SessionType& t, const TypeAliases& aliases = {});

enum class Qualifier : std::uint8_t { kLin, kUn };

std::string to_string(Qualifier q);

class Multiplicity {
 public:
  constexpr Multiplicity() = default;
  constexpr explicit Multiplicity(std::uint64_t n) : n_(n) {}
  static constexpr Multiplicity infinite() {
    Multiplicity m;
    m.inf_ = true;
    return m;
  }

  bool is_infinite() const { return inf_; }
  std::uint64_t count() const { return n_; }

  friend Multiplicity operator+(Multiplicity a, Multiplicity b);
  friend bool operator==(const Multiplicity&, const Multiplicity&) = default;
  friend bool operator<=(Multiplicity a, Multiplicity b);

 private:
  std::uint64_t n_ = 0;
  bool inf_ = false;
};

std::string to_string(Multiplicity m);

struct InterfaceEntry {
  Name name;
  SessionType type;
  Multiplicity multiplicity;

  friend bool operator==(const InterfaceEntry&, const InterfaceEntry&) = default;
};

// Services declared by a process. Entries are keyed by name and type
// together: a process may both offer and use the same service name, with
// dual types (a supervisor and a worker side by side, say).
class Interface {
 public:
  Interface() = default;

  // Adds m to the entry for (a, t), creating it if needed.
  void add(const Name& a, const SessionType& t, Multiplicity m);
  void add_all(const Interface& other);
  // Every multiplicity scaled to infinity (replicated servers).
  Interface replicated() const;

  const std::vector<InterfaceEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::optional<Multiplicity> lookup(const Name& a, const SessionType& t) const;

  friend bool operator==(const Interface&, const Interface&) = default;

 private:
  std::vector<InterfaceEntry> entries_;  // sorted by (name, type)
};

Interface sum(const Interface& a, const Interface& b);

// a ⊑ b: every entry of a appears in b with the same type and a
// multiplicity no larger than b's.
bool interface_leq(const Interface& a, const Interface& b);

std::string to_string(const Interface& i, const TypeAliases& aliases = {});

struct TypingEntry {
  SessionType type;
  bool bracketed = false;

  friend bool operator==(const TypingEntry&, const TypingEntry&) = default;
};

// Δ. Closed runtime terms only ever have channel keys; names show up when a
// fragment with free session variables is checked on its own.
using Typing = std::map<Endpoint, TypingEntry>;

// Every entry has its dual-polarity partner with the dual type and the same
// bracketing.
bool balanced(const Typing& d);

std::string to_string(const Typing& d, const TypeAliases& aliases = {});

struct ServiceType {
  SessionType server;
  Qualifier server_qualifier = Qualifier::kUn;
  SessionType client;
  Qualifier client_qualifier = Qualifier::kLin;

  friend bool operator==(const ServiceType&, const ServiceType&) = default;
};

// Γ.
struct FirstOrderEnv {
  std::map<Name, BasicType> vars;
  std::map<Name, ServiceType> services;
};

// Θ.
struct HigherOrderEnv {
  std::map<LocationName, Interface> locations;
  std::map<ProcessVarName, Interface> process_vars;
};

}  // namespace asp
