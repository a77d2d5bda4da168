#pragma once

// Concrete syntax for processes, types and environments (.asp files).
//
//   type alpha = ?(int).?(int).+{fail: end, ok: !(int).end};
//   name a : <alpha un, dual(alpha) lin>;
//   locinterface w3 : { a: alpha @ inf };
//   proc C = request a(x). send x(10). ...;
//   main = loc w3 [ accept* a(x). ... ] | C;

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "asp/error.hpp"
#include "asp/session_types.hpp"
#include "asp/term.hpp"

namespace asp {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

enum class Severity : std::uint8_t { kError, kWarning };

struct Diagnostic {
  Severity severity = Severity::kError;
  Span span;
  std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

// "path:line:col: error: message" followed by the offending line and a caret.
std::string format_diagnostic(const Diagnostic& d, std::string_view text, std::string_view path);

struct TypeDecl {
  std::string name;
  SessionType type;
};
struct NameDecl {
  Name name;
  ServiceType type;
};
struct VarDecl {
  Name name;
  BasicType sort;
};
struct LocInterfaceDecl {
  LocationName loc;
  Interface interface;
};
struct ProcInterfaceDecl {
  ProcessVarName var;
  Interface interface;
};
// A named process. Later declarations refer to it by its bare name; the
// reference is expanded by sharing the body, so the printer can fold it back.
struct ProcDecl {
  std::string name;
  std::vector<Name> params;  // free names the body may mention
  Process body;
};
struct MainDecl {
  Process body;
};

using Declaration =
    std::variant<TypeDecl, NameDecl, VarDecl, LocInterfaceDecl, ProcInterfaceDecl, ProcDecl, MainDecl>;

struct SourceFile {
  std::vector<Declaration> declarations;  // in source order

  // Views assembled from the declarations.
  TypeAliases aliases;
  FirstOrderEnv gamma;
  HigherOrderEnv theta;
  Process main;

  // Source span of every process node built by the parser.
  std::unordered_map<const ProcNode*, Span> spans;

  const ProcDecl* find_proc(std::string_view name) const;
};

struct ParseOptions {
  // Runtime channels outside a `new` binder (trace files, test snippets).
  bool allow_free_channels = false;
  // Free session names and value variables (snippets without declarations).
  bool allow_free_names = false;
};

ErrorOr<SourceFile, Diagnostics> parse(std::string_view text, const ParseOptions& opts = {});

// A single process, e.g. "close x. 0". Services need no declaration here.
ErrorOr<Process, Diagnostics> parse_process(std::string_view text,
                                            const ParseOptions& opts = {});

ErrorOr<SessionType, Diagnostics> parse_type(std::string_view text,
                                             const TypeAliases& aliases = {});

std::string print(const Process& p);
std::string print(const Expression& e);
std::string print(const SessionType& t, const TypeAliases& aliases = {});
std::string print(const Endpoint& e);
// One declaration per line; `proc` references are folded back into names.
std::string print(const SourceFile& f);

}  // namespace asp
