#pragma once

#include <string>

#include "asp/error.hpp"
#include "asp/session_types.hpp"
#include "asp/term.hpp"

namespace asp {

enum class TypeErrorKind : std::uint8_t {
  kAnnotationMismatch,
  kInterfaceExceeded,
  kUnbalancedRestriction,
  kLinearityViolation,
  kEndpointTypeMismatch,
  kSortMismatch,
  kQualifierMismatch,
  kArmMismatch,
  kNonEmptyUpdate,
  kUnknownService,
  kUnknownLocation,
  kUnknownProcessVar,
  kUnboundVariable,
  kUnboundEndpoint,
};

std::string to_string(TypeErrorKind k);

struct TypeError {
  TypeErrorKind kind;
  std::string rule;     // e.g. "t:Loc"
  std::string message;
  // Node the error was detected at; the surface module maps it to a span.
  const ProcNode* node = nullptr;
};

std::string to_string(const TypeError& e);

// Γ;Θ ⊢ P ▷ Δ; Ι
struct Judgment {
  Typing typing;
  Interface interface;
};

struct TypecheckOptions {
  // Accept free session names in endpoint position and report them in Δ.
  // Used to check process templates such as P(xa, xb, u, v) on their own.
  bool allow_free_endpoints = false;
  // Give free value variables an inferred sort instead of failing.
  bool allow_free_values = false;
};

// Synthesizes the typing and interface of p. Channel types of restricted
// sessions are inferred; anything left undetermined defaults to `end` (for
// session types), `int` (for sorts), and the labels actually used (for
// branch/select).
ErrorOr<Judgment, TypeError> typecheck(const FirstOrderEnv& g, const HigherOrderEnv& t,
                                       const Process& p, const TypecheckOptions& opts = {});

}  // namespace asp
