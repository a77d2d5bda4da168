#pragma once

#include <string>
#include <vector>

#include "asp/term.hpp"

namespace asp {

// Canonical representative of the structural congruence class of p:
//   - parallel composition is associative and commutative with unit 0;
//   - restrictions float outwards over parallel, located and other
//     restrictions (never across a prefix); dead ones are dropped;
//   - bound channel ids are renumbered by first occurrence, starting just
//     above the largest free channel id.
// Annotations are never altered.
Process normalize(const Process& p);

// Same as normalize but keeps channel ids (binders are only renamed when two
// of them clash). The reduction engine uses this so that fresh channels keep
// their creation numbers for the whole run.
Process tidy(const Process& p);

// Renames restriction binders apart when two of them share an id, or one
// shares an id with a free channel. Returns p itself when nothing clashes.
Process separate_binders(const Process& p);

bool congruent(const Process& p, const Process& q);

// Splits the outermost restrictions from the body: new(k1)...new(kn) body.
struct Scope {
  std::vector<ChannelId> binders;
  Process body;
};
Scope open_scope(const Process& p);
Process close_scope(const std::vector<ChannelId>& binders, Process body);

// Compact structural serialization; equal keys iff equal terms. Used as a
// state identity by the explorer.
std::string term_key(const Process& p);

}  // namespace asp
