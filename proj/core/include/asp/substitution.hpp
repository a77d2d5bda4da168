#pragma once

#include <set>
#include <vector>

#include "asp/term.hpp"

namespace asp {

// p{k/x}: replaces free occurrences of name x in endpoint position.
Process substitute_endpoint(const Process& p, const Name& x, const Channel& k);

// u{q/X}: replaces every occurrence of process variable X.
Process substitute_process(const Process& u, const ProcessVarName& x, const Process& q);

// p{c~/x~}: replaces free value variables with constants (payloads, guards,
// computed selection labels).
Process substitute_values(const Process& p, const std::vector<Name>& xs,
                          const std::vector<Value>& cs);
Expression substitute_values(const Expression& e, const Name& x, const Value& c);

// Renames every occurrence (free or bound) of channel id `from` to `to`.
Process rename_channel(const Process& p, ChannelId from, ChannelId to);

std::set<Channel> free_channels(const Process& p);
std::set<Name> free_service_names(const Process& p);
// Free names used in endpoint position (not bound by request/accept/catch).
std::set<Name> free_endpoint_names(const Process& p);
// Free value variables referenced by expressions.
std::set<Name> free_value_vars(const Process& p);
// Every process variable occurring in p. Updates do not bind in this count;
// see process_vars_outside_updates for well-formedness.
std::set<ProcessVarName> free_process_vars(const Process& p);
// Process variables that occur outside of any update body.
std::set<ProcessVarName> process_vars_outside_updates(const Process& p);

// All channel ids occurring in p, bound or free.
std::set<ChannelId> channel_ids(const Process& p);
// Largest channel id occurring in p, or nullopt when p mentions none.
std::optional<ChannelId> max_channel_id(const Process& p);

}  // namespace asp
