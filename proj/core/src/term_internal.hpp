#pragma once

#include <functional>
#include <vector>

#include "asp/term.hpp"

namespace asp::detail {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Rebuilds p with every direct child process replaced by f(child).
Process map_children(const Process& p, const std::function<Process(const Process&)>& f);

// Expressions held directly by the node (not by its children).
void for_each_expression(const Process& p, const std::function<void(const Expression&)>& f);

std::vector<Name> bound_names(const Process& p);

}  // namespace asp::detail
