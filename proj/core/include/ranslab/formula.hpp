#pragma once

#include <map>
#include <string>
#include <string_view>

#include "ranslab/expr.hpp"

namespace ranslab {

/// Named expressions a formula may refer to.
using Namespace = std::map<std::string, Expr>;

/// Entry `name` of `ns`; NamespaceError when unbound.
const Expr& lookup(const Namespace& ns, const std::string& name);

/// Parse a formula string (grammar in docs/formula_grammar.md) against `ns`.
Expr parse_formula(std::string_view text, const Namespace& ns);

}  // namespace ranslab
