#pragma once

#include <optional>
#include <string>

#include "netident/ident.hpp"
#include "netident/model.hpp"

namespace netident {

/// Graphviz rendering of the induced graph: internal signals as circles,
/// external signals as boxes, known modules as doubled edges. With a query the
/// target module edges are bold; with a verdict its disconnecting set is filled
/// red and its witness paths drawn blue.
std::string export_dot(const NetworkModelSet& model, const std::optional<Query>& query = std::nullopt,
                       const IdentVerdict* verdict = nullptr);

}  // namespace netident
