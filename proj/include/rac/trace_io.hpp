// Text formats: execution traces, DIMACS CNF, edge lists.
#pragma once

#include "rac/model.hpp"
#include "rac/reductions.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace rac {

struct TraceDocument {
  Graph graph;
  std::optional<ReadsFrom> rf;
  std::optional<ModificationOrder> mo;
};

bool same_document(const TraceDocument &a, const TraceDocument &b);

// Throws Error(ParseError, msg, line).
TraceDocument parse_trace(std::string_view text);
std::string serialize_trace(const TraceDocument &d);

CnfFormula parse_dimacs(std::string_view text);
std::string serialize_dimacs(const CnfFormula &phi);

UndirectedGraph parse_edgelist(std::string_view text);

// "t1:3" -> EventId. Empty on malformed input.
std::optional<EventId> parse_event_id(std::string_view s);

} // namespace rac
