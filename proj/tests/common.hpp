#pragma once

#include "rac/axioms.hpp"
#include "rac/model.hpp"
#include "rac/trace_io.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace testing {

inline std::string fixture_text(const std::string &name) {
  std::ifstream f(std::string(RAC_FIXTURES) + "/" + name, std::ios::binary);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

inline rac::TraceDocument fixture(const std::string &name) { return rac::parse_trace(fixture_text(name)); }

inline rac::EventIndex ev(const rac::Graph &g, const std::string &id) {
  return g.index_of(*rac::parse_event_id(id));
}

// rf from "writer reader" id pairs.
inline rac::ReadsFrom make_rf(const rac::Graph &g, std::initializer_list<std::pair<const char *, const char *>> edges) {
  rac::ReadsFrom rf(g.size());
  for (auto [w, r] : edges)
    rf.set(ev(g, r), ev(g, w));
  return rf;
}

inline std::string cert(const rac::Graph &g, const std::optional<rac::Certificate> &c) {
  return c ? rac::format_certificate(g, *c) : std::string("none");
}

} // namespace testing
