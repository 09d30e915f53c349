#include "rac/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <vector>

namespace rac {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

std::vector<Line> tokenize(std::string_view text, char comment) {
  std::vector<Line> out;
  std::size_t number = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++number;
    if (auto c = line.find(comment); c != std::string_view::npos)
      line = line.substr(0, c);
    Line l{number, {}};
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
        ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
        ++j;
      if (j > i)
        l.tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (!l.tokens.empty())
      out.push_back(std::move(l));
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string &msg) { throw Error(Errc::ParseError, msg, line); }

template <typename T> std::optional<T> parse_int(std::string_view s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    return std::nullopt;
  return v;
}

std::int64_t int_or_fail(std::string_view s, std::size_t line) {
  auto v = parse_int<std::int64_t>(s);
  if (!v)
    fail(line, "malformed integer '" + std::string(s) + "'");
  return *v;
}

void ident_or_fail(std::string_view s, std::size_t line, const char *what) {
  if (!valid_identifier(std::string(s)))
    fail(line, std::string("invalid ") + what + " '" + std::string(s) + "'");
}

EventIndex event_or_fail(const Graph &g, std::string_view tok, std::size_t line) {
  auto id = parse_event_id(tok);
  if (!id)
    fail(line, "malformed event id '" + std::string(tok) + "'");
  auto e = g.find(*id);
  if (!e)
    fail(line, "unknown event " + id->str());
  return *e;
}

} // namespace

std::optional<EventId> parse_event_id(std::string_view s) {
  auto colon = s.rfind(':');
  if (colon == std::string_view::npos || colon == 0)
    return std::nullopt;
  std::string tid(s.substr(0, colon));
  if (!valid_identifier(tid))
    return std::nullopt;
  auto idx = parse_int<std::size_t>(s.substr(colon + 1));
  if (!idx)
    return std::nullopt;
  return EventId{tid, *idx};
}

TraceDocument parse_trace(std::string_view text) {
  std::vector<ThreadSpec> threads;
  std::map<std::string, std::size_t> thread_line;
  std::vector<const Line *> rf_lines, mo_lines;
  auto lines = tokenize(text, '#');
  for (const Line &l : lines) {
    const auto &t = l.tokens;
    const std::string_view kw = t[0];
    const bool annotations_started = !rf_lines.empty() || !mo_lines.empty();
    if (kw == "thread") {
      if (t.size() != 2)
        fail(l.number, "expected 'thread <id>'");
      if (annotations_started)
        fail(l.number, "thread block after rf/mo lines");
      ident_or_fail(t[1], l.number, "thread id");
      std::string id(t[1]);
      if (!thread_line.emplace(id, l.number).second)
        fail(l.number, "duplicate thread id '" + id + "'");
      threads.push_back({id, {}});
    } else if (kw == "w" || kw == "r") {
      if (t.size() != 3)
        fail(l.number, "expected '" + std::string(kw) + " <var> <int>'");
      if (threads.empty())
        fail(l.number, "event outside a thread block");
      if (annotations_started)
        fail(l.number, "event after rf/mo lines");
      ident_or_fail(t[1], l.number, "location");
      std::int64_t v = int_or_fail(t[2], l.number);
      threads.back().events.push_back({kw == "w" ? Op::Write : Op::Read, std::string(t[1]), v});
    } else if (kw == "rf") {
      if (t.size() != 3)
        fail(l.number, "expected 'rf <tid>:<idx> <tid>:<idx>'");
      rf_lines.push_back(&l);
    } else if (kw == "mo") {
      if (t.size() < 3)
        fail(l.number, "expected 'mo <var> <tid>:<idx> ...'");
      mo_lines.push_back(&l);
    } else {
      fail(l.number, "unknown directive '" + std::string(kw) + "'");
    }
  }

  TraceDocument doc{build_graph(threads), std::nullopt, std::nullopt};
  const Graph &g = doc.graph;

  if (!rf_lines.empty()) {
    ReadsFrom rf(g.size());
    for (const Line *l : rf_lines) {
      EventIndex w = event_or_fail(g, l->tokens[1], l->number);
      EventIndex r = event_or_fail(g, l->tokens[2], l->number);
      if (!g.event(w).is_write())
        fail(l->number, "rf source " + g.event(w).id.str() + " is not a write");
      if (!g.event(r).is_read())
        fail(l->number, "rf target " + g.event(r).id.str() + " is not a read");
      if (g.event(w).var != g.event(r).var)
        fail(l->number, "rf pairs different locations");
      if (g.event(w).val != g.event(r).val)
        fail(l->number, "rf pairs different values");
      if (rf[r] != kNoEvent)
        fail(l->number, "second rf line for " + g.event(r).id.str());
      rf.set(r, w);
    }
    for (EventIndex r : g.reads())
      if (rf[r] == kNoEvent)
        fail(rf_lines.front()->number, "rf does not cover read " + g.event(r).id.str());
    doc.rf = std::move(rf);
  }

  if (!mo_lines.empty()) {
    ModificationOrder mo;
    mo.order.resize(g.var_count());
    std::vector<char> listed(g.var_count(), 0);
    for (const Line *l : mo_lines) {
      std::string var(l->tokens[1]);
      auto x = g.find_var(var);
      if (!x || g.writes_to(*x).empty())
        fail(l->number, "no writes to '" + var + "'");
      if (listed[*x])
        fail(l->number, "second mo line for '" + var + "'");
      listed[*x] = 1;
      std::vector<char> seen(g.size(), 0);
      for (std::size_t i = 2; i < l->tokens.size(); ++i) {
        EventIndex w = event_or_fail(g, l->tokens[i], l->number);
        if (!g.event(w).is_write() || g.var_of(w) != *x)
          fail(l->number, g.event(w).id.str() + " is not a write to '" + var + "'");
        if (seen[w])
          fail(l->number, "mo lists " + g.event(w).id.str() + " twice");
        seen[w] = 1;
        mo.order[*x].push_back(w);
      }
      if (mo.order[*x].size() != g.writes_to(*x).size())
        fail(l->number, "mo for '" + var + "' omits a write");
    }
    for (std::uint32_t x = 0; x < g.var_count(); ++x)
      if (!listed[x] && !g.writes_to(x).empty())
        fail(mo_lines.front()->number, "no mo line for '" + g.var_name(x) + "'");
    doc.mo = std::move(mo);
  }
  return doc;
}

std::string serialize_trace(const TraceDocument &d) {
  const Graph &g = d.graph;
  std::ostringstream out;
  for (std::uint32_t t = 0; t < g.thread_count(); ++t) {
    out << "thread " << g.thread_id(t) << '\n';
    for (std::size_t i = 0; i < g.thread_size(t); ++i) {
      const Event &e = g.event(g.at(t, i));
      out << (e.is_write() ? "w " : "r ") << e.var << ' ' << e.val << '\n';
    }
  }
  if (d.rf)
    for (EventIndex r : g.reads())
      out << "rf " << g.event((*d.rf)[r]).id.str() << ' ' << g.event(r).id.str() << '\n';
  if (d.mo) {
    for (std::uint32_t x = 0; x < g.var_count(); ++x) {
      if (d.mo->order[x].empty())
        continue;
      out << "mo " << g.var_name(x);
      for (EventIndex w : d.mo->order[x])
        out << ' ' << g.event(w).id.str();
      out << '\n';
    }
  }
  return out.str();
}

bool same_document(const TraceDocument &a, const TraceDocument &b) {
  return thread_specs(a.graph) == thread_specs(b.graph) && a.rf == b.rf && a.mo == b.mo;
}

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula phi;
  bool header = false;
  std::size_t declared = 0;
  std::size_t header_line = 0;
  std::vector<std::int64_t> pending;
  std::size_t pending_line = 0;
  for (const Line &l : tokenize(text, '\0')) {
    const auto &t = l.tokens;
    if (t[0] == "c" || t[0].front() == 'c')
      continue;
    if (t[0] == "%")
      break;
    if (t[0] == "p") {
      if (header)
        fail(l.number, "second header");
      if (t.size() != 4 || t[1] != "cnf")
        fail(l.number, "expected 'p cnf <vars> <clauses>'");
      auto k = parse_int<std::uint32_t>(t[2]);
      auto m = parse_int<std::size_t>(t[3]);
      if (!k || !m)
        fail(l.number, "malformed header counts");
      phi.num_vars = *k;
      declared = *m;
      header = true;
      header_line = l.number;
      continue;
    }
    if (!header)
      fail(l.number, "clause before header");
    for (auto tok : t) {
      std::int64_t lit = int_or_fail(tok, l.number);
      if (pending.empty())
        pending_line = l.number;
      if (lit != 0) {
        if (static_cast<std::uint64_t>(lit < 0 ? -lit : lit) > phi.num_vars)
          fail(l.number, "literal " + std::string(tok) + " exceeds declared variables");
        pending.push_back(lit);
        continue;
      }
      if (pending.size() != 3)
        throw Error(Errc::NotThreeCnf, "clause with " + std::to_string(pending.size()) + " literals", pending_line);
      std::array<Literal, 3> c{};
      for (int i = 0; i < 3; ++i)
        c[i] = Literal{static_cast<std::uint32_t>(pending[i] < 0 ? -pending[i] : pending[i]), pending[i] > 0};
      phi.clauses.push_back(c);
      pending.clear();
    }
  }
  if (!header)
    fail(1, "missing 'p cnf' header");
  if (!pending.empty())
    fail(pending_line, "clause not terminated by 0");
  if (phi.clauses.size() != declared)
    fail(header_line, "header declares " + std::to_string(declared) + " clauses, found " +
                          std::to_string(phi.clauses.size()));
  return phi;
}

std::string serialize_dimacs(const CnfFormula &phi) {
  std::ostringstream out;
  out << "p cnf " << phi.num_vars << ' ' << phi.clauses.size() << '\n';
  for (const auto &c : phi.clauses) {
    for (const auto &l : c)
      out << (l.positive ? "" : "-") << l.var << ' ';
    out << "0\n";
  }
  return out.str();
}

UndirectedGraph parse_edgelist(std::string_view text) {
  auto lines = tokenize(text, '#');
  if (lines.empty())
    fail(1, "missing vertex count");
  if (lines[0].tokens.size() != 1)
    fail(lines[0].number, "expected '<num_vertices>'");
  auto n = parse_int<std::uint32_t>(lines[0].tokens[0]);
  if (!n)
    fail(lines[0].number, "malformed vertex count");
  UndirectedGraph G(*n);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line &l = lines[i];
    if (l.tokens.size() != 2)
      fail(l.number, "expected 'u v'");
    auto u = parse_int<std::uint32_t>(l.tokens[0]);
    auto v = parse_int<std::uint32_t>(l.tokens[1]);
    if (!u || !v)
      fail(l.number, "malformed vertex");
    if (*u == *v)
      throw Error(Errc::SelfLoop, "vertex " + std::to_string(*u), l.number);
    if (*u == 0 || *v == 0 || *u > *n || *v > *n)
      fail(l.number, "vertex out of range");
    G.add_edge(*u, *v);
  }
  return G;
}

} // namespace rac
