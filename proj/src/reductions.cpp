#include "rac/reductions.hpp"

#include <string>

namespace rac {

void check_formula(const CnfFormula &phi) {
  for (const auto &c : phi.clauses)
    for (const auto &l : c)
      if (l.var == 0 || l.var > phi.num_vars)
        throw Error(Errc::InvalidParams, "literal on variable " + std::to_string(l.var) + " out of range");
}

void UndirectedGraph::add_edge(std::uint32_t u, std::uint32_t v) {
  if (u == v)
    throw Error(Errc::SelfLoop, "vertex " + std::to_string(u));
  if (u == 0 || v == 0 || u > n_ || v > n_)
    throw Error(Errc::InvalidParams, "edge " + std::to_string(u) + " " + std::to_string(v) + " out of range");
  edges_.insert({std::min(u, v), std::max(u, v)});
}

bool UndirectedGraph::has_edge(std::uint32_t u, std::uint32_t v) const {
  return edges_.count({std::min(u, v), std::max(u, v)}) > 0;
}

std::vector<std::uint32_t> UndirectedGraph::neighbors(std::uint32_t v) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t u = 1; u <= n_; ++u)
    if (u != v && has_edge(u, v))
      out.push_back(u);
  return out;
}

bool has_triangle(const UndirectedGraph &G) {
  for (const auto &[u, v] : G.edges())
    for (std::uint32_t w = v + 1; w <= G.num_vertices(); ++w)
      if (G.has_edge(u, w) && G.has_edge(v, w))
        return true;
  return false;
}

namespace {

std::string idx(const char *base, std::uint32_t i) { return base + std::to_string(i); }

// Clause indices (1-based, ascending) where the literal occupies a slot
// in [lo, hi].
std::vector<std::uint32_t> occurrences(const CnfFormula &phi, Literal lit, int lo, int hi) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t j = 0; j < phi.clauses.size(); ++j) {
    for (int s = lo; s <= hi; ++s) {
      if (phi.clauses[j][s] == lit) {
        out.push_back(j + 1);
        break;
      }
    }
  }
  return out;
}

bool contains(const std::vector<std::uint32_t> &v, std::uint32_t j) {
  for (auto x : v)
    if (x == j)
      return true;
  return false;
}

// Clause writes of a literal thread: c_j for slots 1-2 and d_j for slot
// 3 when split, c_j for every slot otherwise.
void clause_writes(const CnfFormula &phi, Literal lit, bool split, std::vector<EventSpec> &out) {
  if (!split) {
    for (auto j : occurrences(phi, lit, 0, 2))
      out.push_back(W(idx("c_", j), 1));
    return;
  }
  auto cs = occurrences(phi, lit, 0, 1);
  auto ds = occurrences(phi, lit, 2, 2);
  for (std::uint32_t j = 1; j <= phi.clauses.size(); ++j) {
    if (contains(cs, j))
      out.push_back(W(idx("c_", j), 1));
    if (contains(ds, j))
      out.push_back(W(idx("d_", j), 1));
  }
}

Graph release_acquire_gadget(const CnfFormula &phi, bool split) {
  check_formula(phi);
  const std::uint32_t k = phi.num_vars;
  const auto m = static_cast<std::uint32_t>(phi.clauses.size());
  std::vector<ThreadSpec> ts;
  for (std::uint32_t i = 1; i <= k; ++i) {
    std::string s = idx("s_", i), v = idx("v_", i);
    ts.push_back({"T" + std::to_string(i) + "_1", {W(s, 1), W(s, 2), W(v, 1)}});
    ts.push_back({"T" + std::to_string(i) + "_0", {W(s, 1), W(s, 2), W(v, 0)}});
  }
  for (std::uint32_t i = 1; i <= k; ++i) {
    std::string v = idx("v_", i);
    ThreadSpec pos{idx("Tx_", i), {R(v, 1)}};
    clause_writes(phi, Literal{i, true}, split, pos.events);
    ThreadSpec neg{idx("Tnx_", i), {R(v, 0)}};
    clause_writes(phi, Literal{i, false}, split, neg.events);
    ts.push_back(std::move(pos));
    ts.push_back(std::move(neg));
  }
  if (split)
    for (std::uint32_t j = 1; j <= m; ++j)
      ts.push_back({idx("Tj_", j), {R(idx("c_", j), 1), W(idx("d_", j), 1)}});
  ThreadSpec f{"Tf", {}};
  for (std::uint32_t j = 1; j <= m; ++j)
    f.events.push_back(R(idx(split ? "d_" : "c_", j), 1));
  for (std::uint32_t i = 1; i <= k; ++i) {
    f.events.push_back(R(idx("s_", i), 2));
    f.events.push_back(R(idx("s_", i), 1));
  }
  ts.push_back(std::move(f));
  return build_graph(ts);
}

} // namespace

Graph cnf_to_threewriter(const CnfFormula &phi) { return release_acquire_gadget(phi, false); }

Graph cnf_to_twowriter(const CnfFormula &phi) { return release_acquire_gadget(phi, true); }

Graph cnf_to_twowriter_relaxed(const CnfFormula &phi) {
  check_formula(phi);
  const std::uint32_t k = phi.num_vars;
  const auto m = static_cast<std::uint32_t>(phi.clauses.size());
  std::vector<ThreadSpec> ts;
  ThreadSpec init0{"Init_0", {}}, init1{"Init_1", {}};
  for (std::uint32_t i = 1; i <= k; ++i) {
    init0.events.push_back(W(idx("v_", i), 0));
    init1.events.push_back(W(idx("v_", i), 1));
  }
  init1.events.push_back(R("s", 1));
  for (std::uint32_t i = 1; i <= k; ++i)
    init1.events.push_back(W(idx("v_", i), 0));
  for (std::uint32_t i = 1; i <= k; ++i)
    init1.events.push_back(W(idx("v_", i), 1));
  ts.push_back(std::move(init0));
  ts.push_back(std::move(init1));
  for (std::uint32_t i = 1; i <= k; ++i) {
    std::string v = idx("v_", i);
    ThreadSpec pos{idx("Tx_", i), {R(v, 0), R(v, 1)}};
    clause_writes(phi, Literal{i, true}, true, pos.events);
    ThreadSpec neg{idx("Tnx_", i), {R(v, 1), R(v, 0)}};
    clause_writes(phi, Literal{i, false}, true, neg.events);
    ts.push_back(std::move(pos));
    ts.push_back(std::move(neg));
  }
  for (std::uint32_t j = 1; j <= m; ++j)
    ts.push_back({idx("Tj_", j), {R(idx("c_", j), 1), W(idx("d_", j), 1)}});
  ThreadSpec f{"Tf", {}};
  for (std::uint32_t j = 1; j <= m; ++j)
    f.events.push_back(R(idx("d_", j), 1));
  f.events.push_back(W("s", 1));
  ts.push_back(std::move(f));
  return build_graph(ts);
}

TriangleInstance graph_to_onewriter(const UndirectedGraph &G) {
  auto name = [](const char *base, std::uint32_t v) { return std::string(base) + "_" + std::to_string(v); };
  auto pair_name = [](const char *base, std::uint32_t u, std::uint32_t v) {
    return std::string(base) + "_" + std::to_string(u) + "_" + std::to_string(v);
  };
  std::vector<ThreadSpec> ts;
  for (std::uint32_t v = 1; v <= G.num_vertices(); ++v) {
    auto nb = G.neighbors(v);
    ThreadSpec ta{name("ta", v), {W(name("a", v), 0), W(name("a", v), 1)}};
    ThreadSpec tb{name("tb", v), {}};
    ThreadSpec tc{name("tc", v), {}};
    ThreadSpec td{name("td", v), {}};
    for (auto u : nb)
      ta.events.push_back(W(pair_name("a", v, u), 0));
    for (auto u : nb)
      tb.events.push_back(R(pair_name("a", u, v), 0));
    tb.events.push_back(W(name("b", v), 0));
    for (auto u : nb)
      tb.events.push_back(W(pair_name("b", v, u), 0));
    for (auto u : nb)
      tc.events.push_back(R(pair_name("b", u, v), 0));
    tc.events.push_back(W(name("c", v), 0));
    for (auto u : nb)
      tc.events.push_back(W(pair_name("c", v, u), 0));
    for (auto u : nb)
      td.events.push_back(R(pair_name("c", u, v), 0));
    td.events.push_back(R(name("a", v), 0));
    ts.push_back(std::move(ta));
    ts.push_back(std::move(tb));
    ts.push_back(std::move(tc));
    ts.push_back(std::move(td));
  }
  TriangleInstance out{build_graph(ts), {}};
  const Graph &g = out.graph;
  out.rf = ReadsFrom(g.size());
  for (EventIndex r : g.reads()) {
    for (EventIndex w : g.writes_to(g.var_of(r)))
      if (g.event(w).val == g.event(r).val)
        out.rf.set(r, w);
  }
  return out;
}

bool satisfies(const CnfFormula &phi, const std::vector<bool> &a) {
  for (const auto &c : phi.clauses) {
    bool sat = false;
    for (const auto &l : c)
      if (a[l.var - 1] == l.positive)
        sat = true;
    if (!sat)
      return false;
  }
  return true;
}

std::optional<std::vector<bool>> brute_sat(const CnfFormula &phi) {
  if (phi.num_vars > 24)
    throw Error(Errc::TooManyVariables, std::to_string(phi.num_vars) + " variables");
  check_formula(phi);
  const std::uint32_t k = phi.num_vars;
  std::vector<bool> a(k);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    // x1 is the most significant bit.
    for (std::uint32_t i = 0; i < k; ++i)
      a[i] = (mask >> (k - 1 - i)) & 1u;
    if (satisfies(phi, a))
      return a;
  }
  return std::nullopt;
}

} // namespace rac
