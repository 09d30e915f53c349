// Hardness gadgets: 3-CNF and triangle detection encoded as consistency
// instances.
#pragma once

#include "rac/model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace rac {

struct Literal {
  std::uint32_t var; // 1-based
  bool positive;
  bool operator==(const Literal &) const = default;
  auto operator<=>(const Literal &) const = default;
};

struct CnfFormula {
  std::uint32_t num_vars = 0;
  std::vector<std::array<Literal, 3>> clauses;
};

// Throws InvalidParams on a literal outside 1..num_vars.
void check_formula(const CnfFormula &phi);

class UndirectedGraph {
public:
  explicit UndirectedGraph(std::uint32_t num_vertices = 0) : n_(num_vertices) {}

  // 1-based vertices. Throws SelfLoop, InvalidParams.
  void add_edge(std::uint32_t u, std::uint32_t v);
  bool has_edge(std::uint32_t u, std::uint32_t v) const;
  std::uint32_t num_vertices() const { return n_; }
  // Unordered pairs stored as (min, max).
  const std::set<std::pair<std::uint32_t, std::uint32_t>> &edges() const { return edges_; }
  // Ascending.
  std::vector<std::uint32_t> neighbors(std::uint32_t v) const;

private:
  std::uint32_t n_;
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges_;
};

bool has_triangle(const UndirectedGraph &G);

Graph cnf_to_threewriter(const CnfFormula &phi);
Graph cnf_to_twowriter(const CnfFormula &phi);
Graph cnf_to_twowriter_relaxed(const CnfFormula &phi);

struct TriangleInstance {
  Graph graph;
  ReadsFrom rf;
};

TriangleInstance graph_to_onewriter(const UndirectedGraph &G);

// Lexicographically least satisfying assignment (x1 first, false before
// true); entry i is the value of x_{i+1}. Throws TooManyVariables past 24.
std::optional<std::vector<bool>> brute_sat(const CnfFormula &phi);

bool satisfies(const CnfFormula &phi, const std::vector<bool> &assignment);

} // namespace rac
