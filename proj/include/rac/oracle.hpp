// Exhaustive consistency search for arbitrary graphs.
#pragma once

#include "rac/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace rac {

struct OracleLimits {
  std::size_t max_events = 128;
  std::uint64_t max_rf_candidates = 1'000'000;
  // Per reads-from candidate.
  std::uint64_t max_mo_permutations = 10'000;
};

// Product of per-read match counts, saturating at UINT64_MAX.
std::uint64_t count_rf_candidates(const Graph &g);
std::uint64_t count_mo_candidates(const Graph &g);

// Visits every value-matching rf in lexicographic order (reads in scan
// order, first read most significant; writes in scan order). Stops early
// when visit returns false. Throws BudgetExceeded up front.
void enumerate_rfs(const Graph &g, const OracleLimits &limits, const std::function<bool(const ReadsFrom &)> &visit);
std::vector<ReadsFrom> enumerate_rfs(const Graph &g, const OracleLimits &limits = {});

// Every per-location permutation product, locations in name order.
void enumerate_mos(const Graph &g, const OracleLimits &limits,
                   const std::function<bool(const ModificationOrder &)> &visit);
std::vector<ModificationOrder> enumerate_mos(const Graph &g, const OracleLimits &limits = {});

// Searches for mo with verify(g, rf, mo, m) consistent. Models that
// ignore mo get the scan-order mo when rf alone passes. Throws
// BudgetExceeded and InvalidRf.
std::optional<ModificationOrder> find_mo(const Graph &g, const ReadsFrom &rf, MemoryModel m,
                                         const OracleLimits &limits = {});

Verdict oracle_consistent(const Graph &g, MemoryModel m, const OracleLimits &limits = {});

std::vector<ReadsFrom> all_consistent_rfs(const Graph &g, MemoryModel m, const OracleLimits &limits = {});

} // namespace rac
