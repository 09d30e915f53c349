// Polynomial consistency check for graphs where each location has a
// single writer thread.
#pragma once

#include "rac/model.hpp"

#include <optional>
#include <vector>

namespace rac {

enum class CoherenceMode { WeakRead, RelaxedRead };

// Whether a read in its location's writer thread may only observe a
// po-earlier write. Holds for every model that forbids porf cycles.
enum class ReadScope { PoEarlierInWriterThread, Unrestricted };

struct Violation {
  EventIndex read;
  EventIndex write;
  EventIndex later_write;
  // Relaxed pattern only: the read completing w' rf r' po r. Empty when
  // w' itself is po-before r.
  std::optional<EventIndex> via_read;
  bool operator==(const Violation &) const = default;
};

struct SolverStep {
  Violation violation;
  EventIndex replacement;
};

struct SolverTrace {
  std::vector<SolverStep> steps;
};

struct SolveOptions {
  // CM only: recompute ob-acyclicity on the final witness.
  bool recheck_ob = false;
};

struct SolveResult {
  Verdict verdict;
  SolverTrace trace;
};

bool is_one_writer(const Graph &g);

// Throws NotOneWriter.
ModificationOrder derive_mo(const Graph &g);

// rf is empty when some read has no admissible write; `unmatched` then
// names the first such read in scan order.
struct InitResult {
  std::optional<ReadsFrom> rf;
  EventIndex unmatched = kNoEvent;
};
InitResult try_initialize_rf(const Graph &g, ReadScope scope = ReadScope::PoEarlierInWriterThread);

// Throws InvalidRf naming the first read without an admissible write.
ReadsFrom initialize_rf(const Graph &g, ReadScope scope = ReadScope::PoEarlierInWriterThread);

std::optional<Violation> next_violation(const Graph &g, const ReadsFrom &rf, CoherenceMode mode);

// Empty when no later matching write exists.
std::optional<EventIndex> next_write(const Graph &g, const ReadsFrom &rf, const Violation &v,
                                     ReadScope scope = ReadScope::PoEarlierInWriterThread);
std::optional<ReadsFrom> update_rf(const Graph &g, const ReadsFrom &rf, const Violation &v,
                                   ReadScope scope = ReadScope::PoEarlierInWriterThread);

SolveResult solve(const Graph &g, MemoryModel m, const SolveOptions &opts = {});

} // namespace rac
