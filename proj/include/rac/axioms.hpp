// Derived relations (hb, ob) and axiom checks.
#pragma once

#include "rac/model.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace rac {

// Adjacency for po ∪ rf over one (graph, rf) pair. Unassigned reads
// contribute no rf edge, so partial relations are accepted.
class HbIndex {
public:
  HbIndex(const Graph &g, const ReadsFrom &rf);

  // Strict reachability: out[e] is set iff (from, e) ∈ (po ∪ rf)+.
  std::vector<char> forward(EventIndex from) const;
  // out[e] is set iff (e, to) ∈ (po ∪ rf)+.
  std::vector<char> backward(EventIndex to) const;
  bool reaches(EventIndex from, EventIndex to) const;
  // Labeled po/rf steps from `from` up to (excluding) `to`, shortest
  // path with po runs merged. Empty when unreachable.
  std::vector<CertStep> path(EventIndex from, EventIndex to) const;

  const std::vector<EventIndex> &readers(EventIndex w) const { return readers_[w]; }

private:
  const Graph &g_;
  const ReadsFrom &rf_;
  std::vector<std::vector<EventIndex>> readers_;
};

bool hb_reaches(const Graph &g, const ReadsFrom &rf, const EventId &from, const EventId &to);

// mo may be null only for axioms that ignore it; otherwise MissingMo.
std::optional<Certificate> check_axiom(const Graph &g, const ReadsFrom &rf, const ModificationOrder *mo,
                                       Axiom ax);

// Same check restricted to patterns on one location. Valid for the
// per-location axioms: WriteCoherence, ReadCoherence, WeakReadCoherence,
// RelaxedWriteCoherence, RelaxedReadCoherence.
std::optional<Certificate> check_axiom_on_var(const Graph &g, const ReadsFrom &rf, const ModificationOrder *mo,
                                              Axiom ax, std::uint32_t var);

// Any cycle in po ∪ rf, ignoring unassigned reads.
std::optional<Certificate> porf_cycle(const Graph &g, const ReadsFrom &rf);

class ObRelation {
public:
  explicit ObRelation(std::size_t n = 0);

  bool contains(EventIndex a, EventIndex b) const { return (bits_[a][b >> 6] >> (b & 63)) & 1u; }
  // Returns true if the pair is new.
  bool add(EventIndex a, EventIndex b);
  void close();
  std::optional<EventIndex> reflexive_point() const;
  std::vector<std::pair<EventIndex, EventIndex>> pairs() const;
  std::size_t size() const { return n_; }
  bool subset_of(const ObRelation &o) const;

private:
  std::size_t n_;
  std::vector<std::vector<std::uint64_t>> bits_;
};

ObRelation compute_ob(const Graph &g, const ReadsFrom &rf, EventIndex anchor);
// ob_t = ob of the thread's last event. Throws EmptyThread.
ObRelation compute_ob_thread(const Graph &g, const ReadsFrom &rf, std::uint32_t thread);

struct AxiomResult {
  Axiom axiom;
  std::optional<Certificate> certificate;
};

// Every axiom of the model in dispatch order, without stopping early.
std::vector<AxiomResult> check_model(const Graph &g, const ReadsFrom &rf, const ModificationOrder *mo,
                                     MemoryModel m);

// Throws InvalidRf, InvalidMo, MissingMo.
Verdict verify(const Graph &g, const ReadsFrom &rf, const std::optional<ModificationOrder> &mo, MemoryModel m);
Verdict verify(const Graph &g, const ReadsFrom &rf, const ModificationOrder *mo, MemoryModel m);

// True iff every labeled edge of the certificate holds, cyclically.
bool replay_certificate(const Graph &g, const ReadsFrom &rf, const ModificationOrder *mo, const Certificate &c);

} // namespace rac
