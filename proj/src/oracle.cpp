#include "rac/oracle.hpp"

#include "rac/axioms.hpp"

#include <algorithm>
#include <limits>

namespace rac {

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0)
    return 0;
  if (a > kSat / b)
    return kSat;
  return a * b;
}

class Budget {
public:
  Budget(std::uint64_t limit, const char *what) : limit_(limit), what_(what) {}
  void tick() {
    if (++used_ > limit_)
      throw Error(Errc::BudgetExceeded, std::string(what_) + " limit " + std::to_string(limit_) + " exceeded");
  }

private:
  std::uint64_t used_ = 0;
  std::uint64_t limit_;
  const char *what_;
};

void check_size(const Graph &g, const OracleLimits &limits) {
  if (g.size() > limits.max_events)
    throw Error(Errc::BudgetExceeded,
                std::to_string(g.size()) + " events exceed the limit of " + std::to_string(limits.max_events));
}

// Matching writes per read, indexed like g.reads(), in scan order.
std::vector<std::vector<EventIndex>> candidates(const Graph &g) {
  std::vector<std::vector<EventIndex>> out;
  for (EventIndex r : g.reads()) {
    std::vector<EventIndex> ws;
    for (EventIndex w : g.writes_to(g.var_of(r)))
      if (g.event(w).val == g.event(r).val)
        ws.push_back(w);
    out.push_back(std::move(ws));
  }
  return out;
}

// Orders over `elems` that respect must_precede, in lexicographic order
// of element positions. Returns true if visit asked to stop.
bool linear_extensions(const std::vector<EventIndex> &elems,
                       const std::function<bool(EventIndex, EventIndex)> &must_precede, Budget &budget,
                       const std::function<bool(const std::vector<EventIndex> &)> &visit) {
  const std::size_t k = elems.size();
  std::vector<std::vector<std::size_t>> preds(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j && must_precede(elems[j], elems[i]))
        preds[i].push_back(j);
  std::vector<char> placed(k, 0);
  std::vector<EventIndex> order;
  std::function<bool()> rec = [&]() -> bool {
    if (order.size() == k) {
      budget.tick();
      return visit(order);
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (placed[i])
        continue;
      bool ready = std::all_of(preds[i].begin(), preds[i].end(), [&](std::size_t j) { return placed[j]; });
      if (!ready)
        continue;
      placed[i] = 1;
      order.push_back(elems[i]);
      bool stop = rec();
      order.pop_back();
      placed[i] = 0;
      if (stop)
        return true;
    }
    return false;
  };
  return rec();
}

ModificationOrder scan_mo(const Graph &g) {
  ModificationOrder mo;
  for (std::uint32_t v = 0; v < g.var_count(); ++v)
    mo.order.push_back(g.writes_to(v));
  return mo;
}

// Read-coherence on one location for a candidate order, given each
// read's strict hb-past.
bool read_coherent(const Graph &g, const ReadsFrom &rf, const std::vector<EventIndex> &order,
                   const std::vector<EventIndex> &reads_x, const std::vector<std::vector<char>> &past) {
  std::vector<std::uint32_t> rank(g.size(), 0);
  for (std::uint32_t i = 0; i < order.size(); ++i)
    rank[order[i]] = i;
  for (std::size_t i = 0; i < reads_x.size(); ++i) {
    std::uint32_t r1 = rank[rf[reads_x[i]]];
    for (EventIndex w : order)
      if (past[i][w] && rank[w] > r1)
        return false;
  }
  return true;
}

bool relaxed_coherent(const Graph &g, const ReadsFrom &rf, const std::vector<EventIndex> &order,
                      const std::vector<EventIndex> &reads_x) {
  std::vector<std::uint32_t> rank(g.size(), 0);
  for (std::uint32_t i = 0; i < order.size(); ++i)
    rank[order[i]] = i;
  std::uint32_t x = order.empty() ? 0 : g.var_of(order.front());
  for (EventIndex r : reads_x) {
    std::uint32_t r1 = rank[rf[r]];
    for (EventIndex e = g.thread_begin(g.thread_of(r)); e < r; ++e) {
      if (g.var_of(e) != x)
        continue;
      EventIndex w2 = g.event(e).is_write() ? e : rf[e];
      if (rank[w2] > r1)
        return false;
    }
  }
  return true;
}

std::vector<EventIndex> reads_on(const Graph &g, std::uint32_t x) {
  std::vector<EventIndex> out;
  for (EventIndex r : g.reads())
    if (g.var_of(r) == x)
      out.push_back(r);
  return out;
}

// True iff po ∪ rf ∪ the given chains is acyclic.
bool acyclic_with(const Graph &g, const ReadsFrom &rf, const std::vector<const std::vector<EventIndex> *> &chains) {
  const std::size_t n = g.size();
  std::vector<std::vector<EventIndex>> succ(n);
  std::vector<std::uint32_t> indeg(n, 0);
  auto edge = [&](EventIndex a, EventIndex b) {
    succ[a].push_back(b);
    ++indeg[b];
  };
  for (EventIndex e = 0; e < n; ++e) {
    if (g.pos(e) > 0)
      edge(e - 1, e);
    if (g.event(e).is_read() && rf[e] != kNoEvent)
      edge(rf[e], e);
  }
  for (const auto *c : chains)
    for (std::size_t i = 0; i + 1 < c->size(); ++i)
      edge((*c)[i], (*c)[i + 1]);
  std::vector<EventIndex> ready;
  for (EventIndex e = 0; e < n; ++e)
    if (!indeg[e])
      ready.push_back(e);
  std::size_t done = 0;
  while (!ready.empty()) {
    EventIndex e = ready.back();
    ready.pop_back();
    ++done;
    for (EventIndex s : succ[e])
      if (--indeg[s] == 0)
        ready.push_back(s);
  }
  return done == n;
}

// mo search once rf is fixed and (where required) porf-acyclic.
std::optional<ModificationOrder> complete_mo(const Graph &g, const ReadsFrom &rf, MemoryModel m,
                                             const OracleLimits &limits) {
  ModificationOrder mo = scan_mo(g);
  switch (m) {
  case MemoryModel::WRA:
  case MemoryModel::CC:
    if (check_axiom(g, rf, nullptr, Axiom::WeakReadCoherence))
      return std::nullopt;
    return mo;
  case MemoryModel::CM:
    if (check_axiom(g, rf, nullptr, Axiom::WeakReadCoherence) || check_axiom(g, rf, nullptr, Axiom::ObAcyclicity))
      return std::nullopt;
    return mo;
  default:
    break;
  }

  Budget budget(limits.max_mo_permutations, "modification order");
  const bool relaxed = m == MemoryModel::Relaxed || m == MemoryModel::RelaxedAcyclic;
  const bool strong = m == MemoryModel::SRA || m == MemoryModel::CCv;
  HbIndex hb(g, rf);

  std::vector<std::vector<std::vector<EventIndex>>> options(g.var_count());
  for (std::uint32_t x = 0; x < g.var_count(); ++x) {
    const auto &ws = g.writes_to(x);
    auto reads_x = reads_on(g, x);
    if (relaxed) {
      auto before = [&](EventIndex a, EventIndex b) { return g.po(a, b); };
      bool found = linear_extensions(ws, before, budget, [&](const std::vector<EventIndex> &order) {
        if (!relaxed_coherent(g, rf, order, reads_x))
          return false;
        mo.order[x] = order;
        return true;
      });
      if (!found)
        return std::nullopt;
      continue;
    }
    std::vector<std::vector<char>> fwd;
    for (EventIndex w : ws)
      fwd.push_back(hb.forward(w));
    std::vector<std::vector<char>> past;
    for (EventIndex r : reads_x)
      past.push_back(hb.backward(r));
    auto before = [&](EventIndex a, EventIndex b) {
      auto i = static_cast<std::size_t>(std::find(ws.begin(), ws.end(), a) - ws.begin());
      return fwd[i][b] != 0;
    };
    bool found = linear_extensions(ws, before, budget, [&](const std::vector<EventIndex> &order) {
      if (!read_coherent(g, rf, order, reads_x, past))
        return false;
      if (!strong) {
        mo.order[x] = order;
        return true;
      }
      options[x].push_back(order);
      return false;
    });
    if (!strong && !found)
      return std::nullopt;
    if (strong && options[x].empty())
      return std::nullopt;
  }
  if (!strong)
    return mo;

  // Pick one option per location so that hb ∪ mo stays acyclic.
  std::vector<const std::vector<EventIndex> *> chosen;
  std::function<bool(std::uint32_t)> rec = [&](std::uint32_t x) -> bool {
    if (x == g.var_count())
      return true;
    for (const auto &opt : options[x]) {
      budget.tick();
      chosen.push_back(&opt);
      if (acyclic_with(g, rf, chosen) && rec(x + 1)) {
        mo.order[x] = opt;
        return true;
      }
      chosen.pop_back();
    }
    return false;
  };
  if (!rec(0))
    return std::nullopt;
  return mo;
}

// Depth-first search over rf candidates with optional porf pruning.
class RfSearch {
public:
  RfSearch(const Graph &g, bool prune, const OracleLimits &limits)
      : g_(g), cand_(candidates(g)), prune_(prune), rf_(g.size()), readers_(g.size()),
        budget_(limits.max_rf_candidates, "reads-from candidate") {}

  // leaf returns true to stop. Returns true if stopped.
  bool run(const std::function<bool(const ReadsFrom &)> &leaf) { return step(0, leaf); }

private:
  bool step(std::size_t i, const std::function<bool(const ReadsFrom &)> &leaf) {
    if (i == g_.reads().size()) {
      budget_.tick();
      return leaf(rf_);
    }
    EventIndex r = g_.reads()[i];
    for (EventIndex w : cand_[i]) {
      if (prune_ && closes_cycle(w, r)) {
        budget_.tick();
        continue;
      }
      rf_.set(r, w);
      readers_[w].push_back(r);
      bool stop = step(i + 1, leaf);
      readers_[w].pop_back();
      rf_.set(r, kNoEvent);
      if (stop)
        return true;
    }
    return false;
  }

  // Adding w -> r closes a cycle iff r already reaches w.
  bool closes_cycle(EventIndex w, EventIndex r) {
    std::vector<char> seen(g_.size(), 0);
    std::vector<EventIndex> stack{r};
    seen[r] = 1;
    while (!stack.empty()) {
      EventIndex e = stack.back();
      stack.pop_back();
      if (e == w)
        return true;
      std::uint32_t t = g_.thread_of(e);
      if (e + 1 < g_.thread_begin(t) + g_.thread_size(t) && !seen[e + 1]) {
        seen[e + 1] = 1;
        stack.push_back(e + 1);
      }
      for (EventIndex s : readers_[e])
        if (!seen[s]) {
          seen[s] = 1;
          stack.push_back(s);
        }
    }
    return false;
  }

  const Graph &g_;
  std::vector<std::vector<EventIndex>> cand_;
  bool prune_;
  ReadsFrom rf_;
  std::vector<std::vector<EventIndex>> readers_;
  Budget budget_;
};

std::optional<EventIndex> first_unmatched(const Graph &g) {
  auto cand = candidates(g);
  for (std::size_t i = 0; i < cand.size(); ++i)
    if (cand[i].empty())
      return g.reads()[i];
  return std::nullopt;
}

// Relaxed has no cross-location axiom, so each location is searched on
// its own and the witnesses are merged.
Verdict relaxed_decomposed(const Graph &g, const OracleLimits &limits) {
  auto cand = candidates(g);
  ReadsFrom rf(g.size());
  ModificationOrder mo = scan_mo(g);
  for (std::uint32_t x = 0; x < g.var_count(); ++x) {
    auto reads_x = reads_on(g, x);
    std::vector<std::size_t> slot;
    for (EventIndex r : reads_x)
      slot.push_back(static_cast<std::size_t>(std::find(g.reads().begin(), g.reads().end(), r) - g.reads().begin()));
    Budget rf_budget(limits.max_rf_candidates, "reads-from candidate");
    bool found = false;
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
      if (i == reads_x.size()) {
        rf_budget.tick();
        Budget mo_budget(limits.max_mo_permutations, "modification order");
        auto before = [&](EventIndex a, EventIndex b) { return g.po(a, b); };
        return linear_extensions(g.writes_to(x), before, mo_budget, [&](const std::vector<EventIndex> &order) {
          if (!relaxed_coherent(g, rf, order, reads_x))
            return false;
          mo.order[x] = order;
          found = true;
          return true;
        });
      }
      for (EventIndex w : cand[slot[i]]) {
        rf.set(reads_x[i], w);
        if (rec(i + 1))
          return true;
      }
      return false;
    };
    rec(0);
    if (!found)
      return Inconsistent{Failure::Exhausted, std::nullopt, {}, std::nullopt};
  }
  return Consistent{rf, mo};
}

} // namespace

std::uint64_t count_rf_candidates(const Graph &g) {
  std::uint64_t total = 1;
  for (const auto &c : candidates(g))
    total = sat_mul(total, c.size());
  return total;
}

std::uint64_t count_mo_candidates(const Graph &g) {
  std::uint64_t total = 1;
  for (std::uint32_t v = 0; v < g.var_count(); ++v)
    for (std::uint64_t i = 2; i <= g.writes_to(v).size(); ++i)
      total = sat_mul(total, i);
  return total;
}

void enumerate_rfs(const Graph &g, const OracleLimits &limits, const std::function<bool(const ReadsFrom &)> &visit) {
  check_size(g, limits);
  std::uint64_t total = count_rf_candidates(g);
  if (total > limits.max_rf_candidates)
    throw Error(Errc::BudgetExceeded, "reads-from candidates exceed " + std::to_string(limits.max_rf_candidates));
  if (total == 0)
    return;
  auto cand = candidates(g);
  const auto &reads = g.reads();
  std::vector<std::size_t> digit(reads.size(), 0);
  ReadsFrom rf(g.size());
  for (std::size_t i = 0; i < reads.size(); ++i)
    rf.set(reads[i], cand[i][0]);
  for (;;) {
    if (!visit(rf))
      return;
    std::size_t i = reads.size();
    while (i > 0) {
      --i;
      if (++digit[i] < cand[i].size()) {
        rf.set(reads[i], cand[i][digit[i]]);
        break;
      }
      digit[i] = 0;
      rf.set(reads[i], cand[i][0]);
      if (i == 0)
        return;
    }
    if (reads.empty())
      return;
  }
}

std::vector<ReadsFrom> enumerate_rfs(const Graph &g, const OracleLimits &limits) {
  std::vector<ReadsFrom> out;
  enumerate_rfs(g, limits, [&](const ReadsFrom &rf) {
    out.push_back(rf);
    return true;
  });
  return out;
}

void enumerate_mos(const Graph &g, const OracleLimits &limits,
                   const std::function<bool(const ModificationOrder &)> &visit) {
  std::uint64_t total = count_mo_candidates(g);
  if (total > limits.max_mo_permutations)
    throw Error(Errc::BudgetExceeded, "modification orders exceed " + std::to_string(limits.max_mo_permutations));
  ModificationOrder mo = scan_mo(g);
  // perm[v] holds scan positions; next_permutation walks them in order.
  std::vector<std::vector<std::size_t>> perm(g.var_count());
  for (std::uint32_t v = 0; v < g.var_count(); ++v)
    for (std::size_t i = 0; i < g.writes_to(v).size(); ++i)
      perm[v].push_back(i);
  for (;;) {
    for (std::uint32_t v = 0; v < g.var_count(); ++v)
      for (std::size_t i = 0; i < perm[v].size(); ++i)
        mo.order[v][i] = g.writes_to(v)[perm[v][i]];
    if (!visit(mo))
      return;
    std::size_t v = g.var_count();
    for (;;) {
      if (v == 0)
        return;
      --v;
      if (std::next_permutation(perm[v].begin(), perm[v].end()))
        break;
    }
  }
}

std::vector<ModificationOrder> enumerate_mos(const Graph &g, const OracleLimits &limits) {
  std::vector<ModificationOrder> out;
  enumerate_mos(g, limits, [&](const ModificationOrder &mo) {
    out.push_back(mo);
    return true;
  });
  return out;
}

std::optional<ModificationOrder> find_mo(const Graph &g, const ReadsFrom &rf, MemoryModel m,
                                         const OracleLimits &limits) {
  validate_rf(g, rf);
  if (model_requires_porf(m) && porf_cycle(g, rf))
    return std::nullopt;
  return complete_mo(g, rf, m, limits);
}

Verdict oracle_consistent(const Graph &g, MemoryModel m, const OracleLimits &limits) {
  check_size(g, limits);
  if (auto r = first_unmatched(g))
    return Inconsistent{Failure::NoMatchingWrite, std::nullopt, {}, *r};
  if (m == MemoryModel::Relaxed)
    return relaxed_decomposed(g, limits);

  std::optional<Verdict> witness;
  RfSearch search(g, model_requires_porf(m), limits);
  search.run([&](const ReadsFrom &rf) {
    auto mo = complete_mo(g, rf, m, limits);
    if (!mo)
      return false;
    std::optional<ModificationOrder> keep;
    if (model_uses_mo(m))
      keep = std::move(*mo);
    witness = Consistent{rf, std::move(keep)};
    return true;
  });
  if (witness)
    return *witness;
  return Inconsistent{Failure::Exhausted, std::nullopt, {}, std::nullopt};
}

std::vector<ReadsFrom> all_consistent_rfs(const Graph &g, MemoryModel m, const OracleLimits &limits) {
  check_size(g, limits);
  std::vector<ReadsFrom> out;
  if (first_unmatched(g))
    return out;
  RfSearch search(g, model_requires_porf(m), limits);
  search.run([&](const ReadsFrom &rf) {
    if (complete_mo(g, rf, m, limits))
      out.push_back(rf);
    return false;
  });
  return out;
}

} // namespace rac
