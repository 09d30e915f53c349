#include "rac/onewriter.hpp"

#include "rac/axioms.hpp"

#include <algorithm>
#include <map>

namespace rac {

namespace {

constexpr std::uint32_t kNoThread = ~0u;

struct WriterIndex {
  std::vector<std::uint32_t> writer;                             // per var
  std::vector<std::vector<EventIndex>> writes;                   // per var, po order
  std::vector<std::map<std::int64_t, std::vector<EventIndex>>> by_value; // per var

  explicit WriterIndex(const Graph &g)
      : writer(g.var_count(), kNoThread), writes(g.var_count()), by_value(g.var_count()) {
    for (EventIndex e = 0; e < g.size(); ++e) {
      const Event &ev = g.event(e);
      if (!ev.is_write())
        continue;
      std::uint32_t x = g.var_of(e);
      if (writer[x] != kNoThread && writer[x] != g.thread_of(e))
        throw Error(Errc::NotOneWriter, "location " + ev.var + " has several writer threads");
      writer[x] = g.thread_of(e);
      writes[x].push_back(e);
      by_value[x][ev.val].push_back(e);
    }
  }

  const std::vector<EventIndex> *matches(const Graph &g, EventIndex r) const {
    const auto &m = by_value[g.var_of(r)];
    auto it = m.find(g.event(r).val);
    return it == m.end() ? nullptr : &it->second;
  }
};

bool restricted_read(const Graph &g, const WriterIndex &ix, EventIndex r, ReadScope scope) {
  return scope == ReadScope::PoEarlierInWriterThread && g.thread_of(r) == ix.writer[g.var_of(r)];
}

// Smallest matching write w with w >= lo (and w < r when restricted).
std::optional<EventIndex> first_match(const Graph &g, const WriterIndex &ix, EventIndex r, EventIndex lo,
                                      ReadScope scope) {
  const auto *ms = ix.matches(g, r);
  if (!ms)
    return std::nullopt;
  auto it = std::lower_bound(ms->begin(), ms->end(), lo);
  if (it == ms->end())
    return std::nullopt;
  if (restricted_read(g, ix, r, scope) && *it > r)
    return std::nullopt;
  return *it;
}

// Per-thread prefix frontiers of the strict hb-past of every read:
// past[r * T + t] is the largest position in thread t that hb-reaches r,
// or -1. hb-pasts are po-downward closed, so this describes them
// exactly. Cycles in po ∪ rf are collapsed first.
class PastClocks {
public:
  PastClocks(const Graph &g, const ReadsFrom &rf) : g_(g), T_(g.thread_count()) {
    const std::size_t n = g.size();
    comp_.assign(n, kUnset);
    // Tarjan, iterative.
    std::vector<std::uint32_t> index(n, kUnset), low(n, 0);
    std::vector<EventIndex> stack;
    std::vector<char> on_stack(n, 0);
    std::vector<std::vector<EventIndex>> readers(n);
    for (EventIndex r = 0; r < n; ++r)
      if (g.event(r).is_read() && rf[r] != kNoEvent)
        readers[rf[r]].push_back(r);
    auto succ = [&](EventIndex e, std::size_t k) -> EventIndex {
      std::uint32_t t = g.thread_of(e);
      bool has_next = e + 1 < g.thread_begin(t) + g.thread_size(t);
      if (has_next) {
        if (k == 0)
          return e + 1;
        --k;
      }
      return k < readers[e].size() ? readers[e][k] : kNoEvent;
    };
    std::uint32_t counter = 0;
    std::vector<std::vector<EventIndex>> comps; // reverse topological order
    struct Frame {
      EventIndex e;
      std::size_t k;
    };
    for (EventIndex root = 0; root < n; ++root) {
      if (index[root] != kUnset)
        continue;
      std::vector<Frame> dfs{{root, 0}};
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = 1;
      while (!dfs.empty()) {
        Frame &f = dfs.back();
        EventIndex s = succ(f.e, f.k);
        if (s != kNoEvent) {
          ++f.k;
          if (index[s] == kUnset) {
            index[s] = low[s] = counter++;
            stack.push_back(s);
            on_stack[s] = 1;
            dfs.push_back({s, 0});
          } else if (on_stack[s]) {
            low[f.e] = std::min(low[f.e], index[s]);
          }
          continue;
        }
        EventIndex e = f.e;
        dfs.pop_back();
        if (!dfs.empty())
          low[dfs.back().e] = std::min(low[dfs.back().e], low[e]);
        if (low[e] == index[e]) {
          std::vector<EventIndex> c;
          EventIndex x;
          do {
            x = stack.back();
            stack.pop_back();
            on_stack[x] = 0;
            comp_[x] = static_cast<std::uint32_t>(comps.size());
            c.push_back(x);
          } while (x != e);
          comps.push_back(std::move(c));
        }
      }
    }

    cyclic_.assign(comps.size(), 0);
    incl_.assign(n * T_, -1);
    std::vector<std::int32_t> acc(T_);
    for (std::size_t ci = comps.size(); ci-- > 0;) {
      const auto &c = comps[ci];
      std::fill(acc.begin(), acc.end(), -1);
      for (EventIndex m : c) {
        for (EventIndex p : preds(m, rf))
          if (comp_[p] != ci)
            join(acc.data(), &incl_[p * T_]);
      }
      cyclic_[ci] = c.size() > 1;
      for (EventIndex m : c)
        acc[g.thread_of(m)] = std::max<std::int32_t>(acc[g.thread_of(m)], static_cast<std::int32_t>(g.pos(m)));
      for (EventIndex m : c)
        std::copy(acc.begin(), acc.end(), incl_.begin() + static_cast<std::ptrdiff_t>(m * T_));
    }
    rf_ = &rf;
  }

  // Largest position in thread t strictly hb-before e, or -1.
  std::int32_t strict(EventIndex e, std::uint32_t t) const {
    if (cyclic_[comp_[e]])
      return incl_[e * T_ + t];
    std::int32_t best = -1;
    for (EventIndex p : preds(e, *rf_))
      best = std::max(best, incl_[p * T_ + t]);
    return best;
  }

private:
  static constexpr std::uint32_t kUnset = ~0u;

  std::vector<EventIndex> preds(EventIndex e, const ReadsFrom &rf) const {
    std::vector<EventIndex> out;
    if (g_.pos(e) > 0)
      out.push_back(e - 1);
    if (g_.event(e).is_read() && rf[e] != kNoEvent)
      out.push_back(rf[e]);
    return out;
  }

  void join(std::int32_t *dst, const std::int32_t *src) const {
    for (std::size_t t = 0; t < T_; ++t)
      dst[t] = std::max(dst[t], src[t]);
  }

  const Graph &g_;
  std::size_t T_;
  std::vector<std::uint32_t> comp_;
  std::vector<char> cyclic_;
  std::vector<std::int32_t> incl_;
  const ReadsFrom *rf_ = nullptr;
};

std::optional<Violation> weak_violation(const Graph &g, const WriterIndex &ix, const ReadsFrom &rf) {
  if (g.reads().empty())
    return std::nullopt;
  PastClocks clocks(g, rf);
  for (EventIndex r : g.reads()) {
    std::uint32_t x = g.var_of(r);
    EventIndex w = rf[r];
    std::uint32_t tx = ix.writer[x];
    if (w == kNoEvent || tx == kNoThread)
      continue;
    std::int32_t reach = clocks.strict(r, tx);
    if (reach < 0)
      continue;
    const auto &ws = ix.writes[x];
    auto it = std::upper_bound(ws.begin(), ws.end(), g.at(tx, static_cast<std::size_t>(reach)));
    if (it == ws.begin())
      continue;
    EventIndex w2 = *std::prev(it);
    if (w2 > w)
      return Violation{r, w, w2, std::nullopt};
  }
  return std::nullopt;
}

std::optional<Violation> relaxed_violation(const Graph &g, const ReadsFrom &rf) {
  // Per location, within the current thread: the po-latest write seen so
  // far and the po-latest write observed by an earlier read.
  std::vector<EventIndex> own(g.var_count(), kNoEvent);
  std::vector<EventIndex> seen(g.var_count(), kNoEvent);
  std::vector<EventIndex> seen_by(g.var_count(), kNoEvent);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t t : g.threads_in_scan_order()) {
    for (std::uint32_t x : touched)
      own[x] = seen[x] = seen_by[x] = kNoEvent;
    touched.clear();
    for (std::size_t i = 0; i < g.thread_size(t); ++i) {
      EventIndex e = g.at(t, i);
      std::uint32_t x = g.var_of(e);
      touched.push_back(x);
      if (g.event(e).is_write()) {
        own[x] = e;
        continue;
      }
      EventIndex w = rf[e];
      if (w == kNoEvent)
        continue;
      if (own[x] != kNoEvent && own[x] > w && (seen[x] == kNoEvent || own[x] >= seen[x]))
        return Violation{e, w, own[x], std::nullopt};
      if (seen[x] != kNoEvent && seen[x] > w)
        return Violation{e, w, seen[x], seen_by[x]};
      if (seen[x] == kNoEvent || w > seen[x]) {
        seen[x] = w;
        seen_by[x] = e;
      }
    }
  }
  return std::nullopt;
}

Certificate violation_cycle(const Graph &g, const ReadsFrom &rf, const Violation &v, CoherenceMode mode) {
  Certificate c;
  if (mode == CoherenceMode::RelaxedRead) {
    c.steps = {{v.read, EdgeLabel::RfInv}, {v.write, EdgeLabel::Mo}};
    if (v.via_read) {
      c.steps.push_back({v.later_write, EdgeLabel::Rf});
      c.steps.push_back({*v.via_read, EdgeLabel::Po});
    } else {
      c.steps.push_back({v.later_write, EdgeLabel::Po});
    }
    return c;
  }
  c.steps = {{v.read, EdgeLabel::RfInv}, {v.write, EdgeLabel::Po}};
  HbIndex hb(g, rf);
  for (const auto &s : hb.path(v.later_write, v.read))
    c.steps.push_back(s);
  return c;
}

} // namespace

bool is_one_writer(const Graph &g) { return max_writers(g) <= 1; }

ModificationOrder derive_mo(const Graph &g) {
  WriterIndex ix(g);
  return ModificationOrder{ix.writes};
}

InitResult try_initialize_rf(const Graph &g, ReadScope scope) {
  WriterIndex ix(g);
  ReadsFrom rf(g.size());
  for (EventIndex r : g.reads()) {
    auto w = first_match(g, ix, r, 0, scope);
    if (!w)
      return InitResult{std::nullopt, r};
    rf.set(r, *w);
  }
  return InitResult{std::move(rf), kNoEvent};
}

ReadsFrom initialize_rf(const Graph &g, ReadScope scope) {
  auto res = try_initialize_rf(g, scope);
  if (!res.rf)
    throw Error(Errc::InvalidRf, "no admissible write for " + g.event(res.unmatched).id.str());
  return std::move(*res.rf);
}

std::optional<Violation> next_violation(const Graph &g, const ReadsFrom &rf, CoherenceMode mode) {
  if (mode == CoherenceMode::RelaxedRead)
    return relaxed_violation(g, rf);
  WriterIndex ix(g);
  return weak_violation(g, ix, rf);
}

std::optional<EventIndex> next_write(const Graph &g, const ReadsFrom &, const Violation &v, ReadScope scope) {
  WriterIndex ix(g);
  return first_match(g, ix, v.read, v.later_write, scope);
}

std::optional<ReadsFrom> update_rf(const Graph &g, const ReadsFrom &rf, const Violation &v, ReadScope scope) {
  auto w = next_write(g, rf, v, scope);
  if (!w)
    return std::nullopt;
  ReadsFrom out = rf;
  out.set(v.read, *w);
  return out;
}

SolveResult solve(const Graph &g, MemoryModel m, const SolveOptions &opts) {
  WriterIndex ix(g);
  SolveResult res{Inconsistent{}, {}};
  const bool relaxed = m == MemoryModel::Relaxed || m == MemoryModel::RelaxedAcyclic;
  const CoherenceMode mode = relaxed ? CoherenceMode::RelaxedRead : CoherenceMode::WeakRead;
  const ReadScope scope = model_requires_porf(m) ? ReadScope::PoEarlierInWriterThread : ReadScope::Unrestricted;

  for (EventIndex r : g.reads()) {
    if (!ix.matches(g, r)) {
      res.verdict = Inconsistent{Failure::NoMatchingWrite, std::nullopt, {}, r};
      return res;
    }
  }

  ReadsFrom rf(g.size());
  for (EventIndex r : g.reads()) {
    auto w = first_match(g, ix, r, 0, scope);
    if (!w) {
      // Every matching write is po-after r in r's own thread.
      EventIndex later = ix.matches(g, r)->front();
      Certificate c{{{later, EdgeLabel::Rf}, {r, EdgeLabel::Po}}, std::nullopt};
      res.verdict = Inconsistent{Failure::AxiomViolated, Axiom::PorfAcyclicity, c, r};
      return res;
    }
    rf.set(r, *w);
  }

  for (;;) {
    auto v = mode == CoherenceMode::RelaxedRead ? relaxed_violation(g, rf) : weak_violation(g, ix, rf);
    if (!v)
      break;
    auto w = first_match(g, ix, v->read, v->later_write, scope);
    if (!w) {
      Axiom ax = relaxed ? Axiom::RelaxedReadCoherence : Axiom::WeakReadCoherence;
      res.verdict = Inconsistent{Failure::NoLaterWrite, ax, violation_cycle(g, rf, *v, mode), v->read};
      return res;
    }
    res.trace.steps.push_back({*v, *w});
    rf.set(v->read, *w);
  }

  if (model_requires_porf(m)) {
    if (auto c = porf_cycle(g, rf)) {
      res.verdict = Inconsistent{Failure::AxiomViolated, Axiom::PorfAcyclicity, *c, std::nullopt};
      return res;
    }
  }
  if (m == MemoryModel::CM && opts.recheck_ob) {
    if (auto c = check_axiom(g, rf, nullptr, Axiom::ObAcyclicity)) {
      res.verdict = Inconsistent{Failure::AxiomViolated, Axiom::ObAcyclicity, *c, std::nullopt};
      return res;
    }
  }
  res.verdict = Consistent{std::move(rf), ModificationOrder{ix.writes}};
  return res;
}

} // namespace rac
