#include "rac/axioms.hpp"

#include <algorithm>
#include <deque>

namespace rac {

HbIndex::HbIndex(const Graph &g, const ReadsFrom &rf) : g_(g), rf_(rf), readers_(g.size()) {
  for (EventIndex r : g.scan_order())
    if (g.event(r).is_read() && rf[r] != kNoEvent)
      readers_[rf[r]].push_back(r);
}

std::vector<char> HbIndex::forward(EventIndex from) const {
  std::vector<char> seen(g_.size(), 0);
  std::vector<EventIndex> stack;
  auto visit = [&](EventIndex e) {
    if (!seen[e]) {
      seen[e] = 1;
      stack.push_back(e);
    }
  };
  auto expand = [&](EventIndex e) {
    std::uint32_t t = g_.thread_of(e);
    if (e + 1 < g_.thread_begin(t) + g_.thread_size(t))
      visit(e + 1);
    for (EventIndex r : readers_[e])
      visit(r);
  };
  expand(from);
  while (!stack.empty()) {
    EventIndex e = stack.back();
    stack.pop_back();
    expand(e);
  }
  return seen;
}

std::vector<char> HbIndex::backward(EventIndex to) const {
  std::vector<char> seen(g_.size(), 0);
  std::vector<EventIndex> stack;
  auto visit = [&](EventIndex e) {
    if (!seen[e]) {
      seen[e] = 1;
      stack.push_back(e);
    }
  };
  auto expand = [&](EventIndex e) {
    if (g_.pos(e) > 0)
      visit(e - 1);
    if (g_.event(e).is_read() && rf_[e] != kNoEvent)
      visit(rf_[e]);
  };
  expand(to);
  while (!stack.empty()) {
    EventIndex e = stack.back();
    stack.pop_back();
    expand(e);
  }
  return seen;
}

bool HbIndex::reaches(EventIndex from, EventIndex to) const { return forward(from)[to] != 0; }

static std::vector<CertStep> merge_po(std::vector<CertStep> steps) {
  std::vector<CertStep> out;
  for (const auto &s : steps) {
    if (!out.empty() && out.back().label == EdgeLabel::Po && s.label == EdgeLabel::Po)
      continue;
    out.push_back(s);
  }
  return out;
}

std::vector<CertStep> HbIndex::path(EventIndex from, EventIndex to) const {
  std::vector<EventIndex> parent(g_.size(), kNoEvent);
  std::vector<EdgeLabel> label(g_.size(), EdgeLabel::Po);
  std::deque<EventIndex> queue;
  auto visit = [&](EventIndex src, EventIndex e, EdgeLabel l) {
    if (parent[e] == kNoEvent) {
      parent[e] = src;
      label[e] = l;
      queue.push_back(e);
    }
  };
  auto expand = [&](EventIndex e) {
    std::uint32_t t = g_.thread_of(e);
    if (e + 1 < g_.thread_begin(t) + g_.thread_size(t))
      visit(e, e + 1, EdgeLabel::Po);
    for (EventIndex r : readers_[e])
      visit(e, r, EdgeLabel::Rf);
  };
  expand(from);
  while (!queue.empty() && parent[to] == kNoEvent) {
    EventIndex e = queue.front();
    queue.pop_front();
    expand(e);
  }
  if (parent[to] == kNoEvent)
    return {};
  std::vector<CertStep> steps;
  EventIndex node = to;
  do {
    steps.push_back({parent[node], label[node]});
    node = parent[node];
  } while (node != from);
  std::reverse(steps.begin(), steps.end());
  return merge_po(std::move(steps));
}

bool hb_reaches(const Graph &g, const ReadsFrom &rf, const EventId &from, const EventId &to) {
  EventIndex a = g.index_of(from), b = g.index_of(to);
  return HbIndex(g, rf).reaches(a, b);
}

namespace {

// Plain concatenation: the junction event is a named write and stays visible.
void append(std::vector<CertStep> &dst, const std::vector<CertStep> &src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

// Rotate so the cycle starts at its first write in scan order, then
// merge po runs.
Certificate normalize_cycle(const Graph &g, std::vector<CertStep> cyc) {
  std::size_t best = 0;
  bool found = false;
  for (std::size_t i = 0; i < cyc.size(); ++i) {
    EventIndex e = cyc[i].event;
    if (!g.event(e).is_write())
      continue;
    if (!found || g.scan_rank(e) < g.scan_rank(cyc[best].event)) {
      best = i;
      found = true;
    }
  }
  std::rotate(cyc.begin(), cyc.begin() + static_cast<std::ptrdiff_t>(best), cyc.end());
  return Certificate{merge_po(std::move(cyc)), std::nullopt};
}

// DFS cycle search over po, rf and (optionally) immediate mo successors.
std::optional<Certificate> find_cycle(const Graph &g, const HbIndex &hb, const ModificationOrder *mo) {
  std::vector<EventIndex> mo_next(g.size(), kNoEvent);
  if (mo)
    for (const auto &ws : mo->order)
      for (std::size_t i = 0; i + 1 < ws.size(); ++i)
        mo_next[ws[i]] = ws[i + 1];

  auto successors = [&](EventIndex e) {
    std::vector<CertStep> out;
    std::uint32_t t = g.thread_of(e);
    if (e + 1 < g.thread_begin(t) + g.thread_size(t))
      out.push_back({e + 1, EdgeLabel::Po});
    for (EventIndex r : hb.readers(e))
      out.push_back({r, EdgeLabel::Rf});
    if (mo_next[e] != kNoEvent)
      out.push_back({mo_next[e], EdgeLabel::Mo});
    return out;
  };

  // 0 = white, 1 = on stack, 2 = done
  std::vector<char> color(g.size(), 0);
  struct Frame {
    EventIndex e;
    std::vector<CertStep> succ;
    std::size_t next;
  };
  for (EventIndex root : g.scan_order()) {
    if (color[root])
      continue;
    std::vector<Frame> stack;
    stack.push_back({root, successors(root), 0});
    color[root] = 1;
    while (!stack.empty()) {
      Frame &f = stack.back();
      if (f.next == f.succ.size()) {
        color[f.e] = 2;
        stack.pop_back();
        continue;
      }
      CertStep s = f.succ[f.next++];
      if (color[s.event] == 1) {
        std::vector<CertStep> cyc;
        std::size_t i = 0;
        while (stack[i].e != s.event)
          ++i;
        for (; i < stack.size(); ++i)
          cyc.push_back({stack[i].e, stack[i].succ[stack[i].next - 1].label});
        return normalize_cycle(g, std::move(cyc));
      }
      if (color[s.event] == 0) {
        color[s.event] = 1;
        stack.push_back({s.event, successors(s.event), 0});
      }
    }
  }
  return std::nullopt;
}

const ModificationOrder &need_mo(const ModificationOrder *mo) {
  if (!mo)
    throw Error(Errc::MissingMo, "axiom requires a modification order");
  return *mo;
}

std::optional<Certificate> write_coherence(const Graph &g, const HbIndex &hb, const ModificationOrder &mo,
                                           std::optional<std::uint32_t> var) {
  auto rank = mo_ranks(g, mo);
  for (EventIndex w2 : g.scan_order()) {
    if (!g.event(w2).is_write() || (var && g.var_of(w2) != *var))
      continue;
    auto fwd = hb.forward(w2);
    for (EventIndex w1 : g.writes_to(g.var_of(w2))) {
      if (fwd[w1] && rank[w1] < rank[w2]) {
        std::vector<CertStep> steps{{w1, EdgeLabel::Mo}};
        append(steps, hb.path(w2, w1));
        return Certificate{steps, std::nullopt};
      }
    }
  }
  return std::nullopt;
}

std::optional<Certificate> read_coherence(const Graph &g, const ReadsFrom &rf, const HbIndex &hb,
                                          const ModificationOrder &mo, std::optional<std::uint32_t> var) {
  auto rank = mo_ranks(g, mo);
  for (EventIndex r : g.reads()) {
    if (var && g.var_of(r) != *var)
      continue;
    EventIndex w1 = rf[r];
    if (w1 == kNoEvent)
      continue;
    auto bwd = hb.backward(r);
    for (EventIndex w2 : g.writes_to(g.var_of(r))) {
      if (bwd[w2] && rank[w2] > rank[w1]) {
        std::vector<CertStep> steps{{r, EdgeLabel::RfInv}, {w1, EdgeLabel::Mo}};
        append(steps, hb.path(w2, r));
        return Certificate{steps, std::nullopt};
      }
    }
  }
  return std::nullopt;
}

std::optional<Certificate> weak_read_coherence(const Graph &g, const ReadsFrom &rf, const HbIndex &hb,
                                               std::optional<std::uint32_t> var) {
  for (EventIndex r : g.reads()) {
    if (var && g.var_of(r) != *var)
      continue;
    EventIndex w = rf[r];
    if (w == kNoEvent)
      continue;
    auto bwd = hb.backward(r);
    std::vector<char> fwd;
    for (EventIndex w2 : g.writes_to(g.var_of(r))) {
      if (w2 == w || !bwd[w2])
        continue;
      if (fwd.empty())
        fwd = hb.forward(w);
      if (fwd[w2]) {
        std::vector<CertStep> steps{{r, EdgeLabel::RfInv}};
        append(steps, hb.path(w, w2));
        append(steps, hb.path(w2, r));
        return Certificate{steps, std::nullopt};
      }
    }
  }
  return std::nullopt;
}

std::optional<Certificate> relaxed_write_coherence(const Graph &g, const ModificationOrder &mo,
                                                   std::optional<std::uint32_t> var) {
  auto rank = mo_ranks(g, mo);
  for (EventIndex w2 : g.scan_order()) {
    if (!g.event(w2).is_write() || (var && g.var_of(w2) != *var))
      continue;
    std::uint32_t t = g.thread_of(w2);
    for (EventIndex w1 = w2 + 1; w1 < g.thread_begin(t) + g.thread_size(t); ++w1) {
      if (g.event(w1).is_write() && g.var_of(w1) == g.var_of(w2) && rank[w1] < rank[w2])
        return Certificate{{{w1, EdgeLabel::Mo}, {w2, EdgeLabel::Po}}, std::nullopt};
    }
  }
  return std::nullopt;
}

std::optional<Certificate> relaxed_read_coherence(const Graph &g, const ReadsFrom &rf, const ModificationOrder &mo,
                                                  std::optional<std::uint32_t> var) {
  auto rank = mo_ranks(g, mo);
  for (EventIndex r : g.reads()) {
    std::uint32_t x = g.var_of(r);
    if (var && x != *var)
      continue;
    EventIndex w1 = rf[r];
    if (w1 == kNoEvent)
      continue;
    for (EventIndex e = g.thread_begin(g.thread_of(r)); e < r; ++e) {
      if (g.var_of(e) != x)
        continue;
      if (g.event(e).is_write()) {
        if (rank[e] > rank[w1])
          return Certificate{{{r, EdgeLabel::RfInv}, {w1, EdgeLabel::Mo}, {e, EdgeLabel::Po}}, std::nullopt};
      } else {
        EventIndex w2 = rf[e];
        if (w2 != kNoEvent && rank[w2] > rank[w1])
          return Certificate{
              {{r, EdgeLabel::RfInv}, {w1, EdgeLabel::Mo}, {w2, EdgeLabel::Rf}, {e, EdgeLabel::Po}},
              std::nullopt};
      }
    }
  }
  return std::nullopt;
}

std::optional<Certificate> ob_acyclicity(const Graph &g, const ReadsFrom &rf) {
  for (std::uint32_t t : g.threads_in_scan_order()) {
    if (g.thread_size(t) == 0)
      continue;
    ObRelation ob = compute_ob_thread(g, rf, t);
    auto a = ob.reflexive_point();
    if (!a)
      continue;
    for (EventIndex b : g.scan_order()) {
      if (b != *a && ob.contains(*a, b) && ob.contains(b, *a))
        return Certificate{{{*a, EdgeLabel::ObStep}, {b, EdgeLabel::ObStep}}, t};
    }
    return Certificate{{{*a, EdgeLabel::ObStep}}, t};
  }
  return std::nullopt;
}

std::optional<Certificate> dispatch(const Graph &g, const ReadsFrom &rf, const HbIndex &hb,
                                    const ModificationOrder *mo, Axiom ax, std::optional<std::uint32_t> var) {
  switch (ax) {
  case Axiom::PorfAcyclicity:
    return find_cycle(g, hb, nullptr);
  case Axiom::WriteCoherence:
    return write_coherence(g, hb, need_mo(mo), var);
  case Axiom::ReadCoherence:
    return read_coherence(g, rf, hb, need_mo(mo), var);
  case Axiom::StrongWriteCoherence:
    return find_cycle(g, hb, &need_mo(mo));
  case Axiom::WeakReadCoherence:
    return weak_read_coherence(g, rf, hb, var);
  case Axiom::RelaxedWriteCoherence:
    return relaxed_write_coherence(g, need_mo(mo), var);
  case Axiom::RelaxedReadCoherence:
    return relaxed_read_coherence(g, rf, need_mo(mo), var);
  case Axiom::ObAcyclicity:
    return ob_acyclicity(g, rf);
  }
  return std::nullopt;
}

void validate_inputs(const Graph &g, const ReadsFrom &rf, const ModificationOrder *mo) {
  validate_rf(g, rf);
  if (mo)
    validate_mo(g, *mo);
}

} // namespace

std::optional<Certificate> check_axiom(const Graph &g, const ReadsFrom &rf, const ModificationOrder *mo, Axiom ax) {
  HbIndex hb(g, rf);
  return dispatch(g, rf, hb, mo, ax, std::nullopt);
}

std::optional<Certificate> check_axiom_on_var(const Graph &g, const ReadsFrom &rf, const ModificationOrder *mo,
                                              Axiom ax, std::uint32_t var) {
  HbIndex hb(g, rf);
  return dispatch(g, rf, hb, mo, ax, var);
}

std::optional<Certificate> porf_cycle(const Graph &g, const ReadsFrom &rf) {
  HbIndex hb(g, rf);
  return find_cycle(g, hb, nullptr);
}

ObRelation::ObRelation(std::size_t n) : n_(n), bits_(n, std::vector<std::uint64_t>((n + 63) / 64, 0)) {}

bool ObRelation::add(EventIndex a, EventIndex b) {
  std::uint64_t &word = bits_[a][b >> 6];
  std::uint64_t bit = std::uint64_t{1} << (b & 63);
  if (word & bit)
    return false;
  word |= bit;
  return true;
}

void ObRelation::close() {
  for (std::size_t k = 0; k < n_; ++k)
    for (std::size_t i = 0; i < n_; ++i)
      if (contains(static_cast<EventIndex>(i), static_cast<EventIndex>(k)))
        for (std::size_t w = 0; w < bits_[i].size(); ++w)
          bits_[i][w] |= bits_[k][w];
}

std::optional<EventIndex> ObRelation::reflexive_point() const {
  for (std::size_t i = 0; i < n_; ++i)
    if (contains(static_cast<EventIndex>(i), static_cast<EventIndex>(i)))
      return static_cast<EventIndex>(i);
  return std::nullopt;
}

std::vector<std::pair<EventIndex, EventIndex>> ObRelation::pairs() const {
  std::vector<std::pair<EventIndex, EventIndex>> out;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (contains(static_cast<EventIndex>(i), static_cast<EventIndex>(j)))
        out.emplace_back(static_cast<EventIndex>(i), static_cast<EventIndex>(j));
  return out;
}

bool ObRelation::subset_of(const ObRelation &o) const {
  if (o.n_ != n_)
    return false;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t w = 0; w < bits_[i].size(); ++w)
      if (bits_[i][w] & ~o.bits_[i][w])
        return false;
  return true;
}

ObRelation compute_ob(const Graph &g, const ReadsFrom &rf, EventIndex anchor) {
  if (anchor >= g.size())
    throw Error(Errc::UnknownEvent, "anchor out of range");
  HbIndex hb(g, rf);
  ObRelation ob(g.size());

  // The anchor's past, anchor included.
  std::vector<char> past = hb.backward(anchor);
  past[anchor] = 1;
  for (EventIndex a = 0; a < g.size(); ++a) {
    if (!past[a])
      continue;
    auto fwd = hb.forward(a);
    for (EventIndex b = 0; b < g.size(); ++b)
      if (past[b] && fwd[b])
        ob.add(a, b);
  }

  std::vector<EventIndex> local_reads;
  for (EventIndex r = g.thread_begin(g.thread_of(anchor)); r <= anchor; ++r)
    if (g.event(r).is_read() && rf[r] != kNoEvent)
      local_reads.push_back(r);

  for (;;) {
    ob.close();
    bool changed = false;
    for (EventIndex r : local_reads) {
      EventIndex w = rf[r];
      for (EventIndex w2 : g.writes_to(g.var_of(r)))
        if (w2 != w && ob.contains(w2, r) && ob.add(w2, w))
          changed = true;
    }
    if (!changed)
      break;
  }
  return ob;
}

ObRelation compute_ob_thread(const Graph &g, const ReadsFrom &rf, std::uint32_t thread) {
  if (thread >= g.thread_count())
    throw Error(Errc::UnknownEvent, "no such thread");
  if (g.thread_size(thread) == 0)
    throw Error(Errc::EmptyThread, g.thread_id(thread));
  return compute_ob(g, rf, g.at(thread, g.thread_size(thread) - 1));
}

std::vector<AxiomResult> check_model(const Graph &g, const ReadsFrom &rf, const ModificationOrder *mo,
                                     MemoryModel m) {
  validate_inputs(g, rf, mo);
  if (model_uses_mo(m) && !mo)
    throw Error(Errc::MissingMo, std::string(model_name(m)) + " requires a modification order");
  HbIndex hb(g, rf);
  std::vector<AxiomResult> out;
  for (Axiom ax : model_axioms(m))
    out.push_back({ax, dispatch(g, rf, hb, mo, ax, std::nullopt)});
  return out;
}

Verdict verify(const Graph &g, const ReadsFrom &rf, const ModificationOrder *mo, MemoryModel m) {
  validate_inputs(g, rf, mo);
  if (model_uses_mo(m) && !mo)
    throw Error(Errc::MissingMo, std::string(model_name(m)) + " requires a modification order");
  HbIndex hb(g, rf);
  for (Axiom ax : model_axioms(m)) {
    if (auto cert = dispatch(g, rf, hb, mo, ax, std::nullopt)) {
      Inconsistent inc{Failure::AxiomViolated, ax, *cert, std::nullopt};
      if (!cert->steps.empty() && cert->steps.front().label == EdgeLabel::RfInv)
        inc.blocking_read = cert->steps.front().event;
      return inc;
    }
  }
  std::optional<ModificationOrder> mo_out;
  if (mo)
    mo_out = *mo;
  return Consistent{rf, mo_out};
}

Verdict verify(const Graph &g, const ReadsFrom &rf, const std::optional<ModificationOrder> &mo, MemoryModel m) {
  return verify(g, rf, mo ? &*mo : nullptr, m);
}

bool replay_certificate(const Graph &g, const ReadsFrom &rf, const ModificationOrder *mo, const Certificate &c) {
  if (c.steps.empty())
    return false;
  HbIndex hb(g, rf);
  std::optional<ObRelation> ob;
  std::vector<std::uint32_t> rank;
  if (mo)
    rank = mo_ranks(g, *mo);
  for (std::size_t i = 0; i < c.steps.size(); ++i) {
    EventIndex a = c.steps[i].event;
    EventIndex b = c.steps[(i + 1) % c.steps.size()].event;
    if (a >= g.size() || b >= g.size())
      return false;
    bool ok = false;
    switch (c.steps[i].label) {
    case EdgeLabel::Po:
      ok = g.po(a, b);
      break;
    case EdgeLabel::Rf:
      ok = g.event(b).is_read() && rf[b] == a;
      break;
    case EdgeLabel::RfInv:
      ok = g.event(a).is_read() && rf[a] == b;
      break;
    case EdgeLabel::Mo:
      ok = mo && a != b && g.event(a).is_write() && g.event(b).is_write() && g.var_of(a) == g.var_of(b) &&
           rank[a] < rank[b];
      break;
    case EdgeLabel::HbStep:
      ok = hb.reaches(a, b);
      break;
    case EdgeLabel::ObStep:
      if (!c.anchor_thread)
        return false;
      if (!ob)
        ob = compute_ob_thread(g, rf, *c.anchor_thread);
      ok = ob->contains(a, b);
      break;
    }
    if (!ok)
      return false;
  }
  return true;
}

} // namespace rac
