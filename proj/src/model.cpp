#include "rac/model.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <unordered_map>

namespace rac {

const char *errc_name(Errc c) {
  switch (c) {
  case Errc::DuplicateThreadId: return "DuplicateThreadId";
  case Errc::InvalidIdentifier: return "InvalidIdentifier";
  case Errc::UnknownEvent: return "UnknownEvent";
  case Errc::IncomparableWrites: return "IncomparableWrites";
  case Errc::NotOneWriter: return "NotOneWriter";
  case Errc::MissingMo: return "MissingMo";
  case Errc::InvalidRf: return "InvalidRf";
  case Errc::InvalidMo: return "InvalidMo";
  case Errc::EmptyThread: return "EmptyThread";
  case Errc::BudgetExceeded: return "BudgetExceeded";
  case Errc::ParseError: return "ParseError";
  case Errc::NotThreeCnf: return "NotThreeCnf";
  case Errc::SelfLoop: return "SelfLoop";
  case Errc::TooManyVariables: return "TooManyVariables";
  case Errc::InvalidParams: return "InvalidParams";
  }
  return "?";
}

static std::string error_text(Errc code, const std::string &msg, std::size_t line) {
  std::string s = errc_name(code);
  if (line)
    s += " (line " + std::to_string(line) + ")";
  if (!msg.empty())
    s += ": " + msg;
  return s;
}

Error::Error(Errc code, const std::string &msg, std::size_t line)
    : std::runtime_error(error_text(code, msg, line)), code_(code), line_(line) {}

std::string EventId::str() const { return thread + ":" + std::to_string(index); }

bool valid_identifier(const std::string &s) {
  if (s.empty())
    return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '-';
  });
}

std::optional<std::uint32_t> Graph::find_thread(const std::string &tid) const {
  auto it = std::lower_bound(scan_threads_.begin(), scan_threads_.end(), tid,
                             [&](std::uint32_t t, const std::string &s) { return thread_ids_[t] < s; });
  if (it == scan_threads_.end() || thread_ids_[*it] != tid)
    return std::nullopt;
  return *it;
}

std::optional<EventIndex> Graph::find(const EventId &id) const {
  auto t = find_thread(id.thread);
  if (!t || id.index >= thread_size(*t))
    return std::nullopt;
  return at(*t, id.index);
}

EventIndex Graph::index_of(const EventId &id) const {
  auto e = find(id);
  if (!e)
    throw Error(Errc::UnknownEvent, id.str());
  return *e;
}

std::optional<std::uint32_t> Graph::find_var(const std::string &name) const {
  auto it = std::lower_bound(var_names_.begin(), var_names_.end(), name);
  if (it == var_names_.end() || *it != name)
    return std::nullopt;
  return static_cast<std::uint32_t>(it - var_names_.begin());
}

Graph build_graph(const std::vector<ThreadSpec> &threads) {
  Graph g;
  std::set<std::string> seen;
  std::set<std::string> vars;
  for (const auto &t : threads) {
    if (!valid_identifier(t.id))
      throw Error(Errc::InvalidIdentifier, "thread id '" + t.id + "'");
    if (!seen.insert(t.id).second)
      throw Error(Errc::DuplicateThreadId, t.id);
    for (const auto &e : t.events) {
      if (!valid_identifier(e.var))
        throw Error(Errc::InvalidIdentifier, "location '" + e.var + "'");
      vars.insert(e.var);
    }
  }
  g.var_names_.assign(vars.begin(), vars.end());

  for (std::uint32_t t = 0; t < threads.size(); ++t) {
    g.thread_ids_.push_back(threads[t].id);
    for (std::size_t i = 0; i < threads[t].events.size(); ++i) {
      const auto &s = threads[t].events[i];
      g.events_.push_back(Event{EventId{threads[t].id, i}, s.op, s.var, s.val});
      g.thread_of_.push_back(t);
      g.var_of_.push_back(*g.find_var(s.var));
    }
    g.thread_begin_.push_back(static_cast<EventIndex>(g.events_.size()));
  }

  g.scan_threads_.resize(g.thread_ids_.size());
  std::iota(g.scan_threads_.begin(), g.scan_threads_.end(), 0u);
  std::sort(g.scan_threads_.begin(), g.scan_threads_.end(),
            [&](std::uint32_t a, std::uint32_t b) { return g.thread_ids_[a] < g.thread_ids_[b]; });

  g.scan_rank_.resize(g.events_.size());
  g.writes_by_var_.resize(g.var_names_.size());
  for (auto t : g.scan_threads_) {
    for (EventIndex e = g.thread_begin_[t]; e < g.thread_begin_[t + 1]; ++e) {
      g.scan_rank_[e] = static_cast<std::uint32_t>(g.scan_.size());
      g.scan_.push_back(e);
      if (g.events_[e].is_read())
        g.reads_.push_back(e);
      else
        g.writes_by_var_[g.var_of_[e]].push_back(e);
    }
  }
  return g;
}

std::vector<ThreadSpec> thread_specs(const Graph &g) {
  std::vector<ThreadSpec> out;
  for (std::uint32_t t = 0; t < g.thread_count(); ++t) {
    ThreadSpec ts{g.thread_id(t), {}};
    for (std::size_t i = 0; i < g.thread_size(t); ++i) {
      const Event &e = g.event(g.at(t, i));
      ts.events.push_back({e.op, e.var, e.val});
    }
    out.push_back(std::move(ts));
  }
  return out;
}

std::map<std::string, std::set<std::string>> writer_profile(const Graph &g) {
  std::map<std::string, std::set<std::string>> out;
  for (const Event &e : g.events())
    if (e.is_write())
      out[e.var].insert(e.id.thread);
  return out;
}

std::size_t max_writers(const Graph &g) {
  std::size_t m = 0;
  for (const auto &[var, ts] : writer_profile(g))
    m = std::max(m, ts.size());
  return m;
}

void validate_rf(const Graph &g, const ReadsFrom &rf) {
  if (rf.size() != g.size())
    throw Error(Errc::InvalidRf, "relation sized for a different graph");
  for (EventIndex e = 0; e < g.size(); ++e) {
    const Event &ev = g.event(e);
    EventIndex w = rf[e];
    if (ev.is_write()) {
      if (w != kNoEvent)
        throw Error(Errc::InvalidRf, ev.id.str() + " is a write");
      continue;
    }
    if (w == kNoEvent)
      throw Error(Errc::InvalidRf, "read " + ev.id.str() + " has no writer");
    if (w >= g.size() || !g.event(w).is_write())
      throw Error(Errc::InvalidRf, "source of " + ev.id.str() + " is not a write");
    const Event &we = g.event(w);
    if (we.var != ev.var || we.val != ev.val)
      throw Error(Errc::InvalidRf, we.id.str() + " does not match " + ev.id.str());
  }
}

void validate_mo(const Graph &g, const ModificationOrder &mo) {
  if (mo.order.size() != g.var_count())
    throw Error(Errc::InvalidMo, "order sized for a different graph");
  std::vector<char> seen(g.size(), 0);
  for (std::uint32_t v = 0; v < g.var_count(); ++v) {
    if (mo.order[v].size() != g.writes_to(v).size())
      throw Error(Errc::InvalidMo, "order for " + g.var_name(v) + " does not list every write once");
    for (EventIndex w : mo.order[v]) {
      if (w >= g.size() || !g.event(w).is_write() || g.var_of(w) != v || seen[w])
        throw Error(Errc::InvalidMo, "order for " + g.var_name(v) + " does not list every write once");
      seen[w] = 1;
    }
  }
}

std::vector<std::uint32_t> mo_ranks(const Graph &g, const ModificationOrder &mo) {
  std::vector<std::uint32_t> rank(g.size(), 0);
  for (const auto &ws : mo.order)
    for (std::uint32_t i = 0; i < ws.size(); ++i)
      rank[ws[i]] = i;
  return rank;
}

static void check_comparable(const Graph &g, EventIndex a, EventIndex b) {
  if (g.thread_of(a) != g.thread_of(b))
    throw Error(Errc::IncomparableWrites, g.event(a).id.str() + " vs " + g.event(b).id.str());
}

bool rf_leq(const ReadsFrom &a, const ReadsFrom &b, const Graph &g) {
  bool leq = true;
  for (EventIndex r : g.reads()) {
    check_comparable(g, a[r], b[r]);
    if (a[r] > b[r])
      leq = false;
  }
  return leq;
}

ReadsFrom rf_min(const ReadsFrom &a, const ReadsFrom &b, const Graph &g) {
  ReadsFrom out(g.size());
  for (EventIndex r : g.reads()) {
    check_comparable(g, a[r], b[r]);
    out.set(r, std::min(a[r], b[r]));
  }
  return out;
}

const char *model_name(MemoryModel m) {
  switch (m) {
  case MemoryModel::SRA: return "SRA";
  case MemoryModel::RA: return "RA";
  case MemoryModel::WRA: return "WRA";
  case MemoryModel::Relaxed: return "Relaxed";
  case MemoryModel::RelaxedAcyclic: return "RelaxedAcyclic";
  case MemoryModel::CC: return "CC";
  case MemoryModel::CM: return "CM";
  case MemoryModel::CCv: return "CCv";
  }
  return "?";
}

std::optional<MemoryModel> parse_model(const std::string &s) {
  std::string l;
  for (char c : s)
    l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::map<std::string, MemoryModel> names = {
      {"sra", MemoryModel::SRA},       {"ra", MemoryModel::RA},
      {"wra", MemoryModel::WRA},       {"rlx", MemoryModel::Relaxed},
      {"relaxed", MemoryModel::Relaxed}, {"rlx-acyclic", MemoryModel::RelaxedAcyclic},
      {"relaxedacyclic", MemoryModel::RelaxedAcyclic}, {"cc", MemoryModel::CC},
      {"cm", MemoryModel::CM},         {"ccv", MemoryModel::CCv},
  };
  auto it = names.find(l);
  if (it == names.end())
    return std::nullopt;
  return it->second;
}

const std::vector<MemoryModel> &all_models() {
  static const std::vector<MemoryModel> ms = {
      MemoryModel::SRA,     MemoryModel::RA,             MemoryModel::WRA, MemoryModel::Relaxed,
      MemoryModel::RelaxedAcyclic, MemoryModel::CC, MemoryModel::CM,  MemoryModel::CCv};
  return ms;
}

bool model_uses_mo(MemoryModel m) {
  switch (m) {
  case MemoryModel::WRA:
  case MemoryModel::CC:
  case MemoryModel::CM:
    return false;
  default:
    return true;
  }
}

bool model_requires_porf(MemoryModel m) { return m != MemoryModel::Relaxed; }

const char *axiom_name(Axiom a) {
  switch (a) {
  case Axiom::PorfAcyclicity: return "PorfAcyclicity";
  case Axiom::WriteCoherence: return "WriteCoherence";
  case Axiom::ReadCoherence: return "ReadCoherence";
  case Axiom::StrongWriteCoherence: return "StrongWriteCoherence";
  case Axiom::WeakReadCoherence: return "WeakReadCoherence";
  case Axiom::RelaxedWriteCoherence: return "RelaxedWriteCoherence";
  case Axiom::RelaxedReadCoherence: return "RelaxedReadCoherence";
  case Axiom::ObAcyclicity: return "ObAcyclicity";
  }
  return "?";
}

const std::vector<Axiom> &model_axioms(MemoryModel m) {
  using A = Axiom;
  static const std::vector<A> wra = {A::PorfAcyclicity, A::WeakReadCoherence};
  static const std::vector<A> ra = {A::PorfAcyclicity, A::WriteCoherence, A::ReadCoherence};
  static const std::vector<A> sra = {A::PorfAcyclicity, A::StrongWriteCoherence, A::ReadCoherence};
  static const std::vector<A> rlx = {A::RelaxedWriteCoherence, A::RelaxedReadCoherence};
  static const std::vector<A> rlxa = {A::PorfAcyclicity, A::RelaxedWriteCoherence, A::RelaxedReadCoherence};
  static const std::vector<A> cm = {A::PorfAcyclicity, A::WeakReadCoherence, A::ObAcyclicity};
  switch (m) {
  case MemoryModel::WRA:
  case MemoryModel::CC:
    return wra;
  case MemoryModel::RA:
    return ra;
  case MemoryModel::SRA:
  case MemoryModel::CCv:
    return sra;
  case MemoryModel::Relaxed:
    return rlx;
  case MemoryModel::RelaxedAcyclic:
    return rlxa;
  case MemoryModel::CM:
    return cm;
  }
  return wra;
}

const char *edge_label_name(EdgeLabel l) {
  switch (l) {
  case EdgeLabel::Po: return "po";
  case EdgeLabel::Rf: return "rf";
  case EdgeLabel::RfInv: return "rf^-1";
  case EdgeLabel::Mo: return "mo";
  case EdgeLabel::HbStep: return "hb";
  case EdgeLabel::ObStep: return "ob";
  }
  return "?";
}

std::string format_certificate(const Graph &g, const Certificate &c) {
  if (c.steps.empty())
    return "";
  std::string s;
  for (const auto &st : c.steps)
    s += g.event(st.event).id.str() + " -" + edge_label_name(st.label) + "-> ";
  s += g.event(c.steps.front().event).id.str();
  if (c.anchor_thread)
    s += " [anchor " + g.thread_id(*c.anchor_thread) + "]";
  return s;
}

std::string verdict_headline(const Verdict &v) {
  if (is_consistent(v))
    return "CONSISTENT";
  const auto &inc = std::get<Inconsistent>(v);
  switch (inc.failure) {
  case Failure::NoMatchingWrite:
    return "INCONSISTENT NoMatchingWrite";
  case Failure::Exhausted:
    return "INCONSISTENT exhausted";
  default:
    return std::string("INCONSISTENT ") + (inc.axiom ? axiom_name(*inc.axiom) : "?");
  }
}

} // namespace rac
