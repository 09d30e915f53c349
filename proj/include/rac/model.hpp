// Events, execution graphs, reads-from and modification order.
#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rac {

enum class Errc {
  DuplicateThreadId,
  InvalidIdentifier,
  UnknownEvent,
  IncomparableWrites,
  NotOneWriter,
  MissingMo,
  InvalidRf,
  InvalidMo,
  EmptyThread,
  BudgetExceeded,
  ParseError,
  NotThreeCnf,
  SelfLoop,
  TooManyVariables,
  InvalidParams,
};

const char *errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string &msg, std::size_t line = 0);
  Errc code() const { return code_; }
  // 1-based input line for parse errors, 0 otherwise.
  std::size_t line() const { return line_; }

private:
  Errc code_;
  std::size_t line_;
};

enum class Op : std::uint8_t { Read, Write };

struct EventId {
  std::string thread;
  std::size_t index = 0;

  auto operator<=>(const EventId &) const = default;
  bool operator==(const EventId &) const = default;
  std::string str() const;
};

struct Event {
  EventId id;
  Op op = Op::Read;
  std::string var;
  std::int64_t val = 0;

  bool is_read() const { return op == Op::Read; }
  bool is_write() const { return op == Op::Write; }
};

struct EventSpec {
  Op op;
  std::string var;
  std::int64_t val;
  bool operator==(const EventSpec &) const = default;
};

inline EventSpec R(std::string var, std::int64_t val) { return {Op::Read, std::move(var), val}; }
inline EventSpec W(std::string var, std::int64_t val) { return {Op::Write, std::move(var), val}; }

struct ThreadSpec {
  std::string id;
  std::vector<EventSpec> events;
  bool operator==(const ThreadSpec &) const = default;
};

using EventIndex = std::uint32_t;
inline constexpr EventIndex kNoEvent = std::numeric_limits<EventIndex>::max();

bool valid_identifier(const std::string &s);

// Events are stored densely: thread t owns [begin(t), begin(t) + size(t)).
// Thread numbers follow listing order; scan order is thread id
// lexicographic, then index.
class Graph {
public:
  Graph() = default;

  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const Event &event(EventIndex e) const { return events_[e]; }
  const std::vector<Event> &events() const { return events_; }

  std::size_t thread_count() const { return thread_ids_.size(); }
  const std::string &thread_id(std::uint32_t t) const { return thread_ids_[t]; }
  EventIndex thread_begin(std::uint32_t t) const { return thread_begin_[t]; }
  std::size_t thread_size(std::uint32_t t) const { return thread_begin_[t + 1] - thread_begin_[t]; }
  std::optional<std::uint32_t> find_thread(const std::string &tid) const;

  std::uint32_t thread_of(EventIndex e) const { return thread_of_[e]; }
  std::uint32_t pos(EventIndex e) const { return e - thread_begin_[thread_of_[e]]; }
  EventIndex at(std::uint32_t t, std::size_t i) const { return thread_begin_[t] + static_cast<EventIndex>(i); }

  // po(a, b): same thread, a strictly earlier.
  bool po(EventIndex a, EventIndex b) const { return thread_of_[a] == thread_of_[b] && a < b; }

  std::optional<EventIndex> find(const EventId &id) const;
  // Throws UnknownEvent.
  EventIndex index_of(const EventId &id) const;

  std::size_t var_count() const { return var_names_.size(); }
  // Variable ids are assigned in name order.
  std::uint32_t var_of(EventIndex e) const { return var_of_[e]; }
  const std::string &var_name(std::uint32_t v) const { return var_names_[v]; }
  std::optional<std::uint32_t> find_var(const std::string &name) const;

  // Threads in lexicographic id order.
  const std::vector<std::uint32_t> &threads_in_scan_order() const { return scan_threads_; }
  // All events in scan order.
  const std::vector<EventIndex> &scan_order() const { return scan_; }
  // Position of an event within scan_order().
  std::uint32_t scan_rank(EventIndex e) const { return scan_rank_[e]; }
  const std::vector<EventIndex> &reads() const { return reads_; }
  // Writes to v in scan order.
  const std::vector<EventIndex> &writes_to(std::uint32_t v) const { return writes_by_var_[v]; }

  friend Graph build_graph(const std::vector<ThreadSpec> &threads);

private:
  std::vector<Event> events_;
  std::vector<std::string> thread_ids_;
  std::vector<EventIndex> thread_begin_{0};
  std::vector<std::uint32_t> thread_of_;
  std::vector<std::uint32_t> var_of_;
  std::vector<std::string> var_names_;
  std::vector<std::uint32_t> scan_threads_;
  std::vector<EventIndex> scan_;
  std::vector<std::uint32_t> scan_rank_;
  std::vector<EventIndex> reads_;
  std::vector<std::vector<EventIndex>> writes_by_var_;
};

Graph build_graph(const std::vector<ThreadSpec> &threads);

// Inverse of build_graph.
std::vector<ThreadSpec> thread_specs(const Graph &g);

std::map<std::string, std::set<std::string>> writer_profile(const Graph &g);
std::size_t max_writers(const Graph &g);

// Maps each read to the write it observes; kNoEvent for non-reads and
// unassigned reads.
class ReadsFrom {
public:
  ReadsFrom() = default;
  explicit ReadsFrom(std::size_t n) : src_(n, kNoEvent) {}

  std::size_t size() const { return src_.size(); }
  EventIndex operator[](EventIndex r) const { return src_[r]; }
  void set(EventIndex r, EventIndex w) { src_[r] = w; }
  bool operator==(const ReadsFrom &) const = default;

private:
  std::vector<EventIndex> src_;
};

// Throws InvalidRf unless rf is total on reads and every pair matches
// var and value.
void validate_rf(const Graph &g, const ReadsFrom &rf);

// Per-variable write orders, indexed by graph variable id.
struct ModificationOrder {
  std::vector<std::vector<EventIndex>> order;
  bool operator==(const ModificationOrder &) const = default;
};

// Throws InvalidMo unless every variable's list is a permutation of its
// writes.
void validate_mo(const Graph &g, const ModificationOrder &mo);

// rank[e] = position of write e within its variable's order.
std::vector<std::uint32_t> mo_ranks(const Graph &g, const ModificationOrder &mo);

bool rf_leq(const ReadsFrom &a, const ReadsFrom &b, const Graph &g);
ReadsFrom rf_min(const ReadsFrom &a, const ReadsFrom &b, const Graph &g);

enum class MemoryModel { SRA, RA, WRA, Relaxed, RelaxedAcyclic, CC, CM, CCv };

const char *model_name(MemoryModel m);
std::optional<MemoryModel> parse_model(const std::string &s);
const std::vector<MemoryModel> &all_models();
bool model_uses_mo(MemoryModel m);
bool model_requires_porf(MemoryModel m);

enum class Axiom {
  PorfAcyclicity,
  WriteCoherence,
  ReadCoherence,
  StrongWriteCoherence,
  WeakReadCoherence,
  RelaxedWriteCoherence,
  RelaxedReadCoherence,
  ObAcyclicity,
};

const char *axiom_name(Axiom a);
const std::vector<Axiom> &model_axioms(MemoryModel m);

enum class EdgeLabel { Po, Rf, RfInv, Mo, HbStep, ObStep };
const char *edge_label_name(EdgeLabel l);

struct CertStep {
  EventIndex event;
  // Edge from this event to the next one (cyclically).
  EdgeLabel label;
  bool operator==(const CertStep &) const = default;
};

struct Certificate {
  std::vector<CertStep> steps;
  // Set for ob-step certificates.
  std::optional<std::uint32_t> anchor_thread;
};

std::string format_certificate(const Graph &g, const Certificate &c);

enum class Failure { AxiomViolated, NoMatchingWrite, NoLaterWrite, Exhausted };

struct Consistent {
  ReadsFrom rf;
  std::optional<ModificationOrder> mo;
};

struct Inconsistent {
  Failure failure = Failure::Exhausted;
  std::optional<Axiom> axiom;
  Certificate certificate;
  std::optional<EventIndex> blocking_read;
};

using Verdict = std::variant<Consistent, Inconsistent>;

inline bool is_consistent(const Verdict &v) { return std::holds_alternative<Consistent>(v); }

// One line, e.g. "INCONSISTENT PorfAcyclicity".
std::string verdict_headline(const Verdict &v);

} // namespace rac
