#include "rac/harness.hpp"

#include "rac/axioms.hpp"
#include "rac/onewriter.hpp"
#include "rac/trace_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace rac {

std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s)),
                    static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s))};
  eng_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1)
    return 0;
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n);
  std::uint64_t x;
  do
    x = eng_();
  while (x >= limit);
  return x % n;
}

std::uint64_t case_seed(std::uint64_t seed, std::size_t i) {
  std::uint64_t s = seed ^ (0xd1b54a32d192ed03ull * (i + 1));
  return splitmix64(s);
}

Graph random_graph(const FuzzParams &p) {
  if (p.num_events > 0 && (p.num_threads == 0 || p.num_locations == 0))
    throw Error(Errc::InvalidParams, "events need at least one thread and one location");
  if (p.value_range == 0)
    throw Error(Errc::InvalidParams, "value range must be positive");
  if (p.writer_bound > 3)
    throw Error(Errc::InvalidParams, "writer bound must be 1, 2, 3 or unbounded");
  Rng rng(p.seed);
  const std::uint32_t T = p.num_threads, L = p.num_locations;

  // Writer thread sets, one per location.
  std::uint32_t bound = p.writer_bound == 0 ? T : std::min(p.writer_bound, T);
  std::vector<std::vector<char>> may_write(T, std::vector<char>(L, 0));
  for (std::uint32_t x = 0; x < L && T > 0; ++x) {
    std::vector<std::uint32_t> pool(T);
    for (std::uint32_t t = 0; t < T; ++t)
      pool[t] = t;
    for (std::uint32_t k = 0; k < bound; ++k) {
      auto j = k + static_cast<std::uint32_t>(rng.below(T - k));
      std::swap(pool[k], pool[j]);
      may_write[pool[k]][x] = 1;
    }
  }

  struct Draft {
    std::uint32_t thread;
    Op op;
    std::uint32_t loc;
    std::int64_t val;
  };
  std::vector<Draft> drafts;
  for (std::uint32_t i = 0; i < p.num_events; ++i) {
    std::uint32_t t = i % T;
    if (rng.chance(1, 4))
      t = static_cast<std::uint32_t>(rng.below(T));
    std::vector<std::uint32_t> writable;
    for (std::uint32_t x = 0; x < L; ++x)
      if (may_write[t][x])
        writable.push_back(x);
    if (!writable.empty() && rng.chance(1, 2)) {
      auto x = writable[rng.below(writable.size())];
      drafts.push_back({t, Op::Write, x, static_cast<std::int64_t>(rng.below(p.value_range))});
    } else {
      drafts.push_back({t, Op::Read, static_cast<std::uint32_t>(rng.below(L)), 0});
    }
  }

  std::vector<std::vector<std::int64_t>> written(L);
  for (const auto &d : drafts)
    if (d.op == Op::Write)
      written[d.loc].push_back(d.val);
  std::vector<std::uint32_t> live;
  for (std::uint32_t x = 0; x < L; ++x)
    if (!written[x].empty())
      live.push_back(x);
  for (auto &d : drafts) {
    if (d.op != Op::Read)
      continue;
    if (rng.chance(9, 10) && !live.empty()) {
      if (written[d.loc].empty())
        d.loc = live[rng.below(live.size())];
      d.val = written[d.loc][rng.below(written[d.loc].size())];
    } else {
      d.val = static_cast<std::int64_t>(rng.below(p.value_range));
    }
  }

  std::vector<ThreadSpec> ts(T);
  for (std::uint32_t t = 0; t < T; ++t)
    ts[t].id = "t" + std::to_string(t);
  for (const auto &d : drafts)
    ts[d.thread].events.push_back({d.op, "x" + std::to_string(d.loc), d.val});
  return build_graph(ts);
}

Graph random_sc_graph(std::uint64_t seed, std::uint32_t threads, std::uint32_t locations, std::uint32_t events,
                      std::uint32_t value_range) {
  if (threads == 0 || locations == 0 || value_range == 0)
    throw Error(Errc::InvalidParams, "threads, locations and values must be positive");
  Rng rng(seed);
  std::vector<ThreadSpec> ts(threads);
  for (std::uint32_t t = 0; t < threads; ++t)
    ts[t].id = "t" + std::to_string(t);
  std::vector<std::optional<std::int64_t>> memory(locations);
  std::vector<std::uint32_t> written;
  for (std::uint32_t i = 0; i < events; ++i) {
    auto t = static_cast<std::uint32_t>(rng.below(threads));
    std::vector<std::uint32_t> owned;
    for (std::uint32_t x = t; x < locations; x += threads)
      owned.push_back(x);
    bool write = !owned.empty() && (written.empty() || rng.chance(1, 2));
    if (!write && written.empty()) {
      // Nothing readable yet and t owns nothing: let an owner go first.
      t = 0;
      owned = {0};
      write = true;
    }
    if (write) {
      auto x = owned[rng.below(owned.size())];
      auto v = static_cast<std::int64_t>(rng.below(value_range));
      if (!memory[x])
        written.push_back(x);
      memory[x] = v;
      ts[t].events.push_back(W("x" + std::to_string(x), v));
    } else {
      auto x = written[rng.below(written.size())];
      ts[t].events.push_back(R("x" + std::to_string(x), *memory[x]));
    }
  }
  return build_graph(ts);
}

namespace {

std::string models_list(const std::vector<MemoryModel> &ms) {
  std::string s;
  for (auto m : ms) {
    if (!s.empty())
      s += ',';
    s += model_name(m);
  }
  return s;
}

std::string blocking(const Graph &g, const Verdict &v) {
  if (is_consistent(v))
    return "-";
  const auto &inc = std::get<Inconsistent>(v);
  return inc.blocking_read ? g.event(*inc.blocking_read).id.str() : "-";
}

bool no_matching(const Verdict &v) {
  return !is_consistent(v) && std::get<Inconsistent>(v).failure == Failure::NoMatchingWrite;
}

} // namespace

FuzzReport differential_run(const FuzzParams &p, const std::vector<MemoryModel> &models, std::size_t count,
                            const DifferentialOptions &opts) {
  FuzzReport rep;
  rep.seed = p.seed;
  rep.params = p;
  rep.models = models;

  for (std::size_t i = 0; i < count; ++i) {
    FuzzParams cp = p;
    cp.seed = case_seed(p.seed, i);
    if (opts.vary_shape) {
      Rng shape(cp.seed ^ 0x5bd1e995u);
      cp.num_threads = 1 + static_cast<std::uint32_t>(shape.below(std::max(1u, p.num_threads)));
      cp.num_locations = 1 + static_cast<std::uint32_t>(shape.below(std::max(1u, p.num_locations)));
      cp.num_events = static_cast<std::uint32_t>(shape.below(p.num_events + 1ull));
    }
    Graph g = random_graph(cp);
    ++rep.cases;
    const bool one_writer = is_one_writer(g);
    if (one_writer)
      ++rep.one_writer_cases;

    std::vector<std::string> problems;
    std::map<MemoryModel, bool> oracle_says;
    for (MemoryModel m : models) {
      const std::string tag = std::string("model=") + model_name(m) + " ";
      Verdict ov;
      try {
        ov = oracle_consistent(g, m, opts.limits);
      } catch (const Error &e) {
        if (e.code() != Errc::BudgetExceeded)
          throw;
        ++rep.budget_skips;
        continue;
      }
      oracle_says[m] = is_consistent(ov);
      if (is_consistent(ov)) {
        const auto &c = std::get<Consistent>(ov);
        if (!is_consistent(verify(g, c.rf, c.mo, m)))
          problems.push_back(tag + "check=oracle-witness");
      }
      if (!one_writer)
        continue;

      SolveResult sr = solve(g, m);
      if (is_consistent(sr.verdict) != is_consistent(ov)) {
        problems.push_back(tag + "check=solver-vs-oracle solver=" + verdict_headline(sr.verdict) +
                           " oracle=" + verdict_headline(ov));
        continue;
      }
      if (no_matching(ov) != no_matching(sr.verdict) || (no_matching(ov) && blocking(g, ov) != blocking(g, sr.verdict)))
        problems.push_back(tag + "check=blocking-read solver=" + blocking(g, sr.verdict) +
                           " oracle=" + blocking(g, ov));
      if (sr.trace.steps.size() > g.size())
        problems.push_back(tag + "check=trace-length");
      if (!is_consistent(sr.verdict))
        continue;
      const auto &sc = std::get<Consistent>(sr.verdict);
      if (!is_consistent(verify(g, sc.rf, sc.mo, m)))
        problems.push_back(tag + "check=solver-witness");
      if (opts.check_minimality) {
        try {
          for (const auto &rf : all_consistent_rfs(g, m, opts.limits)) {
            if (!rf_leq(sc.rf, rf, g)) {
              problems.push_back(tag + "check=minimality");
              break;
            }
          }
        } catch (const Error &e) {
          if (e.code() != Errc::BudgetExceeded)
            throw;
          ++rep.budget_skips;
        }
      }
      if (m == MemoryModel::WRA) {
        ++rep.consistent_wra_one_writer;
        if (!is_consistent(verify(g, sc.rf, sc.mo, MemoryModel::CM)))
          problems.push_back(tag + "check=cm-coincidence");
      }
    }

    auto says = [&](MemoryModel m) -> std::optional<bool> {
      auto it = oracle_says.find(m);
      if (it == oracle_says.end())
        return std::nullopt;
      return it->second;
    };
    auto sra = says(MemoryModel::SRA), ra = says(MemoryModel::RA), wra = says(MemoryModel::WRA);
    if (sra && ra && *sra && !*ra)
      problems.push_back("check=hierarchy SRA-not-RA");
    if (ra && wra && *ra && !*wra)
      problems.push_back("check=hierarchy RA-not-WRA");
    if (sra && wra && *sra && !*wra)
      problems.push_back("check=hierarchy SRA-not-WRA");

    if (problems.empty())
      continue;
    std::string repro = "-";
    if (!opts.repro_dir.empty()) {
      std::filesystem::create_directories(opts.repro_dir);
      repro = (std::filesystem::path(opts.repro_dir) / ("case-" + std::to_string(i) + ".trace")).string();
      std::ofstream out(repro);
      out << "# seed=" << p.seed << " case=" << i << " case_seed=" << cp.seed << '\n';
      out << serialize_trace(TraceDocument{g, std::nullopt, std::nullopt});
    }
    for (const auto &pr : problems)
      rep.failures.push_back("FAIL case=" + std::to_string(i) + " " + pr + " repro=" + repro);
  }
  return rep;
}

std::string FuzzReport::text() const {
  std::ostringstream out;
  out << "# differential report\n";
  out << "seed=" << seed << " prng=" << Rng::name() << '\n';
  out << "params threads<=" << params.num_threads << " locations<=" << params.num_locations
      << " events<=" << params.num_events << " values=" << params.value_range
      << " writers=" << (params.writer_bound == 0 ? std::string("any") : std::to_string(params.writer_bound))
      << '\n';
  out << "models=" << models_list(models) << '\n';
  for (const auto &f : failures)
    out << f << '\n';
  out << "one_writer_cases=" << one_writer_cases << " consistent_wra_one_writer=" << consistent_wra_one_writer
      << " budget_skips=" << budget_skips << '\n';
  out << "cases=" << cases << " failures=" << failures.size() << '\n';
  return out.str();
}

} // namespace rac
