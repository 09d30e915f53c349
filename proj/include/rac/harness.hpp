// Random graphs and the solver/oracle differential sweep.
#pragma once

#include "rac/model.hpp"
#include "rac/oracle.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rac {

std::uint64_t splitmix64(std::uint64_t &state);

// mt19937_64 seeded through splitmix64. below() is rejection-sampled so
// streams do not depend on the standard library's distributions.
class Rng {
public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next() { return eng_(); }
  std::uint64_t below(std::uint64_t n);
  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }
  static const char *name() { return "mt19937_64+splitmix64"; }

private:
  std::mt19937_64 eng_;
};

struct FuzzParams {
  std::uint64_t seed = 0;
  std::uint32_t num_threads = 3;
  std::uint32_t num_locations = 2;
  std::uint32_t num_events = 8;
  // Values are drawn from [0, value_range).
  std::uint32_t value_range = 4;
  // 1, 2, 3, or 0 for unbounded.
  std::uint32_t writer_bound = 0;
};

// Throws InvalidParams.
Graph random_graph(const FuzzParams &p);

// A 1-writer graph recorded from a simulated sequentially consistent run,
// so it is consistent under every model. Location i belongs to thread
// i mod threads.
Graph random_sc_graph(std::uint64_t seed, std::uint32_t threads, std::uint32_t locations, std::uint32_t events,
                      std::uint32_t value_range);

struct DifferentialOptions {
  // Per case, draw threads/locations/events up to the maxima in the params
  // instead of using them exactly.
  bool vary_shape = true;
  bool check_minimality = true;
  // Empty: do not write reproducers.
  std::string repro_dir;
  OracleLimits limits;
};

struct FuzzReport {
  std::uint64_t seed = 0;
  FuzzParams params;
  std::vector<MemoryModel> models;
  std::size_t cases = 0;
  std::size_t one_writer_cases = 0;
  std::size_t consistent_wra_one_writer = 0;
  std::size_t budget_skips = 0;
  std::vector<std::string> failures;

  std::string text() const;
};

FuzzReport differential_run(const FuzzParams &p, const std::vector<MemoryModel> &models, std::size_t count,
                            const DifferentialOptions &opts = {});

// Seed of case i in a sweep.
std::uint64_t case_seed(std::uint64_t seed, std::size_t i);

} // namespace rac
