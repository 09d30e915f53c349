#include "common.hpp"

#include "rac/harness.hpp"
#include "rac/oracle.hpp"

#include <doctest.h>

using namespace rac;
using testing::ev;
using testing::fixture;

namespace {

const ModificationOrder *mo_ptr(const TraceDocument &d) { return d.mo ? &*d.mo : nullptr; }

std::optional<Certificate> check(const TraceDocument &d, Axiom ax) {
  return check_axiom(d.graph, *d.rf, mo_ptr(d), ax);
}

// Random (graph, rf, mo) triples with at least one read. rf and mo are drawn
// from the enumerations.
template <class F> void for_random_complete(std::uint64_t seed, int count, std::uint32_t events, F f) {
  Rng pick(seed);
  int done = 0;
  for (std::uint64_t i = 0; done < count; ++i) {
    FuzzParams p;
    p.seed = case_seed(seed, i);
    p.num_events = events;
    p.num_threads = 3;
    p.num_locations = 2;
    p.value_range = 3;
    Graph g = random_graph(p);
    if (count_rf_candidates(g) == 0 || count_rf_candidates(g) > 2000 || count_mo_candidates(g) > 2000)
      continue;
    auto rfs = enumerate_rfs(g);
    auto mos = enumerate_mos(g);
    const ReadsFrom &rf = rfs[pick.below(rfs.size())];
    const ModificationOrder &mo = mos[pick.below(mos.size())];
    f(g, rf, mo);
    ++done;
  }
}

} // namespace

TEST_SUITE("axioms") {

TEST_CASE("fig1a: porf cycle over four events") {
  auto d = fixture("fig1a.trace");
  auto c = check(d, Axiom::PorfAcyclicity);
  REQUIRE(c);
  CHECK(c->steps.size() == 4);
  CHECK(testing::cert(d.graph, c) == "t1:1 -rf-> t2:0 -po-> t2:1 -rf-> t1:0 -po-> t1:1");
  CHECK(replay_certificate(d.graph, *d.rf, mo_ptr(d), *c));
}

TEST_CASE("fig1b: write coherence") {
  auto d = fixture("fig1b.trace");
  CHECK(hb_reaches(d.graph, *d.rf, {"t1", 0}, {"t2", 1}));
  auto c = check(d, Axiom::WriteCoherence);
  REQUIRE(c);
  CHECK(testing::cert(d.graph, c) == "t2:1 -mo-> t1:0 -po-> t1:1 -rf-> t2:0 -po-> t2:1");
  CHECK_FALSE(check(d, Axiom::ReadCoherence));
  CHECK_FALSE(check(d, Axiom::PorfAcyclicity));
  CHECK_FALSE(check(d, Axiom::WeakReadCoherence));
}

TEST_CASE("fig1c: read coherence") {
  auto d = fixture("fig1c.trace");
  auto c = check(d, Axiom::ReadCoherence);
  REQUIRE(c);
  CHECK(testing::cert(d.graph, c) == "t2:1 -rf^-1-> t1:0 -mo-> t1:1 -po-> t1:2 -rf-> t2:0 -po-> t2:1");
  CHECK_FALSE(check(d, Axiom::WriteCoherence));
  CHECK(replay_certificate(d.graph, *d.rf, mo_ptr(d), *c));
}

TEST_CASE("fig1d: weak read coherence") {
  auto d = fixture("fig1d.trace");
  auto c = check(d, Axiom::WeakReadCoherence);
  REQUIRE(c);
  // w1 hb w2 hb r with r reading w1; w2 is the write of t2.
  CHECK(testing::cert(d.graph, c) == "t2:2 -rf^-1-> t1:0 -po-> t1:1 -rf-> t2:0 -po-> t2:1 -po-> t2:2");
  CHECK(replay_certificate(d.graph, *d.rf, mo_ptr(d), *c));
  CHECK_FALSE(check(d, Axiom::PorfAcyclicity));
}

TEST_CASE("fig1e: strong write coherence but not write coherence") {
  auto d = fixture("fig1e.trace");
  d.rf = ReadsFrom(d.graph.size());
  auto c = check(d, Axiom::StrongWriteCoherence);
  REQUIRE(c);
  CHECK(testing::cert(d.graph, c) == "t1:0 -po-> t1:1 -mo-> t2:0 -po-> t2:1 -mo-> t1:0");
  CHECK(replay_certificate(d.graph, *d.rf, mo_ptr(d), *c));
  CHECK_FALSE(check(d, Axiom::WriteCoherence));
  CHECK(is_consistent(verify(d.graph, *d.rf, d.mo, MemoryModel::RA)));
  CHECK_FALSE(is_consistent(verify(d.graph, *d.rf, d.mo, MemoryModel::SRA)));
}

TEST_CASE("relaxed read coherence example") {
  auto d = fixture("appb_rrc.trace");
  auto c = check(d, Axiom::RelaxedReadCoherence);
  REQUIRE(c);
  CHECK(testing::cert(d.graph, c) == "t2:1 -rf^-1-> t1:0 -mo-> t1:1 -rf-> t2:0 -po-> t2:1");
  CHECK_FALSE(check(d, Axiom::RelaxedWriteCoherence));
}

TEST_CASE("relaxed coherence uses po only") {
  // fig1b orders the x writes only through hb, so the relaxed axioms hold.
  auto d = fixture("fig1b.trace");
  CHECK_FALSE(check(d, Axiom::RelaxedWriteCoherence));
  Graph g = build_graph({{"t1", {W("x", 1), W("x", 2)}}});
  ModificationOrder mo{{{ev(g, "t1:1"), ev(g, "t1:0")}}};
  CHECK(check_axiom(g, ReadsFrom(g.size()), &mo, Axiom::RelaxedWriteCoherence));
}

TEST_CASE("missing mo") {
  auto d = fixture("fig1c.trace");
  CHECK_THROWS_AS(check_axiom(d.graph, *d.rf, nullptr, Axiom::ReadCoherence), Error);
  CHECK_NOTHROW(check_axiom(d.graph, *d.rf, nullptr, Axiom::WeakReadCoherence));
  CHECK_THROWS_AS(verify(d.graph, *d.rf, std::nullopt, MemoryModel::RA), Error);
}

TEST_CASE("empty graph passes every axiom") {
  Graph g = build_graph({});
  ReadsFrom rf(0);
  ModificationOrder mo;
  for (int a = 0; a <= static_cast<int>(Axiom::ObAcyclicity); ++a)
    CHECK_FALSE(check_axiom(g, rf, &mo, static_cast<Axiom>(a)));
}

TEST_CASE("no reads, mo in po order: consistent under every model") {
  Graph g = build_graph({{"t1", {W("x", 1), W("y", 1), W("x", 2)}}, {"t2", {W("y", 2)}}});
  ModificationOrder mo{{{ev(g, "t1:0"), ev(g, "t1:2")}, {ev(g, "t1:1"), ev(g, "t2:0")}}};
  for (MemoryModel m : all_models())
    CHECK(is_consistent(verify(g, ReadsFrom(g.size()), mo, m)));
}

TEST_CASE("hb basics") {
  Graph g = build_graph({{"t1", {W("x", 1)}}, {"t2", {W("y", 1)}}});
  ReadsFrom rf(g.size());
  CHECK_FALSE(hb_reaches(g, rf, {"t1", 0}, {"t1", 0}));
  CHECK_FALSE(hb_reaches(g, rf, {"t1", 0}, {"t2", 0}));
  CHECK_THROWS_AS(hb_reaches(g, rf, {"t3", 0}, {"t1", 0}), Error);
}

TEST_CASE("hb_reaches agrees with a transitive closure matrix") {
  for_random_complete(11, 150, 14, [](const Graph &g, const ReadsFrom &rf, const ModificationOrder &) {
    const std::size_t n = g.size();
    std::vector<std::vector<char>> m(n, std::vector<char>(n, 0));
    for (EventIndex e = 0; e < n; ++e) {
      if (e + 1 < n && g.thread_of(e) == g.thread_of(e + 1))
        m[e][e + 1] = 1;
      if (g.event(e).is_read())
        m[rf[e]][e] = 1;
    }
    // Repeated squaring: after k rounds, paths of length up to 2^k.
    for (std::size_t len = 1; len < n; len *= 2) {
      auto next = m;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
          if (m[i][k])
            for (std::size_t j = 0; j < n; ++j)
              next[i][j] |= m[k][j];
      m = std::move(next);
    }
    HbIndex hb(g, rf);
    for (EventIndex a = 0; a < n; ++a)
      for (EventIndex b = 0; b < n; ++b)
        REQUIRE(hb.reaches(a, b) == static_cast<bool>(m[a][b]));
  });
}

TEST_CASE("every certificate replays") {
  int replayed = 0;
  for_random_complete(12, 400, 10, [&](const Graph &g, const ReadsFrom &rf, const ModificationOrder &mo) {
    for (int a = 0; a <= static_cast<int>(Axiom::RelaxedReadCoherence); ++a) {
      auto c = check_axiom(g, rf, &mo, static_cast<Axiom>(a));
      if (!c)
        continue;
      INFO(axiom_name(static_cast<Axiom>(a)), " ", format_certificate(g, *c));
      REQUIRE(replay_certificate(g, rf, &mo, *c));
      ++replayed;
    }
  });
  CHECK(replayed > 100);
}

TEST_CASE("a tampered certificate does not replay") {
  auto d = fixture("fig1c.trace");
  auto c = check(d, Axiom::ReadCoherence);
  REQUIRE(c);
  c->steps[1].label = EdgeLabel::Po;
  c->steps[1].event = ev(d.graph, "t1:1");
  std::swap(c->steps[0], c->steps[2]);
  CHECK_FALSE(replay_certificate(d.graph, *d.rf, mo_ptr(d), *c));
}

TEST_CASE("strong write coherence implies write coherence") {
  for_random_complete(13, 400, 9, [](const Graph &g, const ReadsFrom &rf, const ModificationOrder &mo) {
    if (!check_axiom(g, rf, &mo, Axiom::StrongWriteCoherence))
      REQUIRE_FALSE(check_axiom(g, rf, &mo, Axiom::WriteCoherence));
  });
}

TEST_CASE("weak read coherence failure forces RC or WC failure for every mo") {
  int hits = 0;
  for_random_complete(14, 300, 9, [&](const Graph &g, const ReadsFrom &rf, const ModificationOrder &) {
    if (!check_axiom(g, rf, nullptr, Axiom::WeakReadCoherence))
      return;
    ++hits;
    for (const auto &mo : enumerate_mos(g)) {
      bool rc = check_axiom(g, rf, &mo, Axiom::ReadCoherence).has_value();
      bool wc = check_axiom(g, rf, &mo, Axiom::WriteCoherence).has_value();
      REQUIRE((rc || wc));
    }
  });
  CHECK(hits > 0);
}

TEST_CASE("appc_b: ob orders the x writes, CM consistent") {
  auto d = fixture("appc_b.trace");
  Graph &g = d.graph;
  ReadsFrom rf = testing::make_rf(g, {{"t3:1", "t2:0"}, {"t1:1", "t2:1"}, {"t3:0", "t2:2"}});
  ObRelation ob = compute_ob_thread(g, rf, *g.find_thread("t2"));
  CHECK(ob.contains(ev(g, "t1:0"), ev(g, "t3:0")));
  CHECK_FALSE(ob.reflexive_point());
  CHECK(is_consistent(verify(g, rf, nullptr, MemoryModel::CM)));
}

TEST_CASE("appc_c: reflexive ob, CM inconsistent but WRA consistent") {
  auto d = fixture("appc_c.trace");
  Graph &g = d.graph;
  ReadsFrom rf =
      testing::make_rf(g, {{"t3:1", "t2:0"}, {"t1:0", "t2:1"}, {"t1:3", "t2:2"}, {"t3:0", "t2:3"}});
  ObRelation ob = compute_ob_thread(g, rf, *g.find_thread("t2"));
  CHECK(ob.contains(ev(g, "t1:1"), ev(g, "t1:0")));
  CHECK(ob.contains(ev(g, "t1:0"), ev(g, "t1:1")));
  CHECK(ob.reflexive_point());
  CHECK(is_consistent(verify(g, rf, nullptr, MemoryModel::WRA)));
  Verdict v = verify(g, rf, nullptr, MemoryModel::CM);
  REQUIRE_FALSE(is_consistent(v));
  const auto &inc = std::get<Inconsistent>(v);
  CHECK(inc.axiom == Axiom::ObAcyclicity);
  CHECK(inc.certificate.anchor_thread == g.find_thread("t2"));
  CHECK(replay_certificate(g, rf, nullptr, inc.certificate));
}

TEST_CASE("ob of a read-free thread is its po") {
  Graph g = build_graph({{"t1", {W("x", 1), W("y", 1), W("x", 2)}}});
  ObRelation ob = compute_ob_thread(g, ReadsFrom(g.size()), 0);
  std::vector<std::pair<EventIndex, EventIndex>> want{{0, 1}, {0, 2}, {1, 2}};
  CHECK(ob.pairs() == want);
}

TEST_CASE("ob of an empty thread") {
  Graph g = build_graph({{"t1", {}}, {"t2", {W("x", 1)}}});
  CHECK_THROWS_AS(compute_ob_thread(g, ReadsFrom(g.size()), 0), Error);
}

TEST_CASE("ob is monotone along po") {
  int pairs = 0;
  for_random_complete(15, 200, 10, [&](const Graph &g, const ReadsFrom &rf, const ModificationOrder &) {
    if (porf_cycle(g, rf))
      return;
    for (EventIndex e = 0; e + 1 < g.size(); ++e) {
      if (g.thread_of(e) != g.thread_of(e + 1))
        continue;
      REQUIRE(compute_ob(g, rf, e).subset_of(compute_ob(g, rf, e + 1)));
      ++pairs;
    }
  });
  CHECK(pairs > 100);
}

TEST_CASE("check_model reports every axiom") {
  auto d = fixture("fig1a.trace");
  auto res = check_model(d.graph, *d.rf, mo_ptr(d), MemoryModel::SRA);
  REQUIRE(res.size() == 3);
  CHECK(res[0].certificate);
  CHECK(res[1].certificate);
  CHECK_FALSE(res[2].certificate);
}

TEST_CASE("verify rejects an invalid rf") {
  auto d = fixture("fig1c.trace");
  ReadsFrom rf = *d.rf;
  rf.set(ev(d.graph, "t2:1"), ev(d.graph, "t1:1"));
  CHECK_THROWS_AS(verify(d.graph, rf, d.mo, MemoryModel::RA), Error);
}

}
