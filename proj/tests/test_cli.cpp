#include "common.hpp"

#include "rac/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace rac;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args, const std::string &stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string &name) { return std::string(RAC_FIXTURES) + "/" + name; }

std::string tmp(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / "racheck-unit";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("check fig2 writes the rf_2 witness") {
  std::string w = tmp("fig2.witness");
  Run r = run({"check", "--model", "wra", "--input", fx("fig2.trace"), "--witness", w});
  CHECK(r.code == 0);
  CHECK(r.out == "CONSISTENT\n");
  auto doc = parse_trace(testing::fixture_text("fig2.trace"));
  std::ifstream f(w);
  std::stringstream buf;
  buf << f.rdbuf();
  auto wd = parse_trace(buf.str());
  REQUIRE(wd.rf);
  CHECK(*wd.rf == testing::make_rf(wd.graph, {{"t1:1", "t2:0"}, {"t1:2", "t2:1"}, {"t2:2", "t3:0"}, {"t1:3", "t3:1"}}));
}

TEST_CASE("check fig3") {
  Run r = run({"check", "--model", "wra", "--input", "-", "--trace", tmp("fig3.steps")},
              testing::fixture_text("fig3.trace"));
  CHECK(r.code == 1);
  CHECK(r.out == "INCONSISTENT PorfAcyclicity\ncertificate: t1:3 -rf-> t2:1 -po-> t2:2 -rf-> t1:2 -po-> t1:3\n");
}

TEST_CASE("usage errors") {
  CHECK(run({"check", "--input", fx("fig2.trace")}).code == 2);
  CHECK(run({"check", "--model", "sc", "--input", fx("fig2.trace")}).code == 2);
  CHECK(run({"check", "--model", "wra", "--input", fx("missing.trace")}).code == 2);
  CHECK(run({"check", "--model", "wra", "--input", "-"}, "w x 1\n").code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"fuzz", "--writers", "4"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("multi-writer check warns and searches") {
  Run r = run({"check", "--model", "cm", "--input", fx("appc_c.trace")});
  CHECK(r.code == 1);
  CHECK(r.err.find("warning:") == 0);
  CHECK(run({"check", "--model", "wra", "--input", fx("appc_c.trace")}).code == 0);
  CHECK(run({"check", "--model", "wra", "--input", fx("appc_c.trace"), "--max-events", "4"}).code == 3);
}

TEST_CASE("verify") {
  Run d = run({"verify", "--model", "wra", "--input", fx("fig1d.trace")});
  CHECK(d.code == 1);
  CHECK(d.out.find("WeakReadCoherence: fail") != std::string::npos);
  CHECK(run({"verify", "--model", "ra", "--input", fx("fig1e.trace")}).code == 0);
  Run e = run({"verify", "--model", "sra", "--input", fx("fig1e.trace")});
  CHECK(e.code == 1);
  CHECK(e.out.find("StrongWriteCoherence: fail") != std::string::npos);
  CHECK(run({"verify", "--model", "sra", "--input", fx("a1_witness.trace")}).code == 0);
  CHECK(run({"verify", "--model", "wra", "--input", fx("fig2.trace")}).code == 2);
  CHECK(run({"verify", "--model", "ra", "--input", "-"}, "thread t\nw x 1\nthread u\nr x 1\nrf t:0 u:0\n").code == 2);
}

TEST_CASE("oracle") {
  Run r = run({"oracle", "--model", "wra", "--input", fx("fig2.trace"), "--all-rf"});
  CHECK(r.code == 0);
  CHECK(r.out == "consistent-rfs=1\nrf t1:1->t2:0 t1:2->t2:1 t2:2->t3:0 t1:3->t3:1\n");
  CHECK(run({"oracle", "--model", "wra", "--input", fx("fig2.trace"), "--max-events", "3"}).code == 3);
  CHECK(run({"oracle", "--model", "wra", "--input", fx("fig3.trace")}).code == 1);
}

TEST_CASE("reduce") {
  std::string out = tmp("a1.trace");
  CHECK(run({"reduce", "cnf3w", "--input", fx("a1.cnf"), "--output", out}).code == 0);
  CHECK(run({"check", "--model", "sra", "--input", out}).code == 0);
  Run two = run({"reduce", "cnf2w", "--input", fx("a1.cnf")});
  CHECK(two.code == 0);
  CHECK(max_writers(parse_trace(two.out).graph) == 2);
  Run tri = run({"reduce", "triangle", "--input", fx("k3.edges")});
  CHECK(tri.code == 0);
  CHECK(parse_trace(tri.out).rf);
  CHECK(run({"reduce", "cnf3w", "--input", "-"}, "p cnf 2 1\n1 2 0\n").code == 2);
  CHECK(run({"reduce", "triangle", "--input", "-"}, "2\n1 1\n").code == 2);
  CHECK(run({"reduce", "sat", "--input", fx("a1.cnf")}).code == 2);
}

TEST_CASE("fuzz") {
  std::vector<std::string> args{"fuzz", "--seed", "7", "--cases", "100", "--events", "10", "--writers", "1",
                                "--models", "all", "--repro-dir", tmp("repro")};
  Run a = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == run(args).out);
  Run z = run({"fuzz", "--cases", "0"});
  CHECK(z.code == 0);
  CHECK(z.out.substr(z.out.rfind("cases=")) == "cases=0 failures=0\n");
  CHECK(run({"fuzz", "--models", "wra,xyz"}).code == 2);
}

}
