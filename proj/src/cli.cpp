#include "rac/cli.hpp"

#include "rac/axioms.hpp"
#include "rac/harness.hpp"
#include "rac/onewriter.hpp"
#include "rac/oracle.hpp"
#include "rac/reductions.hpp"
#include "rac/trace_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace rac {

namespace {

struct Io {
  std::istream &in;
  std::ostream &out;
  std::ostream &err;
};

std::string read_input(const std::string &path, Io &io) {
  std::ostringstream buf;
  if (path == "-") {
    buf << io.in.rdbuf();
    return buf.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw Error(Errc::ParseError, "cannot open '" + path + "'");
  buf << f.rdbuf();
  return buf.str();
}

void write_output(const std::string &path, const std::string &text, Io &io) {
  if (path == "-") {
    io.out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw Error(Errc::ParseError, "cannot write '" + path + "'");
  f << text;
}

MemoryModel model_or_throw(const std::string &s) {
  auto m = parse_model(s);
  if (!m)
    throw CLI::ValidationError("--model", "unknown model '" + s + "'");
  return *m;
}

void print_verdict(const Graph &g, const Verdict &v, std::ostream &out) {
  out << verdict_headline(v) << '\n';
  if (is_consistent(v))
    return;
  const auto &inc = std::get<Inconsistent>(v);
  if (!inc.certificate.steps.empty())
    out << "certificate: " << format_certificate(g, inc.certificate) << '\n';
  if (inc.blocking_read)
    out << "blocking read: " << g.event(*inc.blocking_read).id.str() << '\n';
}

int verdict_code(const Verdict &v) { return is_consistent(v) ? kExitOk : kExitInconsistent; }

std::string rf_line(const Graph &g, const ReadsFrom &rf) {
  std::string s = "rf";
  for (EventIndex r : g.reads())
    s += " " + g.event(rf[r]).id.str() + "->" + g.event(r).id.str();
  return s;
}

std::string trace_text(const Graph &g, const SolverTrace &t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto &s = t.steps[i];
    const auto &v = s.violation;
    out << "update " << i + 1 << " read=" << g.event(v.read).id.str() << " write=" << g.event(v.write).id.str()
        << " later=" << g.event(v.later_write).id.str();
    if (v.via_read)
      out << " via=" << g.event(*v.via_read).id.str();
    out << " new=" << g.event(s.replacement).id.str() << '\n';
  }
  return out.str();
}

struct CheckArgs {
  std::string model, input, witness, trace;
  std::size_t max_events = OracleLimits{}.max_events;
  bool recheck_ob = false;
};

int cmd_check(const CheckArgs &a, Io &io) {
  MemoryModel m = model_or_throw(a.model);
  TraceDocument doc = parse_trace(read_input(a.input, io));
  const Graph &g = doc.graph;
  Verdict v;
  SolverTrace trace;
  if (is_one_writer(g)) {
    SolveResult r = solve(g, m, SolveOptions{a.recheck_ob});
    v = std::move(r.verdict);
    trace = std::move(r.trace);
  } else {
    io.err << "warning: " << max_writers(g) << " writer threads on one location; using exponential search\n";
    OracleLimits lim;
    lim.max_events = a.max_events;
    v = oracle_consistent(g, m, lim);
  }
  print_verdict(g, v, io.out);
  if (!a.witness.empty() && is_consistent(v)) {
    const auto &c = std::get<Consistent>(v);
    write_output(a.witness, serialize_trace(TraceDocument{g, c.rf, c.mo}), io);
  }
  if (!a.trace.empty())
    write_output(a.trace, trace_text(g, trace), io);
  return verdict_code(v);
}

int cmd_verify(const std::string &model, const std::string &input, Io &io) {
  MemoryModel m = model_or_throw(model);
  TraceDocument doc = parse_trace(read_input(input, io));
  // Nothing to annotate counts as annotated.
  if (!doc.rf && doc.graph.reads().empty())
    doc.rf = ReadsFrom(doc.graph.size());
  if (!doc.mo) {
    bool any_write = false;
    for (std::uint32_t x = 0; x < doc.graph.var_count(); ++x)
      any_write = any_write || !doc.graph.writes_to(x).empty();
    if (!any_write)
      doc.mo = ModificationOrder{std::vector<std::vector<EventIndex>>(doc.graph.var_count())};
  }
  if (!doc.rf) {
    io.err << "error: input has no rf annotations\n";
    return kExitUsage;
  }
  if (model_uses_mo(m) && !doc.mo) {
    io.err << "error: " << model_name(m) << " needs mo annotations\n";
    return kExitUsage;
  }
  const ModificationOrder *mo = doc.mo ? &*doc.mo : nullptr;
  for (const auto &res : check_model(doc.graph, *doc.rf, mo, m)) {
    io.out << axiom_name(res.axiom) << ": ";
    if (res.certificate)
      io.out << "fail " << format_certificate(doc.graph, *res.certificate) << '\n';
    else
      io.out << "pass\n";
  }
  Verdict v = verify(doc.graph, *doc.rf, mo, m);
  io.out << verdict_headline(v) << '\n';
  return verdict_code(v);
}

int cmd_oracle(const std::string &model, const std::string &input, bool all_rf, std::size_t max_events, Io &io) {
  MemoryModel m = model_or_throw(model);
  TraceDocument doc = parse_trace(read_input(input, io));
  const Graph &g = doc.graph;
  OracleLimits lim;
  lim.max_events = max_events;
  if (all_rf) {
    auto rfs = all_consistent_rfs(g, m, lim);
    io.out << "consistent-rfs=" << rfs.size() << '\n';
    for (const auto &rf : rfs)
      io.out << rf_line(g, rf) << '\n';
    return rfs.empty() ? kExitInconsistent : kExitOk;
  }
  Verdict v = oracle_consistent(g, m, lim);
  print_verdict(g, v, io.out);
  if (is_consistent(v) && !g.reads().empty())
    io.out << rf_line(g, std::get<Consistent>(v).rf) << '\n';
  return verdict_code(v);
}

int cmd_reduce(const std::string &kind, const std::string &input, const std::string &output, Io &io) {
  std::string text = read_input(input, io);
  TraceDocument doc;
  if (kind == "triangle") {
    auto inst = graph_to_onewriter(parse_edgelist(text));
    doc = TraceDocument{std::move(inst.graph), std::move(inst.rf), std::nullopt};
  } else {
    CnfFormula phi = parse_dimacs(text);
    if (kind == "cnf3w")
      doc.graph = cnf_to_threewriter(phi);
    else if (kind == "cnf2w")
      doc.graph = cnf_to_twowriter(phi);
    else
      doc.graph = cnf_to_twowriter_relaxed(phi);
  }
  write_output(output, serialize_trace(doc), io);
  return kExitOk;
}

struct FuzzArgs {
  std::uint64_t seed = 0;
  std::size_t cases = 100;
  std::uint32_t events = 10;
  std::uint32_t threads = 3;
  std::uint32_t locations = 2;
  std::uint32_t values = 4;
  std::string writers = "1";
  std::string models = "all";
  std::string repro_dir = "fuzz-repro";
  bool no_minimality = false;
};

int cmd_fuzz(const FuzzArgs &a, Io &io) {
  FuzzParams p;
  p.seed = a.seed;
  p.num_events = a.events;
  p.num_threads = a.threads;
  p.num_locations = a.locations;
  p.value_range = a.values;
  p.writer_bound = a.writers == "any" ? 0 : static_cast<std::uint32_t>(std::stoul(a.writers));
  std::vector<MemoryModel> models;
  if (a.models == "all") {
    models = all_models();
  } else {
    std::stringstream ss(a.models);
    std::string item;
    while (std::getline(ss, item, ','))
      models.push_back(model_or_throw(item));
  }
  DifferentialOptions opts;
  opts.repro_dir = a.repro_dir;
  opts.check_minimality = !a.no_minimality;
  FuzzReport rep = differential_run(p, models, a.cases, opts);
  io.out << rep.text();
  return rep.failures.empty() ? kExitOk : kExitInconsistent;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::istream &in, std::ostream &out, std::ostream &err) {
  Io io{in, out, err};
  CLI::App app{"Consistency checking for release-acquire, relaxed and causal memory models", "racheck"};
  app.require_subcommand(1);

  CheckArgs check;
  auto *c = app.add_subcommand("check", "decide consistency (1-writer solver, else exhaustive search)");
  c->add_option("--model", check.model, "sra|ra|wra|rlx|rlx-acyclic|cc|cm|ccv")->required();
  c->add_option("--input", check.input, "trace file or -")->required();
  c->add_option("--witness", check.witness, "write rf/mo of a consistent verdict");
  c->add_option("--trace", check.trace, "write the solver's update steps");
  c->add_option("--max-events", check.max_events, "event limit for exhaustive search");
  c->add_flag("--recheck-ob", check.recheck_ob, "cm: re-verify ob-acyclicity on the witness");

  std::string v_model, v_input;
  auto *v = app.add_subcommand("verify", "check axioms against the rf/mo annotations");
  v->add_option("--model", v_model)->required();
  v->add_option("--input", v_input)->required();

  std::string o_model, o_input;
  bool o_all = false;
  std::size_t o_max = OracleLimits{}.max_events;
  auto *o = app.add_subcommand("oracle", "exhaustive search");
  o->add_option("--model", o_model)->required();
  o->add_option("--input", o_input)->required();
  o->add_flag("--all-rf", o_all, "list every consistent rf");
  o->add_option("--max-events", o_max);

  std::string r_kind, r_input, r_output = "-";
  auto *r = app.add_subcommand("reduce", "generate a hardness gadget");
  r->add_option("kind", r_kind)->required()->check(CLI::IsMember({"cnf3w", "cnf2w", "cnf2w-rlx", "triangle"}));
  r->add_option("--input", r_input)->required();
  r->add_option("--output", r_output);

  FuzzArgs fz;
  auto *f = app.add_subcommand("fuzz", "solver/oracle differential sweep");
  f->add_option("--seed", fz.seed);
  f->add_option("--cases", fz.cases);
  f->add_option("--events", fz.events);
  f->add_option("--threads", fz.threads)->check(CLI::Range(1u, 64u));
  f->add_option("--locations", fz.locations)->check(CLI::Range(1u, 64u));
  f->add_option("--values", fz.values)->check(CLI::Range(1u, 1u << 20));
  f->add_option("--writers", fz.writers)->check(CLI::IsMember({"1", "2", "3", "any"}));
  f->add_option("--models", fz.models, "comma-separated list or 'all'");
  f->add_option("--repro-dir", fz.repro_dir);
  f->add_flag("--no-minimality", fz.no_minimality);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c)
      return cmd_check(check, io);
    if (*v)
      return cmd_verify(v_model, v_input, io);
    if (*o)
      return cmd_oracle(o_model, o_input, o_all, o_max, io);
    if (*r)
      return cmd_reduce(r_kind, r_input, r_output, io);
    if (*f)
      return cmd_fuzz(fz, io);
  } catch (const CLI::ValidationError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::BudgetExceeded ? kExitBudget : kExitUsage;
  }
  return kExitUsage;
}

} // namespace rac
