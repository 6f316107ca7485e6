#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "oslab/oslab.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAssertion = 2;
constexpr int kExitUnstable = 3;

struct GraphDeleter {
  void operator()(oslab_graph* g) const { oslab_graph_free(g); }
};
struct TraceDeleter {
  void operator()(oslab_trace* t) const { oslab_trace_free(t); }
};
struct ReportDeleter {
  void operator()(oslab_report* r) const { oslab_report_free(r); }
};
using Graph = std::unique_ptr<oslab_graph, GraphDeleter>;
using Trace = std::unique_ptr<oslab_trace, TraceDeleter>;
using Report = std::unique_ptr<oslab_report, ReportDeleter>;

struct Failure {
  oslab_status status;
};

void check(oslab_status s, const char* what) {
  if (s == OSLAB_OK) return;
  std::cerr << "oslab: " << what << ": " << oslab_status_string(s) << ": " << oslab_last_error() << "\n";
  throw Failure{s};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  oslab_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << text;
}

struct Options {
  int rank = 2;
  int moves = 4;
  std::string move_range;
  double epsilon = 0.02;
  std::uint64_t seed = 1;
  int count = 50;
  std::size_t cert_length = 0;
  std::size_t budget = 0;
  std::string in;
  std::string out;
  std::string format = "all";
  std::string kind = "combing";
  bool rerun = true;
};

struct Pair {
  Graph a;
  Graph b;
};

Graph graph_from(const json& j) {
  oslab_graph* g = nullptr;
  check(oslab_graph_from_json(j.dump().c_str(), &g), "reading graph");
  return Graph(g);
}

json graph_json(const oslab_graph* g) {
  char* s = nullptr;
  check(oslab_graph_to_json(g, &s), "writing graph");
  return json::parse(take(s));
}

// The pair from --in, or else the seeded instance.
Pair load_pair(const Options& o) {
  Pair p;
  if (!o.in.empty()) {
    json j = json::parse(read_file(o.in));
    p.a = graph_from(j.at("a"));
    p.b = graph_from(j.at("b"));
    return p;
  }
  oslab_graph* a = nullptr;
  oslab_graph* b = nullptr;
  check(oslab_generate_pair(o.rank, o.seed, o.moves, o.epsilon, &a, &b), "generating instance");
  p.a.reset(a);
  p.b.reset(b);
  return p;
}

void add_instance_flags(CLI::App* c, Options& o) {
  c->add_option("--in", o.in, "pair JSON written by gen");
  c->add_option("--rank", o.rank, "rank n")->check(CLI::Range(2, 16));
  c->add_option("--moves", o.moves, "elementary moves in the automorphism")->check(CLI::NonNegativeNumber);
  c->add_option("--seed", o.seed, "instance seed");
  c->add_option("--epsilon", o.epsilon, "thickness bound")->check(CLI::PositiveNumber);
}

int cmd_gen(const Options& o) {
  Pair p = load_pair(o);
  json j = {{"rank", o.rank}, {"seed", o.seed}, {"moves", o.moves}, {"epsilon", o.epsilon},
            {"a", graph_json(p.a.get())}, {"b", graph_json(p.b.get())}};
  write_output(o.out, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_dist(const Options& o) {
  Pair p = load_pair(o);
  double d_ab = 0;
  double d_ba = 0;
  char* l_ab = nullptr;
  char* l_ba = nullptr;
  check(oslab_distance(p.a.get(), p.b.get(), &d_ab, &l_ab), "distance");
  check(oslab_distance(p.b.get(), p.a.get(), &d_ba, &l_ba), "distance");
  json j = {{"d_ab", d_ab}, {"d_ba", d_ba}, {"lambda_ab", take(l_ab)}, {"lambda_ba", take(l_ba)}};
  write_output(o.out, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_inter(const Options& o) {
  Pair p = load_pair(o);
  long i = 0;
  int stable = 0;
  oslab_status s = oslab_intersection(p.a.get(), p.b.get(), o.cert_length, &i, &stable);
  if (s != OSLAB_OK && s != OSLAB_E_UNSTABLE) check(s, "intersection");
  write_output(o.out, json{{"i", i}, {"stable", stable != 0}}.dump(2) + "\n");
  return stable ? kExitOk : kExitUnstable;
}

int cmd_comb(const Options& o, bool verify) {
  Pair p = load_pair(o);
  oslab_trace* raw = nullptr;
  oslab_status s = oslab_comb(p.b.get(), p.a.get(), o.budget, &raw);
  Trace t(raw);
  if (s != OSLAB_OK && s != OSLAB_E_BUDGET) check(s, "combing");
  const std::string budget_note = s == OSLAB_E_BUDGET ? oslab_last_error() : "";
  int passed = 1;
  if (verify && s == OSLAB_OK) check(oslab_trace_verify(t.get(), o.rerun ? 1 : 0, &passed), "verifying");
  char* text = nullptr;
  check(oslab_trace_to_json(t.get(), &text), "writing trace");
  write_output(o.out, take(text) + "\n");
  if (s == OSLAB_E_BUDGET) {
    std::cerr << "oslab: " << budget_note << "\n";
    return kExitAssertion;
  }
  return passed ? kExitOk : kExitAssertion;
}

int cmd_report(const Options& o) {
  oslab_experiment_config cfg;
  oslab_experiment_config_default(&cfg);
  cfg.rank = o.rank;
  cfg.epsilon = o.epsilon;
  cfg.seed = o.seed;
  cfg.count = o.count;
  cfg.cert_length = o.cert_length;
  if (!o.move_range.empty()) {
    auto colon = o.move_range.find(':');
    cfg.move_min = std::stoi(o.move_range.substr(0, colon));
    cfg.move_max = colon == std::string::npos ? cfg.move_min : std::stoi(o.move_range.substr(colon + 1));
  }
  oslab_report* raw = nullptr;
  oslab_status s = oslab_run_experiment(o.kind.c_str(), &cfg, &raw);
  Report r(raw);
  if (s != OSLAB_OK && s != OSLAB_E_UNSTABLE) check(s, "experiment");
  const std::string unstable_note = s == OSLAB_E_UNSTABLE ? oslab_last_error() : "";
  if (!o.out.empty()) {
    check(oslab_report_emit(r.get(), o.out.c_str(), o.format.c_str()), "writing report");
  } else {
    char* text = nullptr;
    if (o.format == "csv") check(oslab_report_to_csv(r.get(), &text), "writing report");
    else check(oslab_report_to_json(r.get(), &text), "writing report");
    std::cout << take(text);
  }
  if (s == OSLAB_E_UNSTABLE) {
    std::cerr << "oslab: " << unstable_note << "\n";
    return kExitUnstable;
  }
  int passed = 0;
  check(oslab_report_status(r.get(), &passed, nullptr), "report status");
  return passed ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oslab: experiments on outer space"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "generate a seeded pair (A trivalent, B a rose)");
  add_instance_flags(gen, o);
  gen->add_option("--out", o.out, "output file (default stdout)");

  auto* dist = app.add_subcommand("dist", "Lipschitz distances in both directions");
  add_instance_flags(dist, o);
  dist->add_option("--out", o.out, "output file");

  auto* inter = app.add_subcommand("inter", "intersection number i(A, B)");
  add_instance_flags(inter, o);
  inter->add_option("--cert-length", o.cert_length, "certificate bound (0 = default)");
  inter->add_option("--out", o.out, "output file");

  auto* comb = app.add_subcommand("comb", "combing path from B toward A");
  add_instance_flags(comb, o);
  comb->add_option("--budget", o.budget, "step budget (0 = circles + 10)");
  comb->add_option("--out", o.out, "trace JSON output");

  auto* verify = app.add_subcommand("verify", "combing path with all trace checks");
  add_instance_flags(verify, o);
  verify->add_option("--budget", o.budget, "step budget (0 = circles + 10)");
  verify->add_flag("!--no-rerun", o.rerun, "skip the suffix re-run check");
  verify->add_option("--out", o.out, "trace JSON output");

  auto* report = app.add_subcommand("report", "batch experiment with fitted constants");
  report->add_option("--kind", o.kind, "metric or combing")->check(CLI::IsMember({"metric", "combing"}));
  report->add_option("--rank", o.rank, "rank n")->check(CLI::Range(2, 16));
  report->add_option("--moves", o.move_range, "move count range min:max (default 1:8)");
  report->add_option("--seed", o.seed, "batch seed");
  report->add_option("--count", o.count, "instances")->check(CLI::NonNegativeNumber);
  report->add_option("--epsilon", o.epsilon, "thickness bound")->check(CLI::PositiveNumber);
  report->add_option("--cert-length", o.cert_length, "certificate bound (0 = default)");
  report->add_option("--format", o.format, "csv, json, svg or all")->check(CLI::IsMember({"csv", "json", "svg", "all"}));
  report->add_option("--out", o.out, "output prefix (default: print to stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }
  try {
    if (*gen) return cmd_gen(o);
    if (*dist) return cmd_dist(o);
    if (*inter) return cmd_inter(o);
    if (*comb) return cmd_comb(o, false);
    if (*verify) return cmd_comb(o, true);
    if (*report) return cmd_report(o);
  } catch (const Failure& f) {
    return f.status == OSLAB_E_UNSTABLE ? kExitUnstable : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "oslab: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
