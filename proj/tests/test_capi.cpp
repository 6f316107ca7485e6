#include <algorithm>
#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "oslab/oslab.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  oslab_string_free(s);
  return out;
}

struct Pair {
  oslab_graph* a = nullptr;
  oslab_graph* b = nullptr;
  Pair(int rank, uint64_t seed, int moves) { REQUIRE(oslab_generate_pair(rank, seed, moves, 0.02, &a, &b) == OSLAB_OK); }
  ~Pair() {
    oslab_graph_free(a);
    oslab_graph_free(b);
  }
};

}  // namespace

TEST_CASE("status strings and version") {
  CHECK(std::strlen(oslab_version()) > 0);
  CHECK(std::string(oslab_status_string(OSLAB_OK)) == "ok");
  CHECK(std::string(oslab_status_string(OSLAB_E_BUDGET)) == "step budget exhausted");
  oslab_string_free(nullptr);
  oslab_graph_free(nullptr);
  oslab_trace_free(nullptr);
  oslab_report_free(nullptr);
}

TEST_CASE("null and invalid arguments") {
  oslab_graph* g = nullptr;
  CHECK(oslab_graph_from_json(nullptr, &g) == OSLAB_E_ARGUMENT);
  CHECK(std::string(oslab_last_error()).find("null argument") != std::string::npos);
  CHECK(oslab_graph_from_json("{}", nullptr) == OSLAB_E_ARGUMENT);
  int n = 0;
  CHECK(oslab_graph_rank(nullptr, &n) == OSLAB_E_ARGUMENT);
  oslab_graph* a = nullptr;
  oslab_graph* b = nullptr;
  CHECK(oslab_generate_pair(1, 1, 3, 0.02, &a, &b) == OSLAB_E_ARGUMENT);
  CHECK(oslab_generate_pair(2, 1, -1, 0.02, &a, &b) == OSLAB_E_ARGUMENT);
  CHECK(oslab_generate_pair(2, 1, 3, 0, &a, &b) == OSLAB_E_ARGUMENT);
  CHECK(a == nullptr);
  CHECK(b == nullptr);
  Pair p2(2, 1, 3);
  Pair p3(3, 1, 3);
  double d = 0;
  CHECK(oslab_distance(p2.a, p3.b, &d, nullptr) == OSLAB_E_ARGUMENT);
  CHECK(std::string(oslab_last_error()) == "graphs of different rank");
  oslab_report* r = nullptr;
  oslab_experiment_config cfg;
  oslab_experiment_config_default(&cfg);
  CHECK(oslab_run_experiment("other", &cfg, &r) == OSLAB_E_ARGUMENT);
  CHECK(r == nullptr);
}

TEST_CASE("malformed graph json") {
  oslab_graph* g = nullptr;
  CHECK(oslab_graph_from_json("not json", &g) == OSLAB_E_PARSE);
  CHECK(g == nullptr);
  CHECK(std::strlen(oslab_last_error()) > 0);
  CHECK(oslab_graph_from_json(R"({"rank": 2, "vertices": 1, "edges": []})", &g) == OSLAB_E_PARSE);
  CHECK(g == nullptr);
}

TEST_CASE("graphs through the interface") {
  Pair p(2, 4, 5);
  int rank = 0;
  int edges = 0;
  CHECK(oslab_graph_rank(p.a, &rank) == OSLAB_OK);
  CHECK(rank == 2);
  CHECK(oslab_graph_edge_count(p.a, &edges) == OSLAB_OK);
  CHECK(edges == 3);
  CHECK(oslab_graph_edge_count(p.b, &edges) == OSLAB_OK);
  CHECK(edges == 2);
  int violations = -1;
  char* report = nullptr;
  CHECK(oslab_graph_validate(p.a, &violations, &report) == OSLAB_OK);
  CHECK(violations == 0);
  CHECK(take(report) == "[]");
  double sys = 0;
  CHECK(oslab_graph_systole(p.b, &sys) == OSLAB_OK);
  CHECK(sys > 0);
  CHECK(sys <= 1);

  char* text = nullptr;
  REQUIRE(oslab_graph_to_json(p.a, &text) == OSLAB_OK);
  const std::string json = take(text);
  oslab_graph* back = nullptr;
  REQUIRE(oslab_graph_from_json(json.c_str(), &back) == OSLAB_OK);
  double d = -1;
  char* lambda = nullptr;
  CHECK(oslab_distance(back, p.a, &d, &lambda) == OSLAB_OK);
  CHECK(d == 0.0);
  CHECK(take(lambda) == "1");
  oslab_graph_free(back);

  CHECK(oslab_distance(p.a, p.b, &d, nullptr) == OSLAB_OK);
  CHECK(d >= 0);
  long i = -1;
  int stable = 0;
  CHECK(oslab_intersection(p.a, p.b, 0, &i, &stable) == OSLAB_OK);
  CHECK(stable == 1);
  CHECK(i >= 0);
  long j = -1;
  CHECK(oslab_intersection(p.b, p.a, 0, &j, nullptr) == OSLAB_OK);
  CHECK(i == j);
  CHECK(oslab_intersection(p.a, p.a, 0, &i, nullptr) == OSLAB_OK);
  CHECK(i == 0);
}

TEST_CASE("unstable intersection") {
  Pair p(2, 3, 6);
  long i = 0;
  int stable = 1;
  CHECK(oslab_intersection(p.a, p.b, 2, &i, &stable) == OSLAB_E_UNSTABLE);
  CHECK(stable == 0);
}

TEST_CASE("combing and verification") {
  Pair p(2, 6, 4);
  oslab_trace* t = nullptr;
  REQUIRE(oslab_comb(p.b, p.a, 0, &t) == OSLAB_OK);
  int n = -1;
  CHECK(oslab_trace_length(t, &n) == OSLAB_OK);
  CHECK(n >= 0);
  double l = -1;
  CHECK(oslab_trace_l_gamma(t, &l) == OSLAB_OK);
  double d = 0;
  CHECK(oslab_distance(p.a, p.b, &d, nullptr) == OSLAB_OK);
  CHECK(l + 1e-9 >= d);
  char* text = nullptr;
  CHECK(oslab_trace_to_json(t, &text) == OSLAB_OK);
  CHECK(take(text).find("\"facts\"") == std::string::npos);
  int passed = 0;
  CHECK(oslab_trace_verify(t, 1, &passed) == OSLAB_OK);
  CHECK(oslab_trace_to_json(t, &text) == OSLAB_OK);
  CHECK(take(text).find("\"facts\"") != std::string::npos);
  oslab_trace_free(t);

  Pair q(2, 3, 6);
  t = nullptr;
  CHECK(oslab_comb(q.b, q.a, 1, &t) == OSLAB_E_BUDGET);
  REQUIRE(t != nullptr);
  CHECK(oslab_trace_length(t, &n) == OSLAB_OK);
  oslab_trace_free(t);
}

TEST_CASE("experiments through the interface") {
  oslab_experiment_config cfg;
  oslab_experiment_config_default(&cfg);
  CHECK(cfg.rank == 2);
  CHECK(cfg.move_min == 1);
  CHECK(cfg.move_max == 8);
  cfg.count = 4;
  oslab_report* r = nullptr;
  REQUIRE(oslab_run_experiment("metric", &cfg, &r) == OSLAB_OK);
  int aborted = 1;
  CHECK(oslab_report_status(r, nullptr, &aborted) == OSLAB_OK);
  CHECK(aborted == 0);
  char* csv = nullptr;
  CHECK(oslab_report_to_csv(r, &csv) == OSLAB_OK);
  const std::string c = take(csv);
  CHECK(c.rfind("instance_id,n,seed,N,", 0) == 0);
  CHECK(std::count(c.begin(), c.end(), '\n') == 5);
  char* json = nullptr;
  CHECK(oslab_report_to_json(r, &json) == OSLAB_OK);
  CHECK(take(json).find("\"assertions\"") != std::string::npos);
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "oslab_test_capi";
  fs::remove_all(dir);
  fs::create_directories(dir);
  CHECK(oslab_report_emit(r, (dir / "m").string().c_str(), "csv") == OSLAB_OK);
  CHECK(fs::exists(dir / "m.csv"));
  CHECK(oslab_report_emit(r, (dir / "none" / "m").string().c_str(), "csv") == OSLAB_E_IO);
  oslab_report_free(r);

  cfg.cert_length = 1;
  cfg.count = 10;
  r = nullptr;
  CHECK(oslab_run_experiment("metric", &cfg, &r) == OSLAB_E_UNSTABLE);
  REQUIRE(r != nullptr);
  CHECK(oslab_report_status(r, nullptr, &aborted) == OSLAB_OK);
  CHECK(aborted == 1);
  oslab_report_free(r);
}
