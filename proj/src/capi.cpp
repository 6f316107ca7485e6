#include <cstring>
#include <optional>
#include <string>

#include "oslab/core.hpp"
#include "oslab/lab.hpp"
#include "oslab/lipschitz.hpp"
#include "oslab/oslab.h"

struct oslab_graph {
  oslab::MarkedGraph g;
};

struct oslab_trace {
  oslab::MarkedGraph a;
  oslab::MarkedGraph b;
  oslab::CombingTrace t;
  std::optional<oslab::FactReport> facts;
};

struct oslab_report {
  oslab::ExperimentReport r;
};

namespace {

thread_local std::string last_error;

oslab_status fail(oslab_status s, const std::string& what) {
  last_error = what;
  return s;
}

// Runs f, mapping exceptions to status codes.
template <class F>
oslab_status guarded(F&& f, oslab_status invalid = OSLAB_E_ARGUMENT) {
  try {
    last_error.clear();
    return f();
  } catch (const nlohmann::json::exception& e) {
    return fail(OSLAB_E_PARSE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(invalid, e.what());
  } catch (const std::out_of_range& e) {
    return fail(OSLAB_E_ARGUMENT, e.what());
  } catch (const std::logic_error& e) {
    return fail(OSLAB_E_INTERNAL, e.what());
  } catch (const std::runtime_error& e) {
    return fail(OSLAB_E_IO, e.what());
  } catch (const std::exception& e) {
    return fail(OSLAB_E_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

oslab::ExperimentConfig to_config(const oslab_experiment_config& c) {
  oslab::ExperimentConfig cfg;
  cfg.rank = c.rank;
  cfg.epsilon = c.epsilon;
  cfg.seed = c.seed;
  cfg.count = c.count;
  cfg.move_min = c.move_min;
  cfg.move_max = c.move_max;
  cfg.cert_length = c.cert_length;
  cfg.check_facts = c.check_facts != 0;
  cfg.threads = c.threads;
  return cfg;
}

}  // namespace

#define OSLAB_REQUIRE(p) \
  if (!(p)) return fail(OSLAB_E_ARGUMENT, "null argument: " #p)

extern "C" {

const char* oslab_version(void) { return "1.0.0"; }

const char* oslab_last_error(void) { return last_error.c_str(); }

const char* oslab_status_string(oslab_status s) {
  switch (s) {
    case OSLAB_OK: return "ok";
    case OSLAB_E_ARGUMENT: return "invalid argument";
    case OSLAB_E_PARSE: return "parse error";
    case OSLAB_E_UNSTABLE: return "unstable certificate search";
    case OSLAB_E_BUDGET: return "step budget exhausted";
    case OSLAB_E_IO: return "i/o error";
    case OSLAB_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void oslab_string_free(char* s) { delete[] s; }

oslab_status oslab_graph_from_json(const char* json, oslab_graph** out) {
  OSLAB_REQUIRE(json);
  OSLAB_REQUIRE(out);
  *out = nullptr;
  return guarded(
      [&] {
        *out = new oslab_graph{oslab::graph_from_json(nlohmann::json::parse(json))};
        return OSLAB_OK;
      },
      OSLAB_E_PARSE);
}

oslab_status oslab_graph_to_json(const oslab_graph* g, char** out) {
  OSLAB_REQUIRE(g);
  OSLAB_REQUIRE(out);
  return guarded([&] {
    *out = dup(oslab::graph_to_json(g->g).dump());
    return OSLAB_OK;
  });
}

oslab_status oslab_graph_rank(const oslab_graph* g, int* out) {
  OSLAB_REQUIRE(g);
  OSLAB_REQUIRE(out);
  *out = g->g.rank();
  return OSLAB_OK;
}

oslab_status oslab_graph_edge_count(const oslab_graph* g, int* out) {
  OSLAB_REQUIRE(g);
  OSLAB_REQUIRE(out);
  *out = g->g.edge_count();
  return OSLAB_OK;
}

oslab_status oslab_graph_validate(const oslab_graph* g, int* violations, char** report) {
  OSLAB_REQUIRE(g);
  OSLAB_REQUIRE(violations);
  return guarded([&] {
    auto v = oslab::validate(g->g);
    *violations = static_cast<int>(v.size());
    if (report) {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& x : v) j.push_back({{"code", x.code}, {"detail", x.detail}});
      *report = dup(j.dump());
    }
    return OSLAB_OK;
  });
}

oslab_status oslab_graph_systole(const oslab_graph* g, double* out) {
  OSLAB_REQUIRE(g);
  OSLAB_REQUIRE(out);
  return guarded([&] {
    *out = oslab::to_double(oslab::systole(g->g));
    return OSLAB_OK;
  });
}

void oslab_graph_free(oslab_graph* g) { delete g; }

oslab_status oslab_generate_pair(int rank, uint64_t seed, int moves, double epsilon, oslab_graph** a, oslab_graph** b) {
  OSLAB_REQUIRE(a);
  OSLAB_REQUIRE(b);
  *a = nullptr;
  *b = nullptr;
  if (rank < 2) return fail(OSLAB_E_ARGUMENT, "rank must be at least 2");
  if (moves < 0) return fail(OSLAB_E_ARGUMENT, "moves must be non-negative");
  if (!(epsilon > 0)) return fail(OSLAB_E_ARGUMENT, "epsilon must be positive");
  return guarded([&] {
    oslab::InstancePair p = oslab::make_instance(rank, seed, moves, epsilon);
    *a = new oslab_graph{std::move(p.a)};
    *b = new oslab_graph{std::move(p.b)};
    return OSLAB_OK;
  });
}

oslab_status oslab_distance(const oslab_graph* x, const oslab_graph* y, double* d, char** lambda) {
  OSLAB_REQUIRE(x);
  OSLAB_REQUIRE(y);
  OSLAB_REQUIRE(d);
  if (x->g.rank() != y->g.rank()) return fail(OSLAB_E_ARGUMENT, "graphs of different rank");
  return guarded([&] {
    oslab::StretchResult s = oslab::stretch_factor(x->g, y->g);
    *d = std::log(oslab::to_double(s.lambda));
    if (lambda) *lambda = dup(oslab::to_string(s.lambda));
    return OSLAB_OK;
  });
}

oslab_status oslab_intersection(const oslab_graph* x, const oslab_graph* y, size_t cert_length, long* i, int* stable) {
  OSLAB_REQUIRE(x);
  OSLAB_REQUIRE(y);
  OSLAB_REQUIRE(i);
  if (x->g.rank() != y->g.rank()) return fail(OSLAB_E_ARGUMENT, "graphs of different rank");
  return guarded([&] {
    oslab::IntersectionResult r = oslab::intersection_number(x->g, y->g, cert_length);
    *i = r.i;
    if (stable) *stable = r.stable ? 1 : 0;
    return r.stable ? OSLAB_OK : fail(OSLAB_E_UNSTABLE, "intersection verdicts changed when the certificate bound doubled");
  });
}

oslab_status oslab_comb(const oslab_graph* b, const oslab_graph* a, size_t step_budget, oslab_trace** out) {
  OSLAB_REQUIRE(b);
  OSLAB_REQUIRE(a);
  OSLAB_REQUIRE(out);
  *out = nullptr;
  if (a->g.rank() != b->g.rank()) return fail(OSLAB_E_ARGUMENT, "graphs of different rank");
  return guarded([&] {
    oslab::CombingOptions opt;
    opt.step_budget = step_budget;
    auto* t = new oslab_trace{a->g, b->g, oslab::combing_path(b->g, a->g, opt), std::nullopt};
    *out = t;
    if (!t->t.terminated) return fail(OSLAB_E_BUDGET, "combing stopped after " + std::to_string(t->t.budget) + " steps");
    return OSLAB_OK;
  });
}

oslab_status oslab_trace_length(const oslab_trace* t, int* n) {
  OSLAB_REQUIRE(t);
  OSLAB_REQUIRE(n);
  *n = t->t.N();
  return OSLAB_OK;
}

oslab_status oslab_trace_l_gamma(const oslab_trace* t, double* out) {
  OSLAB_REQUIRE(t);
  OSLAB_REQUIRE(out);
  *out = t->t.l_gamma;
  return OSLAB_OK;
}

oslab_status oslab_trace_verify(oslab_trace* t, int rerun, int* passed) {
  OSLAB_REQUIRE(t);
  OSLAB_REQUIRE(passed);
  return guarded([&] {
    t->facts = oslab::verify_facts(t->t, t->a, rerun != 0);
    *passed = t->t.terminated && t->facts->failures.empty() ? 1 : 0;
    return OSLAB_OK;
  });
}

oslab_status oslab_trace_to_json(const oslab_trace* t, char** out) {
  OSLAB_REQUIRE(t);
  OSLAB_REQUIRE(out);
  return guarded([&] {
    *out = dup(oslab::trace_to_json(t->t, t->facts ? &*t->facts : nullptr).dump());
    return OSLAB_OK;
  });
}

void oslab_trace_free(oslab_trace* t) { delete t; }

void oslab_experiment_config_default(oslab_experiment_config* cfg) {
  if (!cfg) return;
  oslab::ExperimentConfig d;
  cfg->rank = d.rank;
  cfg->epsilon = d.epsilon;
  cfg->seed = d.seed;
  cfg->count = d.count;
  cfg->move_min = d.move_min;
  cfg->move_max = d.move_max;
  cfg->cert_length = d.cert_length;
  cfg->check_facts = d.check_facts ? 1 : 0;
  cfg->threads = d.threads;
}

oslab_status oslab_run_experiment(const char* kind, const oslab_experiment_config* cfg, oslab_report** out) {
  OSLAB_REQUIRE(kind);
  OSLAB_REQUIRE(cfg);
  OSLAB_REQUIRE(out);
  *out = nullptr;
  const std::string k = kind;
  if (k != "metric" && k != "combing") return fail(OSLAB_E_ARGUMENT, "unknown experiment kind: " + k);
  return guarded([&] {
    oslab::ExperimentConfig c = to_config(*cfg);
    *out = new oslab_report{k == "metric" ? oslab::run_metric_experiment(c) : oslab::run_combing_experiment(c)};
    if ((*out)->r.aborted) return fail(OSLAB_E_UNSTABLE, "fewer than 80% of the cores are stable");
    return OSLAB_OK;
  });
}

oslab_status oslab_report_status(const oslab_report* r, int* all_passed, int* aborted) {
  OSLAB_REQUIRE(r);
  if (all_passed) *all_passed = r->r.all_passed() ? 1 : 0;
  if (aborted) *aborted = r->r.aborted ? 1 : 0;
  return OSLAB_OK;
}

oslab_status oslab_report_to_json(const oslab_report* r, char** out) {
  OSLAB_REQUIRE(r);
  OSLAB_REQUIRE(out);
  return guarded([&] {
    *out = dup(oslab::report_json(r->r).dump(2));
    return OSLAB_OK;
  });
}

oslab_status oslab_report_to_csv(const oslab_report* r, char** out) {
  OSLAB_REQUIRE(r);
  OSLAB_REQUIRE(out);
  return guarded([&] {
    *out = dup(oslab::report_csv(r->r));
    return OSLAB_OK;
  });
}

oslab_status oslab_report_emit(const oslab_report* r, const char* prefix, const char* format) {
  OSLAB_REQUIRE(r);
  OSLAB_REQUIRE(prefix);
  return guarded([&] {
    oslab::emit_report(r->r, prefix, format ? format : "all");
    return OSLAB_OK;
  });
}

void oslab_report_free(oslab_report* r) { delete r; }

}  // extern "C"
