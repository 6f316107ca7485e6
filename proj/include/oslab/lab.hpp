#pragma once

// Batch experiments over seeded instances, constant fitting and report output.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "oslab/sphere.hpp"

namespace oslab {

struct ExperimentConfig {
  int rank = 2;
  double epsilon = 0.02;
  std::uint64_t seed = 1;
  int count = 50;
  int move_min = 1;
  int move_max = 8;
  std::size_t cert_length = 0;  // 0 selects the default certificate bound
  bool check_facts = true;      // combing: run verify_facts on every trace
  int threads = 0;              // 0 selects the hardware concurrency
};

// Instance `id` of a batch is random_instance(instance_seed(cfg, id), {rank, instance_moves(cfg, id)}).
std::uint64_t instance_seed(const ExperimentConfig& cfg, int id);
int instance_moves(const ExperimentConfig& cfg, int id);
InstancePair make_instance(int rank, std::uint64_t seed, int moves, double epsilon);

struct ExperimentRow {
  int instance_id = 0;
  int n = 0;
  std::uint64_t seed = 0;
  int moves = 0;
  int N = -1;  // -1 for metric rows
  double l_gamma = 0;
  double d_ab = 0;
  double d_ba = 0;
  long i_ab = 0;
  double log_i = 0;
  double systole_min = 0;
  int exceptional = 0;
  bool stable = true;
  bool thin = false;
  bool terminated = true;
  double max_step = 0;            // largest d(A_k, A_{k+1})
  double fitted_c3 = 0;           // least C3 for the label-drop bound on this trace
  double subdivided_weight = 0;   // least, over steps, of the largest subdivided weight
  std::map<std::string, bool> checks;
  std::vector<std::string> failures;
};

struct FitResult {
  std::string name;
  std::vector<std::string> parameter_names;
  std::vector<double> parameters;
  double residual = 0;  // max absolute residual of the least-squares line
  std::size_t used = 0;
  bool finite = true;
};

struct Assertion {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct ExperimentReport {
  std::string kind;  // "metric" or "combing"
  ExperimentConfig config;
  std::vector<ExperimentRow> rows;
  std::vector<FitResult> fits;
  std::vector<Assertion> assertions;
  double stable_fraction = 1;
  bool aborted = false;  // fewer than 80% stable cores

  bool all_passed() const;
  const FitResult* fit(const std::string& name) const;
  const Assertion* assertion(const std::string& name) const;
};

ExperimentReport run_metric_experiment(const ExperimentConfig& cfg);
ExperimentReport run_combing_experiment(const ExperimentConfig& cfg);

// Least squares y = slope x + intercept with the max absolute residual.
struct LineFit {
  double slope = 0;
  double intercept = 0;
  double residual = 0;
  std::size_t used = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Sandwich fit of d against log i: K = max(slope, 1/slope) of the
// least-squares line (1 when the slope is not positive) and the least L >= 0
// with log(i)/K - L <= d <= K log(i) + L on every point.
FitResult fit_sandwich(const std::vector<double>& log_i, const std::vector<double>& d);

std::string report_csv(const ExperimentReport& r);
nlohmann::json report_json(const ExperimentReport& r);

struct PlotRange {
  double x0 = 0;
  double x1 = 1;
  double y0 = 0;
  double y1 = 1;
};
// Data range widened by 5% on each side (unit width when degenerate).
PlotRange plot_range(const std::vector<double>& x, const std::vector<double>& y);
std::string svg_scatter(const std::vector<double>& x, const std::vector<double>& y, const std::string& x_label,
                        const std::string& y_label);

// Writes <prefix>.csv, <prefix>.json and the scatter plots; returns the paths written.
std::vector<std::string> emit_report(const ExperimentReport& r, const std::string& prefix, const std::string& format);

// JSON forms of graphs, pairs and traces.
nlohmann::json graph_to_json(const MarkedGraph& g);
MarkedGraph graph_from_json(const nlohmann::json& j);
nlohmann::json trace_to_json(const CombingTrace& t, const FactReport* facts);

}  // namespace oslab
