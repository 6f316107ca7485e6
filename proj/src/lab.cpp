#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "oslab/core.hpp"
#include "oslab/lab.hpp"
#include "oslab/lipschitz.hpp"

namespace oslab {

namespace {

constexpr double kTol = 1e-9;

// Runs body(id) for every id on a fixed pool; results are written by index.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, std::max(count, 1));
  std::atomic<int> next{0};
  auto run = [&] {
    for (int id = next++; id < count; id = next++) body(id);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.rank < 2) throw std::invalid_argument("rank must be at least 2");
  if (!(cfg.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (cfg.count < 0) throw std::invalid_argument("count must be non-negative");
  if (cfg.move_min < 0 || cfg.move_max < cfg.move_min) throw std::invalid_argument("bad move count range");
}

Assertion make_assertion(const std::string& name, const std::vector<ExperimentRow>& rows) {
  Assertion a;
  a.name = name;
  std::ostringstream bad;
  int failing = 0;
  for (const auto& r : rows) {
    auto it = r.checks.find(name);
    if (it == r.checks.end() || it->second) continue;
    if (failing < 8) bad << (failing ? " " : "") << r.instance_id << "(seed " << r.seed << ")";
    ++failing;
  }
  a.pass = failing == 0;
  if (failing) a.detail = std::to_string(failing) + " failing rows: " + bad.str();
  return a;
}

void stability(ExperimentReport& rep) {
  std::size_t stable = 0;
  for (const auto& r : rep.rows) stable += r.stable ? 1 : 0;
  rep.stable_fraction = rep.rows.empty() ? 1.0 : static_cast<double>(stable) / static_cast<double>(rep.rows.size());
  rep.aborted = rep.stable_fraction < 0.8;
  Assertion a{"stable_cores", !rep.aborted, ""};
  std::ostringstream os;
  os << stable << "/" << rep.rows.size() << " stable";
  a.detail = os.str();
  rep.assertions.push_back(a);
}

// Least C >= 1 with log(i) <= log(C) + C d on every point.
double least_power_constant(const std::vector<double>& d, const std::vector<double>& log_i) {
  auto ok = [&](double c) {
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (log_i[k] > std::log(c) + c * d[k] + kTol) return false;
    }
    return true;
  };
  double hi = 1;
  while (!ok(hi)) {
    hi *= 2;
    if (hi > 1e12) return std::numeric_limits<double>::infinity();
  }
  if (hi == 1) return 1;
  double lo = hi / 2;
  for (int it = 0; it < 60; ++it) {
    double mid = (lo + hi) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

std::uint64_t instance_seed(const ExperimentConfig& cfg, int id) { return cfg.seed * 10007 + static_cast<std::uint64_t>(id); }

int instance_moves(const ExperimentConfig& cfg, int id) {
  return cfg.move_min + id % (cfg.move_max - cfg.move_min + 1);
}

InstancePair make_instance(int rank, std::uint64_t seed, int moves, double epsilon) {
  InstanceConfig ic;
  ic.rank = rank;
  ic.move_count = moves;
  ic.epsilon = epsilon;
  return random_instance(seed, ic);
}

bool ExperimentReport::all_passed() const {
  return !aborted && std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

const FitResult* ExperimentReport::fit(const std::string& name) const {
  for (const auto& f : fits) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const Assertion* ExperimentReport::assertion(const std::string& name) const {
  for (const auto& a : assertions) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  LineFit f;
  f.used = x.size();
  if (x.empty()) return f;
  double mx = 0;
  double my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0;
  double sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0;
  f.intercept = my - f.slope * mx;
  for (std::size_t k = 0; k < x.size(); ++k) f.residual = std::max(f.residual, std::abs(y[k] - f.slope * x[k] - f.intercept));
  return f;
}

FitResult fit_sandwich(const std::vector<double>& log_i, const std::vector<double>& d) {
  FitResult out;
  out.name = "sandwich";
  out.parameter_names = {"K", "L", "slope", "intercept"};
  LineFit lf = fit_line(log_i, d);
  double k = 1;
  if (lf.slope > 0) k = std::max(lf.slope, 1.0 / lf.slope);
  double l = 0;
  for (std::size_t j = 0; j < d.size(); ++j) l = std::max({l, d[j] - k * log_i[j], log_i[j] / k - d[j]});
  out.parameters = {k, l, lf.slope, lf.intercept};
  out.residual = lf.residual;
  out.used = lf.used;
  out.finite = std::isfinite(k) && std::isfinite(l);
  return out;
}

ExperimentReport run_metric_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ExperimentReport rep;
  rep.kind = "metric";
  rep.config = cfg;
  rep.rows.resize(static_cast<std::size_t>(cfg.count));
  parallel_for(cfg.count, cfg.threads, [&](int id) {
    ExperimentRow& row = rep.rows[static_cast<std::size_t>(id)];
    row.instance_id = id;
    row.n = cfg.rank;
    row.seed = instance_seed(cfg, id);
    row.moves = instance_moves(cfg, id);
    try {
      InstancePair p = make_instance(cfg.rank, row.seed, row.moves, cfg.epsilon);
      row.d_ab = distance(p.a, p.b);
      row.d_ba = distance(p.b, p.a);
      IntersectionResult r = intersection_number(p.a, p.b, cfg.cert_length);
      row.i_ab = r.i;
      row.stable = r.stable;
      row.log_i = r.i > 0 ? std::log(static_cast<double>(r.i)) : 0.0;
      row.systole_min = std::min(to_double(systole(p.a)), to_double(systole(p.b)));
      row.thin = row.systole_min < cfg.epsilon;
    } catch (const std::exception& e) {
      row.stable = false;
      row.failures.push_back(std::string("error: ") + e.what());
      row.checks["no_errors"] = false;
    }
  });
  stability(rep);
  rep.assertions.push_back(make_assertion("no_errors", rep.rows));

  // Thick stable rows only; both directions of the asymmetric metric.
  std::vector<double> li;
  std::vector<double> dd;
  std::vector<double> lam;
  std::vector<double> ii;
  for (const auto& r : rep.rows) {
    if (!r.stable || r.thin) continue;
    for (double d : {r.d_ab, r.d_ba}) {
      li.push_back(r.log_i);
      dd.push_back(d);
      lam.push_back(std::exp(d));
      ii.push_back(static_cast<double>(r.i_ab));
    }
  }
  FitResult sw = fit_sandwich(li, dd);
  sw.name = "metric_sandwich";
  sw.parameter_names = {"K_prime", "L_prime", "slope", "intercept"};
  rep.fits.push_back(sw);
  int violations = 0;
  for (std::size_t k = 0; k < li.size(); ++k) {
    const double kp = sw.parameters[0];
    const double lp = sw.parameters[1];
    if (dd[k] > kp * li[k] + lp + kTol || li[k] / kp - lp > dd[k] + kTol) ++violations;
  }
  rep.assertions.push_back({"metric_sandwich", sw.finite && violations == 0 && !li.empty(),
                            std::to_string(li.size()) + " points, " + std::to_string(violations) + " violations"});

  // i <= C Lambda^C, fitted on log i against d = log Lambda.
  FitResult pw;
  pw.name = "intersection_upper";
  pw.parameter_names = {"C", "slope", "intercept"};
  LineFit lf = fit_line(dd, li);
  const double c = least_power_constant(dd, li);
  pw.parameters = {c, lf.slope, lf.intercept};
  pw.residual = lf.residual;
  pw.used = lf.used;
  pw.finite = std::isfinite(c);
  rep.fits.push_back(pw);

  // Lambda / A - B <= i, fitted on i against Lambda.
  FitResult lo;
  lo.name = "intersection_lower";
  lo.parameter_names = {"A", "B", "slope", "intercept"};
  LineFit lf2 = fit_line(lam, ii);
  const double a = lf2.slope > 0 ? 1.0 / lf2.slope : 1.0;
  double b = 0;
  for (std::size_t k = 0; k < lam.size(); ++k) b = std::max(b, lam[k] / a - ii[k]);
  lo.parameters = {a, b, lf2.slope, lf2.intercept};
  lo.residual = lf2.residual;
  lo.used = lf2.used;
  lo.finite = std::isfinite(a) && std::isfinite(b);
  rep.fits.push_back(lo);
  return rep;
}

ExperimentReport run_combing_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ExperimentReport rep;
  rep.kind = "combing";
  rep.config = cfg;
  rep.rows.resize(static_cast<std::size_t>(cfg.count));
  const long base = (2L * cfg.rank - 2) + (2L * cfg.rank - 3) * (2L * cfg.rank - 3);
  const int c0 = 3 * cfg.rank - 3;
  parallel_for(cfg.count, cfg.threads, [&](int id) {
    ExperimentRow& row = rep.rows[static_cast<std::size_t>(id)];
    row.instance_id = id;
    row.n = cfg.rank;
    row.seed = instance_seed(cfg, id);
    row.moves = instance_moves(cfg, id);
    auto& ck = row.checks;
    try {
      InstancePair p = make_instance(cfg.rank, row.seed, row.moves, cfg.epsilon);
      IntersectionResult r = intersection_number(p.a, p.b, cfg.cert_length);
      row.i_ab = r.i;
      row.stable = r.stable;
      row.log_i = r.i > 0 ? std::log(static_cast<double>(r.i)) : 0.0;
      row.d_ab = distance(p.a, p.b);
      row.d_ba = distance(p.b, p.a);
      CombingTrace t = combing_path(p.b, p.a);
      row.N = t.N();
      row.l_gamma = t.l_gamma;
      row.terminated = t.terminated;
      row.systole_min = std::numeric_limits<double>::infinity();
      for (const auto& v : t.vertices) {
        row.systole_min = std::min(row.systole_min, to_double(v.systole));
        row.max_step = std::max(row.max_step, v.d_next);
      }
      row.thin = row.systole_min < cfg.epsilon;
      for (const auto& s : t.steps) row.exceptional += s.exceptional ? 1 : 0;
      ck["termination"] = t.terminated;
      ck["bridge"] = t.vertices.back().circles == r.i;
      ck["d_le_l_gamma"] = row.d_ab <= row.l_gamma + kTol;
      ck["intersection_upper"] = row.log_i <= row.N * std::log(static_cast<double>(base)) + kTol;
      if (cfg.check_facts && t.terminated) {
        FactReport f = verify_facts(t, p.a, true);
        ck["integrity"] = f.integrity;
        ck["strict_decrease"] = f.strict_decrease;
        ck["exceptional_budget"] = f.fact2 && f.exceptional_steps <= c0;
        ck["fact1"] = f.fact1;
        ck["fact3"] = f.fact3;
        ck["fact4"] = f.fact4;
        ck["lemma33"] = f.lemma33;
        ck["lemma34"] = f.lemma34;
        row.fitted_c3 = f.lemma34_fitted_c3;
        row.subdivided_weight = f.lemma36_min_weight;
        row.failures = f.failures;
      }
    } catch (const std::exception& e) {
      row.terminated = false;
      ck["no_errors"] = false;
      row.failures.push_back(std::string("error: ") + e.what());
    }
  });
  stability(rep);
  for (const char* name : {"no_errors", "termination", "bridge", "d_le_l_gamma", "intersection_upper", "integrity",
                           "strict_decrease", "exceptional_budget", "fact1", "fact3", "fact4", "lemma33", "lemma34"}) {
    rep.assertions.push_back(make_assertion(name, rep.rows));
  }

  // Exponential growth of i in N over thick stable runs with N >= 3.
  FitResult growth;
  growth.name = "growth";
  growth.parameter_names = {"C1", "C2"};
  double c1 = std::numeric_limits<double>::infinity();
  double c2 = 0;
  for (const auto& r : rep.rows) {
    if (r.thin || !r.stable || r.N < 3 || !r.terminated) continue;
    const double root = std::pow(static_cast<double>(r.i_ab), 1.0 / r.N);
    c1 = std::min(c1, root);
    c2 = std::max(c2, root);
    ++growth.used;
  }
  growth.parameters = {c1, c2};
  growth.finite = growth.used > 0;
  rep.fits.push_back(growth);
  rep.assertions.push_back({"growth_c1", growth.used > 0 && c1 > 1,
                            growth.used ? "C1 = " + std::to_string(c1) + " over " + std::to_string(growth.used) + " runs"
                                        : "no thick run with N >= 3"});

  // l(gamma)/K - L <= d(A,B) from the least-squares line of d against l(gamma).
  std::vector<double> lg;
  std::vector<double> dd;
  double k0 = 0;
  double c3 = 0;
  double w36 = std::numeric_limits<double>::infinity();
  for (const auto& r : rep.rows) {
    if (r.thin || !r.terminated) continue;
    lg.push_back(r.l_gamma);
    dd.push_back(r.d_ab);
    k0 = std::max(k0, r.max_step);
    c3 = std::max(c3, r.fitted_c3);
    if (r.subdivided_weight > 0) w36 = std::min(w36, r.subdivided_weight);
  }
  LineFit lf = fit_line(lg, dd);
  FitResult thm;
  thm.name = "path_length";
  thm.parameter_names = {"K", "L", "slope", "intercept"};
  const double k = lf.slope > 0 ? 1.0 / lf.slope : std::numeric_limits<double>::infinity();
  double l = 0;
  for (std::size_t j = 0; j < lg.size(); ++j) l = std::max(l, lg[j] / k - dd[j]);
  thm.parameters = {k, l, lf.slope, lf.intercept};
  thm.residual = lf.residual;
  thm.used = lf.used;
  thm.finite = std::isfinite(k) && std::isfinite(l);
  rep.fits.push_back(thm);
  rep.assertions.push_back({"path_length_fit", lf.used >= 2 && lf.slope > 0 && std::isfinite(lf.intercept),
                            "slope " + std::to_string(lf.slope) + ", intercept " + std::to_string(lf.intercept)});

  rep.fits.push_back({"star_diameter", {"K0"}, {k0}, 0, lg.size(), true});
  rep.fits.push_back({"label_drop", {"C3", "C0"}, {c3, static_cast<double>(c0)}, 0, lg.size(), std::isfinite(c3)});
  const bool any36 = std::isfinite(w36);
  rep.fits.push_back({"subdivided_weight", {"C4", "C5", "min_weight"},
                      {1.0, any36 ? cfg.epsilon / w36 : 0.0, any36 ? w36 : 0.0}, 0, lg.size(), any36});
  return rep;
}

}  // namespace oslab
