#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "oslab/lipschitz.hpp"
#include "oslab/sphere.hpp"

namespace oslab {

namespace {

TraceVertex make_vertex(const SphereSystem& s, MarkedGraph g, const MarkedGraph& a, bool compute_core, bool even) {
  TraceVertex v;
  v.system = s;
  v.graph = std::move(g);
  v.circles = static_cast<long>(s.circles());
  v.systole = systole(v.graph);
  v.violations = validate(v.graph);
  v.even = even;
  if (compute_core) {
    IntersectionResult r = intersection_number(v.graph, a);
    v.core_i = r.i;
    v.core_stable = r.stable;
  } else {
    v.core_i = v.circles;
  }
  return v;
}

std::size_t budget_from_env(std::size_t fallback) {
  if (const char* env = std::getenv("OSLAB_STEP_BUDGET")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return fallback;
}

}  // namespace

int theta(const std::vector<int>& xs) {
  if (xs.empty()) throw std::invalid_argument("theta of an empty tuple");
  const bool equal = std::all_of(xs.begin(), xs.end(), [&](int x) { return x == xs.front(); });
  if (xs.size() > 1 && equal) return xs.front() + 1;
  return *std::max_element(xs.begin(), xs.end());
}

long long u_sequence(int k) { return k <= 0 ? 0 : 1LL << (k - 1); }

CombingTrace combing_path(const MarkedGraph& b, const MarkedGraph& a, const CombingOptions& opt) {
  SphereContext ctx(a);
  CombingTrace trace;
  SphereSystem s = init_normal_form(b, a);
  trace.budget = opt.step_budget ? opt.step_budget : budget_from_env(s.circles() + 10);
  // Built from B toward A, reversed at the end.
  std::vector<TraceVertex> seq;
  seq.push_back(make_vertex(s, normalize_volume(b), a, opt.compute_core, true));
  while (s.circles() > 0) {
    if (trace.steps.size() >= trace.budget) {
      trace.terminated = false;
      break;
    }
    DoubleStep step;
    auto [odd, even] = double_surgery_step(ctx, s, step);
    seq.push_back(make_vertex(odd, vertex_point(odd, a), a, opt.compute_core, false));
    seq.back().exceptional = step.exceptional;
    trace.steps.push_back(std::move(step));
    if (!even) {
      s = odd;
      break;
    }
    s = *even;
    seq.push_back(make_vertex(s, vertex_point(s, a), a, opt.compute_core, true));
    seq.back().exceptional = trace.steps.back().exceptional;
  }
  if (trace.terminated) {
    SphereSystem home = init_normal_form(a, a);
    if (!same_system(ctx, s, home)) seq.push_back(make_vertex(home, normalize_volume(a), a, opt.compute_core, true));
    else seq.back().graph = normalize_volume(a);
  }
  std::reverse(seq.begin(), seq.end());
  trace.vertices = std::move(seq);
  for (std::size_t k = 0; k + 1 < trace.vertices.size(); ++k) {
    trace.vertices[k].d_next = distance(trace.vertices[k].graph, trace.vertices[k + 1].graph);
    trace.l_gamma += trace.vertices[k].d_next;
  }
  trace.d_ab = distance(a, b);
  return trace;
}

std::vector<Window> annotate_trace(const CombingTrace& t) {
  std::vector<Window> out;
  const int steps = static_cast<int>(t.steps.size());
  // Even vertex before step p lies at index N - 2p (vertices are stored from A).
  const int n = t.N();
  auto even_system = [&](int p) -> const SphereSystem& { return t.vertices[static_cast<std::size_t>(n - 2 * p)].system; };
  int p = 0;
  while (p < steps) {
    if (t.steps[static_cast<std::size_t>(p)].exceptional || t.steps[static_cast<std::size_t>(p)].half) {
      ++p;
      continue;
    }
    int q = p;
    while (q + 1 < steps && !t.steps[static_cast<std::size_t>(q + 1)].exceptional && !t.steps[static_cast<std::size_t>(q + 1)].half) ++q;
    Window w;
    w.first_step = p;
    w.last_step = q;
    const int m = q - p + 1;
    w.labels.resize(static_cast<std::size_t>(m + 1));
    w.labels[static_cast<std::size_t>(m)].assign(even_system(q + 1).spheres.size(), 0);
    for (int r = m - 1; r >= 0; --r) {
      const DoubleStep& st = t.steps[static_cast<std::size_t>(p + r)];
      auto& cur = w.labels[static_cast<std::size_t>(r)];
      const auto& next = w.labels[static_cast<std::size_t>(r + 1)];
      cur.assign(even_system(p + r).spheres.size(), 0);
      for (const auto& g : st.genealogy) {
        std::vector<int> xs;
        for (const auto& [c, wt] : g.children) xs.push_back(next[static_cast<std::size_t>(c)]);
        if (xs.empty()) throw std::logic_error("missing genealogy");
        int& x = cur[static_cast<std::size_t>(g.sphere)];
        if (g.case_kind == 1) x = xs.front();
        else if (g.case_kind == 2) x = xs.front() + 1;
        else x = theta(xs);
      }
    }
    for (int r = 0; r <= m; ++r) {
      double nv = 0;
      const auto& sys = even_system(p + r);
      for (std::size_t k = 0; k < sys.spheres.size(); ++k) nv += to_double(sys.spheres[k].weight) * w.labels[static_cast<std::size_t>(r)][k];
      w.n_values.push_back(nv);
    }
    out.push_back(std::move(w));
    p = q + 1;
  }
  return out;
}

FactReport verify_facts(const CombingTrace& t, const MarkedGraph& a, bool rerun_suffix) {
  FactReport rep;
  const int n = t.N();
  const int rank = a.rank();
  rep.c0 = 3 * rank - 3;
  auto fail = [&](bool& flag, const std::string& what) {
    flag = false;
    rep.failures.push_back(what);
  };
  SphereContext ctx(a);

  // Integrity of every vertex.
  for (int k = 0; k <= n; ++k) {
    const TraceVertex& v = t.vertices[static_cast<std::size_t>(k)];
    std::ostringstream at;
    at << "vertex " << k;
    if (!v.violations.empty()) fail(rep.integrity, at.str() + ": invalid graph (" + v.violations.front().code + ")");
    if (v.core_i != v.circles) fail(rep.integrity, at.str() + ": circle count differs from intersection number");
    if (v.graph.edge_count() < rank || v.graph.edge_count() > 3 * rank - 3) fail(rep.integrity, at.str() + ": edge count out of range");
    if (v.system.total_weight() != 1) fail(rep.integrity, at.str() + ": weights do not sum to 1");
    if (k + 1 <= n) {
      long i = intersection_number(v.graph, t.vertices[static_cast<std::size_t>(k + 1)].graph).i;
      if (i != 0) fail(rep.integrity, at.str() + ": consecutive vertices not compatible");
    }
  }

  // Intersection with A less than doubles backward along the path.
  for (int k = 0; k < n; ++k) {
    long ik = t.vertices[static_cast<std::size_t>(k)].circles;
    long ik1 = t.vertices[static_cast<std::size_t>(k + 1)].circles;
    bool ok = ik1 > 0 ? ik < 2 * ik1 : ik == 0;
    if (!ok) fail(rep.fact3, "i(A,A_" + std::to_string(k) + ")=" + std::to_string(ik) + " vs i(A,A_" + std::to_string(k + 1) + ")=" + std::to_string(ik1));
  }

  // Circle count monotone up to C0 exceptions; strict decrease across double steps.
  int increases = 0;
  for (std::size_t p = 0; p < t.steps.size(); ++p) {
    if (t.steps[p].exceptional) ++rep.exceptional_steps;
    if (t.steps[p].half) continue;
    long before = t.vertices[static_cast<std::size_t>(n - 2 * static_cast<int>(p))].circles;
    long after = t.vertices[static_cast<std::size_t>(n - 2 * static_cast<int>(p) - 2)].circles;
    if (after > before) ++increases;
    if (after >= before) fail(rep.strict_decrease, "step " + std::to_string(p) + ": circles " + std::to_string(before) + " -> " + std::to_string(after));
  }
  if (increases > rep.c0) fail(rep.fact2, "circle count increased in " + std::to_string(increases) + " steps");
  if (rep.exceptional_steps > rep.c0) fail(rep.fact2, std::to_string(rep.exceptional_steps) + " exceptional steps");

  // One-component surgeries at least halve the circles.
  for (std::size_t p = 0; p < t.steps.size(); ++p) {
    if (t.steps[p].half) continue;
    const auto& before = t.vertices[static_cast<std::size_t>(n - 2 * static_cast<int>(p))].system;
    const auto& after = t.vertices[static_cast<std::size_t>(n - 2 * static_cast<int>(p) - 2)].system;
    for (const auto& g : t.steps[p].genealogy) {
      if (g.case_kind != 2) continue;
      std::size_t c0 = before.spheres[static_cast<std::size_t>(g.sphere)].p.circles();
      std::size_t c1 = after.spheres[static_cast<std::size_t>(g.children.front().first)].p.circles();
      if (c0 < 2 * c1) fail(rep.fact4, "step " + std::to_string(p) + " sphere " + std::to_string(g.sphere) + ": " + std::to_string(c0) + " < 2*" + std::to_string(c1));
    }
  }

  // Label lower bounds and label drops over windows; largest subdivided weight over all full steps.
  rep.windows = annotate_trace(t);
  for (const auto& w : rep.windows) {
    const int m = w.last_step - w.first_step + 1;
    for (int r = 0; r <= m; ++r) {
      const auto& sys = t.vertices[static_cast<std::size_t>(n - 2 * (w.first_step + r))].system;
      for (std::size_t q = 0; q < sys.spheres.size(); ++q) {
        auto c = static_cast<long long>(sys.spheres[q].p.circles());
        if (c < u_sequence(w.labels[static_cast<std::size_t>(r)][q])) {
          fail(rep.lemma33, "step " + std::to_string(w.first_step + r) + " sphere " + std::to_string(q));
        }
      }
    }
    for (int r = 0; r < m; ++r) {
      const DoubleStep& st = t.steps[static_cast<std::size_t>(w.first_step + r)];
      const auto& sys = t.vertices[static_cast<std::size_t>(n - 2 * (w.first_step + r))].system;
      double max_w = 0;
      for (const auto& g : st.genealogy) {
        if (g.case_kind != 1) max_w = std::max(max_w, to_double(sys.spheres[static_cast<std::size_t>(g.sphere)].weight));
      }
      double drop = w.n_values[static_cast<std::size_t>(r)] - w.n_values[static_cast<std::size_t>(r + 1)];
      if (max_w > 0) {
        rep.lemma34_fitted_c3 = drop > 0 ? std::max(rep.lemma34_fitted_c3, max_w / drop) : std::numeric_limits<double>::infinity();
      }
      if (drop + 1e-12 < max_w / rep.c0) {
        fail(rep.lemma34, "step " + std::to_string(w.first_step + r) + ": N drop " + std::to_string(drop) + " < " + std::to_string(max_w / rep.c0));
      }
    }
  }
  rep.lemma36_min_weight = 1.0;
  bool any = false;
  for (std::size_t p = 0; p < t.steps.size(); ++p) {
    const auto& sys = t.vertices[static_cast<std::size_t>(n - 2 * static_cast<int>(p))].system;
    double max_w = 0;
    for (const auto& g : t.steps[p].genealogy) {
      if (g.case_kind != 1) max_w = std::max(max_w, to_double(sys.spheres[static_cast<std::size_t>(g.sphere)].weight));
    }
    if (max_w > 0) {
      rep.lemma36_min_weight = std::min(rep.lemma36_min_weight, max_w);
      any = true;
    }
  }
  if (!any) rep.lemma36_min_weight = 0;

  // Suffix property: combing again from every even vertex reproduces the tail.
  if (rerun_suffix && t.terminated) {
    for (int k = n - 2; k >= 1; k -= 2) {
      const TraceVertex& v = t.vertices[static_cast<std::size_t>(k)];
      CombingOptions opt;
      opt.compute_core = false;
      CombingTrace again = combing_path(v.graph, a, opt);
      bool ok = again.N() == k;
      for (int j = 0; ok && j <= k; ++j) {
        ok = same_system(ctx, again.vertices[static_cast<std::size_t>(j)].system, t.vertices[static_cast<std::size_t>(j)].system);
      }
      if (!ok) fail(rep.fact1, "re-run from A_" + std::to_string(k) + " diverges");
    }
  }
  return rep;
}

}  // namespace oslab
