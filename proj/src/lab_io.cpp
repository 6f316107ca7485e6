#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "oslab/lab.hpp"

namespace oslab {

using nlohmann::json;

namespace {

std::string num(double x) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

json num_json(double x) {
  if (std::isfinite(x)) return x;
  return num(x);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

const char* kind_name(ElementaryAutomorphism::Kind k) {
  switch (k) {
    case ElementaryAutomorphism::Kind::Transposition: return "swap";
    case ElementaryAutomorphism::Kind::Inversion: return "inv";
    case ElementaryAutomorphism::Kind::RightMultiply: return "right";
    case ElementaryAutomorphism::Kind::LeftMultiply: return "left";
  }
  return "";
}

ElementaryAutomorphism::Kind kind_from(const std::string& s) {
  if (s == "swap") return ElementaryAutomorphism::Kind::Transposition;
  if (s == "inv") return ElementaryAutomorphism::Kind::Inversion;
  if (s == "right") return ElementaryAutomorphism::Kind::RightMultiply;
  if (s == "left") return ElementaryAutomorphism::Kind::LeftMultiply;
  throw std::invalid_argument("unknown move kind: " + s);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path);
}

json fit_json(const FitResult& f) {
  json p = json::object();
  for (std::size_t k = 0; k < f.parameters.size(); ++k) p[f.parameter_names.at(k)] = num_json(f.parameters[k]);
  return {{"parameters", p}, {"residual", num_json(f.residual)}, {"used", f.used}, {"finite", f.finite}};
}

json word_json(const Word& w) { return w.letters(); }

}  // namespace

std::string report_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "instance_id,n,seed,N,l_gamma,d_ab,d_ba,i_ab,log_i,systole_min,exceptional\n";
  for (const auto& row : r.rows) {
    os << row.instance_id << ',' << row.n << ',' << row.seed << ',';
    if (row.N >= 0) os << row.N;
    os << ',';
    if (row.N >= 0) os << num(row.l_gamma);
    os << ',' << num(row.d_ab) << ',' << num(row.d_ba) << ',' << row.i_ab << ',' << num(row.log_i) << ','
       << num(row.systole_min) << ',' << row.exceptional << '\n';
  }
  return os.str();
}

json report_json(const ExperimentReport& r) {
  const ExperimentConfig& c = r.config;
  json out;
  out["kind"] = r.kind;
  out["config"] = {{"rank", c.rank},          {"epsilon", c.epsilon},     {"seed", c.seed},
                   {"count", c.count},        {"move_min", c.move_min},   {"move_max", c.move_max},
                   {"cert_length", c.cert_length}, {"check_facts", c.check_facts}};
  out["stable_fraction"] = r.stable_fraction;
  out["aborted"] = r.aborted;
  out["all_passed"] = r.all_passed();
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j = {{"instance_id", row.instance_id}, {"n", row.n},
              {"seed", row.seed},               {"moves", row.moves},
              {"d_ab", num_json(row.d_ab)},     {"d_ba", num_json(row.d_ba)},
              {"i_ab", row.i_ab},               {"log_i", num_json(row.log_i)},
              {"systole_min", num_json(row.systole_min)}, {"exceptional", row.exceptional},
              {"stable", row.stable},           {"thin", row.thin},
              {"failures", row.failures},       {"checks", row.checks}};
    if (row.N >= 0) {
      j["N"] = row.N;
      j["l_gamma"] = num_json(row.l_gamma);
      j["terminated"] = row.terminated;
      j["max_step"] = num_json(row.max_step);
      j["fitted_c3"] = num_json(row.fitted_c3);
      j["subdivided_weight"] = num_json(row.subdivided_weight);
    }
    rows.push_back(std::move(j));
  }
  out["rows"] = std::move(rows);
  json fits = json::object();
  for (const auto& f : r.fits) fits[f.name] = fit_json(f);
  out["fits"] = std::move(fits);
  json as = json::array();
  for (const auto& a : r.assertions) as.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
  out["assertions"] = std::move(as);
  return out;
}

PlotRange plot_range(const std::vector<double>& x, const std::vector<double>& y) {
  auto span = [](const std::vector<double>& v, double& lo, double& hi) {
    lo = 0;
    hi = 1;
    bool first = true;
    for (double d : v) {
      if (!std::isfinite(d)) continue;
      if (first || d < lo) lo = d;
      if (first || d > hi) hi = d;
      first = false;
    }
    if (first) return;
    const double w = hi - lo;
    if (w > 0) {
      lo -= 0.05 * w;
      hi += 0.05 * w;
    } else {
      lo -= 0.5;
      hi += 0.5;
    }
  };
  PlotRange r;
  span(x, r.x0, r.x1);
  span(y, r.y0, r.y1);
  return r;
}

std::string svg_scatter(const std::vector<double>& x, const std::vector<double>& y, const std::string& x_label,
                        const std::string& y_label) {
  const double w = 640;
  const double h = 480;
  const double m = 60;
  const PlotRange r = plot_range(x, y);
  auto px = [&](double v) { return m + (v - r.x0) / (r.x1 - r.x0) * (w - 2 * m); };
  auto py = [&](double v) { return h - m - (v - r.y0) / (r.y1 - r.y0) * (h - 2 * m); };
  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << m << "\" y=\"" << h - m + 16 << "\" font-size=\"11\">" << num(r.x0) << "</text>\n";
  os << "<text x=\"" << w - m << "\" y=\"" << h - m + 16 << "\" font-size=\"11\" text-anchor=\"end\">" << num(r.x1) << "</text>\n";
  os << "<text x=\"" << m - 4 << "\" y=\"" << h - m << "\" font-size=\"11\" text-anchor=\"end\">" << num(r.y0) << "</text>\n";
  os << "<text x=\"" << m - 4 << "\" y=\"" << m + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << num(r.y1) << "</text>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 16 << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << h / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << h / 2
     << ")\">" << escape(y_label) << "</text>\n";
  for (std::size_t k = 0; k < x.size() && k < y.size(); ++k) {
    if (!std::isfinite(x[k]) || !std::isfinite(y[k])) continue;
    os << "<circle cx=\"" << px(x[k]) << "\" cy=\"" << py(y[k]) << "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::string> emit_report(const ExperimentReport& r, const std::string& prefix, const std::string& format) {
  std::vector<std::string> written;
  const bool all = format.empty() || format == "all";
  if (all || format == "csv") {
    write_file(prefix + ".csv", report_csv(r));
    written.push_back(prefix + ".csv");
  }
  if (all || format == "json") {
    write_file(prefix + ".json", report_json(r).dump(2) + "\n");
    written.push_back(prefix + ".json");
  }
  if (all || format == "svg") {
    std::vector<double> d;
    std::vector<double> li;
    std::vector<double> n;
    std::vector<double> lg;
    for (const auto& row : r.rows) {
      d.push_back(row.d_ab);
      li.push_back(row.log_i);
      n.push_back(row.N);
      lg.push_back(row.l_gamma);
    }
    write_file(prefix + "_d_vs_log_i.svg", svg_scatter(li, d, "log i(A,B)", "d(A,B)"));
    written.push_back(prefix + "_d_vs_log_i.svg");
    if (r.kind == "combing") {
      write_file(prefix + "_log_i_vs_N.svg", svg_scatter(n, li, "N", "log i(A,B)"));
      write_file(prefix + "_d_vs_l_gamma.svg", svg_scatter(lg, d, "l(gamma)", "d(A,B)"));
      written.push_back(prefix + "_log_i_vs_N.svg");
      written.push_back(prefix + "_d_vs_l_gamma.svg");
    }
  }
  if (written.empty()) throw std::invalid_argument("unknown format: " + format);
  return written;
}

json graph_to_json(const MarkedGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"length", to_string(e.length)}, {"tree", e.tree}, {"word", word_json(e.word)}});
  }
  json prov = json::array();
  for (const auto& m : g.marking().provenance()) prov.push_back({{"kind", kind_name(m.kind)}, {"i", m.i}, {"j", m.j}, {"sign", m.sign}});
  return {{"rank", g.rank()}, {"vertices", g.vertex_count()}, {"basepoint", g.basepoint()}, {"edges", edges}, {"provenance", prov}};
}

MarkedGraph graph_from_json(const json& j) {
  const int rank = j.at("rank").get<int>();
  std::vector<GraphEdge> edges;
  std::vector<Word> words;
  for (const auto& e : j.at("edges")) {
    GraphEdge ge;
    ge.src = e.at("src").get<int>();
    ge.dst = e.at("dst").get<int>();
    ge.length = parse_rational(e.at("length").get<std::string>());
    ge.tree = e.at("tree").get<bool>();
    ge.word = Word(e.value("word", std::vector<Letter>{}));
    if (!ge.tree) words.push_back(ge.word);
    edges.push_back(std::move(ge));
  }
  std::optional<BasisTuple> marking;
  if (j.contains("provenance")) {
    std::vector<ElementaryAutomorphism> prov;
    for (const auto& m : j.at("provenance")) {
      ElementaryAutomorphism move;
      move.kind = kind_from(m.at("kind").get<std::string>());
      move.i = m.at("i").get<int>();
      move.j = m.at("j").get<int>();
      move.sign = m.at("sign").get<int>();
      if (!move.valid(rank)) throw std::invalid_argument("invalid move in provenance");
      prov.push_back(move);
    }
    marking = BasisTuple(rank, std::move(prov));
    if (marking->elements() != words) throw std::invalid_argument("provenance does not match the edge words");
  } else {
    marking = BasisTuple::from_elements(rank, words);
    if (!marking) throw std::invalid_argument("edge words do not form a basis");
  }
  return MarkedGraph(rank, j.at("vertices").get<int>(), std::move(edges), j.value("basepoint", 0), *marking);
}

json trace_to_json(const CombingTrace& t, const FactReport* facts) {
  json out;
  out["N"] = t.N();
  out["terminated"] = t.terminated;
  out["budget"] = t.budget;
  out["l_gamma"] = num_json(t.l_gamma);
  out["d_ab"] = num_json(t.d_ab);
  json vs = json::array();
  for (std::size_t k = 0; k < t.vertices.size(); ++k) {
    const TraceVertex& v = t.vertices[k];
    vs.push_back({{"k", k},
                  {"i", v.circles},
                  {"core_i", v.core_i},
                  {"core_stable", v.core_stable},
                  {"d_next", num_json(v.d_next)},
                  {"systole", to_string(v.systole)},
                  {"exceptional", v.exceptional},
                  {"even", v.even},
                  {"spheres", v.system.spheres.size()},
                  {"graph", graph_to_json(v.graph)}});
  }
  out["vertices"] = std::move(vs);
  auto pass_json = [](const PassRecord& p) {
    json moves = json::array();
    for (const auto& m : p.moves) moves.push_back({{"sphere", m.sphere}, {"edge", m.circle.edge}, {"h", word_json(m.circle.h)}, {"side", m.side}});
    return json{{"moves", moves}, {"trivial_spheres", p.trivial_spheres}, {"mixed_side_spheres", p.mixed_side_spheres}, {"lone_circles", p.lone_circles}};
  };
  json steps = json::array();
  for (const auto& s : t.steps) {
    json gen = json::array();
    for (const auto& g : s.genealogy) {
      json ch = json::array();
      for (const auto& [c, w] : g.children) ch.push_back({c, to_string(w)});
      gen.push_back({{"sphere", g.sphere}, {"case", g.case_kind}, {"children", ch}});
    }
    steps.push_back({{"first", pass_json(s.first)},
                     {"second", pass_json(s.second)},
                     {"single_circle", s.single_circle},
                     {"exact_double", s.exact_double},
                     {"exceptional", s.exceptional},
                     {"half", s.half},
                     {"genealogy", gen}});
  }
  out["steps"] = std::move(steps);
  json windows = json::array();
  for (const auto& w : annotate_trace(t)) {
    json nv = json::array();
    for (double x : w.n_values) nv.push_back(num_json(x));
    windows.push_back({{"first_step", w.first_step}, {"last_step", w.last_step}, {"labels", w.labels}, {"n_values", nv}});
  }
  out["windows"] = std::move(windows);
  if (facts) {
    out["facts"] = {{"fact1", facts->fact1},
                    {"fact2", facts->fact2},
                    {"fact3", facts->fact3},
                    {"fact4", facts->fact4},
                    {"lemma33", facts->lemma33},
                    {"lemma34", facts->lemma34},
                    {"lemma34_fitted_c3", num_json(facts->lemma34_fitted_c3)},
                    {"integrity", facts->integrity},
                    {"strict_decrease", facts->strict_decrease},
                    {"exceptional_steps", facts->exceptional_steps},
                    {"c0", facts->c0},
                    {"lemma36_min_weight", num_json(facts->lemma36_min_weight)},
                    {"failures", facts->failures}};
  }
  return out;
}

}  // namespace oslab
