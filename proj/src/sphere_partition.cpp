#include <algorithm>
#include <stdexcept>

#include "oslab/sphere.hpp"

namespace oslab {

namespace {

void put(std::vector<int>& out, const Word& h) {
  out.push_back(static_cast<int>(h.size()));
  out.insert(out.end(), h.letters().begin(), h.letters().end());
}

std::vector<int> serialize(const EndPartition& p, int flip) {
  std::vector<int> out;
  if (p.parallel()) {
    out.push_back(-1);
    put(out, p.edge.h);
    out.push_back(p.edge.edge);
    out.push_back(p.dst_sign * flip);
    return out;
  }
  out.push_back(static_cast<int>(p.tau.size()));
  for (const auto& e : p.tau) {
    put(out, e.h);
    out.push_back(e.edge);
  }
  for (const auto& [he, sign] : p.exits) {
    put(out, he.v.h);
    out.push_back(he.v.u);
    out.push_back(he.o);
    out.push_back(sign * flip);
  }
  return out;
}

}  // namespace

SphereContext::SphereContext(const MarkedGraph& a) : a_(a), tree_(a_) {
  for (int u = 0; u < a_.vertex_count(); ++u) {
    if (a_.valence(u) != 3) throw std::invalid_argument("the fixed system must be maximal (trivalent)");
  }
}

Support SphereContext::support(const EndPartition& p) const {
  Support s;
  if (p.parallel()) {
    TreeVertex a = tree_.src(p.edge);
    TreeVertex b = tree_.dst(p.edge);
    s.vertices = {a, b};
    s.edges = {p.edge};
    for (auto o : tree_.half_edges(a.u)) {
      if (tree_.lift(a, o) != p.edge) s.exits[{a, o}] = -p.dst_sign;
    }
    for (auto o : tree_.half_edges(b.u)) {
      if (tree_.lift(b, o) != p.edge) s.exits[{b, o}] = p.dst_sign;
    }
    return s;
  }
  for (const auto& e : p.tau) {
    s.edges.insert(e);
    s.vertices.insert(tree_.src(e));
    s.vertices.insert(tree_.dst(e));
  }
  for (const auto& [he, sign] : p.exits) s.exits[he] = sign;
  return s;
}

EndPartition SphereContext::translate(const EndPartition& p, const Word& k) const {
  if (k.empty()) return p;
  EndPartition q;
  q.dst_sign = p.dst_sign;
  q.edge = {k * p.edge.h, p.edge.edge};
  for (const auto& e : p.tau) q.tau.push_back({k * e.h, e.edge});
  for (const auto& [he, sign] : p.exits) q.exits.push_back({{translate(he.v, k), he.o}, sign});
  std::sort(q.tau.begin(), q.tau.end());
  std::sort(q.exits.begin(), q.exits.end());
  return q;
}

EndPartition SphereContext::flipped(const EndPartition& p) const {
  EndPartition q = p;
  q.dst_sign = -q.dst_sign;
  for (auto& x : q.exits) x.second = -x.second;
  return q;
}

std::vector<int> SphereContext::oriented_key(const EndPartition& p) const { return serialize(p, 1); }

std::vector<int> SphereContext::key(const EndPartition& p) const {
  return std::min(serialize(p, 1), serialize(p, -1));
}

Word SphereContext::canonical_translation(const EndPartition& p) const {
  std::vector<Word> candidates;
  if (p.parallel()) {
    candidates.push_back(p.edge.h.inverse());
  } else {
    for (const auto& e : p.tau) {
      candidates.push_back(e.h.inverse());
      candidates.push_back(tree_.dst(e).h.inverse());
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  Word best;
  std::vector<int> best_key;
  bool first = true;
  for (const auto& k : candidates) {
    auto kk = key(translate(p, k));
    if (first || kk < best_key) {
      best_key = std::move(kk);
      best = k;
      first = false;
    }
  }
  return best;
}

int SphereContext::vertex_sign(const Support& s, const TreeVertex& v) const {
  if (s.vertices.count(v)) return 0;
  TreeVertex cur = *s.vertices.begin();
  for (auto o : tree_.path(cur, v)) {
    if (!s.edges.count(tree_.lift(cur, o))) {
      auto it = s.exits.find({cur, o});
      if (it == s.exits.end()) throw std::logic_error("support without a sign at an exit");
      return it->second;
    }
    cur = tree_.step(cur, o);
  }
  throw std::logic_error("vertex_sign: path stayed in the support");
}

int SphereContext::vertex_sign(const EndPartition& p, const TreeVertex& v) const {
  return vertex_sign(support(p), v);
}

int SphereContext::side_of(const EndPartition& p, const EndPartition& q) const {
  const Support sp = support(p);
  const Support sq = support(q);
  std::set<TreeVertex> w = sp.vertices;
  w.insert(sq.vertices.begin(), sq.vertices.end());
  {
    TreeVertex cur = *sp.vertices.begin();
    for (auto o : tree_.path(cur, *sq.vertices.begin())) {
      cur = tree_.step(cur, o);
      w.insert(cur);
    }
  }
  // bad[y][x]: some exit has sign y for p and sign -x for q.
  bool bad[2][2] = {{false, false}, {false, false}};
  auto idx = [](int s) { return s > 0 ? 1 : 0; };
  for (const auto& v : w) {
    const int in_p = sp.vertices.count(v) ? 1 : 0;
    const int in_q = sq.vertices.count(v) ? 1 : 0;
    const int vp = in_p ? 0 : vertex_sign(sp, v);
    const int vq = in_q ? 0 : vertex_sign(sq, v);
    for (auto o : tree_.half_edges(v.u)) {
      if (w.count(tree_.step(v, o))) continue;
      int a = in_p ? sp.exits.at({v, o}) : vp;
      int b = in_q ? sq.exits.at({v, o}) : vq;
      for (int x : {1, -1}) {
        if (b == -x) bad[idx(a)][idx(x)] = true;
      }
    }
  }
  int found = 0;
  for (int y : {1, -1}) {
    for (int x : {1, -1}) {
      if (bad[idx(y)][idx(x)]) continue;
      if (found != 0 && found != x) return 0;
      found = x;
    }
  }
  if (found == 0) throw std::logic_error("spheres intersect");
  return found;
}

std::optional<EndPartition> SphereContext::minimize(Support s) const {
  auto incident = [&](const TreeVertex& v, std::vector<OrientedEdge>* inner) {
    int deg = 0;
    for (auto o : tree_.half_edges(v.u)) {
      if (s.edges.count(tree_.lift(v, o))) {
        ++deg;
        if (inner) inner->push_back(o);
      }
    }
    return deg;
  };
  bool changed = true;
  while (changed && s.vertices.size() > 1) {
    changed = false;
    for (auto it = s.vertices.begin(); it != s.vertices.end(); ++it) {
      const TreeVertex v = *it;
      std::vector<OrientedEdge> inner;
      if (incident(v, &inner) != 1) continue;
      int sign = 0;
      bool uniform = true;
      for (auto o : tree_.half_edges(v.u)) {
        if (o == inner[0]) continue;
        int x = s.exits.at({v, o});
        if (sign == 0) sign = x;
        if (x != sign) uniform = false;
      }
      if (!uniform) continue;
      TreeEdge e = tree_.lift(v, inner[0]);
      TreeVertex w = tree_.step(v, inner[0]);
      for (auto o : tree_.half_edges(v.u)) s.exits.erase({v, o});
      s.edges.erase(e);
      s.vertices.erase(it);
      for (auto o : tree_.half_edges(w.u)) {
        if (tree_.lift(w, o) == e) s.exits[{w, o}] = sign;
      }
      changed = true;
      break;
    }
  }
  EndPartition p;
  if (s.vertices.size() == 1) {
    const TreeVertex v = *s.vertices.begin();
    auto hs = tree_.half_edges(v.u);
    int plus = 0;
    for (auto o : hs) plus += s.exits.at({v, o}) > 0 ? 1 : 0;
    if (plus == 0 || plus == static_cast<int>(hs.size())) return std::nullopt;
    if (plus != 1 && plus != static_cast<int>(hs.size()) - 1) throw std::logic_error("unclassifiable region piece");
    const int odd_sign = plus == 1 ? 1 : -1;
    for (auto o : hs) {
      if (s.exits.at({v, o}) != odd_sign) continue;
      p.edge = tree_.lift(v, o);
      p.dst_sign = is_forward(o) ? odd_sign : -odd_sign;
    }
    return p;
  }
  p.tau.assign(s.edges.begin(), s.edges.end());
  p.exits.assign(s.exits.begin(), s.exits.end());
  return p;
}

std::size_t SphereSystem::circles() const {
  std::size_t c = 0;
  for (const auto& s : spheres) c += s.p.circles();
  return c;
}

Rational SphereSystem::total_weight() const {
  Rational t = 0;
  for (const auto& s : spheres) t += s.weight;
  return t;
}

SphereSystem init_normal_form(const MarkedGraph& b, const MarkedGraph& a) {
  SphereContext ctx(a);
  CoreContext core(b, a);
  const Rational total = b.total_length();
  SphereSystem out;
  for (int e = 0; e < b.edge_count(); ++e) {
    EdgeSplitting sp = core.split(e);
    Support s;
    s.vertices.insert(sp.vertices.begin(), sp.vertices.end());
    s.edges.insert(sp.edges.begin(), sp.edges.end());
    for (const auto& x : sp.exits) s.exits[{sp.vertices[static_cast<std::size_t>(x.vertex)], x.o}] = x.sign;
    auto m = ctx.minimize(std::move(s));
    if (!m) throw std::logic_error("edge of B gives a trivial sphere");
    WeightedSphere ws;
    ws.p = ctx.translate(*m, ctx.canonical_translation(*m));
    ws.weight = b.edge(e).length / total;
    ws.origin[e] = ws.weight;
    out.spheres.push_back(std::move(ws));
  }
  return out;
}

bool same_system(const SphereContext& ctx, const SphereSystem& x, const SphereSystem& y) {
  if (x.spheres.size() != y.spheres.size()) return false;
  auto canon = [&](const SphereSystem& s) {
    std::vector<std::pair<std::vector<int>, Rational>> out;
    for (const auto& w : s.spheres) out.push_back({ctx.key(ctx.translate(w.p, ctx.canonical_translation(w.p))), w.weight});
    std::sort(out.begin(), out.end());
    return out;
  };
  return canon(x) == canon(y);
}

}  // namespace oslab
