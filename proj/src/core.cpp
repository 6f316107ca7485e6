#include "oslab/core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "oslab/lipschitz.hpp"

namespace oslab {

namespace {

std::size_t half_edge_code(OrientedEdge o) {
  return is_forward(o) ? 2 * static_cast<std::size_t>(o - 1) : 2 * static_cast<std::size_t>(-o - 1) + 1;
}

// Shortest cyclically reduced closed path starting with o.
std::vector<OrientedEdge> shortest_return_loop(const MarkedGraph& g, const CoverTree& t, OrientedEdge o) {
  const int home = g.start_of(o);
  std::map<OrientedEdge, OrientedEdge> parent;
  std::deque<OrientedEdge> queue{o};
  parent[o] = 0;
  while (!queue.empty()) {
    OrientedEdge last = queue.front();
    queue.pop_front();
    if (g.end_of(last) == home && last != -o) {
      std::vector<OrientedEdge> path;
      for (OrientedEdge c = last; c != 0; c = parent[c]) path.push_back(c);
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (auto next : t.half_edges(g.end_of(last))) {
      if (next == -last || parent.count(next)) continue;
      parent[next] = last;
      queue.push_back(next);
    }
  }
  throw std::logic_error("no cyclically reduced loop through a half-edge");
}

}  // namespace

int side_of_edge(const CoverTree& t, const TreeEdge& e, const TreeVertex& v) {
  TreeVertex s = t.src(e);
  auto p = t.path(s, v);
  return (!p.empty() && t.lift(s, p[0]) == e) ? 1 : -1;
}

bool attracting_end_in(const CoverTree& t, const Word& g, const Direction& d) {
  AxisData a = t.axis_data(g);
  std::size_t dist = t.distance(a.point, t.src(d.edge));
  auto k = static_cast<int>(dist / a.translation_length + 2);
  TreeVertex far = t.act(g.power(k), a.point);
  return side_of_edge(t, d.edge, far) == d.side;
}

CoreContext::CoreContext(const MarkedGraph& g1, const MarkedGraph& g2) : t1_(g1), t2_(g2) {
  if (g1.rank() != g2.rank()) throw std::invalid_argument("rank mismatch");
  for (int j = 1; j <= g2.rank(); ++j) chi_images_.push_back(g1.to_loops(g2.to_free(Word({j}))));
  for (int j = 1; j <= g1.rank(); ++j) chi_inverse_images_.push_back(g2.to_loops(g1.to_free(Word({j}))));
  return_loops_.resize(2 * static_cast<std::size_t>(g2.edge_count()));
  return_loop_lengths_.resize(return_loops_.size());
  for (int e = 0; e < g2.edge_count(); ++e) {
    for (OrientedEdge o : {forward(e), backward(e)}) {
      auto loop = shortest_return_loop(g2, t2_, o);
      return_loops_[half_edge_code(o)] = g2.path_letters(loop);
    }
  }
}

Word CoreContext::chi(const Word& w2) const { return substitute(w2, chi_images_); }
Word CoreContext::chi_inverse(const Word& w1) const { return substitute(w1, chi_inverse_images_); }

int CoreContext::side_of(int e1, const TreeVertex& v1) const { return side_of_edge(t1_, {Word(), e1}, v1); }

Word CoreContext::exit_certificate(const EdgeSplitting& s, const Exit& x) const {
  const Word& hw = s.vertices[static_cast<std::size_t>(x.vertex)].h;
  const Word& lambda = return_loops_[half_edge_code(x.o)];
  return g2().to_free(hw * lambda * hw.inverse());
}

EdgeSplitting CoreContext::split(int e1) const {
  EdgeSplitting s;
  s.fixed_edge = e1;
  const MarkedGraph& a = g1();
  const MarkedGraph& b = g2();
  std::vector<TreeEdge> pre;
  for (int j = 1; j <= b.rank(); ++j) {
    int e = b.loop_edge(j);
    TreeVertex v = t1_.base();
    for (auto o : t1_.loop_word_path(chi_images_[static_cast<std::size_t>(j - 1)])) {
      if (edge_of(o) == e1) {
        TreeEdge k = t1_.lift(v, o);
        pre.push_back({chi_inverse(k.h.inverse()), e});
      }
      v = t1_.step(v, o);
    }
  }
  if (pre.empty()) throw std::logic_error("edge has empty preimage");

  auto add_vertex = [&](const TreeVertex& v) {
    auto [it, fresh] = s.vertex_index.emplace(v, static_cast<int>(s.vertices.size()));
    if (fresh) s.vertices.push_back(v);
    return it->second;
  };
  auto add_edge = [&](const TreeEdge& e, bool is_pre) {
    auto it = s.edge_index.find(e);
    if (it != s.edge_index.end()) {
      if (is_pre) s.preimage[static_cast<std::size_t>(it->second)] = true;
      return;
    }
    int a0 = add_vertex(t2_.src(e));
    int a1 = add_vertex(t2_.dst(e));
    s.edge_index.emplace(e, static_cast<int>(s.edges.size()));
    s.edges.push_back(e);
    s.ends.push_back({a0, a1});
    s.preimage.push_back(is_pre);
  };
  const TreeVertex root = t2_.src(pre.front());
  add_vertex(root);
  for (const auto& e : pre) {
    TreeVertex v = root;
    for (auto o : t2_.path(root, t2_.src(e))) {
      add_edge(t2_.lift(v, o), false);
      v = t2_.step(v, o);
    }
    add_edge(e, true);
  }

  for (std::size_t vi = 0; vi < s.vertices.size(); ++vi) {
    const TreeVertex v = s.vertices[vi];
    for (auto o : t2_.half_edges(v.u)) {
      if (s.edge_index.count(t2_.lift(v, o))) continue;
      TreeVertex z = t2_.step(v, o);
      Exit x;
      x.vertex = static_cast<int>(vi);
      x.o = o;
      x.sign = side_of(e1, {chi(z.h), a.basepoint()});
      s.exits.push_back(x);
    }
  }
  for (auto& x : s.exits) x.certificate_length = exit_certificate(s, x).size();
  return s;
}

namespace {

using Counts = std::vector<std::array<std::array<int, 2>, 2>>;

// Per edge and side, the number of exits of each sign passing `keep`.
Counts side_counts(const EdgeSplitting& s, const std::function<bool(const Exit&)>& keep) {
  const std::size_t V = s.vertices.size();
  std::vector<std::array<int, 2>> own(V, {0, 0});
  for (const auto& x : s.exits) {
    if (keep(x)) ++own[static_cast<std::size_t>(x.vertex)][x.sign > 0 ? 1 : 0];
  }
  std::vector<std::vector<std::pair<int, int>>> adj(V);  // (neighbor, edge)
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    adj[static_cast<std::size_t>(s.ends[e][0])].push_back({s.ends[e][1], static_cast<int>(e)});
    adj[static_cast<std::size_t>(s.ends[e][1])].push_back({s.ends[e][0], static_cast<int>(e)});
  }
  std::vector<int> order;
  std::vector<int> parent_edge(V, -1);
  std::vector<bool> seen(V, false);
  order.push_back(0);
  seen[0] = true;
  for (std::size_t k = 0; k < order.size(); ++k) {
    int v = order[k];
    for (auto [w, e] : adj[static_cast<std::size_t>(v)]) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      parent_edge[static_cast<std::size_t>(w)] = e;
      order.push_back(w);
    }
  }
  std::vector<std::array<int, 2>> sub = own;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    int e = parent_edge[static_cast<std::size_t>(v)];
    if (e < 0) continue;
    int p = s.ends[static_cast<std::size_t>(e)][0] == v ? s.ends[static_cast<std::size_t>(e)][1]
                                                         : s.ends[static_cast<std::size_t>(e)][0];
    for (int k = 0; k < 2; ++k) sub[static_cast<std::size_t>(p)][k] += sub[static_cast<std::size_t>(v)][k];
  }
  const auto total = sub[0];
  Counts out(s.edges.size());
  for (std::size_t v = 1; v < V; ++v) {
    int e = parent_edge[v];
    const auto& child = sub[v];
    std::array<int, 2> rest{total[0] - child[0], total[1] - child[1]};
    int child_side = s.ends[static_cast<std::size_t>(e)][1] == static_cast<int>(v) ? 1 : 0;
    out[static_cast<std::size_t>(e)][child_side] = child;
    out[static_cast<std::size_t>(e)][1 - child_side] = rest;
  }
  return out;
}

bool all_positive(const std::array<std::array<int, 2>, 2>& c) {
  return c[0][0] > 0 && c[0][1] > 0 && c[1][0] > 0 && c[1][1] > 0;
}

// Exits reachable from vertex `from` without crossing edge `cut`.
std::vector<const Exit*> exits_beyond(const EdgeSplitting& s, int from, int cut) {
  std::vector<std::vector<std::pair<int, int>>> adj(s.vertices.size());
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    if (static_cast<int>(e) == cut) continue;
    adj[static_cast<std::size_t>(s.ends[e][0])].push_back({s.ends[e][1], static_cast<int>(e)});
    adj[static_cast<std::size_t>(s.ends[e][1])].push_back({s.ends[e][0], static_cast<int>(e)});
  }
  std::vector<bool> in(s.vertices.size(), false);
  std::vector<int> stack{from};
  in[static_cast<std::size_t>(from)] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (auto [w, e] : adj[static_cast<std::size_t>(v)]) {
      if (!in[static_cast<std::size_t>(w)]) {
        in[static_cast<std::size_t>(w)] = true;
        stack.push_back(w);
      }
    }
  }
  std::vector<const Exit*> out;
  for (const auto& x : s.exits) {
    if (in[static_cast<std::size_t>(x.vertex)]) out.push_back(&x);
  }
  return out;
}

const Exit* best_exit(const std::vector<const Exit*>& xs, int sign) {
  const Exit* best = nullptr;
  for (const auto* x : xs) {
    if (x->sign != sign) continue;
    if (!best || x->certificate_length < best->certificate_length) best = x;
  }
  return best;
}

}  // namespace

Slice slice(const CoreContext& ctx, int e1, std::size_t bound, bool with_certificates) {
  EdgeSplitting s = ctx.split(e1);
  Slice out;
  out.edge = e1;
  out.bounding_tree_edges = s.edges.size();
  auto all = side_counts(s, [](const Exit&) { return true; });
  std::vector<int> members;
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    if (all_positive(all[e])) {
      members.push_back(static_cast<int>(e));
      out.edges.push_back(s.edges[e]);
    }
  }
  for (int k = 0; k < 3; ++k) {
    std::size_t t = bound << k;
    auto c = side_counts(s, [t](const Exit& x) { return x.certificate_length <= t; });
    for (int e : members) out.certified[static_cast<std::size_t>(k)] += all_positive(c[static_cast<std::size_t>(e)]) ? 1 : 0;
  }
  // Connectivity of the slice as a subforest.
  if (!members.empty()) {
    std::vector<int> parent(s.vertices.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
      return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]);
    };
    for (int e : members) parent[static_cast<std::size_t>(find(s.ends[static_cast<std::size_t>(e)][0]))] = find(s.ends[static_cast<std::size_t>(e)][1]);
    int root = find(s.ends[static_cast<std::size_t>(members[0])][0]);
    for (int e : members) out.connected &= find(s.ends[static_cast<std::size_t>(e)][0]) == root;
  }
  if (with_certificates) {
    for (int e : members) {
      std::array<Word, 4> certs;
      int k = 0;
      for (int side : {0, 1}) {
        auto xs = exits_beyond(s, s.ends[static_cast<std::size_t>(e)][side], e);
        for (int sign : {-1, 1}) certs[static_cast<std::size_t>(k++)] = ctx.exit_certificate(s, *best_exit(xs, sign));
      }
      out.certificates.push_back(std::move(certs));
    }
  }
  return out;
}

std::size_t default_certificate_bound(const MarkedGraph& x, const MarkedGraph& y) {
  std::size_t m = 1;
  for (const auto* g : {&x, &y}) {
    for (const auto& w : g->marking().elements()) m = std::max(m, w.size());
  }
  return 4 * m;
}

IntersectionResult intersection_number(const MarkedGraph& x, const MarkedGraph& y, std::size_t bound,
                                       bool with_certificates) {
  if (bound == 0) bound = default_certificate_bound(x, y);
  CoreContext ctx(x, y);
  IntersectionResult out;
  out.bound = bound;
  for (int e = 0; e < x.edge_count(); ++e) {
    Slice s = slice(ctx, e, bound, with_certificates);
    out.i += static_cast<long>(s.edges.size());
    for (int k = 0; k < 3; ++k) out.certified[static_cast<std::size_t>(k)] += s.certified[static_cast<std::size_t>(k)];
    out.slices.push_back(std::move(s));
  }
  out.stable = out.certified[0] == out.i && out.certified[1] == out.i && out.certified[2] == out.i;
  return out;
}

namespace {

// Exits of the splitting lying in direction d of the second cover.
std::vector<const Exit*> exits_in(const CoreContext& ctx, const EdgeSplitting& s, const Direction& d) {
  const CoverTree& t = ctx.t2();
  auto it = s.edge_index.find(d.edge);
  if (it != s.edge_index.end()) {
    int e = it->second;
    return exits_beyond(s, s.ends[static_cast<std::size_t>(e)][d.side > 0 ? 1 : 0], e);
  }
  const TreeVertex& root = s.vertices[0];
  int root_side = side_of_edge(t, d.edge, root);
  TreeVertex far = root_side > 0 ? t.src(d.edge) : t.dst(d.edge);
  TreeVertex v = root;
  const Exit* through = nullptr;
  bool exit_is_edge = false;
  for (auto o : t.path(root, far)) {
    TreeEdge le = t.lift(v, o);
    if (!s.edge_index.count(le)) {
      int vi = s.vertex_index.at(v);
      for (const auto& x : s.exits) {
        if (x.vertex == vi && x.o == o) through = &x;
      }
      exit_is_edge = le == d.edge;
      break;
    }
    v = t.step(v, o);
  }
  if (!through) {
    // far is the last vertex before d.edge and lies in the bounding tree.
    int vi = s.vertex_index.at(far);
    for (const auto& x : s.exits) {
      if (x.vertex == vi && t.lift(far, x.o) == d.edge) through = &x;
    }
    exit_is_edge = true;
  }
  if (!through) throw std::logic_error("direction not located relative to the bounding tree");
  if (d.side != root_side) return {through};
  std::vector<const Exit*> out;
  for (const auto& x : s.exits) {
    if (exit_is_edge && &x == through) continue;
    out.push_back(&x);
  }
  return out;
}

std::pair<EdgeSplitting, Direction> normalized(const CoreContext& ctx, const Quadrant& q) {
  Word g = ctx.g1().to_free(q.d1.edge.h);
  Direction d2 = q.d2;
  d2.edge = ctx.t2().act(g.inverse(), q.d2.edge);
  return {ctx.split(q.d1.edge.edge), d2};
}

}  // namespace

HeavyVerdict is_heavy(const CoreContext& ctx, const Quadrant& q, std::size_t bound) {
  auto [s, d2] = normalized(ctx, q);
  HeavyVerdict out;
  out.bound = bound;
  const Exit* best = best_exit(exits_in(ctx, s, d2), q.d1.side);
  if (best && best->certificate_length <= bound) {
    out.heavy = true;
    // Translate the certificate back to the original quadrant.
    Word g = ctx.g1().to_free(q.d1.edge.h);
    out.certificate = g * ctx.exit_certificate(s, *best) * g.inverse();
  }
  return out;
}

bool quadrant_heavy(const CoreContext& ctx, const Quadrant& q) {
  auto [s, d2] = normalized(ctx, q);
  return best_exit(exits_in(ctx, s, d2), q.d1.side) != nullptr;
}

MetricComparison compare_metrics(const MarkedGraph& x, const MarkedGraph& y, double epsilon) {
  MetricComparison out;
  out.d_xy = distance(x, y);
  out.d_yx = distance(y, x);
  auto r = intersection_number(x, y);
  out.i = r.i;
  out.stable = r.stable;
  out.log_i = r.i > 0 ? std::log(static_cast<double>(r.i)) : 0.0;
  Rational eps = parse_rational(std::to_string(epsilon));
  out.thin = systole(x) < eps || systole(y) < eps;
  return out;
}

MarkedGraph collapse_edges(const MarkedGraph& g, const std::vector<int>& tree_edges) {
  std::vector<int> parent(static_cast<std::size_t>(g.vertex_count()));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]);
  };
  std::vector<bool> drop(static_cast<std::size_t>(g.edge_count()), false);
  for (int e : tree_edges) {
    if (!g.edge(e).tree) throw std::invalid_argument("only tree edges can be collapsed");
    drop[static_cast<std::size_t>(e)] = true;
    parent[static_cast<std::size_t>(find(g.edge(e).src))] = find(g.edge(e).dst);
  }
  std::map<int, int> id;
  for (int v = 0; v < g.vertex_count(); ++v) id.emplace(find(v), static_cast<int>(id.size()));
  std::vector<GraphEdge> edges;
  for (int e = 0; e < g.edge_count(); ++e) {
    if (drop[static_cast<std::size_t>(e)]) continue;
    GraphEdge ed = g.edge(e);
    ed.src = id.at(find(ed.src));
    ed.dst = id.at(find(ed.dst));
    ed.word = Word();
    edges.push_back(ed);
  }
  MarkedGraph out(g.rank(), static_cast<int>(id.size()), std::move(edges), id.at(find(g.basepoint())), g.marking());
  return normalize_volume(out);
}

}  // namespace oslab
