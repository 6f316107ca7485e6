#include <array>
#include <deque>
#include <tuple>
#include <map>
#include <stdexcept>

#include "oslab/sphere.hpp"

namespace oslab {

namespace {

struct Inst {
  int s = 0;
  Word k;
  bool operator==(const Inst&) const = default;
};

}  // namespace

MarkedGraph vertex_point(const SphereSystem& sys, const MarkedGraph& a) {
  SphereContext ctx(a);
  const CoverTree& t = ctx.tree();
  const auto V = static_cast<std::size_t>(a.vertex_count());
  const auto E = static_cast<std::size_t>(a.edge_count());
  const std::size_t S = sys.spheres.size();

  std::vector<std::vector<Inst>> at_vertex(V);
  std::vector<std::vector<Inst>> on_edge(E);
  std::vector<int> blocked(E, -1);
  for (std::size_t s = 0; s < S; ++s) {
    const EndPartition& p = sys.spheres[s].p;
    if (p.parallel()) {
      auto e = static_cast<std::size_t>(p.edge.edge);
      if (blocked[e] >= 0) throw std::logic_error("two spheres parallel to the same sphere of A");
      blocked[e] = static_cast<int>(s);
      continue;
    }
    for (const auto& e : p.tau) on_edge[static_cast<std::size_t>(e.edge)].push_back({static_cast<int>(s), e.h.inverse()});
    for (const auto& v : ctx.support(p).vertices) at_vertex[static_cast<std::size_t>(v.u)].push_back({static_cast<int>(s), v.h.inverse()});
  }
  auto part = [&](const Inst& i) { return ctx.translate(sys.spheres[static_cast<std::size_t>(i.s)].p, i.k); };
  auto rel = [&](const Inst& x, const Inst& y) {
    int r = ctx.side_of(part(x), part(y));
    if (r == 0) throw std::logic_error("parallel spheres in a simple system");
    return r;
  };
  auto exit_sign = [&](const Inst& i, const HalfEdge& he) {
    EndPartition p = part(i);
    for (const auto& [h, sign] : p.exits) {
      if (h == he) return sign;
    }
    throw std::logic_error("missing exit sign");
  };

  // Sub-regions of the region at (1, u), keyed by their sides of the pieces there.
  std::map<std::pair<int, std::vector<int>>, int> node_id;
  std::vector<std::vector<std::tuple<int, Word, bool>>> adj;  // neighbor, voltage, crossing src -> dst
  auto node = [&](int u, std::vector<int> vec) {
    auto [it, fresh] = node_id.emplace(std::make_pair(u, std::move(vec)), static_cast<int>(adj.size()));
    if (fresh) adj.emplace_back();
    return it->second;
  };
  std::vector<std::pair<int, int>> blocked_nodes(E, {-1, -1});

  for (std::size_t eps = 0; eps < E; ++eps) {
    const GraphEdge& ge = a.edge(static_cast<int>(eps));
    const Word gamma = t.gamma(static_cast<int>(eps));
    const auto& circles = on_edge[eps];
    std::vector<std::vector<int>> regions;
    if (circles.empty()) {
      regions.push_back({});
    } else {
      std::set<std::vector<int>> seen;
      for (std::size_t c = 0; c < circles.size(); ++c) {
        std::vector<int> base(circles.size());
        for (std::size_t d = 0; d < circles.size(); ++d) base[d] = d == c ? 0 : rel(circles[c], circles[d]);
        for (int x : {1, -1}) {
          base[c] = x;
          seen.insert(base);
        }
      }
      regions.assign(seen.begin(), seen.end());
    }
    auto circle_index = [&](const Inst& i) {
      for (std::size_t c = 0; c < circles.size(); ++c) {
        if (circles[c] == i) return static_cast<int>(c);
      }
      return -1;
    };
    const TreeVertex src{Word(), ge.src};
    const TreeVertex dst_local{Word(), ge.dst};
    for (const auto& reg : regions) {
      std::vector<int> vs;
      for (const auto& i : at_vertex[static_cast<std::size_t>(ge.src)]) {
        int c = circle_index(i);
        vs.push_back(c >= 0 ? reg[static_cast<std::size_t>(c)] : exit_sign(i, {src, forward(static_cast<int>(eps))}));
      }
      std::vector<int> vd;
      for (const auto& i : at_vertex[static_cast<std::size_t>(ge.dst)]) {
        int c = circle_index({i.s, gamma * i.k});
        vd.push_back(c >= 0 ? reg[static_cast<std::size_t>(c)] : exit_sign(i, {dst_local, backward(static_cast<int>(eps))}));
      }
      const int ns = node(ge.src, vs);
      const int nd = node(ge.dst, vd);
      if (blocked[eps] >= 0) {
        blocked_nodes[eps] = {ns, nd};
      } else {
        adj[static_cast<std::size_t>(ns)].push_back({nd, gamma, true});
        adj[static_cast<std::size_t>(nd)].push_back({ns, gamma, false});
      }
    }
  }

  // Chambers: off(n) K_c is the chamber containing sub-region n.
  std::vector<int> chamber(adj.size(), -1);
  std::vector<Word> off(adj.size());
  int chambers = 0;
  for (std::size_t root = 0; root < adj.size(); ++root) {
    if (chamber[root] >= 0) continue;
    chamber[root] = chambers;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
      std::size_t n = queue.front();
      queue.pop_front();
      for (const auto& [m, gamma, forward_cross] : adj[n]) {
        Word o = forward_cross ? gamma.inverse() * off[n] : gamma * off[n];
        auto mm = static_cast<std::size_t>(m);
        if (chamber[mm] < 0) {
          chamber[mm] = chambers;
          off[mm] = o;
          queue.push_back(mm);
        } else if (off[mm] != o) {
          throw std::logic_error("chamber with nontrivial stabilizer");
        }
      }
    }
    ++chambers;
  }

  auto lookup = [&](int u, const std::vector<int>& vec) {
    auto it = node_id.find({u, vec});
    if (it == node_id.end()) throw std::logic_error("sub-region adjacent to a sphere not found");
    return static_cast<std::size_t>(it->second);
  };
  // Per sphere: (chamber, position) on the - and + sides.
  std::vector<std::array<std::pair<int, Word>, 2>> sides(S);
  for (std::size_t s = 0; s < S; ++s) {
    const EndPartition& p = sys.spheres[s].p;
    if (p.parallel()) {
      auto e = static_cast<std::size_t>(p.edge.edge);
      const Word& h = p.edge.h;
      auto [ns, nd] = blocked_nodes[e];
      std::pair<int, Word> src_side{chamber[static_cast<std::size_t>(ns)], h * off[static_cast<std::size_t>(ns)]};
      std::pair<int, Word> dst_side{chamber[static_cast<std::size_t>(nd)], h * t.gamma(p.edge.edge) * off[static_cast<std::size_t>(nd)]};
      sides[s] = p.dst_sign > 0 ? std::array{src_side, dst_side} : std::array{dst_side, src_side};
      continue;
    }
    const TreeVertex v = t.src(p.tau.front());
    const Inst self{static_cast<int>(s), v.h.inverse()};
    for (int x : {-1, 1}) {
      std::vector<int> vec;
      for (const auto& i : at_vertex[static_cast<std::size_t>(v.u)]) vec.push_back(i == self ? x : rel(self, i));
      std::size_t n = lookup(v.u, vec);
      sides[s][x > 0 ? 1 : 0] = {chamber[n], v.h * off[n]};
    }
  }

  // Dual graph with voltages, then the marking from a spanning tree.
  const int rank = a.rank();
  if (static_cast<int>(S) - chambers + 1 != rank) throw std::logic_error("dual graph has the wrong rank");
  std::vector<Word> voltage(S);
  std::vector<std::vector<std::pair<std::size_t, bool>>> inc(static_cast<std::size_t>(chambers));
  for (std::size_t s = 0; s < S; ++s) {
    voltage[s] = sides[s][0].second.inverse() * sides[s][1].second;
    inc[static_cast<std::size_t>(sides[s][0].first)].push_back({s, true});
    inc[static_cast<std::size_t>(sides[s][1].first)].push_back({s, false});
  }
  std::vector<Word> tpos(static_cast<std::size_t>(chambers));
  std::vector<bool> reached(static_cast<std::size_t>(chambers), false);
  std::vector<bool> tree(S, false);
  reached[0] = true;
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    std::size_t c = queue.front();
    queue.pop_front();
    for (auto [s, outgoing] : inc[c]) {
      auto other = static_cast<std::size_t>(sides[s][outgoing ? 1 : 0].first);
      if (reached[other]) continue;
      reached[other] = true;
      tree[s] = true;
      tpos[other] = outgoing ? tpos[c] * voltage[s] : tpos[c] * voltage[s].inverse();
      queue.push_back(other);
    }
  }
  if (std::find(reached.begin(), reached.end(), false) != reached.end()) throw std::logic_error("dual graph is disconnected");
  std::vector<GraphEdge> edges;
  std::vector<Word> words;
  for (std::size_t s = 0; s < S; ++s) {
    GraphEdge ge;
    ge.src = sides[s][0].first;
    ge.dst = sides[s][1].first;
    ge.length = sys.spheres[s].weight;
    ge.tree = tree[s];
    if (!ge.tree) {
      ge.word = a.to_free(tpos[static_cast<std::size_t>(ge.src)] * voltage[s] * tpos[static_cast<std::size_t>(ge.dst)].inverse());
      words.push_back(ge.word);
    }
    edges.push_back(std::move(ge));
  }
  auto basis = BasisTuple::from_elements(rank, words);
  if (!basis) throw std::logic_error("dual graph loops do not form a basis");
  return normalize_volume(MarkedGraph(rank, chambers, std::move(edges), 0, *basis));
}

}  // namespace oslab
