#include "oslab/marked_graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>

namespace oslab {

std::vector<OrientedEdge> reduce_path(std::vector<OrientedEdge> path) {
  std::vector<OrientedEdge> out;
  out.reserve(path.size());
  for (auto o : path) {
    if (!out.empty() && out.back() == -o) {
      out.pop_back();
    } else {
      out.push_back(o);
    }
  }
  return out;
}

std::vector<OrientedEdge> cyclic_reduce_path(std::vector<OrientedEdge> path) {
  path = reduce_path(std::move(path));
  std::size_t lo = 0;
  std::size_t hi = path.size();
  while (hi - lo >= 2 && path[lo] == -path[hi - 1]) {
    ++lo;
    --hi;
  }
  return {path.begin() + static_cast<std::ptrdiff_t>(lo), path.begin() + static_cast<std::ptrdiff_t>(hi)};
}

MarkedGraph::MarkedGraph(int rank, int vertex_count, std::vector<GraphEdge> edges, int basepoint,
                         BasisTuple marking)
    : rank_(rank),
      vertex_count_(vertex_count),
      edges_(std::move(edges)),
      basepoint_(basepoint),
      marking_(std::move(marking)) {
  index();
}

void MarkedGraph::index() {
  if (basepoint_ < 0 || basepoint_ >= vertex_count_) throw std::invalid_argument("basepoint out of range");
  loop_edges_.clear();
  letter_of_.assign(edges_.size(), 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& ed = edges_[e];
    if (ed.src < 0 || ed.src >= vertex_count_ || ed.dst < 0 || ed.dst >= vertex_count_) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (!ed.tree) {
      loop_edges_.push_back(static_cast<int>(e));
      letter_of_[e] = static_cast<int>(loop_edges_.size());
    }
  }
  if (static_cast<int>(loop_edges_.size()) != rank_) {
    throw std::invalid_argument("number of non-tree edges differs from the rank");
  }
  if (marking_.rank() != rank_) throw std::invalid_argument("marking rank mismatch");
  for (int j = 1; j <= rank_; ++j) {
    auto& ed = edges_[static_cast<std::size_t>(loop_edges_[static_cast<std::size_t>(j - 1)])];
    if (ed.word.empty()) ed.word = marking_.element(j);
    if (ed.word != marking_.element(j)) throw std::invalid_argument("edge word disagrees with marking basis");
  }
  // Tree paths by breadth-first search over tree edges.
  tree_paths_.assign(static_cast<std::size_t>(vertex_count_), {});
  std::vector<bool> seen(static_cast<std::size_t>(vertex_count_), false);
  seen[static_cast<std::size_t>(basepoint_)] = true;
  std::deque<int> queue{basepoint_};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto& ed = edges_[e];
      if (!ed.tree) continue;
      int other = -1;
      OrientedEdge o = 0;
      if (ed.src == v && !seen[static_cast<std::size_t>(ed.dst)]) {
        other = ed.dst;
        o = forward(static_cast<int>(e));
      } else if (ed.dst == v && !seen[static_cast<std::size_t>(ed.src)]) {
        other = ed.src;
        o = backward(static_cast<int>(e));
      }
      if (other < 0) continue;
      seen[static_cast<std::size_t>(other)] = true;
      tree_paths_[static_cast<std::size_t>(other)] = tree_paths_[static_cast<std::size_t>(v)];
      tree_paths_[static_cast<std::size_t>(other)].push_back(o);
      queue.push_back(other);
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("tree edges do not span the graph");
  }
  int tree_count = 0;
  for (const auto& ed : edges_) tree_count += ed.tree ? 1 : 0;
  if (tree_count != vertex_count_ - 1) throw std::invalid_argument("tree edges do not form a tree");
}

MarkedGraph MarkedGraph::standard_rose(int rank) { return rose(BasisTuple(rank)); }

MarkedGraph MarkedGraph::rose(const BasisTuple& marking) {
  std::vector<GraphEdge> edges;
  const int n = marking.rank();
  for (int j = 1; j <= n; ++j) edges.push_back({0, 0, make_rational(1, n), false, marking.element(j)});
  return MarkedGraph(n, 1, std::move(edges), 0, marking);
}

Rational MarkedGraph::total_length() const {
  Rational s = 0;
  for (const auto& e : edges_) s += e.length;
  return s;
}

int MarkedGraph::valence(int v) const {
  int k = 0;
  for (const auto& e : edges_) k += (e.src == v ? 1 : 0) + (e.dst == v ? 1 : 0);
  return k;
}

std::vector<OrientedEdge> MarkedGraph::loop_path(int letter) const {
  bool inv = letter < 0;
  int e = loop_edge(inv ? -letter : letter);
  const auto& ed = edge(e);
  std::vector<OrientedEdge> p = tree_path(ed.src);
  p.push_back(forward(e));
  const auto& back = tree_path(ed.dst);
  for (auto it = back.rbegin(); it != back.rend(); ++it) p.push_back(-*it);
  if (inv) {
    std::reverse(p.begin(), p.end());
    for (auto& o : p) o = -o;
  }
  return p;
}

Word MarkedGraph::path_letters(const std::vector<OrientedEdge>& path) const {
  std::vector<Letter> raw;
  for (auto o : path) {
    int l = letter_of_edge(edge_of(o));
    if (l) raw.push_back(is_forward(o) ? l : -l);
  }
  return Word(std::move(raw));
}

Rational MarkedGraph::path_length(const std::vector<OrientedEdge>& path) const {
  Rational s = 0;
  for (auto o : path) s += edge(edge_of(o)).length;
  return s;
}

MarkedGraph MarkedGraph::with_lengths(std::vector<Rational> lengths) const {
  if (lengths.size() != edges_.size()) throw std::invalid_argument("length vector size mismatch");
  MarkedGraph g = *this;
  for (std::size_t e = 0; e < lengths.size(); ++e) g.edges_[e].length = lengths[e];
  return g;
}

MarkedGraph MarkedGraph::with_marking(BasisTuple marking) const {
  std::vector<GraphEdge> edges = edges_;
  for (auto& e : edges) e.word = Word();
  return MarkedGraph(rank_, vertex_count_, std::move(edges), basepoint_, std::move(marking));
}

bool MarkedGraph::operator==(const MarkedGraph& o) const {
  if (rank_ != o.rank_ || vertex_count_ != o.vertex_count_ || basepoint_ != o.basepoint_) return false;
  if (edges_.size() != o.edges_.size()) return false;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& a = edges_[e];
    const auto& b = o.edges_[e];
    if (a.src != b.src || a.dst != b.dst || a.length != b.length || a.tree != b.tree || a.word != b.word) {
      return false;
    }
  }
  return marking_.provenance() == o.marking_.provenance();
}

std::vector<Violation> validate(const MarkedGraph& g) {
  std::vector<Violation> out;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.valence(v) < 3) out.push_back({"valence", "vertex " + std::to_string(v) + " has valence " + std::to_string(g.valence(v))});
  }
  if (g.edge_count() - g.vertex_count() + 1 != g.rank()) {
    out.push_back({"betti", "first Betti number differs from the rank"});
  }
  for (int e = 0; e < g.edge_count(); ++e) {
    if (g.edge(e).length <= 0) out.push_back({"length", "edge " + std::to_string(e) + " has non-positive length"});
    if (g.edge(e).tree && !g.edge(e).word.empty()) out.push_back({"tree_word", "tree edge " + std::to_string(e) + " carries a word"});
  }
  if (g.total_length() != 1) out.push_back({"normalization", "total length is " + to_string(g.total_length())});
  const auto& m = g.marking();
  if (!m.inverse().compose(m.forward()).is_identity() || !m.forward().compose(m.inverse()).is_identity()) {
    out.push_back({"basis", "marking words do not form a basis"});
  }
  return out;
}

MarkedGraph normalize_volume(const MarkedGraph& g) {
  std::vector<Rational> lengths;
  for (const auto& e : g.edges()) {
    if (e.length <= 0) throw std::invalid_argument("cannot normalize a graph with a non-positive edge length");
    lengths.push_back(e.length);
  }
  Rational total = g.total_length();
  for (auto& l : lengths) l /= total;
  return g.with_lengths(std::move(lengths));
}

Rational systole(const MarkedGraph& g) {
  std::optional<Rational> best;
  const int V = g.vertex_count();
  for (int skip = 0; skip < g.edge_count(); ++skip) {
    const auto& se = g.edge(skip);
    if (se.src == se.dst) {
      if (!best || se.length < *best) best = se.length;
      continue;
    }
    // Dijkstra from src to dst avoiding `skip`.
    std::vector<std::optional<Rational>> dist(static_cast<std::size_t>(V));
    std::vector<bool> done(static_cast<std::size_t>(V), false);
    dist[static_cast<std::size_t>(se.src)] = Rational(0);
    for (int it = 0; it < V; ++it) {
      int u = -1;
      for (int v = 0; v < V; ++v) {
        if (done[static_cast<std::size_t>(v)] || !dist[static_cast<std::size_t>(v)]) continue;
        if (u < 0 || *dist[static_cast<std::size_t>(v)] < *dist[static_cast<std::size_t>(u)]) u = v;
      }
      if (u < 0) break;
      done[static_cast<std::size_t>(u)] = true;
      for (int e = 0; e < g.edge_count(); ++e) {
        if (e == skip) continue;
        const auto& ed = g.edge(e);
        for (auto [a, b] : {std::pair{ed.src, ed.dst}, std::pair{ed.dst, ed.src}}) {
          if (a != u) continue;
          Rational cand = *dist[static_cast<std::size_t>(u)] + ed.length;
          auto& db = dist[static_cast<std::size_t>(b)];
          if (!db || cand < *db) db = cand;
        }
      }
    }
    const auto& d = dist[static_cast<std::size_t>(se.dst)];
    if (d) {
      Rational cyc = *d + se.length;
      if (!best || cyc < *best) best = cyc;
    }
  }
  if (!best) throw std::invalid_argument("graph has no cycle");
  return *best;
}

OuterAutomorphismSpec OuterAutomorphismSpec::after(const OuterAutomorphismSpec& rhs) const {
  OuterAutomorphismSpec out = *this;
  out.moves.insert(out.moves.end(), rhs.moves.begin(), rhs.moves.end());
  return out;
}

MarkedGraph act(const MarkedGraph& g, const OuterAutomorphismSpec& phi) {
  return g.with_marking(g.marking().pushed_through(phi.moves));
}

MarkedGraph retree(const MarkedGraph& g, const std::vector<int>& tree_edges, int basepoint) {
  std::vector<GraphEdge> edges = g.edges();
  for (auto& e : edges) {
    e.tree = false;
    e.word = Word();
  }
  for (int e : tree_edges) edges[static_cast<std::size_t>(e)].tree = true;
  // Build with a placeholder marking to get the new loop paths, then express
  // them in the old loop letters.
  MarkedGraph shape(g.rank(), g.vertex_count(), edges, basepoint, BasisTuple(g.rank()));
  // The placeholder constructor stores standard words; clear them before re-marking.
  std::vector<Word> beta;
  for (int j = 1; j <= g.rank(); ++j) {
    // Old letters of a closed path do not depend on the base vertex choice up to
    // conjugation; conjugate by the old tree path to the new basepoint.
    auto p = g.tree_path(basepoint);
    auto loop = shape.loop_path(j);
    std::vector<OrientedEdge> full = p;
    full.insert(full.end(), loop.begin(), loop.end());
    for (auto it = p.rbegin(); it != p.rend(); ++it) full.push_back(-*it);
    beta.push_back(g.path_letters(full));
  }
  auto beta_basis = BasisTuple::from_elements(g.rank(), beta);
  if (!beta_basis) throw std::logic_error("retree: loop words of the new tree are not a basis");
  // y'_j = phi_g(beta_j): provenance of phi_g o beta.
  BasisTuple marking = beta_basis->pushed_through(g.marking().provenance());
  return shape.with_marking(std::move(marking));
}

std::vector<int> shortest_spanning_tree(const MarkedGraph& g) {
  std::vector<int> order(static_cast<std::size_t>(g.edge_count()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return g.edge(a).length < g.edge(b).length; });
  std::vector<int> parent(static_cast<std::size_t>(g.vertex_count()));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]);
  };
  std::vector<int> tree;
  for (int e : order) {
    int a = find(g.edge(e).src);
    int b = find(g.edge(e).dst);
    if (a == b) continue;
    parent[static_cast<std::size_t>(a)] = b;
    tree.push_back(e);
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

RoseCollapse collapse_tree_to_rose(const MarkedGraph& g) {
  RoseCollapse out;
  MarkedGraph h = g;
  if (!g.is_rose()) {
    auto tree = shortest_spanning_tree(g);
    std::vector<int> current;
    for (int e = 0; e < g.edge_count(); ++e) {
      if (g.edge(e).tree) current.push_back(e);
    }
    if (tree != current) h = retree(g, tree, g.basepoint());
  }
  for (int j = 1; j <= h.rank(); ++j) out.petal_edge.push_back(h.loop_edge(j));
  out.rose = MarkedGraph::rose(h.marking());
  return out;
}

namespace {

void add_edge(std::vector<GraphEdge>& edges, int a, int b) { edges.push_back({a, b, Rational(1), false, Word()}); }

MarkedGraph with_standard_marking(int rank, int vertex_count, std::vector<GraphEdge> edges) {
  // Breadth-first spanning tree from vertex 0.
  std::vector<bool> seen(static_cast<std::size_t>(vertex_count), false);
  seen[0] = true;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (auto& e : edges) {
      if (e.tree || e.src == e.dst) continue;
      int other = e.src == v ? e.dst : (e.dst == v ? e.src : -1);
      if (other < 0 || seen[static_cast<std::size_t>(other)]) continue;
      seen[static_cast<std::size_t>(other)] = true;
      e.tree = true;
      queue.push_back(other);
    }
  }
  auto n = static_cast<int>(edges.size());
  for (auto& e : edges) e.length = make_rational(1, n);
  return MarkedGraph(rank, vertex_count, std::move(edges), 0, BasisTuple(rank));
}

}  // namespace

MarkedGraph trivalent_graph(int rank, int variant) {
  if (rank < 2) throw std::invalid_argument("trivalent graphs need rank >= 2");
  std::vector<GraphEdge> edges;
  const int V = 2 * rank - 2;
  if (variant == 1 && (rank == 2 || rank == 3)) {
    // Loops at both ends of a path, doubled middle edge for rank 3.
    add_edge(edges, 0, 0);
    if (rank == 2) {
      add_edge(edges, 0, 1);
      add_edge(edges, 1, 1);
    } else {
      add_edge(edges, 0, 1);
      add_edge(edges, 1, 2);
      add_edge(edges, 1, 2);
      add_edge(edges, 2, 3);
      add_edge(edges, 3, 3);
    }
    return with_standard_marking(rank, V, std::move(edges));
  }
  // Cycle on 2n-2 vertices with antipodal chords: theta for n=2, K4 for n=3.
  for (int v = 0; v < V; ++v) add_edge(edges, v, (v + 1) % V);
  for (int v = 0; v < rank - 1; ++v) add_edge(edges, v, v + rank - 1);
  return with_standard_marking(rank, V, std::move(edges));
}

OuterAutomorphismSpec random_automorphism(std::uint64_t seed, int rank, int move_count) {
  std::mt19937_64 rng(seed);
  OuterAutomorphismSpec out;
  using K = ElementaryAutomorphism::Kind;
  std::uniform_int_distribution<int> gen(1, rank);
  std::uniform_int_distribution<int> coin(0, 1);
  while (static_cast<int>(out.moves.size()) < move_count) {
    int i = gen(rng);
    int j = gen(rng);
    if (i == j) continue;
    K kind = coin(rng) ? K::RightMultiply : K::LeftMultiply;
    ElementaryAutomorphism m{kind, i, j, coin(rng) ? 1 : -1};
    // Avoid immediately undoing the previous move.
    if (!out.moves.empty() && out.moves.back() == m.inverse()) continue;
    out.moves.push_back(m);
  }
  return out;
}

MarkedGraph randomize_lengths(const MarkedGraph& g, std::uint64_t seed, double epsilon, bool thick) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  const long lo = std::max<long>(1, static_cast<long>(epsilon * 1000.0));
  std::uniform_int_distribution<long> draw(lo, 1000);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Rational> lengths;
    for (int e = 0; e < g.edge_count(); ++e) lengths.push_back(Rational(draw(rng)));
    MarkedGraph h = normalize_volume(g.with_lengths(lengths));
    if (!thick || systole(h) >= Rational(lo, 1000)) return h;
  }
  return normalize_volume(g);
}

InstancePair random_instance(std::uint64_t seed, const InstanceConfig& cfg) {
  if (cfg.rank < 2) throw std::invalid_argument("rank must be at least 2");
  InstancePair out;
  out.phi = random_automorphism(seed, cfg.rank, cfg.move_count);
  MarkedGraph a = cfg.trivalent_a ? trivalent_graph(cfg.rank, static_cast<int>(seed % 2)) : MarkedGraph::standard_rose(cfg.rank);
  MarkedGraph b = act(MarkedGraph::standard_rose(cfg.rank), out.phi);
  if (cfg.random_lengths) {
    a = randomize_lengths(a, seed * 2 + 1, cfg.epsilon, cfg.thick);
    b = randomize_lengths(b, seed * 2 + 2, cfg.epsilon, cfg.thick);
  }
  out.a = std::move(a);
  out.b = std::move(b);
  return out;
}

}  // namespace oslab
