#pragma once

// Points of outer space as marked metric graphs.
//
// The marking is stored relative to a spanning tree: every non-tree edge e_j
// (in edge order) spans a loop gamma_j = [b -> src] e_j [dst -> b] of pi_1(G, b)
// and carries the word y_j in F_n that gamma_j represents. The tuple (y_j) is a
// basis; its inverse gives the action of F_n on the universal cover.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oslab/rational.hpp"
#include "oslab/word.hpp"

namespace oslab {

// Oriented edge of a graph: +(id+1) traverses edge `id` forward, -(id+1) backward.
using OrientedEdge = int;
inline OrientedEdge forward(int edge) { return edge + 1; }
inline OrientedEdge backward(int edge) { return -(edge + 1); }
inline int edge_of(OrientedEdge o) { return (o > 0 ? o : -o) - 1; }
inline bool is_forward(OrientedEdge o) { return o > 0; }

struct GraphEdge {
  int src = 0;
  int dst = 0;
  Rational length;
  bool tree = false;
  Word word;  // y_j for non-tree edges, identity on tree edges
};

class MarkedGraph {
 public:
  MarkedGraph() = default;
  // Builds a graph from edges; `marking` must list the non-tree loop words in
  // edge order. Throws std::invalid_argument on structural inconsistency.
  MarkedGraph(int rank, int vertex_count, std::vector<GraphEdge> edges, int basepoint,
              BasisTuple marking);

  static MarkedGraph standard_rose(int rank);
  static MarkedGraph rose(const BasisTuple& marking);

  int rank() const { return rank_; }
  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int basepoint() const { return basepoint_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const GraphEdge& edge(int id) const { return edges_[static_cast<std::size_t>(id)]; }
  const BasisTuple& marking() const { return marking_; }

  // Non-tree edge carrying loop letter j (1-based), and the inverse lookup.
  int loop_edge(int letter) const { return loop_edges_[static_cast<std::size_t>(letter - 1)]; }
  int letter_of_edge(int edge) const { return letter_of_[static_cast<std::size_t>(edge)]; }

  Rational total_length() const;
  bool is_rose() const { return vertex_count_ == 1; }
  // Number of half-edges at v (a loop counts twice).
  int valence(int v) const;

  // Tree path from the basepoint to v.
  const std::vector<OrientedEdge>& tree_path(int v) const { return tree_paths_[static_cast<std::size_t>(v)]; }
  // Edge path of loop letter j based at the basepoint (not reduced).
  std::vector<OrientedEdge> loop_path(int letter) const;
  // Loop letters of a closed edge path (tree edges contribute nothing).
  Word path_letters(const std::vector<OrientedEdge>& path) const;

  // pi_1 word (loop letters) -> F_n word.
  Word to_free(const Word& loop_word) const { return marking_.forward().apply(loop_word); }
  // F_n word -> pi_1 word in loop letters.
  Word to_loops(const Word& free_word) const { return marking_.rewrite(free_word); }

  int start_of(OrientedEdge o) const { return is_forward(o) ? edge(edge_of(o)).src : edge(edge_of(o)).dst; }
  int end_of(OrientedEdge o) const { return is_forward(o) ? edge(edge_of(o)).dst : edge(edge_of(o)).src; }
  Rational path_length(const std::vector<OrientedEdge>& path) const;

  MarkedGraph with_lengths(std::vector<Rational> lengths) const;
  MarkedGraph with_marking(BasisTuple marking) const;

  bool operator==(const MarkedGraph& o) const;

 private:
  void index();

  int rank_ = 0;
  int vertex_count_ = 0;
  std::vector<GraphEdge> edges_;
  int basepoint_ = 0;
  BasisTuple marking_{1};
  std::vector<int> loop_edges_;
  std::vector<int> letter_of_;
  std::vector<std::vector<OrientedEdge>> tree_paths_;
};

// Free reduction of an edge path (cancels e followed by e^{-1}).
std::vector<OrientedEdge> reduce_path(std::vector<OrientedEdge> path);
// Cyclic reduction of a closed reduced edge path.
std::vector<OrientedEdge> cyclic_reduce_path(std::vector<OrientedEdge> path);

struct Violation {
  std::string code;
  std::string detail;
};

std::vector<Violation> validate(const MarkedGraph& g);
MarkedGraph normalize_volume(const MarkedGraph& g);
Rational systole(const MarkedGraph& g);

// A product of elementary automorphisms, m_1 o ... o m_k.
struct OuterAutomorphismSpec {
  std::vector<ElementaryAutomorphism> moves;
  Automorphism automorphism(int rank) const { return Automorphism::compose_moves(rank, moves); }
  // this o rhs.
  OuterAutomorphismSpec after(const OuterAutomorphismSpec& rhs) const;
};

// Rewrites every marking word through phi: y_j -> phi(y_j).
MarkedGraph act(const MarkedGraph& g, const OuterAutomorphismSpec& phi);

// Re-expresses the marking relative to another spanning tree.
MarkedGraph retree(const MarkedGraph& g, const std::vector<int>& tree_edges, int basepoint);
// Spanning tree of minimal total length (ties by edge id).
std::vector<int> shortest_spanning_tree(const MarkedGraph& g);

struct RoseCollapse {
  MarkedGraph rose;
  std::vector<int> petal_edge;  // petal j (0-based) comes from this edge of the input
};
RoseCollapse collapse_tree_to_rose(const MarkedGraph& g);

// Trivalent graph shapes used as maximal systems.
enum class GraphShape { Rose, Theta, Barbell, K4, TrivalentRandom };

struct InstanceConfig {
  int rank = 2;
  int move_count = 3;
  double epsilon = 0.02;
  bool thick = true;
  bool trivalent_a = true;
  bool random_lengths = true;
};

struct InstancePair {
  MarkedGraph a;
  MarkedGraph b;
  OuterAutomorphismSpec phi;
};

// Deterministic in the seed.
InstancePair random_instance(std::uint64_t seed, const InstanceConfig& cfg);
OuterAutomorphismSpec random_automorphism(std::uint64_t seed, int rank, int move_count);
// Trivalent graph of the given rank with the standard marking and equal lengths.
MarkedGraph trivalent_graph(int rank, int variant = 0);
// Random lengths drawn from [epsilon, 1] on a 1/1000 grid, normalized; with
// `thick`, rejection-sampled until systole >= epsilon.
MarkedGraph randomize_lengths(const MarkedGraph& g, std::uint64_t seed, double epsilon, bool thick);

}  // namespace oslab
