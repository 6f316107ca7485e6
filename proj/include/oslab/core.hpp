#pragma once

// The Guirardel core of the covers of two marked graphs and the intersection
// number i(X, Y).
//
// For an edge e1 of the first graph, the lift (1, e1) splits the boundary of
// F_n in two. An equivariant map T2 -> T1 pulls the midpoint of (1, e1) back to
// finitely many edges of T2; their hull is the bounding tree. Every component
// of T2 minus the bounding tree lies on one side of (1, e1), which labels the
// exits of the bounding tree by a sign. A quadrant is heavy exactly when its
// T2 direction contains an exit of the matching sign, and the slice at e1 is
// the set of bounding-tree edges with both signs on both sides.

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "oslab/cover_tree.hpp"

namespace oslab {

// Side +1 is the side of dst, -1 the side of src.
struct Direction {
  TreeEdge edge;
  int side = 1;
};

struct Quadrant {
  Direction d1;  // in the cover of the first graph
  Direction d2;  // in the cover of the second graph
};

struct HeavyVerdict {
  bool heavy = false;     // certified within the bound
  Word certificate;       // g in F_n whose powers g^k witness heaviness
  std::size_t bound = 0;  // search bound used when presumed light
};

struct Exit {
  int vertex = 0;     // bounding-tree vertex
  OrientedEdge o = 0; // half-edge of the second graph leaving it
  int sign = 1;
  std::size_t certificate_length = 0;
};

// The splitting of the lift (1, e1) of an edge of g1 seen in the cover of g2.
struct EdgeSplitting {
  int fixed_edge = 0;
  std::vector<TreeVertex> vertices;
  std::vector<TreeEdge> edges;
  std::vector<std::array<int, 2>> ends;  // vertex indices of src and dst of each edge
  std::vector<bool> preimage;            // edge maps across the midpoint of (1, e1)
  std::vector<Exit> exits;
  std::map<TreeVertex, int> vertex_index;
  std::map<TreeEdge, int> edge_index;

  // Number of exits of each sign on the src side and dst side of every edge.
  // Index [edge][side 0 = src, 1 = dst][sign 0 = -, 1 = +].
  std::vector<std::array<std::array<int, 2>, 2>> sign_counts;
};

class CoreContext {
 public:
  CoreContext(const MarkedGraph& g1, const MarkedGraph& g2);

  const MarkedGraph& g1() const { return t1_.graph(); }
  const MarkedGraph& g2() const { return t2_.graph(); }
  const CoverTree& t1() const { return t1_; }
  const CoverTree& t2() const { return t2_; }

  // chi: pi_1(g2) -> pi_1(g1) and its inverse, on loop letters.
  Word chi(const Word& w2) const;
  Word chi_inverse(const Word& w1) const;
  // Side of the lift (1, e1) of T1 containing a vertex of T1.
  int side_of(int e1, const TreeVertex& v1) const;

  EdgeSplitting split(int e1) const;
  // Certificate for the exit half-tree beyond an exit of a splitting.
  Word exit_certificate(const EdgeSplitting& s, const Exit& x) const;

 private:
  CoverTree t1_;
  CoverTree t2_;
  std::vector<Word> chi_images_;
  std::vector<Word> chi_inverse_images_;
  std::vector<Word> return_loops_;  // per half-edge code of g2, shortest cyclically reduced loop letters
  std::vector<std::size_t> return_loop_lengths_;
};

struct Slice {
  int edge = 0;                         // edge orbit of the first graph
  std::vector<TreeEdge> edges;          // edges of the second cover
  std::size_t bounding_tree_edges = 0;  // size of the bounding tree containing the slice
  bool connected = true;
  std::array<long, 3> certified{};      // cells certified heavy at L, 2L, 4L
  std::vector<std::array<Word, 4>> certificates;
};

struct IntersectionResult {
  long i = 0;
  bool stable = true;
  std::size_t bound = 0;
  std::array<long, 3> certified{};
  std::vector<Slice> slices;
};

// Slice of the core over the lift (1, e1) of an edge of g1.
Slice slice(const CoreContext& ctx, int e1, std::size_t bound, bool with_certificates = false);
// Default certificate bound: 4 times the longest marking word of either graph.
std::size_t default_certificate_bound(const MarkedGraph& x, const MarkedGraph& y);
IntersectionResult intersection_number(const MarkedGraph& x, const MarkedGraph& y, std::size_t bound = 0,
                                       bool with_certificates = false);

// Heaviness of a quadrant, certified by a word of length at most `bound`.
HeavyVerdict is_heavy(const CoreContext& ctx, const Quadrant& q, std::size_t bound);
// Exact heaviness (no length bound).
bool quadrant_heavy(const CoreContext& ctx, const Quadrant& q);
// Whether the attracting end of g lies in the direction d of tree t.
bool attracting_end_in(const CoverTree& t, const Word& g, const Direction& d);
// Side (+1 dst, -1 src) of a tree edge on which vertex v lies.
int side_of_edge(const CoverTree& t, const TreeEdge& e, const TreeVertex& v);

struct MetricComparison {
  double d_xy = 0;
  double d_yx = 0;
  long i = 0;
  double log_i = 0;
  bool stable = true;
  bool thin = false;
};
MetricComparison compare_metrics(const MarkedGraph& x, const MarkedGraph& y, double epsilon);

// Collapses a forest of tree edges; the marking is unchanged and lengths are renormalized.
MarkedGraph collapse_edges(const MarkedGraph& g, const std::vector<int>& tree_edges);

}  // namespace oslab
