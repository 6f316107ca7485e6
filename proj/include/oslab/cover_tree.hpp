#pragma once

// The universal cover of a marked graph with F_n-addressing.
//
// A vertex of the cover is addressed by (h, u): h is an element of pi_1(G, b)
// written in loop letters, u a vertex of G. The lift (h, e) of an edge e runs
// from (h, src e) to (h gamma_e, dst e), with gamma_e the loop letter of e
// (identity on tree edges). An element g of F_n acts by (h, u) -> (psi(g) h, u)
// where psi = marking^{-1}.

#include <compare>
#include <optional>
#include <vector>

#include "oslab/marked_graph.hpp"

namespace oslab {

struct TreeVertex {
  Word h;
  int u = 0;
  auto operator<=>(const TreeVertex&) const = default;
  bool operator==(const TreeVertex&) const = default;
};

// Oriented lift of an edge: the lift (h, edge_of(o)) traversed along o.
struct TreeEdge {
  Word h;
  int edge = 0;
  auto operator<=>(const TreeEdge&) const = default;
  bool operator==(const TreeEdge&) const = default;
};

struct AxisData {
  std::size_t translation_length = 0;
  TreeVertex point;  // a vertex on the axis
};

class CoverTree {
 public:
  explicit CoverTree(const MarkedGraph& g) : g_(&g) {}

  const MarkedGraph& graph() const { return *g_; }
  TreeVertex base() const { return {Word(), g_->basepoint()}; }

  TreeVertex src(const TreeEdge& e) const { return {e.h, g_->edge(e.edge).src}; }
  TreeVertex dst(const TreeEdge& e) const { return {e.h * gamma(e.edge), g_->edge(e.edge).dst}; }
  Word gamma(int edge) const;

  // Follows an oriented edge of G from v; v.u must be its start.
  TreeVertex step(const TreeVertex& v, OrientedEdge o) const;
  TreeVertex walk(TreeVertex v, const std::vector<OrientedEdge>& path) const;
  // The lift of edge_of(o) crossed when stepping along o from v.
  TreeEdge lift(const TreeVertex& v, OrientedEdge o) const;
  // Oriented edges of G leaving vertex u (a loop appears twice).
  std::vector<OrientedEdge> half_edges(int u) const;

  // Reduced edge path between two vertices.
  std::vector<OrientedEdge> path(const TreeVertex& a, const TreeVertex& b) const;
  std::size_t distance(const TreeVertex& a, const TreeVertex& b) const { return path(a, b).size(); }
  // Reduced edge path of a loop word from the basepoint.
  std::vector<OrientedEdge> loop_word_path(const Word& loop_word) const;

  // Left action of g in F_n.
  TreeVertex act(const Word& g, const TreeVertex& v) const { return {g_->to_loops(g) * v.h, v.u}; }
  TreeEdge act(const Word& g, const TreeEdge& e) const { return {g_->to_loops(g) * e.h, e.edge}; }

  // Translation length and an axis vertex of a non-identity g in F_n.
  AxisData axis_data(const Word& g) const;

 private:
  const MarkedGraph* g_;
};

}  // namespace oslab
