#include "oslab/cover_tree.hpp"

#include <stdexcept>

namespace oslab {

Word CoverTree::gamma(int edge) const {
  int l = g_->letter_of_edge(edge);
  return l ? Word({l}) : Word();
}

TreeVertex CoverTree::step(const TreeVertex& v, OrientedEdge o) const {
  if (g_->start_of(o) != v.u) throw std::invalid_argument("edge does not leave this vertex");
  int e = edge_of(o);
  Word g = gamma(e);
  return {is_forward(o) ? v.h * g : v.h * g.inverse(), g_->end_of(o)};
}

TreeVertex CoverTree::walk(TreeVertex v, const std::vector<OrientedEdge>& path) const {
  for (auto o : path) v = step(v, o);
  return v;
}

TreeEdge CoverTree::lift(const TreeVertex& v, OrientedEdge o) const {
  if (is_forward(o)) return {v.h, edge_of(o)};
  return {v.h * gamma(edge_of(o)).inverse(), edge_of(o)};
}

std::vector<OrientedEdge> CoverTree::half_edges(int u) const {
  std::vector<OrientedEdge> out;
  for (int e = 0; e < g_->edge_count(); ++e) {
    if (g_->edge(e).src == u) out.push_back(forward(e));
    if (g_->edge(e).dst == u) out.push_back(backward(e));
  }
  return out;
}

std::vector<OrientedEdge> CoverTree::loop_word_path(const Word& loop_word) const {
  std::vector<OrientedEdge> p;
  for (Letter l : loop_word.letters()) {
    auto seg = g_->loop_path(l);
    p.insert(p.end(), seg.begin(), seg.end());
  }
  return reduce_path(std::move(p));
}

std::vector<OrientedEdge> CoverTree::path(const TreeVertex& a, const TreeVertex& b) const {
  std::vector<OrientedEdge> p;
  const auto& ta = g_->tree_path(a.u);
  for (auto it = ta.rbegin(); it != ta.rend(); ++it) p.push_back(-*it);
  const Word between = a.h.inverse() * b.h;
  for (Letter l : between.letters()) {
    auto seg = g_->loop_path(l);
    p.insert(p.end(), seg.begin(), seg.end());
  }
  const auto& tb = g_->tree_path(b.u);
  p.insert(p.end(), tb.begin(), tb.end());
  return reduce_path(std::move(p));
}

AxisData CoverTree::axis_data(const Word& g) const {
  if (g.empty()) throw std::invalid_argument("identity has no axis");
  auto p = loop_word_path(g_->to_loops(g));
  std::size_t lo = 0;
  std::size_t hi = p.size();
  while (hi - lo >= 2 && p[lo] == -p[hi - 1]) {
    ++lo;
    --hi;
  }
  AxisData out;
  out.translation_length = hi - lo;
  std::vector<OrientedEdge> prefix(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(lo));
  out.point = walk(base(), prefix);
  return out;
}

}  // namespace oslab
