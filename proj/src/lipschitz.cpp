#include "oslab/lipschitz.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "oslab/cover_tree.hpp"

namespace oslab {

namespace {

std::vector<OrientedEdge> reversed(const std::vector<OrientedEdge>& p) {
  std::vector<OrientedEdge> r(p.rbegin(), p.rend());
  for (auto& o : r) o = -o;
  return r;
}

// Least rotation of the loop or of its reverse.
std::vector<OrientedEdge> cyclic_key(const std::vector<OrientedEdge>& p) {
  std::vector<OrientedEdge> best;
  for (const auto& q : {p, reversed(p)}) {
    for (std::size_t r = 0; r < q.size(); ++r) {
      std::vector<OrientedEdge> rot(q.begin() + static_cast<std::ptrdiff_t>(r), q.end());
      rot.insert(rot.end(), q.begin(), q.begin() + static_cast<std::ptrdiff_t>(r));
      if (best.empty() || rot < best) best = std::move(rot);
    }
  }
  return best;
}

template <class Accept>
std::vector<CandidateLoop> enumerate_loops(const MarkedGraph& g, std::size_t max_edges, Accept accept) {
  CoverTree t(g);
  std::set<std::vector<OrientedEdge>> seen;
  std::vector<CandidateLoop> out;
  std::vector<OrientedEdge> path;
  std::vector<int> uses(static_cast<std::size_t>(g.edge_count()), 0);
  std::vector<std::vector<OrientedEdge>> leaving(static_cast<std::size_t>(g.vertex_count()));
  for (int v = 0; v < g.vertex_count(); ++v) leaving[static_cast<std::size_t>(v)] = t.half_edges(v);

  auto dfs = [&](auto&& self, int start, int at) -> void {
    if (!path.empty() && at == start && path.back() != -path.front()) {
      auto key = cyclic_key(path);
      if (seen.insert(key).second) out.push_back({key, g.to_free(g.path_letters(key))});
    }
    if (path.size() == max_edges) return;
    for (auto o : leaving[static_cast<std::size_t>(at)]) {
      if (!path.empty() && o == -path.back()) continue;
      auto e = static_cast<std::size_t>(edge_of(o));
      if (!accept(uses[e] + 1)) continue;
      ++uses[e];
      path.push_back(o);
      self(self, start, g.end_of(o));
      path.pop_back();
      --uses[e];
    }
  };
  for (int v = 0; v < g.vertex_count(); ++v) dfs(dfs, v, v);
  return out;
}

}  // namespace

std::vector<CandidateLoop> candidate_loops(const MarkedGraph& g) {
  return enumerate_loops(g, 2 * static_cast<std::size_t>(g.edge_count()), [](int u) { return u <= 2; });
}

std::vector<CandidateLoop> all_loops(const MarkedGraph& g, std::size_t max_edges) {
  return enumerate_loops(g, max_edges, [](int) { return true; });
}

std::vector<OrientedEdge> tight_loop(const MarkedGraph& g, const Word& w) {
  if (w.empty()) throw std::invalid_argument("identity has no loop");
  CoverTree t(g);
  return cyclic_reduce_path(t.loop_word_path(g.to_loops(w)));
}

Rational conjugacy_length(const MarkedGraph& g, const Word& w) { return g.path_length(tight_loop(g, w)); }

StretchResult stretch_over(const MarkedGraph& g, const MarkedGraph& h, const std::vector<CandidateLoop>& loops) {
  if (g.rank() != h.rank()) throw std::invalid_argument("rank mismatch");
  StretchResult best;
  bool have = false;
  Word best_key;
  for (const auto& c : loops) {
    Rational ratio = conjugacy_length(h, c.word) / g.path_length(c.path);
    Word key = c.word.conjugacy_normal_form();
    if (!have || ratio > best.lambda || (ratio == best.lambda && key < best_key)) {
      best.lambda = ratio;
      best.witness = c;
      best_key = key;
      have = true;
    }
  }
  if (!have) throw std::invalid_argument("no loops");
  return best;
}

StretchResult stretch_factor(const MarkedGraph& g, const MarkedGraph& h) {
  return stretch_over(g, h, candidate_loops(g));
}

Morphism quasi_optimal_morphism(const MarkedGraph& g, const MarkedGraph& h) {
  if (!g.is_rose() || !h.is_rose()) throw std::invalid_argument("quasi-optimal morphisms are built between roses");
  const int n = g.rank();
  std::vector<Word> images;
  for (int i = 1; i <= n; ++i) images.push_back(h.to_loops(g.to_free(Word({i}))));

  // Conjugators: short words and every prefix of an image or its inverse.
  std::set<Word> conjugators{Word()};
  std::vector<Word> layer{Word()};
  for (int len = 0; len < 2; ++len) {
    std::vector<Word> next;
    for (const auto& w : layer) {
      for (int l = -n; l <= n; ++l) {
        if (l == 0) continue;
        Word v = w * Word({l});
        if (v.size() == w.size() + 1 && conjugators.insert(v).second) next.push_back(v);
      }
    }
    layer = std::move(next);
  }
  for (const auto& im : images) {
    for (const auto& w : {im, im.inverse()}) {
      std::vector<Letter> pre;
      for (Letter l : w.letters()) {
        pre.push_back(l);
        Word p(pre);
        conjugators.insert(p);
        conjugators.insert(p.inverse());
      }
    }
  }

  auto petal_length = [](const MarkedGraph& r, const Word& w) {
    Rational s = 0;
    for (Letter l : w.letters()) s += r.edge(r.loop_edge(l > 0 ? l : -l)).length;
    return s;
  };
  Morphism best{g, h, {}, Word(), Rational(0), BasisTuple(n)};
  bool have = false;
  for (const auto& v : conjugators) {
    std::vector<Word> im;
    Rational lip = 0;
    for (int i = 1; i <= n; ++i) {
      Word w = v * images[static_cast<std::size_t>(i - 1)] * v.inverse();
      lip = std::max(lip, Rational(petal_length(h, w) / g.edge(g.loop_edge(i)).length));
      im.push_back(std::move(w));
    }
    if (!have || lip < best.lipschitz) {
      best.image = std::move(im);
      best.conjugator = v;
      best.lipschitz = lip;
      have = true;
    }
  }
  // Source petal i is labelled by h.to_free(image_i) = V g_i V^{-1}, V = h.to_free(v).
  best.associated_basis = conjugate_basis(g.marking(), h.to_free(best.conjugator).inverse());
  return best;
}

QuasiSymmetry quasi_symmetry_report(const std::vector<DistancePair>& sample) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  QuasiSymmetry out;
  for (const auto& p : sample) {
    if (p.d_xy <= 1e-12) continue;
    out.c = std::max(out.c, p.d_yx / p.d_xy);
    ++out.contributing;
  }
  return out;
}

}  // namespace oslab
