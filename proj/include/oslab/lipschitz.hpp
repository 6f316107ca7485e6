#pragma once

// The Lipschitz metric on outer space and quasi-optimal rose morphisms.

#include <cmath>
#include <vector>

#include "oslab/marked_graph.hpp"

namespace oslab {

struct CandidateLoop {
  std::vector<OrientedEdge> path;  // cyclically reduced closed edge path
  Word word;                       // the free group element it represents (up to conjugacy)
};

// Cyclically reduced loops crossing each edge at most twice, one per cyclic
// class (rotations and reversal identified).
std::vector<CandidateLoop> candidate_loops(const MarkedGraph& g);
// Every cyclically reduced loop with at most `max_edges` edges, one per cyclic class.
std::vector<CandidateLoop> all_loops(const MarkedGraph& g, std::size_t max_edges);

// Length of the shortest loop of g freely homotopic to w.
Rational conjugacy_length(const MarkedGraph& g, const Word& w);
// The cyclically reduced edge loop of g representing the conjugacy class of w.
std::vector<OrientedEdge> tight_loop(const MarkedGraph& g, const Word& w);

struct StretchResult {
  Rational lambda;
  CandidateLoop witness;
};

StretchResult stretch_factor(const MarkedGraph& g, const MarkedGraph& h);
// The same maximum taken over an explicit loop family.
StretchResult stretch_over(const MarkedGraph& g, const MarkedGraph& h, const std::vector<CandidateLoop>& loops);

inline double distance(const MarkedGraph& g, const MarkedGraph& h) {
  return std::log(to_double(stretch_factor(g, h).lambda));
}

// A vertex-to-vertex map between roses: petal i of the source goes to the
// reduced word image[i] in the petal letters of the target.
struct Morphism {
  MarkedGraph source;
  MarkedGraph target;
  std::vector<Word> image;
  Word conjugator;  // in target petal letters
  Rational lipschitz;
  // The basis of F_n labelling the source petals by their images.
  BasisTuple associated_basis{1};
};

Morphism quasi_optimal_morphism(const MarkedGraph& g, const MarkedGraph& h);

struct QuasiSymmetry {
  double c = 1.0;
  std::size_t contributing = 0;
};

struct DistancePair {
  double d_xy = 0;
  double d_yx = 0;
};
// Smallest C with d(Y,X) <= C d(X,Y) over the sample (1 when nothing constrains it).
QuasiSymmetry quasi_symmetry_report(const std::vector<DistancePair>& sample);

}  // namespace oslab
