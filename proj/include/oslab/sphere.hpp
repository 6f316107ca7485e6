#pragma once

// Sphere systems in normal form with respect to a fixed maximal system A, the
// doubled surgery process, and the combing path.
//
// A lifted sphere is encoded by the partition of the ends of T_A it induces: a
// finite subtree tau of T_A (the edges are its intersection circles, the
// vertices its pieces) together with a sign on every exit half-edge of tau. A
// sphere disjoint from A is parallel to an edge of T_A and carries that edge
// instead of a subtree.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oslab/core.hpp"

namespace oslab {

struct HalfEdge {
  TreeVertex v;
  OrientedEdge o = 0;
  auto operator<=>(const HalfEdge&) const = default;
  bool operator==(const HalfEdge&) const = default;
};

struct EndPartition {
  std::vector<TreeEdge> tau;                   // sorted
  std::vector<std::pair<HalfEdge, int>> exits; // sorted, sign +1 or -1
  TreeEdge edge;                               // parallel spheres only
  int dst_sign = 0;                            // parallel spheres: sign of the dst side of `edge`

  bool parallel() const { return tau.empty(); }
  std::size_t circles() const { return tau.size(); }
  bool operator==(const EndPartition&) const = default;
};

// Finite support with signed exits (not necessarily minimal).
struct Support {
  std::set<TreeVertex> vertices;
  std::set<TreeEdge> edges;
  std::map<HalfEdge, int> exits;
};

class SphereContext {
 public:
  explicit SphereContext(const MarkedGraph& a);
  SphereContext(const SphereContext&) = delete;
  SphereContext& operator=(const SphereContext&) = delete;
  const MarkedGraph& a() const { return a_; }
  const CoverTree& tree() const { return tree_; }

  Support support(const EndPartition& p) const;
  EndPartition translate(const EndPartition& p, const Word& k) const;
  EndPartition flipped(const EndPartition& p) const;
  // Orientation-free identity of the partition; equal keys mean parallel spheres.
  std::vector<int> key(const EndPartition& p) const;
  std::vector<int> oriented_key(const EndPartition& p) const;
  // Translate so that the key is least; returns the translation applied.
  Word canonical_translation(const EndPartition& p) const;

  // Sign of the region containing vertex v (0 if v is a support vertex).
  int vertex_sign(const EndPartition& p, const TreeVertex& v) const;
  // Side of q containing the disjoint, non-parallel sphere p. Throws if they cross.
  int side_of(const EndPartition& p, const EndPartition& q) const;

  // Minimal partition from a signed support. Returns nullopt for a trivial sphere.
  std::optional<EndPartition> minimize(Support s) const;
  int vertex_sign(const Support& s, const TreeVertex& v) const;
  TreeVertex translate(const TreeVertex& v, const Word& k) const { return {k * v.h, v.u}; }

 private:
  MarkedGraph a_;
  CoverTree tree_;
};

struct WeightedSphere {
  EndPartition p;
  Rational weight;
  std::map<int, Rational> origin;  // weight received from each sphere of the previous even vertex
};

struct SphereSystem {
  std::vector<WeightedSphere> spheres;
  std::size_t circles() const;
  Rational total_weight() const;
};

// One sphere per edge of b, in normal form with respect to a (trivalent).
SphereSystem init_normal_form(const MarkedGraph& b, const MarkedGraph& a);
// The dual marked graph of a simple system.
MarkedGraph vertex_point(const SphereSystem& s, const MarkedGraph& a);

// Canonical comparison of systems (spheres and weights).
bool same_system(const SphereContext& ctx, const SphereSystem& x, const SphereSystem& y);

struct SurgeryMove {
  int sphere = 0;  // index in the raw set
  TreeEdge circle; // tau edge of the sphere's stored lift
  int side = 1;    // side of the sphere containing the innermost disk
};

struct PassRecord {
  std::vector<SurgeryMove> moves;
  int mixed_side_spheres = 0;
  int trivial_spheres = 0;
  int lone_circles = 0;  // circles innermost on both sides
};

struct RawStage;

// A raw set of lifted spheres with its surgery lineage, as produced by doubling
// and simultaneous surgery passes. Parallel members are ordered by lineage.
// The context must outlive the state.
class SurgeryState {
 public:
  SurgeryState(const SphereContext& ctx, const SphereSystem& s);

  SurgeryState doubled() const;
  // Circles bounding innermost disks of A, one move per (circle, side).
  std::vector<SurgeryMove> find_innermost(PassRecord* rec = nullptr) const;
  // The weight of each surgered sphere moves equally onto the classes of the
  // nontrivial spheres it yields.
  SurgeryState surgery_pass(const std::vector<SurgeryMove>& moves, PassRecord* rec = nullptr) const;

  struct Projection {
    SphereSystem system;
    std::vector<int> class_size;
    std::vector<int> copy_balance;  // members from the + copy minus members from the - copy
  };
  // Identifies parallel spheres, adding weights.
  Projection project() const;

  std::size_t size() const;
  const EndPartition& sphere(std::size_t i) const;
  const Rational& weight(std::size_t i) const;
  int copy(std::size_t i) const;
  int origin(std::size_t i) const;
  std::size_t circles() const;
  // Side of sphere j (translated by gj) containing sphere i (translated by gi).
  int side(std::size_t i, const Word& gi, std::size_t j, const Word& gj) const;

 private:
  SurgeryState(const SphereContext& ctx, std::shared_ptr<const RawStage> st) : ctx_(&ctx), stage_(std::move(st)) {}
  const SphereContext* ctx_;
  std::shared_ptr<const RawStage> stage_;
};

struct Genealogy {
  int sphere = 0;                       // index in the even vertex before the step
  std::vector<std::pair<int, Rational>> children;  // index in the next even vertex, weight transferred
  bool subdivided = false;              // some surgery was performed on its lineage
  int case_kind = 1;                    // 1, 2 or 3 as in the X-label recursion
};

struct DoubleStep {
  PassRecord first;
  PassRecord second;
  bool single_circle = false;   // some A-sphere met the system exactly once
  bool exact_double = true;     // the second raw set is the double of its projection
  bool exceptional = false;
  bool half = false;            // stopped after the first pass (odd vertex disjoint from A)
  std::vector<Genealogy> genealogy;
};

// One double surgery step: the odd vertex and, unless the odd vertex is
// already disjoint from A, the next even vertex.
std::pair<SphereSystem, std::optional<SphereSystem>> double_surgery_step(const SphereContext& ctx, const SphereSystem& s,
                                                                          DoubleStep& step);

struct TraceVertex {
  SphereSystem system;
  MarkedGraph graph;
  long circles = 0;
  long core_i = 0;        // intersection number of graph with A from the core computation
  bool core_stable = true;
  Rational systole;
  double d_next = 0;      // d(A_k, A_{k+1}) toward B
  bool exceptional = false;
  std::vector<Violation> violations;
  bool even = true;
};

struct CombingTrace {
  // vertices[k] is A_k: vertices[0] = A, vertices.back() = B.
  std::vector<TraceVertex> vertices;
  // steps[t] produces the even vertex after the t-th double surgery step (from B).
  std::vector<DoubleStep> steps;
  double l_gamma = 0;
  double d_ab = 0;
  bool terminated = true;
  std::size_t budget = 0;
  int N() const { return static_cast<int>(vertices.size()) - 1; }
};

struct CombingOptions {
  std::size_t step_budget = 0;  // 0: initial circles + 10, or OSLAB_STEP_BUDGET
  bool compute_core = true;     // bridge check at every vertex
};

CombingTrace combing_path(const MarkedGraph& b, const MarkedGraph& a, const CombingOptions& opt = {});

// Instrumentation.
int theta(const std::vector<int>& xs);
long long u_sequence(int k);

struct Window {
  int first_step = 0;  // index into steps
  int last_step = 0;   // inclusive
  // labels[p][q]: X of sphere q of the even vertex after p double steps into the window.
  std::vector<std::vector<int>> labels;
  std::vector<double> n_values;  // N(p)
};

struct FactReport {
  bool fact1 = true;
  bool fact2 = true;
  bool fact3 = true;
  bool fact4 = true;
  bool lemma33 = true;
  bool lemma34 = true;
  double lemma34_fitted_c3 = 0;     // least C3 that makes every window step pass
  bool integrity = true;            // validate, compatibility, bridge, edge counts
  bool strict_decrease = true;
  int exceptional_steps = 0;
  int c0 = 0;
  double lemma36_min_weight = 0;    // least max weight among subdivided spheres per step
  std::vector<std::string> failures;
  std::vector<Window> windows;
};

std::vector<Window> annotate_trace(const CombingTrace& t);
FactReport verify_facts(const CombingTrace& t, const MarkedGraph& a, bool rerun_suffix = true);

}  // namespace oslab
