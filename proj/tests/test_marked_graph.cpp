#include "doctest.h"
#include "oslab/marked_graph.hpp"

using namespace oslab;
using K = ElementaryAutomorphism::Kind;

namespace {

MarkedGraph theta(Rational a, Rational b, Rational c) {
  std::vector<GraphEdge> edges{{0, 1, a, true, {}}, {0, 1, b, false, {}}, {0, 1, c, false, {}}};
  return MarkedGraph(2, 2, edges, 0, BasisTuple(2));
}

}  // namespace

TEST_CASE("validate") {
  auto r2 = MarkedGraph::standard_rose(2);
  CHECK(validate(r2).empty());
  auto big = r2.with_lengths({Rational(1), Rational(1)});
  auto v = validate(big);
  REQUIRE(v.size() == 1);
  CHECK(v[0].code == "normalization");
  std::vector<GraphEdge> edges{{0, 1, make_rational(1, 3), true, {}}, {1, 0, make_rational(1, 3), false, {}},
                               {0, 0, make_rational(1, 3), false, {}}};
  MarkedGraph val2(2, 2, edges, 0, BasisTuple(2));
  bool found = false;
  for (const auto& x : validate(val2)) found |= x.code == "valence";
  CHECK(found);
}

TEST_CASE("normalize volume") {
  auto r = MarkedGraph::standard_rose(2);
  auto a = normalize_volume(r.with_lengths({Rational(1), Rational(1)}));
  CHECK(a.edge(0).length == make_rational(1, 2));
  auto b = normalize_volume(r.with_lengths({Rational(3), Rational(1)}));
  CHECK(b.edge(0).length == make_rational(3, 4));
  CHECK(b.edge(1).length == make_rational(1, 4));
  CHECK(normalize_volume(r) == r);
  CHECK_THROWS(normalize_volume(r.with_lengths({Rational(0), Rational(1)})));
}

TEST_CASE("systole") {
  CHECK(systole(MarkedGraph::standard_rose(2)) == make_rational(1, 2));
  CHECK(systole(MarkedGraph::standard_rose(3)) == make_rational(1, 3));
  CHECK(systole(theta(make_rational(1, 2), make_rational(3, 10), make_rational(1, 5))) == make_rational(1, 2));
  auto bar = trivalent_graph(2, 1);
  CHECK(systole(bar) == make_rational(1, 3));
}

TEST_CASE("act") {
  auto r = MarkedGraph::standard_rose(2);
  CHECK(act(r, {}) == r);
  OuterAutomorphismSpec phi{{{K::RightMultiply, 1, 2, 1}}};
  auto g = act(r, phi);
  CHECK(g.edge(0).word == Word({1, 2}));
  CHECK(g.edge(1).word == Word({2}));
  OuterAutomorphismSpec psi{{{K::LeftMultiply, 2, 1, -1}, {K::Inversion, 1, 1, 1}}};
  auto lhs = act(act(r, phi), psi);
  auto rhs = act(r, psi.after(phi));
  CHECK(lhs.marking().elements() == rhs.marking().elements());
  CHECK(systole(lhs) == systole(r));
}

TEST_CASE("collapse to rose") {
  auto r = MarkedGraph::standard_rose(2);
  CHECK(collapse_tree_to_rose(r).rose == r);
  auto t = collapse_tree_to_rose(theta(make_rational(1, 3), make_rational(1, 3), make_rational(1, 3))).rose;
  CHECK(t.marking().elements() == std::vector<Word>{Word({1}), Word({2})});
  auto bar = collapse_tree_to_rose(trivalent_graph(2, 1)).rose;
  CHECK(bar.marking().elements() == std::vector<Word>{Word({1}), Word({2})});
  CHECK(validate(bar).empty());
  // Shortest tree on a theta graph: the long edge becomes a loop.
  auto th = theta(make_rational(1, 2), make_rational(3, 10), make_rational(1, 5));
  auto c = collapse_tree_to_rose(th);
  CHECK(c.petal_edge == std::vector<int>{0, 1});
  CHECK(validate(c.rose).empty());
}

TEST_CASE("retree keeps the marked point") {
  auto k4 = trivalent_graph(3, 0);
  std::vector<int> tree{3, 4, 5};
  for (int e = 0; e < k4.edge_count(); ++e) {
    if (k4.edge(e).tree) CHECK(e < 6);
  }
  auto alt = retree(k4, {0, 1, 2}, 0);
  CHECK(validate(alt).empty());
  CHECK(validate(k4).empty());
}

TEST_CASE("random instances") {
  InstanceConfig cfg;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    cfg.rank = 2 + static_cast<int>(s % 2);
    auto p = random_instance(s, cfg);
    CHECK(validate(p.a).empty());
    CHECK(validate(p.b).empty());
    CHECK(systole(p.a) >= make_rational(2, 100));
    CHECK(systole(p.b) >= make_rational(2, 100));
    auto q = random_instance(s, cfg);
    CHECK(p.a == q.a);
    CHECK(p.b == q.b);
  }
}
