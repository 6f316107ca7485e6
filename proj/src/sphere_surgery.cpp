#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "oslab/sphere.hpp"

namespace oslab {

namespace {

// A sphere of a raw (possibly non-simple) set. Its stored lift p is the
// canonical translate, by k, of the lift produced from the parent's lift.
struct Raw {
  EndPartition p;
  std::vector<int> key;
  int parent = -1;
  Word k;
  bool surgered = false;
  bool mixed = false;
  int side = 0;
  int copy = 0;
  std::optional<TreeVertex> anchor;  // a vertex of the raw component, in p's frame
  Rational weight;
  int origin = -1;
};

struct Instance {
  int i = 0;
  Word g;
};

}  // namespace

struct RawStage {
  std::vector<Raw> s;
  std::shared_ptr<const RawStage> prev;
  bool doubling = false;
};

namespace {

// Side of instance b containing instance a (own orientation of b).
int rel(const SphereContext& ctx, const RawStage& st, const Instance& a, const Instance& b) {
  const Raw& c = st.s[static_cast<std::size_t>(a.i)];
  const Raw& d = st.s[static_cast<std::size_t>(b.i)];
  const EndPartition P = ctx.translate(c.p, a.g);
  const EndPartition Q = ctx.translate(d.p, b.g);
  const int direct = ctx.key(P) == ctx.key(Q) ? 0 : ctx.side_of(P, Q);
  if (direct != 0) return direct;
  if (!st.prev) throw std::logic_error("parallel spheres in a simple system");
  if (st.doubling) {
    if (c.parent == d.parent && a.g == b.g) return c.copy;
    throw std::logic_error("parallel spheres of distinct origins after doubling");
  }
  const RawStage& prev = *st.prev;
  const Instance pc{c.parent, a.g * c.k};
  const Instance pd{d.parent, b.g * d.k};
  if (pc.i == pd.i && pc.g == pd.g) {
    if (!c.anchor) throw std::logic_error("sibling without an anchor");
    return ctx.vertex_sign(Q, ctx.translate(*c.anchor, a.g));
  }
  if (!d.surgered) return rel(ctx, prev, pc, pd);
  const EndPartition PC = ctx.translate(prev.s[static_cast<std::size_t>(pc.i)].p, pc.g);
  if (ctx.key(PC) != ctx.key(Q)) {
    const int x = ctx.side_of(PC, Q);
    if (x != 0) return x;
  }
  if (d.mixed) throw std::logic_error("parallel comparison across a two-sided surgery");
  const int z = rel(ctx, prev, pc, pd);
  return z == d.side ? d.side : -d.side;
}

bool has_single_circle(const SphereContext& ctx, const SphereSystem& s) {
  std::vector<int> count(static_cast<std::size_t>(ctx.a().edge_count()), 0);
  for (const auto& w : s.spheres) {
    for (const auto& te : w.p.tau) ++count[static_cast<std::size_t>(te.edge)];
  }
  return std::find(count.begin(), count.end(), 1) != count.end();
}

}  // namespace

SurgeryState::SurgeryState(const SphereContext& ctx, const SphereSystem& s) : ctx_(&ctx) {
  auto st = std::make_shared<RawStage>();
  for (std::size_t i = 0; i < s.spheres.size(); ++i) {
    Raw r;
    r.p = s.spheres[i].p;
    r.key = ctx.key(r.p);
    r.weight = s.spheres[i].weight;
    r.origin = static_cast<int>(i);
    st->s.push_back(std::move(r));
  }
  stage_ = std::move(st);
}

std::size_t SurgeryState::size() const { return stage_->s.size(); }
const EndPartition& SurgeryState::sphere(std::size_t i) const { return stage_->s.at(i).p; }
const Rational& SurgeryState::weight(std::size_t i) const { return stage_->s.at(i).weight; }
int SurgeryState::copy(std::size_t i) const { return stage_->s.at(i).copy; }
int SurgeryState::origin(std::size_t i) const { return stage_->s.at(i).origin; }

std::size_t SurgeryState::circles() const {
  std::size_t c = 0;
  for (const auto& r : stage_->s) c += r.p.circles();
  return c;
}

int SurgeryState::side(std::size_t i, const Word& gi, std::size_t j, const Word& gj) const {
  if (i >= size() || j >= size()) throw std::out_of_range("sphere index out of range");
  return rel(*ctx_, *stage_, {static_cast<int>(i), gi}, {static_cast<int>(j), gj});
}

SurgeryState SurgeryState::doubled() const {
  auto st = std::make_shared<RawStage>();
  st->prev = stage_;
  st->doubling = true;
  for (std::size_t i = 0; i < stage_->s.size(); ++i) {
    const Raw& b = stage_->s[i];
    for (int c : {-1, 1}) {
      Raw r;
      r.p = b.p;
      r.key = b.key;
      r.parent = static_cast<int>(i);
      r.copy = c;
      r.weight = b.weight / 2;
      r.origin = b.origin;
      st->s.push_back(std::move(r));
    }
  }
  return SurgeryState(*ctx_, std::move(st));
}

std::vector<SurgeryMove> SurgeryState::find_innermost(PassRecord* rec) const {
  const SphereContext& ctx = *ctx_;
  const RawStage& st = *stage_;
  std::vector<SurgeryMove> moves;
  for (int eps = 0; eps < ctx.a().edge_count(); ++eps) {
    std::vector<std::pair<Instance, TreeEdge>> circles;
    for (std::size_t i = 0; i < st.s.size(); ++i) {
      for (const auto& te : st.s[i].p.tau) {
        if (te.edge == eps) circles.push_back({{static_cast<int>(i), te.h.inverse()}, te});
      }
    }
    for (std::size_t x = 0; x < circles.size(); ++x) {
      bool inner[2] = {true, true};
      for (std::size_t y = 0; y < circles.size() && (inner[0] || inner[1]); ++y) {
        if (x == y) continue;
        inner[rel(ctx, st, circles[y].first, circles[x].first) > 0 ? 1 : 0] = false;
      }
      int chosen = 0;
      if (inner[0] && inner[1]) {
        if (rec) ++rec->lone_circles;
        const int copy = st.s[static_cast<std::size_t>(circles[x].first.i)].copy;
        chosen = copy != 0 ? -copy : 1;
      } else if (inner[1]) {
        chosen = 1;
      } else if (inner[0]) {
        chosen = -1;
      }
      if (chosen != 0) moves.push_back({circles[x].first.i, circles[x].second, chosen});
    }
  }
  return moves;
}

SurgeryState SurgeryState::surgery_pass(const std::vector<SurgeryMove>& moves, PassRecord* rec) const {
  const SphereContext& ctx = *ctx_;
  const CoverTree& t = ctx.tree();
  const RawStage& st = *stage_;
  std::map<int, std::map<TreeEdge, int>> cuts;
  for (const auto& m : moves) {
    if (m.sphere < 0 || static_cast<std::size_t>(m.sphere) >= st.s.size()) throw std::invalid_argument("inconsistent move set");
    const auto& tau = st.s[static_cast<std::size_t>(m.sphere)].p.tau;
    if (!std::binary_search(tau.begin(), tau.end(), m.circle)) throw std::invalid_argument("inconsistent move set");
    auto [it, fresh] = cuts[m.sphere].emplace(m.circle, m.side);
    if (!fresh && it->second != m.side) throw std::invalid_argument("inconsistent move set");
  }
  if (rec) rec->moves = moves;

  auto out = std::make_shared<RawStage>();
  out->prev = stage_;
  for (std::size_t i = 0; i < st.s.size(); ++i) {
    const Raw& par = st.s[i];
    auto it = cuts.find(static_cast<int>(i));
    if (it == cuts.end()) {
      Raw r = par;
      r.parent = static_cast<int>(i);
      r.k = Word();
      r.surgered = false;
      r.mixed = false;
      r.side = 0;
      r.anchor.reset();
      out->s.push_back(std::move(r));
      continue;
    }
    const auto& cut = it->second;
    int side = cut.begin()->second;
    bool mixed = false;
    for (const auto& [e, x] : cut) mixed = mixed || x != side;
    if (mixed) {
      if (rec) ++rec->mixed_side_spheres;
      side = 0;
    }
    // Components of the support minus the cut edges; each cut edge becomes an
    // exit facing away from its disk.
    const Support sup = ctx.support(par.p);
    std::vector<TreeVertex> verts(sup.vertices.begin(), sup.vertices.end());
    std::map<TreeVertex, int> index;
    for (std::size_t v = 0; v < verts.size(); ++v) index[verts[v]] = static_cast<int>(v);
    std::vector<int> uf(verts.size());
    std::iota(uf.begin(), uf.end(), 0);
    auto find = [&](int v) {
      while (uf[static_cast<std::size_t>(v)] != v) v = uf[static_cast<std::size_t>(v)];
      return v;
    };
    for (const auto& e : sup.edges) {
      if (!cut.count(e)) uf[static_cast<std::size_t>(find(index[t.src(e)]))] = find(index[t.dst(e)]);
    }
    std::map<int, Support> comps;
    for (const auto& v : verts) comps[find(index[v])].vertices.insert(v);
    for (const auto& e : sup.edges) {
      if (!cut.count(e)) comps[find(index[t.src(e)])].edges.insert(e);
    }
    for (const auto& [he, sign] : sup.exits) comps[find(index[he.v])].exits[he] = sign;
    for (const auto& [e, x] : cut) {
      for (const TreeVertex& v : {t.src(e), t.dst(e)}) {
        for (auto o : t.half_edges(v.u)) {
          if (t.lift(v, o) == e) comps[find(index[v])].exits[{v, o}] = -x;
        }
      }
    }
    std::vector<Raw> kids;
    for (auto& [root, comp] : comps) {
      const TreeVertex anchor = *comp.vertices.begin();
      auto m = ctx.minimize(comp);
      if (!m) {
        if (rec) ++rec->trivial_spheres;
        continue;
      }
      Raw r;
      r.k = ctx.canonical_translation(*m);
      r.p = ctx.translate(*m, r.k);
      r.key = ctx.key(r.p);
      r.parent = static_cast<int>(i);
      r.surgered = true;
      r.mixed = mixed;
      r.side = side;
      r.copy = par.copy;
      r.anchor = ctx.translate(anchor, r.k);
      r.origin = par.origin;
      kids.push_back(std::move(r));
    }
    if (kids.empty()) throw std::logic_error("surgery left no nontrivial sphere");
    std::map<std::vector<int>, int> per_class;
    for (const auto& r : kids) ++per_class[r.key];
    for (auto& r : kids) {
      r.weight = par.weight / static_cast<long>(per_class.size()) / per_class[r.key];
      out->s.push_back(std::move(r));
    }
  }
  return SurgeryState(ctx, std::move(out));
}

SurgeryState::Projection SurgeryState::project() const {
  const SphereContext& ctx = *ctx_;
  const RawStage& st = *stage_;
  std::map<std::vector<int>, std::vector<int>> classes;
  for (std::size_t i = 0; i < st.s.size(); ++i) classes[st.s[i].key].push_back(static_cast<int>(i));
  Projection out;
  for (const auto& [key, members] : classes) {
    WeightedSphere w;
    const EndPartition& p = st.s[static_cast<std::size_t>(members.front())].p;
    const EndPartition f = ctx.flipped(p);
    w.p = ctx.oriented_key(p) <= ctx.oriented_key(f) ? p : f;
    w.weight = 0;
    int balance = 0;
    for (int m : members) {
      const Raw& r = st.s[static_cast<std::size_t>(m)];
      w.weight += r.weight;
      w.origin[r.origin] += r.weight;
      balance += r.copy;
    }
    out.system.spheres.push_back(std::move(w));
    out.class_size.push_back(static_cast<int>(members.size()));
    out.copy_balance.push_back(balance);
  }
  return out;
}

namespace {

void fill_genealogy(const SphereSystem& before, const SphereSystem& after, const std::vector<bool>& surgered,
                    DoubleStep& step) {
  step.genealogy.clear();
  for (std::size_t q = 0; q < before.spheres.size(); ++q) {
    Genealogy g;
    g.sphere = static_cast<int>(q);
    for (std::size_t c = 0; c < after.spheres.size(); ++c) {
      auto it = after.spheres[c].origin.find(static_cast<int>(q));
      if (it != after.spheres[c].origin.end() && it->second > 0) g.children.push_back({static_cast<int>(c), it->second});
    }
    g.subdivided = surgered[q];
    g.case_kind = !g.subdivided ? 1 : (g.children.size() == 1 ? 2 : 3);
    step.genealogy.push_back(std::move(g));
  }
}

void mark_surgered(const SurgeryState& st, const std::vector<SurgeryMove>& moves, std::vector<bool>& mark) {
  for (const auto& m : moves) mark[static_cast<std::size_t>(st.origin(static_cast<std::size_t>(m.sphere)))] = true;
}

}  // namespace

std::pair<SphereSystem, std::optional<SphereSystem>> double_surgery_step(const SphereContext& ctx, const SphereSystem& s,
                                                                          DoubleStep& step) {
  step.single_circle = has_single_circle(ctx, s);
  std::vector<bool> mark(s.spheres.size(), false);
  const SurgeryState st1 = SurgeryState(ctx, s).doubled();
  const auto moves1 = st1.find_innermost(&step.first);
  const SurgeryState st2 = st1.surgery_pass(moves1, &step.first);
  mark_surgered(st1, moves1, mark);
  auto odd = st2.project();
  if (odd.system.circles() == 0) {
    step.half = true;
    step.exceptional = step.single_circle;
    fill_genealogy(s, odd.system, mark, step);
    return {odd.system, std::nullopt};
  }
  const auto moves2 = st2.find_innermost(&step.second);
  const SurgeryState st3 = st2.surgery_pass(moves2, &step.second);
  mark_surgered(st2, moves2, mark);
  auto even = st3.project();
  step.exact_double = std::all_of(even.copy_balance.begin(), even.copy_balance.end(), [](int b) { return b == 0; });
  step.exceptional = step.single_circle || !step.exact_double;
  fill_genealogy(s, even.system, mark, step);
  return {odd.system, even.system};
}

}  // namespace oslab
