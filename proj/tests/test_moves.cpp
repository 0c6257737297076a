#include <doctest.h>

#include <numbers>
#include <random>

#include "drs/calculus.hpp"
#include "drs/functions.hpp"
#include "drs/moves.hpp"

using drs::cplx;

using namespace drs;

namespace {

constexpr double kPi = std::numbers::pi;

// Structural equality of two marked surfaces: identical vertex data, and
// identical quads with matching gluing up to the order in which quads are
// stored (surgery reuses indices differently on the way back).
void check_same(const MarkedSurface& a, const MarkedSurface& b, double tol = 1e-12) {
  REQUIRE(a.dc.vertex_count() == b.dc.vertex_count());
  REQUIRE(a.dc.quad_count() == b.dc.quad_count());
  const int nq = a.dc.quad_count();
  // quads match up to storage order and even tuple rotation (same cell,
  // same rho, opposite start corner)
  auto canon_rot = [](const DoubleComplex& dc, int q) {
    const auto& c = dc.quad(q);
    std::array<int, 4> r2 = {c[2], c[3], c[0], c[1]};
    return (r2 < c) ? 2 : 0;
  };
  auto key = [&](const DoubleComplex& dc, int q) {
    const auto& c = dc.quad(q);
    return canon_rot(dc, q) == 0 ? c : std::array<int, 4>{c[2], c[3], c[0], c[1]};
  };
  std::map<std::array<int, 4>, int> of_b;
  for (int q = 0; q < nq; ++q) {
    REQUIRE(of_b.find(key(b.dc, q)) == of_b.end());
    of_b[key(b.dc, q)] = q;
  }
  std::vector<int> qmap(nq, -1);
  for (int q = 0; q < nq; ++q) {
    auto it = of_b.find(key(a.dc, q));
    REQUIRE(it != of_b.end());
    qmap[q] = it->second;
  }
  for (int q = 0; q < nq; ++q) {
    int qb = qmap[q];
    int shift = (canon_rot(b.dc, qb) - canon_rot(a.dc, q) + 4) % 4;
    CHECK(std::abs(a.dc.rho_gamma(q) - b.dc.rho_gamma(qb)) <= tol);
    for (int s = 0; s < 4; ++s) {
      Slot pa = a.dc.partner(q, s);
      Slot pb = b.dc.partner(qb, (s + shift) % 4);
      CHECK(pa.valid() == pb.valid());
      if (pa.valid()) {
        CHECK(qmap[pa.quad] == pb.quad);
        int pshift = (canon_rot(b.dc, pb.quad) - canon_rot(a.dc, pa.quad) + 4) % 4;
        CHECK((pa.side + pshift) % 4 == pb.side);
      }
    }
  }
  for (int v = 0; v < a.dc.vertex_count(); ++v) {
    CHECK(a.dc.vertex_graph(v) == b.dc.vertex_graph(v));
    CHECK(std::abs(a.angle[v] - b.angle[v]) <= tol);
  }
}

MarkedSurface random_rho_trihex(int p, int q, unsigned seed) {
  TorusFixture fx = tri_hex_torus(0.5, 0.5, 0.75, p, q);
  std::vector<std::array<int, 4>> quads;
  std::vector<double> rho;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(0.4, 2.5);
  for (int qq = 0; qq < fx.map.dc.quad_count(); ++qq) {
    quads.push_back(fx.map.dc.quad(qq));
    rho.push_back(d(rng));
  }
  return mark(DoubleComplex::build(quads, rho));
}

double df_norm(const DoubleComplex& dc, const Cochain& f) {
  Cochain df = coboundary(dc, f);
  return scalar_product(dc, df, df).real();
}

}  // namespace

TEST_CASE("total curvature equals 2 pi chi") {
  TorusFixture fx = square_torus(2, 2, 0.7);
  CHECK(std::abs(total_curvature(mark(fx.map))) < 1e-12);
  MarkedSurface g2 = mark(glued_tori_genus2(2, 2, 3));
  CHECK(std::abs(total_curvature(g2) - 2 * kPi * (-2)) < 1e-10);
  // disc: chi = 1
  CriticalMap patch = square_patch(3, 2, 0.6);
  CHECK(std::abs(total_curvature(mark(patch)) - 2 * kPi) < 1e-10);
}

TEST_CASE("tensed detection") {
  TorusFixture fx = square_torus(2, 2, 0.8);
  CHECK(is_tensed(fx.map.dc));
  MarkedSurface ms = mark(fx.map);
  // split one quad: a series middle appears
  MoveResult split = move_II_inverse(ms, 0, 0, 3.0 * ms.dc.rho_gamma(0));
  CHECK(!is_tensed(split.surface.dc));
  CHECK(move_II_sites(split.surface.dc) ==
        std::vector<int>{split.record.created});
  // fold a cone: a summit appears
  MoveResult cone = move_I_inverse(ms, 0, 1.4);
  CHECK(!is_tensed(cone.surface.dc));
  CHECK(move_I_sites(cone.surface.dc) == std::vector<int>{cone.record.created});
}

TEST_CASE("move I: insert and remove a cone") {
  MarkedSurface ms = random_rho_trihex(2, 2, 5);
  double curv0 = total_curvature(ms);
  int dim0 = holomorphic_form_dimension(ms.dc);
  for (int edge : {0, 5, 11}) {
    for (double rho_loop : {0.7, 1.0, 2.2}) {
      MoveResult ins = move_I_inverse(ms, edge, rho_loop);
      CHECK(ins.surface.dc.quad_count() == ms.dc.quad_count() + 1);
      CHECK(std::abs(total_curvature(ins.surface) - curv0) < 1e-12);
      CHECK(holomorphic_form_dimension(ins.surface.dc) == dim0);
      // the summit cone angle is 2 atan(1/rho_loop)
      CHECK(std::abs(ins.surface.angle[ins.record.created] -
                     2 * std::atan(1.0 / rho_loop)) < 1e-12);
      // removing it restores the surface exactly
      MoveResult rem = move_I(ins.surface, ins.record.created);
      check_same(rem.surface, ms);
      CHECK(std::abs(total_curvature(rem.surface) - curv0) < 1e-12);
      // undo of the removal record rebuilds the cone
      MoveResult redo = undo(rem.surface, rem.record);
      check_same(redo.surface, ins.surface);
    }
  }
  CHECK_THROWS_AS(move_I(ms, 0), error);  // not a summit
}

TEST_CASE("move II: split and merge in series/parallel") {
  MarkedSurface ms = random_rho_trihex(2, 2, 6);
  double curv0 = total_curvature(ms);
  int dim0 = holomorphic_form_dimension(ms.dc);
  for (int quad : {0, 4, 9}) {
    for (int axis : {0, 1}) {
      double series = axis == 0 || ms.dc.vertex_graph(ms.dc.corner(quad, axis)) ==
                                       Graph::gamma
                          ? ms.dc.rho_gamma(quad)
                          : 1.0 / ms.dc.rho_gamma(quad);
      // conductance of the split half, in the graph of corner(axis)
      bool on_gamma =
          ms.dc.vertex_graph(ms.dc.corner(quad, axis)) == Graph::gamma;
      double s_series = on_gamma ? ms.dc.rho_gamma(quad) : 1.0 / ms.dc.rho_gamma(quad);
      (void)series;
      MoveResult split = move_II_inverse(ms, quad, axis, 1.8 * s_series);
      CHECK(split.surface.dc.quad_count() == ms.dc.quad_count() + 1);
      CHECK(std::abs(total_curvature(split.surface) - curv0) < 1e-12);
      CHECK(holomorphic_form_dimension(split.surface.dc) == dim0);
      // merging back restores everything
      MoveResult merged = move_II(split.surface, split.record.created);
      check_same(merged.surface, ms);
      // undo of the merge record re-splits identically
      MoveResult redo = undo(merged.surface, merged.record);
      check_same(redo.surface, split.surface);
    }
  }
}

TEST_CASE("move II parameter arithmetic") {
  // parallel parameters (1,1) merge to 2 (dual 1/2); (2,3) merge to 5.
  // Split a quad whose parallel parameter is p1+p2 with the first segment
  // conductance 1/p1 and check the halves carry (p1, p2) in parallel.
  TorusFixture fx = tri_hex_torus(0.5, 0.5, 0.75, 2, 2);
  std::vector<std::array<int, 4>> quads;
  for (int q = 0; q < fx.map.dc.quad_count(); ++q) quads.push_back(fx.map.dc.quad(q));
  for (auto [p1, p2] : {std::pair{1.0, 1.0}, {2.0, 3.0}}) {
    std::vector<double> rho(quads.size(), 1.0);
    const int target = 2;
    // make the middle sit on Gamma: corner(target, 0) is on Gamma; its
    // through-diagonal conductance is the series value 1/(p1+p2)
    rho[target] = 1.0 / (p1 + p2);
    MarkedSurface ms = mark(DoubleComplex::build(quads, rho));
    REQUIRE(ms.dc.vertex_graph(ms.dc.corner(target, 0)) == Graph::gamma);
    MoveResult split = move_II_inverse(ms, target, 0, 1.0 / p1);
    CHECK(std::abs(split.record.rho1 - 1.0 / p1) < 1e-14);
    CHECK(std::abs(split.record.rho2 - 1.0 / p2) < 1e-14);
    // the two halves carry parallel (dual) parameters p1 and p2
    MoveResult merged = move_II(split.surface, split.record.created);
    check_same(merged.surface, ms);
    // and the merged quad's parallel parameter is p1 + p2
    int mq = merged.record.quad;
    double parallel = 1.0 / merged.surface.dc.rho_gamma(mq);
    CHECK(std::abs(parallel - (p1 + p2)) < 1e-13);
  }
  // a split conductance at or below the series value is rejected
  MarkedSurface ms = random_rho_trihex(2, 2, 7);
  double s = ms.dc.vertex_graph(ms.dc.corner(2, 0)) == Graph::gamma
                 ? ms.dc.rho_gamma(2)
                 : 1.0 / ms.dc.rho_gamma(2);
  CHECK_THROWS_AS(move_II_inverse(ms, 2, 0, 0.9 * s), error);
}

TEST_CASE("move III: star-triangle parameters and involution") {
  MarkedSurface ms = random_rho_trihex(2, 2, 8);
  double curv0 = total_curvature(ms);
  int dim0 = holomorphic_form_dimension(ms.dc);
  auto sites = move_III_sites(ms.dc);
  REQUIRE(!sites.empty());
  for (int centre : sites) {
    MoveResult fwd = move_III(ms, centre);
    CHECK(fwd.surface.dc.quad_count() == ms.dc.quad_count());
    CHECK(std::abs(total_curvature(fwd.surface) - curv0) < 1e-12);
    CHECK(holomorphic_form_dimension(fwd.surface.dc) == dim0);
    // star-triangle rule: rho_i rho'_i = rho1 rho2 + rho2 rho3 + rho3 rho1
    //                  = rho'1 rho'2 rho'3 / (rho'1 + rho'2 + rho'3)
    // collect the conductances around the old and the new centre
    const auto& fan_old = ms.dc.vertex_fan(centre);
    bool old_gamma = ms.dc.vertex_graph(centre) == Graph::gamma;
    double t[3], tp[3];
    for (int k = 0; k < 3; ++k) {
      double r = ms.dc.rho_gamma(fan_old[k].quad);
      t[k] = old_gamma ? 1.0 / r : r;  // triangle sides on the other graph
    }
    const auto& fan_new = fwd.surface.dc.vertex_fan(fwd.record.created);
    bool new_gamma =
        fwd.surface.dc.vertex_graph(fwd.record.created) == Graph::gamma;
    for (int k = 0; k < 3; ++k) {
      double r = fwd.surface.dc.rho_gamma(fan_new[k].quad);
      tp[k] = new_gamma ? r : 1.0 / r;  // star branches at the new centre
    }
    double sigma = t[0] * t[1] + t[1] * t[2] + t[2] * t[0];
    double prod_rule = tp[0] * tp[1] * tp[2] / (tp[0] + tp[1] + tp[2]);
    CHECK(std::abs(prod_rule - sigma) < 1e-13 * sigma);
    // each branch pairs with the opposite triangle side: the multiset of
    // products {t_i tp_j} must contain sigma three times with matching i,j
    std::vector<double> prods;
    for (int k = 0; k < 3; ++k) prods.push_back(sigma / t[k]);
    std::sort(prods.begin(), prods.end());
    std::sort(tp, tp + 3);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(tp[k] - prods[k]) < 1e-12 * prods[k]);
    // involution: applying the move at the new centre restores the surface
    MoveResult back = move_III(fwd.surface, fwd.record.created, centre);
    check_same(back.surface, ms);
    MoveResult redo = undo(fwd.surface, fwd.record);
    check_same(redo.surface, ms);
  }
}

TEST_CASE("move III worked examples") {
  // rho = (1,1,1): sigma = 3, branches 3 each; rho = (1,2,3): sigma = 11,
  // branches {11, 11/2, 11/3}
  TorusFixture fx = tri_hex_torus(0.5, 0.5, 0.75, 2, 2);
  std::vector<std::array<int, 4>> quads;
  std::vector<double> rho(fx.map.dc.quad_count(), 1.0);
  for (int q = 0; q < fx.map.dc.quad_count(); ++q) quads.push_back(fx.map.dc.quad(q));
  for (auto triple : {std::array{1.0, 1.0, 1.0}, std::array{1.0, 2.0, 3.0}}) {
    MarkedSurface ms = mark(DoubleComplex::build(quads, rho));
    int centre = move_III_sites(ms.dc)[0];
    // force the three triangle conductances around this centre
    const auto& fan = ms.dc.vertex_fan(centre);
    std::vector<double> rho2 = rho;
    bool cg = ms.dc.vertex_graph(centre) == Graph::gamma;
    for (int k = 0; k < 3; ++k)
      rho2[fan[k].quad] = cg ? 1.0 / triple[k] : triple[k];
    MarkedSurface ms2 = mark(DoubleComplex::build(quads, rho2));
    MoveResult fwd = move_III(ms2, centre);
    const auto& nf = fwd.surface.dc.vertex_fan(fwd.record.created);
    bool ng = fwd.surface.dc.vertex_graph(fwd.record.created) == Graph::gamma;
    std::vector<double> branches;
    for (int k = 0; k < 3; ++k) {
      double r = fwd.surface.dc.rho_gamma(nf[k].quad);
      branches.push_back(ng ? r : 1.0 / r);
    }
    std::sort(branches.begin(), branches.end());
    double sigma = triple[0] * triple[1] + triple[1] * triple[2] + triple[2] * triple[0];
    std::vector<double> expect = {sigma / triple[0], sigma / triple[1],
                                  sigma / triple[2]};
    std::sort(expect.begin(), expect.end());
    for (int k = 0; k < 3; ++k) CHECK(std::abs(branches[k] - expect[k]) < 1e-12);
  }
}

TEST_CASE("move III at a flat centre preserves external angles and flatness") {
  // the critical tri-hex torus has flat degree-3 centres (sigma = 1)
  TorusFixture fx = tri_hex_torus(0.7, 0.6, (1 - 0.42) / 1.3, 2, 2);
  MarkedSurface ms = mark(fx.map);
  int centre = move_III_sites(ms.dc)[0];
  CHECK(std::abs(ms.angle[centre] - 2 * kPi) < 1e-12);
  // record external angles
  const auto& fan = ms.dc.vertex_fan(centre);
  std::vector<int> externals;
  for (int k = 0; k < 3; ++k) {
    externals.push_back(ms.dc.corner(fan[k].quad, (fan[k].pos + 1) % 4));
    externals.push_back(ms.dc.corner(fan[k].quad, (fan[k].pos + 2) % 4));
  }
  MoveResult fwd = move_III(ms, centre);
  for (int v : externals) {
    int nv = fwd.record.vmap[v];
    CHECK(std::abs(fwd.surface.angle[nv] - ms.angle[v]) < 1e-12);
  }
  // the new centre is flat too
  CHECK(std::abs(fwd.surface.angle[fwd.record.created] - 2 * kPi) < 1e-12);
}

TEST_CASE("transport: holomorphic functions cross the moves") {
  CriticalMap patch = tri_hex_patch(3);
  auto zk = powers(patch, 2);
  Cochain f = zk[2];  // Z^2
  MarkedSurface ms = mark(patch);
  // pick an interior degree-3 centre
  int centre = -1;
  for (int v : move_III_sites(ms.dc))
    if (ms.dc.vertex_interior(v)) centre = v;
  REQUIRE(centre >= 0);
  double n0 = df_norm(ms.dc, f);
  MoveResult fwd = move_III(ms, centre);
  Cochain f1 = transport(ms.dc, fwd.surface.dc, f, fwd.record);
  CHECK(is_holomorphic_function(fwd.surface.dc, f1, 1e-10 * f1.max_abs()).ok);
  CHECK(std::abs(df_norm(fwd.surface.dc, f1) - n0) < 1e-10 * n0);
  // round trip is the identity
  MoveResult back = move_III(fwd.surface, fwd.record.created, centre);
  Cochain f2 = transport(fwd.surface.dc, back.surface.dc, f1, back.record);
  for (int v = 0; v < ms.dc.vertex_count(); ++v)
    CHECK(std::abs(f2.val[v] - f.val[v]) < 1e-12 * std::max(1.0, f.max_abs()));
  // move II split/merge transport
  MoveResult split = move_II_inverse(ms, 0, 0, 2.5 * ms.dc.rho_gamma(0));
  Cochain g1 = transport(ms.dc, split.surface.dc, f, split.record);
  CHECK(is_holomorphic_function(split.surface.dc, g1, 1e-10 * g1.max_abs()).ok);
  CHECK(std::abs(df_norm(split.surface.dc, g1) - n0) < 1e-10 * n0);
  MoveResult merged = move_II(split.surface, split.record.created);
  Cochain g2 = transport(split.surface.dc, merged.surface.dc, g1, merged.record);
  for (int v = 0; v < ms.dc.vertex_count(); ++v)
    CHECK(std::abs(g2.val[v] - f.val[v]) < 1e-12 * std::max(1.0, f.max_abs()));
  // move I: the summit value equals the opposite vertex
  int interior_edge = -1;
  for (int e = 0; e < ms.dc.diamond_edge_count() && interior_edge < 0; ++e)
    if (ms.dc.edge_interior(e)) interior_edge = e;
  MoveResult cone = move_I_inverse(ms, interior_edge, 1.3);
  Cochain h1 = transport(ms.dc, cone.surface.dc, f, cone.record);
  CHECK(is_holomorphic_function(cone.surface.dc, h1, 1e-10 * h1.max_abs()).ok);
  // constants stay constants
  Cochain cst(ms.dc, Carrier::lambda, 0);
  for (auto& v : cst.val) v = cplx(0.4, -0.1);
  Cochain cst2 = transport(ms.dc, fwd.surface.dc, cst, fwd.record);
  for (auto& v : cst2.val) CHECK(std::abs(v - cplx(0.4, -0.1)) < 1e-15);
  // non-holomorphic input is rejected
  Cochain bad = f;
  bad.val[0] += 1.0;
  CHECK_THROWS_AS(transport(ms.dc, fwd.surface.dc, bad, fwd.record), error);
}

TEST_CASE("200 random moves preserve curvature and the holomorphic dimension") {
  MarkedSurface ms = random_rho_trihex(2, 2, 42);
  const double curv0 = total_curvature(ms);
  const int dim0 = holomorphic_form_dimension(ms.dc);
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int applied = 0;
  for (int step = 0; applied < 200 && step < 1000; ++step) {
    double pick = unif(rng);
    try {
      if (pick < 0.25) {
        auto sites = move_III_sites(ms.dc);
        if (sites.empty()) continue;
        ms = move_III(ms, sites[rng() % sites.size()]).surface;
      } else if (pick < 0.45) {
        int quad = static_cast<int>(rng() % ms.dc.quad_count());
        int axis = static_cast<int>(rng() % 4);
        bool on_gamma =
            ms.dc.vertex_graph(ms.dc.corner(quad, axis)) == Graph::gamma;
        double s = on_gamma ? ms.dc.rho_gamma(quad) : 1.0 / ms.dc.rho_gamma(quad);
        ms = move_II_inverse(ms, quad, axis, s * (1.3 + unif(rng))).surface;
      } else if (pick < 0.65) {
        auto sites = move_II_sites(ms.dc);
        if (sites.empty()) continue;
        ms = move_II(ms, sites[rng() % sites.size()]).surface;
      } else if (pick < 0.8) {
        int edge = static_cast<int>(rng() % ms.dc.diamond_edge_count());
        ms = move_I_inverse(ms, edge, 0.4 + 2 * unif(rng)).surface;
      } else {
        auto sites = move_I_sites(ms.dc);
        if (sites.empty()) continue;
        ms = move_I(ms, sites[rng() % sites.size()]).surface;
      }
    } catch (const error&) {
      continue;  // inapplicable configuration drawn; try another
    }
    ++applied;
    CHECK(std::abs(total_curvature(ms) - curv0) < 1e-11);
    if (applied % 20 == 0) CHECK(holomorphic_form_dimension(ms.dc) == dim0);
  }
  CHECK(applied == 200);
  CHECK(holomorphic_form_dimension(ms.dc) == dim0);
}

TEST_CASE("move angle deltas match the arctan formulas") {
  MarkedSurface ms = random_rho_trihex(2, 2, 31);
  // cone insertion at rho_loop = 1: the mouth vertices gain pi/2 and pi
  int edge = -1;
  for (int e = 0; e < ms.dc.diamond_edge_count() && edge < 0; ++e)
    if (ms.dc.edge_interior(e)) edge = e;
  int x = ms.dc.edge_tail(edge), w = ms.dc.edge_head(edge);
  if (ms.dc.vertex_graph(x) == Graph::gamma_star) std::swap(x, w);
  MoveResult ins = move_I_inverse(ms, edge, 1.0);
  CHECK(std::abs(ins.surface.angle[ins.record.created] - kPi / 2) < 1e-13);
  // x (same graph as the summit) gains 2 atan(1/rho) = pi/2, w gains
  // 4 atan(rho) = pi
  CHECK(std::abs(ins.surface.angle[ins.record.vmap[x]] - ms.angle[x] - kPi / 2) <
        1e-13);
  CHECK(std::abs(ins.surface.angle[ins.record.vmap[w]] - ms.angle[w] - kPi) < 1e-13);
  // series split: the far corners gain 2 atan(1/s_i) - 2 atan(1/s),
  // the parallel ends gain 2 atan(p1) + 2 atan(p2) - 2 atan(p1 + p2)
  int quad = 3;
  std::array<int, 4> r = {ms.dc.corner(quad, 3), ms.dc.corner(quad, 0),
                          ms.dc.corner(quad, 1), ms.dc.corner(quad, 2)};
  bool og = ms.dc.vertex_graph(r[1]) == Graph::gamma;
  double s = og ? ms.dc.rho_gamma(quad) : 1.0 / ms.dc.rho_gamma(quad);
  double s1 = 2.1 * s, s2 = 1.0 / (1.0 / s - 1.0 / s1);
  MoveResult split = move_II_inverse(ms, quad, 0, s1);
  auto delta = [&](int v) {
    return split.surface.angle[split.record.vmap[v]] - ms.angle[v];
  };
  // far corners: angle = 2 atan(conductance of the diagonal through them)
  CHECK(std::abs(delta(r[1]) - (2 * std::atan(s1) - 2 * std::atan(s))) < 1e-13);
  CHECK(std::abs(delta(r[3]) - (2 * std::atan(s2) - 2 * std::atan(s))) < 1e-13);
  double p1 = 1 / s1, p2 = 1 / s2;
  for (int v : {r[0], r[2]})
    CHECK(std::abs(delta(v) - (2 * std::atan(p1) + 2 * std::atan(p2) -
                               2 * std::atan(p1 + p2))) < 1e-13);
  // the middle vertex carries 2 atan(s1) + 2 atan(s2)
  CHECK(std::abs(split.surface.angle[split.record.created] -
                 (2 * std::atan(s1) + 2 * std::atan(s2))) < 1e-13);
}
