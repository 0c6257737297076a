#include <doctest.h>

#include <random>

#include "drs/calculus.hpp"
#include "drs/complex.hpp"
#include "drs/critical.hpp"

using namespace drs;

namespace {

Cochain random_cochain(const DoubleComplex& dc, Carrier c, int grade, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Cochain f(dc, c, grade);
  for (auto& v : f.val) v = cplx(d(rng), d(rng));
  return f;
}

Chain random_chain(const DoubleComplex& dc, Carrier c, int grade, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(-2, 2);
  Chain ch(c, grade);
  for (int i = 0; i < dc.cell_count(c, grade); ++i) ch.add(i, d(rng));
  return ch;
}

}  // namespace

TEST_CASE("single quad disc") {
  DoubleComplex dc = DoubleComplex::build({{0, 1, 2, 3}}, {1.0});
  CHECK(dc.vertex_count() == 4);
  CHECK(dc.quad_count() == 1);
  CHECK(dc.diamond_edge_count() == 4);
  CHECK(!dc.closed());
  CHECK(dc.boundary_edge_count() == 4);
  CHECK(dc.vertex_graph(0) == Graph::gamma);
  CHECK(dc.vertex_graph(1) == Graph::gamma_star);
  CHECK(dc.vertex_graph(2) == Graph::gamma);
  // face boundary is the 4 sides
  Chain b = cell_boundary(dc, Carrier::diamond, 2, 0);
  CHECK(b.coef.size() == 4);
  Chain bb = boundary(dc, b);
  CHECK(bb.empty());
}

TEST_CASE("square torus cell counts and genus") {
  for (auto [p, q] : {std::pair{1, 1}, {2, 3}}) {
    TorusFixture fx = square_torus(p, q, 0.7);
    const DoubleComplex& dc = fx.map.dc;
    CHECK(dc.closed());
    CHECK(dc.quad_count() == 4 * p * q);
    CHECK(dc.vertex_count() == 4 * p * q);
    CHECK(dc.diamond_edge_count() == 8 * p * q);
    CHECK(dc.genus() == 1);
    // flat: every cone angle is 2 pi
    for (double a : fx.map.cone_angle) CHECK(a == doctest::Approx(2 * 3.14159265358979324));
  }
}

TEST_CASE("three-quad torus builds and has genus 1") {
  // 3 quads, 3 vertices, 6 edges: chi = 0. Corners alternate between the two
  // colour classes {0} u {1,2}: quads (0,1,0,2) folded.
  // Use explicit gluing through the move machinery instead: simplest is the
  // 1x1 square torus quotient relabelled, but a genuine 3-quad torus needs
  // double edges, which build() by vertex pairs rejects. Exercise the
  // explicit-gluing path.
  // quads: Q0=(0,1,2,3), Q1=(2,1,0,4)?? -- keep it simple: the hexagonal
  // torus with one cell has 3 quads.
  TorusFixture fx = tri_hex_torus(1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0),
                                  1.0 / std::sqrt(3.0), 1, 1);
  CHECK(fx.map.dc.quad_count() == 3);
  CHECK(fx.map.dc.vertex_count() == 3);
  CHECK(fx.map.dc.diamond_edge_count() == 6);
  CHECK(fx.map.dc.genus() == 1);
}

TEST_CASE("build rejects bad input") {
  // corner 1 of the second quad would need both colours
  CHECK_THROWS_AS(DoubleComplex::build({{0, 1, 2, 3}, {0, 2, 1, 4}}, {1.0, 1.0}), error);
  // edge in more than two quads
  CHECK_THROWS_AS(DoubleComplex::build({{0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 2, 5}},
                                       {1.0, 1.0, 1.0}),
                  error);
  CHECK_THROWS_AS(DoubleComplex::build({{0, 1, 2, 3}}, {-1.0}), error);
}

TEST_CASE("boundary of boundary vanishes on random chains") {
  TorusFixture fx = square_torus(2, 2, 0.6);
  const DoubleComplex& dc = fx.map.dc;
  for (unsigned seed : {1u, 2u, 3u}) {
    for (Carrier c : {Carrier::diamond, Carrier::lambda}) {
      Chain two = random_chain(dc, c, 2, seed);
      Chain one = boundary(dc, two);
      CHECK(boundary(dc, one).empty());
    }
  }
}

TEST_CASE("d of d vanishes and Stokes duality holds") {
  TorusFixture fx = square_torus(2, 1, 1.0);
  const DoubleComplex& dc = fx.map.dc;
  for (Carrier c : {Carrier::diamond, Carrier::lambda}) {
    Cochain f = random_cochain(dc, c, 0, 7);
    Cochain ddf = coboundary(dc, coboundary(dc, f));
    CHECK(ddf.max_abs() < 1e-13);
    // <df, c> = <f, boundary c> on 1- and 2-chains
    Chain ch = random_chain(dc, c, 1, 11);
    CHECK(std::abs(pair(coboundary(dc, f), ch) - pair(f, boundary(dc, ch))) < 1e-12);
    Cochain a = random_cochain(dc, c, 1, 17);
    Chain ch2 = random_chain(dc, c, 2, 13);
    CHECK(std::abs(pair(coboundary(dc, a), ch2) - pair(a, boundary(dc, ch2))) < 1e-12);
  }
}

TEST_CASE("grade errors") {
  DoubleComplex dc = DoubleComplex::build({{0, 1, 2, 3}}, {1.0});
  Chain zero(Carrier::diamond, 0);
  zero.add(0, 1);
  CHECK_THROWS_AS(boundary(dc, zero), error);
  Cochain two(dc, Carrier::diamond, 2);
  CHECK_THROWS_AS(coboundary(dc, two), error);
}

TEST_CASE("biconstant is locally constant") {
  TorusFixture fx = square_torus(1, 2, 0.5);
  Cochain eps = biconstant(fx.map.dc, Carrier::lambda);
  Cochain de = coboundary(fx.map.dc, eps);
  CHECK(de.max_abs() < 1e-15);
  // on the diamond d eps is +-2 on every edge
  Cochain epsd = biconstant(fx.map.dc, Carrier::diamond);
  Cochain ded = coboundary(fx.map.dc, epsd);
  for (auto& v : ded.val) CHECK(std::abs(std::abs(v) - 2.0) < 1e-15);
}

TEST_CASE("genus-2 glued tori fixture") {
  DoubleComplex dc = glued_tori_genus2(2, 2, 1);
  CHECK(dc.closed());
  CHECK(dc.genus() == 2);
  CHECK(dc.vertex_count() == 2 * 16 - 4);
  CHECK(dc.quad_count() == 2 * 16 - 2);
}
