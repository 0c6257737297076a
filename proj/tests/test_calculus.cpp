#include <doctest.h>

#include <random>

#include "drs/calculus.hpp"
#include "drs/critical.hpp"

using namespace drs;

namespace {

constexpr cplx kI{0.0, 1.0};

Cochain random_form(const DoubleComplex& dc, Carrier c, int grade, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Cochain f(dc, c, grade);
  for (auto& v : f.val) v = cplx(d(rng), d(rng));
  return f;
}

}  // namespace

TEST_CASE("hodge star squares to minus identity on 1-forms") {
  TorusFixture fx = square_torus(2, 1, 0.9);
  Cochain a = random_form(fx.map.dc, Carrier::lambda, 1, 3);
  Cochain ssa = hodge_star(fx.map.dc, hodge_star(fx.map.dc, a));
  CHECK((ssa + a).max_abs() < 1e-14);
}

TEST_CASE("star on functions and 2-forms") {
  TorusFixture fx = square_torus(1, 1, 0.785398163397448);
  const DoubleComplex& dc = fx.map.dc;
  Cochain one(dc, Carrier::lambda, 0);
  for (auto& v : one.val) v = 1.0;
  Cochain s = hodge_star(dc, one);
  CHECK(s.grade == 2);
  for (int v = 0; v < dc.vertex_count(); ++v) CHECK(s.val[v] == cplx(1.0));
  Cochain back = hodge_star(dc, s);
  CHECK((back - one).max_abs() < 1e-15);
}

TEST_CASE("dZ is holomorphic: *dZ = -i dZ on critical maps") {
  for (double th : {0.785398163397448, 0.6, 1.1}) {
    TorusFixture fx = square_torus(2, 2, th);
    Cochain dz = fx.map.dz_lambda();
    Cochain sdz = hodge_star(fx.map.dc, dz);
    CHECK((sdz + dz * kI).max_abs() < 1e-13);
    CHECK(is_holomorphic_form(fx.map.dc, dz, 1e-12).ok);
  }
}

TEST_CASE("laplacian kills constants, the biconstant, and Re Z") {
  TorusFixture fx = square_torus(2, 2, 0.7);
  const DoubleComplex& dc = fx.map.dc;
  Cochain c(dc, Carrier::lambda, 0);
  for (auto& v : c.val) v = 2.5;
  CHECK(laplacian(dc, c).max_abs() < 1e-14);
  CHECK(laplacian(dc, biconstant(dc, Carrier::lambda)).max_abs() < 1e-14);
  // Re Z is harmonic at interior vertices of a planar patch
  CriticalMap patch = square_patch(6, 6, 0.7);
  Cochain re(patch.dc, Carrier::lambda, 0);
  for (int v = 0; v < patch.dc.vertex_count(); ++v) re.val[v] = patch.z(v).real();
  Cochain lap = laplacian(patch.dc, re);
  for (int v = 0; v < patch.dc.vertex_count(); ++v)
    if (patch.dc.vertex_interior(v)) CHECK(std::abs(lap.val[v]) < 1e-13);
}

TEST_CASE("laplacian equals -*d*d on functions") {
  TorusFixture fx = square_torus(2, 1, 0.55);
  const DoubleComplex& dc = fx.map.dc;
  Cochain f = random_form(dc, Carrier::lambda, 0, 5);
  Cochain direct = laplacian(dc, f);
  Cochain composed =
      hodge_star(dc, coboundary(dc, hodge_star(dc, coboundary(dc, f)))) * cplx(-1.0);
  CHECK((direct - composed).max_abs() < 1e-12);
}

TEST_CASE("holomorphy predicate on functions") {
  TorusFixture fx = square_torus(2, 2, 0.785398163397448);
  const DoubleComplex& dc = fx.map.dc;
  // the biconstant satisfies Cauchy-Riemann (both sides vanish)
  CHECK(is_holomorphic_function(dc, biconstant(dc, Carrier::lambda), 1e-14).ok);
  // Z on a planar patch is holomorphic, conj(Z) is not
  CriticalMap patch = square_patch(4, 4, 0.6);
  Cochain z(patch.dc, Carrier::lambda, 0), zb(patch.dc, Carrier::lambda, 0);
  for (int v = 0; v < patch.dc.vertex_count(); ++v) {
    z.val[v] = patch.z(v);
    zb.val[v] = std::conj(patch.z(v));
  }
  CHECK(is_holomorphic_function(patch.dc, z, 1e-13).ok);
  auto rep = is_holomorphic_function(patch.dc, zb, 1e-13);
  CHECK(!rep.ok);
  CHECK(rep.residual > 0.1);
}

TEST_CASE("diamond wedge Leibniz rule") {
  TorusFixture fx = square_torus(2, 2, 0.8);
  const DoubleComplex& dc = fx.map.dc;
  for (unsigned seed = 0; seed < 20; ++seed) {
    Cochain f = random_form(dc, Carrier::diamond, 0, 100 + seed);
    Cochain a = random_form(dc, Carrier::diamond, 1, 200 + seed);
    Cochain lhs = coboundary(dc, wedge_diamond(dc, f, a));
    Cochain rhs = wedge_diamond(dc, coboundary(dc, f), a);
    Cochain rhs2 = wedge_diamond(dc, f, coboundary(dc, a));
    CHECK((lhs - rhs - rhs2).max_abs() < 1e-13);
  }
}

TEST_CASE("wedge of a 1-form with itself vanishes") {
  TorusFixture fx = square_torus(1, 2, 1.0);
  Cochain a = random_form(fx.map.dc, Carrier::diamond, 1, 9);
  CHECK(wedge_diamond(fx.map.dc, a, a).max_abs() < 1e-14);
}

TEST_CASE("unit function is a wedge unit") {
  TorusFixture fx = square_torus(1, 1, 0.9);
  const DoubleComplex& dc = fx.map.dc;
  Cochain one(dc, Carrier::diamond, 0);
  for (auto& v : one.val) v = 1.0;
  Cochain a = random_form(dc, Carrier::diamond, 1, 21);
  CHECK((wedge_diamond(dc, one, a) - a).max_abs() < 1e-15);
}

TEST_CASE("heterogeneous wedge: dZ wedge dZ = 0 and scalar product route") {
  TorusFixture fx = square_torus(2, 2, 0.6);
  const DoubleComplex& dc = fx.map.dc;
  Cochain dz = fx.map.dz_lambda();
  CHECK(wedge_hetero(dc, dz, dz).max_abs() < 1e-13);
  // forms supported on the same graph wedge to zero
  Cochain g(dc, Carrier::lambda, 1), g2(dc, Carrier::lambda, 1);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int q = 0; q < dc.quad_count(); ++q) {
    g.val[2 * q] = d(rng);
    g2.val[2 * q] = d(rng);
  }
  CHECK(wedge_hetero(dc, g, g2).max_abs() == 0.0);
  // (a,b) = iint a wedge *conj(b)
  for (unsigned seed = 0; seed < 100; ++seed) {
    Cochain a = random_form(dc, Carrier::lambda, 1, 300 + seed);
    Cochain b = random_form(dc, Carrier::lambda, 1, 400 + seed);
    Cochain bbar = b;
    for (auto& v : bbar.val) v = std::conj(v);
    cplx route1 = scalar_product(dc, a, b);
    cplx route2 = integrate(dc, wedge_hetero(dc, a, hodge_star(dc, bbar)));
    CHECK(std::abs(route1 - route2) < 1e-12);
  }
}

TEST_CASE("scalar product is hermitian and positive") {
  TorusFixture fx = square_torus(2, 1, 0.75);
  const DoubleComplex& dc = fx.map.dc;
  Cochain a = random_form(dc, Carrier::lambda, 1, 31);
  Cochain b = random_form(dc, Carrier::lambda, 1, 32);
  CHECK(std::abs(scalar_product(dc, a, b) - std::conj(scalar_product(dc, b, a))) <
        1e-13);
  CHECK(scalar_product(dc, a, a).real() > 0.0);
  CHECK(std::abs(scalar_product(dc, a, a).imag()) < 1e-13);
  Cochain zero(dc, Carrier::lambda, 1);
  CHECK(std::abs(scalar_product(dc, zero, zero)) == 0.0);
}

TEST_CASE("averaging: identity on functions, kernel, commutation with d") {
  TorusFixture fx = square_torus(2, 2, 0.785398163397448);
  const DoubleComplex& dc = fx.map.dc;
  Cochain eps = biconstant(dc, Carrier::diamond);
  CHECK(average(dc, coboundary(dc, eps)).max_abs() < 1e-15);
  Cochain f = random_form(dc, Carrier::diamond, 0, 41);
  Cochain lhs = average(dc, coboundary(dc, f));
  Cochain fl(dc, Carrier::lambda, 0);
  fl.val = f.val;
  Cochain rhs = coboundary(dc, fl);
  CHECK((lhs - rhs).max_abs() < 1e-13);
  // d_Lambda A = A d_diamond on 1-forms
  Cochain a = random_form(dc, Carrier::diamond, 1, 43);
  Cochain c1 = coboundary(dc, average(dc, a));
  Cochain c2 = average(dc, coboundary(dc, a));
  CHECK((c1 - c2).max_abs() < 1e-13);
}

TEST_CASE("hetero wedge of averages doubles the diamond wedge") {
  TorusFixture fx = square_torus(2, 1, 0.66);
  const DoubleComplex& dc = fx.map.dc;
  Cochain a = random_form(dc, Carrier::diamond, 1, 51);
  Cochain b = random_form(dc, Carrier::diamond, 1, 52);
  Cochain lhs = wedge_hetero(dc, average(dc, a), average(dc, b));
  Cochain rhs = wedge_diamond(dc, a, b) * cplx(2.0);
  CHECK((lhs - rhs).max_abs() < 1e-13);
}

TEST_CASE("lift to diamond inverts averaging up to d eps") {
  TorusFixture fx = square_torus(2, 2, 0.7);
  const DoubleComplex& dc = fx.map.dc;
  // closed random diamond form: d f + harmonic-free exact part is enough
  Cochain f = random_form(dc, Carrier::diamond, 0, 61);
  Cochain nu = coboundary(dc, f);
  Cochain mu = average(dc, nu);
  Cochain lifted = lift_to_diamond(dc, mu, 0);
  Cochain aligned = gauge_align(dc, lifted, nu);
  CHECK((aligned - nu).max_abs() < 1e-12);
  // A(lift(mu)) = mu
  CHECK((average(dc, lifted) - mu).max_abs() < 1e-12);
  // exact Lambda form lifts to d_diamond of the same function
  Cochain fl(dc, Carrier::lambda, 0);
  fl.val = f.val;
  Cochain lifted2 = lift_to_diamond(dc, coboundary(dc, fl), 0);
  Cochain aligned2 = gauge_align(dc, lifted2, nu);
  CHECK((aligned2 - nu).max_abs() < 1e-12);
}

TEST_CASE("lift rejects mismatched holonomies") {
  TorusFixture fx = square_torus(1, 1, 0.785398163397448);
  const DoubleComplex& dc = fx.map.dc;
  // a closed form supported on Gamma only with nonzero holonomy: constant on
  // horizontal Gamma edges. Holonomies on Gamma and Gamma* differ.
  Cochain g(dc, Carrier::lambda, 1);
  for (int q = 0; q < dc.quad_count(); ++q) {
    cplx dzg = fx.map.face_pos[q][2] - fx.map.face_pos[q][0];
    if (std::abs(dzg.imag()) < 1e-9) g.val[2 * q] = (dzg.real() > 0) ? 1.0 : -1.0;
  }
  // closed: each Gamma* face crosses one +1 and one -1 horizontal edge
  CHECK_THROWS_AS(lift_to_diamond(dc, g, 0), error);
}

TEST_CASE("star rejects diamond carriers") {
  TorusFixture fx = square_torus(1, 1, 0.5);
  Cochain a(fx.map.dc, Carrier::diamond, 1);
  CHECK_THROWS_AS(hodge_star(fx.map.dc, a), error);
}

TEST_CASE("coboundary of the coordinate function is dZ") {
  TorusFixture fx = square_torus(2, 1, 0.65);
  // on a planar patch there is a global chart; check both carriers cell by cell
  CriticalMap patch = square_patch(3, 4, 0.65);
  Cochain z_lambda(patch.dc, Carrier::lambda, 0);
  Cochain z_diamond(patch.dc, Carrier::diamond, 0);
  for (int v = 0; v < patch.dc.vertex_count(); ++v) {
    z_lambda.val[v] = patch.z(v);
    z_diamond.val[v] = patch.z(v);
  }
  CHECK((coboundary(patch.dc, z_lambda) - patch.dz_lambda()).max_abs() < 1e-14);
  CHECK((coboundary(patch.dc, z_diamond) - patch.dz_diamond()).max_abs() < 1e-14);
  // on the torus dZ is still well defined as a cochain and closed
  Cochain dz = fx.map.dz_lambda();
  for (int v = 0; v < fx.map.dc.vertex_count(); ++v)
    CHECK(std::abs(pair(dz, cell_boundary(fx.map.dc, Carrier::lambda, 2, v))) < 1e-13);
}

TEST_CASE("Leibniz holds on 500 random pairs") {
  TorusFixture fx = square_torus(1, 1, 0.95);
  const DoubleComplex& dc = fx.map.dc;
  double worst = 0;
  for (unsigned seed = 0; seed < 500; ++seed) {
    Cochain f = random_form(dc, Carrier::diamond, 0, 1000 + seed);
    Cochain a = random_form(dc, Carrier::diamond, 1, 2000 + seed);
    Cochain lhs = coboundary(dc, wedge_diamond(dc, f, a));
    Cochain rhs = wedge_diamond(dc, coboundary(dc, f), a) +
                  wedge_diamond(dc, f, coboundary(dc, a));
    worst = std::max(worst, (lhs - rhs).max_abs());
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("laplacian annihilates the star of constants on 2-forms") {
  TorusFixture fx = square_torus(2, 2, 0.7);
  const DoubleComplex& dc = fx.map.dc;
  Cochain one(dc, Carrier::lambda, 0);
  for (auto& v : one.val) v = 1.0;
  Cochain area = hodge_star(dc, one);
  CHECK(laplacian(dc, area).max_abs() < 1e-13);
}
