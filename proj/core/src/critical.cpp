#include "drs/critical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <random>
#include <tuple>

namespace drs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Glues slots that carry the same vertex pair AND the same chart vector;
// resolves double edges on small quotients where vertex pairs alone are
// ambiguous.
DoubleComplex glue_geometric(std::vector<std::array<int, 4>> quads,
                             std::vector<double> rho, std::vector<Graph> colors,
                             const std::vector<std::array<cplx, 4>>& face_pos) {
  using Key = std::tuple<int, int, long long, long long>;
  auto quant = [](cplx w) {
    return std::pair<long long, long long>(std::llround(w.real() * 1e7),
                                           std::llround(w.imag() * 1e7));
  };
  std::map<Key, std::vector<int>> slots;
  for (size_t q = 0; q < quads.size(); ++q) {
    for (int s = 0; s < 4; ++s) {
      int a = quads[q][s], b = quads[q][(s + 1) % 4];
      cplx w = face_pos[q][(s + 1) % 4] - face_pos[q][s];
      if (a > b) {
        std::swap(a, b);
        w = -w;
      }
      auto [wr, wi] = quant(w);
      slots[{a, b, wr, wi}].push_back(static_cast<int>(4 * q + s));
    }
  }
  std::vector<int> partner(4 * quads.size(), -1);
  for (auto& [key, sl] : slots) {
    if (sl.size() > 2) throw error(errc::non_manifold, "edge bounded by more than 2 quads");
    if (sl.size() == 2) {
      partner[sl[0]] = sl[1];
      partner[sl[1]] = sl[0];
    }
  }
  return DoubleComplex::build_glued(std::move(quads), std::move(rho), std::move(partner),
                                    std::move(colors));
}

std::vector<double> cone_angles(const DoubleComplex& dc,
                                const std::vector<std::array<cplx, 4>>& pos) {
  std::vector<double> angle(dc.vertex_count(), 0.0);
  for (int q = 0; q < dc.quad_count(); ++q) {
    for (int i = 0; i < 4; ++i) {
      cplx a = pos[q][(i + 1) % 4] - pos[q][i];
      cplx b = pos[q][(i + 3) % 4] - pos[q][i];
      double th = std::arg(b / a);
      if (th < 0) th += kTwoPi;
      angle[dc.corner(q, i)] += th;
    }
  }
  return angle;
}

int sign_for_traversal(const DoubleComplex& dc, int edge, int from) {
  return dc.edge_tail(edge) == from ? +1 : -1;
}

}  // namespace

void CriticalMap::validate(double rel_tol) const {
  const double tol = rel_tol * delta;
  for (int q = 0; q < dc.quad_count(); ++q) {
    const auto& p = face_pos[q];
    for (int i = 0; i < 4; ++i) {
      double len = std::abs(p[(i + 1) % 4] - p[i]);
      if (std::abs(len - delta) > tol)
        throw error(errc::not_critical, "face side length differs from delta");
    }
    cplx dg = p[2] - p[0], ds = p[3] - p[1];
    if (std::abs(ds - cplx(0, 1) * dc.rho_gamma(q) * dg) > tol)
      throw error(errc::not_critical, "diagonals not orthogonal with ratio rho");
  }
  // edge vectors agree across glued sides
  for (int e = 0; e < dc.diamond_edge_count(); ++e) {
    const auto& sl = dc.edge_slots(e);
    if (!sl[1].valid()) continue;
    cplx w0 = face_pos[sl[0].quad][(sl[0].side + 1) % 4] - face_pos[sl[0].quad][sl[0].side];
    cplx w1 = face_pos[sl[1].quad][(sl[1].side + 1) % 4] - face_pos[sl[1].quad][sl[1].side];
    if (std::abs(w0 + w1) > tol)
      throw error(errc::not_critical, "charts disagree across a glued edge");
  }
}

Cochain CriticalMap::dz_diamond() const {
  Cochain out(dc, Carrier::diamond, 1);
  for (int e = 0; e < dc.diamond_edge_count(); ++e) {
    Slot s = dc.edge_slots(e)[0];
    cplx w = face_pos[s.quad][(s.side + 1) % 4] - face_pos[s.quad][s.side];
    out.val[e] = static_cast<double>(dc.side_sign(s.quad, s.side)) * w;
  }
  return out;
}

Cochain CriticalMap::dz_lambda() const {
  Cochain out(dc, Carrier::lambda, 1);
  for (int q = 0; q < dc.quad_count(); ++q) {
    out.val[2 * q] = face_pos[q][2] - face_pos[q][0];
    out.val[2 * q + 1] = face_pos[q][3] - face_pos[q][1];
  }
  return out;
}

bool CriticalMap::critical_flat(double tol) const {
  for (int v = 0; v < dc.vertex_count(); ++v) {
    if (!dc.vertex_interior(v)) continue;
    double a = cone_angle[v];
    if (std::abs(a - kTwoPi * std::round(a / kTwoPi)) > tol) return false;
  }
  return true;
}

TorusFixture square_torus(int p, int q, double theta) {
  if (p < 1 || q < 1 || !(theta > 0.0) || !(theta < std::numbers::pi / 2))
    throw error(errc::bad_theta, "need p, q >= 1 and 0 < theta < pi/2");
  const int nx = 2 * p, ny = 2 * q;
  const cplx u = std::exp(cplx(0, -theta)), v = std::exp(cplx(0, theta));
  auto vid = [&](int n, int m) { return ((n % nx + nx) % nx) * ny + ((m % ny + ny) % ny); };
  auto zat = [&](int n, int m) { return static_cast<double>(n) * u + static_cast<double>(m) * v; };

  std::vector<std::array<int, 4>> quads;
  std::vector<std::array<cplx, 4>> pos;
  std::vector<double> rho;
  for (int n = 0; n < nx; ++n) {
    for (int m = 0; m < ny; ++m) {
      std::array<int, 4> c = {vid(n, m), vid(n + 1, m), vid(n + 1, m + 1), vid(n, m + 1)};
      std::array<cplx, 4> z = {zat(n, m), zat(n + 1, m), zat(n + 1, m + 1), zat(n, m + 1)};
      if ((n + m) % 2 == 0) {
        quads.push_back(c);
        pos.push_back(z);
        rho.push_back(std::tan(theta));
      } else {
        quads.push_back({c[1], c[2], c[3], c[0]});
        pos.push_back({z[1], z[2], z[3], z[0]});
        rho.push_back(1.0 / std::tan(theta));
      }
    }
  }
  std::vector<Graph> colors(nx * ny);
  for (int n = 0; n < nx; ++n)
    for (int m = 0; m < ny; ++m)
      colors[vid(n, m)] = ((n + m) % 2 == 0) ? Graph::gamma : Graph::gamma_star;

  TorusFixture fx;
  fx.map.dc = glue_geometric(quads, rho, colors, pos);
  fx.map.face_pos = std::move(pos);
  fx.map.embed.resize(nx * ny);
  for (int n = 0; n < nx; ++n)
    for (int m = 0; m < ny; ++m) fx.map.embed[vid(n, m)] = zat(n, m);
  fx.map.delta = 1.0;
  fx.map.origin = vid(0, 0);
  fx.map.simply_connected = false;
  fx.map.cone_angle = cone_angles(fx.map.dc, fx.map.face_pos);
  fx.map.validate();

  auto cell = [&](int n, int m) { return ((n % nx + nx) % nx) * ny + ((m % ny + ny) % ny); };
  auto bottom_slot = [&](int n, int m) { return (n + m) % 2 == 0 ? 0 : 3; };
  auto left_slot = [&](int n, int m) { return (n + m) % 2 == 0 ? 3 : 2; };
  fx.cycle_a = Chain(Carrier::diamond, 1);
  for (int k = 0; k < nx; ++k) {
    int e = fx.map.dc.side_edge(cell(k, 0), bottom_slot(k, 0));
    fx.cycle_a.add(e, sign_for_traversal(fx.map.dc, e, vid(k, 0)));
  }
  fx.cycle_b = Chain(Carrier::diamond, 1);
  for (int m = 0; m < ny; ++m) {
    int e = fx.map.dc.side_edge(cell(0, m), left_slot(0, m));
    fx.cycle_b.add(e, sign_for_traversal(fx.map.dc, e, vid(0, m)));
  }
  fx.tau = (static_cast<double>(q) / p) * std::exp(cplx(0, 2 * theta));
  return fx;
}

namespace {

cplx circumcenter(cplx a, cplx b, cplx c) {
  // intersection of perpendicular bisectors
  cplx u = b - a, v = c - a;
  double u2 = std::norm(u), v2 = std::norm(v);
  double det = 2.0 * (u.real() * v.imag() - u.imag() * v.real());
  double x = (v.imag() * u2 - u.imag() * v2) / det;
  double y = (u.real() * v2 - v.real() * u2) / det;
  return a + cplx(x, y);
}

}  // namespace

TorusFixture tri_hex_torus(double r1, double r2, double r3, int p, int q) {
  if (p < 1 || q < 1 || !(r1 > 0) || !(r2 > 0) || !(r3 > 0))
    throw error(errc::bad_input, "need p, q >= 1 and positive rho parameters");
  if (std::abs(r1 * r2 + r2 * r3 + r3 * r1 - 1.0) > 1e-12)
    throw error(errc::not_critical, "rho parameters violate the criticality constraint");
  // triangle angles A_i with rho_i = cot A_i; circumradius = delta = 1
  double A1 = std::atan2(1.0, r1), A2 = std::atan2(1.0, r2), A3 = std::atan2(1.0, r3);
  const cplx t1 = 2.0 * std::sin(A3);
  const cplx t2 = 2.0 * std::sin(A2) * std::exp(cplx(0, A1));
  const cplx o_up = circumcenter(0.0, t1, t2);
  const cplx o_dn = t1 + t2 - o_up;

  const int nl = p * q;
  auto lid = [&](int a, int b) { return ((a % p + p) % p) * q + ((b % q + q) % q); };
  auto uid = [&](int a, int b) { return nl + lid(a, b); };
  auto did = [&](int a, int b) { return 2 * nl + lid(a, b); };
  auto lat = [&](int a, int b) { return static_cast<double>(a) * t1 + static_cast<double>(b) * t2; };

  std::vector<std::array<int, 4>> quads;
  std::vector<std::array<cplx, 4>> pos;
  std::vector<double> rho;
  auto push_quad = [&](std::array<int, 4> c, std::array<cplx, 4> z) {
    double r = std::abs(z[3] - z[1]) / std::abs(z[2] - z[0]);
    quads.push_back(c);
    pos.push_back(z);
    rho.push_back(r);
  };
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < q; ++b) {
      cplx z = lat(a, b);
      // t1-edge: below down(a, b-1), above up(a, b)
      push_quad({lid(a, b), did(a, b - 1), lid(a + 1, b), uid(a, b)},
                {z, z - t2 + o_dn, z + t1, z + o_up});
      // t2-edge: right up(a, b), left down(a-1, b)
      push_quad({lid(a, b), uid(a, b), lid(a, b + 1), did(a - 1, b)},
                {z, z + o_up, z + t2, z - t1 + o_dn});
      // (t2 - t1)-edge: right down(a, b), left up(a, b)
      push_quad({lid(a + 1, b), did(a, b), lid(a, b + 1), uid(a, b)},
                {z + t1, z + o_dn, z + t2, z + o_up});
    }
  }
  std::vector<Graph> colors(3 * nl);
  for (int i = 0; i < nl; ++i) colors[i] = Graph::gamma;
  for (int i = nl; i < 3 * nl; ++i) colors[i] = Graph::gamma_star;

  TorusFixture fx;
  fx.map.dc = glue_geometric(quads, rho, colors, pos);
  fx.map.face_pos = std::move(pos);
  fx.map.embed.resize(3 * nl);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < q; ++b) {
      fx.map.embed[lid(a, b)] = lat(a, b);
      fx.map.embed[uid(a, b)] = lat(a, b) + o_up;
      fx.map.embed[did(a, b)] = lat(a, b) + o_dn;
    }
  fx.map.delta = 1.0;
  fx.map.origin = lid(0, 0);
  fx.map.simply_connected = false;
  fx.map.cone_angle = cone_angles(fx.map.dc, fx.map.face_pos);
  fx.map.validate();

  // a-cycle: L(a,0) -> U(a,0) -> L(a+1,0); quad 1 of cell (a,0) has sides
  // 3: U->L(a,b) and 2: L(a+1,b)->U
  auto q1 = [&](int a, int b) { return 3 * lid(a, b); };
  fx.cycle_a = Chain(Carrier::diamond, 1);
  for (int a = 0; a < p; ++a) {
    int e1 = fx.map.dc.side_edge(q1(a, 0), 3);
    fx.cycle_a.add(e1, sign_for_traversal(fx.map.dc, e1, lid(a, 0)));
    int e2 = fx.map.dc.side_edge(q1(a, 0), 2);
    fx.cycle_a.add(e2, sign_for_traversal(fx.map.dc, e2, uid(a, 0)));
  }
  // b-cycle: L(0,b) -> U(0,b) -> L(0,b+1); quad 2 of cell has sides 0: L->U
  // and 1: U->L(a,b+1)
  auto q2 = [&](int a, int b) { return 3 * lid(a, b) + 1; };
  fx.cycle_b = Chain(Carrier::diamond, 1);
  for (int b = 0; b < q; ++b) {
    int e1 = fx.map.dc.side_edge(q2(0, b), 0);
    fx.cycle_b.add(e1, sign_for_traversal(fx.map.dc, e1, lid(0, b)));
    int e2 = fx.map.dc.side_edge(q2(0, b), 1);
    fx.cycle_b.add(e2, sign_for_traversal(fx.map.dc, e2, uid(0, b)));
  }
  fx.tau = (static_cast<double>(q) * t2) / (static_cast<double>(p) * t1);
  return fx;
}

CriticalMap square_patch(int nx, int ny, double theta, double delta) {
  if (nx < 1 || ny < 1 || !(theta > 0.0) || !(theta < std::numbers::pi / 2))
    throw error(errc::bad_theta, "need nx, ny >= 1 and 0 < theta < pi/2");
  const cplx u = delta * std::exp(cplx(0, -theta)), v = delta * std::exp(cplx(0, theta));
  auto vid = [&](int n, int m) { return n * (ny + 1) + m; };
  auto zat = [&](int n, int m) { return static_cast<double>(n) * u + static_cast<double>(m) * v; };
  std::vector<std::array<int, 4>> quads;
  std::vector<std::array<cplx, 4>> pos;
  std::vector<double> rho;
  for (int n = 0; n < nx; ++n) {
    for (int m = 0; m < ny; ++m) {
      std::array<int, 4> c = {vid(n, m), vid(n + 1, m), vid(n + 1, m + 1), vid(n, m + 1)};
      std::array<cplx, 4> z = {zat(n, m), zat(n + 1, m), zat(n + 1, m + 1), zat(n, m + 1)};
      if ((n + m) % 2 == 0) {
        quads.push_back(c);
        pos.push_back(z);
        rho.push_back(std::tan(theta));
      } else {
        quads.push_back({c[1], c[2], c[3], c[0]});
        pos.push_back({z[1], z[2], z[3], z[0]});
        rho.push_back(1.0 / std::tan(theta));
      }
    }
  }
  std::vector<Graph> colors((nx + 1) * (ny + 1));
  for (int n = 0; n <= nx; ++n)
    for (int m = 0; m <= ny; ++m)
      colors[vid(n, m)] = ((n + m) % 2 == 0) ? Graph::gamma : Graph::gamma_star;
  CriticalMap cm;
  cm.dc = glue_geometric(quads, rho, colors, pos);
  cm.face_pos = std::move(pos);
  cm.embed.resize((nx + 1) * (ny + 1));
  for (int n = 0; n <= nx; ++n)
    for (int m = 0; m <= ny; ++m) cm.embed[vid(n, m)] = zat(n, m);
  cm.delta = delta;
  cm.origin = vid(0, 0);
  cm.simply_connected = true;
  cm.cone_angle = cone_angles(cm.dc, cm.face_pos);
  cm.validate();
  return cm;
}

CriticalMap tri_hex_patch(int radius, double delta) {
  // hexagonal neighbourhood of the origin in the equilateral rhombille
  // tiling: all rhombi both of whose triangles lie within the ball
  // max(|a|, |b|, |a+b|) <= radius (triangle corner coordinates).
  // rhombus side = circumradius = delta, so the triangle side is sqrt(3) delta
  const double side = std::sqrt(3.0) * delta;
  const cplx t1 = side, t2 = side * std::exp(cplx(0, std::numbers::pi / 3));
  auto inside = [&](int a, int b) {
    return std::max({std::abs(a), std::abs(b), std::abs(a + b)}) <= radius;
  };
  auto up_ok = [&](int a, int b) {
    return inside(a, b) && inside(a + 1, b) && inside(a, b + 1);
  };
  auto dn_ok = [&](int a, int b) {
    return inside(a + 1, b) && inside(a + 1, b + 1) && inside(a, b + 1);
  };
  std::map<std::pair<int, int>, int> lid_map;
  std::map<std::pair<int, int>, int> uid_map, did_map;
  std::vector<cplx> verts;
  std::vector<Graph> colors;
  auto get = [&](std::map<std::pair<int, int>, int>& m, int a, int b, cplx z, Graph g) {
    auto it = m.find({a, b});
    if (it != m.end()) return it->second;
    int id = static_cast<int>(verts.size());
    m.emplace(std::pair<int, int>{a, b}, id);
    verts.push_back(z);
    colors.push_back(g);
    return id;
  };
  const cplx o_up = circumcenter(0.0, t1, t2);
  const cplx o_dn = t1 + t2 - o_up;
  auto lat = [&](int a, int b) { return static_cast<double>(a) * t1 + static_cast<double>(b) * t2; };
  auto L = [&](int a, int b) { return get(lid_map, a, b, lat(a, b), Graph::gamma); };
  auto U = [&](int a, int b) { return get(uid_map, a, b, lat(a, b) + o_up, Graph::gamma_star); };
  auto D = [&](int a, int b) { return get(did_map, a, b, lat(a, b) + o_dn, Graph::gamma_star); };

  std::vector<std::array<int, 4>> quads;
  std::vector<std::array<cplx, 4>> pos;
  std::vector<double> rho;
  for (int a = -radius - 1; a <= radius + 1; ++a) {
    for (int b = -radius - 1; b <= radius + 1; ++b) {
      cplx z = lat(a, b);
      if (up_ok(a, b) && dn_ok(a, b - 1)) {
        quads.push_back({L(a, b), D(a, b - 1), L(a + 1, b), U(a, b)});
        pos.push_back({z, z - t2 + o_dn, z + t1, z + o_up});
        rho.push_back(std::abs(pos.back()[3] - pos.back()[1]) /
                      std::abs(pos.back()[2] - pos.back()[0]));
      }
      if (up_ok(a, b) && dn_ok(a - 1, b)) {
        quads.push_back({L(a, b), U(a, b), L(a, b + 1), D(a - 1, b)});
        pos.push_back({z, z + o_up, z + t2, z - t1 + o_dn});
        rho.push_back(std::abs(pos.back()[3] - pos.back()[1]) /
                      std::abs(pos.back()[2] - pos.back()[0]));
      }
      if (up_ok(a, b) && dn_ok(a, b)) {
        quads.push_back({L(a + 1, b), D(a, b), L(a, b + 1), U(a, b)});
        pos.push_back({z + t1, z + o_dn, z + t2, z + o_up});
        rho.push_back(std::abs(pos.back()[3] - pos.back()[1]) /
                      std::abs(pos.back()[2] - pos.back()[0]));
      }
    }
  }
  CriticalMap cm;
  cm.dc = glue_geometric(quads, rho, colors, pos);
  cm.face_pos = std::move(pos);
  cm.embed = std::move(verts);
  cm.delta = delta;
  cm.origin = lid_map.at({0, 0});
  cm.simply_connected = true;
  cm.cone_angle = cone_angles(cm.dc, cm.face_pos);
  cm.validate();
  return cm;
}

CriticalMap tri_hex_sextant(int radius, double delta) { return tri_hex_patch(radius, delta); }

CriticalMap single_rhombus(double theta) {
  if (!(theta > 0.0) || !(theta < std::numbers::pi / 2))
    throw error(errc::bad_theta, "need 0 < theta < pi/2");
  CriticalMap cm;
  std::vector<std::array<int, 4>> quads{{0, 1, 2, 3}};
  std::vector<double> rho{std::tan(theta)};
  cm.face_pos = {{cplx(0.0), std::exp(cplx(0, -theta)), cplx(2 * std::cos(theta), 0.0),
                  std::exp(cplx(0, theta))}};
  std::vector<Graph> colors{Graph::gamma, Graph::gamma_star, Graph::gamma,
                            Graph::gamma_star};
  cm.dc = glue_geometric(quads, rho, colors, cm.face_pos);
  cm.embed = {cm.face_pos[0][0], cm.face_pos[0][1], cm.face_pos[0][2], cm.face_pos[0][3]};
  cm.delta = 1.0;
  cm.origin = 0;
  cm.simply_connected = true;
  cm.cone_angle = cone_angles(cm.dc, cm.face_pos);
  cm.validate();
  return cm;
}

DoubleComplex glued_tori_genus2(int p, int q, unsigned seed) {
  if (p < 2 || q < 2) throw error(errc::bad_input, "glued tori need p, q >= 2");
  const int nx = 2 * p, ny = 2 * q, nv = nx * ny;
  auto vid = [&](int t, int n, int m) {
    return t * nv + ((n % nx + nx) % nx) * ny + ((m % ny + ny) % ny);
  };
  // identify the hole corners: a00~b00, a11~b11, a10~b01, a01~b10
  std::vector<int> remap(2 * nv);
  for (int i = 0; i < 2 * nv; ++i) remap[i] = i;
  remap[vid(1, 0, 0)] = vid(0, 0, 0);
  remap[vid(1, 1, 1)] = vid(0, 1, 1);
  remap[vid(1, 0, 1)] = vid(0, 1, 0);
  remap[vid(1, 1, 0)] = vid(0, 0, 1);
  std::vector<std::array<int, 4>> quads;
  for (int t = 0; t < 2; ++t) {
    for (int n = 0; n < nx; ++n) {
      for (int m = 0; m < ny; ++m) {
        if (n == 0 && m == 0) continue;  // the removed quad
        std::array<int, 4> c = {remap[vid(t, n, m)], remap[vid(t, n + 1, m)],
                                remap[vid(t, n + 1, m + 1)], remap[vid(t, n, m + 1)]};
        if ((n + m) % 2 != 0) c = {c[1], c[2], c[3], c[0]};
        quads.push_back(c);
      }
    }
  }
  // compact vertex ids
  std::vector<int> newid(2 * nv, -1);
  int cnt = 0;
  for (auto& qd : quads)
    for (int& v : qd) {
      if (newid[v] < 0) newid[v] = cnt++;
      v = newid[v];
    }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(0.5, 2.0);
  std::vector<double> rho(quads.size());
  for (double& r : rho) r = dist(rng);
  DoubleComplex dc = DoubleComplex::build(quads, rho);
  if (dc.genus() != 2) throw error(errc::bad_input, "glued tori fixture is not genus 2");
  return dc;
}

CriticalMap refine(const CriticalMap& m) {
  const DoubleComplex& dc = m.dc;
  const int nv = dc.vertex_count(), ne = dc.diamond_edge_count(), nq = dc.quad_count();
  auto mid = [&](int e) { return nv + e; };
  auto ctr = [&](int q) { return nv + ne + q; };

  std::vector<std::array<int, 4>> quads(4 * nq);
  std::vector<std::array<cplx, 4>> pos(4 * nq);
  std::vector<double> rho(4 * nq);
  std::vector<Graph> colors(nv + ne + nq);
  for (int v = 0; v < nv; ++v) colors[v] = Graph::gamma;
  for (int e = 0; e < ne; ++e) colors[nv + e] = Graph::gamma_star;
  for (int q = 0; q < nq; ++q) colors[nv + ne + q] = Graph::gamma;

  for (int q = 0; q < nq; ++q) {
    const auto& p = m.face_pos[q];
    cplx center = 0.25 * (p[0] + p[1] + p[2] + p[3]);
    for (int s = 0; s < 4; ++s) {
      int sp = (s + 3) % 4;  // previous side
      quads[4 * q + s] = {dc.corner(q, s), mid(dc.side_edge(q, s)), ctr(q),
                          mid(dc.side_edge(q, sp))};
      pos[4 * q + s] = {p[s], 0.5 * (p[s] + p[(s + 1) % 4]), center,
                        0.5 * (p[sp] + p[s])};
      rho[4 * q + s] = std::abs(pos[4 * q + s][3] - pos[4 * q + s][1]) /
                       std::abs(pos[4 * q + s][2] - pos[4 * q + s][0]);
    }
  }
  // gluing: inside a parent quad, sub s side 1 meets sub s+1 side 2;
  // across a parent side s glued to (q', s'): halves swap
  std::vector<int> partner(16 * nq, -1);
  auto link = [&](int qa, int sa, int qb, int sb) {
    partner[4 * qa + sa] = 4 * qb + sb;
    partner[4 * qb + sb] = 4 * qa + sa;
  };
  for (int q = 0; q < nq; ++q) {
    for (int s = 0; s < 4; ++s) link(4 * q + s, 1, 4 * q + (s + 1) % 4, 2);
    for (int s = 0; s < 4; ++s) {
      Slot pr = dc.partner(q, s);
      if (!pr.valid()) continue;
      link(4 * q + s, 0, 4 * pr.quad + (pr.side + 1) % 4, 3);
    }
  }
  CriticalMap out;
  out.dc = DoubleComplex::build_glued(std::move(quads), std::move(rho),
                                      std::move(partner), std::move(colors));
  out.face_pos = std::move(pos);
  out.embed.resize(nv + ne + nq);
  for (int v = 0; v < nv; ++v) out.embed[v] = m.embed[v];
  for (int e = 0; e < ne; ++e) {
    Slot s = dc.edge_slots(e)[0];
    // representative midpoint relative to the stored embedding
    out.embed[nv + e] = m.embed[dc.corner(s.quad, s.side)] +
                        0.5 * (m.face_pos[s.quad][(s.side + 1) % 4] -
                               m.face_pos[s.quad][s.side]);
  }
  for (int q = 0; q < nq; ++q) {
    out.embed[nv + ne + q] =
        m.embed[dc.corner(q, 0)] +
        0.25 * (m.face_pos[q][1] + m.face_pos[q][2] + m.face_pos[q][3] -
                3.0 * m.face_pos[q][0]);
  }
  out.delta = 0.5 * m.delta;
  out.origin = m.origin;
  out.simply_connected = m.simply_connected;
  out.cone_angle = cone_angles(out.dc, out.face_pos);
  out.validate();
  return out;
}

Chain refine_cycle(const CriticalMap& coarse, const CriticalMap& fine, const Chain& c) {
  const DoubleComplex& dc = coarse.dc;
  const int nv = dc.vertex_count();
  Chain out(Carrier::diamond, 1);
  for (auto& [e, k] : c.coef) {
    int t = dc.edge_tail(e), mvid = nv + e;
    Slot s = dc.edge_slots(e)[0];
    // halves live in sub-quads (4q+s, side 0) and (4q+s+1, side 3)
    int h0 = fine.dc.side_edge(4 * s.quad + s.side, 0);
    int h1 = fine.dc.side_edge(4 * s.quad + (s.side + 1) % 4, 3);
    // slot 0 of h0 runs corner(q,s) -> mid; orient along t -> h
    int cs = dc.corner(s.quad, s.side);
    if (cs == t) {
      out.add(h0, k * sign_for_traversal(fine.dc, h0, t));
      out.add(h1, k * sign_for_traversal(fine.dc, h1, mvid));
    } else {
      out.add(h1, k * sign_for_traversal(fine.dc, h1, t));
      out.add(h0, k * sign_for_traversal(fine.dc, h0, mvid));
    }
  }
  return out;
}

std::vector<TrainTrack> train_tracks(const DoubleComplex& dc) {
  const int ne = dc.diamond_edge_count();
  std::vector<char> seen(ne, 0);
  std::vector<TrainTrack> out;
  auto opposite = [&](const Slot& s) {
    return Slot{s.quad, (s.side + 2) % 4};
  };
  for (int e0 = 0; e0 < ne; ++e0) {
    if (seen[e0]) continue;
    TrainTrack t;
    // walk forward through slot 0
    std::vector<int> fw_edges{e0};
    std::vector<int> fw_faces;
    Slot cur = dc.edge_slots(e0)[0];
    for (;;) {
      fw_faces.push_back(cur.quad);
      Slot op = opposite(cur);
      int e = dc.side_edge(op.quad, op.side);
      if (e == e0) {
        t.closed = true;
        break;
      }
      fw_edges.push_back(e);
      Slot nxt = dc.partner(op.quad, op.side);
      if (!nxt.valid()) break;
      cur = nxt;
    }
    if (!t.closed) {
      // walk backward through slot 1 (if interior)
      std::vector<int> bw_edges, bw_faces;
      Slot s1 = dc.edge_slots(e0)[1];
      if (s1.valid()) {
        Slot cur2 = s1;
        for (;;) {
          bw_faces.push_back(cur2.quad);
          Slot op = opposite(cur2);
          int e = dc.side_edge(op.quad, op.side);
          bw_edges.push_back(e);
          Slot nxt = dc.partner(op.quad, op.side);
          if (!nxt.valid()) break;
          cur2 = nxt;
        }
      }
      std::reverse(bw_edges.begin(), bw_edges.end());
      std::reverse(bw_faces.begin(), bw_faces.end());
      t.edges = std::move(bw_edges);
      t.edges.insert(t.edges.end(), fw_edges.begin(), fw_edges.end());
      t.faces = std::move(bw_faces);
      t.faces.insert(t.faces.end(), fw_faces.begin(), fw_faces.end());
    } else {
      t.edges = std::move(fw_edges);
      t.faces = std::move(fw_faces);
    }
    for (int e : t.edges) seen[e] = 1;
    out.push_back(std::move(t));
  }
  return out;
}

Chain track_cycle(const DoubleComplex& dc, const TrainTrack& t) {
  if (!t.closed) throw error(errc::bad_input, "track cycle needs a closed thread");
  Chain c(Carrier::lambda, 1);
  for (size_t i = 0; i < t.faces.size(); ++i) {
    int q = t.faces[i];
    // entry side within q
    int s = -1;
    for (int ss = 0; ss < 4; ++ss)
      if (dc.side_edge(q, ss) == t.edges[i]) s = ss;
    // Gamma diagonal oriented from the entry side's Gamma corner to the exit
    // side's; positions 0 and 3 enter at corner 0
    c.add(2 * q, (s == 0 || s == 3) ? +1 : -1);
  }
  return c;
}

bool is_convex(const DoubleComplex& dc, const std::vector<int>& faces) {
  if (faces.empty()) return true;
  std::vector<char> in(dc.quad_count(), 0);
  for (int f : faces) in[f] = 1;
  // connectivity across shared edges
  std::queue<int> bfs;
  bfs.push(faces[0]);
  std::vector<char> vis(dc.quad_count(), 0);
  vis[faces[0]] = 1;
  int cnt = 1;
  while (!bfs.empty()) {
    int q = bfs.front();
    bfs.pop();
    for (int s = 0; s < 4; ++s) {
      Slot p = dc.partner(q, s);
      if (p.valid() && in[p.quad] && !vis[p.quad]) {
        vis[p.quad] = 1;
        ++cnt;
        bfs.push(p.quad);
      }
    }
  }
  if (cnt != static_cast<int>(faces.size())) return false;
  for (const TrainTrack& t : train_tracks(dc)) {
    int transitions = 0;
    const int n = static_cast<int>(t.faces.size());
    if (n == 0) continue;
    if (!t.closed) {
      int first = -1, last = -1;
      for (int i = 0; i < n; ++i) {
        if (in[t.faces[i]]) {
          if (first < 0) first = i;
          last = i;
        }
      }
      for (int i = first; first >= 0 && i <= last; ++i)
        if (!in[t.faces[i]]) return false;
    } else {
      for (int i = 0; i < n; ++i)
        if (!in[t.faces[i]] && in[t.faces[(i + 1) % n]]) ++transitions;
      if (transitions > 1) return false;
    }
  }
  return true;
}

ContinuationResult continue_holomorphic(const CriticalMap& m,
                                        const std::vector<cplx>& values,
                                        const std::vector<char>& defined,
                                        double tol) {
  const DoubleComplex& dc = m.dc;
  ContinuationResult res;
  res.f = Cochain(dc, Carrier::lambda, 0);
  res.defined = defined;
  for (int v = 0; v < dc.vertex_count(); ++v)
    if (defined[v]) res.f.val[v] = values[v];
  std::queue<int> work;
  for (int q = 0; q < dc.quad_count(); ++q) work.push(q);
  std::vector<char> checked(dc.quad_count(), 0);
  while (!work.empty()) {
    int q = work.front();
    work.pop();
    const auto& c = dc.quad(q);
    int missing = -1, cnt = 0;
    for (int i = 0; i < 4; ++i) {
      if (!res.defined[c[i]]) {
        missing = i;
        ++cnt;
      }
    }
    if (cnt == 0) {
      if (!checked[q]) {
        checked[q] = 1;
        cplx r = res.f.val[c[3]] - res.f.val[c[1]] -
                 cplx(0, 1) * dc.rho_gamma(q) * (res.f.val[c[2]] - res.f.val[c[0]]);
        if (std::abs(r) > tol) res.obstructions.push_back({q, std::abs(r)});
      }
      continue;
    }
    if (cnt > 1) continue;
    cplx rho(0, dc.rho_gamma(q));
    cplx v;
    switch (missing) {
      case 0: v = res.f.val[c[2]] - (res.f.val[c[3]] - res.f.val[c[1]]) / rho; break;
      case 1: v = res.f.val[c[3]] - rho * (res.f.val[c[2]] - res.f.val[c[0]]); break;
      case 2: v = res.f.val[c[0]] + (res.f.val[c[3]] - res.f.val[c[1]]) / rho; break;
      default: v = res.f.val[c[1]] + rho * (res.f.val[c[2]] - res.f.val[c[0]]); break;
    }
    res.f.val[c[missing]] = v;
    res.defined[c[missing]] = 1;
    checked[q] = 1;
    for (const Corner& cc : dc.vertex_fan(c[missing])) work.push(cc.quad);
  }
  return res;
}

}  // namespace drs
