#include "drs/calculus.hpp"

#include <cmath>
#include <queue>

namespace drs {

namespace {
constexpr cplx kI{0.0, 1.0};

void require_lambda(const Cochain& f, const char* op) {
  if (f.carrier != Carrier::lambda)
    throw error(errc::carrier_diamond, std::string(op) + " is undefined on the diamond");
}
}  // namespace

Cochain hodge_star(const DoubleComplex& dc, const Cochain& f) {
  require_lambda(f, "hodge star");
  if (f.grade == 1) {
    Cochain out(dc, Carrier::lambda, 1);
    for (int q = 0; q < dc.quad_count(); ++q) {
      double r = dc.rho_gamma(q);
      // *(a)(e) = -rho(e*) a(e*); the dual of 2q+1 is 2q reversed
      out.val[2 * q] = -(1.0 / r) * f.val[2 * q + 1];
      out.val[2 * q + 1] = r * f.val[2 * q];
    }
    return out;
  }
  if (!dc.closed())
    throw error(errc::not_closed_surface, "hodge star on 0/2-forms needs a closed surface");
  Cochain out(dc, Carrier::lambda, 2 - f.grade);
  // faces are indexed by their dual vertex in both directions
  out.val = f.val;
  return out;
}

Cochain laplacian(const DoubleComplex& dc, const Cochain& f) {
  require_lambda(f, "laplacian");
  if (f.grade == 0) {
    // -*d*(df) evaluated directly as the weighted graph Laplacian
    Cochain out(dc, Carrier::lambda, 0);
    for (int q = 0; q < dc.quad_count(); ++q) {
      for (int le : {2 * q, 2 * q + 1}) {
        int a = dc.lambda_tail(le), b = dc.lambda_head(le);
        double r = dc.rho_lambda(le);
        cplx d = f.val[a] - f.val[b];
        out.val[a] += r * d;
        out.val[b] -= r * d;
      }
    }
    if (!dc.closed())
      for (int v = 0; v < dc.vertex_count(); ++v)
        if (!dc.vertex_interior(v)) out.val[v] = 0.0;
    return out;
  }
  if (f.grade == 1) {
    if (!dc.closed())
      throw error(errc::not_closed_surface, "1-form laplacian needs a closed surface");
    // Delta = -d*d* - *d*d
    Cochain t1 = coboundary(dc, hodge_star(dc, coboundary(dc, hodge_star(dc, f))));
    Cochain t2 = hodge_star(dc, coboundary(dc, hodge_star(dc, coboundary(dc, f))));
    Cochain out(dc, Carrier::lambda, 1);
    for (size_t i = 0; i < out.val.size(); ++i) out.val[i] = -t1.val[i] - t2.val[i];
    return out;
  }
  // grade 2: -d*d* only
  if (!dc.closed())
    throw error(errc::not_closed_surface, "2-form laplacian needs a closed surface");
  Cochain t = coboundary(dc, hodge_star(dc, coboundary(dc, hodge_star(dc, f))));
  return t * cplx(-1.0);
}

HolomorphyReport is_holomorphic_function(const DoubleComplex& dc, const Cochain& f,
                                         double tol) {
  double res = 0;
  for (int q = 0; q < dc.quad_count(); ++q) {
    const auto& c = dc.quad(q);
    cplx lhs = f.val[c[3]] - f.val[c[1]];
    cplx rhs = kI * dc.rho_gamma(q) * (f.val[c[2]] - f.val[c[0]]);
    res = std::max(res, std::abs(lhs - rhs));
  }
  return {res <= tol, res};
}

HolomorphyReport is_holomorphic_form(const DoubleComplex& dc, const Cochain& a,
                                     double tol) {
  require_lambda(a, "holomorphy");
  double res = 0;
  Cochain s = hodge_star(dc, a);
  for (size_t i = 0; i < a.val.size(); ++i)
    res = std::max(res, std::abs(s.val[i] + kI * a.val[i]));
  for (int v = 0; v < dc.vertex_count(); ++v) {
    if (!dc.vertex_interior(v)) continue;
    res = std::max(res, std::abs(pair(a, cell_boundary(dc, Carrier::lambda, 2, v))));
  }
  return {res <= tol, res};
}

namespace {

// side integrals of a diamond 1-form around quad q, oriented ccw
std::array<cplx, 4> side_values(const DoubleComplex& dc, const Cochain& a, int q) {
  std::array<cplx, 4> s;
  for (int i = 0; i < 4; ++i)
    s[i] = static_cast<double>(dc.side_sign(q, i)) * a.val[dc.side_edge(q, i)];
  return s;
}

}  // namespace

Cochain wedge_diamond(const DoubleComplex& dc, const Cochain& a, const Cochain& b) {
  if (a.carrier != Carrier::diamond || b.carrier != Carrier::diamond)
    throw error(errc::bad_input, "diamond wedge needs diamond cochains");
  int k = a.grade, l = b.grade;
  if (k + l > 2) throw error(errc::grade_overflow, "wedge grade above 2");
  // the function products are commutative; normalize to function-first
  if (l == 0 && k > 0) return wedge_diamond(dc, b, a);
  if (k == 0 && l == 0) {
    Cochain out(dc, Carrier::diamond, 0);
    for (int v = 0; v < dc.vertex_count(); ++v) out.val[v] = a.val[v] * b.val[v];
    return out;
  }
  if (k == 0 && l == 1) {
    Cochain out(dc, Carrier::diamond, 1);
    for (int e = 0; e < dc.diamond_edge_count(); ++e)
      out.val[e] = 0.5 * (a.val[dc.edge_tail(e)] + a.val[dc.edge_head(e)]) * b.val[e];
    return out;
  }
  if (k == 0 && l == 2) {
    Cochain out(dc, Carrier::diamond, 2);
    for (int q = 0; q < dc.quad_count(); ++q) {
      const auto& c = dc.quad(q);
      out.val[q] =
          0.25 * (a.val[c[0]] + a.val[c[1]] + a.val[c[2]] + a.val[c[3]]) * b.val[q];
    }
    return out;
  }
  // 1 wedge 1
  Cochain out(dc, Carrier::diamond, 2);
  for (int q = 0; q < dc.quad_count(); ++q) {
    auto av = side_values(dc, a, q);
    auto bv = side_values(dc, b, q);
    cplx s = 0;
    for (int kk = 0; kk < 4; ++kk) s += av[(kk + 3) % 4] * bv[kk] - av[kk] * bv[(kk + 3) % 4];
    out.val[q] = 0.25 * s;
  }
  return out;
}

Cochain wedge_hetero(const DoubleComplex& dc, const Cochain& a, const Cochain& b) {
  if (a.carrier != Carrier::lambda || b.carrier != Carrier::lambda || a.grade != 1 ||
      b.grade != 1)
    throw error(errc::bad_input, "heterogeneous wedge needs Lambda 1-forms");
  Cochain out(dc, Carrier::diamond, 2);
  for (int q = 0; q < dc.quad_count(); ++q)
    out.val[q] = a.val[2 * q] * b.val[2 * q + 1] - a.val[2 * q + 1] * b.val[2 * q];
  return out;
}

cplx integrate(const DoubleComplex& dc, const Cochain& f) {
  if (f.grade != 2) throw error(errc::bad_input, "integrate expects a 2-form");
  cplx s = 0;
  if (f.carrier == Carrier::diamond) {
    for (const auto& v : f.val) s += v;
  } else {
    for (int v = 0; v < dc.vertex_count(); ++v)
      if (dc.vertex_interior(v)) s += f.val[v];
  }
  return s;
}

Cochain average(const DoubleComplex& dc, const Cochain& f) {
  if (f.carrier != Carrier::diamond)
    throw error(errc::bad_input, "average maps diamond forms to Lambda forms");
  if (f.grade == 0) {
    Cochain out(dc, Carrier::lambda, 0);
    out.val = f.val;
    return out;
  }
  if (f.grade == 1) {
    Cochain out(dc, Carrier::lambda, 1);
    for (int q = 0; q < dc.quad_count(); ++q) {
      auto s = side_values(dc, f, q);
      out.val[2 * q] = 0.5 * (s[0] + s[1] - s[3] - s[2]);
      out.val[2 * q + 1] = 0.5 * (s[1] + s[2] - s[0] - s[3]);
    }
    return out;
  }
  Cochain out(dc, Carrier::lambda, 2);
  for (int v = 0; v < dc.vertex_count(); ++v) {
    if (!dc.vertex_interior(v)) continue;
    cplx s = 0;
    for (const Corner& c : dc.vertex_fan(v)) s += f.val[c.quad];
    out.val[v] = 0.5 * s;
  }
  return out;
}

Cochain lift_to_diamond(const DoubleComplex& dc, const Cochain& mu, int base_edge,
                        double tol) {
  if (mu.carrier != Carrier::lambda || mu.grade != 1)
    throw error(errc::bad_input, "lift expects a Lambda 1-form");
  double scale = std::max(1.0, mu.max_abs());
  // check closedness first
  for (int v = 0; v < dc.vertex_count(); ++v) {
    if (!dc.vertex_interior(v)) continue;
    if (std::abs(pair(mu, cell_boundary(dc, Carrier::lambda, 2, v))) > tol * scale)
      throw error(errc::not_closed, "lift input is not closed");
  }
  const int ne = dc.diamond_edge_count();
  Cochain nu(dc, Carrier::diamond, 1);
  std::vector<char> known(ne, 0);
  nu.val[base_edge] = 0.0;
  known[base_edge] = 1;
  std::queue<int> work;
  work.push(base_edge);
  // Around quad (x,y,x',y') with sides s0..s3 ccw: s0+s1 = mu_e, s1+s2 = mu_e*,
  // s2+s3 = -mu_e, s3+s0 = -mu_e*, where e is the Gamma diagonal.
  auto solve_quad = [&](int q) {
    cplx me = mu.val[2 * q], ms = mu.val[2 * q + 1];
    std::array<cplx, 4> rhs = {me, ms, -me, -ms};  // s_i + s_{i+1} = rhs[i]
    std::array<cplx, 4> s{};
    std::array<char, 4> have{};
    for (int i = 0; i < 4; ++i) {
      int e = dc.side_edge(q, i);
      if (known[e]) {
        s[i] = static_cast<double>(dc.side_sign(q, i)) * nu.val[e];
        have[i] = 1;
      }
    }
    int anchor = -1;
    for (int i = 0; i < 4; ++i)
      if (have[i]) anchor = i;
    if (anchor < 0) return;
    for (int step = 0; step < 3; ++step) {
      int i = (anchor + step) % 4;
      cplx next = rhs[i] - s[i];
      int j = (i + 1) % 4;
      if (have[j]) {
        if (std::abs(s[j] - next) > tol * std::max(1.0, scale))
          throw error(errc::holonomy_mismatch,
                      "holonomies differ between the graph and its dual");
      } else {
        s[j] = next;
        have[j] = 1;
        int e = dc.side_edge(q, j);
        nu.val[e] = static_cast<double>(dc.side_sign(q, j)) * next;
        known[e] = 1;
        work.push(e);
      }
    }
    // closing consistency: s3 + s0 = -mu_e*
    if (std::abs(s[3] + s[0] - rhs[3]) > tol * std::max(1.0, scale))
      throw error(errc::holonomy_mismatch,
                  "holonomies differ between the graph and its dual");
  };
  while (!work.empty()) {
    int e = work.front();
    work.pop();
    for (const Slot& sl : dc.edge_slots(e))
      if (sl.valid()) solve_quad(sl.quad);
  }
  for (int e = 0; e < ne; ++e)
    if (!known[e]) throw error(errc::disconnected, "lift propagation did not reach all edges");
  return nu;
}

cplx scalar_product(const DoubleComplex& dc, const Cochain& a, const Cochain& b) {
  if (a.carrier != Carrier::lambda || b.carrier != Carrier::lambda || a.grade != 1 ||
      b.grade != 1)
    throw error(errc::bad_input, "scalar product expects Lambda 1-forms");
  cplx s = 0;
  for (int q = 0; q < dc.quad_count(); ++q) {
    double r = dc.rho_gamma(q);
    s += r * a.val[2 * q] * std::conj(b.val[2 * q]);
    s += (1.0 / r) * a.val[2 * q + 1] * std::conj(b.val[2 * q + 1]);
  }
  return s;
}

Cochain gauge_align(const DoubleComplex& dc, const Cochain& nu, const Cochain& ref) {
  Cochain eps = biconstant(dc, Carrier::diamond);
  Cochain de = coboundary(dc, eps);
  int e0 = 0;
  cplx t = (nu.val[e0] - ref.val[e0]) / de.val[e0];
  return nu - de * t;
}

}  // namespace drs
