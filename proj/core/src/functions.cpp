#include "drs/functions.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace drs {

namespace {
constexpr cplx kI{0.0, 1.0};
}

Cochain integrate_fdz(const CriticalMap& m, const Cochain& f) {
  if (f.carrier != Carrier::lambda || f.grade != 0)
    throw error(errc::bad_input, "f dZ expects a function on the vertices");
  const DoubleComplex& dc = m.dc;
  Cochain dz = m.dz_diamond();
  Cochain out(dc, Carrier::diamond, 1);
  for (int e = 0; e < dc.diamond_edge_count(); ++e)
    out.val[e] = 0.5 * (f.val[dc.edge_tail(e)] + f.val[dc.edge_head(e)]) * dz.val[e];
  return out;
}

Primitive primitive_from_origin(const CriticalMap& m, const Cochain& one_form) {
  const DoubleComplex& dc = m.dc;
  if (!m.simply_connected)
    throw error(errc::not_simply_connected, "primitive needs a simply connected map");
  Primitive out;
  out.f = Cochain(dc, Carrier::lambda, 0);
  for (int q = 0; q < dc.quad_count(); ++q)
    out.closure_residual = std::max(
        out.closure_residual,
        std::abs(pair(one_form, cell_boundary(dc, Carrier::diamond, 2, q))));
  std::vector<char> seen(dc.vertex_count(), 0);
  std::queue<int> bfs;
  bfs.push(m.origin);
  seen[m.origin] = 1;
  out.f.val[m.origin] = 0.0;
  while (!bfs.empty()) {
    int u = bfs.front();
    bfs.pop();
    for (int e : dc.vertex_edges(u)) {
      int w = dc.edge_tail(e) == u ? dc.edge_head(e) : dc.edge_tail(e);
      if (seen[w]) continue;
      seen[w] = 1;
      double s = dc.edge_tail(e) == u ? 1.0 : -1.0;
      out.f.val[w] = out.f.val[u] + s * one_form.val[e];
      bfs.push(w);
    }
  }
  return out;
}

Cochain exponential(const CriticalMap& m, cplx lambda) {
  const DoubleComplex& dc = m.dc;
  if (!m.simply_connected)
    throw error(errc::not_simply_connected, "exponential needs a simply connected map");
  if (std::abs(std::abs(lambda) * m.delta - 2.0) <= 1e-12 * 2.0)
    throw error(errc::on_singular_circle, "|lambda| delta = 2 is singular");
  Cochain dz = m.dz_diamond();
  Cochain out(dc, Carrier::lambda, 0);
  std::vector<char> seen(dc.vertex_count(), 0);
  std::queue<int> bfs;
  bfs.push(m.origin);
  seen[m.origin] = 1;
  out.val[m.origin] = 1.0;
  while (!bfs.empty()) {
    int u = bfs.front();
    bfs.pop();
    for (int e : dc.vertex_edges(u)) {
      int w = dc.edge_tail(e) == u ? dc.edge_head(e) : dc.edge_tail(e);
      if (seen[w]) continue;
      seen[w] = 1;
      cplx step = (dc.edge_tail(e) == u ? 1.0 : -1.0) * dz.val[e];
      out.val[w] = out.val[u] * (2.0 + lambda * step) / (2.0 - lambda * step);
      bfs.push(w);
    }
  }
  return out;
}

cplx exponential_rect(double delta, double theta, cplx lambda, int n, int mm) {
  cplx hu = 0.5 * lambda * delta * std::exp(cplx(0, -theta));
  cplx hv = 0.5 * lambda * delta * std::exp(cplx(0, theta));
  return std::pow((1.0 + hu) / (1.0 - hu), n) * std::pow((1.0 + hv) / (1.0 - hv), mm);
}

std::vector<Cochain> powers(const CriticalMap& m, int kmax) {
  const DoubleComplex& dc = m.dc;
  std::vector<Cochain> zk;
  Cochain one(dc, Carrier::lambda, 0);
  for (auto& v : one.val) v = 1.0;
  zk.push_back(one);
  if (kmax == 0) return zk;
  Cochain z(dc, Carrier::lambda, 0);
  cplx z0 = m.embed[m.origin];
  for (int v = 0; v < dc.vertex_count(); ++v) z.val[v] = m.embed[v] - z0;
  if (!m.simply_connected)
    throw error(errc::not_simply_connected, "powers need a simply connected map");
  zk.push_back(z);
  for (int k = 2; k <= kmax; ++k) {
    Cochain form = integrate_fdz(m, zk[k - 1]) * cplx(static_cast<double>(k));
    Primitive p = primitive_from_origin(m, form);
    if (p.closure_residual > 1e-12 * std::max(1.0, form.max_abs()))
      throw error(errc::not_holomorphic, "power recursion lost closedness");
    zk.push_back(std::move(p.f));
  }
  return zk;
}

std::vector<std::vector<double>> chain_powers(int n, int kmax) {
  std::vector<std::vector<double>> zk(kmax + 1, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i <= n; ++i) zk[0][i] = 1.0;
  if (kmax == 0) return zk;
  for (int i = 0; i <= n; ++i) zk[1][i] = static_cast<double>(i) / n;
  for (int k = 2; k <= kmax; ++k)
    for (int i = 1; i <= n; ++i)
      zk[k][i] = zk[k][i - 1] +
                 k * 0.5 * (zk[k - 1][i - 1] + zk[k - 1][i]) * (1.0 / n);
  return zk;
}

SeriesReport exp_series(const CriticalMap& m, cplx lambda, int kmax) {
  SeriesReport rep;
  std::vector<Cochain> zk = powers(m, kmax);
  const DoubleComplex& dc = m.dc;
  Cochain sum(dc, Carrier::lambda, 0);
  std::optional<Cochain> expo;
  if (std::abs(std::abs(lambda) * m.delta - 2.0) > 1e-12 * 2.0)
    expo = exponential(m, lambda);
  // probe at a neighbour of the origin
  int e0 = dc.vertex_edges(m.origin)[0];
  rep.probe_vertex = dc.edge_tail(e0) == m.origin ? dc.edge_head(e0) : dc.edge_tail(e0);
  cplx coef = 1.0;
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) coef *= lambda / static_cast<double>(k);
    Cochain term = zk[k] * coef;
    sum += term;
    rep.term_at_probe.push_back(std::abs(term.val[rep.probe_vertex]));
    rep.partial.push_back(sum);
    if (expo) rep.sup_gap.push_back((sum - *expo).max_abs());
  }
  return rep;
}

CriticalMap rebase(const CriticalMap& m, cplx a, int b) {
  if (a == cplx(0.0)) throw error(errc::bad_input, "rebase scale must be nonzero");
  CriticalMap out = m;
  cplx zb = m.embed[b];
  for (auto& p : out.face_pos)
    for (auto& z : p) z = a * (z - zb);
  for (auto& z : out.embed) z = a * (z - zb);
  out.delta = std::abs(a) * m.delta;
  out.origin = b;
  out.cone_angle = m.cone_angle;
  out.validate();
  return out;
}

RebaseCheck change_base_point(const CriticalMap& m, cplx a, int b, cplx lambda) {
  RebaseCheck rc{rebase(m, a, b), 0.0};
  Cochain lhs = exponential(rc.rebased, lambda);
  Cochain num = exponential(m, a * lambda);
  cplx den = num.val[b];
  for (int v = 0; v < m.dc.vertex_count(); ++v)
    rc.residual = std::max(rc.residual, std::abs(lhs.val[v] - num.val[v] / den));
  return rc;
}

int YoungDiagram::degree() const {
  int k = 0;
  for (auto [h, l] : cols) k += h * l;
  return k;
}
int YoungDiagram::parts() const {
  int l = 0;
  for (auto [h, l2] : cols) l += l2;
  return l;
}

std::vector<YoungDiagram> young_diagrams(int degree) {
  // partitions of `degree` as distinct column heights with multiplicities
  std::vector<YoungDiagram> out;
  YoungDiagram cur;
  auto rec = [&](auto&& self, int remaining, int max_h) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int h = std::min(remaining, max_h); h >= 1; --h) {
      for (int l = 1; l * h <= remaining; ++l) {
        cur.cols.push_back({h, l});
        self(self, remaining - l * h, h - 1);
        cur.cols.pop_back();
      }
    }
  };
  rec(rec, degree, degree);
  return out;
}

namespace {
long long factorial(int n) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}
}  // namespace

long long young_coefficient(const YoungDiagram& y) {
  int k = y.degree(), l = y.parts();
  long long num = factorial(k);
  for (auto [h, mult] : y.cols)
    for (int i = 0; i < mult; ++i) num /= factorial(h);
  long long lnum = factorial(l);
  for (auto [h, mult] : y.cols) lnum /= factorial(mult);
  long long sign = ((k + l) % 2 == 0) ? 1 : -1;
  return sign * num * lnum;
}

cplx translation_bk_recursive(const std::vector<cplx>& zb, int k) {
  std::vector<cplx> B(k + 1);
  B[0] = 1.0;
  for (int kk = 1; kk <= k; ++kk) {
    cplx s = 0;
    for (int j = 0; j < kk; ++j) {
      double binom = static_cast<double>(factorial(kk)) /
                     (factorial(j) * factorial(kk - j));
      double sign = ((kk + j + 1) % 2 == 0) ? 1.0 : -1.0;
      s += binom * sign * zb[kk - j] * B[j];
    }
    B[kk] = s;
  }
  return B[k];
}

cplx translation_bk_young(const std::vector<cplx>& zb, int k) {
  if (k == 0) return 1.0;
  cplx s = 0;
  for (const YoungDiagram& y : young_diagrams(k)) {
    cplx mono = 1.0;
    for (auto [h, mult] : y.cols)
      for (int i = 0; i < mult; ++i) mono *= zb[h];
    s += static_cast<double>(young_coefficient(y)) * mono;
  }
  return s;
}

Cochain translated_power(const CriticalMap& m, cplx a, int b, int k) {
  std::vector<Cochain> zk = powers(m, k);
  std::vector<cplx> zb(k + 1);
  for (int j = 0; j <= k; ++j) zb[j] = zk[j].val[b];
  Cochain out(m.dc, Carrier::lambda, 0);
  for (int j = 0; j <= k; ++j) {
    double binom =
        static_cast<double>(factorial(k)) / (factorial(j) * factorial(k - j));
    double sign = (j % 2 == 0) ? 1.0 : -1.0;
    cplx bj = translation_bk_recursive(zb, j);
    out += zk[k - j] * (binom * sign * bj);
  }
  return out * std::pow(a, k);
}

int winding_number(const std::vector<cplx>& poly) {
  const int n = static_cast<int>(poly.size());
  int wn = 0;
  for (int i = 0; i < n; ++i) {
    const cplx& p = poly[i];
    const cplx& q = poly[(i + 1) % n];
    double cross = p.real() * q.imag() - p.imag() * q.real();
    if (std::abs(p) == 0.0 || std::abs(q) == 0.0)
      throw error(errc::passes_through_origin, "polygon vertex at the origin");
    if (cross == 0.0 && p.real() * q.real() + p.imag() * q.imag() < 0)
      throw error(errc::passes_through_origin, "polygon edge through the origin");
    if (p.imag() <= 0) {
      if (q.imag() > 0 && cross > 0) ++wn;
    } else if (q.imag() <= 0 && cross < 0) {
      --wn;
    }
  }
  return wn;
}

long long ramification_number(const DoubleComplex& dc, const Cochain& f,
                              const Chain& gamma) {
  long long total = 0;
  for (const auto& loop : decompose_loops(dc, gamma)) {
    std::vector<cplx> poly;
    for (int v : loop_vertices(dc, loop)) poly.push_back(f.val[v]);
    total += winding_number(poly);
  }
  return total;
}

}  // namespace drs
