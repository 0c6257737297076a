#include "drs/moves.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "drs/calculus.hpp"

namespace drs {

namespace {
constexpr double kPi = std::numbers::pi;
}

double corner_angle(const DoubleComplex& dc, int q, int pos) {
  double r = dc.rho_gamma(q);
  return (pos % 2 == 0) ? 2.0 * std::atan(r) : 2.0 * std::atan(1.0 / r);
}

MarkedSurface mark(const DoubleComplex& dc) {
  MarkedSurface ms{dc, std::vector<double>(dc.vertex_count(), 0.0)};
  for (int q = 0; q < dc.quad_count(); ++q)
    for (int pos = 0; pos < 4; ++pos) ms.angle[dc.corner(q, pos)] += corner_angle(dc, q, pos);
  return ms;
}

MarkedSurface mark(const CriticalMap& m) {
  MarkedSurface ms{m.dc, m.cone_angle};
  return ms;
}

double total_curvature(const MarkedSurface& ms) {
  double s = 0;
  for (int v = 0; v < ms.dc.vertex_count(); ++v)
    s += (ms.dc.vertex_interior(v) ? 2.0 * kPi : kPi) - ms.angle[v];
  return s;
}

std::vector<int> move_I_sites(const DoubleComplex& dc) {
  std::vector<int> out;
  for (int v = 0; v < dc.vertex_count(); ++v)
    if (dc.vertex_interior(v) && dc.vertex_degree(v) == 1) out.push_back(v);
  return out;
}

std::vector<int> move_II_sites(const DoubleComplex& dc) {
  std::vector<int> out;
  for (int v = 0; v < dc.vertex_count(); ++v) {
    if (!dc.vertex_interior(v) || dc.vertex_degree(v) != 2) continue;
    const auto& fan = dc.vertex_fan(v);
    if (fan.size() == 2 && fan[0].quad != fan[1].quad) out.push_back(v);
  }
  return out;
}

std::vector<int> move_III_sites(const DoubleComplex& dc) {
  std::vector<int> out;
  for (int v = 0; v < dc.vertex_count(); ++v) {
    if (!dc.vertex_interior(v) || dc.vertex_degree(v) != 3) continue;
    const auto& fan = dc.vertex_fan(v);
    if (fan.size() == 3 && fan[0].quad != fan[1].quad && fan[1].quad != fan[2].quad &&
        fan[0].quad != fan[2].quad)
      out.push_back(v);
  }
  return out;
}

bool is_tensed(const DoubleComplex& dc) {
  return move_I_sites(dc).empty() && move_II_sites(dc).empty();
}

namespace {

// -- surgical rebuild -------------------------------------------------------

struct SideSpec {
  enum Kind { boundary, internal, inherit } kind = boundary;
  int a = -1, b = -1;  // internal: (new quad idx, side); inherit: old slot (q,s)
  static SideSpec Internal(int j, int s) { return {internal, j, s}; }
  static SideSpec Inherit(int q, int s) { return {inherit, q, s}; }
};

struct NewQuad {
  std::array<int, 4> corners;  // old vertex ids; -1 entries refer to created vertices
  double rho = 1.0;
  std::array<SideSpec, 4> sides;
};

struct Patch {
  std::vector<int> removed_quads;
  std::vector<NewQuad> added;
  // welds: glue the outer partners of two removed-quad slots to each other
  std::vector<std::pair<Slot, Slot>> welds;
  std::vector<int> removed_vertices;          // old ids
  std::vector<std::pair<int, Graph>> created  // (insert position, colour)
      = {};
};

struct PatchResult {
  MarkedSurface surface;
  std::vector<int> vmap;      // old vertex id -> new (-1 removed)
  std::vector<int> qmap;      // old quad id -> new (-1 removed)
  std::vector<int> created;   // new ids of created vertices, in patch order
};

PatchResult apply_patch(const MarkedSurface& ms, Patch patch) {
  const DoubleComplex& dc = ms.dc;
  const int nv = dc.vertex_count(), nq = dc.quad_count();

  // vertex remap: remove, then insert
  std::vector<char> vremoved(nv, 0);
  for (int v : patch.removed_vertices) vremoved[v] = 1;
  std::vector<int> vmap(nv);
  int cnt = 0;
  for (int v = 0; v < nv; ++v) vmap[v] = vremoved[v] ? -1 : cnt++;
  // insertion positions are indices in the final numbering
  std::vector<std::pair<int, Graph>> created = patch.created;
  std::vector<int> created_ids;
  for (auto& [at, g] : created) {
    int pos = (at < 0) ? cnt : at;
    if (pos > cnt) pos = cnt;
    for (int v = 0; v < nv; ++v)
      if (vmap[v] >= pos) ++vmap[v];
    for (int& c : created_ids)
      if (c >= pos) ++c;
    created_ids.push_back(pos);
    ++cnt;
  }
  std::vector<Graph> colors(cnt);
  for (int v = 0; v < nv; ++v)
    if (vmap[v] >= 0) colors[vmap[v]] = dc.vertex_graph(v);
  for (size_t i = 0; i < created.size(); ++i) colors[created_ids[i]] = created[i].second;

  // quad remap
  std::vector<char> qremoved(nq, 0);
  for (int q : patch.removed_quads) qremoved[q] = 1;
  std::vector<int> qmap(nq);
  int qcnt = 0;
  for (int q = 0; q < nq; ++q) qmap[q] = qremoved[q] ? -1 : qcnt++;
  const int nq_new = qcnt + static_cast<int>(patch.added.size());

  std::vector<std::array<int, 4>> quads(nq_new);
  std::vector<double> rho(nq_new);
  std::vector<int> partner(4 * nq_new, -1);
  auto new_slot = [&](int q, int s) { return 4 * q + s; };

  for (int q = 0; q < nq; ++q) {
    if (qmap[q] < 0) continue;
    for (int i = 0; i < 4; ++i) quads[qmap[q]][i] = vmap[dc.corner(q, i)];
    rho[qmap[q]] = dc.rho_gamma(q);
    for (int s = 0; s < 4; ++s) {
      Slot p = dc.partner(q, s);
      if (p.valid() && qmap[p.quad] >= 0)
        partner[new_slot(qmap[q], s)] = new_slot(qmap[p.quad], p.side);
    }
  }
  // added quads: corner entry -1-k refers to created vertex k
  for (size_t j = 0; j < patch.added.size(); ++j) {
    int q = qcnt + static_cast<int>(j);
    for (int i = 0; i < 4; ++i) {
      int c = patch.added[j].corners[i];
      quads[q][i] = c >= 0 ? vmap[c] : created_ids[-1 - c];
    }
    rho[q] = patch.added[j].rho;
  }
  for (size_t j = 0; j < patch.added.size(); ++j) {
    int q = qcnt + static_cast<int>(j);
    for (int s = 0; s < 4; ++s) {
      const SideSpec& sp = patch.added[j].sides[s];
      if (sp.kind == SideSpec::boundary) continue;
      if (sp.kind == SideSpec::internal) {
        partner[new_slot(q, s)] = new_slot(qcnt + sp.a, sp.b);
        continue;
      }
      Slot outer = dc.partner(sp.a, sp.b);
      if (!outer.valid()) continue;  // boundary stays boundary
      int mate;
      if (qmap[outer.quad] >= 0) {
        mate = new_slot(qmap[outer.quad], outer.side);
      } else {
        // outer partner was also removed; it must resolve to an added side
        mate = -1;
        for (size_t j2 = 0; j2 < patch.added.size(); ++j2)
          for (int s2 = 0; s2 < 4; ++s2) {
            const SideSpec& sp2 = patch.added[j2].sides[s2];
            if (sp2.kind == SideSpec::inherit &&
                Slot{sp2.a, sp2.b} == Slot{outer.quad, outer.side})
              mate = new_slot(qcnt + static_cast<int>(j2), s2);
          }
        if (mate < 0) throw error(errc::bad_configuration, "patch gluing unresolved");
      }
      partner[new_slot(q, s)] = mate;
      partner[mate] = new_slot(q, s);
    }
  }
  for (auto& [sa, sb] : patch.welds) {
    Slot pa = dc.partner(sa.quad, sa.side);
    Slot pb = dc.partner(sb.quad, sb.side);
    int na = (pa.valid() && qmap[pa.quad] >= 0) ? new_slot(qmap[pa.quad], pa.side) : -1;
    int nb = (pb.valid() && qmap[pb.quad] >= 0) ? new_slot(qmap[pb.quad], pb.side) : -1;
    if (na >= 0) partner[na] = nb;
    if (nb >= 0) partner[nb] = na;
  }

  PatchResult out;
  out.surface.dc = DoubleComplex::build_glued(std::move(quads), std::move(rho),
                                              std::move(partner), std::move(colors));
  // angle ledger: carry over, subtract removed corners, add new corners
  out.surface.angle.assign(cnt, 0.0);
  for (int v = 0; v < nv; ++v)
    if (vmap[v] >= 0) out.surface.angle[vmap[v]] = ms.angle[v];
  for (int q = 0; q < nq; ++q) {
    if (!qremoved[q]) continue;
    for (int pos = 0; pos < 4; ++pos) {
      int v = vmap[dc.corner(q, pos)];
      if (v >= 0) out.surface.angle[v] -= corner_angle(dc, q, pos);
    }
  }
  const DoubleComplex& ndc = out.surface.dc;
  for (size_t j = 0; j < patch.added.size(); ++j) {
    int q = qcnt + static_cast<int>(j);
    for (int pos = 0; pos < 4; ++pos)
      out.surface.angle[ndc.corner(q, pos)] += corner_angle(ndc, q, pos);
  }
  out.vmap = std::move(vmap);
  out.qmap = std::move(qmap);
  out.created = std::move(created_ids);
  return out;
}

}  // namespace

MoveResult move_I(const MarkedSurface& ms, int summit) {
  const DoubleComplex& dc = ms.dc;
  if (summit < 0 || summit >= dc.vertex_count() || !dc.vertex_interior(summit) ||
      dc.vertex_degree(summit) != 1)
    throw error(errc::not_a_loop_quad, "site is not a cone summit");
  Corner c = dc.vertex_fan(summit)[0];
  int q = c.quad, pos = c.pos;
  int w = dc.corner(q, (pos + 1) % 4);
  if (dc.corner(q, (pos + 3) % 4) != w)
    throw error(errc::not_a_loop_quad, "cone quad is not folded symmetrically");
  Patch patch;
  patch.removed_quads = {q};
  patch.removed_vertices = {summit};
  patch.welds = {{Slot{q, (pos + 1) % 4}, Slot{q, (pos + 2) % 4}}};
  PatchResult pr = apply_patch(ms, std::move(patch));
  MoveResult out{std::move(pr.surface), {}};
  out.record.kind = 1;
  out.record.site = summit;
  out.record.removed = summit;
  // loop diagonal is the one not through the summit
  out.record.rho1 =
      (pos % 2 == 0) ? 1.0 / dc.rho_gamma(q) : dc.rho_gamma(q);
  out.record.edge = -1;
  for (int side : {(pos + 1) % 4, (pos + 2) % 4}) {
    Slot outer = dc.partner(q, side);
    if (outer.valid() && pr.qmap[outer.quad] >= 0)
      out.record.edge = out.surface.dc.side_edge(pr.qmap[outer.quad], outer.side);
  }
  out.record.vmap = std::move(pr.vmap);
  return out;
}

MoveResult move_I_inverse(const MarkedSurface& ms, int edge, double rho_loop,
                          int insert_at) {
  const DoubleComplex& dc = ms.dc;
  if (edge < 0 || edge >= dc.diamond_edge_count() || !dc.edge_interior(edge))
    throw error(errc::bad_configuration, "cone insertion needs an interior edge");
  int x = dc.edge_tail(edge), w = dc.edge_head(edge);
  if (dc.vertex_graph(x) == Graph::gamma_star) std::swap(x, w);
  const auto& sl = dc.edge_slots(edge);
  // slot oriented x->w and slot oriented w->x
  Slot sxw = sl[0], swx = sl[1];
  if (dc.corner(sxw.quad, sxw.side) != x) std::swap(sxw, swx);
  Patch patch;
  patch.created = {{insert_at, dc.vertex_graph(x) == Graph::gamma
                                   ? Graph::gamma_star
                                   : Graph::gamma}};
  // summit has the colour of w's graph... the summit is opposite x across the
  // quad, so it matches x's colour; the doubled vertex is w.
  patch.created[0].second = dc.vertex_graph(x);
  NewQuad nq;
  // (x, w, s, w) with corner0 on Gamma; if x is on Gamma* rotate to (w, s, w, x)
  if (dc.vertex_graph(x) == Graph::gamma) {
    nq.corners = {x, w, -1, w};
    nq.rho = 1.0 / rho_loop;  // stored rho is the (x,s) diagonal's
    nq.sides[0] = SideSpec::Inherit(sxw.quad, sxw.side);
    nq.sides[1] = SideSpec::Internal(0, 2);
    nq.sides[2] = SideSpec::Internal(0, 1);
    nq.sides[3] = SideSpec::Inherit(swx.quad, swx.side);
  } else {
    nq.corners = {w, -1, w, x};
    nq.rho = rho_loop;  // (w,w) loop is the Gamma diagonal here
    nq.sides[0] = SideSpec::Internal(0, 1);
    nq.sides[1] = SideSpec::Internal(0, 0);
    nq.sides[2] = SideSpec::Inherit(swx.quad, swx.side);
    nq.sides[3] = SideSpec::Inherit(sxw.quad, sxw.side);
  }
  patch.added = {nq};
  PatchResult pr = apply_patch(ms, std::move(patch));
  MoveResult out{std::move(pr.surface), {}};
  out.record.kind = 1;
  out.record.site = -1;
  out.record.created = pr.created[0];
  out.record.rho1 = rho_loop;
  out.record.vmap = std::move(pr.vmap);
  out.record.value_weights = {{x, 1.0}};
  return out;
}

MoveResult move_II(const MarkedSurface& ms, int middle) {
  const DoubleComplex& dc = ms.dc;
  auto sites = move_II_sites(dc);
  if (std::find(sites.begin(), sites.end(), middle) == sites.end())
    throw error(errc::bad_configuration, "site is not a series middle vertex");
  const auto& fan = dc.vertex_fan(middle);
  int P = fan[0].quad, iP = fan[0].pos;
  int Q = fan[1].quad, iQ = fan[1].pos;
  std::array<int, 4> r = {dc.corner(P, (iP + 1) % 4), dc.corner(P, (iP + 2) % 4),
                          dc.corner(P, (iP + 3) % 4), dc.corner(Q, (iQ + 2) % 4)};
  // conductances of the through-diagonals in the middle's graph
  bool on_gamma = dc.vertex_graph(middle) == Graph::gamma;
  double sP = on_gamma ? dc.rho_gamma(P) : 1.0 / dc.rho_gamma(P);
  double sQ = on_gamma ? dc.rho_gamma(Q) : 1.0 / dc.rho_gamma(Q);
  double s_series = 1.0 / (1.0 / sP + 1.0 / sQ);
  NewQuad nq;
  if (on_gamma) {
    // rotate so corner0 = r1 (Gamma); merged Gamma diagonal (r1, r3) in series
    nq.corners = {r[1], r[2], r[3], r[0]};
    nq.rho = s_series;
    nq.sides[0] = SideSpec::Inherit(P, (iP + 2) % 4);
    nq.sides[1] = SideSpec::Inherit(Q, (iQ + 1) % 4);
    nq.sides[2] = SideSpec::Inherit(Q, (iQ + 2) % 4);
    nq.sides[3] = SideSpec::Inherit(P, (iP + 1) % 4);
  } else {
    // corner0 = r0 (Gamma); merged Gamma diagonal (r0, r2) in parallel
    nq.corners = {r[0], r[1], r[2], r[3]};
    nq.rho = dc.rho_gamma(P) + dc.rho_gamma(Q);
    nq.sides[0] = SideSpec::Inherit(P, (iP + 1) % 4);
    nq.sides[1] = SideSpec::Inherit(P, (iP + 2) % 4);
    nq.sides[2] = SideSpec::Inherit(Q, (iQ + 1) % 4);
    nq.sides[3] = SideSpec::Inherit(Q, (iQ + 2) % 4);
  }
  Patch patch;
  patch.removed_quads = {P, Q};
  patch.removed_vertices = {middle};
  patch.added = {nq};
  PatchResult pr = apply_patch(ms, std::move(patch));
  MoveResult out{std::move(pr.surface), {}};
  out.record.kind = 2;
  out.record.site = middle;
  out.record.removed = middle;
  out.record.quad = out.surface.dc.quad_count() - 1;
  // r1 corner position in the merged quad (0 after the on_gamma rotation,
  // 1 otherwise)
  out.record.axis = on_gamma ? 0 : 1;
  out.record.rho1 = sP;
  out.record.rho2 = sQ;
  out.record.vmap = std::move(pr.vmap);
  return out;
}

MoveResult move_II_inverse(const MarkedSurface& ms, int quad, int axis,
                           double rho_first, int insert_at) {
  const DoubleComplex& dc = ms.dc;
  if (quad < 0 || quad >= dc.quad_count() || axis < 0 || axis > 3)
    throw error(errc::bad_configuration, "bad split site");
  // r1 = corner(axis); middle b subdivides the (r1, r3) diagonal
  std::array<int, 4> r = {dc.corner(quad, (axis + 3) % 4), dc.corner(quad, axis),
                          dc.corner(quad, (axis + 1) % 4), dc.corner(quad, (axis + 2) % 4)};
  bool on_gamma = dc.vertex_graph(r[1]) == Graph::gamma;
  double s_series = on_gamma ? dc.rho_gamma(quad) : 1.0 / dc.rho_gamma(quad);
  if (!(rho_first > s_series))
    throw error(errc::bad_configuration, "split conductance must exceed the series value");
  double sP = rho_first;
  double sQ = 1.0 / (1.0 / s_series - 1.0 / sP);
  // P = (r1, r2, b, r0), Q = (r3, r0, b, r2); stored rho is the Gamma
  // diagonal's conductance
  NewQuad P, Q;
  auto stored = [&](double s) { return on_gamma ? s : 1.0 / s; };
  auto make = [&](int far, int right, int left, double cond, int mate) {
    // quad (far, right, b, left) when far is on Gamma, rotated otherwise
    NewQuad n;
    if (on_gamma) {
      n.corners = {far, right, -1, left};
      n.rho = stored(cond);
      n.sides[1] = SideSpec::Internal(mate, 2);
      n.sides[2] = SideSpec::Internal(mate, 1);
    } else {
      n.corners = {right, -1, left, far};
      n.rho = stored(cond);
      n.sides[0] = SideSpec::Internal(mate, 1);
      n.sides[1] = SideSpec::Internal(mate, 0);
    }
    return n;
  };
  P = make(r[1], r[2], r[0], sP, 1);
  Q = make(r[3], r[0], r[2], sQ, 0);
  // outer sides: P keeps quad's sides at r1 ends, Q the others.
  // quad sides: (axis+3): r0->r1, (axis): r1->r2, (axis+1): r2->r3, (axis+2): r3->r0
  if (on_gamma) {
    P.sides[0] = SideSpec::Inherit(quad, axis);             // r1->r2
    P.sides[3] = SideSpec::Inherit(quad, (axis + 3) % 4);   // r0->r1
    Q.sides[0] = SideSpec::Inherit(quad, (axis + 2) % 4);   // r3->r0
    Q.sides[3] = SideSpec::Inherit(quad, (axis + 1) % 4);   // r2->r3
  } else {
    P.sides[2] = SideSpec::Inherit(quad, (axis + 3) % 4);   // r0->r1
    P.sides[3] = SideSpec::Inherit(quad, axis);             // r1->r2
    Q.sides[2] = SideSpec::Inherit(quad, (axis + 1) % 4);   // r2->r3
    Q.sides[3] = SideSpec::Inherit(quad, (axis + 2) % 4);   // r3->r0
  }
  Patch patch;
  patch.removed_quads = {quad};
  patch.created = {{insert_at, dc.vertex_graph(r[1])}};
  patch.added = {P, Q};
  PatchResult pr = apply_patch(ms, std::move(patch));
  MoveResult out{std::move(pr.surface), {}};
  out.record.kind = 2;
  out.record.created = pr.created[0];
  out.record.rho1 = sP;
  out.record.rho2 = sQ;
  out.record.vmap = std::move(pr.vmap);
  out.record.value_weights = {{r[1], sP / (sP + sQ)}, {r[3], sQ / (sP + sQ)}};
  return out;
}

MoveResult move_III(const MarkedSurface& ms, int centre, int insert_at) {
  const DoubleComplex& dc = ms.dc;
  auto sites = move_III_sites(dc);
  if (std::find(sites.begin(), sites.end(), centre) == sites.end())
    throw error(errc::bad_configuration, "site is not a degree-3 centre");
  const auto& fan = dc.vertex_fan(centre);
  std::array<int, 3> P, A, B;
  for (int k = 0; k < 3; ++k) {
    P[k] = fan[k].quad;
    A[k] = dc.corner(P[k], (fan[k].pos + 1) % 4);
    B[k] = dc.corner(P[k], (fan[k].pos + 2) % 4);
    if (dc.corner(fan[(k + 1) % 3].quad, (fan[(k + 1) % 3].pos + 1) % 4) !=
        dc.corner(P[k], (fan[k].pos + 3) % 4))
      throw error(errc::bad_configuration, "hexagon closure failed");
  }
  bool centre_gamma = dc.vertex_graph(centre) == Graph::gamma;
  // branch conductances at the centre, in the centre's graph
  std::array<double, 3> s;
  for (int k = 0; k < 3; ++k)
    s[k] = centre_gamma ? dc.rho_gamma(P[k]) : 1.0 / dc.rho_gamma(P[k]);
  // star -> triangle in the centre's graph: side (B_{k-1}, B_k) is opposite
  // branch B_{k+1}
  double sigma_star = s[0] * s[1] * s[2] / (s[0] + s[1] + s[2]);
  std::array<double, 3> t;
  for (int k = 0; k < 3; ++k) t[k] = sigma_star / s[(k + 1) % 3];  // side (B_{k-1},B_k)
  Patch patch;
  patch.removed_quads = {P[0], P[1], P[2]};
  patch.removed_vertices = {centre};
  patch.created = {{insert_at, centre_gamma ? Graph::gamma_star : Graph::gamma}};
  for (int k = 0; k < 3; ++k) {
    NewQuad nq;
    int km = (k + 2) % 3, kp = (k + 1) % 3;
    if (centre_gamma) {
      // new centre on Gamma*; quads (B_{k-1}, A_k, B_k, c'), Gamma diagonal
      // (B_{k-1}, B_k) with conductance t[k]
      nq.corners = {B[km], A[k], B[k], -1};
      nq.rho = t[k];
      nq.sides[0] = SideSpec::Inherit(P[km], (fan[km].pos + 2) % 4);
      nq.sides[1] = SideSpec::Inherit(P[k], (fan[k].pos + 1) % 4);
      nq.sides[2] = SideSpec::Internal(kp, 3);
      nq.sides[3] = SideSpec::Internal(km, 2);
    } else {
      // new centre on Gamma; quads (c', B_{k-1}, A_k, B_k), Gamma diagonal
      // (c', A_k); conductance of (B_{k-1},B_k) in Gamma* is t[k], its dual
      // is 1/t[k]
      nq.corners = {-1, B[km], A[k], B[k]};
      nq.rho = 1.0 / t[k];
      nq.sides[0] = SideSpec::Internal(km, 3);
      nq.sides[1] = SideSpec::Inherit(P[km], (fan[km].pos + 2) % 4);
      nq.sides[2] = SideSpec::Inherit(P[k], (fan[k].pos + 1) % 4);
      nq.sides[3] = SideSpec::Internal(kp, 0);
    }
    patch.added.push_back(nq);
  }
  PatchResult pr = apply_patch(ms, std::move(patch));
  MoveResult out{std::move(pr.surface), {}};
  out.record.kind = 3;
  out.record.site = centre;
  out.record.removed = centre;
  out.record.created = pr.created[0];
  out.record.vmap = std::move(pr.vmap);
  // value at the new centre: harmonic average over its three neighbours in
  // its own graph; the branch (c', A_k) conductance is the dual of t[k]
  double wsum = 0;
  std::array<double, 3> w;
  for (int k = 0; k < 3; ++k) {
    w[k] = 1.0 / t[k];
    wsum += w[k];
  }
  for (int k = 0; k < 3; ++k) out.record.value_weights.push_back({A[k], w[k] / wsum});
  return out;
}

MoveResult undo(const MarkedSurface& ms, const MoveRecord& rec) {
  if (rec.kind == 1) {
    if (rec.removed >= 0) return move_I_inverse(ms, rec.edge, rec.rho1, rec.removed);
    return move_I(ms, rec.created);
  }
  if (rec.kind == 2) {
    if (rec.removed >= 0)
      return move_II_inverse(ms, rec.quad, rec.axis, rec.rho1, rec.removed);
    return move_II(ms, rec.created);
  }
  if (rec.kind == 3) return move_III(ms, rec.created, rec.removed);
  throw error(errc::bad_input, "unknown move record");
}

Cochain transport(const DoubleComplex& before, const DoubleComplex& after,
                  const Cochain& f, const MoveRecord& rec, double tol) {
  auto rep = is_holomorphic_function(before, f, tol * std::max(1.0, f.max_abs()));
  if (!rep.ok)
    throw error(errc::not_holomorphic, "transported function violates Cauchy-Riemann");
  Cochain out(after, Carrier::lambda, 0);
  for (int v = 0; v < before.vertex_count(); ++v)
    if (rec.vmap[v] >= 0) out.val[rec.vmap[v]] = f.val[v];
  if (rec.created >= 0) {
    cplx s = 0;
    for (auto& [v, w] : rec.value_weights) s += w * f.val[v];
    out.val[rec.created] = s;
  }
  return out;
}

int holomorphic_form_dimension(const DoubleComplex& dc, double rank_tol) {
  // unknowns: value of alpha on each Gamma diagonal; the dual value is
  // i rho z. Constraints: d alpha = 0 on every interior Lambda face.
  const int nq = dc.quad_count();
  std::vector<int> faces;
  for (int v = 0; v < dc.vertex_count(); ++v)
    if (dc.vertex_interior(v)) faces.push_back(v);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(static_cast<int>(faces.size()), nq);
  for (size_t r = 0; r < faces.size(); ++r) {
    Chain b = cell_boundary(dc, Carrier::lambda, 2, faces[r]);
    for (auto& [le, k] : b.coef) {
      int q = le >> 1;
      if ((le & 1) == 0)
        M(static_cast<int>(r), q) += static_cast<double>(k);
      else
        M(static_cast<int>(r), q) += static_cast<double>(k) * cplx(0, dc.rho_gamma(q));
    }
  }
  if (M.rows() == 0 || M.cols() == 0) return nq;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& sv = svd.singularValues();
  double thresh = rank_tol * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  return nq - rank;
}

}  // namespace drs
