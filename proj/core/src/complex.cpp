#include "drs/complex.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <utility>

namespace drs {

const char* errc_name(errc c) {
  switch (c) {
    case errc::non_bipartite: return "NonBipartite";
    case errc::bad_dual: return "BadDual";
    case errc::non_manifold: return "NonManifold";
    case errc::bad_orientation: return "BadOrientation";
    case errc::disconnected: return "Disconnected";
    case errc::grade_zero: return "GradeZero";
    case errc::grade_two: return "GradeTwo";
    case errc::grade_overflow: return "GradeOverflow";
    case errc::carrier_diamond: return "CarrierDiamond";
    case errc::not_closed_surface: return "NotClosedSurface";
    case errc::holonomy_mismatch: return "HolonomyMismatch";
    case errc::solver_fail: return "SolverFail";
    case errc::degenerate_pairing: return "DegeneratePairing";
    case errc::bad_theta: return "BadTheta";
    case errc::not_critical: return "NotCritical";
    case errc::on_singular_circle: return "OnSingularCircle";
    case errc::not_simply_connected: return "NotSimplyConnected";
    case errc::passes_through_origin: return "PassesThroughOrigin";
    case errc::not_a_loop_quad: return "NotALoopQuad";
    case errc::bad_configuration: return "BadConfiguration";
    case errc::not_closed: return "NotClosed";
    case errc::singular_c: return "SingularC";
    case errc::not_holomorphic: return "NotHolomorphic";
    case errc::bad_input: return "BadInput";
  }
  return "Unknown";
}

namespace {

int max_vertex(const std::vector<std::array<int, 4>>& quads) {
  int m = -1;
  for (const auto& q : quads)
    for (int v : q) m = std::max(m, v);
  return m;
}

// 2-color vertices by quad corner parity (corners alternate around a quad).
std::vector<Graph> infer_colors(const std::vector<std::array<int, 4>>& quads, int nv) {
  std::vector<int> col(nv, -1);
  // union of parity constraints; BFS over a constraint graph
  std::vector<std::vector<std::pair<int, int>>> adj(nv);  // (other, same_parity)
  for (const auto& q : quads) {
    for (int i = 0; i < 4; ++i) {
      adj[q[i]].push_back({q[(i + 1) % 4], 0});
      adj[q[i]].push_back({q[(i + 2) % 4], 1});
    }
  }
  for (int s = 0; s < nv; ++s) {
    if (col[s] >= 0 || adj[s].empty()) continue;
    col[s] = 0;
    std::queue<int> bfs;
    bfs.push(s);
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop();
      for (auto [w, same] : adj[u]) {
        int want = same ? col[u] : 1 - col[u];
        if (col[w] < 0) {
          col[w] = want;
          bfs.push(w);
        } else if (col[w] != want) {
          throw error(errc::non_bipartite, "vertices are not 2-colorable into Gamma/Gamma*");
        }
      }
    }
  }
  std::vector<Graph> out(nv, Graph::gamma);
  for (int v = 0; v < nv; ++v)
    out[v] = col[v] == 1 ? Graph::gamma_star : Graph::gamma;
  return out;
}

}  // namespace

DoubleComplex DoubleComplex::build(std::vector<std::array<int, 4>> quads,
                                   std::vector<double> rho_gamma) {
  if (quads.size() != rho_gamma.size())
    throw error(errc::bad_input, "one rho per quad expected");
  int nv = max_vertex(quads) + 1;
  auto colors = infer_colors(quads, nv);
  // rotate each quad so corner 0 lies on Gamma; rho refers to the 0-2 diagonal
  for (size_t q = 0; q < quads.size(); ++q) {
    if (colors[quads[q][0]] != Graph::gamma) {
      auto t = quads[q];
      quads[q] = {t[1], t[2], t[3], t[0]};
      rho_gamma[q] = 1.0 / rho_gamma[q];
    }
    if (colors[quads[q][0]] != Graph::gamma || colors[quads[q][1]] != Graph::gamma_star)
      throw error(errc::non_bipartite, "quad corners do not alternate");
  }
  // glue sides sharing an unordered vertex pair
  std::map<std::pair<int, int>, std::vector<int>> by_pair;
  for (size_t q = 0; q < quads.size(); ++q) {
    for (int s = 0; s < 4; ++s) {
      int a = quads[q][s], b = quads[q][(s + 1) % 4];
      by_pair[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(4 * q + s));
    }
  }
  std::vector<int> partner(4 * quads.size(), -1);
  for (auto& [pr, slots] : by_pair) {
    if (slots.size() > 2)
      throw error(errc::non_manifold, "diamond edge bounded by more than 2 quads");
    if (slots.size() == 2) {
      int s0 = slots[0], s1 = slots[1];
      int a0 = quads[s0 / 4][s0 % 4];
      int a1 = quads[s1 / 4][s1 % 4];
      if (a0 == a1)
        throw error(errc::bad_orientation, "glued sides traversed in the same direction");
      partner[s0] = s1;
      partner[s1] = s0;
    }
  }
  return build_glued(std::move(quads), std::move(rho_gamma), std::move(partner),
                     std::move(colors));
}

DoubleComplex DoubleComplex::build_glued(std::vector<std::array<int, 4>> quads,
                                         std::vector<double> rho_gamma,
                                         std::vector<int> partner,
                                         std::vector<Graph> colors) {
  DoubleComplex dc;
  dc.quads_ = std::move(quads);
  dc.rho_ = std::move(rho_gamma);
  dc.color_ = std::move(colors);
  dc.partner_.resize(4 * dc.quads_.size());
  for (size_t i = 0; i < dc.partner_.size(); ++i) {
    int p = partner[i];
    dc.partner_[i] = p < 0 ? Slot{} : Slot{p / 4, p % 4};
  }
  for (double r : dc.rho_)
    if (!(r > 0.0)) throw error(errc::bad_input, "rho must be positive");
  for (const auto& q : dc.quads_) {
    if (dc.color_[q[0]] != Graph::gamma || dc.color_[q[2]] != Graph::gamma ||
        dc.color_[q[1]] != Graph::gamma_star || dc.color_[q[3]] != Graph::gamma_star)
      throw error(errc::non_bipartite, "quad corners must alternate Gamma, Gamma*");
  }
  dc.finalize();
  return dc;
}

void DoubleComplex::finalize() {
  const int nq = quad_count();
  const int nv = vertex_count();

  // consistency of the pairing
  for (int q = 0; q < nq; ++q) {
    for (int s = 0; s < 4; ++s) {
      Slot p = partner_[4 * q + s];
      if (!p.valid()) continue;
      if (partner_[4 * p.quad + p.side] != Slot{q, s})
        throw error(errc::bad_input, "slot pairing is not an involution");
      int a = corner(q, s), b = corner(q, (s + 1) % 4);
      int a2 = corner(p.quad, p.side), b2 = corner(p.quad, (p.side + 1) % 4);
      if (a != b2 || b != a2)
        throw error(errc::bad_orientation, "glued sides disagree on endpoints/orientation");
    }
  }

  // diamond edges from slot pairs
  side_edge_.assign(4 * nq, -1);
  side_sign_.assign(4 * nq, 0);
  edge_tail_.clear();
  edge_head_.clear();
  edge_slots_.clear();
  boundary_edge_count_ = 0;
  for (int q = 0; q < nq; ++q) {
    for (int s = 0; s < 4; ++s) {
      if (side_edge_[4 * q + s] >= 0) continue;
      int e = static_cast<int>(edge_tail_.size());
      edge_tail_.push_back(corner(q, s));
      edge_head_.push_back(corner(q, (s + 1) % 4));
      side_edge_[4 * q + s] = e;
      side_sign_[4 * q + s] = 1;
      Slot p = partner_[4 * q + s];
      if (p.valid()) {
        side_edge_[4 * p.quad + p.side] = e;
        side_sign_[4 * p.quad + p.side] = -1;
        edge_slots_.push_back({Slot{q, s}, p});
      } else {
        edge_slots_.push_back({Slot{q, s}, Slot{}});
        ++boundary_edge_count_;
      }
    }
  }

  // vertex fans via rotation walks
  std::vector<std::vector<Corner>> at(nv);
  for (int q = 0; q < nq; ++q)
    for (int i = 0; i < 4; ++i) at[corner(q, i)].push_back({q, i});
  fan_.assign(nv, {});
  interior_.assign(nv, 0);
  degree_.assign(nv, 0);
  vertex_edges_.assign(nv, {});
  for (int v = 0; v < nv; ++v) {
    if (at[v].empty()) throw error(errc::bad_input, "isolated vertex");
    Corner start = at[v][0];
    // walk ccw as far as possible
    std::vector<Corner> fwd{start};
    for (;;) {
      Corner n = next_ccw(fwd.back());
      if (n.quad < 0 || n == start) break;
      fwd.push_back(n);
      if (fwd.size() > at[v].size())
        throw error(errc::non_manifold, "vertex fan does not close consistently");
    }
    bool cyc = next_ccw(fwd.back()).quad >= 0 && next_ccw(fwd.back()) == start;
    if (!cyc) {
      // open fan: extend backwards (cw) from start
      std::vector<Corner> bwd;
      Corner c = start;
      for (;;) {
        Corner p = next_cw(c);
        if (p.quad < 0) break;
        bwd.push_back(p);
        c = p;
        if (bwd.size() > at[v].size())
          throw error(errc::non_manifold, "vertex fan does not close consistently");
      }
      std::reverse(bwd.begin(), bwd.end());
      bwd.insert(bwd.end(), fwd.begin(), fwd.end());
      fwd = std::move(bwd);
    }
    if (fwd.size() != at[v].size())
      throw error(errc::non_manifold, "pinched vertex: disconnected corner fan");
    fan_[v] = std::move(fwd);
    interior_[v] = cyc ? 1 : 0;
    // incident diamond edges, ccw: one per out-ray
    std::vector<int> es;
    for (const Corner& c : fan_[v]) es.push_back(side_edge_[4 * c.quad + c.pos]);
    if (!interior_[v] && !fan_[v].empty()) {
      const Corner& last = fan_[v].back();
      es.push_back(side_edge_[4 * last.quad + (last.pos + 3) % 4]);
    }
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
    vertex_edges_[v] = std::move(es);
    degree_[v] = static_cast<int>(vertex_edges_[v].size());
  }

  // connectivity over diamond edges
  {
    std::vector<char> seen(nv, 0);
    std::queue<int> bfs;
    bfs.push(edge_tail_.empty() ? 0 : edge_tail_[0]);
    seen[bfs.front()] = 1;
    int cnt = 1;
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop();
      for (int e : vertex_edges_[u]) {
        int w = edge_tail_[e] == u ? edge_head_[e] : edge_tail_[e];
        if (!seen[w]) {
          seen[w] = 1;
          ++cnt;
          bfs.push(w);
        }
      }
    }
    if (cnt != nv) throw error(errc::disconnected, "complex is not connected");
  }

  if (closed()) {
    int chi = euler_characteristic();
    if (chi > 2 || ((2 - chi) % 2) != 0)
      throw error(errc::bad_input, "closed surface has invalid Euler characteristic");
  }
}

Corner DoubleComplex::next_ccw(Corner c) const {
  Slot p = partner_[4 * c.quad + (c.pos + 3) % 4];
  if (!p.valid()) return {};
  return {p.quad, p.side};
}

Corner DoubleComplex::next_cw(Corner c) const {
  Slot p = partner_[4 * c.quad + c.pos];
  if (!p.valid()) return {};
  return {p.quad, (p.side + 1) % 4};
}

int DoubleComplex::find_edge(int u, int v) const {
  for (int e : vertex_edges_[u]) {
    if ((edge_tail_[e] == u && edge_head_[e] == v) ||
        (edge_tail_[e] == v && edge_head_[e] == u))
      return e;
  }
  return -1;
}

int DoubleComplex::genus() const {
  if (!closed()) throw error(errc::not_closed_surface, "genus requires a closed surface");
  return (2 - euler_characteristic()) / 2;
}

std::vector<int> DoubleComplex::vertex_quads(int v) const {
  std::vector<int> qs;
  for (const Corner& c : fan_[v]) qs.push_back(c.quad);
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  return qs;
}

int DoubleComplex::cell_count(Carrier c, int grade) const {
  if (c == Carrier::diamond) {
    if (grade == 0) return vertex_count();
    if (grade == 1) return diamond_edge_count();
    if (grade == 2) return quad_count();
  } else {
    if (grade == 0) return vertex_count();
    if (grade == 1) return lambda_edge_count();
    if (grade == 2) return vertex_count();  // fan face per vertex
  }
  throw error(errc::bad_input, "grade out of range");
}

Chain& Chain::operator+=(const Chain& o) {
  for (auto& [k, v] : o.coef) add(k, v);
  return *this;
}
Chain& Chain::operator-=(const Chain& o) {
  for (auto& [k, v] : o.coef) add(k, -v);
  return *this;
}
Chain Chain::operator*(long long s) const {
  Chain r(carrier, grade);
  if (s != 0)
    for (auto& [k, v] : coef) r.coef[k] = v * s;
  return r;
}

Cochain& Cochain::operator+=(const Cochain& o) {
  for (size_t i = 0; i < val.size(); ++i) val[i] += o.val[i];
  return *this;
}
Cochain& Cochain::operator-=(const Cochain& o) {
  for (size_t i = 0; i < val.size(); ++i) val[i] -= o.val[i];
  return *this;
}
Cochain Cochain::operator*(cplx s) const {
  Cochain r = *this;
  for (auto& v : r.val) v *= s;
  return r;
}
Cochain Cochain::operator+(const Cochain& o) const {
  Cochain r = *this;
  r += o;
  return r;
}
Cochain Cochain::operator-(const Cochain& o) const {
  Cochain r = *this;
  r -= o;
  return r;
}
double Cochain::max_abs() const {
  double m = 0;
  for (const auto& v : val) m = std::max(m, std::abs(v));
  return m;
}

cplx pair(const Cochain& f, const Chain& c) {
  if (f.carrier != c.carrier || f.grade != c.grade)
    throw error(errc::bad_input, "pairing carrier/grade mismatch");
  cplx s = 0;
  for (auto& [cell, k] : c.coef) s += static_cast<double>(k) * f.val[cell];
  return s;
}

Chain cell_boundary(const DoubleComplex& dc, Carrier carrier, int grade, int cell,
                    int sign) {
  if (grade == 0) throw error(errc::grade_zero, "boundary of a vertex");
  Chain out(carrier, grade - 1);
  if (carrier == Carrier::diamond) {
    if (grade == 1) {
      out.add(dc.edge_head(cell), sign);
      out.add(dc.edge_tail(cell), -sign);
    } else {
      for (int s = 0; s < 4; ++s)
        out.add(dc.side_edge(cell, s), sign * dc.side_sign(cell, s));
    }
  } else {
    if (grade == 1) {
      out.add(dc.lambda_head(cell), sign);
      out.add(dc.lambda_tail(cell), -sign);
    } else {
      // fan face around vertex `cell`; boundary uses the other graph's
      // diagonals, ccw. Signs per corner position: +e*, -e, -e*, +e.
      if (!dc.vertex_interior(cell))
        throw error(errc::bad_input, "lambda face only exists at interior vertices");
      for (const Corner& c : dc.vertex_fan(cell)) {
        int eg = 2 * c.quad, egs = 2 * c.quad + 1;
        switch (c.pos) {
          case 0: out.add(egs, sign); break;
          case 1: out.add(eg, -sign); break;
          case 2: out.add(egs, -sign); break;
          case 3: out.add(eg, sign); break;
        }
      }
    }
  }
  return out;
}

Chain boundary(const DoubleComplex& dc, const Chain& c) {
  if (c.grade == 0) throw error(errc::grade_zero, "boundary of a 0-chain");
  Chain out(c.carrier, c.grade - 1);
  for (auto& [cell, k] : c.coef) {
    Chain b = cell_boundary(dc, c.carrier, c.grade, cell, 1);
    for (auto& [cc, kk] : b.coef) out.add(cc, k * kk);
  }
  return out;
}

Cochain coboundary(const DoubleComplex& dc, const Cochain& f) {
  if (f.grade >= 2) throw error(errc::grade_two, "coboundary of a 2-form");
  Cochain out(dc, f.carrier, f.grade + 1);
  int n = dc.cell_count(f.carrier, f.grade + 1);
  for (int cell = 0; cell < n; ++cell) {
    if (f.carrier == Carrier::lambda && f.grade == 1 && !dc.vertex_interior(cell))
      continue;  // no face at boundary vertices
    Chain b = cell_boundary(dc, f.carrier, f.grade + 1, cell, 1);
    out.val[cell] = pair(f, b);
  }
  return out;
}

Cochain biconstant(const DoubleComplex& dc, Carrier carrier) {
  Cochain e(dc, carrier, 0);
  for (int v = 0; v < dc.vertex_count(); ++v) e.val[v] = dc.biconstant(v);
  return e;
}

}  // namespace drs
