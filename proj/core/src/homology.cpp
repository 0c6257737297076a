#include "drs/homology.hpp"

#include <algorithm>
#include <cstdlib>
#include <queue>

namespace drs {

std::vector<int> spanning_tree(const DoubleComplex& dc) {
  const int nv = dc.vertex_count();
  std::vector<char> seen(nv, 0);
  std::vector<int> tree;
  std::queue<int> bfs;
  bfs.push(0);
  seen[0] = 1;
  while (!bfs.empty()) {
    int u = bfs.front();
    bfs.pop();
    for (int e : dc.vertex_edges(u)) {
      int w = dc.edge_tail(e) == u ? dc.edge_head(e) : dc.edge_tail(e);
      if (!seen[w]) {
        seen[w] = 1;
        tree.push_back(e);
        bfs.push(w);
      }
    }
  }
  if (static_cast<int>(tree.size()) != nv - 1)
    throw error(errc::disconnected, "diamond skeleton is not connected");
  return tree;
}

namespace {

// parent structure of the tree rooted at 0: per vertex, (parent, edge)
struct Rooted {
  std::vector<int> parent, via_edge, depth;
};

Rooted root_tree(const DoubleComplex& dc, const std::vector<int>& tree) {
  const int nv = dc.vertex_count();
  std::vector<std::vector<int>> adj(nv);
  for (int e : tree) {
    adj[dc.edge_tail(e)].push_back(e);
    adj[dc.edge_head(e)].push_back(e);
  }
  Rooted r;
  r.parent.assign(nv, -1);
  r.via_edge.assign(nv, -1);
  r.depth.assign(nv, 0);
  std::vector<char> seen(nv, 0);
  std::queue<int> bfs;
  bfs.push(0);
  seen[0] = 1;
  while (!bfs.empty()) {
    int u = bfs.front();
    bfs.pop();
    for (int e : adj[u]) {
      int w = dc.edge_tail(e) == u ? dc.edge_head(e) : dc.edge_tail(e);
      if (seen[w]) continue;
      seen[w] = 1;
      r.parent[w] = u;
      r.via_edge[w] = e;
      r.depth[w] = r.depth[u] + 1;
      bfs.push(w);
    }
  }
  return r;
}

// tree path u -> v as a chain
Chain tree_path(const DoubleComplex& dc, const Rooted& r, int u, int v) {
  Chain c(Carrier::diamond, 1);
  int a = u, b = v;
  while (r.depth[a] > r.depth[b]) {
    int e = r.via_edge[a];
    c.add(e, dc.edge_head(e) == a ? -1 : +1);  // step a -> parent
    a = r.parent[a];
  }
  while (r.depth[b] > r.depth[a]) {
    int e = r.via_edge[b];
    c.add(e, dc.edge_head(e) == b ? +1 : -1);  // step parent -> b, reversed below
    b = r.parent[b];
  }
  while (a != b) {
    int e = r.via_edge[a];
    c.add(e, dc.edge_head(e) == a ? -1 : +1);
    a = r.parent[a];
    e = r.via_edge[b];
    c.add(e, dc.edge_head(e) == b ? +1 : -1);
    b = r.parent[b];
  }
  return c;
}

}  // namespace

std::vector<Chain> cycle_basis(const DoubleComplex& dc, const std::vector<int>& tree) {
  if (!dc.closed())
    throw error(errc::not_closed_surface, "cycle basis requires a closed surface");
  const int ne = dc.diamond_edge_count();
  std::vector<char> in_tree(ne, 0);
  for (int e : tree) in_tree[e] = 1;
  // dual spanning tree over faces using non-tree edges
  const int nq = dc.quad_count();
  std::vector<char> face_seen(nq, 0), in_dual(ne, 0);
  std::queue<int> bfs;
  bfs.push(0);
  face_seen[0] = 1;
  int reached = 1;
  while (!bfs.empty()) {
    int q = bfs.front();
    bfs.pop();
    for (int s = 0; s < 4; ++s) {
      int e = dc.side_edge(q, s);
      if (in_tree[e] || in_dual[e]) continue;
      Slot p = dc.partner(q, s);
      if (!p.valid() || face_seen[p.quad]) continue;
      in_dual[e] = 1;
      face_seen[p.quad] = 1;
      ++reached;
      bfs.push(p.quad);
    }
  }
  if (reached != nq)
    throw error(errc::disconnected, "dual face graph is not connected");
  Rooted r = root_tree(dc, tree);
  std::vector<Chain> basis;
  for (int e = 0; e < ne; ++e) {
    if (in_tree[e] || in_dual[e]) continue;
    Chain c(Carrier::diamond, 1);
    c.add(e, 1);
    c += tree_path(dc, r, dc.edge_head(e), dc.edge_tail(e));
    basis.push_back(std::move(c));
  }
  if (static_cast<int>(basis.size()) != 2 * dc.genus())
    throw error(errc::bad_input, "tree-cotree leftover is not 2g edges");
  return basis;
}

std::vector<Chain> cycle_basis(const DoubleComplex& dc) {
  return cycle_basis(dc, spanning_tree(dc));
}

std::vector<std::vector<LoopStep>> decompose_loops(const DoubleComplex& dc,
                                                   const Chain& c) {
  if (c.carrier != Carrier::diamond || c.grade != 1)
    throw error(errc::bad_input, "loop decomposition expects diamond 1-chains");
  // multiset of directed edges out of each vertex
  std::map<int, long long> remaining = c.coef;
  std::vector<std::vector<LoopStep>> loops;
  auto take_out_edge = [&](int v) -> int {
    for (auto& [e, k] : remaining) {
      if (k > 0 && dc.edge_tail(e) == v) return e;
      if (k < 0 && dc.edge_head(e) == v) return e;
    }
    return -1;
  };
  while (!remaining.empty()) {
    int e0 = remaining.begin()->first;
    long long k0 = remaining.begin()->second;
    int start = k0 > 0 ? dc.edge_tail(e0) : dc.edge_head(e0);
    std::vector<LoopStep> walk;
    int v = start;
    do {
      int e = take_out_edge(v);
      if (e < 0) throw error(errc::not_closed, "chain is not a cycle");
      long long k = remaining[e];
      int sgn = k > 0 ? +1 : -1;
      remaining[e] -= sgn;
      if (remaining[e] == 0) remaining.erase(e);
      walk.push_back({e, sgn});
      v = sgn > 0 ? dc.edge_head(e) : dc.edge_tail(e);
    } while (v != start);
    // split at repeated vertices into simple loops; step i starts at vertex
    // stack_start[i]
    std::vector<LoopStep> stack;
    std::map<int, int> pos;  // vertex -> index into stack where it is the tail
    pos[start] = 0;
    int cur = start;
    for (const LoopStep& st : walk) {
      stack.push_back(st);
      cur = st.sign > 0 ? dc.edge_head(st.edge) : dc.edge_tail(st.edge);
      auto it = pos.find(cur);
      if (it != pos.end()) {
        std::vector<LoopStep> loop(stack.begin() + it->second, stack.end());
        if (loop.size() >= 2) loops.push_back(loop);
        while (static_cast<int>(stack.size()) > it->second) {
          const LoopStep& b = stack.back();
          int tail = b.sign > 0 ? dc.edge_tail(b.edge) : dc.edge_head(b.edge);
          pos.erase(tail);
          stack.pop_back();
        }
        pos[cur] = static_cast<int>(stack.size());
      } else {
        pos[cur] = static_cast<int>(stack.size());
      }
    }
    if (stack.size() >= 2) loops.push_back(stack);
  }
  return loops;
}

std::vector<int> loop_vertices(const DoubleComplex& dc,
                               const std::vector<LoopStep>& loop) {
  std::vector<int> vs;
  for (const LoopStep& s : loop)
    vs.push_back(s.sign > 0 ? dc.edge_tail(s.edge) : dc.edge_head(s.edge));
  return vs;
}

namespace {

// Adds to `out` the left companion segments of the simple loop. At each
// vertex the quads swept clockwise from the incoming ray to the outgoing ray
// lie on the left; their diagonals on the other graph chain up, oriented
// along the sweep. Rays are matched by diamond edge id so double edges stay
// unambiguous.
void companion_of_loop(const DoubleComplex& dc, const std::vector<LoopStep>& loop,
                       Chain& out_gamma, Chain& out_gamma_star) {
  const int n = static_cast<int>(loop.size());
  for (int k = 0; k < n; ++k) {
    const LoopStep& in = loop[(k + n - 1) % n];
    const LoopStep& out = loop[k];
    int v = out.sign > 0 ? dc.edge_tail(out.edge) : dc.edge_head(out.edge);
    if (!dc.vertex_interior(v))
      throw error(errc::bad_input, "companions need interior vertices");
    if (in.edge == out.edge) continue;  // backtrack, cancels in the chain
    const auto& fan = dc.vertex_fan(v);
    // start: corner whose in-ray side (pos+3)%4 is the incoming edge;
    // stop: corner whose out-ray side pos is the outgoing edge
    int start = -1, stop = -1;
    for (int i = 0; i < static_cast<int>(fan.size()); ++i) {
      const Corner& c = fan[i];
      if (dc.side_edge(c.quad, (c.pos + 3) % 4) == in.edge) start = i;
      if (dc.side_edge(c.quad, c.pos) == out.edge) stop = i;
    }
    if (start < 0 || stop < 0)
      throw error(errc::bad_input, "walk does not follow diamond edges");
    // sweep clockwise: start, start-1, ... until stop (inclusive)
    int m = static_cast<int>(fan.size());
    for (int i = start;; i = (i + m - 1) % m) {
      const Corner& c = fan[i];
      // diagonal of the other graph, oriented corner (pos+3) -> (pos+1)
      int le = (c.pos % 2 == 0) ? 2 * c.quad + 1 : 2 * c.quad;
      int sign = (c.pos == 1 || c.pos == 2) ? +1 : -1;
      if (c.pos % 2 == 0)
        out_gamma_star.add(le, sign);
      else
        out_gamma.add(le, sign);
      if (i == stop) break;
    }
  }
}

}  // namespace

std::pair<Chain, Chain> left_companions(const DoubleComplex& dc, const Chain& c) {
  Chain cg(Carrier::lambda, 1), cgs(Carrier::lambda, 1);
  for (const auto& walk : decompose_loops(dc, c))
    companion_of_loop(dc, walk, cg, cgs);
  return {cg, cgs};
}

namespace {

long long lambda_intersection(const Chain& a, const Chain& b) {
  long long s = 0;
  // sum over quads of a_e b_e* - a_e* b_e
  for (auto& [cell, k] : a.coef) {
    int q = cell >> 1;
    if ((cell & 1) == 0)
      s += k * b.at(2 * q + 1);
    else
      s -= k * b.at(2 * q);
  }
  return s;
}

}  // namespace

long long intersection_number(const DoubleComplex& dc, const Chain& a, const Chain& b) {
  if (a.carrier != b.carrier || a.grade != 1 || b.grade != 1)
    throw error(errc::bad_input, "intersection expects two 1-cycles on the same carrier");
  if (a.carrier == Carrier::lambda) return lambda_intersection(a, b);
  auto [ag, ags] = left_companions(dc, a);
  auto [bg, bgs] = left_companions(dc, b);
  long long m1 = lambda_intersection(ag, bgs);
  long long m2 = lambda_intersection(ags, bg);
  if (m1 != m2)
    throw error(errc::bad_input, "companion intersections disagree");
  return m1;
}

CanonicalDissection canonical_dissection(const DoubleComplex& dc,
                                         const std::vector<Chain>& basis) {
  const int n = static_cast<int>(basis.size());
  const int g = dc.genus();
  if (n != 2 * g) throw error(errc::bad_input, "basis must contain 2g cycles");
  CanonicalDissection out;
  out.g = g;
  if (g == 0) {
    out.intersection.resize(0, 0);
    return out;
  }
  Eigen::MatrixXi M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      M(i, j) = static_cast<int>(intersection_number(dc, basis[i], basis[j]));
  // symplectic reduction over Z; U tracks the change of basis (rows)
  Eigen::MatrixXi U = Eigen::MatrixXi::Identity(n, n);
  std::vector<char> done(n, 0);
  auto row_op = [&](int dst, int src, long long f) {
    // row dst -= f * row src, with the congruent column update
    M.row(dst) -= static_cast<int>(f) * M.row(src);
    M.col(dst) -= static_cast<int>(f) * M.col(src);
    U.row(dst) -= static_cast<int>(f) * U.row(src);
  };
  std::vector<std::pair<int, int>> pairs;
  for (int round = 0; round < g; ++round) {
    // minimal nonzero pairing among the remaining rows
    int pi = -1, pj = -1;
    for (;;) {
      pi = pj = -1;
      int best = 0;
      for (int i = 0; i < n; ++i) {
        if (done[i]) continue;
        for (int j = 0; j < n; ++j) {
          if (done[j] || M(i, j) == 0) continue;
          if (pi < 0 || std::abs(M(i, j)) < best) {
            best = std::abs(M(i, j));
            pi = i;
            pj = j;
          }
        }
      }
      if (pi < 0) throw error(errc::degenerate_pairing, "intersection form is singular");
      if (std::abs(M(pi, pj)) == 1) break;
      // Euclid step: some entry in row pi or column pj is not divisible,
      // otherwise the form could not be unimodular
      bool reduced = false;
      for (int j = 0; j < n && !reduced; ++j) {
        if (done[j] || j == pj) continue;
        if (M(pi, j) % M(pi, pj) != 0) {
          row_op(j, pj, M(pi, j) / M(pi, pj));
          reduced = true;
        }
      }
      for (int i = 0; i < n && !reduced; ++i) {
        if (done[i] || i == pi) continue;
        if (M(i, pj) % M(pi, pj) != 0) {
          row_op(i, pi, M(i, pj) / M(pi, pj));
          reduced = true;
        }
      }
      if (!reduced)
        throw error(errc::degenerate_pairing,
                    "pairing not unimodular: no Euclid step available");
    }
    if (M(pi, pj) == -1) std::swap(pi, pj);
    // clear the rest of the pair's rows/columns
    for (int k = 0; k < n; ++k) {
      if (done[k] || k == pi || k == pj) continue;
      if (M(k, pj) != 0) row_op(k, pi, M(k, pj));
      if (M(k, pi) != 0) row_op(k, pj, -M(k, pi));
    }
    done[pi] = done[pj] = 1;
    pairs.push_back({pi, pj});
  }
  // assemble cycles: a_k = combo(U.row(pairs[k].first)), b_k = second
  auto combo = [&](int row) {
    Chain c(Carrier::diamond, 1);
    for (int j = 0; j < n; ++j)
      if (U(row, j) != 0) c += basis[j] * U(row, j);
    return c;
  };
  out.aleph.resize(2 * g);
  for (int k = 0; k < g; ++k) {
    out.aleph[k] = combo(pairs[k].first);
    out.aleph[k + g] = combo(pairs[k].second);
  }
  out.intersection.resize(2 * g, 2 * g);
  for (int i = 0; i < 2 * g; ++i)
    for (int j = 0; j < 2 * g; ++j)
      out.intersection(i, j) =
          static_cast<int>(intersection_number(dc, out.aleph[i], out.aleph[j]));
  Eigen::MatrixXi J = Eigen::MatrixXi::Zero(2 * g, 2 * g);
  J.topRightCorner(g, g) = Eigen::MatrixXi::Identity(g, g);
  J.bottomLeftCorner(g, g) = -Eigen::MatrixXi::Identity(g, g);
  if (out.intersection != J)
    throw error(errc::degenerate_pairing, "symplectic reduction failed");
  out.aleph_lambda = aleph_lambda(dc, out);
  return out;
}

CanonicalDissection canonical_dissection(const DoubleComplex& dc) {
  return canonical_dissection(dc, cycle_basis(dc));
}

std::vector<Chain> aleph_lambda(const DoubleComplex& dc, const CanonicalDissection& d) {
  const int g = d.g;
  std::vector<Chain> out(4 * g);
  for (int k = 0; k < g; ++k) {
    auto [ag, ags] = left_companions(dc, d.aleph[k]);
    out[k] = std::move(ag);
    out[k + g] = std::move(ags);
    auto [bg, bgs] = left_companions(dc, d.aleph[k + g]);
    out[k + 2 * g] = std::move(bgs);
    out[k + 3 * g] = std::move(bg);
  }
  return out;
}

Eigen::MatrixXi lambda_intersection_matrix(const DoubleComplex& dc,
                                           const std::vector<Chain>& cycles) {
  const int n = static_cast<int>(cycles.size());
  Eigen::MatrixXi M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      M(i, j) = static_cast<int>(intersection_number(dc, cycles[i], cycles[j]));
  return M;
}

}  // namespace drs
