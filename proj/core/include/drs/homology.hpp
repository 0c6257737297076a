#pragma once

#include <Eigen/Dense>

#include "drs/complex.hpp"

namespace drs {

/// Maximal tree in the diamond 1-skeleton (edge ids, |V|-1 of them).
std::vector<int> spanning_tree(const DoubleComplex& dc);

/// 2g independent cycles on the diamond of a closed surface, via the
/// tree-cotree decomposition: edges outside both the vertex tree and a dual
/// spanning tree of the faces each close one generator of H1.
std::vector<Chain> cycle_basis(const DoubleComplex& dc, const std::vector<int>& tree);
std::vector<Chain> cycle_basis(const DoubleComplex& dc);

/// One directed step of a loop: diamond edge id, +1 when traversed
/// tail->head.
struct LoopStep {
  int edge;
  int sign;
};

/// Closed simple walks realizing an integer 1-chain cycle on the diamond.
/// Walks are split at repeated vertices; chains with multiplicity peel into
/// repeated walks. Edge identities are kept so double edges stay resolvable.
std::vector<std::vector<LoopStep>> decompose_loops(const DoubleComplex& dc,
                                                   const Chain& c);

/// Vertex sequence visited by a loop (tail of each step).
std::vector<int> loop_vertices(const DoubleComplex& dc,
                               const std::vector<LoopStep>& loop);

/// Companion cycles on Gamma and Gamma* lying to the left of a diamond cycle,
/// homologous to it on the surface. Simple loops are fanned around each
/// intermediate vertex; non-simple input is split at repeated vertices first.
std::pair<Chain, Chain> left_companions(const DoubleComplex& dc, const Chain& c);

/// Intersection number. Both cycles on Lambda: signed count over quads of
/// crossings between Gamma and Gamma* diagonals. Both on the diamond:
/// companions are intersected (the two mixed pairings agree and equal the
/// topological intersection).
long long intersection_number(const DoubleComplex& dc, const Chain& a, const Chain& b);

struct CanonicalDissection {
  int g = 0;
  std::vector<Chain> aleph;          // 2g cycles on the diamond
  std::vector<Chain> aleph_lambda;   // 4g cycles on Lambda: G-a, G*-a, G*-b, G-b
  Eigen::MatrixXi intersection;      // 2g x 2g, equals [[0,I],[-I,0]]
};

/// Symplectic homology basis from any spanning set of 2g cycles; integer
/// row reduction with Euclid steps brings the pairing to [[0,I],[-I,0]].
CanonicalDissection canonical_dissection(const DoubleComplex& dc,
                                         const std::vector<Chain>& basis);
CanonicalDissection canonical_dissection(const DoubleComplex& dc);

/// The 4g Lambda cycles induced by a dissection, ordered
/// (G_1..G_g, G*_1..G*_g, G*_{g+1}..G*_{2g}, G_{g+1}..G_{2g}).
std::vector<Chain> aleph_lambda(const DoubleComplex& dc, const CanonicalDissection& d);

/// 4g x 4g intersection matrix of the Lambda cycles.
Eigen::MatrixXi lambda_intersection_matrix(const DoubleComplex& dc,
                                           const std::vector<Chain>& cycles);

}  // namespace drs
