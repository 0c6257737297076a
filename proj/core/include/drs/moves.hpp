#pragma once

#include "drs/critical.hpp"

namespace drs {

/// Combinatorial surface with its conic-angle ledger. Angles are the rhombic
/// realization angles 2 atan(rho) / 2 atan(1/rho) summed per corner; moves
/// update the ledger without any embedding.
struct MarkedSurface {
  DoubleComplex dc;
  std::vector<double> angle;
};

MarkedSurface mark(const DoubleComplex& dc);
MarkedSurface mark(const CriticalMap& m);

/// Corner angle of quad q at corner position pos under the rhombic metric.
double corner_angle(const DoubleComplex& dc, int q, int pos);

/// Sum over vertices of (2 pi - angle); boundary vertices count (pi - angle).
/// Equals 2 pi chi on closed surfaces.
double total_curvature(const MarkedSurface& ms);

struct MoveRecord {
  int kind = 0;   // 1, 2, 3
  int site = -1;  // operated vertex (ids in the input complex)
  int removed = -1;
  int created = -1;        // created vertex (ids in the output complex)
  int edge = -1;           // I: output edge where the cone folded
  int quad = -1;           // II: output quad to re-split
  int axis = 0;            // II: corner position of the r1 far corner
  double rho1 = 0, rho2 = 0;
  std::vector<int> vmap;   // input vertex id -> output vertex id (-1 removed)
  std::vector<std::pair<int, double>> value_weights;  // new value from input ids
};

struct MoveResult {
  MarkedSurface surface;
  MoveRecord record;
};

// Sites where moves apply.
std::vector<int> move_I_sites(const DoubleComplex& dc);    // cone summits
std::vector<int> move_II_sites(const DoubleComplex& dc);   // series middles
std::vector<int> move_III_sites(const DoubleComplex& dc);  // degree-3 centres
bool is_tensed(const DoubleComplex& dc);

/// Type I: eliminate the quad folded at the given summit (degree-1 vertex).
MoveResult move_I(const MarkedSurface& ms, int summit);
/// Inverse: fold a cone over the given edge; the loop diagonal carries
/// rho_loop. insert_at places the new summit id (-1 appends).
MoveResult move_I_inverse(const MarkedSurface& ms, int edge, double rho_loop,
                          int insert_at = -1);

/// Type II: merge the two quads around the given middle vertex (degree 2).
MoveResult move_II(const MarkedSurface& ms, int middle);
/// Inverse: split a quad in two across the corner-(axis) diagonal;
/// rho_first is the conductance of the half containing corner axis, in the
/// units of that diagonal's graph.
MoveResult move_II_inverse(const MarkedSurface& ms, int quad, int axis,
                           double rho_first, int insert_at = -1);

/// Type III: star-triangle exchange at a degree-3 centre (either colour);
/// the centre is replaced by one of the opposite colour.
MoveResult move_III(const MarkedSurface& ms, int centre, int insert_at = -1);

/// Applies the inverse of a recorded move.
MoveResult undo(const MarkedSurface& ms, const MoveRecord& rec);

/// Transports a holomorphic function across a move. Values at surviving
/// vertices are kept; a created vertex receives the recorded weighted
/// average. Throws not_holomorphic when f violates the CR equation on the
/// source complex beyond tol.
Cochain transport(const DoubleComplex& before, const DoubleComplex& after,
                  const Cochain& f, const MoveRecord& rec, double tol = 1e-8);

/// Dimension of the space of holomorphic 1-forms (numeric rank of the
/// closedness system after eliminating the type-(1,0) constraint).
int holomorphic_form_dimension(const DoubleComplex& dc, double rank_tol = 1e-8);

}  // namespace drs
