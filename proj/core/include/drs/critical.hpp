#pragma once

#include "drs/complex.hpp"

namespace drs {

// Critical realization of a quad-graph: every face is a rhombus of common
// side delta, diagonal length ratio rho, positively oriented. Geometry is
// stored per face chart (corner positions); on critical-flat surfaces charts
// of neighbouring faces agree along shared edges up to nothing (pure
// translation gluing), so edge vectors dZ are globally well defined even
// when no global embedding exists.
struct CriticalMap {
  DoubleComplex dc;
  std::vector<std::array<cplx, 4>> face_pos;  // per quad, ccw corner positions
  std::vector<cplx> embed;  // per vertex; a true embedding iff simply connected
  double delta = 1.0;
  int origin = 0;
  bool simply_connected = false;
  std::vector<double> cone_angle;  // total corner angle per vertex

  /// Validates the rhombus invariants; throws not_critical.
  void validate(double rel_tol = 1e-9) const;

  /// dZ as a diamond 1-form (side vectors) or Lambda 1-form (diagonals).
  Cochain dz_diamond() const;
  Cochain dz_lambda() const;

  /// True when every interior cone angle is a multiple of 2 pi.
  bool critical_flat(double tol = 1e-9) const;

  cplx z(int v) const { return embed[v]; }
};

/// Genus-1 critical square lattice torus: 2p x 2q cells of the lattice
/// Z e^{-i theta} + Z e^{i theta}; horizontal parameter rho = tan theta.
/// Returns the map plus the two generator cycles (a wraps the e^{-i theta}
/// direction, b the other; a.b = +1) and the reference modulus
/// tau = (q/p) e^{2 i theta}.
struct TorusFixture {
  CriticalMap map;
  Chain cycle_a, cycle_b;  // on the diamond
  cplx tau;
};
TorusFixture square_torus(int p, int q, double theta);

/// Genus-1 critical triangular/hexagonal torus on p x q fundamental cells.
/// The three rho parameters must satisfy r1 r2 + r2 r3 + r3 r1 = 1
/// (equivalently the triangle angle identity); throws not_critical.
TorusFixture tri_hex_torus(double r1, double r2, double r3, int p, int q);

/// Planar patches (disc mode, simply connected, Z(origin) = 0).
CriticalMap square_patch(int nx, int ny, double theta, double delta = 1.0);
/// Hexagonal neighbourhood of the origin in the equilateral rhombille
/// tiling; O(radius^2) faces. tri_hex_sextant is an alias (sextant emission
/// is a filter on vertex positions).
CriticalMap tri_hex_patch(int radius, double delta = 1.0);
CriticalMap tri_hex_sextant(int radius, double delta = 1.0);
CriticalMap single_rhombus(double theta);

/// Genus-2 combinatorial fixture (no critical structure): two 2p x 2q square
/// tori with one quad removed each, glued along the square holes; rho drawn
/// from [1/2, 2] with the given seed. Needs p, q >= 2.
DoubleComplex glued_tori_genus2(int p, int q, unsigned seed);

/// Splits every quad in four; delta halves, criticality and genus are
/// preserved. Old vertices keep their ids (new midpoints/centres appended).
CriticalMap refine(const CriticalMap& m);

/// Transports a diamond cycle to the refinement of its complex (each edge
/// becomes its two halves).
Chain refine_cycle(const CriticalMap& coarse, const CriticalMap& fine, const Chain& c);

/// Train-tracks: equivalence classes of diamond edges under "opposite sides
/// of the same rhombus".
struct TrainTrack {
  std::vector<int> edges;   // in traversal order
  std::vector<int> faces;   // quads crossed, in order (|faces| = |edges|-1 open)
  bool closed = false;
};
std::vector<TrainTrack> train_tracks(const DoubleComplex& dc);

/// Homology representative of a closed thread: the chained diagonals of the
/// crossed quads (a cycle on Lambda, homologous to the thread).
Chain track_cycle(const DoubleComplex& dc, const TrainTrack& t);

/// Convexity of a face set: connected, and along every thread the faces of
/// the region form an interval (open threads) resp. an arc (closed threads).
bool is_convex(const DoubleComplex& dc, const std::vector<int>& faces);

struct ContinuationResult {
  Cochain f;                     // extended values
  std::vector<char> defined;     // per vertex
  struct Obstruction {
    int quad;
    double residual;
  };
  std::vector<Obstruction> obstructions;
};

/// Greedy analytic continuation: wherever three corners of a rhombus are
/// known the Cauchy-Riemann equation determines the fourth; faces whose four
/// known corners violate it beyond tol are reported, not fixed.
ContinuationResult continue_holomorphic(const CriticalMap& m,
                                        const std::vector<cplx>& values,
                                        const std::vector<char>& defined,
                                        double tol = 1e-10);

}  // namespace drs
