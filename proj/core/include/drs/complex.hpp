#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace drs {

using cplx = std::complex<double>;

enum class errc {
  non_bipartite,
  bad_dual,
  non_manifold,
  bad_orientation,
  disconnected,
  grade_zero,
  grade_two,
  grade_overflow,
  carrier_diamond,
  not_closed_surface,
  holonomy_mismatch,
  solver_fail,
  degenerate_pairing,
  bad_theta,
  not_critical,
  on_singular_circle,
  not_simply_connected,
  passes_through_origin,
  not_a_loop_quad,
  bad_configuration,
  not_closed,
  singular_c,
  not_holomorphic,
  bad_input,
};

struct error : std::runtime_error {
  errc code;
  error(errc c, const std::string& what) : std::runtime_error(what), code(c) {}
};

const char* errc_name(errc c);

enum class Graph : uint8_t { gamma, gamma_star };
enum class Carrier : uint8_t { lambda, diamond };

/// Corner of a quad: quad index plus position 0..3 in the ccw corner list.
struct Corner {
  int quad = -1;
  int pos = -1;
  bool operator==(const Corner&) const = default;
};

/// A side slot of a quad. Side s runs corner s -> corner (s+1)%4.
struct Slot {
  int quad = -1;
  int side = -1;
  bool valid() const { return quad >= 0; }
  bool operator==(const Slot&) const = default;
};

// Quad-graph surface with its double Lambda = Gamma ⊔ Gamma*.
//
// Quads are stored ccw as (x, y, x', y') with x, x' on Gamma and y, y' on
// Gamma*. Each quad carries one Gamma diagonal x->x' (Lambda edge 2q), one
// Gamma* diagonal y->y' (Lambda edge 2q+1) and the conformal ratio
// rho = |y'y| / |x'x| of the Gamma diagonal; the dual diagonal has ratio
// 1/rho. The dual of edge 2q is 2q+1 (rotation by +90 degrees), and the dual
// of 2q+1 is 2q reversed.
//
// Diamond edges are explicit slot pairings so that double edges and
// self-gluings (needed by electrical rewrites) are representable. Faces of
// Lambda are the ccw fans around vertices; the face around a Gamma vertex is
// a face of Gamma*, and vice versa.
class DoubleComplex {
 public:
  DoubleComplex() = default;

  // Auto-glues sides that share an unordered vertex pair. Vertices are
  // 2-colored by corner parity; quads are rotated so corner 0 lies on Gamma.
  // rho_gamma[q] refers to the Gamma diagonal after that normalization.
  static DoubleComplex build(std::vector<std::array<int, 4>> quads,
                             std::vector<double> rho_gamma);

  // Explicit gluing: partner[4q+s] is the mate slot of side s of quad q,
  // encoded as 4*q'+s', or -1 on the boundary. Used by rewrites.
  static DoubleComplex build_glued(std::vector<std::array<int, 4>> quads,
                                   std::vector<double> rho_gamma,
                                   std::vector<int> partner,
                                   std::vector<Graph> colors);

  int vertex_count() const { return static_cast<int>(color_.size()); }
  int quad_count() const { return static_cast<int>(quads_.size()); }
  int diamond_edge_count() const { return static_cast<int>(edge_tail_.size()); }
  int lambda_edge_count() const { return 2 * quad_count(); }

  Graph vertex_graph(int v) const { return color_[v]; }
  double biconstant(int v) const { return color_[v] == Graph::gamma ? 1.0 : -1.0; }

  const std::array<int, 4>& quad(int q) const { return quads_[q]; }
  int corner(int q, int pos) const { return quads_[q][pos]; }
  double rho_gamma(int q) const { return rho_[q]; }

  /// rho of a Lambda edge id (2q Gamma diagonal, 2q+1 its dual).
  double rho_lambda(int le) const { return (le & 1) ? 1.0 / rho_[le >> 1] : rho_[le >> 1]; }
  int lambda_tail(int le) const { return quads_[le >> 1][(le & 1) ? 1 : 0]; }
  int lambda_head(int le) const { return quads_[le >> 1][(le & 1) ? 3 : 2]; }

  // Diamond edges.
  int side_edge(int q, int s) const { return side_edge_[4 * q + s]; }
  int side_sign(int q, int s) const { return side_sign_[4 * q + s]; }
  Slot partner(int q, int s) const { return partner_[4 * q + s]; }
  int edge_tail(int e) const { return edge_tail_[e]; }
  int edge_head(int e) const { return edge_head_[e]; }
  bool edge_interior(int e) const { return edge_slots_[e][1].valid(); }
  const std::array<Slot, 2>& edge_slots(int e) const { return edge_slots_[e]; }
  /// Diamond edge joining u,v, or -1. Ambiguous for double edges (first hit).
  int find_edge(int u, int v) const;

  bool closed() const { return boundary_edge_count_ == 0; }
  int boundary_edge_count() const { return boundary_edge_count_; }
  int euler_characteristic() const {
    return vertex_count() - diamond_edge_count() + quad_count();
  }
  int genus() const;

  // Rotation system: corners around a vertex in ccw order. For interior
  // vertices the fan is cyclic; for boundary vertices it is the full open fan.
  const std::vector<Corner>& vertex_fan(int v) const { return fan_[v]; }
  bool vertex_interior(int v) const { return interior_[v]; }
  int vertex_degree(int v) const { return degree_[v]; }
  const std::vector<int>& vertex_edges(int v) const { return vertex_edges_[v]; }
  /// Distinct quads incident to v (a quad may appear once even if it touches
  /// v at two corners).
  std::vector<int> vertex_quads(int v) const;

  /// Number of cells of the given carrier and grade. Lambda grade 2 counts
  /// one face per vertex (only interior ones are real cells in disc mode).
  int cell_count(Carrier c, int grade) const;

  /// Next corner around the common vertex, ccw / cw. Invalid when crossing a
  /// boundary side.
  Corner next_ccw(Corner c) const;
  Corner next_cw(Corner c) const;

 private:
  void finalize();  // derives edges, fans, flags; validates manifoldness

  std::vector<std::array<int, 4>> quads_;
  std::vector<double> rho_;
  std::vector<Graph> color_;
  std::vector<Slot> partner_;  // per slot 4q+s

  std::vector<int> side_edge_, side_sign_;  // per slot
  std::vector<int> edge_tail_, edge_head_;
  std::vector<std::array<Slot, 2>> edge_slots_;
  std::vector<std::vector<Corner>> fan_;
  std::vector<std::vector<int>> vertex_edges_;
  std::vector<int> degree_;
  std::vector<char> interior_;
  int boundary_edge_count_ = 0;
};

// Integer chain, sparse over canonical oriented cells.
struct Chain {
  Carrier carrier = Carrier::diamond;
  int grade = 1;
  std::map<int, long long> coef;

  Chain() = default;
  Chain(Carrier c, int g) : carrier(c), grade(g) {}
  void add(int cell, long long v) {
    if (v == 0) return;
    auto it = coef.find(cell);
    if (it == coef.end()) {
      coef.emplace(cell, v);
    } else {
      it->second += v;
      if (it->second == 0) coef.erase(it);
    }
  }
  long long at(int cell) const {
    auto it = coef.find(cell);
    return it == coef.end() ? 0 : it->second;
  }
  bool empty() const { return coef.empty(); }
  Chain& operator+=(const Chain& o);
  Chain& operator-=(const Chain& o);
  Chain operator*(long long k) const;
  Chain operator+(const Chain& o) const {
    Chain r = *this;
    r += o;
    return r;
  }
  Chain operator-(const Chain& o) const {
    Chain r = *this;
    r -= o;
    return r;
  }
};

// Complex cochain, dense over canonical oriented cells.
struct Cochain {
  Carrier carrier = Carrier::lambda;
  int grade = 0;
  std::vector<cplx> val;

  Cochain() = default;
  Cochain(const DoubleComplex& dc, Carrier c, int g)
      : carrier(c), grade(g), val(dc.cell_count(c, g), cplx(0.0)) {}

  cplx operator()(int cell, int sign = 1) const {
    return sign >= 0 ? val[cell] : -val[cell];
  }
  Cochain& operator+=(const Cochain& o);
  Cochain& operator-=(const Cochain& o);
  Cochain operator*(cplx s) const;
  Cochain operator+(const Cochain& o) const;
  Cochain operator-(const Cochain& o) const;
  double max_abs() const;
};

/// <f, c> — evaluation of a cochain on a chain of the same carrier/grade.
cplx pair(const Cochain& f, const Chain& c);

/// Boundary operator; grade drops by one. Throws grade_zero on vertices.
Chain boundary(const DoubleComplex& dc, const Chain& c);

/// Coboundary (exterior derivative) via Stokes; grade raises by one.
/// Throws grade_two on 2-forms. Lambda 2-forms are supported on interior
/// vertex fans only.
Cochain coboundary(const DoubleComplex& dc, const Cochain& f);

/// The biconstant: +1 on Gamma vertices, -1 on Gamma* vertices.
Cochain biconstant(const DoubleComplex& dc, Carrier carrier);

/// Boundary chain of a single oriented cell.
Chain cell_boundary(const DoubleComplex& dc, Carrier carrier, int grade,
                    int cell, int sign = 1);

}  // namespace drs
