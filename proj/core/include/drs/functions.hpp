#pragma once

#include <optional>

#include "drs/critical.hpp"
#include "drs/homology.hpp"

namespace drs {

/// The 1-form f dZ on the diamond: (f(x)+f(y))/2 (Z(y)-Z(x)) per edge.
/// Holomorphic when f is; merely closed for a general holomorphic theta in
/// place of dZ.
Cochain integrate_fdz(const CriticalMap& m, const Cochain& f);

/// Integral of a closed diamond 1-form from the origin along a BFS tree;
/// the returned report carries the worst face residual (path independence).
struct Primitive {
  Cochain f;  // grade 0 on Lambda vertices
  double closure_residual = 0;
};
Primitive primitive_from_origin(const CriticalMap& m, const Cochain& one_form);

/// Discrete exponential Exp(:lambda:), the multiplicative cocycle
/// (2 + lambda dZ)/(2 - lambda dZ) integrated from the origin.
/// Throws on_singular_circle when |lambda| delta = 2 and
/// not_simply_connected on closed surfaces.
Cochain exponential(const CriticalMap& m, cplx lambda);

/// Closed form on rectangular lattices for z = delta (n e^{-i theta} + m e^{i theta}).
cplx exponential_rect(double delta, double theta, cplx lambda, int n, int mm);

/// Discrete powers Z^k, defined recursively by Z^k = integral of k Z^{k-1} dZ.
/// Returns Z^0..Z^kmax.
std::vector<Cochain> powers(const CriticalMap& m, int kmax);

/// Z^k on the 1-d chain {0, 1/n, ..., 1} by the same trapezoid recursion
/// (the thin-rhombi limit). Returns values[k][i] = Z^k(i/n), k <= kmax.
std::vector<std::vector<double>> chain_powers(int n, int kmax);

struct SeriesReport {
  std::vector<Cochain> partial;       // partial sums S_K at selected K
  std::vector<double> sup_gap;        // sup |S_K - Exp| (empty if Exp undefined)
  std::vector<double> term_at_probe;  // |lambda^k Z^k(probe)/k!|
  int probe_vertex = -1;
};

/// Partial sums of sum lambda^k Z^k / k!; converges to the exponential for
/// |lambda| < 2/delta, diverges termwise beyond.
SeriesReport exp_series(const CriticalMap& m, cplx lambda, int kmax);

/// Identity check for the change of base point zeta = a (Z - b):
/// Exp_zeta(:lambda:) = Exp_Z(:a lambda:) / Exp_Z(:a lambda: b).
/// Returns the rebased map and the pointwise residual.
struct RebaseCheck {
  CriticalMap rebased;
  double residual = 0;
};
RebaseCheck change_base_point(const CriticalMap& m, cplx a, int b, cplx lambda);

/// Rebased critical map zeta = a (Z - Z(b)) with origin b.
CriticalMap rebase(const CriticalMap& m, cplx a, int b);

// -- Young diagram machinery for the translated powers --------------------

/// Partition of an integer coded columnwise: distinct column heights k_j
/// with multiplicities l_j, k_1 > k_2 > ... .
struct YoungDiagram {
  std::vector<std::pair<int, int>> cols;  // (height, multiplicity)
  int degree() const;
  int parts() const;
};

/// All diagrams of a given degree (partitions of `degree`).
std::vector<YoungDiagram> young_diagrams(int degree);

/// Integer coefficient c(Y) = (-1)^{k+l} k!/prod (k_j!)^{l_j} l!/prod l_j!.
long long young_coefficient(const YoungDiagram& y);

/// B^k(b) by the binomial recursion; powers_at_b holds Z^j(b) for j <= k.
cplx translation_bk_recursive(const std::vector<cplx>& powers_at_b, int k);

/// B^k(b) as sum over Young diagrams of c(Y) Y(b).
cplx translation_bk_young(const std::vector<cplx>& powers_at_b, int k);

/// zeta^k = a^k sum_j binom(k,j) (-1)^j Z^{k-j} B^j(b), the powers of the
/// translated map zeta = a (Z - b), expanded in the original powers.
Cochain translated_power(const CriticalMap& m, cplx a, int b, int k);

/// Winding number of the image polygon f(loop) around 0; throws
/// passes_through_origin when a segment hits 0.
int winding_number(const std::vector<cplx>& poly);

/// Ramification number b_f(gamma) of a function along a diamond cycle.
long long ramification_number(const DoubleComplex& dc, const Cochain& f,
                              const Chain& gamma);

}  // namespace drs
