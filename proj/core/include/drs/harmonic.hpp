#pragma once

#include <Eigen/Dense>
#include <optional>

#include "drs/calculus.hpp"
#include "drs/homology.hpp"

namespace drs {

/// Conjugate-gradient solver for the vertex Laplacian L u = b with the
/// locally-constant kernel (constants per graph component) projected out.
class HarmonicSolver {
 public:
  explicit HarmonicSolver(const DoubleComplex& dc);

  /// Solves L u = b. b must be orthogonal to the kernel (it is projected
  /// anyway). Throws solver_fail when the residual stalls above tolerance.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& b, double rel_tol = 1e-11) const;

  /// Hodge projection: the harmonic representative of a closed 1-form,
  /// h = omega - du with the same holonomies.
  Cochain project(const Cochain& omega) const;

  /// Harmonic 1-form eta_C dual to a Lambda cycle: the crossing cocycle of C
  /// projected onto harmonic forms. Satisfies oint_C theta = iint eta_C ^ theta
  /// for closed theta.
  Cochain eta_form(const Chain& cycle) const;

  const DoubleComplex& complex() const { return *dc_; }

 private:
  void project_kernel(Eigen::VectorXcd& v) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;

  const DoubleComplex* dc_;
  std::vector<std::vector<int>> kernel_modes_;  // vertex lists per component/graph
};

struct PeriodData {
  int g = 0;
  CanonicalDissection dissection;
  std::vector<Cochain> alpha;  // 4g real harmonic 1-forms on Lambda
  std::vector<Cochain> zeta;   // 2g holomorphic 1-forms
  Eigen::MatrixXd gram;        // 4g x 4g, blocks [[A, D], [B, C]]
  Eigen::MatrixXcd pi;         // 2g x 2g
  Eigen::MatrixXcd pi_gamma, pi_gamma_star, pi_diamond;  // g x g
  // residual ledger
  double duality_residual = 0;      // max |oint_k alpha_l - delta|
  double holomorphy_residual = 0;   // max zeta CR/type residual
  double period_residual = 0;       // |Pi - direct periods|
  double gram_symmetry = 0;
  double harmonicity_residual = 0;  // max |d alpha|, |d* alpha| (solver quality)
  double bilinear_residual = 0;     // seeded random closed pairs

  Eigen::MatrixXd block_a() const { return gram.topLeftCorner(2 * g, 2 * g); }
  Eigen::MatrixXd block_d() const { return gram.topRightCorner(2 * g, 2 * g); }
  Eigen::MatrixXd block_b() const { return gram.bottomLeftCorner(2 * g, 2 * g); }
  Eigen::MatrixXd block_c() const { return gram.bottomRightCorner(2 * g, 2 * g); }
};

/// Dual basis of real harmonic forms: alpha_k = eta(aleph_{k+2g}),
/// alpha_{k+2g} = -eta(aleph_k), 1 <= k <= 2g.
std::vector<Cochain> alpha_basis(const HarmonicSolver& hs, const CanonicalDissection& d);

/// Gram matrix (alpha_k, alpha_l) of the basis.
Eigen::MatrixXd gram_matrix(const DoubleComplex& dc, const std::vector<Cochain>& alpha);

/// Matrix of the Hodge star in the alpha basis: [[-D, A], [-C, B]].
Eigen::MatrixXd star_matrix(const Eigen::MatrixXd& gram);

/// Holomorphic basis zeta_k = (i - *) sum_l C^-1_{kl} alpha_{l+2g}.
std::vector<Cochain> holomorphic_basis(const DoubleComplex& dc,
                                       const std::vector<Cochain>& alpha,
                                       const Eigen::MatrixXd& gram);

/// Full pipeline: alpha basis, Gram, zeta, Pi = C^-1 (i - B) and the graph /
/// dual / diamond period matrices.
PeriodData compute_periods(const DoubleComplex& dc, const CanonicalDissection& d);
PeriodData compute_periods(const DoubleComplex& dc);

/// |LHS - RHS| of the bilinear identity for two closed forms on the given
/// carrier (diamond: g terms over aleph; Lambda: 2g terms over aleph_Lambda).
double check_bilinear(const DoubleComplex& dc, const CanonicalDissection& d,
                      const Cochain& theta, const Cochain& theta_prime);

/// Norm identity for harmonic theta: returns the bilinear periods expression
/// sum_j (oint_j theta oint_{j+2g} *conj(theta) - oint_{j+2g} theta oint_j *conj(theta)).
cplx harmonic_norm_via_periods(const DoubleComplex& dc, const CanonicalDissection& d,
                               const Cochain& theta);

/// Diamond holomorphic forms zeta^D when the graph and dual Gram blocks agree
/// (|C_G - C_G*| below tol): returns them together with the check residual
/// max_k |A(zeta^D_k) - (zeta_k + zeta_{k+g})/2|. Their periods over the
/// diamond dissection are I/2 on the a-cycles and Pi^D/2 on the b-cycles.
struct DiamondZeta {
  std::vector<Cochain> zeta_diamond;  // g forms on the diamond
  double average_residual = 0;
};
std::optional<DiamondZeta> zeta_diamond(const HarmonicSolver& hs, const PeriodData& pd,
                                        double block_tol = 1e-6);

}  // namespace drs
