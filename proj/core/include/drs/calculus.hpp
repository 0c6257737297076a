#pragma once

#include "drs/complex.hpp"

namespace drs {

/// Hodge star on Lambda forms. *^2 = (-Id)^k. Grades 0 and 2 need a closed
/// surface (the dual faces must exist). Throws carrier_diamond on diamond
/// cochains.
Cochain hodge_star(const DoubleComplex& dc, const Cochain& f);

/// Laplacian -d*d* - *d*d on Lambda. On 0-forms this reduces to the weighted
/// graph Laplacian (Delta f)(x) = sum_rho (f(x) - f(x')), positive
/// semidefinite, vanishing on the biconstant. In disc mode the result is
/// meaningful at interior vertices only (set to 0 elsewhere).
Cochain laplacian(const DoubleComplex& dc, const Cochain& f);

struct HolomorphyReport {
  bool ok = false;
  double residual = 0.0;
};

/// Cauchy-Riemann residual of a function on the vertices:
/// max over quads of |f(y') - f(y) - i rho (f(x') - f(x))|.
HolomorphyReport is_holomorphic_function(const DoubleComplex& dc, const Cochain& f,
                                         double tol);

/// Holomorphy of a Lambda 1-form: closed and of type (1,0), i.e. d a = 0 and
/// *a = -i a. Residual is the max over both families of conditions.
HolomorphyReport is_holomorphic_form(const DoubleComplex& dc, const Cochain& a,
                                     double tol);

/// Wedge product on the diamond: (k,l) -> k+l, k+l <= 2.
Cochain wedge_diamond(const DoubleComplex& dc, const Cochain& a, const Cochain& b);

/// Heterogeneous wedge of two Lambda 1-forms; a diamond 2-form:
/// on (x,y,x',y'): a(xx') b(yy') - a(yy') b(xx').
Cochain wedge_hetero(const DoubleComplex& dc, const Cochain& a, const Cochain& b);

/// Total integral of a 2-form over all faces of its carrier.
cplx integrate(const DoubleComplex& dc, const Cochain& two_form);

/// Averaging map A: C(diamond) -> C(Lambda). Identity on functions,
/// 4-side mean on 1-forms, half the incident quads on 2-forms.
Cochain average(const DoubleComplex& dc, const Cochain& f);

/// Lift of a closed Lambda 1-form with homology-consistent holonomies to a
/// closed diamond 1-form nu with A(nu) = mu, unique up to d eps; gauge fixed
/// by nu(base_edge) = 0. Throws holonomy_mismatch if no lift exists.
Cochain lift_to_diamond(const DoubleComplex& dc, const Cochain& mu, int base_edge,
                        double tol = 1e-9);

/// Hermitian scalar product (a,b) = sum_e rho(e) a(e) conj(b(e)) over
/// unoriented Lambda edges.
cplx scalar_product(const DoubleComplex& dc, const Cochain& a, const Cochain& b);

/// Subtracts the multiple of d eps that makes the two diamond 1-forms agree
/// on reference edge 0; used to compare lifts modulo gauge.
Cochain gauge_align(const DoubleComplex& dc, const Cochain& nu, const Cochain& ref);

}  // namespace drs
