#include "drs/harmonic.hpp"

#include <cmath>
#include <queue>
#include <random>

namespace drs {

namespace {
constexpr cplx kI{0.0, 1.0};
}

HarmonicSolver::HarmonicSolver(const DoubleComplex& dc) : dc_(&dc) {
  if (!dc.closed())
    throw error(errc::not_closed_surface, "harmonic solver needs a closed surface");
  // kernel: one constant mode per connected component of each graph
  const int nv = dc.vertex_count();
  std::vector<int> comp(nv, -1);
  int nc = 0;
  for (int s = 0; s < nv; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = nc;
    std::queue<int> bfs;
    bfs.push(s);
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop();
      for (const Corner& c : dc.vertex_fan(u)) {
        int le = (c.pos % 2 == 0) ? 2 * c.quad : 2 * c.quad + 1;
        for (int w : {dc.lambda_tail(le), dc.lambda_head(le)}) {
          if (comp[w] < 0) {
            comp[w] = nc;
            bfs.push(w);
          }
        }
      }
    }
    ++nc;
  }
  kernel_modes_.assign(nc, {});
  for (int v = 0; v < nv; ++v) kernel_modes_[comp[v]].push_back(v);
}

void HarmonicSolver::project_kernel(Eigen::VectorXcd& v) const {
  for (const auto& mode : kernel_modes_) {
    cplx mean = 0;
    for (int x : mode) mean += v[x];
    mean /= static_cast<double>(mode.size());
    for (int x : mode) v[x] -= mean;
  }
}

Eigen::VectorXcd HarmonicSolver::apply(const Eigen::VectorXcd& u) const {
  const DoubleComplex& dc = *dc_;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(u.size());
  for (int q = 0; q < dc.quad_count(); ++q) {
    for (int le : {2 * q, 2 * q + 1}) {
      int a = dc.lambda_tail(le), b = dc.lambda_head(le);
      cplx d = dc.rho_lambda(le) * (u[a] - u[b]);
      out[a] += d;
      out[b] -= d;
    }
  }
  return out;
}

Eigen::VectorXcd HarmonicSolver::solve(const Eigen::VectorXcd& b, double rel_tol) const {
  Eigen::VectorXcd rhs = b;
  project_kernel(rhs);
  double bnorm = rhs.norm();
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(rhs.size());
  if (bnorm == 0.0) return x;
  Eigen::VectorXcd r = rhs, p = rhs;
  double rr = r.squaredNorm();
  const long maxit = 10 * rhs.size() + 50;
  for (long it = 0; it < maxit; ++it) {
    if (std::sqrt(rr) <= rel_tol * bnorm) {
      project_kernel(x);
      return x;
    }
    Eigen::VectorXcd ap = apply(p);
    cplx pap = p.dot(ap);
    if (std::abs(pap) == 0.0) break;
    cplx alpha = rr / pap;
    x += alpha * p;
    r -= alpha * ap;
    if ((it + 1) % 50 == 0) project_kernel(r);
    double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  if (std::sqrt(rr) <= rel_tol * bnorm * 10) {
    project_kernel(x);
    return x;
  }
  throw error(errc::solver_fail, "conjugate gradient did not reach tolerance");
}

Cochain HarmonicSolver::project(const Cochain& omega) const {
  const DoubleComplex& dc = *dc_;
  if (omega.carrier != Carrier::lambda || omega.grade != 1)
    throw error(errc::bad_input, "projection expects a Lambda 1-form");
  // solve L u = -d*omega (as a 0-form through the face/vertex duality)
  Cochain dstar = coboundary(dc, hodge_star(dc, omega));
  Eigen::VectorXcd rhs(dc.vertex_count());
  for (int v = 0; v < dc.vertex_count(); ++v) rhs[v] = -dstar.val[v];
  Eigen::VectorXcd u = solve(rhs);
  Cochain uform(dc, Carrier::lambda, 0);
  for (int v = 0; v < dc.vertex_count(); ++v) uform.val[v] = u[v];
  return omega - coboundary(dc, uform);
}

Cochain HarmonicSolver::eta_form(const Chain& cycle) const {
  const DoubleComplex& dc = *dc_;
  if (cycle.carrier != Carrier::lambda || cycle.grade != 1)
    throw error(errc::bad_input, "eta form expects a Lambda cycle");
  Cochain theta(dc, Carrier::lambda, 1);
  for (auto& [le, k] : cycle.coef) {
    int q = le >> 1;
    if ((le & 1) == 0)
      theta.val[2 * q + 1] -= static_cast<double>(k);
    else
      theta.val[2 * q] += static_cast<double>(k);
  }
  return project(theta);
}

std::vector<Cochain> alpha_basis(const HarmonicSolver& hs, const CanonicalDissection& d) {
  const int g2 = 2 * d.g;
  std::vector<Cochain> alpha(2 * g2);
  for (int k = 0; k < g2; ++k) {
    alpha[k] = hs.eta_form(d.aleph_lambda[k + g2]);
    alpha[k + g2] = hs.eta_form(d.aleph_lambda[k]) * cplx(-1.0);
  }
  return alpha;
}

Eigen::MatrixXd gram_matrix(const DoubleComplex& dc, const std::vector<Cochain>& alpha) {
  const int n = static_cast<int>(alpha.size());
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      G(i, j) = scalar_product(dc, alpha[i], alpha[j]).real();
  return G;
}

Eigen::MatrixXd star_matrix(const Eigen::MatrixXd& gram) {
  const int n2 = static_cast<int>(gram.rows()) / 2;
  Eigen::MatrixXd S(2 * n2, 2 * n2);
  S.topLeftCorner(n2, n2) = -gram.topRightCorner(n2, n2);
  S.topRightCorner(n2, n2) = gram.topLeftCorner(n2, n2);
  S.bottomLeftCorner(n2, n2) = -gram.bottomRightCorner(n2, n2);
  S.bottomRightCorner(n2, n2) = gram.bottomLeftCorner(n2, n2);
  return S;
}

std::vector<Cochain> holomorphic_basis(const DoubleComplex& dc,
                                       const std::vector<Cochain>& alpha,
                                       const Eigen::MatrixXd& gram) {
  const int g2 = static_cast<int>(alpha.size()) / 2;
  Eigen::MatrixXd C = gram.bottomRightCorner(g2, g2);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(C);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw error(errc::singular_c, "C block is not positive definite");
  Eigen::MatrixXd Cinv = ldlt.solve(Eigen::MatrixXd::Identity(g2, g2));
  std::vector<Cochain> zeta(g2);
  for (int k = 0; k < g2; ++k) {
    Cochain u(dc, Carrier::lambda, 1);
    for (int l = 0; l < g2; ++l) u += alpha[g2 + l] * cplx(Cinv(k, l));
    zeta[k] = u * kI - hodge_star(dc, u);
  }
  return zeta;
}

PeriodData compute_periods(const DoubleComplex& dc, const CanonicalDissection& d) {
  HarmonicSolver hs(dc);
  PeriodData pd;
  pd.g = d.g;
  pd.dissection = d;
  const int g = d.g, g2 = 2 * g, g4 = 4 * g;
  pd.alpha = alpha_basis(hs, d);
  // duality residual: oint_{aleph_k} alpha_l = delta
  for (int k = 0; k < g4; ++k)
    for (int l = 0; l < g4; ++l) {
      cplx v = pair(pd.alpha[l], d.aleph_lambda[k]);
      pd.duality_residual =
          std::max(pd.duality_residual, std::abs(v - (k == l ? 1.0 : 0.0)));
    }
  pd.gram = gram_matrix(dc, pd.alpha);
  pd.gram_symmetry = (pd.gram - pd.gram.transpose()).cwiseAbs().maxCoeff();
  pd.zeta = holomorphic_basis(dc, pd.alpha, pd.gram);
  for (const Cochain& z : pd.zeta)
    pd.holomorphy_residual =
        std::max(pd.holomorphy_residual, is_holomorphic_form(dc, z, 0).residual);
  // Pi = C^-1 (i I - B)
  Eigen::MatrixXd B = pd.gram.bottomLeftCorner(g2, g2);
  Eigen::MatrixXd C = pd.gram.bottomRightCorner(g2, g2);
  Eigen::MatrixXcd M = kI * Eigen::MatrixXcd::Identity(g2, g2) - B.cast<cplx>();
  pd.pi = C.cast<cplx>().ldlt().solve(M);
  // direct periods over the second half of the dissection
  for (int k = 0; k < g2; ++k)
    for (int l = 0; l < g2; ++l) {
      cplx direct = pair(pd.zeta[l], d.aleph_lambda[k + g2]);
      pd.period_residual = std::max(pd.period_residual, std::abs(direct - pd.pi(k, l)));
    }
  pd.pi_gamma = pd.pi.topLeftCorner(g, g) + pd.pi.topRightCorner(g, g);
  pd.pi_gamma_star = pd.pi.bottomLeftCorner(g, g) + pd.pi.bottomRightCorner(g, g);
  pd.pi_diamond = 0.5 * (pd.pi_gamma + pd.pi_gamma_star);
  for (const Cochain& a : pd.alpha) {
    pd.harmonicity_residual =
        std::max(pd.harmonicity_residual, coboundary(dc, a).max_abs());
    pd.harmonicity_residual = std::max(
        pd.harmonicity_residual, coboundary(dc, hodge_star(dc, a)).max_abs());
  }
  std::mt19937 rng(0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Cochain t1(dc, Carrier::lambda, 1), t2(dc, Carrier::lambda, 1);
    for (const Cochain& a : pd.alpha) {
      t1 += a * cplx(u(rng), u(rng));
      t2 += a * cplx(u(rng), u(rng));
    }
    pd.bilinear_residual = std::max(pd.bilinear_residual, check_bilinear(dc, d, t1, t2));
  }
  return pd;
}

PeriodData compute_periods(const DoubleComplex& dc) {
  return compute_periods(dc, canonical_dissection(dc));
}

namespace {

void require_closed_form(const DoubleComplex& dc, const Cochain& t) {
  double scale = std::max(1.0, t.max_abs());
  if (t.carrier == Carrier::diamond) {
    for (int q = 0; q < dc.quad_count(); ++q)
      if (std::abs(pair(t, cell_boundary(dc, Carrier::diamond, 2, q))) > 1e-9 * scale)
        throw error(errc::not_closed, "form is not closed");
  } else {
    for (int v = 0; v < dc.vertex_count(); ++v)
      if (dc.vertex_interior(v) &&
          std::abs(pair(t, cell_boundary(dc, Carrier::lambda, 2, v))) > 1e-9 * scale)
        throw error(errc::not_closed, "form is not closed");
  }
}

}  // namespace

double check_bilinear(const DoubleComplex& dc, const CanonicalDissection& d,
                      const Cochain& theta, const Cochain& theta_prime) {
  if (theta.carrier != theta_prime.carrier || theta.grade != 1 || theta_prime.grade != 1)
    throw error(errc::bad_input, "bilinear check expects two 1-forms on one carrier");
  require_closed_form(dc, theta);
  require_closed_form(dc, theta_prime);
  cplx lhs, rhs = 0;
  if (theta.carrier == Carrier::diamond) {
    lhs = integrate(dc, wedge_diamond(dc, theta, theta_prime));
    for (int j = 0; j < d.g; ++j) {
      rhs += pair(theta, d.aleph[j]) * pair(theta_prime, d.aleph[j + d.g]);
      rhs -= pair(theta, d.aleph[j + d.g]) * pair(theta_prime, d.aleph[j]);
    }
  } else {
    lhs = integrate(dc, wedge_hetero(dc, theta, theta_prime));
    const int g2 = 2 * d.g;
    for (int j = 0; j < g2; ++j) {
      rhs += pair(theta, d.aleph_lambda[j]) * pair(theta_prime, d.aleph_lambda[j + g2]);
      rhs -= pair(theta, d.aleph_lambda[j + g2]) * pair(theta_prime, d.aleph_lambda[j]);
    }
  }
  return std::abs(lhs - rhs);
}

cplx harmonic_norm_via_periods(const DoubleComplex& dc, const CanonicalDissection& d,
                               const Cochain& theta) {
  Cochain sc = hodge_star(dc, theta);
  for (auto& v : sc.val) v = std::conj(v);
  cplx s = 0;
  const int g2 = 2 * d.g;
  for (int j = 0; j < g2; ++j) {
    s += pair(theta, d.aleph_lambda[j]) * pair(sc, d.aleph_lambda[j + g2]);
    s -= pair(theta, d.aleph_lambda[j + g2]) * pair(sc, d.aleph_lambda[j]);
  }
  return s;
}

std::optional<DiamondZeta> zeta_diamond(const HarmonicSolver& hs, const PeriodData& pd,
                                        double block_tol) {
  const DoubleComplex& dc = hs.complex();
  const int g = pd.g, g2 = 2 * g;
  Eigen::MatrixXd C = pd.gram.bottomRightCorner(g2, g2);
  Eigen::MatrixXd Cg_star = C.topLeftCorner(g, g), Cg = C.bottomRightCorner(g, g);
  if ((Cg - Cg_star).cwiseAbs().maxCoeff() > block_tol) return std::nullopt;
  Eigen::MatrixXd Cd = Cg + Cg_star;
  Eigen::MatrixXd Cdinv = Cd.ldlt().solve(Eigen::MatrixXd::Identity(g, g));
  DiamondZeta out;
  out.zeta_diamond.resize(g);
  std::vector<Cochain> alpha_d(g), beta_d(g);
  try {
    for (int l = 0; l < g; ++l) {
      Cochain xa = pd.alpha[l + g2] + pd.alpha[l + g2 + g];
      alpha_d[l] = lift_to_diamond(dc, xa, 0, 1e-7);
      beta_d[l] = lift_to_diamond(dc, hodge_star(dc, xa), 0, 1e-7);
    }
  } catch (const error& e) {
    if (e.code == errc::holonomy_mismatch) return std::nullopt;
    throw;
  }
  for (int k = 0; k < g; ++k) {
    Cochain z(dc, Carrier::diamond, 1);
    for (int l = 0; l < g; ++l)
      z += alpha_d[l] * (kI * Cdinv(k, l)) - beta_d[l] * cplx(Cdinv(k, l));
    out.zeta_diamond[k] = z;
    Cochain target = (pd.zeta[k] + pd.zeta[k + g]) * cplx(0.5);
    Cochain img = average(dc, z);
    out.average_residual = std::max(out.average_residual, (img - target).max_abs());
  }
  return out;
}

}  // namespace drs
