#include "radnet/real_lift.hpp"

#include <cmath>
#include <stdexcept>

#include "radnet/marcum.hpp"

namespace radnet {

namespace {

/// Accept a dense matrix that is symmetric up to rounding: symmetrize when the
/// asymmetry is below 1e-12 of the magnitude scale, reject beyond 1e-8.
SymmetricMatrix symmetrize_checked(const Matrix& a, const char* what) {
  const int n = a.rows();
  const double scale = std::max(a.max_abs(), 1e-300);
  double asym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
  if (asym > 1e-8 * scale)
    throw std::runtime_error(std::string(what) + ": asymmetry " + std::to_string(asym / scale) +
                             " exceeds 1e-8 of scale");
  return SymmetricMatrix::from_dense_symmetrized(a);
}

struct QuadraticModel {
  SymmetricMatrix quad;
  Vector lin;
  double constant;
};

/// Re-collect a Taylor expansion f0 + g'(x - x0) + (x - x0)' G (x - x0) / 2
/// into the monomial form x' A x + a' x + a0.
QuadraticModel collect_quadratic(double f0, const Vector& grad, const SymmetricMatrix& hess,
                                 const Vector& x0) {
  QuadraticModel out;
  out.quad = hess;
  out.quad *= 0.5;
  const Vector hx0 = hess.matvec(x0);
  out.lin = grad - hx0;
  out.constant = f0 - grad.dot(x0) + 0.5 * x0.dot(hx0);
  return out;
}

}  // namespace

LiftedCode lift(const SlowTimeCode& code) {
  const int m = code.length();
  LiftedCode out{Vector(2 * m)};
  for (int i = 0; i < m; ++i) {
    out.entries[i] = code.entries[i].real();
    out.entries[m + i] = code.entries[i].imag();
  }
  return out;
}

SlowTimeCode unlift(const LiftedCode& lifted) {
  const int n = lifted.size();
  if (n % 2 != 0) throw std::invalid_argument("unlift: odd length");
  const int m = n / 2;
  SlowTimeCode out{ComplexVector(m)};
  for (int i = 0; i < m; ++i) out.entries[i] = cplx(lifted.entries[i], lifted.entries[m + i]);
  return out;
}

LiftedMatrices lift_matrices(const CodeMatrices& cm) {
  const int m = cm.m0.rows();
  const int n = 2 * m;
  LiftedMatrices out;
  out.m0t = SymmetricMatrix(n);
  out.m2t = SymmetricMatrix(n);
  out.m1t = Matrix(n, n);
  out.m1h = Matrix(n, n);

  auto fill_sym = [m](SymmetricMatrix& dst, const ComplexMatrix& src) {
    const int n2 = 2 * m;
    for (int i = 0; i < n2; ++i) {
      for (int j = 0; j <= i; ++j) {
        double v;
        if (i < m && j < m)
          v = src(i, j).real();
        else if (i >= m && j >= m)
          v = src(i - m, j - m).real();
        else  // i >= m, j < m in the lower triangle
          v = src(i - m, j).imag();
        dst.set(i, j, v);
      }
    }
  };
  fill_sym(out.m0t, cm.m0);
  fill_sym(out.m2t, cm.m2);

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const cplx v = cm.m1(i, j);
      out.m1t(i, j) = v.real();
      out.m1t(i, m + j) = -v.imag();
      out.m1t(m + i, j) = v.imag();
      out.m1t(m + i, m + j) = v.real();

      out.m1h(i, j) = v.imag();
      out.m1h(i, m + j) = v.real();
      out.m1h(m + i, j) = -v.real();
      out.m1h(m + i, m + j) = v.imag();
    }
  }
  return out;
}

double quad_form_general(const Matrix& a, const Vector& x) { return x.dot(a.matvec(x)); }

double phi_tilde(const LiftedCode& ct, const LiftedMatrices& lm) {
  const double w0 = lm.m0t.quad_form(ct.entries);
  const double w2 = lm.m2t.quad_form(ct.entries);
  const double w1 = quad_form_general(lm.m1t, ct.entries);
  const double w1h = quad_form_general(lm.m1h, ct.entries);
  return w0 * w2 - w1 * w1 - w1h * w1h;
}

PdExpansion pd_value_gradient_hessian(const LiftedCode& ct, const LiftedMatrices& lm,
                                      double eps_alpha, double b0) {
  const double w = lm.m0t.quad_form(ct.entries);
  const double arg = std::sqrt(std::max(0.0, 2.0 * eps_alpha * w));
  const double thr = std::sqrt(2.0 * b0);
  // First and second Marcum-Q order differences, evaluated directly: forming
  // Q2 - Q1 from the Q values themselves loses all precision once Pd
  // saturates, while the design problems live exactly in that regime.
  const double dq1 = marcum_q_increment(1, arg, thr);         // Q2 - Q1
  const double ddq = marcum_q_second_difference(1, arg, thr);  // Q3 - 2 Q2 + Q1

  PdExpansion out;
  out.value = marcum_q(1, arg, thr);
  const Vector m = lm.m0t.matvec(ct.entries);
  out.gradient = (2.0 * eps_alpha * dq1) * m;
  out.hessian = lm.m0t;
  out.hessian *= 2.0 * eps_alpha * dq1;
  out.hessian.add_outer(m, 4.0 * eps_alpha * eps_alpha * ddq);
  return out;
}

void phi_gradient_hessian(const LiftedCode& ct, const LiftedMatrices& lm, Vector& gradient,
                          SymmetricMatrix& hessian) {
  const Vector& x = ct.entries;
  const double w0 = lm.m0t.quad_form(x);
  const double w2 = lm.m2t.quad_form(x);
  const double w1 = quad_form_general(lm.m1t, x);
  const double w1h = quad_form_general(lm.m1h, x);

  const Vector v0 = lm.m0t.matvec(x);
  const Vector v2 = lm.m2t.matvec(x);
  const Vector s1 = lm.m1t.matvec(x) + lm.m1t.transpose_matvec(x);
  const Vector s1h = lm.m1h.matvec(x) + lm.m1h.transpose_matvec(x);

  gradient = 2.0 * w2 * v0 + 2.0 * w0 * v2 - 2.0 * w1 * s1 - 2.0 * w1h * s1h;

  hessian = lm.m0t;
  hessian *= 2.0 * w2;
  SymmetricMatrix term = lm.m2t;
  term *= 2.0 * w0;
  hessian += term;
  hessian.add_symmetric_outer(v0, v2, 4.0);

  const int n = x.size();
  SymmetricMatrix m1sym(n), m1hsym(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      m1sym.set(i, j, lm.m1t(i, j) + lm.m1t(j, i));
      m1hsym.set(i, j, lm.m1h(i, j) + lm.m1h(j, i));
    }
  m1sym *= -2.0 * w1;
  m1hsym *= -2.0 * w1h;
  hessian += m1sym;
  hessian += m1hsym;
  hessian.add_outer(s1, -2.0);
  hessian.add_outer(s1h, -2.0);
}

LiftedNodeModel lift_node(const CodeMatrices& cm, double b0, double wavelength_m) {
  return LiftedNodeModel{lift_matrices(cm), cm.eps_alpha, cm.eps_tau, cm.eps_f,
                         cm.eps_theta,      b0,           wavelength_m};
}

double pd_lifted(const LiftedNodeModel& node, const LiftedCode& ct) {
  const double w = node.lm.m0t.quad_form(ct.entries);
  return marcum_q(1, std::sqrt(std::max(0.0, 2.0 * node.eps_alpha * w)),
                  std::sqrt(2.0 * node.b0));
}

double sinr_lifted(const LiftedNodeModel& node, const LiftedCode& ct) {
  return node.eps_alpha * node.lm.m0t.quad_form(ct.entries);
}

std::array<double, 3> exact_s(const LiftedNodeModel& node, const LiftedCode& ct) {
  const double w0 = node.lm.m0t.quad_form(ct.entries);
  const double w2 = node.lm.m2t.quad_form(ct.entries);
  const double phit = phi_tilde(ct, node.lm);
  if (phit <= 1e-14 * w0 * w2)
    throw DegeneracyError("exact_s: phi collapsed, Doppler covariance undefined");
  const double pd = pd_lifted(node, ct);
  const double c2 = kSpeedOfLight * kSpeedOfLight;
  const double lam2 = node.wavelength_m * node.wavelength_m;
  return {c2 / (4.0 * node.eps_tau) / (pd * w0), lam2 / (4.0 * node.eps_f) * w0 / (pd * phit),
          1.0 / (node.eps_theta * pd * w0)};
}

TaylorModel build_taylor_model(const LiftedNodeModel& node, const LiftedCode& ct0, double floor) {
  const int n = ct0.size();
  const Vector& x0 = ct0.entries;

  const double w0 = node.lm.m0t.quad_form(x0);
  const PdExpansion pd = pd_value_gradient_hessian(ct0, node.lm, node.eps_alpha, node.b0);
  if (!(pd.value > 0.0))
    throw ExpansionPointError("build_taylor_model: Pd(ct0) must be strictly positive");
  const double phit0 = phi_tilde(ct0, node.lm);
  if (!(phit0 > 0.0))
    throw ExpansionPointError("build_taylor_model: phi(ct0) must be strictly positive");

  const Vector m = node.lm.m0t.matvec(x0);
  const double u = pd.value * w0;

  // grad(1/u) and its Hessian, u(ct) = Pd(ct) ct' m0t ct.
  Vector grad_u = w0 * pd.gradient + (2.0 * pd.value) * m;
  const Vector grad_inv_u = (-1.0 / (u * u)) * grad_u;

  Matrix hess_u(n, n);
  {
    const Matrix ph = pd.hessian.to_dense();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        hess_u(i, j) = w0 * ph(i, j) + 2.0 * (pd.gradient[i] * m[j] + m[i] * pd.gradient[j]) +
                       2.0 * pd.value * node.lm.m0t(i, j);
  }
  Matrix gamma1(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gamma1(i, j) = -hess_u(i, j) / (u * u) + 2.0 * grad_u[i] * grad_u[j] / (u * u * u);
  const SymmetricMatrix gamma1_sym = symmetrize_checked(gamma1, "Gamma1");

  // Doppler term v(ct) = (ct' m0t ct) / (Pd(ct) phit(ct)).
  Vector phi_grad;
  SymmetricMatrix phi_hess;
  phi_gradient_hessian(ct0, node.lm, phi_grad, phi_hess);

  const Vector q = phit0 * pd.gradient + pd.value * phi_grad;
  Matrix big_q(n, n);
  {
    const Matrix ph = pd.hessian.to_dense();
    const Matrix fh = phi_hess.to_dense();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        big_q(i, j) = phit0 * ph(i, j) + pd.gradient[i] * phi_grad[j] +
                      phi_grad[i] * pd.gradient[j] + pd.value * fh(i, j);
  }
  const double den = pd.value * phit0;
  const Vector grad_v = (2.0 / den) * m - (w0 / (den * den)) * q;
  Matrix gamma2(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gamma2(i, j) = 2.0 * node.lm.m0t(i, j) / den -
                     (2.0 * (m[i] * q[j] + q[i] * m[j]) + w0 * big_q(i, j)) / (den * den) +
                     2.0 * w0 * q[i] * q[j] / (den * den * den);
  const SymmetricMatrix gamma2_sym = symmetrize_checked(gamma2, "Gamma2");

  const double c2 = kSpeedOfLight * kSpeedOfLight;
  const double lam2 = node.wavelength_m * node.wavelength_m;
  const double scale1 = c2 / (4.0 * node.eps_tau);
  const double scale2 = lam2 / (4.0 * node.eps_f);
  const double scale3 = 1.0 / node.eps_theta;

  TaylorModel tm;
  tm.floor = floor;
  auto assemble = [&](int l, double scale, double f0_unscaled, const Vector& grad_unscaled,
                      const SymmetricMatrix& hess_unscaled) {
    SymmetricMatrix hs = hess_unscaled;
    hs *= scale;
    const QuadraticModel qm = collect_quadratic(scale * f0_unscaled, scale * grad_unscaled, hs, x0);
    tm.quad[l] = qm.quad;
    tm.lin[l] = qm.lin;
    tm.constant[l] = qm.constant;
  };
  assemble(0, scale1, 1.0 / u, grad_inv_u, gamma1_sym);
  assemble(1, scale2, w0 / den, grad_v, gamma2_sym);
  assemble(2, scale3, 1.0 / u, grad_inv_u, gamma1_sym);
  return tm;
}

std::array<double, 3> evaluate_s_hat(const TaylorModel& tm, const LiftedCode& ct) {
  std::array<double, 3> out;
  for (int l = 0; l < 3; ++l)
    out[l] = tm.quad[l].quad_form(ct.entries) + tm.lin[l].dot(ct.entries) + tm.constant[l];
  return out;
}

}  // namespace radnet
