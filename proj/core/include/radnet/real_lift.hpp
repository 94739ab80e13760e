#pragma once

#include <array>

#include "radnet/linalg.hpp"
#include "radnet/signal_model.hpp"

namespace radnet {

/// Real-valued code [Re(c); Im(c)], length 2M, unit norm.
struct LiftedCode {
  Vector entries;

  int size() const { return entries.size(); }
  double norm() const { return entries.norm(); }
};

LiftedCode lift(const SlowTimeCode& code);
SlowTimeCode unlift(const LiftedCode& lifted);

/// Real block forms of the code kernels:
///   m0t, m2t = [[Re, -Im], [Im, Re]] of m0, m2   (symmetric)
///   m1t      = [[Re, -Im], [Im, Re]] of m1
///   m1h      = [[Im,  Re], [-Re, Im]] of m1
/// so that ct' m0t ct = c^H m0 c, ct' m1t ct = Re(c^H m1 c),
/// ct' m1h ct = Im(c^H m1 c).
struct LiftedMatrices {
  SymmetricMatrix m0t;
  SymmetricMatrix m2t;
  Matrix m1t;
  Matrix m1h;
};

LiftedMatrices lift_matrices(const CodeMatrices& cm);

/// x^T A x for a general (not necessarily symmetric) square A.
double quad_form_general(const Matrix& a, const Vector& x);

/// phit(ct) = (ct' m0t ct)(ct' m2t ct) - (ct' m1t ct)^2 - (ct' m1h ct)^2.
double phi_tilde(const LiftedCode& ct, const LiftedMatrices& lm);

/// Detection probability of the lifted code together with its analytic
/// gradient and Hessian, built from the Marcum-Q order recurrences
///   dQ_v(sqrt(2x), b)/dx = Q_{v+1} - Q_v.
struct PdExpansion {
  double value = 0.0;
  Vector gradient;
  SymmetricMatrix hessian;
};

PdExpansion pd_value_gradient_hessian(const LiftedCode& ct, const LiftedMatrices& lm,
                                      double eps_alpha, double b0);

void phi_gradient_hessian(const LiftedCode& ct, const LiftedMatrices& lm, Vector& gradient,
                          SymmetricMatrix& hessian);

/// Everything needed to evaluate the exact Pd-normalized covariance diagonal
/// S_l(ct) = R_l(ct) / Pd(ct) of one node, and to expand it.
struct LiftedNodeModel {
  LiftedMatrices lm;
  double eps_alpha = 0.0;
  double eps_tau = 0.0;
  double eps_f = 0.0;
  double eps_theta = 0.0;
  double b0 = 0.0;
  double wavelength_m = 0.0;
};

LiftedNodeModel lift_node(const CodeMatrices& cm, double b0, double wavelength_m);

double pd_lifted(const LiftedNodeModel& node, const LiftedCode& ct);
double sinr_lifted(const LiftedNodeModel& node, const LiftedCode& ct);

/// Exact S_l(ct), l = 1..3. Throws DegeneracyError when phit collapses.
std::array<double, 3> exact_s(const LiftedNodeModel& node, const LiftedCode& ct);

/// Per-diagonal quadratic models s_hat_l(ct) = ct' A_l ct + a_l' ct + a_l0,
/// expanded about the reference code, plus the positivity floor used by the
/// design problem's indicator.
struct TaylorModel {
  std::array<SymmetricMatrix, 3> quad;
  std::array<Vector, 3> lin;
  std::array<double, 3> constant;
  double floor = 1e-8;
};

/// Second-order expansion of S_l about ct0. The expansion point stays fixed
/// at the reference code for the whole frame; it is never re-centered at
/// iterates. Throws ExpansionPointError when Pd(ct0) or phit(ct0) is not
/// strictly positive.
TaylorModel build_taylor_model(const LiftedNodeModel& node, const LiftedCode& ct0,
                               double floor = 1e-8);

std::array<double, 3> evaluate_s_hat(const TaylorModel& tm, const LiftedCode& ct);

}  // namespace radnet
