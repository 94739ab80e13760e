#include "radnet/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace radnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector matrix_row(const Matrix& m, int row) {
  Vector out(m.cols());
  for (int j = 0; j < m.cols(); ++j) out[j] = m(row, j);
  return out;
}

/// H^T Diag(s)^{-1} H as a state-space information block.
SymmetricMatrix measurement_block(const Matrix& h, const std::array<double, 3>& s) {
  SymmetricMatrix out(h.cols());
  for (int l = 0; l < 3; ++l) out.add_outer(matrix_row(h, l), 1.0 / s[l]);
  return out;
}

bool under_floor(const std::array<double, 3>& s, double floor) {
  return s[0] < floor || s[1] < floor || s[2] < floor;
}

/// Orthonormal basis (as columns collected in a vector) of span{vs}.
std::vector<Vector> orthonormal_basis(const std::vector<const Vector*>& vs, int dim) {
  std::vector<Vector> basis;
  for (const Vector* vp : vs) {
    Vector w = *vp;
    for (const Vector& b : basis) w -= w.dot(b) * b;
    const double nw = w.norm();
    if (nw > 1e-12 * std::max(1.0, vp->norm())) {
      w *= 1.0 / nw;
      basis.push_back(w);
    }
    if (static_cast<int>(basis.size()) >= dim) break;
  }
  return basis;
}

/// A unit vector orthogonal to every vector in vs, chosen as the coordinate
/// direction with the largest residual (deterministic). Empty when span is full.
Vector orthogonal_direction(const std::vector<const Vector*>& vs, int dim) {
  const std::vector<Vector> basis = orthonormal_basis(vs, dim);
  if (static_cast<int>(basis.size()) >= dim) return Vector();
  Vector best;
  double best_norm = 0.0;
  for (int i = 0; i < dim; ++i) {
    Vector e(dim);
    e[i] = 1.0;
    for (const Vector& b : basis) e -= e.dot(b) * b;
    const double ne = e.norm();
    if (ne > best_norm) {
      best_norm = ne;
      best = e;
    }
  }
  if (best_norm <= 1e-9) return Vector();
  best *= 1.0 / best_norm;
  return best;
}

}  // namespace

double approx_objective(const FrameProblem& fp, const std::vector<LiftedCode>& codes) {
  SymmetricMatrix j = fp.prior;
  for (size_t n = 0; n < fp.nodes.size(); ++n) {
    const auto s = evaluate_s_hat(fp.nodes[n].tm, codes[n]);
    if (under_floor(s, fp.nodes[n].tm.floor)) return kInf;
    j += measurement_block(fp.nodes[n].h, s);
  }
  return SpdSolver(j, "approximated information matrix").trace_inverse();
}

double exact_objective(const FrameProblem& fp, const std::vector<LiftedCode>& codes) {
  return SpdSolver(exact_information(fp, codes), "exact information matrix").trace_inverse();
}

SymmetricMatrix exact_information(const FrameProblem& fp, const std::vector<LiftedCode>& codes) {
  SymmetricMatrix j = fp.prior;
  for (size_t n = 0; n < fp.nodes.size(); ++n)
    j += measurement_block(fp.nodes[n].h, exact_s(fp.nodes[n].exact, codes[n]));
  return j;
}

double BlockRestriction::value(const LiftedCode& ct) const {
  const auto s = evaluate_s_hat(node.tm, ct);
  if (under_floor(s, node.tm.floor)) return kInf;
  SymmetricMatrix m = b;
  m += measurement_block(node.h, s);
  return SpdSolver(m, "block restriction").trace_inverse();
}

BlockRestriction block_restriction(const FrameProblem& fp, const std::vector<LiftedCode>& codes,
                                   int p) {
  BlockRestriction br{fp.prior, fp.nodes[p]};
  for (size_t n = 0; n < fp.nodes.size(); ++n) {
    if (static_cast<int>(n) == p) continue;
    const auto s = evaluate_s_hat(fp.nodes[n].tm, codes[n]);
    for (int l = 0; l < 3; ++l)
      if (s[l] < fp.nodes[n].tm.floor)
        throw DefinitenessError(l, s[l], "fixed-code covariance diagonal");
    br.b += measurement_block(fp.nodes[n].h, s);
  }
  SpdSolver check(br.b, "block restriction base");  // PD asserted
  return br;
}

std::array<double, 3> dhat_diagonal(const SymmetricMatrix& b, const Matrix& h,
                                    const std::array<double, 3>& s) {
  SymmetricMatrix m = b;
  m += measurement_block(h, s);
  const SymmetricMatrix kinv = SpdSolver(m, "surrogate base").inverse();
  const Matrix k = kinv.to_dense();
  const Matrix k2 = k * k;
  std::array<double, 3> dhat;
  for (int l = 0; l < 3; ++l) {
    const Vector row = matrix_row(h, l);
    dhat[l] = row.dot(k2.matvec(row)) / (s[l] * s[l]);
  }
  return dhat;
}

SurrogateData build_surrogate(const SymmetricMatrix& b, const Matrix& h, const TaylorModel& tm,
                              const LiftedCode& iterate) {
  const Vector& x = iterate.entries;
  const auto s = evaluate_s_hat(tm, iterate);

  SymmetricMatrix m = b;
  m += measurement_block(h, s);
  const double f_val = SpdSolver(m, "surrogate base").trace_inverse();
  const auto dhat = dhat_diagonal(b, h, s);

  SurrogateData out;
  out.quad = SymmetricMatrix(x.size());
  out.lin = Vector(x.size());
  out.constant = f_val;
  for (int l = 0; l < 3; ++l) {
    SymmetricMatrix term = tm.quad[l];
    term *= dhat[l];
    out.quad += term;
    out.lin += dhat[l] * tm.lin[l];
    out.constant += dhat[l] * (tm.constant[l] - s[l]);
  }

  const double lam_max = min_max_eigenvalues(out.quad).second;
  out.g = 2.0 * (out.quad.matvec(x) - lam_max * x) + out.lin;
  out.g0 = 2.0 * lam_max - out.quad.quad_form(x) + out.constant;

  for (int l = 0; l < 3; ++l) {
    const double lam_min = min_max_eigenvalues(tm.quad[l]).first;
    out.floor_normal[l] = 2.0 * (tm.quad[l].matvec(x) - lam_min * x) + tm.lin[l];
    out.floor_offset[l] = 2.0 * lam_min - tm.quad[l].quad_form(x) + tm.constant[l];
  }
  return out;
}

BallLpSolution minimize_linear_over_ball(const Vector& g,
                                         const std::vector<HalfspaceConstraint>& constraints,
                                         double kkt_tol, double feas_tol) {
  const int n = g.size();
  const int m = static_cast<int>(constraints.size());
  if (m > 10) throw std::invalid_argument("minimize_linear_over_ball: too many constraints");

  const double g_scale = 1.0 + g.norm();

  auto feasible = [&](const Vector& x) {
    if (x.dot(x) > 1.0 + 4.0 * feas_tol) return false;
    for (const auto& c : constraints) {
      const double tol = feas_tol * (1.0 + c.normal.norm() + std::abs(c.rhs));
      if (c.normal.dot(x) < c.rhs - tol) return false;
    }
    return true;
  };

  bool found = false;
  Vector best_x;
  double best_val = kInf;
  auto consider = [&](const Vector& x) {
    if (x.size() != n || !feasible(x)) return;
    const double val = g.dot(x);
    const double tie = 1e-12 * (1.0 + std::abs(best_val));
    if (!found || val < best_val - tie ||
        (val < best_val + tie && x.dot(x) > best_x.dot(best_x) + 1e-12)) {
      found = true;
      best_x = x;
      best_val = val;
    }
  };

  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < m; ++j)
      if (mask & (1 << j)) idx.push_back(j);
    const int k = static_cast<int>(idx.size());

    // Least-norm point of the active face, via the Gram system.
    Vector x_p(n);
    std::vector<Vector> a;
    a.reserve(k);
    for (int j : idx) a.push_back(constraints[j].normal);
    SymmetricMatrix gram(k);
    Vector rhs(k);
    if (k > 0) {
      for (int i = 0; i < k; ++i) {
        rhs[i] = constraints[idx[i]].rhs;
        for (int j = 0; j <= i; ++j) gram.set(i, j, a[i].dot(a[j]));
      }
      Vector lam;
      try {
        lam = SpdSolver(gram, "active-set Gram").solve(rhs);
      } catch (const DefinitenessError&) {
        continue;  // dependent normals; an independent subset covers this face
      }
      for (int i = 0; i < k; ++i) x_p += lam[i] * a[i];
    }

    const double np2 = x_p.dot(x_p);
    if (np2 > 1.0 + 1e-10) continue;
    const double s = std::sqrt(std::max(0.0, 1.0 - np2));

    // Component of g orthogonal to the active normals.
    Vector g_n = g;
    if (k > 0) {
      Vector ga(k);
      for (int i = 0; i < k; ++i) ga[i] = a[i].dot(g);
      const Vector coef = SpdSolver(gram, "active-set Gram").solve(ga);
      for (int i = 0; i < k; ++i) g_n -= coef[i] * a[i];
    }
    const double gn_norm = g_n.norm();

    if (gn_norm > 1e-12 * g_scale) {
      consider(x_p - (s / gn_norm) * g_n);
    } else {
      // Objective is constant on this face section; try completions that keep
      // every constraint value fixed, plus the interior least-norm point.
      std::vector<const Vector*> keep;
      for (const auto& c : constraints) keep.push_back(&c.normal);
      keep.push_back(&x_p);
      const Vector z = orthogonal_direction(keep, n);
      if (z.size() == n) {
        consider(x_p + s * z);
        consider(x_p - s * z);
      }
      consider(x_p);
    }
  }

  if (!found) throw SubproblemError("minimize_linear_over_ball: no feasible candidate");

  // KKT certificate: g = sum lambda_j a_j - 2 mu x with lambda, mu >= 0.
  BallLpSolution out{best_x, best_val, false};
  {
    std::vector<Vector> cols;
    std::vector<bool> is_ball;
    for (const auto& c : constraints) {
      const double slack = c.normal.dot(best_x) - c.rhs;
      if (slack <= 10.0 * feas_tol * (1.0 + c.normal.norm() + std::abs(c.rhs))) {
        cols.push_back(c.normal);
        is_ball.push_back(false);
      }
    }
    if (std::abs(best_x.dot(best_x) - 1.0) <= 10.0 * feas_tol) {
      cols.push_back(best_x);
      is_ball.push_back(true);
    }
    const int kc = static_cast<int>(cols.size());
    bool ok = true;
    Vector resid = g;
    if (kc > 0) {
      SymmetricMatrix gram(kc);
      Vector rhs(kc);
      for (int i = 0; i < kc; ++i) {
        rhs[i] = cols[i].dot(g);
        for (int j = 0; j <= i; ++j) gram.set(i, j, cols[i].dot(cols[j]));
      }
      gram.add_scaled_identity(1e-12 * (1.0 + gram.max_abs()));
      Vector coef;
      try {
        coef = SpdSolver(gram, "kkt system").solve(rhs);
      } catch (const DefinitenessError&) {
        ok = false;
        coef = Vector(kc);
      }
      for (int i = 0; i < kc; ++i) {
        resid -= coef[i] * cols[i];
        const double mult = is_ball[i] ? -coef[i] / 2.0 : coef[i];
        if (mult < -kkt_tol * g_scale) ok = false;
      }
    }
    out.kkt_verified = ok && resid.norm() <= 1e-6 * g_scale;
  }
  return out;
}

LiftedCode solve_subproblem(const Vector& g, const LiftedCode& reference, double zeta1,
                            const std::array<Vector, 3>& floor_normals,
                            const std::array<double, 3>& floor_offsets, double eps,
                            const SolverConfig& config) {
  const int n = g.size();
  std::vector<HalfspaceConstraint> cons;
  cons.push_back({reference.entries, zeta1});
  for (int l = 0; l < 3; ++l) cons.push_back({floor_normals[l], eps - floor_offsets[l]});

  const BallLpSolution sol =
      minimize_linear_over_ball(g, cons, config.kkt_tol, config.feas_tol);

  Vector x = sol.x;
  const double nx = x.norm();
  if (nx < 1.0 - 1e-12) {
    // Interior relaxed optimum: move to the sphere along a direction that
    // leaves every constraint value unchanged and does not increase g' x.
    if (n <= 5)
      throw SubproblemError("solve_subproblem: dimension too small for sphere reconstruction");
    std::vector<const Vector*> keep{&x, &reference.entries};
    for (int l = 0; l < 3; ++l) keep.push_back(&floor_normals[l]);
    const Vector z = orthogonal_direction(keep, n);
    if (z.size() != n)
      throw SubproblemError("solve_subproblem: no orthogonal direction for reconstruction");
    const double step = std::sqrt(std::max(0.0, 1.0 - nx * nx));
    x += (g.dot(z) <= 0.0 ? step : -step) * z;
  }
  const double final_norm = x.norm();
  if (final_norm > 0.0) x *= 1.0 / final_norm;
  return LiftedCode{x};
}

BlockMmResult block_mm(const FrameProblem& fp, const BlockIterateObserver& observer) {
  const int nnodes = static_cast<int>(fp.nodes.size());
  BlockMmResult result;
  result.codes.assign(nnodes, fp.reference);

  std::vector<SymmetricMatrix> blocks(nnodes);
  for (int p = 0; p < nnodes; ++p) {
    const auto s = evaluate_s_hat(fp.nodes[p].tm, result.codes[p]);
    if (under_floor(s, fp.nodes[p].tm.floor)) {
      // Reference point violates the indicator: nothing to optimize.
      result.objective_trace.push_back(kInf);
      return result;
    }
    blocks[p] = measurement_block(fp.nodes[p].h, s);
  }

  auto objective_from_blocks = [&]() {
    SymmetricMatrix j = fp.prior;
    for (const auto& blk : blocks) j += blk;
    return SpdSolver(j, "approximated information matrix").trace_inverse();
  };
  auto restriction_value = [&](const SymmetricMatrix& base, const SymmetricMatrix& blk) {
    SymmetricMatrix j = base;
    j += blk;
    return SpdSolver(j, "block restriction").trace_inverse();
  };

  result.objective_trace.push_back(objective_from_blocks());
  double prev = result.objective_trace.back();

  for (int sweep = 1; sweep <= fp.config.max_outer; ++sweep) {
    for (int p = 0; p < nnodes; ++p) {
      SymmetricMatrix base = fp.prior;
      for (int q = 0; q < nnodes; ++q)
        if (q != p) base += blocks[q];

      const SurrogateData sur =
          build_surrogate(base, fp.nodes[p].h, fp.nodes[p].tm, result.codes[p]);
      const LiftedCode candidate =
          solve_subproblem(sur.g, fp.reference, fp.zeta1, sur.floor_normal, sur.floor_offset,
                           fp.nodes[p].tm.floor, fp.config);

      // Monotone safeguard: accept the block only if its restriction value
      // did not increase (it cannot, up to rounding, by the MM chain).
      const auto s_new = evaluate_s_hat(fp.nodes[p].tm, candidate);
      if (under_floor(s_new, fp.nodes[p].tm.floor)) continue;
      const SymmetricMatrix new_block = measurement_block(fp.nodes[p].h, s_new);
      const double f_cur = restriction_value(base, blocks[p]);
      const double f_new = restriction_value(base, new_block);
      if (f_new <= f_cur) {
        result.codes[p] = candidate;
        blocks[p] = new_block;
      }
      if (observer) observer(sweep, p, result.codes[p]);
    }
    const double f = objective_from_blocks();
    result.objective_trace.push_back(f);
    result.iterations = sweep;
    if (std::abs(f - prev) < fp.config.xi) {
      result.converged = true;
      break;
    }
    prev = f;
  }
  return result;
}

FrameDesignResult frame_design(const FrameProblem& fp) {
  const BlockMmResult mm = block_mm(fp);

  const std::vector<LiftedCode> refs(fp.nodes.size(), fp.reference);
  FrameDesignResult out;
  out.iterations = mm.iterations;
  out.objective_trace = mm.objective_trace;
  out.exact_reference = exact_objective(fp, refs);
  try {
    out.exact_candidate = exact_objective(fp, mm.codes);
  } catch (const DegeneracyError&) {
    out.exact_candidate = kInf;
  }

  out.accepted = out.exact_candidate < out.exact_reference;
  out.codes = out.accepted ? mm.codes : refs;
  out.info = exact_information(fp, out.codes);
  return out;
}

SlowTimeCode sinr_benchmark_code(const CodeMatrices& cm, const SlowTimeCode& reference,
                                 double zeta, const SolverConfig& config) {
  if (!(zeta >= 0.0 && zeta <= 2.0))
    throw std::invalid_argument("sinr_benchmark_code: zeta must lie in [0, 2]");
  const double zeta1 = 1.0 - zeta / 2.0;
  const LiftedCode x0 = lift(reference);
  const int n = x0.size();
  const int m = n / 2;
  if (zeta == 0.0) return reference;  // feasible set is the reference alone

  const LiftedMatrices lm = lift_matrices(cm);

  // Top eigenpair of the lifted kernel; its phase circle is spanned by (v, Jv)
  // with J the lifted multiplication by the imaginary unit.
  const EigenDecomposition eig = jacobi_eigen(lm.m0t);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = eig.vectors(i, n - 1);
  Vector jv(n);
  for (int i = 0; i < m; ++i) {
    jv[i] = -v[m + i];
    jv[m + i] = v[i];
  }
  const double alpha = x0.entries.dot(v);
  const double beta = x0.entries.dot(jv);
  const double den = std::hypot(alpha, beta);
  if (den > 1e-14) {
    Vector aligned = (alpha / den) * v + (beta / den) * jv;
    if (x0.entries.dot(aligned) >= zeta1) {
      // Similarity cap inactive at the unconstrained maximizer.
      const double nrm = aligned.norm();
      aligned *= 1.0 / nrm;
      return unlift(LiftedCode{aligned});
    }
  }

  // Cap active: monotone linearize-and-maximize ascent inside the cap.
  auto cap_project = [&](const Vector& y) {
    const double t = x0.entries.dot(y);
    if (t >= zeta1) return y;
    Vector w = y - t * x0.entries;
    const double nw = w.norm();
    if (nw < 1e-12) return x0.entries;
    return zeta1 * x0.entries + std::sqrt(std::max(0.0, 1.0 - zeta1 * zeta1)) * (1.0 / nw) * w;
  };

  std::vector<Vector> starts{x0.entries};
  if (den > 1e-14) {
    Vector aligned = (alpha / den) * v + (beta / den) * jv;
    starts.push_back(cap_project(aligned));
  } else {
    starts.push_back(cap_project(v));
  }

  Vector best = x0.entries;
  double best_val = lm.m0t.quad_form(best);
  std::vector<HalfspaceConstraint> cons{{x0.entries, zeta1}};
  for (Vector x : starts) {
    double val = lm.m0t.quad_form(x);
    for (int it = 0; it < 5000; ++it) {
      const Vector g = -2.0 * lm.m0t.matvec(x);
      const BallLpSolution sol =
          minimize_linear_over_ball(g, cons, config.kkt_tol, config.feas_tol);
      Vector y = sol.x;
      const double ny = y.norm();
      if (ny < 1.0 - 1e-12) {
        std::vector<const Vector*> keep{&y, &x0.entries};
        const Vector z = orthogonal_direction(keep, n);
        if (z.size() == n) {
          const double step = std::sqrt(std::max(0.0, 1.0 - ny * ny));
          y += (g.dot(z) <= 0.0 ? step : -step) * z;
        }
      }
      const double nrm = y.norm();
      if (nrm > 0.0) y *= 1.0 / nrm;
      const double new_val = lm.m0t.quad_form(y);
      if (new_val >= val) x = y;
      if (new_val - val < 1e-13 * (1.0 + std::abs(val))) {
        val = std::max(val, new_val);
        break;
      }
      val = new_val;
    }
    if (val > best_val) {
      best_val = val;
      best = x;
    }
  }
  return unlift(LiftedCode{best});
}

}  // namespace radnet
