#pragma once

#include <array>
#include <functional>
#include <vector>

#include "radnet/real_lift.hpp"
#include "radnet/tracking.hpp"

namespace radnet {

struct SolverConfig {
  double xi = 1e-3;        // block-MM stopping gap on the approximated objective
  int max_outer = 500;     // outer sweeps
  double kkt_tol = 1e-8;   // subproblem optimality tolerance
  double feas_tol = 1e-9;  // constraint feasibility tolerance
};

/// One node's share of a frame design problem.
struct NodeProblem {
  TaylorModel tm;
  Matrix h;  // 3x4 measurement Jacobian
  LiftedNodeModel exact;
};

struct FrameProblem {
  std::vector<NodeProblem> nodes;
  SymmetricMatrix prior;  // F^{-T} J_{k-1} F^{-1}, positive definite
  LiftedCode reference;   // lifted reference code ct0
  double zeta1 = 0.0;     // 1 - zeta/2
  SolverConfig config;
};

/// Approximated objective Tr(Jhat^{-1}) with Jhat = prior + sum H' Shat^{-1} H.
/// Returns +infinity when any Taylor diagonal falls below its floor (the
/// indicator of the modified objective).
double approx_objective(const FrameProblem& fp, const std::vector<LiftedCode>& codes);

/// Exact objective Tr(Jtilde^{-1}) using the exact Pd-normalized covariances.
double exact_objective(const FrameProblem& fp, const std::vector<LiftedCode>& codes);

/// Information matrix at the given codes using exact covariances.
SymmetricMatrix exact_information(const FrameProblem& fp, const std::vector<LiftedCode>& codes);

/// Everything held fixed while block p is optimized. b is PD whenever the
/// fixed codes respect their floors.
struct BlockRestriction {
  SymmetricMatrix b;  // 4x4: prior + sum_{n != p} H' Shat^{-1} H
  NodeProblem node;   // the free block

  /// Restriction value Tr((b + H' Shat^{-1}(ct) H)^{-1}); +inf under the floor.
  double value(const LiftedCode& ct) const;
};

BlockRestriction block_restriction(const FrameProblem& fp, const std::vector<LiftedCode>& codes,
                                   int p);

/// Linear majorizer of the block restriction at the current iterate plus the
/// linearized floor constraints (both tight at the iterate).
struct SurrogateData {
  SymmetricMatrix quad;  // D: quadratic majorizer curvature
  Vector lin;            // d
  double constant = 0.0;  // d0
  Vector g;               // slope of the linear majorizer g' ct + g0
  double g0 = 0.0;
  std::array<Vector, 3> floor_normal;  // h_l
  std::array<double, 3> floor_offset;  // h_l0, constraint h_l' ct + h_l0 >= eps
};

SurrogateData build_surrogate(const SymmetricMatrix& b, const Matrix& h, const TaylorModel& tm,
                              const LiftedCode& iterate);

/// Diagonal of R^{-1} H (b + H' R^{-1} H)^{-2} H' R^{-1} at R = Diag(s): the
/// derivative of Tr((b + H' R^{-1} H)^{-1}) with respect to the diagonal of R.
std::array<double, 3> dhat_diagonal(const SymmetricMatrix& b, const Matrix& h,
                                    const std::array<double, 3>& s);

/// normal' x >= rhs
struct HalfspaceConstraint {
  Vector normal;
  double rhs = 0.0;
};

struct BallLpSolution {
  Vector x;
  double value = 0.0;
  bool kkt_verified = false;
};

/// Exact minimizer of g'x over the unit ball intersected with halfspaces
/// (at most a handful), by enumeration of active sets with closed-form
/// candidates. Throws SubproblemError when no feasible candidate is found.
BallLpSolution minimize_linear_over_ball(const Vector& g,
                                         const std::vector<HalfspaceConstraint>& constraints,
                                         double kkt_tol = 1e-8, double feas_tol = 1e-9);

/// Solve the per-block subproblem: minimize g' ct subject to unit energy, the
/// similarity halfspace ct0' ct >= zeta1 and the linearized floors
/// h_l' ct + h_l0 >= eps. The ball relaxation is solved exactly; when its
/// optimum is interior, a unit-energy point with identical objective value is
/// reconstructed along a direction orthogonal to the relaxed solution, ct0 and
/// every floor normal. Requires dimension > 5 for that direction to exist.
LiftedCode solve_subproblem(const Vector& g, const LiftedCode& reference, double zeta1,
                            const std::array<Vector, 3>& floor_normals,
                            const std::array<double, 3>& floor_offsets, double eps,
                            const SolverConfig& config = {});

struct BlockMmResult {
  std::vector<LiftedCode> codes;
  std::vector<double> objective_trace;  // f-hat at start and after every sweep
  int iterations = 0;
  bool converged = false;
};

/// Called after every block update with (sweep, node index, current block code).
using BlockIterateObserver = std::function<void(int, int, const LiftedCode&)>;

/// Cyclic block-MM over the nodes, ascending index, starting from the
/// reference code everywhere. The recorded objective trace is nonincreasing.
BlockMmResult block_mm(const FrameProblem& fp, const BlockIterateObserver& observer = {});

struct FrameDesignResult {
  std::vector<LiftedCode> codes;
  SymmetricMatrix info;  // J_k at the chosen codes, exact covariances
  bool accepted = false;
  int iterations = 0;
  std::vector<double> objective_trace;
  double exact_candidate = 0.0;
  double exact_reference = 0.0;
};

/// Run block-MM on the approximated problem, then keep the candidate codes
/// only if they strictly beat the all-reference tuple on the exact objective;
/// ties keep the reference. The output information matrix always uses exact
/// covariances at the chosen codes, so
///   exact_objective(chosen) <= exact_objective(reference tuple)
/// holds by construction.
FrameDesignResult frame_design(const FrameProblem& fp);

/// Benchmark code maximizing SINR alone under the same energy and similarity
/// constraints: top eigenvector (phase-aligned) when the similarity cap is
/// inactive, otherwise a monotone linearize-and-maximize ascent inside the cap
/// from several deterministic starts.
SlowTimeCode sinr_benchmark_code(const CodeMatrices& cm, const SlowTimeCode& reference,
                                 double zeta, const SolverConfig& config = {});

}  // namespace radnet
