#pragma once

#include <array>
#include <vector>

#include "radnet/linalg.hpp"

namespace radnet {

/// Planar kinematic state, ordered [x, xdot, y, ydot].
struct TargetState {
  double x = 0.0;
  double vx = 0.0;
  double y = 0.0;
  double vy = 0.0;

  Vector to_vector() const { return Vector{x, vx, y, vy}; }
};

/// Constant-velocity model: F = I2 (x) [[1,T],[0,1]],
/// U = delta I2 (x) [[T^3/3, T^2/2], [T^2/2, T]].
struct MotionModel {
  Matrix f;      // 4x4 transition
  Matrix f_inv;  // unipotent inverse, exact
  Matrix u;      // process-noise covariance (kept for completeness; the
                 // recursion neglects process noise)
  double interval_s = 0.0;
  double noise_power = 0.0;
};

MotionModel cv_model(double interval_s, double noise_power);

TargetState propagate(const TargetState& state, const MotionModel& model);

struct NodeGeometry {
  double range_m = 0.0;
  double radial_velocity_mps = 0.0;  // negative when receding from the node
  double azimuth_rad = 0.0;          // atan(dx/dy), measured clockwise from +y
};

/// Range, radial velocity and azimuth of the target seen from a node.
/// Throws GeometryError when target and node coincide.
NodeGeometry geometry(const TargetState& state, double node_x_m, double node_y_m);

/// Analytic 3x4 Jacobian of (range, radial velocity, azimuth) with respect to
/// [x, xdot, y, ydot]. Derived from the geometry definitions and certified
/// against central finite differences; in particular the azimuth row is
///   d(theta)/dx = dy / r^2,  d(theta)/dy = -dx / r^2.
Matrix jacobian_h(const TargetState& state, double node_x_m, double node_y_m);

/// Positive-definite Bayesian information matrix at a frame.
struct InformationState {
  SymmetricMatrix info;  // 4x4
  int frame = 0;
};

InformationState initial_information(double j0_scale);

/// One node's measurement term: H^T Diag(s)^{-1} H with s the diagonal of the
/// Pd-normalized covariance S = R / Pd.
struct MeasurementContribution {
  Matrix h;                      // 3x4
  std::array<double, 3> s_diag;  // entries of S, each >= floor
};

/// J_k = F^{-T} J_{k-1} F^{-1} + sum_n H_n^T S_n^{-1} H_n.
/// Throws RecursionError when an S entry is below the floor or the result
/// fails its definiteness check.
InformationState im_recursion(const InformationState& prev, const MotionModel& model,
                              const std::vector<MeasurementContribution>& contributions,
                              double s_floor = 0.0);

/// Tr(J^{-1}), the PCRLB trace.
double pcrlb_trace(const SymmetricMatrix& info);

}  // namespace radnet
