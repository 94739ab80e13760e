#include "radnet/tracking.hpp"

#include <cmath>

namespace radnet {

MotionModel cv_model(double interval_s, double noise_power) {
  MotionModel model;
  model.interval_s = interval_s;
  model.noise_power = noise_power;
  const double t = interval_s;

  model.f = Matrix::identity(4);
  model.f(0, 1) = t;
  model.f(2, 3) = t;

  model.f_inv = Matrix::identity(4);
  model.f_inv(0, 1) = -t;
  model.f_inv(2, 3) = -t;

  model.u = Matrix(4, 4);
  const double t2 = t * t, t3 = t * t * t;
  for (int block = 0; block < 2; ++block) {
    const int o = 2 * block;
    model.u(o, o) = noise_power * t3 / 3.0;
    model.u(o, o + 1) = noise_power * t2 / 2.0;
    model.u(o + 1, o) = noise_power * t2 / 2.0;
    model.u(o + 1, o + 1) = noise_power * t;
  }
  return model;
}

TargetState propagate(const TargetState& state, const MotionModel& model) {
  const double t = model.interval_s;
  return {state.x + t * state.vx, state.vx, state.y + t * state.vy, state.vy};
}

NodeGeometry geometry(const TargetState& state, double node_x_m, double node_y_m) {
  const double dx = state.x - node_x_m;
  const double dy = state.y - node_y_m;
  const double r = std::hypot(dx, dy);
  if (!(r > 0.0)) throw GeometryError("geometry: target coincides with node");
  NodeGeometry g;
  g.range_m = r;
  g.radial_velocity_mps = -(dx * state.vx + dy * state.vy) / r;
  g.azimuth_rad = std::atan(dx / dy);
  return g;
}

Matrix jacobian_h(const TargetState& state, double node_x_m, double node_y_m) {
  const double dx = state.x - node_x_m;
  const double dy = state.y - node_y_m;
  const double r = std::hypot(dx, dy);
  if (!(r > 0.0)) throw GeometryError("jacobian_h: target coincides with node");
  const double r2 = r * r;
  const double vd = -(dx * state.vx + dy * state.vy) / r;

  Matrix h(3, 4);
  h(0, 0) = dx / r;
  h(0, 2) = dy / r;

  h(1, 0) = -state.vx / r - vd * dx / r2;
  h(1, 1) = -dx / r;
  h(1, 2) = -state.vy / r - vd * dy / r2;
  h(1, 3) = -dy / r;

  h(2, 0) = dy / r2;
  h(2, 2) = -dx / r2;
  return h;
}

InformationState initial_information(double j0_scale) {
  SymmetricMatrix j0 = SymmetricMatrix::identity(4);
  j0 *= j0_scale;
  return InformationState{j0, 0};
}

InformationState im_recursion(const InformationState& prev, const MotionModel& model,
                              const std::vector<MeasurementContribution>& contributions,
                              double s_floor) {
  // F^{-T} J F^{-1}, dense then repacked; F is 4x4 so cost is negligible.
  const Matrix prior = model.f_inv.transpose() * prev.info.to_dense() * model.f_inv;
  SymmetricMatrix j = SymmetricMatrix::from_dense_symmetrized(prior);

  for (size_t n = 0; n < contributions.size(); ++n) {
    const auto& c = contributions[n];
    for (int l = 0; l < 3; ++l) {
      if (!(c.s_diag[l] >= s_floor) || !std::isfinite(c.s_diag[l]))
        throw RecursionError("im_recursion: covariance entry " + std::to_string(l) +
                             " of contribution " + std::to_string(n) + " below floor");
      Vector row(4);
      for (int col = 0; col < 4; ++col) row[col] = c.h(l, col);
      j.add_outer(row, 1.0 / c.s_diag[l]);
    }
  }

  try {
    SpdSolver check(j, "information matrix");
  } catch (const DefinitenessError& e) {
    throw RecursionError(std::string("im_recursion: ") + e.what());
  }
  return InformationState{j, prev.frame + 1};
}

double pcrlb_trace(const SymmetricMatrix& info) {
  return SpdSolver(info, "information matrix").trace_inverse();
}

}  // namespace radnet
