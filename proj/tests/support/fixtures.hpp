#pragma once

// Shared frame-1 fixture built from the bundled four-node scenario.

#include <vector>

#include "radnet/campaign.hpp"
#include "radnet/optimizer.hpp"
#include "radnet/rng.hpp"
#include "radnet/scenario.hpp"

namespace radnet::testing {

struct PaperFrame1 {
  Scenario scenario;
  TargetState state;
  std::vector<CodeMatrices> cm;
  std::vector<LiftedNodeModel> lifted;
  std::vector<Matrix> jacobians;
  SlowTimeCode reference;
  LiftedCode reference_lifted;
  SymmetricMatrix prior;  // F^{-T} J0 F^{-1}

  FrameProblem problem(double zeta) const {
    FrameProblem fp;
    fp.prior = prior;
    fp.reference = reference_lifted;
    fp.zeta1 = 1.0 - zeta / 2.0;
    fp.config.xi = scenario.xi;
    fp.config.max_outer = scenario.max_outer_iterations;
    for (size_t n = 0; n < lifted.size(); ++n)
      fp.nodes.push_back(NodeProblem{
          build_taylor_model(lifted[n], reference_lifted, scenario.epsilon_floor), jacobians[n],
          lifted[n]});
    return fp;
  }
};

inline PaperFrame1 make_paper_frame1() {
  PaperFrame1 fx;
  fx.scenario = paper_sec4_scenario();
  fx.state = nominal_trajectory(fx.scenario, 1)[0];
  fx.reference = p3_reference(fx.scenario.nodes[0].pulse_count);
  fx.reference_lifted = lift(fx.reference);

  for (const auto& node : fx.scenario.nodes) {
    const NodeGeometry g = geometry(fx.state, node.position_x_m, node.position_y_m);
    const double fd = doppler_shift(g.radial_velocity_mps, node.wavelength_m);
    fx.cm.push_back(build_code_matrices(node, fd, g.azimuth_rad));
    fx.lifted.push_back(lift_node(fx.cm.back(), node.b0(), node.wavelength_m));
    fx.jacobians.push_back(jacobian_h(fx.state, node.position_x_m, node.position_y_m));
  }

  const MotionModel model = cv_model(fx.scenario.update_interval_s, 0.0);
  SymmetricMatrix j0 = SymmetricMatrix::identity(4);
  j0 *= fx.scenario.j0_scale;
  const Matrix dense = model.f_inv.transpose() * j0.to_dense() * model.f_inv;
  fx.prior = SymmetricMatrix::from_dense_symmetrized(dense);
  return fx;
}

inline SlowTimeCode random_unit_code(Rng& rng, int m) {
  SlowTimeCode code{ComplexVector(m)};
  double energy = 0.0;
  for (int i = 0; i < m; ++i) {
    code.entries[i] = cplx(rng.normal(), rng.normal());
    energy += std::norm(code.entries[i]);
  }
  const double s = 1.0 / std::sqrt(energy);
  for (int i = 0; i < m; ++i) code.entries[i] *= s;
  return code;
}

}  // namespace radnet::testing
