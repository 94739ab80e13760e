#include <benchmark/benchmark.h>

#include "radnet/campaign.hpp"
#include "radnet/marcum.hpp"
#include "radnet/optimizer.hpp"
#include "radnet/scenario.hpp"

using namespace radnet;

namespace {

struct Frame1 {
  Scenario scenario = paper_sec4_scenario();
  FrameProblem fp;
  SurrogateData surrogate;
  std::vector<LiftedCode> codes;

  Frame1() {
    const TargetState st = nominal_trajectory(scenario, 1)[0];
    const MotionModel model = cv_model(scenario.update_interval_s, 0.0);
    SymmetricMatrix j0 = SymmetricMatrix::identity(4);
    j0 *= scenario.j0_scale;
    fp.prior = SymmetricMatrix::from_dense_symmetrized(model.f_inv.transpose() * j0.to_dense() *
                                                       model.f_inv);
    fp.reference = lift(p3_reference(8));
    fp.zeta1 = 1.0 - 0.15 / 2.0;
    fp.config.xi = scenario.xi;
    for (const auto& node : scenario.nodes) {
      const NodeGeometry g = geometry(st, node.position_x_m, node.position_y_m);
      const CodeMatrices cm = build_code_matrices(
          node, doppler_shift(g.radial_velocity_mps, node.wavelength_m), g.azimuth_rad);
      const auto lifted = lift_node(cm, node.b0(), node.wavelength_m);
      fp.nodes.push_back(
          NodeProblem{build_taylor_model(lifted, fp.reference, scenario.epsilon_floor),
                      jacobian_h(st, node.position_x_m, node.position_y_m), lifted});
    }
    codes.assign(fp.nodes.size(), fp.reference);
    const BlockRestriction br = block_restriction(fp, codes, 0);
    surrogate = build_surrogate(br.b, fp.nodes[0].h, fp.nodes[0].tm, codes[0]);
  }
};

const Frame1& frame1() {
  static Frame1 fx;
  return fx;
}

}  // namespace

static void BM_MarcumQ(benchmark::State& state) {
  double a = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(marcum_q(1, a, 5.25));
    a = a >= 20.0 ? 0.0 : a + 0.1;
  }
}
BENCHMARK(BM_MarcumQ);

static void BM_JacobiEigen16(benchmark::State& state) {
  const auto& fx = frame1();
  const SymmetricMatrix& m = fx.fp.nodes[0].tm.quad[0];
  for (auto _ : state) benchmark::DoNotOptimize(min_max_eigenvalues(m));
}
BENCHMARK(BM_JacobiEigen16);

static void BM_BuildTaylorModel(benchmark::State& state) {
  const auto& fx = frame1();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        build_taylor_model(fx.fp.nodes[0].exact, fx.fp.reference, fx.scenario.epsilon_floor));
}
BENCHMARK(BM_BuildTaylorModel);

static void BM_SolveSubproblem(benchmark::State& state) {
  const auto& fx = frame1();
  const auto& sur = fx.surrogate;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_subproblem(sur.g, fx.fp.reference, fx.fp.zeta1,
                                              sur.floor_normal, sur.floor_offset,
                                              fx.fp.nodes[0].tm.floor, fx.fp.config));
}
BENCHMARK(BM_SolveSubproblem);

static void BM_BlockMmSweepLimited(benchmark::State& state) {
  FrameProblem fp = frame1().fp;
  fp.config.max_outer = static_cast<int>(state.range(0));
  fp.config.xi = 0.0;  // run exactly max_outer sweeps
  for (auto _ : state) benchmark::DoNotOptimize(block_mm(fp));
}
BENCHMARK(BM_BlockMmSweepLimited)->Arg(1)->Arg(8);

static void BM_FrameDesign(benchmark::State& state) {
  const auto& fx = frame1();
  for (auto _ : state) benchmark::DoNotOptimize(frame_design(fx.fp));
}
BENCHMARK(BM_FrameDesign);

BENCHMARK_MAIN();
