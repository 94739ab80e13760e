// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "radnet/campaign.hpp"
#include "radnet/emit.hpp"
#include "radnet/marcum.hpp"
#include "radnet/optimizer.hpp"
#include "support/fixtures.hpp"
#include "support/grid_search.hpp"
#include "support/oracles.hpp"

using namespace radnet;
using namespace radnet::testing;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

struct DeterministicRuns {
  std::vector<double> zetas{0.01, 0.05, 0.1, 0.15};
  std::vector<std::vector<FrameRecord>> designed;  // per zeta, with benchmark Pd
  std::vector<FrameRecord> reference;
  double design_seconds = 0.0;  // zeta = 0.15 design + reference, no benchmark
};

DeterministicRuns run_deterministic_campaigns(const Scenario& s) {
  DeterministicRuns runs;

  const auto t0 = std::chrono::steady_clock::now();
  CampaignOptions timing_options;
  timing_options.with_benchmark = false;
  const auto timed_designed = run_campaign(s, 0.15, timing_options);
  CampaignOptions ref_options;
  ref_options.design = false;
  ref_options.with_benchmark = false;
  runs.reference = run_campaign(s, 0.15, ref_options);
  const auto t1 = std::chrono::steady_clock::now();
  runs.design_seconds = std::chrono::duration<double>(t1 - t0).count();
  (void)timed_designed;

  for (double z : runs.zetas) runs.designed.push_back(run_campaign(s, z));
  return runs;
}

std::string dB(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", x);
  return buf;
}

// ---------------- criteria ----------------

void criterion_frame30_gain(const DeterministicRuns& runs) {
  const auto& designed = runs.designed.back();  // zeta = 0.15
  const double trace_ref = runs.reference.back().pcrlb_trace;
  const double trace_designed = designed.back().pcrlb_trace;
  const double gain_db = 10.0 * std::log10(trace_ref / trace_designed);
  const bool in_band = gain_db >= 2.5 && gain_db <= 4.5;
  const bool in_time = runs.design_seconds <= 300.0;
  std::ostringstream detail;
  detail << "10*log10(trace_ref/trace_designed) at frame 30 = " << dB(gain_db)
         << " dB (band 3.5 +/- 1.0), runtime " << dB(runs.design_seconds)
         << " s (limit 300); trace ratio " << dB(trace_ref / trace_designed)
         << " [for reference, 20*log10 of the same ratio = "
         << dB(20.0 * std::log10(trace_ref / trace_designed)) << " dB]";
  report("frame30-pcrlb-gain", in_band && in_time, detail.str());
}

void criterion_per_frame_dominance(const DeterministicRuns& runs) {
  int violations = 0;
  double worst = 0.0;
  for (const auto& curve : runs.designed) {
    for (size_t k = 0; k < curve.size(); ++k) {
      const double gap = curve[k].pcrlb_trace - runs.reference[k].pcrlb_trace;
      if (gap > 0.0) {
        ++violations;
        worst = std::max(worst, gap);
      }
    }
  }
  std::ostringstream detail;
  detail << runs.designed.size() << " zetas x " << runs.reference.size()
         << " frames, violations " << violations << " (zero tolerance), worst excess " << worst;
  report("per-frame-dominance", violations == 0, detail.str());
}

void criterion_in_frame_monotonicity(const PaperFrame1& fx) {
  double worst = 0.0;
  for (double zeta : {0.01, 0.05, 0.1, 0.15}) {
    const BlockMmResult mm = block_mm(fx.problem(zeta));
    for (size_t i = 1; i < mm.objective_trace.size(); ++i)
      worst = std::max(worst, mm.objective_trace[i] - mm.objective_trace[i - 1]);
  }
  std::ostringstream detail;
  detail << "worst per-iteration increase " << worst << " (allowed 1e-9)";
  report("in-frame-monotonicity", worst <= 1e-9, detail.str());
}

void criterion_zeta_ordering(const PaperFrame1& fx) {
  std::vector<double> finals;
  for (double zeta : {0.01, 0.05, 0.1, 0.15})
    finals.push_back(block_mm(fx.problem(zeta)).objective_trace.back());
  bool ordered = true;
  for (size_t i = 1; i < finals.size(); ++i)
    if (finals[i] > finals[i - 1] + 1e-6) ordered = false;
  std::ostringstream detail;
  detail << "converged frame-1 objectives ";
  for (double f : finals) detail << f << " ";
  detail << "(nonincreasing in zeta, tol 1e-6)";
  report("zeta-ordering", ordered, detail.str());
}

void criterion_detection_sandwich(const DeterministicRuns& runs, double pfa) {
  double worst_upper = -1.0;
  double worst_lower = 1.0;
  for (const auto& curve : runs.designed) {
    for (const auto& rec : curve) {
      for (size_t n = 0; n < rec.pd.size(); ++n) {
        worst_lower = std::min(worst_lower, rec.pd[n] - pfa);
        worst_upper = std::max(worst_upper, rec.pd[n] - rec.pd_bench[n]);
      }
    }
  }
  std::ostringstream detail;
  detail << "min Pd - Pfa = " << worst_lower << " (needs >= 0), max Pd - Pd_bench = "
         << worst_upper << " (allowed 1e-6)";
  report("detection-sandwich", worst_lower >= 0.0 && worst_upper <= 1e-6, detail.str());
}

void criterion_subproblem_oracle() {
  // 100 random instances at M = 3 (dimension 6). The documented oracle grid:
  // 20000 coarse pseudo-random sphere points plus the reference seed, then 16
  // zoom levels keeping the best 80 points, 60 local perturbations each, at
  // radii 0.7 * 0.62^level (final covering radius ~3e-4 on the unit sphere).
  Rng rng(5150);
  double worst = 0.0;
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 6;
    Vector g(n);
    for (int i = 0; i < n; ++i) g[i] = rng.normal();
    const LiftedCode reference{random_unit_vector(rng, n)};
    const double zeta1 = 1.0 - rng.uniform(0.05, 0.4) / 2.0;
    const double eps = 1e-8;
    std::array<Vector, 3> normals;
    std::array<double, 3> offsets;
    for (int l = 0; l < 3; ++l) {
      Vector normal(n);
      for (int i = 0; i < n; ++i) normal[i] = rng.normal();
      normals[l] = normal;
      offsets[l] = eps + rng.uniform(0.05, 0.6) - normal.dot(reference.entries);
    }
    auto feasible = [&](const Vector& x) {
      if (reference.entries.dot(x) < zeta1 - 1e-9) return false;
      for (int l = 0; l < 3; ++l)
        if (normals[l].dot(x) + offsets[l] < eps - 1e-9) return false;
      return true;
    };
    const LiftedCode out = solve_subproblem(g, reference, zeta1, normals, offsets, eps);
    if (!feasible(out.entries)) {
      report("subproblem-oracle", false, "solver returned infeasible point");
      return;
    }
    SphereSearchConfig cfg;
    cfg.seed = 42000 + trial;
    const double grid = sphere_grid_minimize(
        n, [&](const Vector& x) { return g.dot(x); }, feasible, {reference.entries}, cfg);
    worst = std::max(worst, std::abs(g.dot(out.entries) - grid));
    ++solved;
  }
  std::ostringstream detail;
  detail << solved << " instances, worst |solver - grid| = " << worst << " (allowed 1e-3)";
  report("subproblem-oracle", worst <= 1e-3, detail.str());
}

void criterion_derivative_certification(const PaperFrame1& fx) {
  Rng rng(6021);
  double worst = 0.0;
  std::string worst_item = "none";
  auto track = [&](const char* item, double err) {
    if (err > worst) {
      worst = err;
      worst_item = item;
    }
  };

  const auto& node = fx.lifted[0];
  const int n = 16;

  // Random unit expansion/evaluation points (valid: phi > 0 generically).
  auto random_point = [&]() { return LiftedCode{random_unit_vector(rng, n)}; };

  for (int trial = 0; trial < 50; ++trial) {
    const LiftedCode x = random_point();

    // Pd derivatives are certified across the Marcum transition band; at the
    // saturated paper scales the function is constant to machine precision
    // and central differences return rounding noise for any implementation.
    const double w = node.lm.m0t.quad_form(x.entries);
    const double eps_alpha = rng.uniform(0.3, 25.0) / w;
    const auto pd = pd_value_gradient_hessian(x, node.lm, eps_alpha, node.b0);
    track("pd-gradient",
          max_gradient_mismatch(
              [&](const Vector& v) {
                return pd_value_gradient_hessian(LiftedCode{v}, node.lm, eps_alpha, node.b0)
                    .value;
              },
              x.entries, pd.gradient, 1e-5, rng, 3));
    track("pd-hessian",
          max_hessian_mismatch(
              [&](const Vector& v) {
                return pd_value_gradient_hessian(LiftedCode{v}, node.lm, eps_alpha, node.b0)
                    .gradient;
              },
              x.entries, pd.hessian, 1e-5, rng, 3));

    Vector phi_grad;
    SymmetricMatrix phi_hess;
    phi_gradient_hessian(x, node.lm, phi_grad, phi_hess);
    track("phi-gradient",
          max_gradient_mismatch(
              [&](const Vector& v) { return phi_tilde(LiftedCode{v}, node.lm); }, x.entries,
              phi_grad, 1e-5, rng, 3));
    track("phi-hessian", max_hessian_mismatch(
                             [&](const Vector& v) {
                               Vector grad;
                               SymmetricMatrix hess;
                               phi_gradient_hessian(LiftedCode{v}, node.lm, grad, hess);
                               return grad;
                             },
                             x.entries, phi_hess, 1e-5, rng, 3));
  }

  // Gamma composites: the Taylor gradient at the expansion point must match
  // finite differences of the exact covariance diagonals.
  for (int trial = 0; trial < 50; ++trial) {
    const LiftedCode x0 = random_point();
    TaylorModel tm;
    try {
      tm = build_taylor_model(node, x0, 1e-12);
    } catch (const ExpansionPointError&) {
      continue;
    }
    for (int l = 0; l < 3; ++l) {
      const Vector analytic = 2.0 * tm.quad[l].matvec(x0.entries) + tm.lin[l];
      track("taylor-gradient",
            max_gradient_mismatch(
                [&](const Vector& v) { return exact_s(node, LiftedCode{v})[l]; }, x0.entries,
                analytic, 1e-5, rng, 2));
    }
  }

  // Dhat: derivative of the trace-inverse with respect to the covariance
  // diagonal, 50 random (B, H, s) triples, Richardson at h and h/2.
  for (int trial = 0; trial < 50; ++trial) {
    const SymmetricMatrix b = random_spd(rng, 4, 0.4);
    Matrix h(3, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = rng.normal();
    std::array<double, 3> s{rng.uniform(0.3, 4.0), rng.uniform(0.3, 4.0), rng.uniform(0.3, 4.0)};
    const auto dhat = dhat_diagonal(b, h, s);
    auto trace_at = [&](const std::array<double, 3>& sv) {
      SymmetricMatrix m = b;
      for (int l = 0; l < 3; ++l) {
        Vector row(4);
        for (int c = 0; c < 4; ++c) row[c] = h(l, c);
        m.add_outer(row, 1.0 / sv[l]);
      }
      return SpdSolver(m).trace_inverse();
    };
    double scale = std::max({std::abs(dhat[0]), std::abs(dhat[1]), std::abs(dhat[2]), 1e-12});
    for (int l = 0; l < 3; ++l) {
      auto central = [&](double step) {
        auto sp = s, sm = s;
        sp[l] += step;
        sm[l] -= step;
        return (trace_at(sp) - trace_at(sm)) / (2.0 * step);
      };
      const double h1 = 1e-4 * s[l];
      const double d1 = central(h1), d2 = central(0.5 * h1);
      const double richardson = (4.0 * d2 - d1) / 3.0;
      track("dhat", std::abs(dhat[l] - richardson) / scale);
    }
  }

  // Measurement Jacobian against finite differences of the geometry map.
  for (int trial = 0; trial < 50; ++trial) {
    const double nx = rng.uniform(-2e4, 2e4), ny = rng.uniform(-2e4, 2e4);
    TargetState st;
    st.x = nx + (rng.uniform01() < 0.5 ? -1.0 : 1.0) * rng.uniform(5e3, 4e4);
    st.y = ny + (rng.uniform01() < 0.5 ? -1.0 : 1.0) * rng.uniform(5e3, 4e4);
    st.vx = rng.uniform(-300.0, 300.0);
    st.vy = rng.uniform(-300.0, 300.0);
    const Matrix hj = jacobian_h(st, nx, ny);
    for (int comp = 0; comp < 3; ++comp) {
      Vector row(4);
      for (int var = 0; var < 4; ++var) row[var] = hj(comp, var);
      const double row_norm = std::max(row.norm(), 1e-12);
      for (int var = 0; var < 4; ++var) {
        auto value = [&](double delta) {
          TargetState p = st;
          (var == 0 ? p.x : var == 1 ? p.vx : var == 2 ? p.y : p.vy) += delta;
          const NodeGeometry g = geometry(p, nx, ny);
          return comp == 0 ? g.range_m : comp == 1 ? g.radial_velocity_mps : g.azimuth_rad;
        };
        const double h1 = (var % 2 == 0) ? 1.0 : 1e-2;
        auto central = [&](double step) { return (value(step) - value(-step)) / (2.0 * step); };
        const double d1 = central(h1), d2 = central(0.5 * h1);
        const double richardson = (4.0 * d2 - d1) / 3.0;
        track("jacobian", std::abs(hj(comp, var) - richardson) / row_norm);
      }
    }
  }

  std::ostringstream detail;
  detail << "worst relative mismatch " << worst << " (" << worst_item << ", allowed 1e-4)";
  report("derivative-certification", worst <= 1e-4, detail.str());
}

void criterion_taylor_exactness(const Scenario& s) {
  double worst = 0.0;
  const auto states = nominal_trajectory(s, 3);
  for (const auto& st : states) {
    for (const auto& node_model : s.nodes) {
      const NodeGeometry g = geometry(st, node_model.position_x_m, node_model.position_y_m);
      const CodeMatrices cm = build_code_matrices(
          node_model, doppler_shift(g.radial_velocity_mps, node_model.wavelength_m),
          g.azimuth_rad);
      const auto lifted = lift_node(cm, node_model.b0(), node_model.wavelength_m);
      const LiftedCode ct0 = lift(p3_reference(node_model.pulse_count));
      const TaylorModel tm = build_taylor_model(lifted, ct0, s.epsilon_floor);
      const auto shat = evaluate_s_hat(tm, ct0);
      const auto sexact = exact_s(lifted, ct0);
      for (int l = 0; l < 3; ++l)
        worst = std::max(worst, std::abs(shat[l] - sexact[l]) / sexact[l]);
    }
  }
  std::ostringstream detail;
  detail << "worst relative error at the expansion point " << worst
         << " over 3 frames x 4 nodes x 3 diagonals (allowed 1e-9)";
  report("taylor-exactness", worst <= 1e-9, detail.str());
}

void criterion_concavity_probe() {
  Rng rng(31013);
  double worst = -1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const SymmetricMatrix b = random_spd(rng, 4, 0.3);
    Matrix h(3, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = rng.normal();
    std::array<double, 3> r1, r2, mix;
    for (int l = 0; l < 3; ++l) {
      r1[l] = rng.uniform(0.1, 5.0);
      r2[l] = rng.uniform(0.1, 5.0);
    }
    const double t = rng.uniform(0.02, 0.98);
    for (int l = 0; l < 3; ++l) mix[l] = t * r1[l] + (1.0 - t) * r2[l];
    auto value = [&](const std::array<double, 3>& r) {
      SymmetricMatrix m = b;
      for (int l = 0; l < 3; ++l) {
        Vector row(4);
        for (int c = 0; c < 4; ++c) row[c] = h(l, c);
        m.add_outer(row, 1.0 / r[l]);
      }
      return SpdSolver(m).trace_inverse();
    };
    worst = std::max(worst, t * value(r1) + (1.0 - t) * value(r2) - value(mix));
  }
  std::ostringstream detail;
  detail << "1000 instances, worst midpoint-concavity violation " << worst << " (allowed 1e-10)";
  report("concavity-probe", worst <= 1e-10, detail.str());
}

void criterion_marcum_grid() {
  // 408-point (v, a, b) grid: v in {1,2,3}, a and b below, vs the adaptive
  // quadrature oracle of the defining integral.
  const std::vector<double> a_grid{0.0, 0.2, 0.7, 1.5, 3.0, 5.0, 8.0, 12.0, 18.0,
                                   25.0, 33.0, 42.0, 51.0, 60.0};
  const std::vector<double> b_grid{0.1, 0.6, 1.2, 2.2, 3.6, 5.5, 8.0, 14.0, 22.0, 36.0};
  int points = 0;
  double worst = 0.0;
  for (int v = 1; v <= 3; ++v)
    for (double a : a_grid)
      for (double b : b_grid) {
        const double oracle = marcum_q_quadrature(v, a, b);
        worst = std::max(worst, std::abs(marcum_q(v, a, b) - oracle));
        ++points;
      }
  std::ostringstream detail;
  detail << points << " grid points, max |impl - quadrature oracle| = " << worst
         << " (allowed 1e-10)";
  report("marcum-special-functions", points >= 400 && worst <= 1e-10, detail.str());
}

void criterion_robustness(const Scenario& base) {
  Scenario s = base;
  s.zeta = {0.15};
  s.robustness = RobustnessBlock{900.0, 56.25, 25};
  const auto rows = run_robustness(s, 1);
  int violations = 0;
  double worst_gap = -1e300;
  double spread_min = 1e300, spread_max = -1e300;
  for (const auto& row : rows) {
    if (row.pcrlb_mean > row.pcrlb_reference) ++violations;
    worst_gap = std::max(worst_gap, row.pcrlb_mean - row.pcrlb_reference);
    spread_min = std::min(spread_min, row.pcrlb_min / row.pcrlb_mean);
    spread_max = std::max(spread_max, row.pcrlb_max / row.pcrlb_mean);
  }
  std::ostringstream detail;
  detail << "25 trials, sigma_r^2=900 m^2, sigma_v^2=56.25 m^2/s^2, zeta=0.15: mean-below-"
            "reference violations "
         << violations << "; spread (reported, not gated): min/mean in [" << spread_min
         << ", 1], max/mean up to " << spread_max;
  report("robustness-study", violations == 0, detail.str());
}

}  // namespace

int main() {
  const Scenario scenario = paper_sec4_scenario();
  const PaperFrame1 fx = make_paper_frame1();

  std::printf("radnet acceptance suite: scenario '%s', %zu nodes, %d frames\n",
              scenario.name.c_str(), scenario.nodes.size(), scenario.frames);

  const DeterministicRuns runs = run_deterministic_campaigns(scenario);

  criterion_frame30_gain(runs);
  criterion_per_frame_dominance(runs);
  criterion_in_frame_monotonicity(fx);
  criterion_zeta_ordering(fx);
  criterion_detection_sandwich(runs, scenario.pfa);
  criterion_subproblem_oracle();
  criterion_derivative_certification(fx);
  criterion_taylor_exactness(scenario);
  criterion_concavity_probe();
  criterion_marcum_grid();
  criterion_robustness(scenario);

  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures;
}
