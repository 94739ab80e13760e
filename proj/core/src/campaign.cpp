#include "radnet/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>

#include "radnet/marcum.hpp"
#include "radnet/rng.hpp"

namespace radnet {

namespace {

struct NodeFrameQuantities {
  CodeMatrices cm;
  LiftedNodeModel lifted;
  Matrix h;
};

NodeFrameQuantities node_quantities(const RadarNodeModel& node, const TargetState& state) {
  const NodeGeometry geo = geometry(state, node.position_x_m, node.position_y_m);
  const double fd = doppler_shift(geo.radial_velocity_mps, node.wavelength_m);
  NodeFrameQuantities q;
  q.cm = build_code_matrices(node, fd, geo.azimuth_rad);
  q.lifted = lift_node(q.cm, node.b0(), node.wavelength_m);
  q.h = jacobian_h(state, node.position_x_m, node.position_y_m);
  return q;
}

SymmetricMatrix propagate_information(const SymmetricMatrix& j, const MotionModel& model) {
  const Matrix dense = model.f_inv.transpose() * j.to_dense() * model.f_inv;
  return SymmetricMatrix::from_dense_symmetrized(dense);
}

SymmetricMatrix information_at(const SymmetricMatrix& prior,
                               const std::vector<NodeFrameQuantities>& nodes,
                               const std::vector<LiftedCode>& codes) {
  SymmetricMatrix j = prior;
  for (size_t n = 0; n < nodes.size(); ++n) {
    const auto s = exact_s(nodes[n].lifted, codes[n]);
    for (int l = 0; l < 3; ++l) {
      Vector row(4);
      for (int c = 0; c < 4; ++c) row[c] = nodes[n].h(l, c);
      j.add_outer(row, 1.0 / s[l]);
    }
  }
  return j;
}

void run_trials(int trials, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, trials));
  if (threads == 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        body(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::vector<TargetState> nominal_trajectory(const Scenario& s, int frames) {
  const MotionModel model = cv_model(s.update_interval_s, 0.0);
  std::vector<TargetState> states;
  states.reserve(frames);
  TargetState x = s.initial_state;
  for (int k = 1; k <= frames; ++k) {
    x = propagate(x, model);
    states.push_back(x);
  }
  return states;
}

std::vector<FrameRecord> run_campaign(const Scenario& s, double zeta,
                                      const CampaignOptions& options) {
  const int frames = options.frames_override > 0 ? options.frames_override : s.frames;
  const int nnodes = static_cast<int>(s.nodes.size());

  std::vector<RadarNodeModel> nodes = s.nodes;
  if (options.alpha_override) {
    for (int n = 0; n < nnodes; ++n) nodes[n].alpha_sq = (*options.alpha_override)[n];
  }

  std::vector<SlowTimeCode> refs;
  std::vector<LiftedCode> lifted_refs;
  for (const auto& node : nodes) {
    refs.push_back(p3_reference(node.pulse_count));
    lifted_refs.push_back(lift(refs.back()));
  }

  const MotionModel model = cv_model(s.update_interval_s, 0.0);
  InformationState info = initial_information(s.j0_scale);
  TargetState state = s.initial_state;

  SolverConfig config;
  config.xi = s.xi;
  config.max_outer = s.max_outer_iterations;

  std::vector<FrameRecord> records;
  records.reserve(frames);

  for (int k = 1; k <= frames; ++k) {
    try {
      state = propagate(state, model);
      const TargetState& design_state =
          options.predicted_states ? (*options.predicted_states)[k - 1] : state;

      const SymmetricMatrix prior = propagate_information(info.info, model);

      std::vector<NodeFrameQuantities> design_q;
      design_q.reserve(nnodes);
      for (int n = 0; n < nnodes; ++n) {
        try {
          design_q.push_back(node_quantities(nodes[n], design_state));
        } catch (const std::exception& e) {
          throw std::runtime_error("node " + std::to_string(n + 1) + ": " + e.what());
        }
      }

      std::vector<LiftedCode> codes;
      bool accepted = false;
      int iters = 0;
      if (options.design) {
        FrameProblem fp;
        fp.prior = prior;
        fp.reference = lifted_refs[0];
        fp.zeta1 = 1.0 - zeta / 2.0;
        fp.config = config;
        for (int n = 0; n < nnodes; ++n)
          fp.nodes.push_back(NodeProblem{
              build_taylor_model(design_q[n].lifted, lifted_refs[n], s.epsilon_floor),
              design_q[n].h, design_q[n].lifted});
        const FrameDesignResult fd = frame_design(fp);
        codes = fd.codes;
        accepted = fd.accepted;
        iters = fd.iterations;
      } else {
        codes = lifted_refs;
      }

      // Exact performance is always scored at the true state; with predicted
      // states this is where the mismatch loss shows up.
      const bool mismatch = options.predicted_states != nullptr;
      std::vector<NodeFrameQuantities> eval_q;
      if (mismatch) {
        eval_q.reserve(nnodes);
        for (const auto& node : nodes) eval_q.push_back(node_quantities(node, state));
      }
      const std::vector<NodeFrameQuantities>& q = mismatch ? eval_q : design_q;

      const SymmetricMatrix j_k = information_at(prior, q, codes);
      info = InformationState{j_k, k};

      FrameRecord rec;
      rec.frame = k;
      rec.zeta = zeta;
      const SpdSolver solver(j_k, "information matrix");
      rec.pcrlb_trace = solver.trace_inverse();
      const SymmetricMatrix inv = solver.inverse();
      rec.crlb_x = inv(0, 0);
      rec.crlb_vx = inv(1, 1);
      rec.crlb_y = inv(2, 2);
      rec.crlb_vy = inv(3, 3);
      rec.accepted = accepted;
      rec.iters = iters;
      for (int n = 0; n < nnodes; ++n) rec.pd.push_back(pd_lifted(q[n].lifted, codes[n]));
      if (options.with_benchmark) {
        for (int n = 0; n < nnodes; ++n) {
          const SlowTimeCode bench = sinr_benchmark_code(q[n].cm, refs[n], zeta, config);
          rec.pd_bench.push_back(detection_probability(sinr(bench, q[n].cm), nodes[n].pfa));
        }
      }
      records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw std::runtime_error("frame " + std::to_string(k) + ": " + e.what());
    }
  }
  return records;
}

MonteCarloResult run_monte_carlo(const Scenario& s, int threads) {
  if (!s.monte_carlo) throw ValidationError("monte_carlo", "block required for the mc study");
  const int trials = s.monte_carlo->trials;
  const int nnodes = static_cast<int>(s.nodes.size());

  std::vector<std::vector<FrameRecord>> per_trial(trials);
  run_trials(trials, threads, [&](int t) {
    try {
      Rng rng = Rng::stream(s.seed, static_cast<std::uint64_t>(t));
      std::vector<double> alpha(nnodes);
      for (int n = 0; n < nnodes; ++n) alpha[n] = rng.exponential_mean(s.monte_carlo->exp_mean);
      CampaignOptions options;
      options.alpha_override = &alpha;
      std::vector<FrameRecord> rows;
      for (double z : s.zeta) {
        auto part = run_campaign(s, z, options);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      per_trial[t] = std::move(rows);
    } catch (const std::exception& e) {
      throw std::runtime_error("monte-carlo trial " + std::to_string(t) + ": " + e.what());
    }
  });

  MonteCarloResult result;
  result.trials = trials;
  const size_t rows = per_trial[0].size();
  for (size_t r = 0; r < rows; ++r) {
    FrameRecord avg = per_trial[0][r];
    avg.pcrlb_trace = 0.0;
    avg.crlb_x = avg.crlb_y = avg.crlb_vx = avg.crlb_vy = 0.0;
    std::fill(avg.pd.begin(), avg.pd.end(), 0.0);
    std::fill(avg.pd_bench.begin(), avg.pd_bench.end(), 0.0);
    double iter_sum = 0.0;
    int accepted_count = 0;
    for (int t = 0; t < trials; ++t) {
      const FrameRecord& rec = per_trial[t][r];
      avg.pcrlb_trace += rec.pcrlb_trace;
      avg.crlb_x += rec.crlb_x;
      avg.crlb_y += rec.crlb_y;
      avg.crlb_vx += rec.crlb_vx;
      avg.crlb_vy += rec.crlb_vy;
      for (size_t n = 0; n < avg.pd.size(); ++n) avg.pd[n] += rec.pd[n];
      for (size_t n = 0; n < avg.pd_bench.size(); ++n) avg.pd_bench[n] += rec.pd_bench[n];
      iter_sum += rec.iters;
      accepted_count += rec.accepted ? 1 : 0;
    }
    const double inv_t = 1.0 / trials;
    avg.pcrlb_trace *= inv_t;
    avg.crlb_x *= inv_t;
    avg.crlb_y *= inv_t;
    avg.crlb_vx *= inv_t;
    avg.crlb_vy *= inv_t;
    for (auto& v : avg.pd) v *= inv_t;
    for (auto& v : avg.pd_bench) v *= inv_t;
    avg.iters = static_cast<int>(std::lround(iter_sum * inv_t));
    avg.accepted = accepted_count * 2 >= trials;
    result.averaged.push_back(std::move(avg));
  }
  return result;
}

std::vector<RobustnessRow> run_robustness(const Scenario& s, int threads) {
  if (!s.robustness) throw ValidationError("robustness", "block required for the robust study");
  const int trials = s.robustness->trials;
  const int frames = s.frames;
  const double sigma_r = std::sqrt(s.robustness->sigma_r_sq);
  const double sigma_v = std::sqrt(s.robustness->sigma_v_sq);

  const std::vector<TargetState> actual = nominal_trajectory(s, frames);

  // Predicted trajectories are drawn once per trial and shared across zeta.
  std::vector<std::vector<TargetState>> predicted(trials);
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(s.seed, (1ULL << 32) + static_cast<std::uint64_t>(t));
    predicted[t].reserve(frames);
    for (int k = 0; k < frames; ++k) {
      TargetState p = actual[k];
      p.x += sigma_r * rng.normal();
      p.vx += sigma_v * rng.normal();
      p.y += sigma_r * rng.normal();
      p.vy += sigma_v * rng.normal();
      predicted[t].push_back(p);
    }
  }

  CampaignOptions ref_options;
  ref_options.design = false;
  ref_options.with_benchmark = false;
  const std::vector<FrameRecord> reference = run_campaign(s, s.zeta.front(), ref_options);

  std::vector<RobustnessRow> rows;
  for (double z : s.zeta) {
    std::vector<std::vector<double>> traces(trials);
    run_trials(trials, threads, [&](int t) {
      try {
        CampaignOptions options;
        options.with_benchmark = false;
        options.predicted_states = &predicted[t];
        const auto records = run_campaign(s, z, options);
        traces[t].reserve(frames);
        for (const auto& rec : records) traces[t].push_back(rec.pcrlb_trace);
      } catch (const std::exception& e) {
        throw std::runtime_error("robustness trial " + std::to_string(t) + ": " + e.what());
      }
    });
    for (int k = 0; k < frames; ++k) {
      RobustnessRow row;
      row.frame = k + 1;
      row.zeta = z;
      row.pcrlb_min = traces[0][k];
      row.pcrlb_max = traces[0][k];
      double sum = 0.0;
      for (int t = 0; t < trials; ++t) {
        sum += traces[t][k];
        row.pcrlb_min = std::min(row.pcrlb_min, traces[t][k]);
        row.pcrlb_max = std::max(row.pcrlb_max, traces[t][k]);
      }
      row.pcrlb_mean = sum / trials;
      row.pcrlb_reference = reference[k].pcrlb_trace;
      rows.push_back(row);
    }
  }
  return rows;
}

// ============================================================
// `check` subcommand: scenario-level invariant battery
// ============================================================

namespace {

using CheckFn = std::function<bool(std::string&)>;

bool report(std::ostream& out, const char* name, const CheckFn& fn) {
  std::string detail;
  bool ok = false;
  try {
    ok = fn(detail);
  } catch (const std::exception& e) {
    detail = e.what();
  }
  out << (ok ? "[ OK ] " : "[FAIL] ") << name;
  if (!detail.empty()) out << " (" << detail << ")";
  out << "\n";
  return ok;
}

double directional_fd(const std::function<double(const Vector&)>& f, const Vector& x,
                      const Vector& dir, double step) {
  Vector xp = x, xm = x;
  xp += step * dir;
  xm -= step * dir;
  return (f(xp) - f(xm)) / (2.0 * step);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

}  // namespace

bool run_scenario_checks(const Scenario& s, std::ostream& out) {
  bool all_ok = true;
  const TargetState state1 = nominal_trajectory(s, 1)[0];
  const double zeta = s.zeta.front();

  all_ok &= report(out, "marcum-q closed forms and order monotonicity", [&](std::string&) {
    for (double b : {0.3, 1.0, 3.0, 8.0}) {
      const double q = marcum_q(1, 0.0, b);
      if (std::abs(q - std::exp(-0.5 * b * b)) > 1e-13) return false;
      double prev = 0.0;
      for (int v = 1; v <= 4; ++v) {
        const double qv = marcum_q(v, 1.7, b);
        if (qv + 1e-14 < prev) return false;
        prev = qv;
      }
    }
    return true;
  });

  all_ok &= report(out, "interference kernels positive definite at frame 1", [&](std::string&) {
    for (const auto& node : s.nodes) {
      const auto q = node_quantities(node, state1);
      SpdSolver check(q.lifted.lm.m0t, "lifted SINR kernel");  // throws if not PD
    }
    return true;
  });

  all_ok &= report(out, "Taylor model exact at the reference code", [&](std::string& detail) {
    double worst = 0.0;
    for (const auto& node : s.nodes) {
      const auto q = node_quantities(node, state1);
      const LiftedCode ct0 = lift(p3_reference(node.pulse_count));
      const TaylorModel tm = build_taylor_model(q.lifted, ct0, s.epsilon_floor);
      const auto shat = evaluate_s_hat(tm, ct0);
      const auto sexact = exact_s(q.lifted, ct0);
      for (int l = 0; l < 3; ++l)
        worst = std::max(worst, std::abs(shat[l] - sexact[l]) / sexact[l]);
    }
    detail = "max rel err " + sci(worst);
    return worst <= 1e-9;
  });

  all_ok &= report(out, "detection gradient matches finite differences", [&](std::string& detail) {
    // Certified in the Marcum transition band; at saturated Pd the central
    // difference of a machine-constant function is pure noise.
    double worst = 0.0;
    Rng rng(s.seed ^ 0x5eedULL);
    for (const auto& node : s.nodes) {
      const auto q = node_quantities(node, state1);
      const LiftedCode ct0 = lift(p3_reference(node.pulse_count));
      const double w0 = q.lifted.lm.m0t.quad_form(ct0.entries);
      const double eps_alpha = 8.0 / w0;
      const auto pd = pd_value_gradient_hessian(ct0, q.lifted.lm, eps_alpha, q.lifted.b0);
      Vector dir(ct0.size());
      for (int i = 0; i < dir.size(); ++i) dir[i] = rng.normal();
      dir *= 1.0 / dir.norm();
      const double analytic = pd.gradient.dot(dir);
      const double numeric = directional_fd(
          [&](const Vector& x) {
            return pd_value_gradient_hessian(LiftedCode{x}, q.lifted.lm, eps_alpha, q.lifted.b0)
                .value;
          },
          ct0.entries, dir, 1e-6);
      worst = std::max(worst,
                       std::abs(analytic - numeric) / std::max(pd.gradient.norm(), 1e-12));
    }
    detail = "max rel err " + sci(worst);
    return worst <= 1e-4;
  });

  all_ok &= report(out, "measurement Jacobian matches finite differences", [&](std::string& detail) {
    double worst = 0.0;
    for (const auto& node : s.nodes) {
      const Matrix h = jacobian_h(state1, node.position_x_m, node.position_y_m);
      for (int comp = 0; comp < 3; ++comp) {
        for (int var = 0; var < 4; ++var) {
          const double base[4] = {state1.x, state1.vx, state1.y, state1.vy};
          const double step = std::max(1e-2, 1e-7 * std::abs(base[var]));
          auto value = [&](double delta) {
            TargetState st = state1;
            (var == 0 ? st.x : var == 1 ? st.vx : var == 2 ? st.y : st.vy) += delta;
            const NodeGeometry g = geometry(st, node.position_x_m, node.position_y_m);
            return comp == 0 ? g.range_m : comp == 1 ? g.radial_velocity_mps : g.azimuth_rad;
          };
          const double numeric = (value(step) - value(-step)) / (2.0 * step);
          const double scale = std::max(1e-9, std::abs(h(comp, var)));
          if (std::abs(h(comp, var)) > 1e-12 || std::abs(numeric) > 1e-9)
            worst = std::max(worst, std::abs(h(comp, var) - numeric) / scale);
        }
      }
    }
    detail = "max rel err " + sci(worst);
    return worst <= 1e-5;
  });

  all_ok &= report(out, "surrogate touches and dominates at frame 1", [&](std::string& detail) {
    FrameProblem fp;
    fp.prior = propagate_information(initial_information(s.j0_scale).info,
                                     cv_model(s.update_interval_s, 0.0));
    fp.reference = lift(p3_reference(s.nodes[0].pulse_count));
    fp.zeta1 = 1.0 - zeta / 2.0;
    for (const auto& node : s.nodes) {
      const auto q = node_quantities(node, state1);
      fp.nodes.push_back(NodeProblem{
          build_taylor_model(q.lifted, lift(p3_reference(node.pulse_count)), s.epsilon_floor),
          q.h, q.lifted});
    }
    const std::vector<LiftedCode> codes(fp.nodes.size(), fp.reference);
    const BlockRestriction br = block_restriction(fp, codes, 0);
    const SurrogateData sur = build_surrogate(br.b, fp.nodes[0].h, fp.nodes[0].tm, codes[0]);
    const double touch = sur.g.dot(codes[0].entries) + sur.g0;
    const double f_here = br.value(codes[0]);
    if (std::abs(touch - f_here) > 1e-8 * std::abs(f_here)) {
      detail = "touching violated";
      return false;
    }
    Rng rng(s.seed ^ 0xd011ULL);
    for (int trial = 0; trial < 50; ++trial) {
      Vector x = codes[0].entries;
      for (int i = 0; i < x.size(); ++i) x[i] += 0.2 * rng.normal();
      x *= 1.0 / x.norm();
      const LiftedCode ct{x};
      const double f = br.value(ct);
      if (!std::isfinite(f)) continue;  // indicator region
      const double bound = sur.g.dot(x) + sur.g0;
      if (f > bound + 1e-7 * std::max(1.0, std::abs(bound))) {
        detail = "domination violated";
        return false;
      }
    }
    return true;
  });

  all_ok &= report(out, "frame-1 design: monotone trace and acceptance gate", [&](std::string& detail) {
    CampaignOptions options;
    options.frames_override = 1;
    const auto designed = run_campaign(s, zeta, options);
    CampaignOptions ref_options;
    ref_options.design = false;
    ref_options.with_benchmark = false;
    ref_options.frames_override = 1;
    const auto reference = run_campaign(s, zeta, ref_options);
    detail = "designed " + std::to_string(designed[0].pcrlb_trace) + ", reference " +
             std::to_string(reference[0].pcrlb_trace);
    return designed[0].pcrlb_trace <= reference[0].pcrlb_trace;
  });

  return all_ok;
}

}  // namespace radnet
