#pragma once

#include <iosfwd>
#include <vector>

#include "radnet/optimizer.hpp"
#include "radnet/scenario.hpp"

namespace radnet {

/// One frame of one campaign: the data behind the per-frame figures.
struct FrameRecord {
  int frame = 0;
  double zeta = 0.0;
  double pcrlb_trace = 0.0;
  double crlb_x = 0.0;
  double crlb_y = 0.0;
  double crlb_vx = 0.0;
  double crlb_vy = 0.0;
  std::vector<double> pd;        // per node, designed codes
  std::vector<double> pd_bench;  // per node, SINR-only benchmark codes
  bool accepted = false;         // design gate took the candidate
  int iters = 0;                 // block-MM sweeps
};

struct CampaignOptions {
  bool design = true;           // false: hold the reference code every frame
  bool with_benchmark = true;   // compute per-node SINR-only benchmark Pd
  /// Per-node |alpha|^2 override (Monte-Carlo draws).
  const std::vector<double>* alpha_override = nullptr;
  /// Predicted state per frame (robustness study): codes are designed against
  /// these, exact performance is evaluated at the true trajectory.
  const std::vector<TargetState>* predicted_states = nullptr;
  int frames_override = 0;  // 0: scenario frame count
};

/// Deterministic multi-frame campaign at one similarity level. The target
/// propagates one update interval before each frame, codes are designed per
/// frame via the acceptance-gated block-MM, and the information matrix is
/// threaded forward with exact covariances at the chosen codes.
std::vector<FrameRecord> run_campaign(const Scenario& s, double zeta,
                                      const CampaignOptions& options = {});

/// The deterministic trajectory seen at frames 1..frames.
std::vector<TargetState> nominal_trajectory(const Scenario& s, int frames);

struct MonteCarloResult {
  std::vector<FrameRecord> averaged;  // one row per (zeta, frame), trial mean
  int trials = 0;
};

/// Monte-Carlo campaign over |alpha|^2 draws (exponential, mean exp_mean),
/// one draw per node per trial, held across frames. Deterministic under a
/// fixed scenario seed for any thread count.
MonteCarloResult run_monte_carlo(const Scenario& s, int threads = 1);

struct RobustnessRow {
  int frame = 0;
  double zeta = 0.0;
  double pcrlb_mean = 0.0;
  double pcrlb_min = 0.0;
  double pcrlb_max = 0.0;
  double pcrlb_reference = 0.0;  // error-free reference-code curve
};

/// Mismatched-state study: per trial the predicted trajectory is the true one
/// plus Gaussian errors (sigma_r per position axis, sigma_v per velocity
/// axis); codes designed on predictions are scored at the true states.
std::vector<RobustnessRow> run_robustness(const Scenario& s, int threads = 1);

/// Scenario-specific invariant battery for the `check` CLI subcommand.
/// Prints one line per check; returns false when any check fails.
bool run_scenario_checks(const Scenario& s, std::ostream& out);

}  // namespace radnet
