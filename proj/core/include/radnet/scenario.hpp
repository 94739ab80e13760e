#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radnet/signal_model.hpp"
#include "radnet/tracking.hpp"

namespace radnet {

/// P3 polyphase reference code, entry m = exp(i pi m^2 / M) / sqrt(M).
SlowTimeCode p3_reference(int pulses);

struct MonteCarloBlock {
  int trials = 50;
  double exp_mean = 0.5;  // mean of the |alpha|^2 exponential draws
};

struct RobustnessBlock {
  double sigma_r_sq = 0.0;  // position covariance per axis, m^2
  double sigma_v_sq = 0.0;  // velocity covariance per axis, m^2/s^2
  int trials = 50;
};

struct Scenario {
  int schema_version = 1;
  std::string name;
  std::vector<RadarNodeModel> nodes;
  TargetState initial_state;
  int frames = 30;
  double update_interval_s = 1.0;
  std::vector<double> zeta;
  double pfa = 1e-6;
  double j0_scale = 1e-10;
  double epsilon_floor = 1e-8;
  double xi = 1e-3;
  int max_outer_iterations = 500;
  std::uint64_t seed = 1;
  std::optional<MonteCarloBlock> monte_carlo;
  std::optional<RobustnessBlock> robustness;

  /// Throws ValidationError naming the first offending field.
  void validate() const;
};

/// Load and fully validate a scenario from its JSON schema. Syntax problems
/// raise ParseError with line/column; schema problems raise ValidationError
/// with the field path. The reserved name "paper_sec4" loads the bundled
/// four-node scenario without touching the filesystem.
Scenario load_scenario(const std::string& path);

/// The bundled four-node X-band scenario.
Scenario paper_sec4_scenario();

/// Serialize a scenario back to its JSON schema (round-trips through
/// load_scenario).
std::string scenario_to_json(const Scenario& s);

}  // namespace radnet
