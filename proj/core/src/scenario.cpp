#include "radnet/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "radnet/errors.hpp"

namespace radnet {

using nlohmann::json;

SlowTimeCode p3_reference(int pulses) {
  if (pulses < 3) throw std::invalid_argument("p3_reference: pulse count must be >= 3");
  SlowTimeCode code{ComplexVector(pulses)};
  const double amp = 1.0 / std::sqrt(static_cast<double>(pulses));
  for (int m = 0; m < pulses; ++m)
    code.entries[m] = std::polar(amp, std::numbers::pi * m * m / pulses);
  return code;
}

void Scenario::validate() const {
  if (schema_version != 1)
    throw ValidationError("schema_version", "unsupported version " + std::to_string(schema_version));
  if (nodes.empty()) throw ValidationError("nodes", "at least one node is required");
  for (size_t n = 0; n < nodes.size(); ++n) {
    try {
      nodes[n].validate();
    } catch (const std::invalid_argument& e) {
      throw ValidationError("nodes[" + std::to_string(n) + "]", e.what());
    }
  }
  if (frames < 1) throw ValidationError("frames", "must be >= 1");
  if (!(update_interval_s > 0.0)) throw ValidationError("update_interval_s", "must be positive");
  if (zeta.empty()) throw ValidationError("zeta", "at least one similarity parameter is required");
  for (size_t i = 0; i < zeta.size(); ++i)
    if (!(zeta[i] >= 0.0 && zeta[i] <= 2.0))
      throw ValidationError("zeta[" + std::to_string(i) + "]", "must lie in [0, 2]");
  if (!(pfa > 0.0 && pfa < 1.0)) throw ValidationError("pfa", "must lie in (0, 1)");
  if (!(j0_scale > 0.0)) throw ValidationError("j0_scale", "must be positive");
  if (!(epsilon_floor > 0.0)) throw ValidationError("epsilon_floor", "must be positive");
  if (!(xi > 0.0)) throw ValidationError("xi", "must be positive");
  if (max_outer_iterations < 1) throw ValidationError("max_outer_iterations", "must be >= 1");
  if (monte_carlo) {
    if (monte_carlo->trials < 1) throw ValidationError("monte_carlo.trials", "must be >= 1");
    if (!(monte_carlo->exp_mean > 0.0))
      throw ValidationError("monte_carlo.exp_mean", "must be positive");
  }
  if (robustness) {
    if (robustness->trials < 1) throw ValidationError("robustness.trials", "must be >= 1");
    if (!(robustness->sigma_r_sq >= 0.0))
      throw ValidationError("robustness.sigma_r_sq", "must be >= 0");
    if (!(robustness->sigma_v_sq >= 0.0))
      throw ValidationError("robustness.sigma_v_sq", "must be >= 0");
  }
}

namespace {

double require_number(const json& j, const std::string& path, const char* field) {
  if (!j.contains(field)) throw ValidationError(path + field, "missing");
  if (!j[field].is_number()) throw ValidationError(path + field, "must be a number");
  return j[field].get<double>();
}

int require_int(const json& j, const std::string& path, const char* field) {
  if (!j.contains(field)) throw ValidationError(path + field, "missing");
  if (!j[field].is_number_integer()) throw ValidationError(path + field, "must be an integer");
  return j[field].get<int>();
}

double optional_number(const json& j, const std::string& path, const char* field, double fallback) {
  if (!j.contains(field)) return fallback;
  if (!j[field].is_number()) throw ValidationError(path + field, "must be a number");
  return j[field].get<double>();
}

RadarNodeModel parse_node(const json& j, const std::string& path, double default_pfa) {
  RadarNodeModel node;
  if (!j.contains("position_m") || !j["position_m"].is_array() || j["position_m"].size() != 2)
    throw ValidationError(path + "position_m", "must be an array of two numbers");
  node.position_x_m = j["position_m"][0].get<double>();
  node.position_y_m = j["position_m"][1].get<double>();
  node.wavelength_m = require_number(j, path, "wavelength_m");
  node.element_spacing_m = require_number(j, path, "element_spacing_m");
  node.element_count = require_int(j, path, "elements");
  node.pulse_count = require_int(j, path, "pulses");
  node.pri_s = require_number(j, path, "pri_s");
  node.bandwidth_hz = require_number(j, path, "bandwidth_hz");
  node.pulse_samples = require_int(j, path, "pulse_samples");
  node.rho_time = require_number(j, path, "rho_time");
  node.rho_space = require_number(j, path, "rho_space");
  node.alpha_sq = require_number(j, path, "alpha_sq");
  node.pfa = optional_number(j, path, "pfa", default_pfa);
  return node;
}

Scenario parse_scenario(const json& j) {
  Scenario s;
  if (!j.is_object()) throw ValidationError("", "scenario root must be an object");
  s.schema_version = j.contains("schema_version") ? j["schema_version"].get<int>() : 0;
  s.name = j.contains("name") ? j["name"].get<std::string>() : "";
  s.frames = require_int(j, "", "frames");
  s.update_interval_s = require_number(j, "", "update_interval_s");
  s.pfa = require_number(j, "", "pfa");
  s.j0_scale = optional_number(j, "", "j0_scale", 1e-10);
  s.epsilon_floor = optional_number(j, "", "epsilon_floor", 1e-8);
  s.xi = optional_number(j, "", "xi", 1e-3);
  s.max_outer_iterations =
      j.contains("max_outer_iterations") ? j["max_outer_iterations"].get<int>() : 500;
  s.seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : 1;

  if (!j.contains("zeta") || !j["zeta"].is_array())
    throw ValidationError("zeta", "must be an array of numbers");
  for (const auto& z : j["zeta"]) s.zeta.push_back(z.get<double>());

  if (!j.contains("target") || !j["target"].is_object())
    throw ValidationError("target", "missing object");
  const json& t = j["target"];
  if (!t.contains("position_m") || !t["position_m"].is_array() || t["position_m"].size() != 2)
    throw ValidationError("target.position_m", "must be an array of two numbers");
  if (!t.contains("velocity_mps") || !t["velocity_mps"].is_array() || t["velocity_mps"].size() != 2)
    throw ValidationError("target.velocity_mps", "must be an array of two numbers");
  s.initial_state.x = t["position_m"][0].get<double>();
  s.initial_state.y = t["position_m"][1].get<double>();
  s.initial_state.vx = t["velocity_mps"][0].get<double>();
  s.initial_state.vy = t["velocity_mps"][1].get<double>();

  if (!j.contains("nodes") || !j["nodes"].is_array())
    throw ValidationError("nodes", "must be an array of node objects");
  int idx = 0;
  for (const auto& jn : j["nodes"]) {
    s.nodes.push_back(parse_node(jn, "nodes[" + std::to_string(idx) + "].", s.pfa));
    ++idx;
  }

  if (j.contains("monte_carlo")) {
    const json& mc = j["monte_carlo"];
    MonteCarloBlock block;
    block.trials = require_int(mc, "monte_carlo.", "trials");
    const bool has_mean = mc.contains("exp_mean");
    const bool has_rate = mc.contains("exp_rate");
    if (has_mean && has_rate)
      throw ValidationError("monte_carlo", "give exp_mean or exp_rate, not both");
    if (has_mean)
      block.exp_mean = mc["exp_mean"].get<double>();
    else if (has_rate) {
      const double rate = mc["exp_rate"].get<double>();
      if (!(rate > 0.0)) throw ValidationError("monte_carlo.exp_rate", "must be positive");
      block.exp_mean = 1.0 / rate;
    }
    s.monte_carlo = block;
  }

  if (j.contains("robustness")) {
    const json& rb = j["robustness"];
    RobustnessBlock block;
    block.sigma_r_sq = require_number(rb, "robustness.", "sigma_r_sq");
    block.sigma_v_sq = require_number(rb, "robustness.", "sigma_v_sq");
    block.trials = require_int(rb, "robustness.", "trials");
    s.robustness = block;
  }

  s.validate();
  return s;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  if (path == "paper_sec4") return paper_sec4_scenario();

  std::ifstream in(path);
  if (!in) throw ScenarioIoError("cannot open scenario file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset to 1-based line/column.
    int line = 1, col = 1;
    const size_t stop = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
    for (size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(line, col, e.what());
  }
  try {
    return parse_scenario(j);
  } catch (const json::exception& e) {
    // A field with the wrong JSON type that slipped past the explicit checks.
    throw ValidationError("(root)", e.what());
  }
}

Scenario paper_sec4_scenario() {
  Scenario s;
  s.name = "paper_sec4";
  s.frames = 30;
  s.update_interval_s = 1.0;
  s.zeta = {0.01, 0.05, 0.1, 0.15};
  s.pfa = 1e-6;
  s.j0_scale = 1e-10;
  s.epsilon_floor = 1e-8;
  s.xi = 1e-3;
  s.max_outer_iterations = 500;
  s.seed = 20260801;

  s.initial_state = TargetState{30000.0, 80.0, 55000.0, 240.0};

  const double wavelength = kSpeedOfLight / 10.0e9;  // X band, 10 GHz carrier
  const double positions[4][2] = {{20000.0, 10000.0},
                                  {25000.0, 16000.0},
                                  {35000.0, 16000.0},
                                  {40000.0, 10000.0}};
  const double alpha[4] = {0.035, 0.099, 0.176, 0.051};
  for (int n = 0; n < 4; ++n) {
    RadarNodeModel node;
    node.position_x_m = positions[n][0];
    node.position_y_m = positions[n][1];
    node.wavelength_m = wavelength;
    node.element_spacing_m = wavelength / 2.0;
    node.element_count = 8;
    node.pulse_count = 8;
    node.pri_s = 250e-6;
    node.bandwidth_hz = 5e6;
    node.pulse_samples = 100;  // pulsewidth 10 us sampled at 1/(2B)
    node.rho_time = 0.8;
    node.rho_space = 0.8;
    node.alpha_sq = alpha[n];
    node.pfa = s.pfa;
    s.nodes.push_back(node);
  }

  s.monte_carlo = MonteCarloBlock{50, 0.5};
  s.robustness = RobustnessBlock{900.0, 56.25, 50};
  s.validate();
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  j["frames"] = s.frames;
  j["update_interval_s"] = s.update_interval_s;
  j["pfa"] = s.pfa;
  j["j0_scale"] = s.j0_scale;
  j["epsilon_floor"] = s.epsilon_floor;
  j["xi"] = s.xi;
  j["max_outer_iterations"] = s.max_outer_iterations;
  j["seed"] = s.seed;
  j["zeta"] = s.zeta;
  j["target"] = {{"position_m", {s.initial_state.x, s.initial_state.y}},
                 {"velocity_mps", {s.initial_state.vx, s.initial_state.vy}}};
  j["nodes"] = json::array();
  for (const auto& n : s.nodes) {
    j["nodes"].push_back({{"position_m", {n.position_x_m, n.position_y_m}},
                          {"wavelength_m", n.wavelength_m},
                          {"element_spacing_m", n.element_spacing_m},
                          {"elements", n.element_count},
                          {"pulses", n.pulse_count},
                          {"pri_s", n.pri_s},
                          {"bandwidth_hz", n.bandwidth_hz},
                          {"pulse_samples", n.pulse_samples},
                          {"rho_time", n.rho_time},
                          {"rho_space", n.rho_space},
                          {"alpha_sq", n.alpha_sq},
                          {"pfa", n.pfa}});
  }
  if (s.monte_carlo)
    j["monte_carlo"] = {{"trials", s.monte_carlo->trials}, {"exp_mean", s.monte_carlo->exp_mean}};
  if (s.robustness)
    j["robustness"] = {{"sigma_r_sq", s.robustness->sigma_r_sq},
                       {"sigma_v_sq", s.robustness->sigma_v_sq},
                       {"trials", s.robustness->trials}};
  return j.dump(2) + "\n";
}

}  // namespace radnet
