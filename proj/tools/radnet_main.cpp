// radnet CLI: batch driver for slow-time code design campaigns.
//
// Subcommands:
//   run               single campaign at one similarity level
//   sweep             campaigns over the scenario's zeta list
//   mc                Monte-Carlo study over target-power draws
//   robust            mismatched-state robustness study
//   check             scenario-level invariant battery
//   scenario validate parse and validate a scenario file
//
// Exit codes: 0 success, 1 usage error, 2 scenario validation failure,
// 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "radnet/campaign.hpp"
#include "radnet/emit.hpp"
#include "radnet/errors.hpp"

#include "json.hpp"

namespace {

struct CliOptions {
  std::string scenario_path;
  std::vector<double> zeta;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = ".";
  std::string format = "csv";
  int threads = 1;
  int frames = 0;
  bool reference_only = false;
};

void print_usage(std::ostream& os) {
  os << "usage: radnet <run|sweep|mc|robust|check> [options]\n"
        "       radnet scenario validate --scenario <path>\n"
        "options:\n"
        "  --scenario <path>   scenario file (or the bundled name 'paper_sec4')\n"
        "  --zeta <list>       comma-separated similarity levels (overrides scenario)\n"
        "  --seed <u64>        RNG seed (overrides scenario)\n"
        "  --out <dir>         output directory (default .)\n"
        "  --format csv|json   output encoding (default csv)\n"
        "  --threads <n>       worker threads for mc/robust (default 1)\n"
        "  --frames <k>        frame-count override\n"
        "  --reference-only    run: hold the reference code instead of designing\n";
}

std::vector<double> parse_zeta_list(const std::string& text) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(std::stod(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

bool parse_options(int argc, char** argv, int start, CliOptions& opts) {
  for (int i = start; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&](const char* name) -> std::string {
      if (i + 1 >= argc) throw std::runtime_error(std::string("missing value for ") + name);
      return argv[++i];
    };
    if (arg == "--scenario")
      opts.scenario_path = next("--scenario");
    else if (arg == "--zeta")
      opts.zeta = parse_zeta_list(next("--zeta"));
    else if (arg == "--seed") {
      opts.seed = std::stoull(next("--seed"));
      opts.seed_given = true;
    } else if (arg == "--out")
      opts.out_dir = next("--out");
    else if (arg == "--format")
      opts.format = next("--format");
    else if (arg == "--threads")
      opts.threads = std::stoi(next("--threads"));
    else if (arg == "--frames")
      opts.frames = std::stoi(next("--frames"));
    else if (arg == "--reference-only")
      opts.reference_only = true;
    else if (arg == "--help" || arg == "-h") {
      print_usage(std::cout);
      return false;
    } else
      throw std::runtime_error("unknown option: " + arg);
  }
  if (opts.format != "csv" && opts.format != "json")
    throw std::runtime_error("--format must be csv or json");
  if (opts.scenario_path.empty()) throw std::runtime_error("--scenario is required");
  return true;
}

radnet::Scenario load(const CliOptions& opts) {
  radnet::Scenario s = radnet::load_scenario(opts.scenario_path);
  if (opts.seed_given) s.seed = opts.seed;
  if (!opts.zeta.empty()) {
    s.zeta = opts.zeta;
    s.validate();
  }
  if (opts.frames > 0) {
    s.frames = opts.frames;
    s.validate();
  }
  return s;
}

std::string output_path(const CliOptions& opts, const std::string& stem) {
  std::filesystem::create_directories(opts.out_dir);
  return (std::filesystem::path(opts.out_dir) / (stem + "." + opts.format)).string();
}

void write_records(const CliOptions& opts, const std::string& stem,
                   const std::vector<radnet::FrameRecord>& records, int node_count) {
  const std::string path = output_path(opts, stem);
  const std::string text = opts.format == "csv"
                               ? radnet::records_to_csv(records, node_count)
                               : radnet::records_to_json(records, node_count);
  radnet::write_text_file(path, text);
  std::cout << "wrote " << path << " (" << records.size() << " rows)\n";
}

int cmd_run(const CliOptions& opts) {
  const radnet::Scenario s = load(opts);
  const double zeta = s.zeta.front();
  radnet::CampaignOptions campaign;
  campaign.design = !opts.reference_only;
  const auto records = radnet::run_campaign(s, zeta, campaign);
  write_records(opts, "run", records, static_cast<int>(s.nodes.size()));
  std::cout << "zeta " << radnet::format_double(zeta) << ", frame " << records.back().frame
            << " pcrlb trace " << radnet::format_double(records.back().pcrlb_trace) << "\n";
  return 0;
}

int cmd_sweep(const CliOptions& opts) {
  const radnet::Scenario s = load(opts);
  std::vector<radnet::FrameRecord> all;
  for (double z : s.zeta) {
    const auto part = radnet::run_campaign(s, z);
    all.insert(all.end(), part.begin(), part.end());
  }
  write_records(opts, "sweep", all, static_cast<int>(s.nodes.size()));
  return 0;
}

int cmd_mc(const CliOptions& opts) {
  const radnet::Scenario s = load(opts);
  const auto result = radnet::run_monte_carlo(s, opts.threads);
  write_records(opts, "mc", result.averaged, static_cast<int>(s.nodes.size()));
  std::cout << result.trials << " trials averaged\n";
  return 0;
}

int cmd_robust(const CliOptions& opts) {
  const radnet::Scenario s = load(opts);
  const auto rows = radnet::run_robustness(s, opts.threads);
  const std::string path = output_path(opts, "robust");
  if (opts.format == "csv") {
    radnet::write_text_file(path, radnet::robustness_to_csv(rows));
  } else {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& row : rows)
      doc.push_back({{"frame", row.frame},
                     {"zeta", row.zeta},
                     {"pcrlb_mean", row.pcrlb_mean},
                     {"pcrlb_min", row.pcrlb_min},
                     {"pcrlb_max", row.pcrlb_max},
                     {"pcrlb_reference", row.pcrlb_reference}});
    radnet::write_text_file(path, doc.dump(2) + "\n");
  }
  std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_check(const CliOptions& opts) {
  const radnet::Scenario s = load(opts);
  const bool ok = radnet::run_scenario_checks(s, std::cout);
  if (!ok) {
    std::cerr << "scenario checks failed\n";
    return 3;
  }
  return 0;
}

int cmd_scenario_validate(const CliOptions& opts) {
  const radnet::Scenario s = radnet::load_scenario(opts.scenario_path);
  std::cout << "scenario '" << s.name << "' is valid: " << s.nodes.size() << " nodes, "
            << s.frames << " frames, " << s.zeta.size() << " zeta values\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    print_usage(std::cerr);
    return 1;
  }
  const std::string command = argv[1];

  CliOptions opts;
  int opt_start = 2;
  bool validate_subcommand = false;
  if (command == "scenario") {
    if (argc < 3 || std::string(argv[2]) != "validate") {
      print_usage(std::cerr);
      return 1;
    }
    validate_subcommand = true;
    opt_start = 3;
  }

  try {
    if (!parse_options(argc, argv, opt_start, opts)) return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    print_usage(std::cerr);
    return 1;
  }

  try {
    if (validate_subcommand) return cmd_scenario_validate(opts);
    if (command == "run") return cmd_run(opts);
    if (command == "sweep") return cmd_sweep(opts);
    if (command == "mc") return cmd_mc(opts);
    if (command == "robust") return cmd_robust(opts);
    if (command == "check") return cmd_check(opts);
    std::cerr << "error: unknown command '" << command << "'\n";
    print_usage(std::cerr);
    return 1;
  } catch (const radnet::ParseError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const radnet::ValidationError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const radnet::ScenarioIoError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
