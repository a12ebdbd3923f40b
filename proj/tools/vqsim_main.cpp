#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vqsim/analyzer.hpp"
#include "vqsim/claims.hpp"
#include "vqsim/experiment.hpp"
#include "vqsim/text.hpp"
#include "vqsim/trace.hpp"

namespace {

using namespace vqsim;

std::vector<uint32_t> read_damaged_frames(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read damaged-frame list: " + path);
  }
  std::vector<uint32_t> frames;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = split_tokens(line);
    if (tokens.empty() || tokens[0].front() == '#') {
      continue;
    }
    frames.push_back(static_cast<uint32_t>(parse_int(tokens[0])));
  }
  return frames;
}

CoefficientSet select_coeffs(const std::string& selector) {
  const size_t comma = selector.find(',');
  if (comma == std::string::npos) {
    throw std::invalid_argument(
        "--coeffs expects 'codec,network' (e.g. DIVX,WIFI)");
  }
  return builtin_coefficients(parse_codec(selector.substr(0, comma)),
                              parse_network(selector.substr(comma + 1)));
}

int cmd_simulate(const std::string& config_path,
                 const std::optional<uint64_t>& seed,
                 const std::optional<std::string>& out_dir) {
  ExperimentConfig config = load_config(config_path);
  if (seed) {
    config.master_seed = *seed;
  }
  if (out_dir) {
    config.out_dir = *out_dir;
  }
  const ExperimentReport report = run_experiment(config);
  std::cout << summary_to_csv(report.summary);
  if (!config.out_dir.empty()) {
    std::cerr << "report files written to " << config.out_dir << "\n";
  }
  return 0;
}

int cmd_analyze(const std::string& trace_path,
                const std::optional<std::string>& frames_path,
                const std::string& coeffs_selector, double offset_ms,
                int window_packets, const std::string& format,
                const std::optional<std::string>& out_dir) {
  const Trace trace = load_trace(trace_path);
  AnalyzeOptions options;
  options.alignment = TimeAlignment{offset_ms};
  options.window_packets = window_packets;
  if (frames_path) {
    options.damaged_frames = read_damaged_frames(*frames_path);
  }
  const TraceAnalysis analysis =
      analyze_trace(trace, select_coeffs(coeffs_selector), options);

  const std::string report = format == "json"
                                 ? episodes_to_json(analysis.episodes)
                                 : episodes_to_csv(analysis.episodes);
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    const auto path = std::filesystem::path(*out_dir) /
                      (format == "json" ? "episodes.json" : "episodes.csv");
    std::ofstream out(path);
    out << report;
    std::cerr << "episode report written to " << path.string() << "\n";
  } else {
    std::cout << report;
  }
  std::cerr << "overall: loss " << format_double(analysis.overall_loss_percent)
            << "%, jitter " << format_double(analysis.overall_jitter_ms)
            << " ms, " << analysis.episodes.size() << " episode(s), "
            << analysis.gaps.size() << " gap(s)\n";
  return 0;
}

int cmd_verify_claims(uint64_t seed) {
  const auto checks = verify_claims(seed);
  return print_claims(checks, std::cout) == 0 ? 0 : 1;
}

int cmd_presets_list() {
  for (const std::string& name : preset_names()) {
    const ChannelProfile p = channel_preset(name);
    std::cout << name << ": loss " << format_double(p.loss.mean_loss_rate() * 100)
              << "%, base delay " << format_double(p.base_delay_ms)
              << " ms, jitter ";
    switch (p.jitter.kind) {
      case JitterModel::Kind::kNone:
        std::cout << "none";
        break;
      case JitterModel::Kind::kUniform:
        std::cout << "uniform ±" << format_double(p.jitter.half_width_ms)
                  << " ms";
        break;
      case JitterModel::Kind::kExponential:
        std::cout << "exponential mean " << format_double(p.jitter.mean_ms)
                  << " ms";
        break;
    }
    std::cout << ", dup prob " << format_double(p.dup_prob) << "\n";
  }
  return 0;
}

int cmd_coeffs_show() {
  std::cout << format_coefficient_table(builtin_coefficient_sets());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"key-frame-aware RTP streaming simulator and analyzer"};
  app.require_subcommand(1);

  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  app.add_option("--seed", seed, "override the master seed");
  app.add_option("--out-dir", out_dir, "output directory for report files");

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "run an experiment config");
  simulate->add_option("config", config_path, "JSON experiment config")
      ->required();

  std::string trace_path;
  std::optional<std::string> frames_path;
  std::string coeffs_selector = "DIVX,WIFI";
  std::string format = "csv";
  double offset_ms = 0.0;
  int window_packets = kDefaultWindowPackets;
  auto* analyze = app.add_subcommand("analyze", "analyze an .rtptrace capture");
  analyze->add_option("trace", trace_path, "capture file")->required();
  analyze->add_option("--frames", frames_path,
                      "externally observed damaged-frame list (one frame "
                      "index per line)");
  analyze->add_option("--coeffs", coeffs_selector,
                      "coefficient table as codec,network");
  analyze->add_option("--offset-ms", offset_ms,
                      "capture-clock minus display-clock offset");
  analyze->add_option("--window", window_packets,
                      "analysis window in packets (multiple of 100)");
  analyze->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  uint64_t claims_seed = 1;
  auto* verify = app.add_subcommand("verify-claims",
                                    "check the built-in claim list");
  verify->add_option("--seed", claims_seed, "simulation seed");

  auto* presets = app.add_subcommand("presets", "channel presets");
  auto* presets_list = presets->add_subcommand("list", "list built-in presets");
  presets->require_subcommand(1);

  auto* coeffs = app.add_subcommand("coeffs", "coefficient tables");
  auto* coeffs_show =
      coeffs->add_subcommand("show", "print the built-in tables");
  coeffs->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return cmd_simulate(config_path, seed, out_dir);
    }
    if (analyze->parsed()) {
      return cmd_analyze(trace_path, frames_path, coeffs_selector, offset_ms,
                         window_packets, format, out_dir);
    }
    if (verify->parsed()) {
      return cmd_verify_claims(claims_seed);
    }
    if (presets_list->parsed()) {
      return cmd_presets_list();
    }
    if (coeffs_show->parsed()) {
      return cmd_coeffs_show();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
