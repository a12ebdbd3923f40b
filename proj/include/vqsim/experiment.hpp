#ifndef VQSIM_EXPERIMENT_HPP_
#define VQSIM_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vqsim/analyzer.hpp"
#include "vqsim/media.hpp"
#include "vqsim/netsim.hpp"
#include "vqsim/quality.hpp"
#include "vqsim/rtp.hpp"

namespace vqsim {

struct ExperimentConfig {
  StreamProfile stream;
  ChannelProfile channel;
  std::string channel_preset;  // informational; empty for inline channels
  std::vector<DuplicationPolicy> policies = {DuplicationPolicy::kKeyFramesOnly};
  Codec coeffs_codec = Codec::kDivx;
  Network coeffs_network = Network::kWifi;
  std::optional<std::string> coeffs_file;
  // Sweep axes: configured loss (percent) and jitter parameter (ms). Both
  // non-empty; a single point reproduces the channel as configured.
  std::vector<double> sweep_loss_percent;
  std::vector<double> sweep_jitter_ms;
  // False when the axes were defaulted from the channel's nominal values;
  // the channel then runs exactly as configured instead of being rebuilt
  // from the sweep point.
  bool sweep_explicit = true;
  int runs = 30;
  uint64_t master_seed = 1;
  uint32_t mtu_payload = kDefaultMtuPayload;
  double playout_deadline_ms = kDefaultPlayoutDeadlineMs;
  int window_packets = kDefaultWindowPackets;
  std::string out_dir;       // empty: write nothing
  bool write_traces = true;  // per-run .rtptrace files under out_dir

  void validate() const;
};

// Parses the JSON config documented in the README. Unknown keys rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct RunRecord {
  int point_index = 0;
  int run_index = 0;
  DuplicationPolicy policy = DuplicationPolicy::kNone;
  uint64_t seed = 0;
  double mean_mos = 0.0;  // mean over episodes; q_ideal when undamaged
  double loss_percent = 0.0;
  double jitter_ms = 0.0;
  double overhead_percent = 0.0;
  int episode_count = 0;
};

struct PointSummary {
  int point_index = 0;
  double cfg_loss_percent = 0.0;
  double cfg_jitter_ms = 0.0;
  DuplicationPolicy policy = DuplicationPolicy::kNone;
  int runs = 0;
  double mean_mos = 0.0;
  double std_mos = 0.0;
  double mean_loss_percent = 0.0;
  double mean_jitter_ms = 0.0;
  double overhead_percent = 0.0;
  double mean_episodes = 0.0;
};

struct ExperimentReport {
  std::vector<RunRecord> runs;
  std::vector<PointSummary> summary;
};

// Full pipeline per sweep point and run: generate, packetize, duplicate,
// transmit, write the capture, analyze it back. Run seeds derive from
// (master, point, run), so points and runs are independent and the report is
// a pure function of the config.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::string summary_to_csv(std::span<const PointSummary> summary);
std::string runs_to_csv(std::span<const RunRecord> runs);

// summary.csv, runs.csv and an SVG chart of MOS vs. loss (one polyline per
// jitter level and policy) under config.out_dir.
void write_report_files(const ExperimentReport& report,
                        const ExperimentConfig& config);

std::string mos_vs_loss_svg(const ExperimentReport& report);

}  // namespace vqsim

#endif  // VQSIM_EXPERIMENT_HPP_
