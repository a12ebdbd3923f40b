#include "vqsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vqsim/rng.hpp"
#include "vqsim/text.hpp"

namespace vqsim {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, std::string_view where,
                         std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "' in " +
                                  std::string(where));
    }
  }
}

StreamProfile parse_stream(const json& node) {
  reject_unknown_keys(node, "stream",
                      {"fps", "bitrate_bps", "key_interval_s", "key_size_ratio",
                       "duration_s", "codec", "recommended"});
  StreamProfile profile = default_profile();
  if (node.contains("fps")) profile.fps = node.at("fps").get<double>();
  if (node.contains("bitrate_bps"))
    profile.bitrate_bps = node.at("bitrate_bps").get<uint64_t>();
  if (node.contains("key_interval_s"))
    profile.key_interval_s = node.at("key_interval_s").get<double>();
  if (node.contains("key_size_ratio"))
    profile.key_size_ratio = node.at("key_size_ratio").get<double>();
  if (node.contains("duration_s"))
    profile.duration_s = node.at("duration_s").get<double>();
  if (node.contains("codec"))
    profile.codec = parse_codec(node.at("codec").get<std::string>());
  if (node.contains("recommended"))
    profile.recommended = node.at("recommended").get<bool>();
  return profile;
}

ChannelProfile parse_channel_object(const json& node) {
  reject_unknown_keys(node, "channel",
                      {"loss", "base_delay_ms", "jitter", "dup_prob"});
  ChannelProfile channel;
  if (node.contains("loss")) {
    const json& loss = node.at("loss");
    reject_unknown_keys(loss, "channel.loss",
                        {"model", "p", "p_good_to_bad", "p_bad_to_good",
                         "loss_in_bad"});
    const std::string model = to_lower(loss.at("model").get<std::string>());
    if (model == "iid") {
      channel.loss = LossModel::iid(loss.at("p").get<double>());
    } else if (model == "gilbert_elliott" || model == "gilbert-elliott") {
      channel.loss = LossModel::gilbert_elliott(
          loss.at("p_good_to_bad").get<double>(),
          loss.at("p_bad_to_good").get<double>(),
          loss.at("loss_in_bad").get<double>());
    } else {
      throw std::invalid_argument("config: unknown loss model '" + model + "'");
    }
  }
  if (node.contains("base_delay_ms"))
    channel.base_delay_ms = node.at("base_delay_ms").get<double>();
  if (node.contains("jitter")) {
    const json& jitter = node.at("jitter");
    reject_unknown_keys(jitter, "channel.jitter",
                        {"model", "half_width_ms", "mean_ms"});
    const std::string model = to_lower(jitter.at("model").get<std::string>());
    if (model == "none") {
      channel.jitter = JitterModel::none();
    } else if (model == "uniform") {
      channel.jitter =
          JitterModel::uniform(jitter.at("half_width_ms").get<double>());
    } else if (model == "exponential") {
      channel.jitter =
          JitterModel::exponential(jitter.at("mean_ms").get<double>());
    } else {
      throw std::invalid_argument("config: unknown jitter model '" + model +
                                  "'");
    }
  }
  if (node.contains("dup_prob"))
    channel.dup_prob = node.at("dup_prob").get<double>();
  return channel;
}

double nominal_jitter_param(const JitterModel& jitter) {
  switch (jitter.kind) {
    case JitterModel::Kind::kNone:
      return 0.0;
    case JitterModel::Kind::kUniform:
      return jitter.half_width_ms;
    case JitterModel::Kind::kExponential:
      return jitter.mean_ms;
  }
  return 0.0;
}

// Sweep points override the configured loss with an IID rate and reparameterize
// the configured jitter family (exponential when the base had none).
ChannelProfile channel_at_point(const ChannelProfile& base, double loss_percent,
                                double jitter_ms) {
  ChannelProfile channel = base;
  channel.loss = LossModel::iid(loss_percent / 100.0);
  if (jitter_ms <= 0.0) {
    channel.jitter = JitterModel::none();
  } else if (base.jitter.kind == JitterModel::Kind::kUniform) {
    channel.jitter = JitterModel::uniform(jitter_ms);
  } else {
    channel.jitter = JitterModel::exponential(jitter_ms);
  }
  return channel;
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  return sum / static_cast<double>(values.size());
}

double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) {
    return 0.0;
  }
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace

void ExperimentConfig::validate() const {
  stream.validate();
  channel.validate();
  if (policies.empty()) {
    throw std::invalid_argument("config: at least one duplication policy");
  }
  if (sweep_loss_percent.empty() || sweep_jitter_ms.empty()) {
    throw std::invalid_argument("config: sweep axes must be non-empty");
  }
  for (double p : sweep_loss_percent) {
    if (!(p >= 0.0 && p <= 100.0)) {
      throw std::invalid_argument("config: sweep loss must be in [0, 100]");
    }
  }
  for (double j : sweep_jitter_ms) {
    if (!(j >= 0.0)) {
      throw std::invalid_argument("config: sweep jitter must be nonnegative");
    }
  }
  if (runs < 1) {
    throw std::invalid_argument("config: runs must be >= 1");
  }
  if (mtu_payload < 1) {
    throw std::invalid_argument("config: mtu_payload must be >= 1");
  }
  if (window_packets <= 0 || window_packets % 100 != 0) {
    throw std::invalid_argument(
        "config: window_packets must be a positive multiple of 100");
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root = json::parse(json_text);
  reject_unknown_keys(root, "config",
                      {"stream", "channel", "policy", "policies", "coeffs",
                       "coeffs_file", "sweep", "runs", "seed", "mtu_payload",
                       "playout_deadline_ms", "window_packets", "out_dir",
                       "write_traces"});
  ExperimentConfig config;
  if (root.contains("stream")) {
    config.stream = parse_stream(root.at("stream"));
  }
  if (root.contains("channel")) {
    const json& channel = root.at("channel");
    if (channel.is_string()) {
      config.channel_preset = channel.get<std::string>();
      config.channel = channel_preset(config.channel_preset);
    } else {
      config.channel = parse_channel_object(channel);
    }
  }
  if (root.contains("policies")) {
    config.policies.clear();
    for (const json& p : root.at("policies")) {
      config.policies.push_back(parse_policy(p.get<std::string>()));
    }
  } else if (root.contains("policy")) {
    config.policies = {parse_policy(root.at("policy").get<std::string>())};
  }
  // Coefficient table: explicit selector, else the stream codec on the
  // network the preset mimics (3G for "3g-noisy", WiFi otherwise).
  config.coeffs_codec = config.stream.codec;
  config.coeffs_network = config.channel_preset == "3g-noisy"
                              ? Network::kThreeG
                              : Network::kWifi;
  if (root.contains("coeffs")) {
    const json& coeffs = root.at("coeffs");
    reject_unknown_keys(coeffs, "coeffs", {"codec", "network"});
    if (coeffs.contains("codec")) {
      config.coeffs_codec = parse_codec(coeffs.at("codec").get<std::string>());
    }
    if (coeffs.contains("network")) {
      config.coeffs_network =
          parse_network(coeffs.at("network").get<std::string>());
    }
  }
  if (root.contains("coeffs_file")) {
    config.coeffs_file = root.at("coeffs_file").get<std::string>();
  }
  if (root.contains("sweep")) {
    const json& sweep = root.at("sweep");
    reject_unknown_keys(sweep, "sweep", {"loss_percent", "jitter_ms"});
    config.sweep_loss_percent =
        sweep.at("loss_percent").get<std::vector<double>>();
    config.sweep_jitter_ms = sweep.at("jitter_ms").get<std::vector<double>>();
    config.sweep_explicit = true;
  } else {
    config.sweep_loss_percent = {config.channel.loss.mean_loss_rate() * 100.0};
    config.sweep_jitter_ms = {nominal_jitter_param(config.channel.jitter)};
    config.sweep_explicit = false;
  }
  if (root.contains("runs")) config.runs = root.at("runs").get<int>();
  if (root.contains("seed")) config.master_seed = root.at("seed").get<uint64_t>();
  if (root.contains("mtu_payload"))
    config.mtu_payload = root.at("mtu_payload").get<uint32_t>();
  if (root.contains("playout_deadline_ms"))
    config.playout_deadline_ms = root.at("playout_deadline_ms").get<double>();
  if (root.contains("window_packets"))
    config.window_packets = root.at("window_packets").get<int>();
  if (root.contains("out_dir")) config.out_dir = root.at("out_dir").get<std::string>();
  if (root.contains("write_traces"))
    config.write_traces = root.at("write_traces").get<bool>();
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read config: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  CoefficientSet coeffs =
      builtin_coefficients(config.coeffs_codec, config.coeffs_network);
  if (config.coeffs_file) {
    std::ifstream in(*config.coeffs_file);
    if (!in) {
      throw std::runtime_error("cannot read coefficient table: " +
                               *config.coeffs_file);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    bool found = false;
    for (const CoefficientSet& set : parse_coefficient_table(buffer.str())) {
      if (set.codec == config.coeffs_codec &&
          set.network == config.coeffs_network) {
        coeffs = set;
        found = true;
      }
    }
    if (!found) {
      throw std::runtime_error(
          "coefficient table has no entry for the selected codec/network");
    }
  }

  const bool writing = !config.out_dir.empty();
  if (writing) {
    std::filesystem::create_directories(config.out_dir);
  }

  const auto frames = generate_stream(config.stream);
  const auto base_packets = packetize(frames, config.mtu_payload);

  ExperimentReport report;
  for (DuplicationPolicy policy : config.policies) {
    const auto packets = apply_duplication(base_packets, policy);
    const double overhead_percent =
        100.0 * byte_overhead(base_packets, packets);
    const auto sent = send_at_pts(packets);

    int point_index = 0;
    for (double loss_percent : config.sweep_loss_percent) {
      for (double jitter_ms : config.sweep_jitter_ms) {
        const ChannelProfile point_channel =
            config.sweep_explicit
                ? channel_at_point(config.channel, loss_percent, jitter_ms)
                : config.channel;

        std::vector<double> mos, loss, jitter, episodes;
        for (int run = 0; run < config.runs; ++run) {
          ChannelProfile channel = point_channel;
          channel.seed = derive_seed(config.master_seed,
                                     static_cast<uint64_t>(point_index),
                                     static_cast<uint64_t>(run));
          const auto arrivals = transmit(sent, channel);
          Trace trace = make_trace(config.stream.fps, config.mtu_payload,
                                   config.playout_deadline_ms, sent, arrivals);
          if (writing && config.write_traces) {
            std::ostringstream name;
            name << "trace_p" << point_index << '_'
                 << policy_token(policy) << "_r" << run << ".rtptrace";
            save_trace(trace, (std::filesystem::path(config.out_dir) /
                               name.str()).string());
          }
          AnalyzeOptions options;
          options.window_packets = config.window_packets;
          const TraceAnalysis analysis = analyze_trace(trace, coeffs, options);

          std::vector<double> episode_mos;
          for (const DistortionEpisode& ep : analysis.episodes) {
            if (ep.predicted_mos) {
              episode_mos.push_back(*ep.predicted_mos);
            }
          }
          const double run_mos = episode_mos.empty() ? coeffs.q_ideal.value
                                                     : mean_of(episode_mos);
          report.runs.push_back(RunRecord{
              point_index, run, policy, channel.seed, run_mos,
              analysis.overall_loss_percent, analysis.overall_jitter_ms,
              overhead_percent, static_cast<int>(analysis.episodes.size())});
          mos.push_back(run_mos);
          loss.push_back(analysis.overall_loss_percent);
          jitter.push_back(analysis.overall_jitter_ms);
          episodes.push_back(static_cast<double>(analysis.episodes.size()));
        }

        PointSummary summary;
        summary.point_index = point_index;
        summary.cfg_loss_percent = loss_percent;
        summary.cfg_jitter_ms = jitter_ms;
        summary.policy = policy;
        summary.runs = config.runs;
        summary.mean_mos = mean_of(mos);
        summary.std_mos = sample_std(mos, summary.mean_mos);
        summary.mean_loss_percent = mean_of(loss);
        summary.mean_jitter_ms = mean_of(jitter);
        summary.overhead_percent = overhead_percent;
        summary.mean_episodes = mean_of(episodes);
        report.summary.push_back(summary);
        ++point_index;
      }
    }
  }

  if (writing) {
    write_report_files(report, config);
  }
  return report;
}

std::string summary_to_csv(std::span<const PointSummary> summary) {
  std::ostringstream out;
  out << "point,loss_cfg_percent,jitter_cfg_ms,policy,runs,mean_mos,std_mos,"
         "mean_loss_percent,mean_jitter_ms,overhead_percent,mean_episodes\n";
  for (const PointSummary& s : summary) {
    out << s.point_index << ',' << format_double(s.cfg_loss_percent) << ','
        << format_double(s.cfg_jitter_ms) << ',' << policy_token(s.policy)
        << ',' << s.runs << ',' << format_double(s.mean_mos) << ','
        << format_double(s.std_mos) << ',' << format_double(s.mean_loss_percent)
        << ',' << format_double(s.mean_jitter_ms) << ','
        << format_double(s.overhead_percent) << ','
        << format_double(s.mean_episodes) << '\n';
  }
  return out.str();
}

std::string runs_to_csv(std::span<const RunRecord> runs) {
  std::ostringstream out;
  out << "point,run,policy,seed,mos,loss_percent,jitter_ms,overhead_percent,"
         "episodes\n";
  for (const RunRecord& r : runs) {
    out << r.point_index << ',' << r.run_index << ',' << policy_token(r.policy)
        << ',' << r.seed << ',' << format_double(r.mean_mos) << ','
        << format_double(r.loss_percent) << ',' << format_double(r.jitter_ms)
        << ',' << format_double(r.overhead_percent) << ',' << r.episode_count
        << '\n';
  }
  return out.str();
}

void write_report_files(const ExperimentReport& report,
                        const ExperimentConfig& config) {
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  const auto write = [&](const char* name, const std::string& content) {
    std::ofstream out(dir / name);
    if (!out) {
      throw std::runtime_error(std::string("cannot write ") + name);
    }
    out << content;
  };
  write("summary.csv", summary_to_csv(report.summary));
  write("runs.csv", runs_to_csv(report.runs));
  write("mos_vs_loss.svg", mos_vs_loss_svg(report));
}

namespace {

struct Series {
  double jitter_ms;
  DuplicationPolicy policy;
  std::vector<std::pair<double, double>> points;  // (loss %, mean MOS)
};

}  // namespace

std::string mos_vs_loss_svg(const ExperimentReport& report) {
  constexpr int kWidth = 640, kHeight = 420;
  constexpr int kLeft = 60, kRight = 20, kTop = 30, kBottom = 50;
  constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                     "#9467bd", "#ff7f0e", "#8c564b"};

  std::vector<Series> series;
  double max_loss = 0.0;
  for (const PointSummary& s : report.summary) {
    auto it = std::find_if(series.begin(), series.end(), [&](const Series& x) {
      return x.jitter_ms == s.cfg_jitter_ms && x.policy == s.policy;
    });
    if (it == series.end()) {
      series.push_back(Series{s.cfg_jitter_ms, s.policy, {}});
      it = series.end() - 1;
    }
    it->points.emplace_back(s.cfg_loss_percent, s.mean_mos);
    max_loss = std::max(max_loss, s.cfg_loss_percent);
  }
  if (max_loss <= 0.0) {
    max_loss = 1.0;
  }
  for (Series& s : series) {
    std::sort(s.points.begin(), s.points.end());
  }

  const auto x_of = [&](double loss) {
    return kLeft + (loss / max_loss) * (kWidth - kLeft - kRight);
  };
  const auto y_of = [&](double mos) {
    return kTop + (5.0 - mos) / 4.0 * (kHeight - kTop - kBottom);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Axes with a horizontal gridline per MOS point.
  for (int m = 1; m <= 5; ++m) {
    const double y = y_of(m);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << y
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << kLeft - 28 << "\" y=\"" << y + 4
        << "\" font-size=\"12\">" << m << "</text>\n";
  }
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << y_of(1) << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << y_of(1)
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << y_of(1) << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (kWidth / 2 - 40) << "\" y=\"" << kHeight - 12
      << "\" font-size=\"12\">packet loss, %</text>\n";
  svg << "<text x=\"12\" y=\"" << kTop - 10
      << "\" font-size=\"12\">mean MOS</text>\n";

  int color = 0;
  int legend_y = kTop + 8;
  for (const Series& s : series) {
    const char* stroke = kColors[color % 6];
    svg << "<polyline fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [loss, mos] : s.points) {
      svg << x_of(loss) << ',' << y_of(mos) << ' ';
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << kWidth - 220 << "\" y=\"" << legend_y
        << "\" font-size=\"11\" fill=\"" << stroke << "\">jitter "
        << format_double(s.jitter_ms) << " ms, " << policy_token(s.policy)
        << "</text>\n";
    legend_y += 14;
    ++color;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace vqsim
