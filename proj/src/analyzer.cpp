#include "vqsim/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "vqsim/text.hpp"

namespace vqsim {

namespace {

constexpr uint32_t kSeqSpace = 1 << 16;
constexpr uint32_t kSeqHalf = 1 << 15;

uint64_t triple_key(uint16_t seq, uint32_t frame, uint32_t fragment) {
  return (static_cast<uint64_t>(seq) << 48) ^
         (static_cast<uint64_t>(frame) << 20) ^ fragment;
}

// First arrival per sequence number, arrival order preserved. Network-side
// duplicates collapse here; sender-side redundant copies keep their own seq.
std::vector<TraceRecord> distinct_received(const Trace& trace) {
  std::vector<TraceRecord> out;
  std::unordered_set<uint16_t> seen;
  for (const TraceRecord& r : trace.records) {
    if (r.direction == Direction::kReceived && seen.insert(r.seq).second) {
      out.push_back(r);
    }
  }
  return out;
}

struct SentIndex {
  std::vector<TraceRecord> records;              // emission order
  std::unordered_map<uint16_t, size_t> by_seq;   // first emission wins
  std::unordered_map<uint64_t, size_t> by_triple;
};

SentIndex index_sent(const Trace& trace) {
  SentIndex index;
  for (const TraceRecord& r : trace.records) {
    if (r.direction != Direction::kSent) {
      continue;
    }
    index.by_seq.try_emplace(r.seq, index.records.size());
    index.by_triple.try_emplace(
        triple_key(r.seq, r.frame_index, r.fragment_index),
        index.records.size());
    index.records.push_back(r);
  }
  return index;
}

}  // namespace

TimeAlignment align(uint16_t /*packet_seq*/, double packet_time_ms,
                    uint32_t /*frame_index*/, int64_t frame_pts_ms) {
  return TimeAlignment{packet_time_ms - static_cast<double>(frame_pts_ms)};
}

std::vector<SeqGap> find_losses(const Trace& trace) {
  const SentIndex sent = index_sent(trace);
  std::vector<SeqGap> gaps;
  bool have_prev = false;
  uint16_t prev_seq = 0;
  for (const TraceRecord& r : distinct_received(trace)) {
    if (have_prev) {
      const uint32_t diff = (r.seq - prev_seq) & (kSeqSpace - 1);
      if (diff == 0 || diff >= kSeqHalf) {
        // Same or older seq: a late reordered packet, not a new gap.
        continue;
      }
      if (diff > 1) {
        SeqGap gap;
        gap.first_missing_seq = static_cast<uint16_t>(prev_seq + 1);
        gap.length = static_cast<int>(diff - 1);
        for (uint32_t k = 0; k < diff - 1; ++k) {
          const auto missing = static_cast<uint16_t>(prev_seq + 1 + k);
          auto it = sent.by_seq.find(missing);
          if (it != sent.by_seq.end() && sent.records[it->second].is_key) {
            gap.is_key_gap = true;
            break;
          }
        }
        gaps.push_back(gap);
      }
    }
    prev_seq = r.seq;
    have_prev = true;
  }
  return gaps;
}

std::vector<WindowStats> windowed_stats(const Trace& trace,
                                        int window_packets) {
  if (window_packets <= 0 || window_packets % 100 != 0) {
    throw std::invalid_argument(
        "windowed_stats: window must be a positive multiple of 100");
  }
  const SentIndex sent = index_sent(trace);
  const size_t expected_total = sent.records.size();
  if (expected_total == 0) {
    return {};
  }

  // Arrivals joined back to their emission ordinal, earliest arrival first.
  struct Joined {
    size_t ordinal;
    double transit_ms;
  };
  std::vector<Joined> joined;
  std::unordered_set<uint64_t> seen;
  for (const TraceRecord& r : trace.records) {
    if (r.direction != Direction::kReceived) {
      continue;
    }
    const uint64_t key = triple_key(r.seq, r.frame_index, r.fragment_index);
    auto it = sent.by_triple.find(key);
    if (it == sent.by_triple.end() || !seen.insert(key).second) {
      continue;
    }
    joined.push_back(
        Joined{it->second, r.time_ms - sent.records[it->second].time_ms});
  }

  const auto window_count =
      (expected_total + window_packets - 1) / static_cast<size_t>(window_packets);
  std::vector<WindowStats> windows(window_count);
  for (size_t w = 0; w < window_count; ++w) {
    windows[w].first_packet_ordinal = w * window_packets;
    windows[w].expected = static_cast<int>(
        std::min(expected_total - w * window_packets,
                 static_cast<size_t>(window_packets)));
  }
  std::vector<JitterEstimator> estimators(window_count);
  for (const Joined& j : joined) {
    const size_t w = j.ordinal / static_cast<size_t>(window_packets);
    ++windows[w].received;
    estimators[w].update(j.transit_ms);
  }
  for (size_t w = 0; w < window_count; ++w) {
    windows[w].loss_percent = 100.0 *
                              static_cast<double>(windows[w].expected -
                                                  windows[w].received) /
                              static_cast<double>(windows[w].expected);
    windows[w].jitter_ms = estimators[w].value();
  }
  return windows;
}

std::vector<DistortionEpisode> detect_episodes(
    std::span<const FrameVerdict> verdicts,
    std::span<const FrameDescriptor> frames, const Trace& trace,
    const TimeAlignment& alignment, const CoefficientSet& coeffs,
    int window_packets) {
  std::unordered_map<uint32_t, int64_t> pts;
  pts.reserve(frames.size());
  for (const FrameDescriptor& f : frames) {
    pts.emplace(f.index, f.pts_ms);
  }

  const SentIndex sent = index_sent(trace);
  const std::vector<WindowStats> windows = windowed_stats(trace, window_packets);
  const std::vector<SeqGap> gaps = find_losses(trace);

  // Send times in emission order for the time -> window lookup.
  std::vector<double> send_times;
  send_times.reserve(sent.records.size());
  for (const TraceRecord& r : sent.records) {
    send_times.push_back(r.time_ms);
  }

  std::vector<DistortionEpisode> episodes;
  size_t i = 0;
  while (i < verdicts.size()) {
    if (!verdicts[i].displayed_damaged) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < verdicts.size() && verdicts[j + 1].displayed_damaged) {
      ++j;
    }
    DistortionEpisode ep;
    ep.first_frame = verdicts[i].frame_index;
    ep.last_frame = verdicts[j].frame_index;
    ep.duration_frames = ep.last_frame - ep.first_frame + 1;
    auto first_pts = pts.find(ep.first_frame);
    auto last_pts = pts.find(ep.last_frame);
    if (first_pts == pts.end() || last_pts == pts.end()) {
      throw std::invalid_argument(
          "detect_episodes: verdict frame missing from the frame timeline");
    }
    ep.duration_ms = last_pts->second - first_pts->second;

    // The stream position when the damage started, on the capture clock.
    const double t0 = alignment.display_to_trace(
        static_cast<double>(first_pts->second));
    auto upper = std::upper_bound(send_times.begin(), send_times.end(), t0);
    if (upper == send_times.begin()) {
      ep.stats_missing = true;
    } else {
      const size_t ordinal = static_cast<size_t>(upper - send_times.begin()) - 1;
      const size_t w = ordinal / static_cast<size_t>(window_packets);
      ep.window_loss_percent = windows[w].loss_percent;
      ep.window_jitter_ms = windows[w].jitter_ms;
    }

    for (const SeqGap& gap : gaps) {
      if (ep.key_frame_hit) {
        break;
      }
      for (int k = 0; k < gap.length; ++k) {
        const auto missing = static_cast<uint16_t>(gap.first_missing_seq + k);
        auto it = sent.by_seq.find(missing);
        if (it == sent.by_seq.end()) {
          continue;
        }
        const TraceRecord& rec = sent.records[it->second];
        if (rec.is_key && rec.frame_index >= ep.first_frame &&
            rec.frame_index <= ep.last_frame) {
          ep.key_frame_hit = true;
          break;
        }
      }
    }

    if (!ep.stats_missing) {
      ep.predicted_mos = predict_mos(
          NetworkSample{*ep.window_loss_percent, *ep.window_jitter_ms,
                        ep.key_frame_hit},
          coeffs);
    }
    episodes.push_back(ep);
    i = j + 1;
  }
  return episodes;
}

std::string episodes_to_csv(std::span<const DistortionEpisode> episodes) {
  std::ostringstream out;
  out << "first_frame,last_frame,duration_frames,duration_ms,loss_percent,"
         "jitter_ms,key_frame_hit,predicted_mos\n";
  for (const DistortionEpisode& ep : episodes) {
    out << ep.first_frame << ',' << ep.last_frame << ',' << ep.duration_frames
        << ',' << ep.duration_ms << ',';
    if (ep.window_loss_percent) {
      out << format_double(*ep.window_loss_percent);
    }
    out << ',';
    if (ep.window_jitter_ms) {
      out << format_double(*ep.window_jitter_ms);
    }
    out << ',' << (ep.key_frame_hit ? "true" : "false") << ',';
    if (ep.predicted_mos) {
      out << format_double(*ep.predicted_mos);
    }
    out << '\n';
  }
  return out.str();
}

std::string episodes_to_json(std::span<const DistortionEpisode> episodes) {
  nlohmann::json array = nlohmann::json::array();
  for (const DistortionEpisode& ep : episodes) {
    nlohmann::json item;
    item["first_frame"] = ep.first_frame;
    item["last_frame"] = ep.last_frame;
    item["duration_frames"] = ep.duration_frames;
    item["duration_ms"] = ep.duration_ms;
    item["loss_percent"] = ep.window_loss_percent
                               ? nlohmann::json(*ep.window_loss_percent)
                               : nlohmann::json();
    item["jitter_ms"] = ep.window_jitter_ms
                            ? nlohmann::json(*ep.window_jitter_ms)
                            : nlohmann::json();
    item["key_frame_hit"] = ep.key_frame_hit;
    item["predicted_mos"] = ep.predicted_mos
                                ? nlohmann::json(*ep.predicted_mos)
                                : nlohmann::json();
    array.push_back(item);
  }
  return array.dump(2) + "\n";
}

TraceAnalysis analyze_trace(const Trace& trace, const CoefficientSet& coeffs,
                            const AnalyzeOptions& options) {
  TraceAnalysis analysis;
  analysis.frames = frames_from_trace(trace);

  if (options.damaged_frames) {
    std::unordered_set<uint32_t> damaged(options.damaged_frames->begin(),
                                         options.damaged_frames->end());
    analysis.verdicts.reserve(analysis.frames.size());
    for (const FrameDescriptor& f : analysis.frames) {
      const bool hit = damaged.contains(f.index);
      analysis.verdicts.push_back(FrameVerdict{f.index, !hit, hit});
    }
  } else {
    const auto deduped = deduplicate(received_from_trace(trace));
    analysis.verdicts = reassemble(deduped, analysis.frames, trace.mtu_payload,
                                   trace.playout_deadline_ms);
  }

  analysis.gaps = find_losses(trace);
  analysis.windows = windowed_stats(trace, options.window_packets);
  analysis.episodes =
      detect_episodes(analysis.verdicts, analysis.frames, trace,
                      options.alignment, coeffs, options.window_packets);

  uint64_t expected = 0;
  uint64_t received = 0;
  double jitter_weight = 0.0;
  double jitter_sum = 0.0;
  for (const WindowStats& w : analysis.windows) {
    expected += w.expected;
    received += w.received;
    jitter_sum += w.jitter_ms * w.received;
    jitter_weight += w.received;
  }
  analysis.overall_loss_percent =
      expected == 0 ? 0.0
                    : 100.0 * static_cast<double>(expected - received) /
                          static_cast<double>(expected);
  analysis.overall_jitter_ms =
      jitter_weight == 0.0 ? 0.0 : jitter_sum / jitter_weight;
  return analysis;
}

}  // namespace vqsim
