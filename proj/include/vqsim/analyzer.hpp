#ifndef VQSIM_ANALYZER_HPP_
#define VQSIM_ANALYZER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vqsim/quality.hpp"
#include "vqsim/rtp.hpp"
#include "vqsim/trace.hpp"

namespace vqsim {

inline constexpr int kDefaultWindowPackets = 100;

// Single scalar offset between the capture clock and the display clock
// (trace time = display time + offset). No drift modeled.
struct TimeAlignment {
  double offset_ms = 0.0;

  double display_to_trace(double display_ms) const {
    return display_ms + offset_ms;
  }
  double trace_to_display(double trace_ms) const {
    return trace_ms - offset_ms;
  }
};

// Anchors the two clocks on one packet/frame pair that refer to the same
// physical moment.
TimeAlignment align(uint16_t packet_seq, double packet_time_ms,
                    uint32_t frame_index, int64_t frame_pts_ms);

// One maximal run of missing sequence numbers between consecutive arrivals.
struct SeqGap {
  uint16_t first_missing_seq = 0;
  int length = 0;
  bool is_key_gap = false;  // any missing seq carried key-frame data

  bool operator==(const SeqGap&) const = default;
};

// Sequence-gap losses over the deduplicated arrivals, wrap handled mod 2^16.
// Backward steps (late reordered packets) open no gap.
std::vector<SeqGap> find_losses(const Trace& trace);

struct WindowStats {
  uint64_t first_packet_ordinal = 0;  // position in SENT emission order
  int expected = 0;
  int received = 0;
  double loss_percent = 0.0;
  double jitter_ms = 0.0;
};

// Tumbling windows of `window_packets` expected packets, anchored at the
// first sent packet; the last window may be partial. window_packets must be
// a positive multiple of 100.
std::vector<WindowStats> windowed_stats(const Trace& trace,
                                        int window_packets);

// A contiguous run of damaged frames joined to the packet window covering
// it. duration_frames counts inclusively; duration_ms is the display-time
// span from the first to the last damaged frame.
struct DistortionEpisode {
  uint32_t first_frame = 0;
  uint32_t last_frame = 0;
  uint32_t duration_frames = 0;
  int64_t duration_ms = 0;
  std::optional<double> window_loss_percent;
  std::optional<double> window_jitter_ms;
  bool key_frame_hit = false;
  std::optional<double> predicted_mos;
  // No packet window covers the episode; stats above are absent.
  bool stats_missing = false;
};

// Turns damaged-frame runs into episodes: bounds from the verdicts, display
// times from `frames`, packet-window stats located through the alignment,
// key_frame_hit from the gap analysis, MOS from the model.
std::vector<DistortionEpisode> detect_episodes(
    std::span<const FrameVerdict> verdicts,
    std::span<const FrameDescriptor> frames, const Trace& trace,
    const TimeAlignment& alignment, const CoefficientSet& coeffs,
    int window_packets = kDefaultWindowPackets);

// Episode report, columns exactly:
// first_frame,last_frame,duration_frames,duration_ms,loss_percent,jitter_ms,key_frame_hit,predicted_mos
std::string episodes_to_csv(std::span<const DistortionEpisode> episodes);
std::string episodes_to_json(std::span<const DistortionEpisode> episodes);

struct TraceAnalysis {
  std::vector<FrameDescriptor> frames;
  std::vector<FrameVerdict> verdicts;
  std::vector<SeqGap> gaps;
  std::vector<WindowStats> windows;
  std::vector<DistortionEpisode> episodes;
  double overall_loss_percent = 0.0;
  double overall_jitter_ms = 0.0;
};

struct AnalyzeOptions {
  TimeAlignment alignment;
  int window_packets = kDefaultWindowPackets;
  // Externally observed damaged frame indices; replaces the receiver replay.
  std::optional<std::vector<uint32_t>> damaged_frames;
};

// Full forensic pass over a capture: replay the receiver (dedup +
// reassembly) or apply an external damaged-frame list, then gap analysis,
// windowed stats and episode detection.
TraceAnalysis analyze_trace(const Trace& trace, const CoefficientSet& coeffs,
                            const AnalyzeOptions& options = {});

}  // namespace vqsim

#endif  // VQSIM_ANALYZER_HPP_
