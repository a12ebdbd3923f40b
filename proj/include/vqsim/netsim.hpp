#ifndef VQSIM_NETSIM_HPP_
#define VQSIM_NETSIM_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vqsim/rtp.hpp"

namespace vqsim {

struct LossModel {
  enum class Kind { kIid, kGilbertElliott };

  Kind kind = Kind::kIid;
  double p_loss = 0.0;  // kIid
  // kGilbertElliott: two-state chain, packets dropped only in the bad state.
  double p_good_to_bad = 0.0;
  double p_bad_to_good = 1.0;
  double loss_in_bad = 1.0;

  static LossModel iid(double p_loss);
  static LossModel gilbert_elliott(double p_good_to_bad, double p_bad_to_good,
                                   double loss_in_bad);

  // Stationary loss rate of the model.
  double mean_loss_rate() const;
};

struct JitterModel {
  enum class Kind { kNone, kUniform, kExponential };

  Kind kind = Kind::kNone;
  double half_width_ms = 0.0;  // kUniform: draw in [-half_width, +half_width]
  double mean_ms = 0.0;        // kExponential: draw >= 0 with this mean

  static JitterModel none();
  static JitterModel uniform(double half_width_ms);
  static JitterModel exponential(double mean_ms);
};

struct ChannelProfile {
  LossModel loss;
  double base_delay_ms = 0.0;
  JitterModel jitter;
  // Probability the network emits a second, independently jittered copy of a
  // delivered packet (some 3G gear does this).
  double dup_prob = 0.0;
  uint64_t seed = 0;

  void validate() const;
};

struct SentPacket {
  RtpPacket packet;
  int64_t sent_ms = 0;
};

struct ArrivalEvent {
  RtpPacket packet;
  int64_t sent_ms = 0;
  double arrival_ms = 0.0;

  double transit_ms() const { return arrival_ms - static_cast<double>(sent_ms); }
  bool operator==(const ArrivalEvent&) const = default;
};

// Schedules every packet at its RTP timestamp.
std::vector<SentPacket> send_at_pts(std::span<const RtpPacket> packets);

// Runs the channel over the packets: drop per loss model, else delay by
// base + jitter draw (total delay clamped at 0), optional duplicate arrival
// with an independent jitter draw. Output sorted by arrival time, ties kept
// in emission order. Packet i draws from packet_stream(seed, i) in the fixed
// order (loss, state transition, jitter, dup, dup jitter), so the result is
// bit-identical for identical (packets, profile).
std::vector<ArrivalEvent> transmit(std::span<const SentPacket> packets,
                                   const ChannelProfile& profile);

// Interarrival jitter, the standard smoothed recursion with gain 1/16:
// J += (|D| - J) / 16 over successive transit-time differences D.
class JitterEstimator {
 public:
  void update(double transit_ms);
  double value() const { return jitter_ms_; }

 private:
  double jitter_ms_ = 0.0;
  double prev_transit_ms_ = 0.0;
  bool has_prev_ = false;
};

// Loss percentage and jitter over one analysis window of `window_packets`
// expected packets (must be a positive multiple of 100): loss counts the
// distinct sequence numbers missing from `events`; jitter is the estimator
// above run over the events in order.
std::pair<double, double> measured_conditions(
    std::span<const ArrivalEvent> events, int window_packets);

// Built-in impairment presets: "wifi-degraded", "wimax", "3g-noisy".
// The numbers beyond published loss/jitter observations are design choices;
// see the README table.
std::vector<std::string> preset_names();
ChannelProfile channel_preset(std::string_view name, uint64_t seed = 0);

}  // namespace vqsim

#endif  // VQSIM_NETSIM_HPP_
