#include "vqsim/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "vqsim/rng.hpp"

namespace vqsim {

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string("channel: ") + what +
                                " must be in [0, 1]");
  }
}

}  // namespace

LossModel LossModel::iid(double p_loss) {
  LossModel m;
  m.kind = Kind::kIid;
  m.p_loss = p_loss;
  return m;
}

LossModel LossModel::gilbert_elliott(double p_good_to_bad, double p_bad_to_good,
                                     double loss_in_bad) {
  LossModel m;
  m.kind = Kind::kGilbertElliott;
  m.p_good_to_bad = p_good_to_bad;
  m.p_bad_to_good = p_bad_to_good;
  m.loss_in_bad = loss_in_bad;
  return m;
}

double LossModel::mean_loss_rate() const {
  if (kind == Kind::kIid) {
    return p_loss;
  }
  const double denom = p_good_to_bad + p_bad_to_good;
  if (denom <= 0.0) {
    return 0.0;  // chain never leaves the good state
  }
  return p_good_to_bad / denom * loss_in_bad;
}

JitterModel JitterModel::none() {
  return JitterModel{};
}

JitterModel JitterModel::uniform(double half_width_ms) {
  JitterModel m;
  m.kind = Kind::kUniform;
  m.half_width_ms = half_width_ms;
  return m;
}

JitterModel JitterModel::exponential(double mean_ms) {
  JitterModel m;
  m.kind = Kind::kExponential;
  m.mean_ms = mean_ms;
  return m;
}

void ChannelProfile::validate() const {
  check_probability(dup_prob, "dup_prob");
  if (loss.kind == LossModel::Kind::kIid) {
    check_probability(loss.p_loss, "p_loss");
  } else {
    check_probability(loss.p_good_to_bad, "p_good_to_bad");
    check_probability(loss.p_bad_to_good, "p_bad_to_good");
    check_probability(loss.loss_in_bad, "loss_in_bad");
  }
  if (base_delay_ms < 0.0) {
    throw std::invalid_argument("channel: base_delay_ms must be nonnegative");
  }
  if (jitter.kind == JitterModel::Kind::kUniform && jitter.half_width_ms < 0.0) {
    throw std::invalid_argument("channel: jitter half width must be nonnegative");
  }
  if (jitter.kind == JitterModel::Kind::kExponential && jitter.mean_ms < 0.0) {
    throw std::invalid_argument("channel: jitter mean must be nonnegative");
  }
}

std::vector<SentPacket> send_at_pts(std::span<const RtpPacket> packets) {
  std::vector<SentPacket> sent;
  sent.reserve(packets.size());
  for (const RtpPacket& p : packets) {
    sent.push_back(SentPacket{p, p.timestamp_ms});
  }
  return sent;
}

namespace {

double draw_jitter(const JitterModel& model, SplitMix64& rng) {
  switch (model.kind) {
    case JitterModel::Kind::kNone:
      rng.next_double();  // keep the per-packet draw layout fixed
      return 0.0;
    case JitterModel::Kind::kUniform:
      return rng.next_uniform(model.half_width_ms);
    case JitterModel::Kind::kExponential:
      return rng.next_exponential(model.mean_ms);
  }
  return 0.0;
}

}  // namespace

std::vector<ArrivalEvent> transmit(std::span<const SentPacket> packets,
                                   const ChannelProfile& profile) {
  profile.validate();
  for (size_t i = 1; i < packets.size(); ++i) {
    if (packets[i].sent_ms < packets[i - 1].sent_ms) {
      throw std::invalid_argument("transmit: send times must be nondecreasing");
    }
  }

  std::vector<ArrivalEvent> events;
  events.reserve(packets.size());
  bool bad_state = false;  // Gilbert-Elliott chain starts good
  for (size_t i = 0; i < packets.size(); ++i) {
    SplitMix64 rng = packet_stream(profile.seed, i);
    // Fixed draw order: loss, state transition, jitter, dup, dup jitter.
    const double u_loss = rng.next_double();
    const double u_transition = rng.next_double();

    bool dropped = false;
    if (profile.loss.kind == LossModel::Kind::kIid) {
      dropped = u_loss < profile.loss.p_loss;
    } else {
      dropped = bad_state && u_loss < profile.loss.loss_in_bad;
      bad_state = bad_state ? !(u_transition < profile.loss.p_bad_to_good)
                            : u_transition < profile.loss.p_good_to_bad;
    }
    if (dropped) {
      continue;
    }

    const auto deliver = [&](double jitter_ms) {
      const double delay =
          std::max(0.0, profile.base_delay_ms + jitter_ms);
      events.push_back(ArrivalEvent{
          packets[i].packet, packets[i].sent_ms,
          static_cast<double>(packets[i].sent_ms) + delay});
    };
    deliver(draw_jitter(profile.jitter, rng));
    if (rng.next_double() < profile.dup_prob) {
      deliver(draw_jitter(profile.jitter, rng));
    }
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const ArrivalEvent& a, const ArrivalEvent& b) {
                     return a.arrival_ms < b.arrival_ms;
                   });
  return events;
}

void JitterEstimator::update(double transit_ms) {
  if (has_prev_) {
    const double d = transit_ms - prev_transit_ms_;
    jitter_ms_ += (std::abs(d) - jitter_ms_) / 16.0;
  }
  prev_transit_ms_ = transit_ms;
  has_prev_ = true;
}

std::pair<double, double> measured_conditions(
    std::span<const ArrivalEvent> events, int window_packets) {
  if (window_packets <= 0 || window_packets % 100 != 0) {
    throw std::invalid_argument(
        "measured_conditions: window must be a positive multiple of 100");
  }
  std::unordered_set<uint16_t> distinct;
  JitterEstimator jitter;
  for (const ArrivalEvent& e : events) {
    distinct.insert(e.packet.seq);
    jitter.update(e.transit_ms());
  }
  const double lost =
      static_cast<double>(window_packets) - static_cast<double>(distinct.size());
  const double loss_percent =
      100.0 * std::max(0.0, lost) / static_cast<double>(window_packets);
  return {loss_percent, jitter.value()};
}

std::vector<std::string> preset_names() {
  return {"wifi-degraded", "wimax", "3g-noisy"};
}

ChannelProfile channel_preset(std::string_view name, uint64_t seed) {
  ChannelProfile profile;
  profile.seed = seed;
  if (name == "wifi-degraded") {
    // Mid-range WiFi impairment; losses are the dominant effect.
    profile.loss = LossModel::iid(0.04);
    profile.base_delay_ms = 30.0;
    profile.jitter = JitterModel::uniform(15.0);
  } else if (name == "wimax") {
    // Near-lossless carrier-grade link, moderate delay variation.
    profile.loss = LossModel::iid(0.0);
    profile.base_delay_ms = 40.0;
    profile.jitter = JitterModel::uniform(20.0);
  } else if (name == "3g-noisy") {
    // Poor-band losses, ~40 ms delay variation, and equipment that
    // occasionally duplicates outgoing packets.
    profile.loss = LossModel::iid(0.05);
    profile.base_delay_ms = 80.0;
    profile.jitter = JitterModel::exponential(40.0);
    profile.dup_prob = 0.05;
  } else {
    throw std::invalid_argument("unknown channel preset: '" +
                                std::string(name) + "'");
  }
  return profile;
}

}  // namespace vqsim
