#include "vqsim/rtp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "vqsim/text.hpp"

namespace vqsim {

namespace {

// (frame, fragment) -> one 64-bit dedup key.
uint64_t fragment_key(const RtpPacket& p) {
  return (static_cast<uint64_t>(p.frame_index) << 32) | p.fragment_index;
}

}  // namespace

std::string_view policy_token(DuplicationPolicy policy) {
  switch (policy) {
    case DuplicationPolicy::kNone:
      return "NONE";
    case DuplicationPolicy::kKeyFramesOnly:
      return "KEY_FRAMES_ONLY";
    case DuplicationPolicy::kAll:
      return "ALL";
  }
  return "NONE";
}

DuplicationPolicy parse_policy(std::string_view text) {
  std::string t = to_lower(text);
  if (t == "none") {
    return DuplicationPolicy::kNone;
  }
  if (t == "key_frames_only" || t == "key-frames-only" || t == "key") {
    return DuplicationPolicy::kKeyFramesOnly;
  }
  if (t == "all") {
    return DuplicationPolicy::kAll;
  }
  throw std::invalid_argument("unknown duplication policy: '" +
                              std::string(text) + "'");
}

std::vector<RtpPacket> packetize(std::span<const FrameDescriptor> frames,
                                 uint32_t mtu_payload, uint16_t first_seq) {
  if (mtu_payload < 1) {
    throw std::invalid_argument("packetize: mtu_payload must be >= 1");
  }
  std::vector<RtpPacket> packets;
  uint16_t seq = first_seq;
  for (const FrameDescriptor& frame : frames) {
    uint32_t remaining = frame.size_bytes;
    uint32_t fragment = 0;
    while (remaining > 0) {
      const uint32_t payload = std::min(remaining, mtu_payload);
      packets.push_back(RtpPacket{
          .seq = seq++,
          .timestamp_ms = frame.pts_ms,
          .frame_index = frame.index,
          .fragment_index = fragment++,
          .is_key = frame.kind == FrameKind::kKey,
          .is_redundant_copy = false,
          .payload_bytes = payload,
      });
      remaining -= payload;
    }
  }
  return packets;
}

std::vector<RtpPacket> apply_duplication(std::span<const RtpPacket> packets,
                                         DuplicationPolicy policy) {
  std::vector<RtpPacket> out;
  out.reserve(packets.size() * 2);
  for (const RtpPacket& p : packets) {
    out.push_back(p);
    const bool duplicate = policy == DuplicationPolicy::kAll ||
                           (policy == DuplicationPolicy::kKeyFramesOnly && p.is_key);
    if (duplicate) {
      RtpPacket copy = p;
      copy.is_redundant_copy = true;
      out.push_back(copy);
    }
  }
  // Fresh contiguous sequence numbers over the expanded order.
  uint16_t seq = packets.empty() ? 0 : packets.front().seq;
  for (RtpPacket& p : out) {
    p.seq = seq++;
  }
  return out;
}

double byte_overhead(std::span<const RtpPacket> before,
                     std::span<const RtpPacket> after) {
  uint64_t before_bytes = 0;
  uint64_t after_bytes = 0;
  for (const RtpPacket& p : before) {
    before_bytes += p.payload_bytes;
  }
  for (const RtpPacket& p : after) {
    after_bytes += p.payload_bytes;
  }
  if (before_bytes == 0) {
    throw std::invalid_argument("byte_overhead: empty input stream");
  }
  return static_cast<double>(after_bytes - before_bytes) /
         static_cast<double>(before_bytes);
}

std::vector<ReceivedPacket> deduplicate(
    std::span<const ReceivedPacket> received) {
  // Earliest arrival per (frame, fragment) wins; first seen breaks ties.
  std::unordered_map<uint64_t, size_t> best;
  best.reserve(received.size());
  for (size_t i = 0; i < received.size(); ++i) {
    const uint64_t key = fragment_key(received[i].packet);
    auto [it, inserted] = best.try_emplace(key, i);
    if (!inserted && received[i].arrival_ms < received[it->second].arrival_ms) {
      it->second = i;
    }
  }
  std::vector<ReceivedPacket> out;
  out.reserve(best.size());
  for (size_t i = 0; i < received.size(); ++i) {
    if (best.at(fragment_key(received[i].packet)) == i) {
      out.push_back(received[i]);
    }
  }
  return out;
}

std::vector<FrameVerdict> reassemble(std::span<const ReceivedPacket> deduped,
                                     std::span<const FrameDescriptor> frames,
                                     uint32_t mtu_payload,
                                     double playout_deadline_ms) {
  if (mtu_payload < 1) {
    throw std::invalid_argument("reassemble: mtu_payload must be >= 1");
  }

  // The receiver has no side channel for the path delay, so it takes the
  // fastest observed packet as the baseline the deadline counts from.
  double base_delay_ms = 0.0;
  bool any = false;
  for (const ReceivedPacket& r : deduped) {
    const double transit =
        r.arrival_ms - static_cast<double>(r.packet.timestamp_ms);
    if (!any || transit < base_delay_ms) {
      base_delay_ms = transit;
      any = true;
    }
  }

  std::unordered_map<uint32_t, uint32_t> on_time_fragments;
  on_time_fragments.reserve(frames.size());
  for (const ReceivedPacket& r : deduped) {
    const double limit = static_cast<double>(r.packet.timestamp_ms) +
                         base_delay_ms + playout_deadline_ms;
    if (r.arrival_ms <= limit) {
      ++on_time_fragments[r.packet.frame_index];
    }
  }

  std::vector<FrameVerdict> verdicts;
  verdicts.reserve(frames.size());
  bool damage_open = false;  // cleared only by a fully delivered key frame
  for (const FrameDescriptor& frame : frames) {
    const uint32_t expected =
        (frame.size_bytes + mtu_payload - 1) / mtu_payload;
    auto it = on_time_fragments.find(frame.index);
    const uint32_t got = it == on_time_fragments.end() ? 0 : it->second;
    const bool delivered = got >= expected;

    bool damaged = false;
    if (frame.kind == FrameKind::kKey) {
      damage_open = !delivered;
      damaged = !delivered;
    } else {
      if (!delivered) {
        damage_open = true;
      }
      damaged = damage_open;
    }
    verdicts.push_back(FrameVerdict{
        .frame_index = frame.index,
        .delivered = delivered,
        .displayed_damaged = damaged,
    });
  }
  return verdicts;
}

}  // namespace vqsim
