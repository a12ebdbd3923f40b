#ifndef VQSIM_RTP_HPP_
#define VQSIM_RTP_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "vqsim/media.hpp"

namespace vqsim {

inline constexpr uint32_t kDefaultMtuPayload = 1400;
inline constexpr double kDefaultPlayoutDeadlineMs = 500.0;

// Simulated RTP datagram. Redundant copies carry their own sequence number
// (gap-based loss detection stays usable); receivers match duplicates on
// (frame_index, fragment_index) instead.
struct RtpPacket {
  uint16_t seq = 0;
  int64_t timestamp_ms = 0;
  uint32_t frame_index = 0;
  uint32_t fragment_index = 0;
  bool is_key = false;
  bool is_redundant_copy = false;
  uint32_t payload_bytes = 0;

  bool operator==(const RtpPacket&) const = default;
};

struct ReceivedPacket {
  RtpPacket packet;
  double arrival_ms = 0.0;

  bool operator==(const ReceivedPacket&) const = default;
};

enum class DuplicationPolicy { kNone, kKeyFramesOnly, kAll };

std::string_view policy_token(DuplicationPolicy policy);
DuplicationPolicy parse_policy(std::string_view text);

struct FrameVerdict {
  uint32_t frame_index = 0;
  // All fragments present after dedup and inside the playout deadline.
  bool delivered = false;
  // Damaged at display time once propagation is applied.
  bool displayed_damaged = false;

  bool operator==(const FrameVerdict&) const = default;
};

// Fragments each frame into ceil(size / mtu) packets. All fragments of a
// frame share the frame's pts as timestamp; sequence numbers run
// contiguously (mod 2^16) from first_seq. mtu_payload must be >= 1.
std::vector<RtpPacket> packetize(std::span<const FrameDescriptor> frames,
                                 uint32_t mtu_payload = kDefaultMtuPayload,
                                 uint16_t first_seq = 0);

// Under kKeyFramesOnly each key packet is immediately followed by a copy
// flagged is_redundant_copy; kAll duplicates everything. Sequence numbers
// are reassigned contiguously over the expanded order.
std::vector<RtpPacket> apply_duplication(std::span<const RtpPacket> packets,
                                         DuplicationPolicy policy);

// (bytes after - bytes before) / bytes before. For kKeyFramesOnly this
// equals the key-frame share of the traffic exactly.
double byte_overhead(std::span<const RtpPacket> before,
                     std::span<const RtpPacket> after);

// Keeps the earliest arrival per (frame_index, fragment_index), covering
// both sender-injected redundancy and network-side duplication. Output
// preserves arrival order of the survivors; idempotent.
std::vector<ReceivedPacket> deduplicate(
    std::span<const ReceivedPacket> received);

// Per-frame delivery verdicts with GOP-aware damage propagation: any damage
// marks everything up to the next fully delivered key frame. A fragment is
// on time when arrival <= pts + base delay + deadline, where base delay is
// estimated as the minimum observed transit over the deduped arrivals.
std::vector<FrameVerdict> reassemble(
    std::span<const ReceivedPacket> deduped,
    std::span<const FrameDescriptor> frames,
    uint32_t mtu_payload = kDefaultMtuPayload,
    double playout_deadline_ms = kDefaultPlayoutDeadlineMs);

}  // namespace vqsim

#endif  // VQSIM_RTP_HPP_
