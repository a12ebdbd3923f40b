#ifndef VQSIM_TRACE_HPP_
#define VQSIM_TRACE_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vqsim/media.hpp"
#include "vqsim/netsim.hpp"
#include "vqsim/rtp.hpp"

namespace vqsim {

enum class Direction : uint8_t { kSent, kReceived };

struct TraceRecord {
  Direction direction = Direction::kSent;
  uint16_t seq = 0;
  uint32_t frame_index = 0;
  uint32_t fragment_index = 0;
  bool is_key = false;
  double time_ms = 0.0;  // relative to trace start; send or arrival time
  uint32_t payload_bytes = 0;

  bool operator==(const TraceRecord&) const = default;
};

// Line-based .rtptrace capture. The header records everything a later
// analysis needs to replay the receiver: frame rate, fragmentation MTU and
// the playout deadline. RECEIVED records are raw arrivals (duplicates
// included); deduplication is the analyzer's job.
struct Trace {
  double fps = 24.0;
  double epoch_ms = 0.0;
  uint32_t mtu_payload = kDefaultMtuPayload;
  double playout_deadline_ms = kDefaultPlayoutDeadlineMs;
  std::vector<TraceRecord> records;

  std::vector<TraceRecord> sent() const;
  std::vector<TraceRecord> received() const;

  bool operator==(const Trace&) const = default;
};

// Assembles a capture from one simulated transmission. SENT records follow
// emission order, RECEIVED records arrival order.
Trace make_trace(double fps, uint32_t mtu_payload, double playout_deadline_ms,
                 std::span<const SentPacket> sent,
                 std::span<const ArrivalEvent> arrivals);

// Text form. Doubles are written shortest-round-trip, so read(write(t)) == t.
void write_trace(const Trace& trace, std::ostream& out);
std::string trace_to_string(const Trace& trace);
Trace read_trace(std::istream& in);
Trace trace_from_string(std::string_view text);

void save_trace(const Trace& trace, const std::string& path);
Trace load_trace(const std::string& path);

// Rebuilds the sender-side frame sequence from SENT records: sizes from the
// distinct fragments, pts from the send times. Sorted by frame index.
std::vector<FrameDescriptor> frames_from_trace(const Trace& trace);

// RECEIVED records as receiver input, in capture order. Packet timestamps
// are recovered from the matching SENT record.
std::vector<ReceivedPacket> received_from_trace(const Trace& trace);

}  // namespace vqsim

#endif  // VQSIM_TRACE_HPP_
