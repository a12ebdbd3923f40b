#include "vqsim/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "vqsim/text.hpp"

namespace vqsim {

namespace {

constexpr std::string_view kMagic = "#rtptrace";
constexpr std::string_view kVersion = "v1";

std::string_view direction_token(Direction d) {
  return d == Direction::kSent ? "SENT" : "RECEIVED";
}

Direction parse_direction(std::string_view token) {
  if (token == "SENT") {
    return Direction::kSent;
  }
  if (token == "RECEIVED") {
    return Direction::kReceived;
  }
  throw std::invalid_argument("trace: bad direction '" + std::string(token) +
                              "'");
}

uint64_t sent_join_key(uint16_t seq, uint32_t frame, uint32_t fragment) {
  // seq alone can wrap on very long captures; the triple stays unique.
  return (static_cast<uint64_t>(seq) << 48) ^
         (static_cast<uint64_t>(frame) << 20) ^ fragment;
}

}  // namespace

std::vector<TraceRecord> Trace::sent() const {
  std::vector<TraceRecord> out;
  for (const TraceRecord& r : records) {
    if (r.direction == Direction::kSent) {
      out.push_back(r);
    }
  }
  return out;
}

std::vector<TraceRecord> Trace::received() const {
  std::vector<TraceRecord> out;
  for (const TraceRecord& r : records) {
    if (r.direction == Direction::kReceived) {
      out.push_back(r);
    }
  }
  return out;
}

Trace make_trace(double fps, uint32_t mtu_payload, double playout_deadline_ms,
                 std::span<const SentPacket> sent,
                 std::span<const ArrivalEvent> arrivals) {
  Trace trace;
  trace.fps = fps;
  trace.mtu_payload = mtu_payload;
  trace.playout_deadline_ms = playout_deadline_ms;
  trace.records.reserve(sent.size() + arrivals.size());
  for (const SentPacket& s : sent) {
    trace.records.push_back(TraceRecord{
        Direction::kSent, s.packet.seq, s.packet.frame_index,
        s.packet.fragment_index, s.packet.is_key,
        static_cast<double>(s.sent_ms), s.packet.payload_bytes});
  }
  for (const ArrivalEvent& a : arrivals) {
    trace.records.push_back(TraceRecord{
        Direction::kReceived, a.packet.seq, a.packet.frame_index,
        a.packet.fragment_index, a.packet.is_key, a.arrival_ms,
        a.packet.payload_bytes});
  }
  return trace;
}

void write_trace(const Trace& trace, std::ostream& out) {
  out << kMagic << ' ' << kVersion << " fps=" << format_double(trace.fps)
      << " epoch_ms=" << format_double(trace.epoch_ms)
      << " mtu=" << trace.mtu_payload
      << " deadline_ms=" << format_double(trace.playout_deadline_ms) << '\n';
  out << "# direction seq frame fragment key time_ms payload_bytes\n";
  for (const TraceRecord& r : trace.records) {
    out << direction_token(r.direction) << ' ' << r.seq << ' ' << r.frame_index
        << ' ' << r.fragment_index << ' ' << (r.is_key ? 1 : 0) << ' '
        << format_double(r.time_ms) << ' ' << r.payload_bytes << '\n';
  }
}

std::string trace_to_string(const Trace& trace) {
  std::ostringstream out;
  write_trace(trace, out);
  return out.str();
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("trace: empty input");
  }
  auto header = split_tokens(line);
  if (header.size() < 2 || header[0] != kMagic || header[1] != kVersion) {
    throw std::invalid_argument("trace: missing '#rtptrace v1' header");
  }
  for (size_t i = 2; i < header.size(); ++i) {
    const std::string_view kv = header[i];
    const size_t eq = kv.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("trace: bad header field '" +
                                  std::string(kv) + "'");
    }
    const std::string_view key = kv.substr(0, eq);
    const std::string_view value = kv.substr(eq + 1);
    if (key == "fps") {
      trace.fps = parse_double(value);
    } else if (key == "epoch_ms") {
      trace.epoch_ms = parse_double(value);
    } else if (key == "mtu") {
      trace.mtu_payload = static_cast<uint32_t>(parse_int(value));
    } else if (key == "deadline_ms") {
      trace.playout_deadline_ms = parse_double(value);
    } else {
      throw std::invalid_argument("trace: unknown header field '" +
                                  std::string(key) + "'");
    }
  }
  while (std::getline(in, line)) {
    auto tokens = split_tokens(line);
    if (tokens.empty() || tokens[0].front() == '#') {
      continue;
    }
    if (tokens.size() != 7) {
      throw std::invalid_argument("trace: expected 7 fields, got " +
                                  std::to_string(tokens.size()));
    }
    TraceRecord r;
    r.direction = parse_direction(tokens[0]);
    r.seq = static_cast<uint16_t>(parse_int(tokens[1]));
    r.frame_index = static_cast<uint32_t>(parse_int(tokens[2]));
    r.fragment_index = static_cast<uint32_t>(parse_int(tokens[3]));
    r.is_key = parse_int(tokens[4]) != 0;
    r.time_ms = parse_double(tokens[5]);
    r.payload_bytes = static_cast<uint32_t>(parse_int(tokens[6]));
    trace.records.push_back(r);
  }
  return trace;
}

Trace trace_from_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_trace(in);
}

void save_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write trace: " + path);
  }
  write_trace(trace, out);
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read trace: " + path);
  }
  return read_trace(in);
}

std::vector<FrameDescriptor> frames_from_trace(const Trace& trace) {
  struct FrameAccum {
    bool is_key = false;
    int64_t pts_ms = 0;
    uint64_t size_bytes = 0;
    std::unordered_map<uint32_t, bool> fragments;
  };
  std::map<uint32_t, FrameAccum> by_index;
  for (const TraceRecord& r : trace.records) {
    if (r.direction != Direction::kSent) {
      continue;
    }
    FrameAccum& acc = by_index[r.frame_index];
    acc.is_key = r.is_key;
    acc.pts_ms = std::llround(r.time_ms);
    if (acc.fragments.emplace(r.fragment_index, true).second) {
      acc.size_bytes += r.payload_bytes;  // redundant copies count once
    }
  }
  std::vector<FrameDescriptor> frames;
  frames.reserve(by_index.size());
  for (const auto& [index, acc] : by_index) {
    frames.push_back(FrameDescriptor{
        .index = index,
        .kind = acc.is_key ? FrameKind::kKey : FrameKind::kUsual,
        .size_bytes = static_cast<uint32_t>(acc.size_bytes),
        .pts_ms = acc.pts_ms,
    });
  }
  return frames;
}

std::vector<ReceivedPacket> received_from_trace(const Trace& trace) {
  std::unordered_map<uint64_t, int64_t> sent_time;
  for (const TraceRecord& r : trace.records) {
    if (r.direction == Direction::kSent) {
      sent_time.emplace(sent_join_key(r.seq, r.frame_index, r.fragment_index),
                        std::llround(r.time_ms));
    }
  }
  std::vector<ReceivedPacket> received;
  for (const TraceRecord& r : trace.records) {
    if (r.direction != Direction::kReceived) {
      continue;
    }
    auto it =
        sent_time.find(sent_join_key(r.seq, r.frame_index, r.fragment_index));
    if (it == sent_time.end()) {
      throw std::invalid_argument(
          "trace: RECEIVED record without a matching SENT record (seq " +
          std::to_string(r.seq) + ")");
    }
    received.push_back(ReceivedPacket{
        RtpPacket{
            .seq = r.seq,
            .timestamp_ms = it->second,
            .frame_index = r.frame_index,
            .fragment_index = r.fragment_index,
            .is_key = r.is_key,
            .is_redundant_copy = false,
            .payload_bytes = r.payload_bytes,
        },
        r.time_ms,
    });
  }
  return received;
}

}  // namespace vqsim
