#ifndef VQSIM_MEDIA_HPP_
#define VQSIM_MEDIA_HPP_

#include <cstdint>
#include <vector>

#include "vqsim/codec.hpp"

namespace vqsim {

// Longest key-frame period that still bounds error propagation acceptably;
// profiles flagged `recommended` must keep key_interval_s at or below this.
inline constexpr double kMaxRecommendedKeyIntervalS = 2.0;

enum class FrameKind : uint8_t { kKey, kUsual };

// One frame of a codec-agnostic elementary stream. Key frames are decodable
// standalone; usual frames only encode the delta against their predecessor.
struct FrameDescriptor {
  uint32_t index = 0;
  FrameKind kind = FrameKind::kUsual;
  uint32_t size_bytes = 0;
  int64_t pts_ms = 0;

  bool operator==(const FrameDescriptor&) const = default;
};

struct StreamProfile {
  double fps = 24.0;
  uint64_t bitrate_bps = 256'000;
  double key_interval_s = 1.0;
  // Key frames compress worse than usual frames; ratio of their byte sizes.
  double key_size_ratio = 3.0;
  double duration_s = 60.0;
  Codec codec = Codec::kDivx;
  // Enforces the key-interval cap above.
  bool recommended = true;

  // Throws std::invalid_argument when any field is out of range.
  void validate() const;

  // Frames between consecutive key frames, never below 1.
  uint32_t key_period_frames() const;
  uint32_t frame_count() const;
  uint64_t total_bytes() const;
};

// 24 fps / 256 Kbps test-clip parameters with a 1 s key interval.
StreamProfile default_profile();

// Expands a profile into its frame sequence. All key frames share one size,
// all usual frames share another, solved so the stream hits the profile's
// byte budget; pts_ms = round(index * 1000 / fps). Pure and deterministic.
// Throws std::invalid_argument when the implied usual-frame size is < 1 byte.
std::vector<FrameDescriptor> generate_stream(const StreamProfile& profile);

}  // namespace vqsim

#endif  // VQSIM_MEDIA_HPP_
