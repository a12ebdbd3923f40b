#include "vqsim/media.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vqsim {

void StreamProfile::validate() const {
  if (!(fps > 0.0)) {
    throw std::invalid_argument("stream: fps must be positive");
  }
  if (bitrate_bps == 0) {
    throw std::invalid_argument("stream: bitrate must be positive");
  }
  if (!(key_interval_s > 0.0)) {
    throw std::invalid_argument("stream: key_interval_s must be positive");
  }
  if (!(key_size_ratio > 1.0)) {
    throw std::invalid_argument("stream: key_size_ratio must exceed 1");
  }
  if (!(duration_s > 0.0)) {
    throw std::invalid_argument("stream: duration_s must be positive");
  }
  if (recommended && key_interval_s > kMaxRecommendedKeyIntervalS) {
    throw std::invalid_argument(
        "stream: recommended profiles keep the key interval at or below " +
        std::to_string(kMaxRecommendedKeyIntervalS) + " s");
  }
}

uint32_t StreamProfile::key_period_frames() const {
  auto period = static_cast<int64_t>(std::llround(key_interval_s * fps));
  return period < 1 ? 1u : static_cast<uint32_t>(period);
}

uint32_t StreamProfile::frame_count() const {
  return static_cast<uint32_t>(std::llround(fps * duration_s));
}

uint64_t StreamProfile::total_bytes() const {
  return static_cast<uint64_t>(
      std::llround(static_cast<double>(bitrate_bps) * duration_s / 8.0));
}

StreamProfile default_profile() {
  return StreamProfile{};
}

std::vector<FrameDescriptor> generate_stream(const StreamProfile& profile) {
  profile.validate();

  const uint32_t count = profile.frame_count();
  const uint32_t period = profile.key_period_frames();

  uint64_t key_count = 0;
  for (uint32_t i = 0; i < count; i += period) {
    ++key_count;
  }
  const uint64_t usual_count = count - key_count;

  // Solve {keys * s_key + usuals * s_usual = budget, s_key = ratio * s_usual}.
  const double budget = static_cast<double>(profile.total_bytes());
  const double denom = static_cast<double>(key_count) * profile.key_size_ratio +
                       static_cast<double>(usual_count);
  std::vector<FrameDescriptor> frames;
  if (count == 0) {
    return frames;
  }
  const auto usual_size = static_cast<int64_t>(std::llround(budget / denom));
  if (usual_size < 1) {
    throw std::invalid_argument(
        "stream: profile implies a usual-frame size below 1 byte");
  }
  const auto key_size = static_cast<int64_t>(
      std::llround(static_cast<double>(usual_size) * profile.key_size_ratio));

  frames.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const bool key = i % period == 0;
    frames.push_back(FrameDescriptor{
        .index = i,
        .kind = key ? FrameKind::kKey : FrameKind::kUsual,
        .size_bytes = static_cast<uint32_t>(key ? key_size : usual_size),
        .pts_ms = std::llround(static_cast<double>(i) * 1000.0 / profile.fps),
    });
  }
  return frames;
}

}  // namespace vqsim
