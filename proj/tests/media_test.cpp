#include "vqsim/media.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "vqsim/rng.hpp"

using namespace vqsim;

namespace {

StreamProfile ten_second_profile() {
  StreamProfile profile = default_profile();
  profile.duration_s = 10.0;
  return profile;
}

}  // namespace

TEST_CASE("media: default 10 s stream matches the profile arithmetic") {
  const auto frames = generate_stream(ten_second_profile());

  REQUIRE(frames.size() == 240);
  uint32_t keys = 0;
  uint64_t total = 0;
  for (const FrameDescriptor& f : frames) {
    keys += f.kind == FrameKind::kKey ? 1 : 0;
    total += f.size_bytes;
  }
  CHECK(keys == 10);
  // 256 Kbps over 10 s = 320000 bytes; sizes solve the 2x2 system.
  CHECK(frames[0].size_bytes == 3693);
  CHECK(frames[1].size_bytes == 1231);
  CHECK(total == 320060);
  CHECK(total >= 320000 - 3693);
  CHECK(total <= 320000 + 3693);
}

TEST_CASE("media: single-frame stream takes the whole byte budget") {
  StreamProfile profile;
  profile.fps = 1.0;
  profile.bitrate_bps = 8000;
  profile.key_interval_s = 1.0;
  profile.key_size_ratio = 2.0;
  profile.duration_s = 1.0;
  const auto frames = generate_stream(profile);
  REQUIRE(frames.size() == 1);
  CHECK(frames[0].kind == FrameKind::kKey);
  CHECK(frames[0].size_bytes == 1000);
  CHECK(frames[0].pts_ms == 0);
}

TEST_CASE("media: key frames recur on the interval with exact pts") {
  const auto frames = generate_stream(ten_second_profile());
  CHECK(frames[24].kind == FrameKind::kKey);
  CHECK(frames[24].pts_ms == 1000);
  CHECK(frames[23].kind == FrameKind::kUsual);
  CHECK(frames[25].kind == FrameKind::kUsual);
  CHECK(frames[1].pts_ms == 42);  // round(1000/24)
}

TEST_CASE("media: byte conservation and periodicity over random profiles") {
  SplitMix64 rng(7041);
  for (int trial = 0; trial < 200; ++trial) {
    StreamProfile profile;
    profile.fps = 1.0 + rng.next_double() * 59.0;
    profile.key_interval_s = 0.1 + rng.next_double() * 1.9;
    profile.key_size_ratio = 1.1 + rng.next_double() * 6.0;
    profile.duration_s = 1.0 + rng.next_double() * 30.0;
    // Constant per-kind sizes quantize the budget, so the one-key-frame
    // slack is only attainable when frames dwarf the frame count. Sample
    // bitrates from that regime (any real video stream lives there).
    const double floor_bps = 8.0 * profile.key_size_ratio * profile.fps *
                             profile.fps * profile.duration_s;
    profile.bitrate_bps = static_cast<uint64_t>(
        std::llround(floor_bps * (1.0 + 4.0 * rng.next_double())));
    const auto frames = generate_stream(profile);

    REQUIRE(frames.size() == profile.frame_count());
    const uint32_t period = profile.key_period_frames();
    uint64_t total = 0;
    uint64_t key_size = 0;
    for (const FrameDescriptor& f : frames) {
      CHECK((f.kind == FrameKind::kKey) == (f.index % period == 0));
      total += f.size_bytes;
      if (f.kind == FrameKind::kKey) {
        key_size = f.size_bytes;
      }
    }
    if (!frames.empty()) {
      const auto budget = static_cast<int64_t>(profile.total_bytes());
      CHECK(std::llabs(static_cast<int64_t>(total) - budget) <=
            static_cast<int64_t>(key_size));
    }
  }
}

TEST_CASE("media: generation is a pure function of the profile") {
  const auto a = generate_stream(ten_second_profile());
  const auto b = generate_stream(ten_second_profile());
  CHECK(a == b);
}

TEST_CASE("media: rejects profiles implying sub-byte usual frames") {
  StreamProfile profile = ten_second_profile();
  profile.bitrate_bps = 80;  // 100 bytes across 240 frames
  CHECK_THROWS_AS(generate_stream(profile), std::invalid_argument);
}

TEST_CASE("media: recommended profiles cap the key interval at 2 s") {
  StreamProfile profile = default_profile();
  profile.key_interval_s = 3.0;
  CHECK_THROWS_AS(profile.validate(), std::invalid_argument);
  profile.recommended = false;
  CHECK_NOTHROW(profile.validate());
}

TEST_CASE("media: field validation") {
  StreamProfile profile = default_profile();
  profile.key_size_ratio = 1.0;
  CHECK_THROWS_AS(profile.validate(), std::invalid_argument);
  profile = default_profile();
  profile.fps = 0.0;
  CHECK_THROWS_AS(profile.validate(), std::invalid_argument);
  profile = default_profile();
  profile.duration_s = -1.0;
  CHECK_THROWS_AS(profile.validate(), std::invalid_argument);
}
