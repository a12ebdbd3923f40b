#include "vqsim/netsim.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <map>
#include <set>

#include "vqsim/rng.hpp"

using namespace vqsim;

namespace {

std::vector<SentPacket> burst(int count, int64_t spacing_ms = 1) {
  std::vector<SentPacket> sent;
  sent.reserve(count);
  for (int i = 0; i < count; ++i) {
    RtpPacket p;
    p.seq = static_cast<uint16_t>(i);
    p.frame_index = static_cast<uint32_t>(i);
    p.fragment_index = 0;
    p.payload_bytes = 1000;
    p.timestamp_ms = i * spacing_ms;
    sent.push_back(SentPacket{p, i * spacing_ms});
  }
  return sent;
}

}  // namespace

TEST_CASE("netsim: the identity channel only shifts by the base delay") {
  ChannelProfile channel;
  channel.base_delay_ms = 25.0;
  const auto sent = burst(500);
  const auto events = transmit(sent, channel);
  REQUIRE(events.size() == sent.size());
  for (size_t i = 0; i < events.size(); ++i) {
    CHECK(events[i].packet == sent[i].packet);
    CHECK(events[i].arrival_ms ==
          static_cast<double>(sent[i].sent_ms) + 25.0);
  }
}

TEST_CASE("netsim: iid loss converges to the configured rate") {
  const double p = 0.02;
  const int n = 100'000;
  ChannelProfile channel;
  channel.loss = LossModel::iid(p);
  channel.seed = 2024;
  const auto events = transmit(burst(n), channel);
  const double rate = 1.0 - static_cast<double>(events.size()) / n;
  const double se = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(rate - p) <= 3.0 * se);
}

TEST_CASE("netsim: gilbert-elliott stationary loss and burstiness") {
  ChannelProfile channel;
  channel.loss = LossModel::gilbert_elliott(0.05, 0.4, 1.0);
  channel.seed = 99;
  CHECK(channel.loss.mean_loss_rate() == doctest::Approx(0.05 / 0.45));
  const int n = 200'000;
  const auto events = transmit(burst(n), channel);
  const double rate = 1.0 - static_cast<double>(events.size()) / n;
  // Correlated losses spread more than a binomial; allow a loose band.
  CHECK(rate == doctest::Approx(channel.loss.mean_loss_rate()).epsilon(0.05));

  // Losses must arrive in runs: mean burst length ~ 1/p_bad_to_good.
  std::set<uint32_t> got;
  for (const ArrivalEvent& e : events) {
    got.insert(e.packet.frame_index);
  }
  int bursts = 0;
  int lost = 0;
  bool in_burst = false;
  for (int i = 0; i < n; ++i) {
    const bool missing = !got.contains(static_cast<uint32_t>(i));
    if (missing && !in_burst) ++bursts;
    if (missing) ++lost;
    in_burst = missing;
  }
  REQUIRE(bursts > 0);
  const double mean_burst = static_cast<double>(lost) / bursts;
  CHECK(mean_burst > 1.5);  // decidedly burstier than iid at this rate
}

TEST_CASE("netsim: transmission is deterministic in (packets, profile)") {
  ChannelProfile channel = channel_preset("3g-noisy", 555);
  const auto sent = burst(2000);
  CHECK(transmit(sent, channel) == transmit(sent, channel));
  channel.seed = 556;
  CHECK(transmit(sent, channel) != transmit(sent, channel_preset("3g-noisy", 555)));
}

TEST_CASE("netsim: arrivals are sorted and never invented") {
  const auto sent = burst(3000, 2);
  std::map<uint16_t, RtpPacket> by_seq;
  for (const SentPacket& s : sent) {
    by_seq[s.packet.seq] = s.packet;
  }
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    for (const char* preset : {"wifi-degraded", "wimax", "3g-noisy"}) {
      const auto events = transmit(sent, channel_preset(preset, seed));
      for (size_t i = 0; i < events.size(); ++i) {
        if (i > 0) {
          CHECK(events[i - 1].arrival_ms <= events[i].arrival_ms);
        }
        CHECK(events[i].arrival_ms >=
              static_cast<double>(events[i].sent_ms));
        REQUIRE(by_seq.contains(events[i].packet.seq));
        CHECK(by_seq[events[i].packet.seq] == events[i].packet);
      }
    }
  }
}

TEST_CASE("netsim: the noisy 3g preset duplicates some packets") {
  const auto events = transmit(burst(2000), channel_preset("3g-noisy", 7));
  std::map<std::pair<uint32_t, uint32_t>, int> count;
  int doubled = 0;
  for (const ArrivalEvent& e : events) {
    if (++count[{e.packet.frame_index, e.packet.fragment_index}] == 2) {
      ++doubled;
    }
  }
  CHECK(doubled > 0);
}

TEST_CASE("netsim: uniform jitter stays inside its half width") {
  ChannelProfile channel;
  channel.base_delay_ms = 50.0;
  channel.jitter = JitterModel::uniform(15.0);
  channel.seed = 3;
  for (const ArrivalEvent& e : transmit(burst(5000), channel)) {
    CHECK(e.transit_ms() >= 35.0);
    CHECK(e.transit_ms() <= 65.0);
  }
}

TEST_CASE("netsim: measured conditions on a clean constant-delay window") {
  ChannelProfile channel;
  channel.base_delay_ms = 10.0;
  const auto events = transmit(burst(100), channel);
  const auto [loss, jitter] = measured_conditions(events, 100);
  CHECK(loss == 0.0);
  CHECK(jitter == 0.0);
}

TEST_CASE("netsim: two losses in a 100-packet window read as 2%") {
  auto sent = burst(100);
  ChannelProfile channel;
  auto events = transmit(sent, channel);
  // Drop seqs 30 and 31 after the fact.
  std::erase_if(events, [](const ArrivalEvent& e) {
    return e.packet.seq == 30 || e.packet.seq == 31;
  });
  const auto [loss, jitter] = measured_conditions(events, 100);
  CHECK(loss == 2.0);
  CHECK(jitter == 0.0);
}

TEST_CASE("netsim: window size must be a positive multiple of 100") {
  CHECK_THROWS_AS(measured_conditions({}, 150), std::invalid_argument);
  CHECK_THROWS_AS(measured_conditions({}, 0), std::invalid_argument);
  CHECK_THROWS_AS(measured_conditions({}, -100), std::invalid_argument);
}

TEST_CASE("netsim: jitter estimator matches direct iteration, fixpoint 2d") {
  const double d = 8.0;
  // Transit times alternate +d, -d around the base: |D| is always 2d.
  std::vector<ArrivalEvent> events;
  ChannelProfile channel;
  const auto sent = burst(200, 20);
  for (size_t i = 0; i < sent.size(); ++i) {
    ArrivalEvent e;
    e.packet = sent[i].packet;
    e.sent_ms = sent[i].sent_ms;
    e.arrival_ms = static_cast<double>(e.sent_ms) + 40.0 +
                   ((i % 2 == 0) ? d : -d);
    events.push_back(e);
  }
  const auto [loss, jitter] = measured_conditions(events, 200);
  CHECK(loss == 0.0);

  double expected = 0.0;
  for (size_t i = 1; i < events.size(); ++i) {
    expected += (2.0 * d - expected) / 16.0;
  }
  CHECK(jitter == expected);
  CHECK(jitter == doctest::Approx(2.0 * d).epsilon(1e-4));
}

TEST_CASE("netsim: probability and delay validation") {
  ChannelProfile channel;
  channel.loss = LossModel::iid(1.5);
  CHECK_THROWS_AS(channel.validate(), std::invalid_argument);
  channel = ChannelProfile{};
  channel.dup_prob = -0.1;
  CHECK_THROWS_AS(channel.validate(), std::invalid_argument);
  channel = ChannelProfile{};
  channel.base_delay_ms = -1.0;
  CHECK_THROWS_AS(channel.validate(), std::invalid_argument);
}

TEST_CASE("netsim: send times must be nondecreasing") {
  auto sent = burst(10);
  std::swap(sent[3], sent[7]);
  CHECK_THROWS_AS(transmit(sent, ChannelProfile{}), std::invalid_argument);
}

TEST_CASE("netsim: unknown preset is rejected") {
  CHECK_THROWS_AS(channel_preset("lte"), std::invalid_argument);
}
