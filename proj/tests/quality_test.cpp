#include "vqsim/quality.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "vqsim/rng.hpp"

using namespace vqsim;

namespace {

// Box-Muller from two portable uniforms; test-side only.
double gaussian(SplitMix64& rng, double sigma) {
  const double u1 = 1.0 - rng.next_double();
  const double u2 = rng.next_double();
  return sigma * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.141592653589793 * u2);
}

}  // namespace

TEST_CASE("quality: built-in tables carry the published values verbatim") {
  const CoefficientSet& mpeg2_wifi =
      builtin_coefficients(Codec::kMpeg2, Network::kWifi);
  CHECK(mpeg2_wifi.q_ideal == Coeff{4.2, 0.2});
  CHECK(mpeg2_wifi.alpha_k == Coeff{0.15, 0.03});
  CHECK(mpeg2_wifi.beta_k == Coeff{0.011, 0.002});
  CHECK(mpeg2_wifi.alpha_w == Coeff{0.04, 0.01});
  CHECK(mpeg2_wifi.beta_w == Coeff{0.003, 0.001});

  const CoefficientSet& divx_wifi =
      builtin_coefficients(Codec::kDivx, Network::kWifi);
  CHECK(divx_wifi.q_ideal == Coeff{4.7, 0.2});
  CHECK(divx_wifi.alpha_k == Coeff{0.27, 0.05});
  CHECK(divx_wifi.beta_k == Coeff{0.013, 0.003});
  CHECK(divx_wifi.alpha_w == Coeff{0.13, 0.02});
  CHECK(divx_wifi.beta_w == Coeff{0.01, 0.002});

  const CoefficientSet& mpeg2_3g =
      builtin_coefficients(Codec::kMpeg2, Network::kThreeG);
  CHECK(mpeg2_3g.q_ideal == Coeff{4.2, 0.2});
  CHECK(mpeg2_3g.alpha_k == Coeff{0.005, 0.002});
  CHECK(mpeg2_3g.beta_k == Coeff{0.005, 0.002});
  CHECK(mpeg2_3g.alpha_w == Coeff{0.004, 0.001});
  CHECK(mpeg2_3g.beta_w == Coeff{0.003, 0.001});

  const CoefficientSet& divx_3g =
      builtin_coefficients(Codec::kDivx, Network::kThreeG);
  CHECK(divx_3g.q_ideal == Coeff{4.7, 0.2});
  CHECK(divx_3g.alpha_k == Coeff{0.01, 0.003});
  CHECK(divx_3g.beta_k == Coeff{0.003, 0.001});
  CHECK(divx_3g.alpha_w == Coeff{0.002, 0.0005});
  CHECK(divx_3g.beta_w == Coeff{0.002, 0.0008});

  for (const CoefficientSet& set : builtin_coefficient_sets()) {
    CHECK_NOTHROW(set.validate());
  }
}

TEST_CASE("quality: prediction at zero impairment returns q_ideal") {
  for (const CoefficientSet& set : builtin_coefficient_sets()) {
    for (bool key : {false, true}) {
      CHECK(predict_mos({0.0, 0.0, key}, set) == set.q_ideal.value);
    }
  }
}

TEST_CASE("quality: spot prediction, DivX/WiFi key hit at 2% and 20 ms") {
  const auto& coeffs = builtin_coefficients(Codec::kDivx, Network::kWifi);
  const double mos = predict_mos({2.0, 20.0, true}, coeffs);
  CHECK(std::abs(mos - 3.90) <= 1e-12);
}

TEST_CASE("quality: predictions clamp to the MOS scale") {
  const auto& coeffs = builtin_coefficients(Codec::kMpeg2, Network::kWifi);
  CHECK(predict_mos({30.0, 100.0, true}, coeffs) == 1.0);
  MosScale wide{0.0, 5.0};
  CHECK(predict_mos({30.0, 100.0, true}, coeffs, wide) == 0.0);
}

TEST_CASE("quality: prediction is monotone and key hits never score higher") {
  SplitMix64 rng(31337);
  for (const CoefficientSet& set : builtin_coefficient_sets()) {
    for (int trial = 0; trial < 200; ++trial) {
      const double p = rng.next_double() * 50.0;
      const double j = rng.next_double() * 200.0;
      const double dp = rng.next_double() * 10.0;
      const double dj = rng.next_double() * 50.0;
      for (bool key : {false, true}) {
        const double base = predict_mos({p, j, key}, set);
        CHECK(base >= 1.0);
        CHECK(base <= 5.0);
        CHECK(predict_mos({p + dp, j, key}, set) <= base);
        CHECK(predict_mos({p, j + dj, key}, set) <= base);
      }
      CHECK(predict_mos({p, j, true}, set) <= predict_mos({p, j, false}, set));
    }
  }
}

TEST_CASE("quality: degradation ratios") {
  CHECK(degradation_ratio(builtin_coefficients(Codec::kMpeg2, Network::kWifi)) ==
        3.75);
  const double divx =
      degradation_ratio(builtin_coefficients(Codec::kDivx, Network::kWifi));
  CHECK(divx > 2.0);
  CHECK(divx == doctest::Approx(0.27 / 0.13));

  CoefficientSet flat = builtin_coefficients(Codec::kMpeg2, Network::kWifi);
  flat.alpha_k = flat.alpha_w;
  CHECK(degradation_ratio(flat) == 1.0);
  flat.alpha_w.value = 0.0;
  CHECK_THROWS_AS(degradation_ratio(flat), std::invalid_argument);
}

TEST_CASE("quality: GAP classification takes the worst dimension") {
  CHECK(classify_gap({0.0, 20.0, false}) == GapClass::kGood);
  CHECK(classify_gap({0.3, 40.0, false}) == GapClass::kAcceptable);
  CHECK(classify_gap({50.0, 0.0, false}) == GapClass::kPoor);
  CHECK(classify_gap({0.0, 60.0, false}) == GapClass::kPoor);
  CHECK(classify_gap({1.0, 10.0, false}) == GapClass::kAcceptable);

  GapThresholds bad;
  bad.good_loss_percent = 3.0;  // wider than the acceptable bound
  CHECK_THROWS_AS(classify_gap({0.0, 0.0, false}, bad), std::invalid_argument);
}

TEST_CASE("quality: noiseless fit recovers the generating slopes") {
  const auto& truth = builtin_coefficients(Codec::kDivx, Network::kWifi);
  std::vector<Observation> observations;
  SplitMix64 rng(5150);
  for (int i = 0; i < 24; ++i) {
    const double p = rng.next_double() * 4.0;
    const double j = rng.next_double() * 30.0;
    const bool key = i % 2 == 0;
    const double alpha = key ? truth.alpha_k.value : truth.alpha_w.value;
    const double beta = key ? truth.beta_k.value : truth.beta_w.value;
    observations.push_back(
        Observation{{p, j, key}, truth.q_ideal.value - alpha * p - beta * j});
  }
  const CoefficientFit fit =
      estimate_coefficients(observations, truth.q_ideal.value);
  CHECK(std::abs(fit.key.alpha - truth.alpha_k.value) <= 1e-9);
  CHECK(std::abs(fit.key.beta - truth.beta_k.value) <= 1e-9);
  CHECK(std::abs(fit.usual.alpha - truth.alpha_w.value) <= 1e-9);
  CHECK(std::abs(fit.usual.beta - truth.beta_w.value) <= 1e-9);
  CHECK(fit.key.residual_rms <= 1e-9);
}

TEST_CASE("quality: noisy fit lands inside the published uncertainties") {
  const auto& truth = builtin_coefficients(Codec::kDivx, Network::kWifi);
  std::vector<Observation> observations;
  SplitMix64 rng(424242);
  for (int i = 0; i < 100; ++i) {  // 50 per class
    const double p = rng.next_double() * 8.0;
    const double j = rng.next_double() * 40.0;
    const bool key = i % 2 == 0;
    const double alpha = key ? truth.alpha_k.value : truth.alpha_w.value;
    const double beta = key ? truth.beta_k.value : truth.beta_w.value;
    const double mos = truth.q_ideal.value - alpha * p - beta * j +
                       gaussian(rng, 0.1);
    observations.push_back(Observation{{p, j, key}, mos});
  }
  const CoefficientFit fit =
      estimate_coefficients(observations, truth.q_ideal.value);
  CHECK(std::abs(fit.key.alpha - truth.alpha_k.value) <=
        truth.alpha_k.uncertainty);
  CHECK(std::abs(fit.key.beta - truth.beta_k.value) <=
        truth.beta_k.uncertainty);
  CHECK(std::abs(fit.usual.alpha - truth.alpha_w.value) <=
        truth.alpha_w.uncertainty);
  CHECK(std::abs(fit.usual.beta - truth.beta_w.value) <=
        truth.beta_w.uncertainty);
  CHECK(fit.key.n == 50);
  CHECK(fit.usual.n == 50);
}

TEST_CASE("quality: fit rejects degenerate inputs") {
  const double q = 4.7;
  std::vector<Observation> one = {{{2.0, 10.0, true}, 4.0}};
  CHECK_THROWS_AS(estimate_coefficients(one, q), std::invalid_argument);

  // Enough points per class but all at one (p, j): rank deficient.
  std::vector<Observation> same;
  for (int i = 0; i < 6; ++i) {
    same.push_back(Observation{{2.0, 10.0, i % 2 == 0}, 4.0});
  }
  CHECK_THROWS_AS(estimate_coefficients(same, q), std::invalid_argument);

  // Clamped observations are not fittable.
  std::vector<Observation> clamped;
  for (int i = 0; i < 8; ++i) {
    clamped.push_back(Observation{{i % 4 * 1.0, 10.0, i % 2 == 0}, 1.0});
  }
  CHECK_THROWS_AS(estimate_coefficients(clamped, q), std::invalid_argument);
}

TEST_CASE("quality: coefficient tables round-trip through text") {
  const auto sets = builtin_coefficient_sets();
  const std::string text = format_coefficient_table(sets);
  const auto parsed = parse_coefficient_table(text);
  REQUIRE(parsed.size() == sets.size());
  for (size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].codec == sets[i].codec);
    CHECK(parsed[i].network == sets[i].network);
    CHECK(parsed[i].q_ideal == sets[i].q_ideal);
    CHECK(parsed[i].alpha_k == sets[i].alpha_k);
    CHECK(parsed[i].beta_k == sets[i].beta_k);
    CHECK(parsed[i].alpha_w == sets[i].alpha_w);
    CHECK(parsed[i].beta_w == sets[i].beta_w);
  }
  CHECK_THROWS_AS(parse_coefficient_table("1 DIVX 4.7 0.2"),
                  std::invalid_argument);
}

TEST_CASE("quality: coefficient invariants are enforced") {
  CoefficientSet set = builtin_coefficients(Codec::kDivx, Network::kWifi);
  set.alpha_k.value = 0.01;  // milder than alpha_w
  CHECK_THROWS_AS(set.validate(), std::invalid_argument);
  set = builtin_coefficients(Codec::kDivx, Network::kWifi);
  set.q_ideal.value = 5.5;
  CHECK_THROWS_AS(set.validate(), std::invalid_argument);
}
