#ifndef VQSIM_QUALITY_HPP_
#define VQSIM_QUALITY_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vqsim/codec.hpp"

namespace vqsim {

enum class Network { kWifi, kThreeG };

std::string_view network_token(Network network);  // "WIFI" / "THREE_G"
std::string_view network_name(Network network);   // "WiFi" / "3G"
Network parse_network(std::string_view text);

// A fitted value with its reported +/- uncertainty.
struct Coeff {
  double value = 0.0;
  double uncertainty = 0.0;

  bool operator==(const Coeff&) const = default;
};

// Linear degradation model for one (codec, network) pair:
//
//   mos = q_ideal - alpha * loss_percent - beta * jitter_ms
//
// with the (alpha_k, beta_k) slopes applying when the loss episode damaged a
// key frame and (alpha_w, beta_w) otherwise. alpha is MOS points per percent
// of packet loss; beta is MOS points per millisecond of jitter.
struct CoefficientSet {
  Codec codec = Codec::kMpeg2;
  Network network = Network::kWifi;
  Coeff q_ideal;
  Coeff alpha_k, beta_k;
  Coeff alpha_w, beta_w;

  // q_ideal in (0, 5], slopes nonnegative, key slopes never milder than
  // usual-frame slopes. Throws std::invalid_argument.
  void validate() const;
};

// Measured network conditions behind one quality estimate.
struct NetworkSample {
  double loss_percent = 0.0;  // in [0, 100]
  double jitter_ms = 0.0;
  bool key_frame_hit = false;
};

// MOS is conventionally 1 (bad) to 5 (excellent); the affine model can leave
// that range, so predictions clamp to it. The floor is adjustable.
struct MosScale {
  double floor = 1.0;
  double ceiling = 5.0;
};

double predict_mos(const NetworkSample& sample, const CoefficientSet& coeffs,
                   const MosScale& scale = {});

// How much faster quality decays when key frames are hit: alpha_k / alpha_w.
// Rejects alpha_w = 0.
double degradation_ratio(const CoefficientSet& coeffs);

enum class GapClass { kGood, kAcceptable, kPoor };

std::string_view gap_class_name(GapClass gap_class);

// Two nested (loss, jitter) bounds. Defaults are inferred, not published:
// they put a lossless ~20 ms network in Good and a 40 ms-jitter one in
// Acceptable.
struct GapThresholds {
  double good_loss_percent = 0.5;
  double good_jitter_ms = 25.0;
  double acceptable_loss_percent = 2.0;
  double acceptable_jitter_ms = 50.0;

  void validate() const;  // rejects non-nested bounds
};

// Worst dimension wins: Good needs both dimensions inside the Good bounds,
// one dimension beyond the Acceptable bounds makes the whole sample Poor.
GapClass classify_gap(const NetworkSample& sample,
                      const GapThresholds& thresholds = {});

// Built-in tables for (MPEG-2, DivX) x (WiFi, 3G).
const CoefficientSet& builtin_coefficients(Codec codec, Network network);
std::span<const CoefficientSet> builtin_coefficient_sets();

struct Observation {
  NetworkSample sample;
  double mos = 0.0;
};

struct SlopeFit {
  double alpha = 0.0;
  double beta = 0.0;
  double residual_rms = 0.0;
  size_t n = 0;
};

struct CoefficientFit {
  SlopeFit key;    // from key_frame_hit observations
  SlopeFit usual;  // from the rest
};

// Least-squares fit of mos = q_ideal - alpha*p - beta*j per class with
// q_ideal held fixed. Requires >= 3 observations per class spanning at least
// two distinct (p, j) points, and no clamped observations (mos must lie
// strictly above the scale floor). Throws std::invalid_argument on rank
// deficiency (all observations sharing one (p, j) direction).
CoefficientFit estimate_coefficients(std::span<const Observation> observations,
                                     double q_ideal,
                                     const MosScale& scale = {});

// Plain-text tabular form, one table block per network, columns in the
// order codec, q_ideal, alpha_k, beta_k, alpha_w, beta_w (value then
// uncertainty). Round-trips exactly.
std::string format_coefficient_table(std::span<const CoefficientSet> sets);
std::vector<CoefficientSet> parse_coefficient_table(std::string_view text);

}  // namespace vqsim

#endif  // VQSIM_QUALITY_HPP_
