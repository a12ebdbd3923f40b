#include "vqsim/quality.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vqsim/text.hpp"

namespace vqsim {

namespace {

// Built-in model coefficients, (MPEG-2, DivX) x (WiFi, 3G). alpha in MOS
// points per loss percent, beta in MOS points per millisecond of jitter.
constexpr std::array<CoefficientSet, 4> kBuiltinSets = {{
    {Codec::kMpeg2, Network::kWifi,
     {4.2, 0.2},
     {0.15, 0.03},
     {0.011, 0.002},
     {0.04, 0.01},
     {0.003, 0.001}},
    {Codec::kDivx, Network::kWifi,
     {4.7, 0.2},
     {0.27, 0.05},
     {0.013, 0.003},
     {0.13, 0.02},
     {0.01, 0.002}},
    {Codec::kMpeg2, Network::kThreeG,
     {4.2, 0.2},
     {0.005, 0.002},
     {0.005, 0.002},
     {0.004, 0.001},
     {0.003, 0.001}},
    {Codec::kDivx, Network::kThreeG,
     {4.7, 0.2},
     {0.01, 0.003},
     {0.003, 0.001},
     {0.002, 0.0005},
     {0.002, 0.0008}},
}};

void check_sample(const NetworkSample& sample) {
  if (!(sample.loss_percent >= 0.0 && sample.loss_percent <= 100.0)) {
    throw std::invalid_argument("sample: loss_percent must be in [0, 100]");
  }
  if (!(sample.jitter_ms >= 0.0)) {
    throw std::invalid_argument("sample: jitter_ms must be nonnegative");
  }
}

}  // namespace

std::string_view network_token(Network network) {
  return network == Network::kWifi ? "WIFI" : "THREE_G";
}

std::string_view network_name(Network network) {
  return network == Network::kWifi ? "WiFi" : "3G";
}

Network parse_network(std::string_view text) {
  std::string t = to_lower(text);
  if (t == "wifi" || t == "wi-fi") {
    return Network::kWifi;
  }
  if (t == "three_g" || t == "3g") {
    return Network::kThreeG;
  }
  throw std::invalid_argument("unknown network: '" + std::string(text) + "'");
}

void CoefficientSet::validate() const {
  if (!(q_ideal.value > 0.0 && q_ideal.value <= 5.0)) {
    throw std::invalid_argument("coefficients: q_ideal must be in (0, 5]");
  }
  for (const Coeff* c : {&alpha_k, &beta_k, &alpha_w, &beta_w}) {
    if (c->value < 0.0) {
      throw std::invalid_argument("coefficients: slopes must be nonnegative");
    }
  }
  if (alpha_k.value < alpha_w.value || beta_k.value < beta_w.value) {
    throw std::invalid_argument(
        "coefficients: key-frame slopes cannot be milder than usual-frame "
        "slopes");
  }
}

double predict_mos(const NetworkSample& sample, const CoefficientSet& coeffs,
                   const MosScale& scale) {
  check_sample(sample);
  const double alpha =
      sample.key_frame_hit ? coeffs.alpha_k.value : coeffs.alpha_w.value;
  const double beta =
      sample.key_frame_hit ? coeffs.beta_k.value : coeffs.beta_w.value;
  const double mos =
      coeffs.q_ideal.value - alpha * sample.loss_percent - beta * sample.jitter_ms;
  return std::clamp(mos, scale.floor, scale.ceiling);
}

double degradation_ratio(const CoefficientSet& coeffs) {
  if (!(coeffs.alpha_w.value > 0.0)) {
    throw std::invalid_argument("degradation_ratio: alpha_w must be positive");
  }
  return coeffs.alpha_k.value / coeffs.alpha_w.value;
}

std::string_view gap_class_name(GapClass gap_class) {
  switch (gap_class) {
    case GapClass::kGood:
      return "Good";
    case GapClass::kAcceptable:
      return "Acceptable";
    case GapClass::kPoor:
      return "Poor";
  }
  return "Poor";
}

void GapThresholds::validate() const {
  if (!(good_loss_percent <= acceptable_loss_percent &&
        good_jitter_ms <= acceptable_jitter_ms)) {
    throw std::invalid_argument("gap thresholds: bounds must be nested");
  }
}

GapClass classify_gap(const NetworkSample& sample,
                      const GapThresholds& thresholds) {
  thresholds.validate();
  check_sample(sample);
  if (sample.loss_percent > thresholds.acceptable_loss_percent ||
      sample.jitter_ms > thresholds.acceptable_jitter_ms) {
    return GapClass::kPoor;
  }
  if (sample.loss_percent <= thresholds.good_loss_percent &&
      sample.jitter_ms <= thresholds.good_jitter_ms) {
    return GapClass::kGood;
  }
  return GapClass::kAcceptable;
}

const CoefficientSet& builtin_coefficients(Codec codec, Network network) {
  for (const CoefficientSet& set : kBuiltinSets) {
    if (set.codec == codec && set.network == network) {
      return set;
    }
  }
  throw std::invalid_argument("no built-in coefficients for that pair");
}

std::span<const CoefficientSet> builtin_coefficient_sets() {
  return kBuiltinSets;
}

namespace {

// 2x2 least squares for y = alpha*p + beta*j through the origin.
SlopeFit fit_class(std::span<const Observation* const> obs, double q_ideal) {
  double spp = 0, sjj = 0, spj = 0, spy = 0, sjy = 0;
  for (const Observation* o : obs) {
    const double p = o->sample.loss_percent;
    const double j = o->sample.jitter_ms;
    const double y = q_ideal - o->mos;
    spp += p * p;
    sjj += j * j;
    spj += p * j;
    spy += p * y;
    sjy += j * y;
  }
  const double det = spp * sjj - spj * spj;
  const double norm = std::max(spp, sjj);
  if (!(det > 1e-12 * std::max(1.0, norm * norm))) {
    throw std::invalid_argument(
        "estimate_coefficients: rank-deficient observations (all share one "
        "(p, j) direction)");
  }
  SlopeFit fit;
  fit.alpha = (spy * sjj - sjy * spj) / det;
  fit.beta = (sjy * spp - spy * spj) / det;
  fit.n = obs.size();
  double ss = 0;
  for (const Observation* o : obs) {
    const double r = (q_ideal - o->mos) - fit.alpha * o->sample.loss_percent -
                     fit.beta * o->sample.jitter_ms;
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(obs.size()));
  return fit;
}

size_t distinct_points(std::span<const Observation* const> obs) {
  size_t distinct = 0;
  for (size_t i = 0; i < obs.size(); ++i) {
    bool seen = false;
    for (size_t k = 0; k < i; ++k) {
      if (obs[k]->sample.loss_percent == obs[i]->sample.loss_percent &&
          obs[k]->sample.jitter_ms == obs[i]->sample.jitter_ms) {
        seen = true;
        break;
      }
    }
    if (!seen) {
      ++distinct;
    }
  }
  return distinct;
}

}  // namespace

CoefficientFit estimate_coefficients(std::span<const Observation> observations,
                                     double q_ideal, const MosScale& scale) {
  std::vector<const Observation*> key, usual;
  for (const Observation& o : observations) {
    check_sample(o.sample);
    if (!(o.mos > scale.floor && o.mos <= scale.ceiling)) {
      throw std::invalid_argument(
          "estimate_coefficients: observation outside the open MOS range "
          "(clamped scores cannot be fitted)");
    }
    (o.sample.key_frame_hit ? key : usual).push_back(&o);
  }
  for (const auto* cls : {&key, &usual}) {
    if (cls->size() < 3) {
      throw std::invalid_argument(
          "estimate_coefficients: need at least 3 observations per class");
    }
    if (distinct_points(*cls) < 2) {
      throw std::invalid_argument(
          "estimate_coefficients: rank-deficient observations (all share one "
          "(p, j) direction)");
    }
  }
  return CoefficientFit{fit_class(key, q_ideal), fit_class(usual, q_ideal)};
}

std::string format_coefficient_table(std::span<const CoefficientSet> sets) {
  std::ostringstream out;
  for (Network network : {Network::kWifi, Network::kThreeG}) {
    bool header = false;
    int row = 0;
    for (const CoefficientSet& set : sets) {
      if (set.network != network) {
        continue;
      }
      if (!header) {
        out << "# network " << network_token(network) << "\n";
        out << "# N codec q_ideal +- alpha_k +- beta_k +- alpha_w +- beta_w +-\n";
        header = true;
      }
      out << ++row << ' ' << codec_token(set.codec);
      for (const Coeff* c :
           {&set.q_ideal, &set.alpha_k, &set.beta_k, &set.alpha_w, &set.beta_w}) {
        out << ' ' << format_double(c->value) << ' '
            << format_double(c->uncertainty);
      }
      out << '\n';
    }
  }
  return out.str();
}

std::vector<CoefficientSet> parse_coefficient_table(std::string_view text) {
  std::vector<CoefficientSet> sets;
  Network network = Network::kWifi;
  bool network_seen = false;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    auto tokens = split_tokens(line);
    if (tokens.empty()) {
      continue;
    }
    if (tokens[0] == "#") {
      if (tokens.size() >= 3 && tokens[1] == "network") {
        network = parse_network(tokens[2]);
        network_seen = true;
      }
      continue;
    }
    if (!network_seen) {
      throw std::invalid_argument(
          "coefficient table: data before any '# network' header");
    }
    if (tokens.size() != 12) {
      throw std::invalid_argument("coefficient table: expected 12 columns, got " +
                                  std::to_string(tokens.size()));
    }
    CoefficientSet set;
    set.network = network;
    set.codec = parse_codec(tokens[1]);
    Coeff* fields[] = {&set.q_ideal, &set.alpha_k, &set.beta_k, &set.alpha_w,
                       &set.beta_w};
    for (size_t f = 0; f < 5; ++f) {
      fields[f]->value = parse_double(tokens[2 + 2 * f]);
      fields[f]->uncertainty = parse_double(tokens[3 + 2 * f]);
    }
    set.validate();
    sets.push_back(set);
  }
  return sets;
}

}  // namespace vqsim
