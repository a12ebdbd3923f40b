#ifndef VQSIM_CLAIMS_HPP_
#define VQSIM_CLAIMS_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vqsim/codec.hpp"
#include "vqsim/quality.hpp"

namespace vqsim {

struct ClaimCheck {
  enum class Status { kPass, kFail, kInfo };

  Status status = Status::kInfo;
  std::string name;
  std::string detail;
};

// Poor-network duplication benefit, measured: mean over `runs` streams of
// the per-run episode MOS, duplication on vs off, on the "3g-noisy" preset.
struct BenefitResult {
  Codec codec = Codec::kDivx;
  double mean_mos_dup = 0.0;
  double mean_mos_none = 0.0;
  double std_mos_dup = 0.0;
  double std_mos_none = 0.0;
  double overhead_percent = 0.0;
};

BenefitResult poor_network_benefit(Codec codec, int runs, uint64_t seed,
                                   double duration_s = 60.0);

// Where the floor is attainable analytically: the (p, j) region with
// key-hit MOS >= floor under the given coefficients.
struct ClaimRegion {
  double mos_floor = 3.5;
  double max_loss_percent_at_zero_jitter = 0.0;
  double max_jitter_ms_at_zero_loss = 0.0;

  std::string describe(const CoefficientSet& coeffs) const;
};

ClaimRegion claim_region(const CoefficientSet& coeffs, double mos_floor = 3.5);

// The built-in claim checklist: coefficient ratios, ideal-quality ordering,
// duplication overhead bands and the measured poor-network benefit. Pure
// given the seed.
std::vector<ClaimCheck> verify_claims(uint64_t seed = 1);

// One line per check, "PASS/FAIL/INFO name: detail". Returns fail count.
int print_claims(const std::vector<ClaimCheck>& checks, std::ostream& out);

}  // namespace vqsim

#endif  // VQSIM_CLAIMS_HPP_
