#pragma once

#include "snet/bytes.hpp"

namespace snet::covert {

inline constexpr double kDefaultAlpha = 0.01;
inline constexpr std::size_t kMinDetectorBytes = 256;

struct RandomnessVerdict {
  double chi_square_stat = 0;  // 256-bin byte histogram, 255 d.o.f.
  double monobit_z = 0;        // (ones - zeros) / sqrt(bits)
  bool flagged_random = false;
};

// Classical uniformity screen: a file is flagged as random when neither the
// byte chi-square test nor the monobit test rejects uniformity at `alpha`.
// Throws kTooShort below 256 bytes.
RandomnessVerdict randomness_score(ByteView data, double alpha = kDefaultAlpha);

// Upper-tail chi-square critical value for 255 d.o.f. and two-sided normal
// critical value used by randomness_score.
double chi_square_critical(double alpha);
double monobit_critical(double alpha);

}  // namespace snet::covert
