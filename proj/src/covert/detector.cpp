#include "snet/covert/detector.hpp"

#include <array>
#include <bit>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "snet/error.hpp"

namespace snet::covert {

double chi_square_critical(double alpha) {
  boost::math::chi_squared dist(255);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

double monobit_critical(double alpha) {
  boost::math::normal dist;
  return boost::math::quantile(boost::math::complement(dist, alpha / 2));
}

RandomnessVerdict randomness_score(ByteView data, double alpha) {
  if (data.size() < kMinDetectorBytes) {
    fail(ErrorCode::kTooShort, "need at least 256 bytes, got " + std::to_string(data.size()));
  }
  std::array<std::uint64_t, 256> hist{};
  std::uint64_t ones = 0;
  for (auto b : data) {
    ++hist[b];
    ones += static_cast<std::uint64_t>(std::popcount(b));
  }
  const double expected = static_cast<double>(data.size()) / 256.0;
  double chi = 0;
  for (auto c : hist) {
    const double d = static_cast<double>(c) - expected;
    chi += d * d / expected;
  }
  const double bits = 8.0 * static_cast<double>(data.size());
  const double z = (2.0 * static_cast<double>(ones) - bits) / std::sqrt(bits);

  RandomnessVerdict v;
  v.chi_square_stat = chi;
  v.monobit_z = z;
  v.flagged_random = chi <= chi_square_critical(alpha) && std::abs(z) <= monobit_critical(alpha);
  return v;
}

}  // namespace snet::covert
