#pragma once

#include <cstdint>
#include <vector>

#include "snet/codec/scheme.hpp"

namespace snet {
class RandomSource;
}

namespace snet::covert {

struct CollusionReport {
  std::uint64_t trials = 0;
  // Observed rate at which the adversary's guess (uniform over the
  // candidates consistent with its view) equals the true plaintext.
  double reconstruction_success_rate = 0;
  // Exact expected success rate: mean of 1 / |candidates| over trials.
  double expected_success_rate = 0;
  // Mean log2 |candidates|, in bits.
  double plaintext_entropy_estimate = 0;
  std::uint64_t min_candidates = 0;
  std::uint64_t max_candidates = 0;
  // SHAMIR brute force only: every candidate secret explained by the same
  // number of polynomials on every trial.
  bool candidates_equally_likely = true;
};

// Splits random one-symbol messages (one byte, or one field element for
// element-only Shamir configurations), hands the adversary the shares listed
// in `colluding` and, in unknown-modulus mode, nothing about N, then counts
// the plaintexts consistent with that view by exhaustive search.
CollusionReport collusion_experiment(const codec::SchemeConfig& scheme,
                                     const std::vector<unsigned>& colluding, std::uint64_t trials,
                                     RandomSource& rnd);

}  // namespace snet::covert
