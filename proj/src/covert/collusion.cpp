#include "snet/covert/collusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "snet/codec/field.hpp"
#include "snet/codec/sharing.hpp"
#include "snet/error.hpp"
#include "snet/random.hpp"

namespace snet::covert {

namespace {

using codec::Elements;
using codec::SchemeConfig;
using codec::SchemeKind;

constexpr std::uint64_t kBruteForceBudget = 1ULL << 26;

// Candidate plaintexts, each with the number of share completions that
// explain the adversary's view (0 = inconsistent).
using CandidateCounts = std::vector<std::uint64_t>;

struct MessageSpace {
  std::uint64_t size;   // number of candidate plaintext symbols
  unsigned pad_bits;    // element = symbol << pad_bits
};

MessageSpace message_space(const SchemeConfig& cfg) {
  if (cfg.kind == SchemeKind::kShamir && cfg.block_bytes == 0) {
    if (cfg.modulus > (1ULL << 16)) fail(ErrorCode::kInvalidArgument, "element-only field too large to enumerate");
    return {cfg.modulus, 0};
  }
  if (cfg.kind == SchemeKind::kXor) return {256, 0};
  return {256, 8 * (cfg.block_bytes - 1)};
}

CandidateCounts xor_candidates(const std::vector<std::uint64_t>& view, bool complete) {
  std::uint64_t known = 0;
  for (auto v : view) known ^= v;
  CandidateCounts counts(256, 0);
  if (complete) {
    counts[known] = 1;
    return counts;
  }
  // One unseen share is free; the others can be fixed without loss.
  for (std::uint64_t free = 0; free < 256; ++free) ++counts[known ^ free];
  return counts;
}

CandidateCounts additive_candidates(const SchemeConfig& cfg, const MessageSpace& space,
                                    const std::vector<std::uint64_t>& view, bool complete) {
  CandidateCounts counts(space.size, 0);
  if (!cfg.modulus_secret) {
    std::uint64_t known = 0;
    for (auto v : view) known = codec::add_mod(known, v, cfg.modulus);
    for (std::uint64_t sym = 0; sym < space.size; ++sym) {
      const std::uint64_t e = sym << space.pad_bits;
      // With a share missing, the residue (e - known) mod N is always attainable.
      counts[sym] = complete ? (known == e ? 1 : 0) : 1;
    }
    return counts;
  }
  if (!complete) {
    std::fill(counts.begin(), counts.end(), 1);
    return counts;
  }
  // Unknown N: every modulus in the public range above the largest observed
  // share value is possible; keep sums that decode to a well-padded symbol.
  unsigned __int128 sum = 0;
  std::uint64_t max_seen = 0;
  for (auto v : view) {
    sum += v;
    max_seen = std::max(max_seen, v);
  }
  const std::uint64_t lo = std::max(codec::kUnknownModulusLo, max_seen + 1);
  const std::uint64_t pad_mask = (1ULL << space.pad_bits) - 1;
  const auto s = static_cast<std::uint64_t>(sum);
  for (std::uint64_t n = lo; n < codec::kUnknownModulusHi; ++n) {
    const std::uint64_t e = s % n;
    if ((e & pad_mask) != 0) continue;
    const std::uint64_t sym = e >> space.pad_bits;
    if (sym < space.size) ++counts[sym];
  }
  return counts;
}

CandidateCounts shamir_candidates(const SchemeConfig& cfg, const MessageSpace& space,
                                  const std::vector<unsigned>& xs, const std::vector<std::uint64_t>& ys,
                                  bool& brute_forced) {
  const std::uint64_t p = cfg.modulus;
  const unsigned t = cfg.threshold;
  CandidateCounts counts(space.size, 0);
  brute_forced = false;
  if (xs.size() >= t) {
    std::vector<unsigned> idx(xs.begin(), xs.begin() + t);
    std::vector<Elements> pts;
    for (unsigned j = 0; j < t; ++j) pts.push_back(Elements{ys[j]});
    const auto secret = codec::shamir_interpolate_elements(idx, pts, p)[0];
    const std::uint64_t pad_mask = (1ULL << space.pad_bits) - 1;
    if ((secret & pad_mask) == 0 && (secret >> space.pad_bits) < space.size) counts[secret >> space.pad_bits] = 1;
    return counts;
  }
  // Number of free coefficient vectors per candidate secret.
  double work = static_cast<double>(space.size);
  for (unsigned j = 1; j < t; ++j) work *= static_cast<double>(p);
  if (work > static_cast<double>(kBruteForceBudget)) {
    // Fewer than t points plus the secret never over-determine a degree t-1
    // polynomial at distinct nonzero abscissae: each candidate has exactly
    // p^(t-1-|xs|) completions.
    std::uint64_t per = 1;
    for (unsigned j = 0; j + 1 + xs.size() < t; ++j) per *= p;
    std::fill(counts.begin(), counts.end(), per);
    return counts;
  }
  brute_forced = true;
  std::vector<std::uint64_t> coeffs(t, 0);
  for (std::uint64_t sym = 0; sym < space.size; ++sym) {
    coeffs.assign(t, 0);
    coeffs[0] = (sym << space.pad_bits) % p;
    for (;;) {
      bool ok = true;
      for (std::size_t j = 0; j < xs.size() && ok; ++j) {
        std::uint64_t acc = 0;
        for (unsigned c = t; c-- > 0;) acc = codec::add_mod(codec::mul_mod(acc, xs[j], p), coeffs[c], p);
        ok = acc == ys[j];
      }
      if (ok) ++counts[sym];
      // Odometer over r_1..r_{t-1}.
      unsigned c = 1;
      while (c < t && ++coeffs[c] == p) coeffs[c++] = 0;
      if (c == t) break;
    }
  }
  return counts;
}

}  // namespace

CollusionReport collusion_experiment(const SchemeConfig& scheme, const std::vector<unsigned>& colluding,
                                     std::uint64_t trials, RandomSource& rnd) {
  scheme.validate();
  const std::set<unsigned> members(colluding.begin(), colluding.end());
  for (auto i : members) {
    if (i < 1 || i > scheme.shares()) fail(ErrorCode::kInvalidArgument, "colluding index out of range");
  }
  const bool complete = members.size() == scheme.shares();
  const auto space = message_space(scheme);

  CollusionReport report;
  report.trials = trials;
  report.min_candidates = ~0ULL;
  std::uint64_t hits = 0;
  double expected = 0, entropy = 0;

  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t truth = rnd.uniform(space.size);
    const Elements secret{truth << space.pad_bits};
    std::vector<Elements> shares;
    switch (scheme.kind) {
      case SchemeKind::kXor: {
        auto ss = codec::xor_split(Bytes{static_cast<std::uint8_t>(truth)}, scheme.shares(), rnd);
        for (auto& s : ss.shares) shares.push_back(Elements{s.payload[0]});
        break;
      }
      case SchemeKind::kAdditive: shares = codec::additive_split_elements(secret, scheme, rnd); break;
      case SchemeKind::kShamir: shares = codec::shamir_split_elements(secret, scheme, rnd); break;
    }
    std::vector<unsigned> xs;
    std::vector<std::uint64_t> ys;
    for (auto i : members) {
      xs.push_back(i);
      ys.push_back(shares[i - 1][0]);
    }

    CandidateCounts counts;
    bool brute_forced = false;
    switch (scheme.kind) {
      case SchemeKind::kXor: counts = xor_candidates(ys, complete); break;
      case SchemeKind::kAdditive: counts = additive_candidates(scheme, space, ys, complete); break;
      case SchemeKind::kShamir: counts = shamir_candidates(scheme, space, xs, ys, brute_forced); break;
    }

    std::vector<std::uint64_t> consistent;
    std::uint64_t first_weight = 0;
    for (std::uint64_t sym = 0; sym < counts.size(); ++sym) {
      if (counts[sym] == 0) continue;
      if (consistent.empty()) first_weight = counts[sym];
      if (brute_forced && counts[sym] != first_weight) report.candidates_equally_likely = false;
      consistent.push_back(sym);
    }
    if (brute_forced && consistent.size() != counts.size()) report.candidates_equally_likely = false;
    if (consistent.empty()) fail(ErrorCode::kInvalidArgument, "true plaintext inconsistent with view");

    const auto n = static_cast<std::uint64_t>(consistent.size());
    report.min_candidates = std::min(report.min_candidates, n);
    report.max_candidates = std::max(report.max_candidates, n);
    const bool truth_in = std::find(consistent.begin(), consistent.end(), truth) != consistent.end();
    if (truth_in) expected += 1.0 / static_cast<double>(n);
    entropy += std::log2(static_cast<double>(n));
    if (consistent[rnd.uniform(n)] == truth) ++hits;
  }
  if (trials > 0) {
    report.reconstruction_success_rate = static_cast<double>(hits) / static_cast<double>(trials);
    report.expected_success_rate = expected / static_cast<double>(trials);
    report.plaintext_entropy_estimate = entropy / static_cast<double>(trials);
  } else {
    report.min_candidates = 0;
  }
  return report;
}

}  // namespace snet::covert
