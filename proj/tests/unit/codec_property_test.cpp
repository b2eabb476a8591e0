// Seeded property checks over the three sharing schemes.

#include <gtest/gtest.h>

#include <numeric>

#include "snet/codec/sharing.hpp"
#include "snet/random.hpp"

namespace snet::codec {
namespace {

const std::size_t kLengths[] = {0, 1, 15, 16, 17, 4096};

std::vector<SchemeConfig> byte_schemes() {
  SeededRandom rnd(0xC0FFEE);
  return {
      SchemeConfig::xor_scheme(2),
      SchemeConfig::xor_scheme(3),
      SchemeConfig::xor_scheme(5),
      SchemeConfig::additive(2, 256, 1),
      SchemeConfig::additive(4, 257, 1),
      SchemeConfig::additive_unknown_modulus(2, rnd),
      SchemeConfig::shamir(2, 3, 257, 1),
      SchemeConfig::shamir(3, 5),
      SchemeConfig::shamir(3, 5, 18446744073709551557ULL, 7),
  };
}

// Random t-subset of the shares, in random order.
ShareSet pick_subset(const ShareSet& ss, unsigned t, RandomSource& rnd) {
  ShareSet out{ss.scheme, ss.shares, ss.plaintext_len};
  for (std::size_t i = out.shares.size(); i > 1; --i) {
    std::swap(out.shares[i - 1], out.shares[rnd.uniform(i)]);
  }
  out.shares.resize(t);
  return out;
}

TEST(CodecProperty, RoundtripEverySchemeAndLength) {
  SeededRandom rnd(1);
  for (const auto& cfg : byte_schemes()) {
    for (auto len : kLengths) {
      for (int trial = 0; trial < 20; ++trial) {
        const auto m = rnd.bytes(len);
        auto ss = split(m, cfg, rnd);
        auto subset = cfg.kind == SchemeKind::kShamir ? pick_subset(ss, cfg.threshold, rnd) : ss;
        ASSERT_EQ(reconstruct(subset), m) << scheme_kind_name(cfg.kind) << " len=" << len;
      }
    }
  }
}

TEST(CodecProperty, ShareLengthInvariant) {
  SeededRandom rnd(2);
  for (const auto& cfg : byte_schemes()) {
    for (auto len : kLengths) {
      auto ss = split(rnd.bytes(len), cfg, rnd);
      ASSERT_EQ(ss.shares.size(), cfg.shares());
      ASSERT_EQ(ss.plaintext_len, len);
      for (unsigned i = 0; i < ss.shares.size(); ++i) {
        EXPECT_EQ(ss.shares[i].index, i + 1);
        EXPECT_EQ(ss.shares[i].payload.size(), cfg.encoded_length(len));
      }
    }
  }
}

TEST(CodecProperty, DeterministicUnderSeed) {
  for (const auto& cfg : byte_schemes()) {
    SeededRandom a(77), b(77);
    const auto m = to_bytes("determinism check message");
    EXPECT_EQ(split(m, cfg, a), split(m, cfg, b));
  }
}

TEST(CodecProperty, ShamirAnyNMinusTSharesMayBeLost) {
  auto cfg = SchemeConfig::shamir(3, 5, 257, 1);
  SeededRandom rnd(3);
  const auto m = rnd.bytes(100);
  auto ss = split(m, cfg, rnd);
  // Every 3-subset of 5 (i.e. every loss of 2 shares).
  for (unsigned mask = 0; mask < 32; ++mask) {
    if (__builtin_popcount(mask) != 3) continue;
    ShareSet subset{cfg, {}, m.size()};
    for (unsigned i = 0; i < 5; ++i) {
      if (mask & (1u << i)) subset.shares.push_back(ss.shares[i]);
    }
    EXPECT_EQ(reconstruct(subset), m) << mask;
  }
}

// Exact counting over 1-byte messages: fixing any single observed share
// value, every plaintext is explained by exactly one value of each unseen share.
TEST(CodecProperty, XorPerfectHidingCounts) {
  for (unsigned observed = 0; observed < 256; ++observed) {
    std::vector<int> consistent(256, 0);
    for (unsigned other = 0; other < 256; ++other) {
      ++consistent[observed ^ other];
    }
    for (int c : consistent) ASSERT_EQ(c, 1);
  }
  // Cross-check against the implementation: share 2 is a bijection of m.
  for (unsigned s1 = 0; s1 < 256; ++s1) {
    std::vector<bool> seen(256, false);
    for (unsigned m = 0; m < 256; ++m) {
      ScriptedRandom rnd(Bytes{static_cast<std::uint8_t>(s1)});
      auto ss = xor_split(Bytes{static_cast<std::uint8_t>(m)}, 2, rnd);
      auto s2 = ss.shares[1].payload[0];
      ASSERT_FALSE(seen[s2]);
      seen[s2] = true;
    }
  }
}

TEST(CodecProperty, AdditivePerfectHidingCounts) {
  auto cfg = SchemeConfig::additive(2, 256, 1);
  // For each observed second share, count (m, s1) pairs producing it.
  std::vector<std::vector<int>> counts(256, std::vector<int>(256, 0));
  for (unsigned m = 0; m < 256; ++m) {
    for (unsigned s1 = 0; s1 < 256; ++s1) {
      ScriptedRandom rnd;
      rnd.push_element(s1);
      auto ss = additive_split(Bytes{static_cast<std::uint8_t>(m)}, cfg, rnd);
      ++counts[ss.shares[1].payload[0]][m];
    }
  }
  for (const auto& row : counts) {
    for (int c : row) ASSERT_EQ(c, 1);
  }
}

}  // namespace
}  // namespace snet::codec
