#include <gtest/gtest.h>

#include <cmath>

#include "snet/codec/sharing.hpp"
#include "snet/covert/collusion.hpp"
#include "snet/covert/detector.hpp"
#include "snet/covert/stego.hpp"
#include "snet/error.hpp"
#include "snet/random.hpp"

namespace snet::covert {
namespace {

using codec::SchemeConfig;

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kInvalidArgument;
}

Bytes english_text(std::size_t n) {
  const std::string para =
      "It was a bright cold day in early spring, and the river ran high and brown under the old "
      "stone bridge. Children walked along the bank with their dogs, talking about school, the "
      "weather, and the small boat that had drifted past the mill the evening before. Nobody knew "
      "whose it was, but everyone agreed that it had been painted blue not long ago.\n";
  std::string out;
  while (out.size() < n) out += para;
  out.resize(n);
  return to_bytes(out);
}

TEST(Detector, CriticalValues) {
  // Reference quantiles: chi2_{0.99}(255) ~ 310.457, z_{0.995} ~ 2.5758.
  EXPECT_NEAR(chi_square_critical(0.01), 310.457, 0.01);
  EXPECT_NEAR(monobit_critical(0.01), 2.5758, 1e-3);
}

// Uniform input passes both tests with probability (1 - a)^2 ~ 1 - 2a, so the
// pass rate is checked against 1 - 2a less three binomial standard errors.
constexpr int kDetectorTrials = 1000;
const double kMinPassRate = 1 - 2 * kDefaultAlpha - 3 * std::sqrt(0.02 * 0.98 / kDetectorTrials);

TEST(Detector, SeededGeneratorOutputLooksRandom) {
  int flagged = 0;
  for (std::uint64_t seed = 1; seed <= kDetectorTrials; ++seed) {
    SeededRandom rnd(seed);
    if (randomness_score(rnd.bytes(4096)).flagged_random) ++flagged;
  }
  EXPECT_GE(flagged, kMinPassRate * kDetectorTrials);
}

TEST(Detector, EnglishTextIsNotRandom) {
  auto v = randomness_score(english_text(4096));
  EXPECT_FALSE(v.flagged_random);
  EXPECT_GT(v.chi_square_stat, 10000);
}

TEST(Detector, ConstantBytesAreNotRandom) {
  auto v = randomness_score(Bytes(4096, 0));
  EXPECT_FALSE(v.flagged_random);
  // All 4096 bytes in one bin: (4096-16)^2/16 + 255*16.
  EXPECT_DOUBLE_EQ(v.chi_square_stat, (4096.0 - 16) * (4096.0 - 16) / 16 + 255 * 16.0);
  EXPECT_DOUBLE_EQ(v.monobit_z, -std::sqrt(8.0 * 4096));
}

TEST(Detector, TooShort) {
  EXPECT_EQ(error_of([] { randomness_score(Bytes(255, 1)); }), ErrorCode::kTooShort);
}

TEST(Detector, RawSharePayloadsLookRandom) {
  const auto text = english_text(4096);
  int flagged_xor = 0, flagged_add = 0;
  for (std::uint64_t seed = 1; seed <= kDetectorTrials; ++seed) {
    SeededRandom rnd(seed);
    auto xs = codec::xor_split(text, 2, rnd);
    flagged_xor += randomness_score(xs.shares[1].payload).flagged_random;
    auto as = codec::additive_split(text, SchemeConfig::additive(2, 256, 1), rnd);
    flagged_add += randomness_score(as.shares[1].payload).flagged_random;
  }
  EXPECT_GE(flagged_xor, kMinPassRate * kDetectorTrials);
  EXPECT_GE(flagged_add, kMinPassRate * kDetectorTrials);
}

TEST(Detector, NarrowFieldEncodingsAreDetectable) {
  // Minimal-width encodings of p = 2^61 - 1 leave top bits of every eighth
  // byte zero; a field just below 2^64 does not.
  const auto text = english_text(4096);
  SeededRandom rnd(8);
  auto narrow = codec::shamir_split(text, SchemeConfig::shamir(2, 3), rnd);
  EXPECT_FALSE(randomness_score(narrow.shares[0].payload).flagged_random);
  auto wide = codec::shamir_split(text, SchemeConfig::shamir(2, 3, 18446744073709551557ULL, 7), rnd);
  EXPECT_TRUE(randomness_score(wide.shares[0].payload).flagged_random);
}

CoverImage small_cover(std::uint32_t w, std::uint32_t h, std::uint64_t seed) {
  return synthetic_natural_cover(w, h, seed);
}

TEST(Stego, RoundtripTouchesOnlyLowBits) {
  SeededRandom rnd(3);
  for (std::size_t len : {0, 1, 17, 300, 1000}) {
    auto cover = small_cover(64, 48, len);
    auto payload = rnd.bytes(len);
    auto stego = embed_share(payload, cover);
    EXPECT_EQ(extract_share(stego), payload);
    ASSERT_EQ(stego.rgb.size(), cover.rgb.size());
    for (std::size_t i = 0; i < cover.rgb.size(); ++i) {
      ASSERT_EQ(stego.rgb[i] & 0xFE, cover.rgb[i] & 0xFE);
      if (i >= kLengthPrefixBits + 8 * len) {
        ASSERT_EQ(stego.rgb[i], cover.rgb[i]);
      }
    }
  }
}

TEST(Stego, FullCapacityRoundtrip) {
  auto cover = small_cover(40, 30, 9);
  const std::size_t max_payload = (cover.capacity_bits() - 64) / 8;
  SeededRandom rnd(4);
  auto payload = rnd.bytes(max_payload);
  EXPECT_EQ(extract_share(embed_share(payload, cover)), payload);
  EXPECT_EQ(error_of([&] { embed_share(rnd.bytes(max_payload + 1), cover); }),
            ErrorCode::kInsufficientCapacity);
}

TEST(Stego, EmptyPayloadWritesZeroPrefixOnly) {
  auto cover = small_cover(16, 16, 1);
  auto stego = embed_share({}, cover);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(stego.rgb[i] & 1, 0);
  EXPECT_TRUE(std::equal(stego.rgb.begin() + 64, stego.rgb.end(), cover.rgb.begin() + 64));
}

TEST(Stego, InsufficientCapacity) {
  // 32 x 32 x 3 = 3072 bits < 64 + 8 * 1024.
  auto cover = small_cover(32, 32, 2);
  EXPECT_EQ(error_of([&] { embed_share(Bytes(1024, 0xAA), cover); }), ErrorCode::kInsufficientCapacity);
}

TEST(Stego, ZeroLowBitPlaneIsEmptyPayload) {
  CoverImage img{8, 8, Bytes(192, 0xF0)};
  EXPECT_TRUE(extract_share(img).empty());
}

TEST(Stego, OversizedLengthPrefix) {
  CoverImage img{64, 64, Bytes(3 * 64 * 64, 0)};
  // 2^40 as a 64-bit big-endian prefix: bit 40 counted from the LSB.
  img.rgb[63 - 40] = 1;
  EXPECT_EQ(error_of([&] { extract_share(img); }), ErrorCode::kMalformedLength);
}

TEST(Bitmap, LayoutIsStandard) {
  CoverImage img{3, 2, {}};
  // Top row red, green, blue; bottom row white, black, grey.
  img.rgb = {255, 0, 0, 0, 255, 0, 0, 0, 255, 255, 255, 255, 0, 0, 0, 128, 128, 128};
  auto file = encode_bmp(img);
  // 3 pixels * 3 bytes = 9, padded to 12; two rows.
  ASSERT_EQ(file.size(), 54u + 24u);
  EXPECT_EQ(file[0], 'B');
  EXPECT_EQ(file[1], 'M');
  EXPECT_EQ(file[2], 78);   // file size, little-endian
  EXPECT_EQ(file[10], 54);  // pixel offset
  EXPECT_EQ(file[14], 40);
  EXPECT_EQ(file[28], 24);
  // First stored row is the bottom row, BGR order.
  EXPECT_EQ(file[54], 255);
  EXPECT_EQ(file[54 + 6], 128);
  EXPECT_EQ(file[54 + 9], 0);  // padding
  // Second stored row: red pixel stored as B=0, G=0, R=255.
  EXPECT_EQ(file[66], 0);
  EXPECT_EQ(file[68], 255);
  EXPECT_EQ(decode_bmp(file), img);
}

TEST(Bitmap, RejectsOtherFormats) {
  auto file = encode_bmp(small_cover(4, 4, 1));
  file[28] = 32;
  EXPECT_EQ(error_of([&] { decode_bmp(file); }), ErrorCode::kMalformedImage);
  EXPECT_EQ(error_of([] { decode_bmp(Bytes(10, 0)); }), ErrorCode::kMalformedImage);
}

TEST(Bitmap, NaturalCoversAndTheirStegoAreNotRandom) {
  SeededRandom rnd(5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto cover = small_cover(128, 96, seed);
    auto payload = rnd.bytes(2048);
    auto stego = encode_bmp(embed_share(payload, cover));
    EXPECT_FALSE(randomness_score(stego).flagged_random) << seed;
  }
}

TEST(Collusion, CompleteXorSetReconstructs) {
  SeededRandom rnd(1);
  auto r = collusion_experiment(SchemeConfig::xor_scheme(2), {1, 2}, 500, rnd);
  EXPECT_DOUBLE_EQ(r.reconstruction_success_rate, 1.0);
  EXPECT_EQ(r.max_candidates, 1u);
}

TEST(Collusion, IncompleteXorSetIsGuessing) {
  SeededRandom rnd(2);
  auto r = collusion_experiment(SchemeConfig::xor_scheme(3), {1, 2}, 10000, rnd);
  EXPECT_EQ(r.min_candidates, 256u);
  EXPECT_EQ(r.max_candidates, 256u);
  EXPECT_DOUBLE_EQ(r.expected_success_rate, 1.0 / 256);
  EXPECT_DOUBLE_EQ(r.plaintext_entropy_estimate, 8.0);
  // Binomial(10^4, 1/256): mean 39.06, sd 6.24; allow 5 sd.
  EXPECT_NEAR(r.reconstruction_success_rate * 10000, 10000.0 / 256, 5 * 6.24);
}

TEST(Collusion, ShamirSingleShareHidesEverySecret) {
  SeededRandom rnd(3);
  auto r = collusion_experiment(SchemeConfig::shamir(2, 3, 7, 0), {1}, 1000, rnd);
  EXPECT_EQ(r.min_candidates, 7u);
  EXPECT_EQ(r.max_candidates, 7u);
  EXPECT_TRUE(r.candidates_equally_likely);
  EXPECT_NEAR(r.expected_success_rate, 1.0 / 7, 1e-12);
}

TEST(Collusion, ShamirThresholdReconstructs) {
  SeededRandom rnd(4);
  auto r = collusion_experiment(SchemeConfig::shamir(2, 3, 7, 0), {2, 3}, 200, rnd);
  EXPECT_DOUBLE_EQ(r.reconstruction_success_rate, 1.0);
  auto bytes = collusion_experiment(SchemeConfig::shamir(3, 5, 257, 1), {1, 4, 5}, 200, rnd);
  EXPECT_DOUBLE_EQ(bytes.reconstruction_success_rate, 1.0);
}

TEST(Collusion, ShamirBelowThresholdByteMessages) {
  SeededRandom rnd(5);
  auto r = collusion_experiment(SchemeConfig::shamir(3, 5, 257, 1), {2, 5}, 5, rnd);
  EXPECT_EQ(r.min_candidates, 256u);
  EXPECT_TRUE(r.candidates_equally_likely);
}

TEST(Collusion, KnownModulusAdditive) {
  SeededRandom rnd(6);
  auto full = collusion_experiment(SchemeConfig::additive(3, 256, 1), {1, 2, 3}, 300, rnd);
  EXPECT_DOUBLE_EQ(full.reconstruction_success_rate, 1.0);
  auto partial = collusion_experiment(SchemeConfig::additive(3, 256, 1), {1, 3}, 300, rnd);
  EXPECT_EQ(partial.min_candidates, 256u);
}

TEST(Collusion, UnknownModulusResistsFullCollusion) {
  SeededRandom rnd(7);
  auto cfg = SchemeConfig::additive_unknown_modulus(2, rnd);
  auto r = collusion_experiment(cfg, {1, 2}, 20, rnd);
  // Without N the full share set is often ambiguous, but a small sum that
  // never wrapped pins the plaintext, so the advantage stays well above chance.
  EXPECT_GT(r.max_candidates, 16u);
  EXPECT_LT(r.expected_success_rate, 1.0);
  EXPECT_GT(r.expected_success_rate, 1.0 / 256);
}

TEST(Collusion, RejectsBadIndices) {
  SeededRandom rnd(8);
  EXPECT_EQ(error_of([&] { collusion_experiment(SchemeConfig::xor_scheme(2), {3}, 1, rnd); }),
            ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace snet::covert
