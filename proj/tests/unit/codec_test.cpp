#include <gtest/gtest.h>

#include <sstream>

#include "snet/codec/field.hpp"
#include "snet/codec/sharing.hpp"
#include "snet/error.hpp"
#include "snet/random.hpp"

namespace snet::codec {
namespace {

// Rows of the published sample-text table, transcribed bit for bit.
constexpr const char* kTableRowM =
    "01001100 01101001 01100110 01100101 00100000 01101001 01101001 00100000 01100111 01101111 01101111 01100100";
constexpr const char* kTableRowM1 =
    "10010101 01010011 01111101 11110000 10101011 10011100 10111100 10101100 10110101 10111110 11101001 10110111";
constexpr const char* kTableRowM2 =
    "11011001 00111010 00011011 10010101 10001011 11110101 11010101 10001100 11010010 11010001 10000110 11010011";

Bytes parse_bits(const char* row) {
  std::istringstream in(row);
  Bytes out;
  std::string word;
  while (in >> word) out.push_back(static_cast<std::uint8_t>(std::stoi(word, nullptr, 2)));
  return out;
}

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

TEST(BlockEncode, OneByteBlocksAreByteValues) {
  auto cfg = SchemeConfig::additive(2, 256, 1);
  EXPECT_EQ(block_encode(to_bytes("Life"), cfg), (Elements{76, 105, 102, 101}));
}

TEST(BlockEncode, EmptyInput) {
  auto cfg = SchemeConfig::additive(2, 256, 1);
  EXPECT_TRUE(block_encode({}, cfg).empty());
  EXPECT_TRUE(block_decode({}, cfg, 0).empty());
}

TEST(BlockEncode, PartialFinalBlockIsZeroPaddedOnTheRight) {
  auto cfg = SchemeConfig::additive(2, 1ULL << 24, 3);
  const Bytes m{0x01, 0x02, 0x03, 0x04};
  auto e = block_encode(m, cfg);
  EXPECT_EQ(e, (Elements{0x010203, 0x040000}));
  EXPECT_EQ(block_decode(e, cfg, 4), m);
}

TEST(XorSplit, SampleTextTableVector) {
  const auto m = parse_bits(kTableRowM);
  const auto m1 = parse_bits(kTableRowM1);
  const auto m2 = parse_bits(kTableRowM2);
  ASSERT_EQ(m.size(), 12u);
  ScriptedRandom rnd(m1);
  auto ss = xor_split(m, 2, rnd);
  ASSERT_EQ(ss.shares.size(), 2u);
  EXPECT_EQ(ss.shares[0].payload, m1);
  EXPECT_EQ(ss.shares[1].payload, m2);
  EXPECT_EQ(ss.shares[1].payload[0], 0x4C ^ 0x95);
  EXPECT_EQ(xor_reconstruct(ss), m);
}

TEST(XorSplit, AsciiStringDiffersFromTableOnlyAtSeventhByte) {
  // The printed m row carries 0x69 where ASCII "Life is good" has 's' (0x73).
  const auto table_m = parse_bits(kTableRowM);
  const auto ascii = to_bytes("Life is good");
  for (std::size_t i = 0; i < ascii.size(); ++i) {
    if (i == 6) {
      EXPECT_EQ(table_m[i], 0x69);
      EXPECT_EQ(ascii[i], 0x73);
    } else {
      EXPECT_EQ(table_m[i], ascii[i]) << i;
    }
  }
  ScriptedRandom rnd(parse_bits(kTableRowM1));
  auto ss = xor_split(ascii, 2, rnd);
  EXPECT_EQ(ss.shares[1].payload[6], 0xBC ^ 0x73);
  EXPECT_EQ(xor_reconstruct(ss), ascii);
}

TEST(XorSplit, ZeroMessageCopiesFirstShare) {
  SeededRandom rnd(7);
  auto ss = xor_split(Bytes(64, 0), 2, rnd);
  EXPECT_EQ(ss.shares[0].payload, ss.shares[1].payload);
}

TEST(XorSplit, SharesDrawnInOrderFromRandomStream) {
  SeededRandom a(99), b(99);
  const auto m = to_bytes("abcdef");
  auto ss = xor_split(m, 3, a);
  auto stream = b.bytes(12);
  EXPECT_EQ(ss.shares[0].payload, Bytes(stream.begin(), stream.begin() + 6));
  EXPECT_EQ(ss.shares[1].payload, Bytes(stream.begin() + 6, stream.end()));
}

TEST(XorReconstruct, EvenNumberOfIdenticalSharesIsZero) {
  ShareSet ss{SchemeConfig::xor_scheme(4), {}, 5};
  for (unsigned i = 1; i <= 4; ++i) ss.shares.push_back({i, to_bytes("hello")});
  EXPECT_EQ(xor_reconstruct(ss), Bytes(5, 0));
}

TEST(XorReconstruct, MissingShare) {
  SeededRandom rnd(1);
  auto ss = xor_split(to_bytes("secret"), 3, rnd);
  ss.shares.pop_back();
  EXPECT_EQ(error_of([&] { xor_reconstruct(ss); }), ErrorCode::kMissingShare);
}

TEST(XorReconstruct, LengthMismatch) {
  SeededRandom rnd(1);
  auto ss = xor_split(to_bytes("secret"), 2, rnd);
  ss.shares[1].payload.push_back(0);
  EXPECT_EQ(error_of([&] { xor_reconstruct(ss); }), ErrorCode::kLengthMismatch);
}

TEST(AdditiveSplit, HandComputedResidue) {
  // 100 = 200 + 156 (mod 256)
  auto cfg = SchemeConfig::additive(2, 256, 1);
  ScriptedRandom rnd;
  rnd.push_elements({200});
  auto ss = additive_split(Bytes{100}, cfg, rnd);
  EXPECT_EQ(ss.shares[0].payload, Bytes{200});
  EXPECT_EQ(ss.shares[1].payload, Bytes{156});
  EXPECT_EQ(additive_reconstruct(ss, cfg), Bytes{100});
}

TEST(AdditiveSplit, ZeroFirstShareLeavesSecret) {
  auto cfg = SchemeConfig::additive(2, 256, 1);
  const auto m = to_bytes("identity");
  ScriptedRandom rnd;
  for (std::size_t i = 0; i < m.size(); ++i) rnd.push_element(0);
  auto ss = additive_split(m, cfg, rnd);
  EXPECT_EQ(ss.shares[1].payload, m);
}

TEST(AdditiveSplit, SmallModulusRoundtrip) {
  // A byte block needs N >= 256; N = 97 is exercised through the element API.
  EXPECT_EQ(error_of([] { SchemeConfig::additive(3, 97, 1); }), ErrorCode::kInvalidConfig);
  auto cfg = SchemeConfig::additive(3, 257, 1);
  SeededRandom rnd(5);
  auto m = rnd.bytes(64);
  EXPECT_EQ(additive_reconstruct(additive_split(m, cfg, rnd), cfg), m);
}

TEST(AdditiveSplit, ElementLevelModulus97) {
  SchemeConfig cfg;
  cfg.kind = SchemeKind::kAdditive;
  cfg.share_count = 3;
  cfg.modulus = 97;
  SeededRandom rnd(11);
  Elements secrets;
  for (int i = 0; i < 64; ++i) secrets.push_back(rnd.uniform(97));
  auto parts = additive_split_elements(secrets, cfg, rnd);
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(additive_combine_elements(parts, 97), secrets);
}

TEST(AdditiveReconstruct, ZeroShares) {
  auto cfg = SchemeConfig::additive(2, 256, 1);
  ShareSet ss{cfg, {{1, Bytes(4, 0)}, {2, Bytes(4, 0)}}, 4};
  EXPECT_EQ(additive_reconstruct(ss, cfg), Bytes(4, 0));
}

TEST(AdditiveReconstruct, WrongModulusGarblesSomeMessage) {
  // Split under N = 251 (with 1-byte values only valid below 251), rebuild
  // under N' = 256: exhaustive over all messages and first shares.
  SchemeConfig split_cfg;
  split_cfg.kind = SchemeKind::kAdditive;
  split_cfg.share_count = 2;
  split_cfg.modulus = 251;
  split_cfg.block_bytes = 1;
  auto wrong = SchemeConfig::additive(2, 256, 1);
  int garbled = 0;
  for (unsigned m = 0; m < 251; ++m) {
    for (unsigned s1 = 0; s1 < 251; ++s1) {
      ScriptedRandom rnd;
      rnd.push_element(s1);
      auto parts = additive_split_elements(Elements{m}, split_cfg, rnd);
      ShareSet ss{wrong, {{1, Bytes{static_cast<std::uint8_t>(parts[0][0])}},
                          {2, Bytes{static_cast<std::uint8_t>(parts[1][0])}}}, 1};
      if (additive_reconstruct(ss, wrong) != Bytes{static_cast<std::uint8_t>(m)}) ++garbled;
    }
  }
  // (s1 + s2) wraps past 251 exactly when s1 > m; each such pair decodes off by 5.
  EXPECT_EQ(garbled, 251 * 250 / 2);
}

TEST(AdditiveSplit, RejectsBlockWiderThanModulus) {
  EXPECT_EQ(error_of([] { SchemeConfig::additive(2, 255, 1); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(error_of([] { SchemeConfig::additive(2, 1 << 16, 3); }), ErrorCode::kInvalidConfig);
}

TEST(ShamirSplit, HandEvaluatedLine) {
  // f(x) = 3 + 4x over F_7.
  auto cfg = SchemeConfig::shamir(2, 3, 7, 0);
  ScriptedRandom rnd;
  rnd.push_elements({4});
  auto shares = shamir_split_elements(Elements{3}, cfg, rnd);
  EXPECT_EQ(shares[0], Elements{0});
  EXPECT_EQ(shares[1], Elements{4});
  EXPECT_EQ(shares[2], Elements{1});
}

TEST(ShamirReconstruct, HandSolvedPairs) {
  const unsigned a[] = {1, 2};
  const Elements sa[] = {{0}, {4}};
  EXPECT_EQ(shamir_interpolate_elements(a, sa, 7), Elements{3});
  const unsigned b[] = {2, 3};
  const Elements sb[] = {{4}, {1}};
  EXPECT_EQ(shamir_interpolate_elements(b, sb, 7), Elements{3});
}

TEST(ShamirReconstruct, InterpolationAgreesWithBruteForceOverF7) {
  // Independent oracle: enumerate every line S + r x over F_7 and keep those
  // through both points.
  for (unsigned x1 = 1; x1 <= 6; ++x1) {
    for (unsigned x2 = 1; x2 <= 6; ++x2) {
      if (x1 == x2) continue;
      for (unsigned y1 = 0; y1 < 7; ++y1) {
        for (unsigned y2 = 0; y2 < 7; ++y2) {
          int matches = 0;
          std::uint64_t secret = 0;
          for (unsigned s = 0; s < 7; ++s) {
            for (unsigned r = 0; r < 7; ++r) {
              if ((s + r * x1) % 7 == y1 && (s + r * x2) % 7 == y2) {
                ++matches;
                secret = s;
              }
            }
          }
          ASSERT_EQ(matches, 1);
          const unsigned idx[] = {x1, x2};
          const Elements ys[] = {{y1}, {y2}};
          EXPECT_EQ(shamir_interpolate_elements(idx, ys, 7), Elements{secret});
        }
      }
    }
  }
}

TEST(ShamirSplit, ThresholdOneIsConstant) {
  auto cfg = SchemeConfig::shamir(1, 4, 257, 1);
  SeededRandom rnd(3);
  const auto m = to_bytes("const");
  auto ss = shamir_split(m, cfg, rnd);
  for (const auto& s : ss.shares) EXPECT_EQ(s.payload, ss.shares[0].payload);
  EXPECT_EQ(decode_elements(ss.shares[0].payload, 2), block_encode(m, cfg));
  ShareSet one{cfg, {ss.shares[2]}, m.size()};
  EXPECT_EQ(shamir_reconstruct(one, cfg), m);
}

TEST(ShamirSplit, MersenneFieldAnyTwoOfThree) {
  auto cfg = SchemeConfig::shamir(2, 3);
  EXPECT_EQ(cfg.element_width(), 8u);
  SeededRandom rnd(21);
  const auto m = rnd.bytes(1024);
  auto ss = shamir_split(m, cfg, rnd);
  for (unsigned a = 0; a < 3; ++a) {
    for (unsigned b = a + 1; b < 3; ++b) {
      ShareSet subset{cfg, {ss.shares[a], ss.shares[b]}, m.size()};
      EXPECT_EQ(shamir_reconstruct(subset, cfg), m) << a << "," << b;
      ShareSet reversed{cfg, {ss.shares[b], ss.shares[a]}, m.size()};
      EXPECT_EQ(shamir_reconstruct(reversed, cfg), m);
    }
  }
}

TEST(ShamirReconstruct, BelowThreshold) {
  auto cfg = SchemeConfig::shamir(3, 5, 257, 1);
  SeededRandom rnd(2);
  auto ss = shamir_split(to_bytes("xyz"), cfg, rnd);
  ss.shares.resize(2);
  EXPECT_EQ(error_of([&] { shamir_reconstruct(ss, cfg); }), ErrorCode::kInsufficientShares);
}

TEST(ShamirReconstruct, DuplicateIndex) {
  auto cfg = SchemeConfig::shamir(2, 3, 257, 1);
  SeededRandom rnd(2);
  auto ss = shamir_split(to_bytes("xyz"), cfg, rnd);
  ss.shares[1] = ss.shares[0];
  EXPECT_EQ(error_of([&] { shamir_reconstruct(ss, cfg); }), ErrorCode::kDuplicateIndex);
}

TEST(ShamirConfig, Validation) {
  EXPECT_EQ(error_of([] { SchemeConfig::shamir(2, 3, 15, 0); }), ErrorCode::kInvalidConfig);   // composite
  EXPECT_EQ(error_of([] { SchemeConfig::shamir(2, 7, 7, 0); }), ErrorCode::kInvalidConfig);    // n >= p
  EXPECT_EQ(error_of([] { SchemeConfig::shamir(2, 3, 251, 1); }), ErrorCode::kInvalidConfig);  // 256 >= p
  EXPECT_EQ(error_of([] { SchemeConfig::shamir(4, 3, 257, 1); }), ErrorCode::kInvalidConfig);  // t > n
  EXPECT_EQ(error_of([] { SchemeConfig::shamir(2, 3, 7, 1); }), ErrorCode::kInvalidConfig);
  EXPECT_NO_THROW(SchemeConfig::shamir(2, 3, 257, 1));
  EXPECT_NO_THROW(SchemeConfig::shamir(3, 5, 18446744073709551557ULL, 7));
}

TEST(Field, PrimalityMatchesTrialDivision) {
  auto trial = [](std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
      if (n % d == 0) return false;
    }
    return true;
  };
  for (std::uint64_t n = 0; n < 20000; ++n) ASSERT_EQ(is_prime(n), trial(n)) << n;
  EXPECT_TRUE(is_prime(kMersenne61));
  EXPECT_TRUE(is_prime(18446744073709551557ULL));        // 2^64 - 59
  EXPECT_FALSE(is_prime(3215031751ULL));                 // strong pseudoprime to bases 2,3,5,7
  EXPECT_FALSE(is_prime(4611686014132420609ULL));  // (2^31-1)^2
}

TEST(SchemeConfig, ElementWidths) {
  EXPECT_EQ(SchemeConfig::xor_scheme(2).element_width(), 1u);
  EXPECT_EQ(SchemeConfig::additive(2, 256, 1).element_width(), 1u);
  EXPECT_EQ(SchemeConfig::additive(2, 257, 1).element_width(), 2u);
  EXPECT_EQ(SchemeConfig::additive(2, 1 << 24, 3).element_width(), 3u);
  EXPECT_EQ(SchemeConfig::additive(2, (1 << 24) + 1, 3).element_width(), 4u);
  EXPECT_EQ(SchemeConfig::shamir(2, 3).encoded_length(15), 3u * 8u);
}

TEST(SchemeConfig, UnknownModulusRange) {
  SeededRandom rnd(4);
  for (int i = 0; i < 100; ++i) {
    auto cfg = SchemeConfig::additive_unknown_modulus(2, rnd);
    EXPECT_GE(cfg.modulus, kUnknownModulusLo);
    EXPECT_LT(cfg.modulus, kUnknownModulusHi);
    EXPECT_EQ(cfg.block_bytes, 3u);
    EXPECT_TRUE(cfg.modulus_secret);
  }
}

}  // namespace
}  // namespace snet::codec
