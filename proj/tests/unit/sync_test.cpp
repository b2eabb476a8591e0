#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "snet/backend/simulated.hpp"
#include "snet/covert/detector.hpp"
#include "snet/error.hpp"
#include "snet/sync/engine.hpp"

namespace snet::sync {
namespace {

namespace fs = std::filesystem;
using backend::SimulatedBackend;
using backend::SimulatedCloud;
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

TEST(ShareHeader, RoundTripAndMask) {
  ShareFileHeader h{kFormatVersion, 7, 4096, ShareFileHeader::make_flags(true, 3)};
  auto raw = encode_header(h);
  ASSERT_EQ(raw.size(), kHeaderBytes);
  EXPECT_EQ(hex_encode(raw), "00000001" "0000000000000007" "0000000000001000" "00000301");
  EXPECT_EQ(decode_header(raw), h);
  EXPECT_TRUE(h.media());
  EXPECT_EQ(h.generation(), 3u);

  const Bytes secret(32, 0x5A);
  auto masked = mask_header(h, secret, 0, "0123456789abcdef.log");
  EXPECT_NE(masked, raw);
  EXPECT_EQ(unmask_header(masked, secret, 0, "0123456789abcdef.log"), h);
  EXPECT_NE(mask_header(h, secret, 1, "0123456789abcdef.log"), masked);
  EXPECT_NE(mask_header(h, secret, 0, "0123456789abcdee.log"), masked);
  EXPECT_EQ(error_of([&] { unmask_header(masked, Bytes(32, 0x5B), 0, "0123456789abcdef.log"); }),
            ErrorCode::kCorruptState);
}

TEST(ShareHeader, MaskedHeadersLookRandomInAggregate) {
  const Bytes secret(32, 0x11);
  Bytes all;
  for (int f = 0; f < 200; ++f) {
    ShareFileHeader h{kFormatVersion, static_cast<std::uint64_t>(f % 9 + 1), static_cast<std::uint64_t>(f * 13), 0};
    append(all, mask_header(h, secret, f % 2, "media/0123456789abcdef-" + std::to_string(f)));
  }
  EXPECT_TRUE(covert::randomness_score(all).flagged_random);
}

TEST(SyncIndex, SaveLoadRoundTrip) {
  const auto file = fs::temp_directory_path() / "snet-index-test" / "index.v1";
  SyncIndex idx;
  idx.put({"0123456789abcdef.log", Role::kSending, "0123456789abcdef", 1234, 36, 2, 0, false, "ab", {3, 4}, {60, 60}});
  idx.put({"media/fedcba9876543210-01", Role::kReceiving, "fedcba9876543210", 99, 5, 1, 2, true, "", {0, 9}, {0, 29}});
  idx.save(file);
  auto back = SyncIndex::load(file);
  EXPECT_EQ(back.entries(), idx.entries());
  write_file_atomic(file, to_bytes("garbage\n"));
  EXPECT_EQ(error_of([&] { SyncIndex::load(file); }), ErrorCode::kCorruptState);
  fs::remove_all(file.parent_path());
  EXPECT_TRUE(SyncIndex::load(file).entries().empty());
}

TEST(Naming, OwnersComeFromPaths) {
  EXPECT_EQ(owner_of("0123456789abcdef.log"), "0123456789abcdef");
  EXPECT_EQ(owner_of("media/0123456789abcdef-9f3e"), "0123456789abcdef");
  EXPECT_FALSE(owner_of("manifest"));
  EXPECT_FALSE(owner_of("0123456789ABCDEF.log"));
  EXPECT_FALSE(owner_of("media/0123456789abcdef-"));
  EXPECT_FALSE(owner_of("notes.txt"));
}

// ---- classify ---------------------------------------------------------------

SyncIndexEntry idx_at(std::uint64_t version, std::uint64_t len) {
  SyncIndexEntry e;
  e.content_version = version;
  e.last_plain_len = len;
  return e;
}

TEST(Classify, DocumentedExamples) {
  EXPECT_EQ(classify(Role::kSending, {true, 0}, {}, 2, nullptr), Action::kSendCreate);
  auto i6 = idx_at(6, 10);
  EXPECT_EQ(classify(Role::kReceiving, {true, 10}, {ShareState::at(7), ShareState::at(7), ShareState::at(7)}, 3, &i6),
            Action::kRecvUpdate);
  EXPECT_EQ(classify(Role::kReceiving, {true, 10}, {ShareState::at(7), ShareState::at(6)}, 2, &i6), Action::kWaiting);
  EXPECT_EQ(classify(Role::kSending, {true, 11}, {}, 2, &i6), Action::kSendUpdate);
  EXPECT_EQ(classify(Role::kSending, {false, 0}, {}, 2, &i6), Action::kSendDelete);
  EXPECT_EQ(classify(Role::kSending, {true, 9}, {}, 2, &i6), Action::kConflict);
  EXPECT_EQ(classify(Role::kReceiving, {false, 0}, {ShareState::at(1), ShareState::at(1)}, 2, nullptr),
            Action::kRecvCreate);
  EXPECT_EQ(classify(Role::kReceiving, {true, 10}, {ShareState::absent(), ShareState::absent()}, 2, &i6),
            Action::kRecvDelete);
  EXPECT_EQ(classify(Role::kReceiving, {true, 10}, {ShareState::absent(), ShareState::at(6)}, 2, &i6),
            Action::kWaiting);
  // Two of three Shamir shares suffice.
  EXPECT_EQ(classify(Role::kReceiving, {true, 10}, {ShareState::absent(), ShareState::at(7), ShareState::at(7)}, 2, &i6),
            Action::kRecvUpdate);
}

// Independent statement of the rule table, used to check classify over every
// combination of local state, share states and index presence.
Action oracle(Role role, const LocalFile& local, const std::vector<ShareState>& shares, unsigned required,
              const SyncIndexEntry* idx) {
  if (role == Role::kSending) {
    if (!idx) return local.exists ? Action::kSendCreate : Action::kInSync;
    if (!local.exists) return Action::kSendDelete;
    if (local.length == idx->last_plain_len) return Action::kInSync;
    return local.length > idx->last_plain_len ? Action::kSendUpdate : Action::kConflict;
  }
  std::map<std::uint64_t, unsigned> at_version;
  unsigned absent = 0, unknown = 0;
  for (const auto& s : shares) {
    if (s.presence == ShareState::kPresent) ++at_version[s.content_version];
    absent += s.presence == ShareState::kAbsent;
    unknown += s.presence == ShareState::kUnknown;
  }
  if (at_version.empty()) {
    if (unknown == 0) return local.exists ? Action::kRecvDelete : Action::kInSync;
    return (local.exists || idx) ? Action::kWaiting : Action::kInSync;
  }
  const auto [newest, count] = *at_version.rbegin();
  if (count < required) return Action::kWaiting;
  if (!local.exists) return Action::kRecvCreate;
  if (!idx) return Action::kRecvCreate;
  if (newest < idx->content_version) return Action::kWaiting;
  if (newest > idx->content_version) return Action::kRecvUpdate;
  return local.length == idx->last_plain_len ? Action::kInSync : Action::kRecvCreate;
}

TEST(Classify, ExhaustiveAgainstRuleTable) {
  const std::vector<ShareState> states = {ShareState::absent(), ShareState::unknown(), ShareState::at(1),
                                          ShareState::at(2), ShareState::at(3)};
  const std::vector<LocalFile> locals = {{false, 0}, {true, 4}, {true, 5}, {true, 6}};
  std::map<Action, int> seen;
  int combos = 0;
  for (unsigned k : {2u, 3u}) {
    for (unsigned required = 2; required <= k; ++required) {
      std::vector<std::size_t> pick(k, 0);
      for (;;) {
        std::vector<ShareState> shares;
        for (auto p : pick) shares.push_back(states[p]);
        for (const auto& local : locals) {
          for (int with_idx = 0; with_idx < 3; ++with_idx) {
            auto e = idx_at(with_idx == 1 ? 2 : 0, 5);
            const SyncIndexEntry* idx = with_idx == 1 ? &e : nullptr;
            for (Role role : {Role::kSending, Role::kReceiving}) {
              const auto got = classify(role, local, shares, required, idx);
              ASSERT_EQ(got, oracle(role, local, shares, required, idx));
              // A version-gated pull never happens while the chosen shares disagree.
              if (got == Action::kRecvCreate || got == Action::kRecvUpdate) {
                std::map<std::uint64_t, unsigned> c;
                for (const auto& s : shares) {
                  if (s.presence == ShareState::kPresent) ++c[s.content_version];
                }
                ASSERT_GE(c.rbegin()->second, required);
              }
              ++seen[got];
              ++combos;
            }
          }
        }
        std::size_t d = 0;
        while (d < k && ++pick[d] == states.size()) pick[d++] = 0;
        if (d == k) break;
      }
    }
  }
  EXPECT_GT(combos, 1000);
  EXPECT_EQ(seen.size(), 9u);  // every outcome is reachable
}

TEST(ComputeDelta, Examples) {
  auto d = compute_delta(0, Bytes(12, 1));
  EXPECT_EQ(d.base_len, 0u);
  EXPECT_EQ(d.appended.size(), 12u);
  EXPECT_TRUE(compute_delta(12, Bytes(12, 1)).appended.empty());
  const Bytes old = to_bytes("hello");
  const auto digest = digest_hex(old);
  EXPECT_EQ(to_string(compute_delta(5, to_bytes("hello world"), digest).appended), " world");
  EXPECT_EQ(error_of([&] { compute_delta(5, to_bytes("jello world"), digest); }), ErrorCode::kNotAppendOnly);
  EXPECT_EQ(error_of([&] { compute_delta(5, to_bytes("hell")); }), ErrorCode::kNotAppendOnly);
}

// ---- engine -----------------------------------------------------------------

constexpr const char* kConv = "c9a1c9a1c9a1c9a1c9a1c9a1c9a1c9a1";

std::string member_token(int i) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016x", 0xa11ce000 + i);
  return buf;
}

struct Harness {
  struct Member {
    std::string token;
    fs::path root;
    std::vector<std::unique_ptr<backend::Backend>> backends;
    std::unique_ptr<SyncEngine> engine;
    std::unique_ptr<SeededRandom> rnd;

    fs::path log() const { return root / "D" / (token + ".log"); }
    void say(std::string_view text) const {
      std::ofstream(log(), std::ios::binary | std::ios::app) << text;
    }
    Bytes log_bytes() const { return fs::exists(log()) ? read_file(log()) : Bytes{}; }
  };

  Harness(SchemeConfig scheme, int members, std::int64_t delay_hi = 0) : scheme(scheme) {
    static int serial = 0;
    base = fs::temp_directory_path() /
           ("snet-sync-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "-" +
            std::to_string(serial++));
    fs::remove_all(base);
    for (unsigned s = 0; s < scheme.shares(); ++s) {
      clouds.push_back(std::make_shared<SimulatedCloud>(backend::SimulatedOptions{0, delay_hi, 100 + s}, clock));
    }
    std::set<std::string> tokens;
    for (int i = 0; i < members; ++i) tokens.insert(member_token(i));
    for (int i = 0; i < members; ++i) {
      auto m = std::make_unique<Member>();
      m->token = member_token(i);
      m->root = base / m->token;
      m->rnd = std::make_unique<SeededRandom>(1000 + i);
      for (unsigned s = 0; s < scheme.shares(); ++s) {
        m->backends.push_back(std::make_unique<SimulatedBackend>(
            backend::BackendHandle{"p" + std::to_string(s), backend::BackendKind::kSimulated, "x", "acct-" + m->token},
            clouds[s]));
      }
      this->members.push_back(std::move(m));
    }
    // Member 0 owns the conversation directory and shares it with everyone.
    for (unsigned s = 0; s < scheme.shares(); ++s) {
      clouds[s]->put("acct-" + member_token(0), std::string(kConv) + "/manifest", Bytes{0});
      for (int i = 1; i < members; ++i) clouds[s]->share("acct-" + member_token(0), kConv, "acct-" + member_token(i));
    }
    for (auto& m : this->members) {
      fs::create_directories(m->root / "D");
      start(*m, tokens);
    }
  }
  ~Harness() { fs::remove_all(base); }

  void start(Member& m, const std::set<std::string>& tokens = {}) {
    SyncContext ctx;
    ctx.conv_token = kConv;
    ctx.self = m.token;
    ctx.members = tokens.empty() ? m.engine->context().members : tokens;
    ctx.scheme = scheme;
    ctx.conv_secret = Bytes(32, 0x42);
    for (auto& b : m.backends) ctx.backends.push_back(b.get());
    ctx.local_dir = m.root / "D";
    ctx.state_dir = m.root / "state";
    ctx.clock = clock.get();
    ctx.rnd = m.rnd.get();
    m.engine = std::make_unique<SyncEngine>(ctx);
  }

  Member& operator[](int i) { return *members[i]; }

  void settle() { clock->set(std::max(clock->now_ms(), quiescent_at())); }
  std::int64_t quiescent_at() const {
    std::int64_t t = 0;
    for (const auto& c : clouds) t = std::max(t, c->quiescent_at());
    return t;
  }
  void cycle_all() {
    for (auto& m : members) m->engine->sync_cycle();
  }

  SchemeConfig scheme;
  fs::path base;
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>(1'000'000);
  std::vector<std::shared_ptr<SimulatedCloud>> clouds;
  std::vector<std::unique_ptr<Member>> members;
};

TEST(SyncEngine, FirstMessageCreatesSharesOnEveryBackend) {
  Harness h(SchemeConfig::xor_scheme(2), 2);
  h[0].say("hello world!");
  auto r = h[0].engine->sync_cycle();
  EXPECT_EQ(r.uploads, 2u);
  ASSERT_EQ(r.actions.size(), 1u);
  EXPECT_EQ(r.actions[0].action, Action::kSendCreate);
  const std::string path = std::string(kConv) + "/" + h[0].token + ".log";
  Bytes shares_xor(12, 0);
  for (unsigned s = 0; s < 2; ++s) {
    auto [bytes, entry] = h[0].backends[s]->get_object(path);
    ASSERT_EQ(bytes.size(), kHeaderBytes + 12);
    auto hdr = unmask_header(bytes, Bytes(32, 0x42), s, h[0].token + ".log");
    EXPECT_EQ(hdr.content_version, 1u);
    EXPECT_EQ(hdr.payload_len, 12u);
    for (int i = 0; i < 12; ++i) shares_xor[i] ^= bytes[kHeaderBytes + i];
  }
  EXPECT_EQ(to_string(shares_xor), "hello world!");

  h[0].say(" again");
  r = h[0].engine->sync_cycle();
  EXPECT_EQ(r.uploads, 2u);
  for (unsigned s = 0; s < 2; ++s) {
    auto [bytes, entry] = h[0].backends[s]->get_object(path);
    EXPECT_EQ(bytes.size(), kHeaderBytes + 18);
    EXPECT_EQ(unmask_header(bytes, Bytes(32, 0x42), s, h[0].token + ".log").content_version, 2u);
  }
}

TEST(SyncEngine, ReceiverReconstructsSenderLog) {
  Harness h(SchemeConfig::xor_scheme(2), 2);
  h[0].say("first");
  h[0].engine->sync_cycle();
  auto r = h[1].engine->sync_cycle();
  EXPECT_EQ(r.downloads, 2u);
  EXPECT_EQ(to_string(read_file(h[1].root / "D" / (h[0].token + ".log"))), "first");
  h[0].say(" second");
  h[0].engine->sync_cycle();
  r = h[1].engine->sync_cycle();
  EXPECT_EQ(r.downloads, 2u);
  ASSERT_EQ(r.actions.size(), 1u);
  EXPECT_EQ(r.actions[0].action, Action::kRecvUpdate);
  EXPECT_EQ(to_string(read_file(h[1].root / "D" / (h[0].token + ".log"))), "first second");
  // Only the unseen suffix travelled.
  EXPECT_EQ(h[1].backends[0]->stats().bytes_down, 2 * kHeaderBytes + 5 + 7);
}

TEST(SyncEngine, QuiescentCycleTransfersNothing) {
  Harness h(SchemeConfig::xor_scheme(2), 2);
  h[0].say("x");
  h[1].say("y");
  for (int i = 0; i < 2; ++i) h.cycle_all();
  for (int i = 0; i < 2; ++i) {
    auto r = h[i].engine->sync_cycle();
    EXPECT_EQ(r.transfers(), 0u);
    EXPECT_TRUE(r.actions.empty());
  }
}

TEST(SyncEngine, VersionSkewWaits) {
  Harness h(SchemeConfig::xor_scheme(2), 2);
  h[0].say("one");
  h.cycle_all();
  h.clouds[1]->set_delay(10'000, 10'000);
  h[0].say(" two");
  h[0].engine->sync_cycle();
  auto r = h[1].engine->sync_cycle();
  ASSERT_EQ(r.waiting.size(), 1u);
  EXPECT_EQ(to_string(read_file(h[1].root / "D" / (h[0].token + ".log"))), "one");
  EXPECT_EQ(r.downloads, 1u);
  // Waiting does not re-download the share it already probed.
  r = h[1].engine->sync_cycle();
  EXPECT_EQ(r.downloads, 0u);
  h.settle();
  r = h[1].engine->sync_cycle();
  EXPECT_EQ(to_string(read_file(h[1].root / "D" / (h[0].token + ".log"))), "one two");
  EXPECT_EQ(r.downloads, 1u);
}

TEST(SyncEngine, DeletionPropagatesOnlyWhenAllSharesAreGone) {
  Harness h(SchemeConfig::xor_scheme(2), 2);
  const std::string media = "media/" + h[0].token + "-0001";
  write_file_atomic(h[0].root / "D" / media, to_bytes("picture"));
  h.cycle_all();
  ASSERT_TRUE(fs::exists(h[1].root / "D" / media));
  h.clouds[1]->set_delay(10'000, 10'000);
  fs::remove(h[0].root / "D" / media);
  auto r = h[0].engine->sync_cycle();
  EXPECT_EQ(r.deletes, 2u);
  r = h[1].engine->sync_cycle();
  EXPECT_EQ(r.waiting.size(), 1u);
  EXPECT_TRUE(fs::exists(h[1].root / "D" / media));
  h.settle();
  r = h[1].engine->sync_cycle();
  EXPECT_FALSE(fs::exists(h[1].root / "D" / media));
  EXPECT_EQ(h[1].engine->index().find(media), nullptr);
}

TEST(SyncEngine, BroadcastCostIndependentOfGroupSize) {
  for (int w : {2, 5}) {
    Harness h(SchemeConfig::xor_scheme(2), w);
    h[0].say("warm-up");
    h.cycle_all();
    h[0].say("broadcast");
    auto sent = h[0].engine->sync_cycle();
    EXPECT_EQ(sent.uploads, 2u) << w;
    for (int i = 1; i < w; ++i) {
      auto got = h[i].engine->sync_cycle();
      EXPECT_EQ(got.downloads, 2u) << w;
      EXPECT_EQ(got.uploads, 0u) << w;
    }
  }
}

TEST(SyncEngine, BackendOutageLeavesEntryDirtyUntilRecovery) {
  Harness h(SchemeConfig::xor_scheme(2), 2);
  h[0].say("a");
  h.cycle_all();
  const auto before = *h[0].engine->index().find(h[0].token + ".log");
  h.clouds[1]->set_unavailable(true);
  h[0].say("b");
  auto r = h[0].engine->sync_cycle();
  EXPECT_EQ(*h[0].engine->index().find(h[0].token + ".log"), before);
  EXPECT_FALSE(r.errors.empty());
  r = h[1].engine->sync_cycle();
  EXPECT_EQ(to_string(read_file(h[1].root / "D" / (h[0].token + ".log"))), "a");
  h.clouds[1]->set_unavailable(false);
  r = h[0].engine->sync_cycle();
  EXPECT_EQ(r.uploads, 1u);  // only the slot that missed the staged write
  h[1].engine->sync_cycle();
  EXPECT_EQ(to_string(read_file(h[1].root / "D" / (h[0].token + ".log"))), "ab");
  EXPECT_EQ(h[0].engine->index().find(h[0].token + ".log")->content_version, before.content_version + 1);
}

TEST(SyncEngine, CrashBetweenPutsReplaysStagedShares) {
  Harness h(SchemeConfig::xor_scheme(2), 2);
  h[0].say("abc");
  h.cycle_all();
  h.clouds[1]->fail_next_puts(1);
  h[0].say("def");
  h[0].engine->sync_cycle();
  // Process dies; the log keeps growing before restart.
  h[0].engine.reset();
  h[0].say("ghi");
  h.start(h[0], {h[0].token, h[1].token});
  h[0].engine->sync_cycle();
  h[0].engine->sync_cycle();
  h[1].engine->sync_cycle();
  EXPECT_EQ(to_string(read_file(h[1].root / "D" / (h[0].token + ".log"))), "abcdefghi");
  EXPECT_EQ(h[0].engine->index().find(h[0].token + ".log")->content_version, 3u);
}

TEST(SyncEngine, ReceiverCrashBeforeIndexSaveDoesNotDuplicate) {
  Harness h(SchemeConfig::xor_scheme(2), 2);
  h[0].say("12345");
  h.cycle_all();
  const auto idx_file = h[1].engine->index_file();
  const auto saved = read_file(idx_file);
  h[0].say("678");
  h.cycle_all();
  // Roll the receiver's index back as if it died right after writing d.
  h[1].engine.reset();
  write_file_atomic(idx_file, saved);
  h.start(h[1], {h[0].token, h[1].token});
  h[1].engine->sync_cycle();
  EXPECT_EQ(to_string(read_file(h[1].root / "D" / (h[0].token + ".log"))), "12345678");
}

TEST(SyncEngine, NonAppendEditRewritesUnderNewGeneration) {
  Harness h(SchemeConfig::xor_scheme(2), 2);
  h[0].say("draft one");
  h.cycle_all();
  write_file_atomic(h[0].log(), to_bytes("final version"));
  auto r = h[0].engine->sync_cycle();
  EXPECT_EQ(r.uploads, 2u);
  EXPECT_EQ(h[0].engine->index().find(h[0].token + ".log")->generation, 1u);
  h[1].engine->sync_cycle();
  EXPECT_EQ(to_string(read_file(h[1].root / "D" / (h[0].token + ".log"))), "final version");
  write_file_atomic(h[0].log(), to_bytes("short"));
  r = h[0].engine->sync_cycle();
  EXPECT_EQ(r.conflicts.size(), 1u);
  EXPECT_EQ(r.uploads, 0u);
}

TEST(SyncEngine, ShamirToleratesOneLostBackend) {
  Harness h(SchemeConfig::shamir(2, 3), 2);
  std::string all;
  for (int i = 0; i < 5; ++i) {
    const std::string msg = "message " + std::to_string(i) + ";";
    all += msg;
    h[0].say(msg);
    h[0].engine->sync_cycle();
    if (i == 2) h[1].engine->sync_cycle();
  }
  for (unsigned lost = 0; lost < 3; ++lost) {
    Harness g(SchemeConfig::shamir(2, 3), 2);
    g[0].say(all);
    g[0].engine->sync_cycle();
    for (const auto& e : g.clouds[lost]->list("acct-" + g[0].token, kConv)) g.clouds[lost]->remove("acct-" + g[0].token, e.path);
    g[1].engine->sync_cycle();
    EXPECT_EQ(to_string(read_file(g[1].root / "D" / (g[0].token + ".log"))), all) << lost;
  }
  // And the sender heals the lost slot on its next cycle.
  h.clouds[2]->remove("acct-" + h[0].token, std::string(kConv) + "/" + h[0].token + ".log");
  auto r = h[0].engine->sync_cycle();
  EXPECT_EQ(r.repairs, 1u);
  h[1].engine->sync_cycle();
  EXPECT_EQ(to_string(read_file(h[1].root / "D" / (h[0].token + ".log"))), all);
}

TEST(SyncEngine, ShamirCommitsWithThresholdWhenOneBackendIsDown) {
  Harness h(SchemeConfig::shamir(2, 3), 2);
  h[0].say("alpha");
  h.cycle_all();
  h.clouds[0]->set_unavailable(true);
  h[0].say(" beta");
  auto r = h[0].engine->sync_cycle();
  EXPECT_EQ(r.uploads, 2u);
  EXPECT_EQ(h[0].engine->index().find(h[0].token + ".log")->content_version, 2u);
  h[1].engine->sync_cycle();
  EXPECT_EQ(to_string(read_file(h[1].root / "D" / (h[0].token + ".log"))), "alpha beta");
  h.clouds[0]->set_unavailable(false);
  r = h[0].engine->sync_cycle();
  EXPECT_EQ(r.repairs, 1u);
}

class BlockedSchemes : public ::testing::TestWithParam<SchemeConfig> {};

TEST_P(BlockedSchemes, RandomAppendsStayAligned) {
  Harness h(GetParam(), 2);
  std::mt19937 gen(3);
  std::string expect;
  const std::string path = h[0].token + ".log";
  for (int step = 0; step < 25; ++step) {
    std::string chunk(gen() % 23, 'a');
    for (auto& c : chunk) c = static_cast<char>('a' + gen() % 26);
    expect += chunk;
    h[0].say(chunk);
    h[0].engine->sync_cycle();
    auto before = h[1].backends[0]->stats().bytes_down;
    h[1].engine->sync_cycle();
    const auto fetched = h[1].backends[0]->stats().bytes_down - before;
    ASSERT_EQ(to_string(read_file(h[1].root / "D" / path)), expect) << step;
    // Header plus at most the re-split partial block and the new bytes.
    if (step > 0 && !chunk.empty()) {
      const auto& s = h.scheme;
      EXPECT_LE(fetched, kHeaderBytes + s.encoded_length(chunk.size() + s.plain_block())) << step;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Schemes, BlockedSchemes,
                         ::testing::Values(SchemeConfig::xor_scheme(3), SchemeConfig::additive(2, 256, 1),
                                           SchemeConfig::additive(2, 1ULL << 32, 4),
                                           SchemeConfig::additive(3, 16777259, 3), SchemeConfig::shamir(2, 3),
                                           SchemeConfig::shamir(3, 5, 257, 1)));

TEST(SyncEngine, ReceiversNeverWrite) {
  Harness h(SchemeConfig::xor_scheme(2), 3);
  h[0].say("only the owner writes");
  for (int i = 0; i < 3; ++i) h.cycle_all();
  for (int i = 1; i < 3; ++i) {
    for (auto& b : h[i].backends) EXPECT_EQ(b->stats().puts, 0u);
  }
  SyncReport r;
  SyncIndexEntry foreign;
  foreign.rel_path = h[0].token + ".log";
  EXPECT_EQ(error_of([&] { h[1].engine->push_sending(foreign, {0, to_bytes("x")}, r); }), ErrorCode::kAccessDenied);
}

TEST(SyncEngine, MismatchedBackendCountIsRejected) {
  SyncContext ctx;
  ctx.scheme = SchemeConfig::xor_scheme(3);
  EXPECT_EQ(error_of([&] { SyncEngine e(ctx); }), ErrorCode::kInvalidConfig);
}

}  // namespace
}  // namespace snet::sync
