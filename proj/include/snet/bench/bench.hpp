#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace snet::bench {

struct BenchOptions {
  std::size_t message_size = 1024;
  std::size_t reps = 30;    // timed repetitions per point, at least 30
  std::size_t warmup = 5;   // discarded repetitions per point
  std::uint64_t seed = 1;
  // Each repetition times a batch of calls lasting at least this long and
  // reports the per-call mean, so clock granularity stays negligible.
  std::int64_t min_batch_ns = 200'000;
};

struct BenchResult {
  std::string scenario;  // secret_share | per_recipient_baseline | xor_split_k | prg_xor | block_cipher
  std::uint64_t param = 0;  // w or k
  double mean_ns = 0;
  double stddev_ns = 0;
  std::size_t reps = 0;
  std::vector<double> samples_ns;
};

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  double slope_ci_lo = 0;  // 95% Student t interval on the slope
  double slope_ci_hi = 0;
  std::size_t points = 0;

  bool slope_ci_contains_zero() const { return slope_ci_lo <= 0 && 0 <= slope_ci_hi; }
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Fit over every sample of every point, not just the means.
LinearFit fit_samples(const std::vector<BenchResult>& series);
LinearFit fit_means(const std::vector<BenchResult>& series);

// Time of xor_split(m, k) against w independent AES-128-CTR encryptions of m
// under per-recipient keys. Returns the secret_share points then the
// baseline points, one per w, measured in interleaved shuffled order.
std::vector<BenchResult> bench_vs_recipients(const BenchOptions& opt, unsigned k, const std::vector<unsigned>& w_values);
std::vector<BenchResult> bench_vs_servers(const BenchOptions& opt, const std::vector<unsigned>& k_values);
// One PRG pad plus XOR against one block-cipher encryption of the message.
std::vector<BenchResult> bench_prg_vs_cipher(const BenchOptions& opt);

std::vector<BenchResult> select(const std::vector<BenchResult>& all, const std::string& scenario);
const BenchResult& at(const std::vector<BenchResult>& all, const std::string& scenario, std::uint64_t param);

// scenario,param,mean_ns,stddev_ns,reps
std::string to_csv(const std::vector<BenchResult>& results);

struct TransferCount {
  unsigned w = 0;  // group size including the sender
  unsigned k = 0;
  unsigned messages = 0;
  std::uint64_t uploads = 0;               // sender share puts for the messages
  std::uint64_t max_uploads_per_message = 0;
  std::vector<std::uint64_t> downloads;    // per recipient, for the messages
  std::uint64_t baseline_uploads = 0;      // w * messages, per-recipient delivery
};

// Runs a real session over simulated backends: w members join one
// conversation, member 0 sends `messages` text messages, and every other
// member syncs after each one.
TransferCount count_transfers(unsigned w, unsigned messages, unsigned k, std::uint64_t seed = 1);

}  // namespace snet::bench
