#include "snet/bench/bench.hpp"

#include <unistd.h>

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "snet/backend/simulated.hpp"
#include "snet/codec/sharing.hpp"
#include "snet/conv/conversation.hpp"
#include "snet/crypto.hpp"
#include "snet/error.hpp"

namespace snet::bench {
namespace {

namespace fs = std::filesystem;

volatile std::uint8_t g_sink = 0;

template <typename F>
double time_batch(F& f, std::size_t batch) {
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < batch; ++i) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::nano>(t1 - t0).count() / static_cast<double>(batch);
}

template <typename F>
std::size_t calibrate(F& f, std::int64_t min_batch_ns) {
  std::size_t batch = 1;
  while (batch < (1u << 24) && time_batch(f, batch) * static_cast<double>(batch) < static_cast<double>(min_batch_ns)) {
    batch *= 2;
  }
  return batch;
}

struct Point {
  BenchResult result;
  std::function<void()> run;
  std::size_t batch = 1;
};

// Warm-up, then `reps` rounds visiting every point once in a fresh shuffled
// order, so slow drift in machine speed spreads evenly across the series.
void measure(std::vector<Point>& points, const BenchOptions& opt, std::mt19937_64& order_rng) {
  if (opt.reps < 30) fail(ErrorCode::kInvalidArgument, "at least 30 repetitions are required");
  for (auto& p : points) {
    p.batch = calibrate(p.run, opt.min_batch_ns);
    for (std::size_t i = 0; i < opt.warmup; ++i) time_batch(p.run, p.batch);
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t r = 0; r < opt.reps; ++r) {
    std::shuffle(order.begin(), order.end(), order_rng);
    for (auto i : order) points[i].result.samples_ns.push_back(time_batch(points[i].run, points[i].batch));
  }
  for (auto& p : points) {
    auto& res = p.result;
    const auto& s = res.samples_ns;
    res.reps = s.size();
    res.mean_ns = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double ss = 0;
    for (double v : s) ss += (v - res.mean_ns) * (v - res.mean_ns);
    res.stddev_ns = std::sqrt(ss / static_cast<double>(s.size() - 1));
  }
}

std::vector<BenchResult> results_of(std::vector<Point>& points) {
  std::vector<BenchResult> out;
  for (auto& p : points) out.push_back(std::move(p.result));
  return out;
}

void consume(ByteView b) {
  if (!b.empty()) g_sink = static_cast<std::uint8_t>(g_sink ^ b[0]);
}

}  // namespace

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) fail(ErrorCode::kInvalidArgument, "a line fit needs at least 3 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) fail(ErrorCode::kInvalidArgument, "a line fit needs distinct x values");
  LinearFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    sse += e * e;
  }
  f.r2 = syy == 0 ? 1.0 : 1.0 - sse / syy;
  const double se = std::sqrt(sse / (n - 2) / sxx);
  const boost::math::students_t dist(n - 2);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  f.slope_ci_lo = f.slope - t * se;
  f.slope_ci_hi = f.slope + t * se;
  return f;
}

LinearFit fit_samples(const std::vector<BenchResult>& series) {
  std::vector<double> x, y;
  for (const auto& r : series) {
    for (double s : r.samples_ns) {
      x.push_back(static_cast<double>(r.param));
      y.push_back(s);
    }
  }
  return fit_line(x, y);
}

LinearFit fit_means(const std::vector<BenchResult>& series) {
  std::vector<double> x, y;
  for (const auto& r : series) {
    x.push_back(static_cast<double>(r.param));
    y.push_back(r.mean_ns);
  }
  return fit_line(x, y);
}

std::vector<BenchResult> bench_vs_recipients(const BenchOptions& opt, unsigned k, const std::vector<unsigned>& w_values) {
  for (auto w : w_values) {
    if (w < 1 || w > 1000) fail(ErrorCode::kInvalidArgument, "w must lie in [1, 1000]");
  }
  SeededRandom rnd(opt.seed);
  const Bytes m = rnd.bytes(opt.message_size);
  const unsigned max_w = w_values.empty() ? 1 : *std::max_element(w_values.begin(), w_values.end());
  std::vector<Bytes> keys, ivs;
  for (unsigned i = 0; i < max_w; ++i) {
    keys.push_back(rnd.bytes(16));
    ivs.push_back(rnd.bytes(16));
  }
  std::mt19937_64 order(opt.seed);

  // The two series are timed apart so the baseline's cache footprint never
  // leaks into the secret-share numbers.
  std::vector<Point> shares, baseline;
  for (auto w : w_values) {
    shares.push_back({{"secret_share", w}, [&, k] { consume(codec::xor_split(m, k, rnd).shares[0].payload); }});
    baseline.push_back({{"per_recipient_baseline", w}, [&, w] {
                          for (unsigned i = 0; i < w; ++i) consume(crypto::aes128_ctr(keys[i], ivs[i], m));
                        }});
  }
  measure(shares, opt, order);
  measure(baseline, opt, order);
  auto out = results_of(shares);
  for (auto& r : results_of(baseline)) out.push_back(std::move(r));
  return out;
}

std::vector<BenchResult> bench_vs_servers(const BenchOptions& opt, const std::vector<unsigned>& k_values) {
  for (auto k : k_values) {
    if (k < 2 || k > 16) fail(ErrorCode::kInvalidArgument, "k must lie in [2, 16]");
  }
  SeededRandom rnd(opt.seed);
  const Bytes m = rnd.bytes(opt.message_size);
  std::mt19937_64 order(opt.seed);
  std::vector<Point> points;
  for (auto k : k_values) {
    points.push_back({{"xor_split_k", k}, [&, k] { consume(codec::xor_split(m, k, rnd).shares[0].payload); }});
  }
  measure(points, opt, order);
  return results_of(points);
}

std::vector<BenchResult> bench_prg_vs_cipher(const BenchOptions& opt) {
  SeededRandom rnd(opt.seed);
  const Bytes m = rnd.bytes(opt.message_size);
  const Bytes key = rnd.bytes(16), iv = rnd.bytes(16);
  Bytes pad(m.size()), out(m.size());
  std::mt19937_64 order(opt.seed);
  std::vector<Point> points;
  points.push_back({{"prg_xor", 1}, [&] {
                      rnd.fill(pad);
                      for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] ^ pad[i];
                      consume(out);
                    }});
  points.push_back({{"block_cipher", 1}, [&] { consume(crypto::aes128_ctr(key, iv, m)); }});
  measure(points, opt, order);
  return results_of(points);
}

std::vector<BenchResult> select(const std::vector<BenchResult>& all, const std::string& scenario) {
  std::vector<BenchResult> out;
  for (const auto& r : all) {
    if (r.scenario == scenario) out.push_back(r);
  }
  return out;
}

const BenchResult& at(const std::vector<BenchResult>& all, const std::string& scenario, std::uint64_t param) {
  for (const auto& r : all) {
    if (r.scenario == scenario && r.param == param) return r;
  }
  fail(ErrorCode::kInvalidArgument, "no result for " + scenario + " at " + std::to_string(param));
}

std::string to_csv(const std::vector<BenchResult>& results) {
  std::ostringstream out;
  out << "scenario,param,mean_ns,stddev_ns,reps\n";
  out.setf(std::ios::fixed);
  out.precision(1);
  for (const auto& r : results) {
    out << r.scenario << ',' << r.param << ',' << r.mean_ns << ',' << r.stddev_ns << ',' << r.reps << '\n';
  }
  return out.str();
}

TransferCount count_transfers(unsigned w, unsigned messages, unsigned k, std::uint64_t seed) {
  if (w < 2) fail(ErrorCode::kInvalidArgument, "a broadcast needs at least 2 members");
  static int serial = 0;
  const auto tag = "snet-transfers-" + std::to_string(::getpid()) + "-" + std::to_string(serial++);
  const auto base = fs::temp_directory_path() / tag;
  fs::remove_all(base);
  auto clock = std::make_shared<ManualClock>(1'000'000);
  std::vector<std::string> ids;
  std::vector<std::shared_ptr<backend::SimulatedCloud>> clouds;
  for (unsigned c = 0; c < k; ++c) {
    ids.push_back(tag + "-sp" + std::to_string(c));
    clouds.push_back(std::make_shared<backend::SimulatedCloud>(backend::SimulatedOptions{0, 0, seed + c}, clock));
    backend::SimulatedCloud::install(ids.back(), clouds.back());
  }
  struct Cleanup {
    std::vector<std::string>& ids;
    fs::path base;
    ~Cleanup() {
      for (const auto& id : ids) backend::SimulatedCloud::forget(id);
      std::error_code ec;
      fs::remove_all(base, ec);
    }
  } cleanup{ids, base};

  std::vector<std::unique_ptr<SeededRandom>> rnds;
  std::vector<conv::Device> devices;
  std::vector<std::string> labels;
  for (unsigned c = 0; c < k; ++c) labels.push_back("sp" + std::to_string(c));
  for (unsigned d = 0; d < w; ++d) {
    rnds.push_back(std::make_unique<SeededRandom>(seed * 7919 + d));
    auto dev = conv::Device::init(base / ("m" + std::to_string(d)), *rnds.back());
    for (unsigned c = 0; c < k; ++c) {
      dev.add_backend({labels[c], backend::BackendKind::kSimulated, ids[c], ""});
      clouds[c]->register_account(dev.member_token());
    }
    devices.push_back(std::move(dev));
  }
  std::vector<conv::MemberSpec> others;
  for (unsigned d = 1; d < w; ++d) others.push_back({devices[d].member_token(), ""});
  auto created = conv::create_conversation(devices[0], others, codec::SchemeConfig::xor_scheme(k), labels,
                                           {clock.get(), rnds[0].get()});
  std::vector<std::unique_ptr<conv::Conversation>> convs;
  convs.push_back(std::move(created.conversation));
  for (unsigned d = 1; d < w; ++d) {
    convs.push_back(conv::join_conversation(devices[d], created.invitation_code, {clock.get(), rnds[d].get()}));
  }
  // Settle the empty logs every member publishes on joining.
  for (int round = 0; round < 2; ++round) {
    for (auto& c : convs) c->sync();
  }

  TransferCount out;
  out.w = w;
  out.k = k;
  out.messages = messages;
  out.downloads.assign(w - 1, 0);
  out.baseline_uploads = static_cast<std::uint64_t>(w) * messages;
  for (unsigned i = 0; i < messages; ++i) {
    clock->advance(10);
    convs[0]->append_message(conv::ContentType::kTextUtf8, to_bytes("broadcast " + std::to_string(i)));
    const auto sent = convs[0]->sync();
    out.uploads += sent.uploads;
    out.max_uploads_per_message = std::max(out.max_uploads_per_message, sent.uploads);
    for (unsigned d = 1; d < w; ++d) out.downloads[d - 1] += convs[d]->sync().downloads;
  }
  return out;
}

}  // namespace snet::bench
