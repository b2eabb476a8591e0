// snet: command-line client for the local daemon, plus the in-process
// benchmark and attack harnesses.

#include <httplib.h>
#include <signal.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "snet/backend/http_cloud.hpp"
#include "snet/bench/bench.hpp"
#include "snet/codec/sharing.hpp"
#include "snet/conv/conversation.hpp"
#include "snet/covert/collusion.hpp"
#include "snet/covert/detector.hpp"
#include "snet/covert/stego.hpp"
#include "snet/crypto.hpp"
#include "snet/error.hpp"
#include "snet/service/daemon.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace snet;

namespace {

struct Globals {
  std::string data_dir;
  std::string daemon_url = "http://127.0.0.1:" + std::to_string(service::kDefaultPort);
  std::string token_file;
  bool json_out = false;
};

Globals g;

fs::path data_dir() {
  if (!g.data_dir.empty()) return g.data_dir;
  if (const char* env = std::getenv("SNET_HOME")) return env;
  const char* home = std::getenv("HOME");
  return fs::path(home ? home : ".") / ".snet";
}

std::string dump(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace); }

// Prints `j` under --json, otherwise the human line(s).
void emit(const json& j, const std::string& human) {
  if (g.json_out) {
    std::cout << dump(j) << "\n";
  } else if (!human.empty()) {
    std::cout << human << (human.back() == '\n' ? "" : "\n");
  }
}

std::vector<unsigned> parse_list(const std::string& text) {
  std::vector<unsigned> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash != std::string::npos) {
      const auto lo = std::stoul(item.substr(0, dash)), hi = std::stoul(item.substr(dash + 1));
      for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<unsigned>(v));
    } else if (!item.empty()) {
      out.push_back(static_cast<unsigned>(std::stoul(item)));
    }
  }
  return out;
}

// Blocks SIGINT and SIGTERM in every thread started afterwards and returns
// once one arrives.
struct SignalWaiter {
  sigset_t set;
  SignalWaiter() {
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
  }
  int wait() {
    int sig = 0;
    sigwait(&set, &sig);
    return sig;
  }
};

// ---- daemon client ----------------------------------------------------------

class DaemonClient {
 public:
  DaemonClient() : client_(g.daemon_url) {
    client_.set_read_timeout(60, 0);
    const auto file = g.token_file.empty() ? data_dir() / "auth_token" : fs::path(g.token_file);
    if (!fs::exists(file)) fail(ErrorCode::kConfigInvalid, "no auth token at " + file.string() + "; is the daemon initialised?");
    token_ = to_string(read_file(file));
    while (!token_.empty() && (token_.back() == '\n' || token_.back() == '\r')) token_.pop_back();
  }

  json get(const std::string& path) { return check(client_.Get(path, headers())); }
  json post(const std::string& path, const json& body) {
    return check(client_.Post(path, headers(), body.dump(), "application/json"));
  }

 private:
  httplib::Headers headers() const { return {{"X-Auth-Token", token_}}; }
  json check(const httplib::Result& r) {
    if (!r) fail(ErrorCode::kBackendUnavailable, "daemon at " + g.daemon_url + " unreachable");
    auto body = r->body.empty() ? json::object() : json::parse(r->body);
    if (r->status >= 400) {
      const auto code = body.value("error", std::string("io_failure"));
      throw Error(code == "unauthorized" ? ErrorCode::kAccessDenied : error_code_from_name(code),
                  body.value("detail", r->body));
    }
    return body;
  }

  httplib::Client client_;
  std::string token_;
};

std::string message_line(const json& m) {
  std::string body = m.contains("text") ? m["text"].get<std::string>() : "[media " + m.value("media_path", "") + "]";
  return std::to_string(m["timestamp_ms"].get<std::int64_t>()) + " " + m["sender"].get<std::string>() + ": " + body;
}

// ---- in-process harnesses ---------------------------------------------------

json results_json(const std::vector<bench::BenchResult>& rs) {
  json out = json::array();
  for (const auto& r : rs) {
    out.push_back({{"scenario", r.scenario}, {"param", r.param}, {"mean_ns", r.mean_ns}, {"stddev_ns", r.stddev_ns}, {"reps", r.reps}});
  }
  return out;
}

json fit_json(const bench::LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"slope_ci95", {f.slope_ci_lo, f.slope_ci_hi}}};
}

void write_csv(const std::string& path, const std::vector<bench::BenchResult>& rs) {
  if (path.empty()) return;
  std::ofstream(path) << bench::to_csv(rs);
}

std::vector<fs::path> files_under(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (e.is_regular_file()) out.push_back(e.path());
      }
    } else {
      out.push_back(in);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snet: stealth messaging over secret-shared cloud storage"};
  app.require_subcommand(1);
  app.add_option("--data", g.data_dir, "Device data directory (default $SNET_HOME or ~/.snet)");
  app.add_option("--daemon", g.daemon_url, "Daemon base URL");
  app.add_option("--token-file", g.token_file, "Auth token file (default <data>/auth_token)");
  app.add_flag("--json", g.json_out, "Machine-readable output");

  std::function<void()> action;

  // init
  auto* init = app.add_subcommand("init", "Create this device's member token");
  init->callback([&] {
    action = [] {
      SecureRandom rnd;
      auto dev = conv::Device::init(data_dir(), rnd);
      emit({{"member_token", dev.member_token()}, {"data_dir", data_dir().string()}}, dev.member_token());
    };
  });

  // backend add | list
  auto* backend_cmd = app.add_subcommand("backend", "Configure storage backends");
  backend_cmd->require_subcommand(1);
  std::string b_label, b_kind = "simulated", b_root, b_account;
  auto* badd = backend_cmd->add_subcommand("add", "Add or replace a backend");
  badd->add_option("label", b_label, "Local label")->required();
  badd->add_option("--kind", b_kind, "sync_folder or simulated");
  badd->add_option("--root", b_root, "Sync folder path, simulated registry id or http://host:port")->required();
  badd->add_option("--account", b_account, "Provider account (default: member token)");
  badd->callback([&] {
    action = [&] {
      auto dev = conv::Device::open(data_dir());
      dev.add_backend({b_label, backend::parse_backend_kind(b_kind), b_root, b_account});
      const auto& h = dev.backend(b_label);
      // Touch the provider once so the account exists for peers' grants.
      backend::open_backend(h)->list_objects("");
      emit({{"label", h.label}, {"kind", backend::backend_kind_name(h.kind)}, {"root", h.root}, {"account", h.account}},
           "added " + h.label);
    };
  });
  auto* blist = backend_cmd->add_subcommand("list", "List configured backends");
  blist->callback([&] {
    action = [] {
      auto dev = conv::Device::open(data_dir());
      json out = json::array();
      std::string human;
      for (const auto& b : dev.backends()) {
        out.push_back({{"label", b.label}, {"kind", backend::backend_kind_name(b.kind)}, {"root", b.root}, {"account", b.account}});
        human += b.label + "\t" + std::string(backend::backend_kind_name(b.kind)) + "\t" + b.root + "\n";
      }
      emit({{"backends", out}}, human.empty() ? "no backends" : human);
    };
  });

  // cloud serve
  auto* cloud = app.add_subcommand("cloud", "Simulated provider service");
  cloud->require_subcommand(1);
  std::string c_host = "127.0.0.1";
  int c_port = 0;
  std::int64_t c_delay_lo = 0, c_delay_hi = 0;
  std::uint64_t c_seed = 1;
  auto* cserve = cloud->add_subcommand("serve", "Serve one simulated provider over loopback HTTP");
  cserve->add_option("--host", c_host);
  cserve->add_option("--port", c_port, "0 picks a free port");
  cserve->add_option("--delay-lo", c_delay_lo, "Minimum propagation delay, ms");
  cserve->add_option("--delay-hi", c_delay_hi, "Maximum propagation delay, ms");
  cserve->add_option("--seed", c_seed);
  cserve->callback([&] {
    action = [&] {
      SignalWaiter signals;
      auto sim = std::make_shared<backend::SimulatedCloud>(backend::SimulatedOptions{c_delay_lo, c_delay_hi, c_seed});
      backend::CloudService svc(sim);
      const int port = svc.start(c_host, c_port);
      emit({{"url", svc.url()}, {"port", port}}, svc.url());
      std::cout.flush();
      signals.wait();
      svc.stop();
    };
  });

  // daemon
  service::DaemonConfig dcfg;
  auto* daemon = app.add_subcommand("daemon", "Run the local sync daemon");
  daemon->add_option("--host", dcfg.host);
  daemon->add_option("--port", dcfg.port, "0 picks a free port");
  daemon->add_option("--poll-ms", dcfg.poll_interval_ms, "Sync loop interval");
  daemon->add_option("--long-poll-ms", dcfg.long_poll_ms, "Hold time for wait=1 message requests");
  daemon->add_option("--ui-dir", dcfg.ui_dir, "Static web client served at /ui/");
  daemon->callback([&] {
    action = [&] {
      SignalWaiter signals;
      dcfg.data_dir = data_dir();
      dcfg.token_file = g.token_file;
      if (dcfg.ui_dir.empty()) dcfg.ui_dir = dcfg.data_dir / "ui";
      service::Daemon d(dcfg);
      const int port = d.start();
      emit({{"port", port}, {"url", "http://" + dcfg.host + ":" + std::to_string(port)}},
           "listening on http://" + dcfg.host + ":" + std::to_string(port));
      std::cout.flush();
      signals.wait();
      d.stop();
    };
  });

  // status
  auto* status = app.add_subcommand("status", "Daemon health and backend state");
  status->callback([&] {
    action = [] {
      auto s = DaemonClient().get("/v1/status");
      std::string human = "member " + s["member_token"].get<std::string>() + ", " +
                          std::to_string(s["conversations"].get<int>()) + " conversation(s), last cycle " +
                          std::to_string(s["last_cycle_ms"].get<std::int64_t>()) + " ms\n";
      for (const auto& b : s["backends"]) human += "  " + b["label"].get<std::string>() + " " + b["status"].get<std::string>() + "\n";
      emit(s, human);
    };
  });

  // conv new | join | list
  auto* convc = app.add_subcommand("conv", "Conversations");
  convc->require_subcommand(1);
  std::vector<std::string> cv_members;
  std::string cv_scheme = "xor:2", cv_backends, cv_code;
  auto* cnew = convc->add_subcommand("new", "Create a conversation and print its invitation code");
  cnew->add_option("--member", cv_members, "Member token, optionally token@account")->required();
  cnew->add_option("--scheme", cv_scheme, "xor:<k> | additive:<k>:<N>:<block> | additive:<k>:unknown | shamir:<t>:<n>[:<p>:<block>]");
  cnew->add_option("--backends", cv_backends, "Comma-separated backend labels, one per share")->required();
  cnew->callback([&] {
    action = [&] {
      std::vector<std::string> labels;
      std::stringstream ss(cv_backends);
      for (std::string l; std::getline(ss, l, ',');) labels.push_back(l);
      auto r = DaemonClient().post("/v1/conversations", {{"members", cv_members}, {"scheme", cv_scheme}, {"backends", labels}});
      emit(r, r["conv_token"].get<std::string>() + "\n" + r["invitation_code"].get<std::string>());
    };
  });
  auto* cjoin = convc->add_subcommand("join", "Join with an invitation code");
  cjoin->add_option("code", cv_code)->required();
  cjoin->callback([&] {
    action = [&] {
      auto r = DaemonClient().post("/v1/conversations/join", {{"invitation_code", cv_code}});
      emit(r, "joined " + r["conv_token"].get<std::string>());
    };
  });
  auto* clist = convc->add_subcommand("list", "List conversations");
  clist->callback([&] {
    action = [] {
      auto r = DaemonClient().get("/v1/conversations");
      std::string human;
      for (const auto& c : r["conversations"]) {
        human += c["conv_token"].get<std::string>() + "  " + c["scheme"].get<std::string>() + "  " +
                 std::to_string(c["members"].size()) + " members\n";
      }
      emit(r, human.empty() ? "no conversations" : human);
    };
  });

  // send
  std::string s_conv, s_text, s_file;
  auto* send = app.add_subcommand("send", "Send a text message or a media file");
  send->add_option("conv", s_conv, "Conversation token")->required();
  auto* text_opt = send->add_option("text", s_text, "Message text");
  send->add_option("--file", s_file, "Send this file as media")->excludes(text_opt);
  send->callback([&] {
    action = [&] {
      json body;
      if (!s_file.empty()) {
        body = {{"content_type", "MEDIA_REF"}, {"body_b64", crypto::base64_encode(read_file(s_file))}};
      } else {
        body = {{"content_type", "TEXT_UTF8"}, {"body_b64", crypto::base64_encode(to_bytes(s_text))}};
      }
      auto r = DaemonClient().post("/v1/conversations/" + s_conv + "/messages", body);
      emit(r, "sent at " + std::to_string(r["timestamp_ms"].get<std::int64_t>()));
    };
  });

  // tail
  std::string t_conv, t_since;
  bool t_follow = false;
  auto* tail = app.add_subcommand("tail", "Print messages, optionally following new ones");
  tail->add_option("conv", t_conv, "Conversation token")->required();
  tail->add_option("--since", t_since, "Cursor to start after");
  tail->add_flag("-f,--follow", t_follow, "Keep waiting for new messages");
  tail->callback([&] {
    action = [&] {
      DaemonClient client;
      std::string cursor = t_since;
      do {
        auto r = client.get("/v1/conversations/" + t_conv + "/messages?since=" + cursor + (t_follow ? "&wait=1" : ""));
        for (const auto& m : r["messages"]) {
          if (g.json_out) {
            std::cout << m.dump(-1, ' ', false, json::error_handler_t::replace) << "\n";
          } else {
            std::cout << message_line(m) << "\n";
          }
        }
        std::cout.flush();
        cursor = r["cursor"].get<std::string>();
      } while (t_follow);
    };
  });

  // sync
  auto* syncc = app.add_subcommand("sync", "Run one sync cycle now");
  syncc->callback([&] {
    action = [] {
      auto r = DaemonClient().post("/v1/sync", json::object());
      std::string human;
      for (const auto& [token, rep] : r["reports"].items()) {
        human += token + ": " + std::to_string(rep["uploads"].get<int>()) + " up, " +
                 std::to_string(rep["downloads"].get<int>()) + " down, " + std::to_string(rep["waiting"].size()) +
                 " waiting\n";
      }
      emit(r, human.empty() ? "nothing to sync" : human);
    };
  });

  // bench recipients | servers | transfers
  auto* benchc = app.add_subcommand("bench", "Cost benchmarks");
  benchc->require_subcommand(1);
  bench::BenchOptions bo;
  std::string bw = "1,10,20,50,100,200,500,1000", bk = "2-16", b_csv;
  unsigned bt_w = 5, bt_m = 10, bt_k = 2;
  for (auto* sub : {benchc->add_subcommand("recipients", "Split time vs per-recipient encryption, over group size w"),
                    benchc->add_subcommand("servers", "Split time over share count k")}) {
    sub->add_option("--size", bo.message_size, "Message bytes");
    sub->add_option("--reps", bo.reps, "Timed repetitions per point (>= 30)");
    sub->add_option("--seed", bo.seed);
    sub->add_option("--csv", b_csv, "Also write scenario,param,mean_ns,stddev_ns,reps here");
  }
  benchc->get_subcommand("recipients")->add_option("--w", bw, "Group sizes, e.g. 1,10,100 or 1-5");
  benchc->get_subcommand("servers")->add_option("--k", bk, "Share counts, e.g. 2-16");
  benchc->get_subcommand("recipients")->callback([&] {
    action = [&] {
      auto rs = bench::bench_vs_recipients(bo, 2, parse_list(bw));
      auto prg = bench::bench_prg_vs_cipher(bo);
      const auto ss = bench::fit_samples(bench::select(rs, "secret_share"));
      const auto base = bench::fit_means(bench::select(rs, "per_recipient_baseline"));
      json j{{"results", results_json(rs)}, {"secret_share_fit", fit_json(ss)}, {"baseline_fit", fit_json(base)},
             {"prg_xor_vs_block_cipher", results_json(prg)}};
      std::string human = bench::to_csv(rs);
      human += "secret_share slope " + std::to_string(ss.slope) + " ns/member, 95% CI [" + std::to_string(ss.slope_ci_lo) +
               ", " + std::to_string(ss.slope_ci_hi) + "]\n";
      human += "baseline slope " + std::to_string(base.slope) + " ns/member, R^2 " + std::to_string(base.r2) + "\n";
      for (const auto& r : bench::select(rs, "secret_share")) {
        const auto& b = bench::at(rs, "per_recipient_baseline", r.param);
        human += "w=" + std::to_string(r.param) + " baseline/secret_share = " + std::to_string(b.mean_ns / r.mean_ns) + "\n";
      }
      human += "block_cipher/prg_xor = " +
               std::to_string(bench::at(prg, "block_cipher", 1).mean_ns / bench::at(prg, "prg_xor", 1).mean_ns) + "\n";
      write_csv(b_csv, rs);
      emit(j, human);
    };
  });
  benchc->get_subcommand("servers")->callback([&] {
    action = [&] {
      auto rs = bench::bench_vs_servers(bo, parse_list(bk));
      const auto f = bench::fit_means(rs);
      json j{{"results", results_json(rs)}, {"fit", fit_json(f)}};
      std::string human = bench::to_csv(rs) + "slope " + std::to_string(f.slope) + " ns/share, R^2 " + std::to_string(f.r2) + "\n";
      write_csv(b_csv, rs);
      emit(j, human);
    };
  });
  auto* btrans = benchc->add_subcommand("transfers", "Count share transfers in a real simulated session");
  btrans->add_option("--w", bt_w, "Group size");
  btrans->add_option("--messages", bt_m, "Messages broadcast by one member");
  btrans->add_option("--k", bt_k, "Share count");
  btrans->callback([&] {
    action = [&] {
      auto t = bench::count_transfers(bt_w, bt_m, bt_k);
      const auto max_down = t.downloads.empty() ? 0 : *std::max_element(t.downloads.begin(), t.downloads.end());
      const auto min_down = t.downloads.empty() ? 0 : *std::min_element(t.downloads.begin(), t.downloads.end());
      json j{{"w", t.w}, {"k", t.k}, {"messages", t.messages}, {"uploads", t.uploads},
             {"downloads_per_recipient", t.downloads}, {"baseline_uploads", t.baseline_uploads}};
      emit(j, "w=" + std::to_string(t.w) + " k=" + std::to_string(t.k) + " messages=" + std::to_string(t.messages) +
                  ": uploads " + std::to_string(t.uploads) + ", downloads per recipient " + std::to_string(min_down) +
                  (min_down == max_down ? "" : ".." + std::to_string(max_down)) + ", per-recipient baseline " +
                  std::to_string(t.baseline_uploads));
    };
  });

  // attack collusion | detect | corpus
  auto* attack = app.add_subcommand("attack", "Adversary experiments");
  attack->require_subcommand(1);
  std::string a_scheme = "xor:2", a_colluders = "1";
  std::uint64_t a_trials = 1000, a_seed = 1;
  auto* acoll = attack->add_subcommand("collusion", "Count plaintexts consistent with a colluding share subset");
  acoll->add_option("--scheme", a_scheme);
  acoll->add_option("--colluders", a_colluders, "1-based share indices held by the adversary");
  acoll->add_option("--trials", a_trials);
  acoll->add_option("--seed", a_seed);
  acoll->callback([&] {
    action = [&] {
      SeededRandom rnd(a_seed);
      const auto scheme = conv::parse_scheme_spec(a_scheme, rnd);
      const auto r = covert::collusion_experiment(scheme, parse_list(a_colluders), a_trials, rnd);
      json j{{"trials", r.trials}, {"reconstruction_success_rate", r.reconstruction_success_rate},
             {"expected_success_rate", r.expected_success_rate}, {"plaintext_entropy_bits", r.plaintext_entropy_estimate},
             {"min_candidates", r.min_candidates}, {"max_candidates", r.max_candidates},
             {"candidates_equally_likely", r.candidates_equally_likely}};
      emit(j, "success " + std::to_string(r.reconstruction_success_rate) + " (expected " +
                  std::to_string(r.expected_success_rate) + "), candidates " + std::to_string(r.min_candidates) + ".." +
                  std::to_string(r.max_candidates) + ", entropy " + std::to_string(r.plaintext_entropy_estimate) + " bits");
    };
  });
  std::vector<std::string> a_inputs;
  double a_alpha = covert::kDefaultAlpha;
  auto* adetect = attack->add_subcommand("detect", "Randomness screen over files or directories");
  adetect->add_option("inputs", a_inputs)->required();
  adetect->add_option("--alpha", a_alpha);
  adetect->callback([&] {
    action = [&] {
      json files = json::array();
      std::size_t flagged = 0, scored = 0;
      std::string human;
      for (const auto& f : files_under(a_inputs)) {
        const auto data = read_file(f);
        if (data.size() < covert::kMinDetectorBytes) {
          files.push_back({{"path", f.string()}, {"skipped", "too_short"}});
          continue;
        }
        const auto v = covert::randomness_score(data, a_alpha);
        ++scored;
        flagged += v.flagged_random;
        files.push_back({{"path", f.string()}, {"chi_square", v.chi_square_stat}, {"monobit_z", v.monobit_z}, {"random", v.flagged_random}});
        human += (v.flagged_random ? "RANDOM  " : "natural ") + f.string() + "\n";
      }
      const double frac = scored ? static_cast<double>(flagged) / static_cast<double>(scored) : 0.0;
      human += std::to_string(flagged) + "/" + std::to_string(scored) + " flagged random";
      emit({{"files", files}, {"flagged", flagged}, {"scored", scored}, {"flagged_fraction", frac}}, human);
    };
  });
  std::string a_out;
  unsigned a_count = 100;
  auto* acorpus = attack->add_subcommand("corpus", "Write raw share files and stego bitmaps for detect");
  acorpus->add_option("--out", a_out)->required();
  acorpus->add_option("--count", a_count);
  acorpus->add_option("--seed", a_seed);
  acorpus->callback([&] {
    action = [&] {
      SeededRandom rnd(a_seed);
      fs::create_directories(fs::path(a_out) / "raw");
      fs::create_directories(fs::path(a_out) / "stego");
      for (unsigned i = 0; i < a_count; ++i) {
        const auto msg = to_bytes("message " + std::to_string(i) + " " + std::string(2000, 'a' + static_cast<char>(i % 26)));
        const auto shares = codec::xor_split(msg, 2, rnd);
        write_file_atomic(fs::path(a_out) / "raw" / ("share" + std::to_string(i) + ".bin"), shares.shares[0].payload);
        const auto cover = covert::synthetic_natural_cover(128, 96, a_seed * 1000 + i);
        covert::write_bmp(fs::path(a_out) / "stego" / ("share" + std::to_string(i) + ".bmp"),
                          covert::embed_share(shares.shares[0].payload, cover));
      }
      emit({{"out", a_out}, {"count", a_count}}, "wrote " + std::to_string(a_count) + " raw shares and stego bitmaps to " + a_out);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    action();
  } catch (const Error& e) {
    if (g.json_out) {
      std::cout << dump({{"error", error_code_name(e.code())}, {"detail", e.detail()}}) << "\n";
    } else {
      std::cerr << "snet: " << e.what() << "\n";
    }
    return 1;
  } catch (const std::exception& e) {
    if (g.json_out) {
      std::cout << dump({{"error", "io_failure"}, {"detail", e.what()}}) << "\n";
    } else {
      std::cerr << "snet: " << e.what() << "\n";
    }
    return 1;
  }
  return 0;
}
