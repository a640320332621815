#include "tomo/cli.hpp"

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tomo/detectors.hpp"
#include "tomo/errors.hpp"
#include "tomo/io.hpp"
#include "tomo/log.hpp"
#include "tomo/selftest.hpp"
#include "tomo/sim.hpp"
#include "tomo/tlsd.hpp"
#include "tomo/version.hpp"

namespace tomo {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitCapability = 3;

std::vector<Detector> detectors_from_csv(const std::string& csv) {
  std::vector<Detector> dets;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    const auto det = parse_detector(cur);
    if (!det) throw std::invalid_argument("unknown detector '" + cur + "'");
    dets.push_back(*det);
    cur.clear();
  };
  for (char ch : csv) {
    if (ch == ',') {
      flush();
    } else if (ch != ' ') {
      cur.push_back(ch);
    }
  }
  flush();
  if (dets.empty()) throw std::invalid_argument("detector list is empty");
  return dets;
}

struct SimulateArgs {
  std::string config_path;
  std::optional<int> d, p, mod, channels, frame_len, workers, max_sweeps;
  std::optional<std::string> snr, detectors;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool no_arbitration = false;
  std::string out_csv = "results.csv";
  std::string out_manifest = "manifest.json";
};

int cmd_simulate(const SimulateArgs& args) {
  SimConfig cfg;
  cfg.snr_grid_db.clear();
  try {
    if (!args.config_path.empty()) {
      const auto kv = parse_key_values(read_text_file(args.config_path));
      for (const auto& [key, value] : kv) apply_config_entry(cfg, key, value);
    }
    if (args.d) cfg.d = *args.d;
    if (args.p) cfg.p = *args.p;
    if (args.mod) cfg.constellation_m = *args.mod;
    if (args.snr) cfg.snr_grid_db = parse_snr_grid(*args.snr);
    if (args.channels) cfg.n_channels = *args.channels;
    if (args.frame_len) cfg.frame_len = *args.frame_len;
    if (args.detectors) cfg.detectors = detectors_from_csv(*args.detectors);
    if (args.seed) cfg.seed = *args.seed;
    if (args.workers) cfg.workers = *args.workers;
    if (args.max_sweeps) cfg.tlsd.max_sweeps = *args.max_sweeps;
    if (args.tol) cfg.tlsd.tol = *args.tol;
    if (args.no_arbitration) cfg.tlsd.arbitrate_with_sic = false;
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  }

  try {
    const std::string started = utc_timestamp();
    std::vector<PointTiming> timings;
    const std::vector<SerRecord> records = run_sweep(cfg, &timings);
    const std::string finished = utc_timestamp();
    write_text_file(args.out_csv, csv_from_records(records));
    write_text_file(args.out_manifest, manifest_json(cfg, timings, started, finished));
    log_info("wrote %s and %s", args.out_csv.c_str(), args.out_manifest.c_str());
  } catch (const CapabilityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCapability;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitOk;
}

struct DecodeArgs {
  std::string input_path;
  int mod = 2;
  double sigma2 = 1.0;
  std::string detectors = "zf,mmse,mmse-sic,tlsd,ml";
  int max_sweeps = 10;
  double tol = 1e-6;
  bool no_arbitration = false;
  bool oracle = false;
};

void print_symbols(const char* tag, const SymbolVector& s) {
  std::printf("%s", tag);
  for (double v : s.values) std::printf(" %+g", v);
  std::printf("\n");
}

int cmd_decode(const DecodeArgs& args) {
  Instance inst;
  Constellation c;
  std::vector<Detector> dets;
  try {
    inst = read_instance_file(args.input_path);
    c = make_constellation(args.mod);
    dets = detectors_from_csv(args.detectors);
    if (!(args.sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  }

  try {
    const Problem pb(inst.H, inst.x, args.sigma2, c);
    TlsdConfig tcfg{args.max_sweeps, args.tol, !args.no_arbitration};
    for (Detector det : dets) {
      switch (det) {
        case Detector::kZf: {
          const auto out = zf_detect(pb);
          print_symbols("zf:", out.hard);
          std::printf("zf residual2: %.12g\n", out.residual2);
          break;
        }
        case Detector::kMmse: {
          const auto out = mmse_detect(pb);
          print_symbols("mmse:", out.hard);
          std::printf("mmse residual2: %.12g\n", out.residual2);
          break;
        }
        case Detector::kMmseSic: {
          const auto out = mmse_sic_detect(pb);
          print_symbols("mmse-sic:", out.hard);
          std::printf("mmse-sic residual2: %.12g\n", out.residual2);
          break;
        }
        case Detector::kMl: {
          const auto out = ml_detect(pb);
          print_symbols("ml:", out.hard);
          std::printf("ml residual2: %.12g\n", out.residual2);
          break;
        }
        case Detector::kTlsd: {
          const TlsdResult res = tlsd_detect(pb, tcfg);
          print_symbols("tlsd:", res.hard);
          std::printf("tlsd winner: %s\n",
                      res.winner == ArbitrationWinner::kTlsd ? "tlsd" : "mmse-sic");
          std::printf("tlsd sweeps_used: %d converged: %d\n", res.sweeps_used,
                      res.converged ? 1 : 0);
          for (int i = 0; i < res.posteriors.dim(); ++i) {
            std::printf("tlsd posterior %d:", i);
            for (double v : res.posteriors.theta(i)) std::printf(" %.9g", v);
            std::printf("\n");
          }
          for (int i = 0; i < res.bit_llrs.rows(); ++i) {
            std::printf("tlsd llr %d:", i);
            for (int b = 0; b < res.bit_llrs.cols(); ++b)
              std::printf(" %.6g", res.bit_llrs(i, b));
            std::printf("\n");
          }
          break;
        }
      }
    }
    if (args.oracle) {
      if (!ml_feasible(c.size(), pb.tx()))
        throw CapabilityError("oracle: M^d exceeds the 2^20 enumeration guard");
      // exhaustive posterior marginals over the full candidate set
      const int d = pb.tx();
      const int m = c.size();
      std::vector<double> marg(static_cast<std::size_t>(d) * m, 0.0);
      std::vector<int> idx(d, 0);
      Vec cand(d);
      double z = 0.0;
      for (;;) {
        for (int i = 0; i < d; ++i) cand[i] = c.symbols[idx[i]];
        const double w = std::exp(-residual2(pb.H, pb.x, cand) / (2.0 * pb.sigma2));
        z += w;
        for (int i = 0; i < d; ++i) marg[static_cast<std::size_t>(i) * m + idx[i]] += w;
        int k = d - 1;
        while (k >= 0 && idx[k] == m - 1) idx[k--] = 0;
        if (k < 0) break;
        ++idx[k];
      }
      for (int i = 0; i < d; ++i) {
        std::printf("oracle marginal %d:", i);
        for (int k = 0; k < m; ++k)
          std::printf(" %.9g", marg[static_cast<std::size_t>(i) * m + k] / z);
        std::printf("\n");
      }
    }
  } catch (const CapabilityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCapability;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_selftest(bool quick, std::uint64_t seed, const std::string& fault_name) {
  SelftestFault fault = SelftestFault::kNone;
  if (fault_name == "skip-qr-column") {
    fault = SelftestFault::kSkipQrColumn;
  } else if (!fault_name.empty()) {
    std::fprintf(stderr, "error: unknown fault '%s'\n", fault_name.c_str());
    return kExitBadInput;
  }
  const SelftestReport report = run_selftest(quick, fault, seed);
  int failures = 0;
  for (const auto& item : report.items) {
    std::printf("[%s] %s (%s)\n", item.passed ? "pass" : "FAIL", item.name.c_str(),
                item.detail.c_str());
    failures += item.passed ? 0 : 1;
  }
  if (failures > 0) {
    std::printf("selftest: %d invariant(s) failed\n", failures);
    return kExitFailure;
  }
  std::printf("selftest: all invariants hold\n");
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Integer least-squares detection and Monte Carlo SER simulation"};
  app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kToolVersion));
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run an SER-vs-SNR sweep, write CSV + manifest");
  SimulateArgs sargs;
  int s_d = 0, s_p = 0, s_mod = 0, s_channels = 0, s_frame = 0, s_workers = 0, s_sweeps = 0;
  std::string s_snr, s_dets;
  std::uint64_t s_seed = 0;
  double s_tol = 0.0;
  sim->add_option("--config", sargs.config_path, "Config file (flat key = value)");
  auto* od = sim->add_option("--d", s_d, "Transmit streams");
  auto* op = sim->add_option("--p", s_p, "Receive dimension");
  auto* om = sim->add_option("--mod", s_mod, "Constellation size M (power of two)");
  auto* os = sim->add_option("--snr", s_snr, "SNR grid in dB: start:step:stop, list, or value");
  auto* oc = sim->add_option("--channels", s_channels, "Channel realizations per point");
  auto* of = sim->add_option("--frame-len", s_frame, "Uses per channel realization");
  auto* ot = sim->add_option("--detectors", s_dets, "Comma list: zf,mmse,mmse-sic,tlsd,ml");
  auto* oseed = sim->add_option("--seed", s_seed, "Run seed");
  auto* ow = sim->add_option("--workers", s_workers, "Worker threads (1 = serial)");
  auto* osw = sim->add_option("--max-sweeps", s_sweeps, "TLSD sweep cap");
  auto* otol = sim->add_option("--tol", s_tol, "TLSD convergence tolerance");
  sim->add_flag("--no-arbitration", sargs.no_arbitration, "Disable the MMSE-SIC arbitration");
  sim->add_option("--out", sargs.out_csv, "Output CSV path");
  sim->add_option("--manifest", sargs.out_manifest, "Output manifest path");

  // decode
  auto* dec = app.add_subcommand("decode", "Decode one instance from a text file");
  DecodeArgs dargs;
  dec->add_option("--input", dargs.input_path, "Instance file: 'p d', H rows, x row")
      ->required();
  dec->add_option("--mod", dargs.mod, "Constellation size M");
  dec->add_option("--sigma2", dargs.sigma2, "Noise variance per real component");
  dec->add_option("--detectors", dargs.detectors, "Comma list of detectors");
  dec->add_option("--max-sweeps", dargs.max_sweeps, "TLSD sweep cap");
  dec->add_option("--tol", dargs.tol, "TLSD convergence tolerance");
  dec->add_flag("--no-arbitration", dargs.no_arbitration, "Disable the MMSE-SIC arbitration");
  dec->add_flag("--oracle", dargs.oracle, "Also print exhaustive posterior marginals");

  // selftest
  auto* st = app.add_subcommand("selftest", "Run the fast invariant suite");
  bool st_quick = false;
  std::uint64_t st_seed = 0xb0a710c5ULL;
  std::string st_fault;
  st->add_flag("--quick", st_quick, "Trimmed trial counts");
  st->add_option("--seed", st_seed, "Selftest seed");
  st->add_option("--inject-fault", st_fault, "Deliberate breakage (skip-qr-column)")
      ->group("");  // hidden; exercises the suite itself

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  if (sim->parsed()) {
    if (od->count()) sargs.d = s_d;
    if (op->count()) sargs.p = s_p;
    if (om->count()) sargs.mod = s_mod;
    if (os->count()) sargs.snr = s_snr;
    if (oc->count()) sargs.channels = s_channels;
    if (of->count()) sargs.frame_len = s_frame;
    if (ot->count()) sargs.detectors = s_dets;
    if (oseed->count()) sargs.seed = s_seed;
    if (ow->count()) sargs.workers = s_workers;
    if (osw->count()) sargs.max_sweeps = s_sweeps;
    if (otol->count()) sargs.tol = s_tol;
    return cmd_simulate(sargs);
  }
  if (dec->parsed()) return cmd_decode(dargs);
  if (st->parsed()) return cmd_selftest(st_quick, st_seed, st_fault);
  return kExitBadInput;
}

}  // namespace tomo
