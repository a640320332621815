#include "tomo/sim.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tomo/detectors.hpp"
#include "tomo/errors.hpp"
#include "tomo/log.hpp"

namespace tomo {

namespace {

constexpr Detector kAllDetectors[] = {Detector::kZf, Detector::kMmse, Detector::kMmseSic,
                                      Detector::kTlsd, Detector::kMl};

struct ChannelCounts {
  std::vector<std::uint64_t> symbol_errors;
  std::vector<std::uint64_t> vector_errors;
};

// One block-fading frame: draw H once, reuse its projections for every
// channel use, run each configured detector and count errors against the
// transmitted symbols.
ChannelCounts simulate_channel(const SimConfig& cfg, const Constellation& c, double sigma2,
                               std::uint64_t chan_seed) {
  const int nd = static_cast<int>(cfg.detectors.size());
  ChannelCounts counts{std::vector<std::uint64_t>(nd, 0), std::vector<std::uint64_t>(nd, 0)};

  Rng rng(chan_seed);
  const Mat h = sample_channel(rng, cfg.p, cfg.d);

  bool need_tlsd = false;
  for (Detector det : cfg.detectors) need_tlsd |= det == Detector::kTlsd;
  std::optional<ProjectionCache> cache;
  if (need_tlsd) cache.emplace(h);

  std::vector<int> true_idx(cfg.d);
  Vec x(cfg.p);
  const double noise_scale = std::sqrt(sigma2);

  for (int use = 0; use < cfg.frame_len; ++use) {
    for (int i = 0; i < cfg.d; ++i) true_idx[i] = rng.next_index(c.size());
    for (int r = 0; r < cfg.p; ++r) {
      double acc = noise_scale * rng.next_gaussian();
      for (int i = 0; i < cfg.d; ++i) acc += h(r, i) * c.symbols[true_idx[i]];
      x[r] = acc;
    }
    Problem pb(h, x, sigma2, c);
    if (cache) cache->refresh(x);

    for (int k = 0; k < nd; ++k) {
      SymbolVector hard;
      switch (cfg.detectors[k]) {
        case Detector::kZf:
          hard = zf_detect(pb).hard;
          break;
        case Detector::kMmse:
          hard = mmse_detect(pb).hard;
          break;
        case Detector::kMmseSic:
          hard = mmse_sic_detect(pb).hard;
          break;
        case Detector::kTlsd:
          hard = tlsd_detect(pb, *cache, cfg.tlsd).hard;
          break;
        case Detector::kMl:
          hard = ml_detect(pb).hard;
          break;
      }
      std::uint64_t errs = 0;
      for (int i = 0; i < cfg.d; ++i) errs += hard.indices[i] != true_idx[i];
      counts.symbol_errors[k] += errs;
      counts.vector_errors[k] += errs > 0;
    }
  }
  return counts;
}

}  // namespace

std::string_view detector_name(Detector det) {
  switch (det) {
    case Detector::kZf: return "zf";
    case Detector::kMmse: return "mmse";
    case Detector::kMmseSic: return "mmse-sic";
    case Detector::kTlsd: return "tlsd";
    case Detector::kMl: return "ml";
  }
  return "?";
}

std::optional<Detector> parse_detector(std::string_view name) {
  for (Detector det : kAllDetectors)
    if (name == detector_name(det)) return det;
  return std::nullopt;
}

std::vector<Detector> default_detectors() {
  return {Detector::kZf, Detector::kMmse, Detector::kMmseSic, Detector::kTlsd, Detector::kMl};
}

void SimConfig::validate() const {
  if (d < 2) throw std::invalid_argument("config field d: need d >= 2");
  if (p < d) throw std::invalid_argument("config field p: need p >= d");
  if (constellation_m < 2 || (constellation_m & (constellation_m - 1)) != 0)
    throw std::invalid_argument("config field constellation_m: must be a power of two >= 2");
  if (snr_grid_db.empty())
    throw std::invalid_argument("config field snr_grid_db: grid must be nonempty");
  if (n_channels < 1) throw std::invalid_argument("config field n_channels: need >= 1");
  if (frame_len < 1) throw std::invalid_argument("config field frame_len: need >= 1");
  if (detectors.empty())
    throw std::invalid_argument("config field detectors: select at least one detector");
  if (tlsd.max_sweeps < 1)
    throw std::invalid_argument("config field max_sweeps: need >= 1");
  if (tlsd.tol < 0.0) throw std::invalid_argument("config field tol: must be nonnegative");
}

std::vector<SerRecord> run_point(const SimConfig& config, double snr_db, int snr_idx) {
  config.validate();
  const Constellation c = make_constellation(config.constellation_m);
  for (Detector det : config.detectors)
    if (det == Detector::kMl && !ml_feasible(c.size(), config.d))
      throw CapabilityError("ml: M^d exceeds the 2^20 search guard for this configuration");

  const double sigma2 = sigma2_from_snr(snr_db, c, config.d);
  const int nd = static_cast<int>(config.detectors.size());
  const int nch = config.n_channels;

  std::vector<ChannelCounts> per_channel(nch);
  std::string failure;

  if (config.workers > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(config.workers)
    for (int ch = 0; ch < nch; ++ch) {
      try {
        per_channel[ch] = simulate_channel(config, c, sigma2,
                                           task_seed(config.seed, snr_idx, ch));
      } catch (const std::exception& e) {
#pragma omp critical
        if (failure.empty()) failure = e.what();
      }
    }
  } else {
    for (int ch = 0; ch < nch; ++ch) {
      try {
        per_channel[ch] =
            simulate_channel(config, c, sigma2, task_seed(config.seed, snr_idx, ch));
      } catch (const std::exception& e) {
        if (failure.empty()) failure = e.what();
        break;
      }
    }
  }
  if (!failure.empty())
    throw std::runtime_error("run_point at " + std::to_string(snr_db) + " dB: " + failure);

  std::vector<SerRecord> records(nd);
  for (int k = 0; k < nd; ++k) {
    SerRecord& rec = records[k];
    rec.snr_db = snr_db;
    rec.detector = config.detectors[k];
    for (int ch = 0; ch < nch; ++ch) {
      rec.symbol_errors += per_channel[ch].symbol_errors[k];
      rec.vector_errors += per_channel[ch].vector_errors[k];
    }
    rec.symbols_total = static_cast<std::uint64_t>(nch) * config.frame_len * config.d;
    rec.frames_total = static_cast<std::uint64_t>(nch);
    rec.ser = static_cast<double>(rec.symbol_errors) / static_cast<double>(rec.symbols_total);
  }
  return records;
}

std::vector<SerRecord> run_sweep(const SimConfig& config, std::vector<PointTiming>* timings) {
  config.validate();
  std::vector<SerRecord> all;
  all.reserve(config.snr_grid_db.size() * config.detectors.size());
  for (std::size_t s = 0; s < config.snr_grid_db.size(); ++s) {
    const double snr = config.snr_grid_db[s];
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<SerRecord> recs = run_point(config, snr, static_cast<int>(s));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (timings) timings->push_back({snr, secs});
    log_info("point %.4g dB done in %.2f s", snr, secs);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  return all;
}

}  // namespace tomo
