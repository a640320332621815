#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "tomo/model.hpp"
#include "tomo/tlsd.hpp"

namespace tomo {

enum class Detector { kZf, kMmse, kMmseSic, kTlsd, kMl };

std::string_view detector_name(Detector det);
std::optional<Detector> parse_detector(std::string_view name);
std::vector<Detector> default_detectors();  // zf, mmse, mmse-sic, tlsd, ml

// Monte Carlo protocol: block fading with n_channels channel draws per SNR
// point, each held for frame_len uses; symbols drawn uniformly per use.
struct SimConfig {
  int d = 8;
  int p = 8;
  int constellation_m = 2;
  std::vector<double> snr_grid_db;
  int n_channels = 500;
  int frame_len = 100;
  std::vector<Detector> detectors = default_detectors();
  std::uint64_t seed = 1;
  TlsdConfig tlsd;
  int workers = 1;  // <= 1 runs the serial reference path

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct SerRecord {
  double snr_db = 0.0;
  Detector detector = Detector::kZf;
  std::uint64_t symbol_errors = 0;
  std::uint64_t symbols_total = 0;
  double ser = 0.0;
  std::uint64_t vector_errors = 0;  // uses with at least one wrong symbol
  std::uint64_t frames_total = 0;   // channel realizations
};

// One SNR point: n_channels independent tasks, each seeded from
// (seed, snr_idx, channel index) so results are identical for any worker
// count. Returns one record per configured detector, in config order.
std::vector<SerRecord> run_point(const SimConfig& config, double snr_db, int snr_idx = 0);

struct PointTiming {
  double snr_db = 0.0;
  double seconds = 0.0;
};

// All SNR points of the grid, concatenated. Optionally reports wall-clock
// per point.
std::vector<SerRecord> run_sweep(const SimConfig& config,
                                 std::vector<PointTiming>* timings = nullptr);

}  // namespace tomo
