#pragma once

#include <span>
#include <vector>

#include "tomo/detectors.hpp"
#include "tomo/model.hpp"
#include "tomo/projections.hpp"

namespace tomo {

// One probability vector over the M constellation points per transmit
// stream. Every row stays normalized to unit sum after each update.
class BeliefState {
 public:
  BeliefState(int d, int m)
      : d_(d), m_(m), theta_(static_cast<std::size_t>(d) * m, 1.0 / static_cast<double>(m)) {}

  int dim() const { return d_; }
  int order() const { return m_; }

  std::span<double> theta(int i) {
    return {theta_.data() + static_cast<std::size_t>(i) * m_, static_cast<std::size_t>(m_)};
  }
  std::span<const double> theta(int i) const {
    return {theta_.data() + static_cast<std::size_t>(i) * m_, static_cast<std::size_t>(m_)};
  }

  std::vector<double>& storage() { return theta_; }
  const std::vector<double>& storage() const { return theta_; }

 private:
  int d_ = 0;
  int m_ = 0;
  std::vector<double> theta_;
};

// M x M table of Gaussian scores for the projected pair system, rescaled
// so the largest entry is exactly 1. Entry (k, l) scores symbol a_k on
// stream i together with a_l on stream j.
struct MetricTable {
  int i = 0;
  int j = 0;
  int m = 0;
  std::vector<double> entries;  // row-major, entries[k * m + l]

  double at(int k, int l) const { return entries[static_cast<std::size_t>(k) * m + l]; }
};

struct TlsdConfig {
  int max_sweeps = 10;
  double tol = 1e-6;            // stop when the max per-sweep belief change drops below this
  bool arbitrate_with_sic = true;
};

enum class ArbitrationWinner { kTlsd, kMmseSic };

struct TlsdResult {
  SymbolVector hard;       // arbitration winner's decision
  BeliefState posteriors;  // always the TLSD beliefs
  Mat bit_llrs;            // d x bits_per_symbol, from the TLSD beliefs
  int sweeps_used = 0;
  bool converged = false;
  ArbitrationWinner winner = ArbitrationWinner::kTlsd;
  int underflow_resets = 0;  // belief vectors reset to uniform after an underflow
};

// Soft-ZF initialization: theta_i(k) proportional to
// exp(-||P_i h_i a_k - P_i x||^2 / (2 sigma2)), evaluated in the log
// domain with per-stream max subtraction. A stream whose column lies in
// the span of the others gets a uniform belief.
BeliefState init_beliefs(const Problem& pb, const std::vector<SingleProjection>& singles);

// Score tables for every pair. Entries are built from six cached inner
// products per pair, so each table costs O(M^2) after an O(p) setup.
std::vector<MetricTable> metric_tables(const std::vector<PairProjection>& pairs, double sigma2,
                                       const Constellation& c);

// Reference kernel computing each entry by an explicit p-dimensional
// residual norm. Kept for tests and benchmarks.
std::vector<MetricTable> metric_tables_direct(const std::vector<PairProjection>& pairs,
                                              double sigma2, const Constellation& c);

// One pairwise posterior update: streams i and j are replaced by the two
// marginals of the local pair posterior theta_i(k) theta_j(l) D(k,l), both
// computed from the pre-update beliefs. Vectors whose normalizer
// underflows to zero are reset to uniform. Returns the number of such
// resets (0, 1 or 2).
int pair_update(BeliefState& beliefs, const MetricTable& table);

// Full decoder: initialize from the single projections, sweep all pairs
// in lexicographic order until the beliefs settle or max_sweeps is hit,
// take the per-stream argmax, and (by default) keep whichever of that
// vector and the MMSE-SIC decision has the smaller exact residual.
TlsdResult tlsd_detect(const Problem& pb, const TlsdConfig& config = {});

// Same, reusing a per-channel cache. The cache must be built from pb.H and
// refreshed with pb.x.
TlsdResult tlsd_detect(const Problem& pb, const ProjectionCache& cache, const TlsdConfig& config);

// Per-bit log-likelihood ratios ln P(bit=0) - ln P(bit=1) under the Gray
// labeling, clamped to [-50, 50].
Mat bit_llrs_from_beliefs(const BeliefState& beliefs, const Constellation& c);

// Sum of the projected-pair log densities of a hard vector, dropping the
// constant normalizers: -sum_{i<j} ||x_ij - h_i s_i - h_j s_j||^2 / (2 sigma2).
// Diagnostic only; arbitration uses the exact residual instead.
double pseudo_log_likelihood(const std::vector<PairProjection>& pairs, double sigma2,
                             std::span<const double> s_values);

}  // namespace tomo
