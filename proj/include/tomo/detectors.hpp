#pragma once

#include <optional>
#include <span>

#include "tomo/model.hpp"

namespace tomo {

struct DetectorOutput {
  SymbolVector hard;
  double residual2 = 0.0;    // ||H s_hat - x||^2 of the hard decision
  std::optional<Vec> soft;   // unconstrained per-symbol estimates, linear detectors only
};

// ||H s - x||^2 for amplitude vector s.
double residual2(const Mat& h, const Vec& x, std::span<const double> s_values);

// True when the exhaustive search over M^d candidates is within the
// complexity guard (M^d <= 2^20).
bool ml_feasible(int m, int d);

// Exhaustive minimization of ||H s - x||^2 over the constellation product
// set. Ties break to the lexicographically smallest index vector. Throws
// CapabilityError when the guard is exceeded.
DetectorOutput ml_detect(const Problem& pb);

// Unconstrained least squares followed by per-coordinate slicing. Throws
// DecodeError on a rank-deficient channel.
DetectorOutput zf_detect(const Problem& pb);

// Regularized linear estimate (H'H + (sigma2/Es) I)^{-1} H'x, then
// per-coordinate slicing. The regularizer is scaled by the constellation
// energy so it stays the standard MMSE filter for non-unit-energy sets.
DetectorOutput mmse_detect(const Problem& pb);

// MMSE V-BLAST: per stage, pick the undetected stream with the best
// post-filter SINR (smallest MMSE error variance), slice it, cancel its
// contribution, deflate the channel.
DetectorOutput mmse_sic_detect(const Problem& pb);

}  // namespace tomo
