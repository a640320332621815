#pragma once

#include <span>
#include <vector>

#include "tomo/linalg.hpp"

namespace tomo {

// Relative threshold under which a direction of the excluded-column space
// counts as numerically dependent and is dropped from the basis. Matches
// double-precision QR accuracy.
inline constexpr double kRankRelTol = 1e-10;

// Action of the pair projector on the data that matters: the two kept
// channel columns and the received vector, all still expressed in the
// ambient p-dimensional space. The projector maps onto the orthogonal
// complement of every other channel column, so the projected system
// depends on symbols i and j only.
struct PairProjection {
  int i = 0;
  int j = 0;
  Vec h_i;  // P_ij applied to column i
  Vec h_j;  // P_ij applied to column j
  Vec x;    // P_ij applied to the received vector
};

// Same idea with a single kept column; used to seed the beliefs.
struct SingleProjection {
  int i = 0;
  Vec h_i;
  Vec x;
};

PairProjection compute_pair_projection(const Mat& h, const Vec& x, int i, int j);
SingleProjection compute_single_projection(const Mat& h, const Vec& x, int i);

// All d(d-1)/2 pair projections in lexicographic (i, j) order.
std::vector<PairProjection> all_pair_projections(const Mat& h, const Vec& x);
std::vector<SingleProjection> all_single_projections(const Mat& h, const Vec& x);

// Per-channel cache. The complement bases (one QR per pair and per single)
// are factored once from H; the projected channel columns are fixed for
// the whole frame and only the x-dependent parts are recomputed per
// received vector, at O(p (d-2)) per pair.
class ProjectionCache {
 public:
  explicit ProjectionCache(const Mat& h, double rel_tol = kRankRelTol);

  // Recompute the projected received vector in every pair and single.
  void refresh(const Vec& x);

  const std::vector<PairProjection>& pairs() const { return pairs_; }
  const std::vector<SingleProjection>& singles() const { return singles_; }

  // Apply the cached projectors to an arbitrary vector.
  Vec project_pair(int pair_index, std::span<const double> v) const;
  Vec project_single(int i, std::span<const double> v) const;

  int pair_index(int i, int j) const;  // position in the lexicographic list
  int pair_count() const { return static_cast<int>(pairs_.size()); }
  int dim() const { return d_; }

 private:
  int p_ = 0;
  int d_ = 0;
  std::vector<Mat> pair_basis_;    // orthonormal basis of the excluded columns, per pair
  std::vector<Mat> single_basis_;  // same, per single
  std::vector<PairProjection> pairs_;
  std::vector<SingleProjection> singles_;
};

}  // namespace tomo
