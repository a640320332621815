#include "tomo/projections.hpp"

#include <stdexcept>

namespace tomo {

namespace {

// v - Q (Q' v): projection onto the orthogonal complement of range(Q).
Vec project_out(const Mat& q, std::span<const double> v) {
  Vec out(v.begin(), v.end());
  if (q.cols() == 0) return out;
  const Vec t = matvec_t(q, v);
  for (int c = 0; c < q.cols(); ++c) axpy_col(q, c, -t[c], out);
  return out;
}

void check_pair_indices(const Mat& h, int i, int j) {
  if (i < 0 || j >= h.cols() || i >= j)
    throw std::invalid_argument("pair projection: need 0 <= i < j < d");
}

}  // namespace

PairProjection compute_pair_projection(const Mat& h, const Vec& x, int i, int j) {
  check_pair_indices(h, i, j);
  const Mat basis = orthonormal_range(drop_columns(h, i, j), kRankRelTol);
  PairProjection pp;
  pp.i = i;
  pp.j = j;
  pp.h_i = project_out(basis, column(h, i));
  pp.h_j = project_out(basis, column(h, j));
  pp.x = project_out(basis, x);
  return pp;
}

SingleProjection compute_single_projection(const Mat& h, const Vec& x, int i) {
  if (i < 0 || i >= h.cols())
    throw std::invalid_argument("single projection: column index out of range");
  const Mat basis = orthonormal_range(drop_columns(h, i, -1), kRankRelTol);
  SingleProjection sp;
  sp.i = i;
  sp.h_i = project_out(basis, column(h, i));
  sp.x = project_out(basis, x);
  return sp;
}

std::vector<PairProjection> all_pair_projections(const Mat& h, const Vec& x) {
  ProjectionCache cache(h);
  cache.refresh(x);
  return cache.pairs();
}

std::vector<SingleProjection> all_single_projections(const Mat& h, const Vec& x) {
  ProjectionCache cache(h);
  cache.refresh(x);
  return cache.singles();
}

ProjectionCache::ProjectionCache(const Mat& h, double rel_tol) : p_(h.rows()), d_(h.cols()) {
  if (p_ < d_) throw std::invalid_argument("projection cache: need p >= d");
  pair_basis_.reserve(static_cast<std::size_t>(d_) * (d_ - 1) / 2);
  pairs_.reserve(pair_basis_.capacity());
  for (int i = 0; i < d_; ++i) {
    for (int j = i + 1; j < d_; ++j) {
      Mat basis = orthonormal_range(drop_columns(h, i, j), rel_tol);
      PairProjection pp;
      pp.i = i;
      pp.j = j;
      pp.h_i = project_out(basis, column(h, i));
      pp.h_j = project_out(basis, column(h, j));
      pp.x.assign(p_, 0.0);
      pair_basis_.push_back(std::move(basis));
      pairs_.push_back(std::move(pp));
    }
  }
  single_basis_.reserve(d_);
  singles_.reserve(d_);
  for (int i = 0; i < d_; ++i) {
    Mat basis = orthonormal_range(drop_columns(h, i, -1), rel_tol);
    SingleProjection sp;
    sp.i = i;
    sp.h_i = project_out(basis, column(h, i));
    sp.x.assign(p_, 0.0);
    single_basis_.push_back(std::move(basis));
    singles_.push_back(std::move(sp));
  }
}

void ProjectionCache::refresh(const Vec& x) {
  if (static_cast<int>(x.size()) != p_)
    throw std::invalid_argument("projection cache: x length mismatch");
  for (std::size_t k = 0; k < pairs_.size(); ++k) pairs_[k].x = project_out(pair_basis_[k], x);
  for (int i = 0; i < d_; ++i) singles_[i].x = project_out(single_basis_[i], x);
}

Vec ProjectionCache::project_pair(int pair_index, std::span<const double> v) const {
  return project_out(pair_basis_[pair_index], v);
}

Vec ProjectionCache::project_single(int i, std::span<const double> v) const {
  return project_out(single_basis_[i], v);
}

int ProjectionCache::pair_index(int i, int j) const {
  // pairs (i, i+1..d-1) are stored consecutively
  return i * d_ - i * (i + 1) / 2 + (j - i - 1);
}

}  // namespace tomo
