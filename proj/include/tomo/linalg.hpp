#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tomo {

// Dense row-major matrix of doubles. Systems in this library are small
// (tens of rows and columns), so storage is a flat vector and all kernels
// are plain loops.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

  std::span<double> row(int r) {
    return {a_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<const double> row(int r) const {
    return {a_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
  }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

using Vec = std::vector<double>;

Mat make_mat(std::initializer_list<std::initializer_list<double>> rows);

double dot(std::span<const double> u, std::span<const double> v);
double sq_norm(std::span<const double> v);
double norm(std::span<const double> v);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// y += alpha * A(:,c)
void axpy_col(const Mat& a, int c, double alpha, std::span<double> y);

Vec matvec(const Mat& a, std::span<const double> v);    // A v
Vec matvec_t(const Mat& a, std::span<const double> v);  // A' v
Mat gram(const Mat& a);                                 // A' A
Vec column(const Mat& a, int j);

// Copy of a with the listed columns removed. Pass -1 to skip a slot.
Mat drop_columns(const Mat& a, int c0, int c1);

// Orthonormal basis of the column space via column-pivoted Householder QR.
// Pivots whose remaining norm falls below rel_tol times the largest pivot
// are treated as linearly dependent and dropped, so the returned basis
// always has orthonormal columns spanning the numerical range.
Mat orthonormal_range(const Mat& a, double rel_tol);

// min_y ||A y - b|| by Householder QR. Throws DecodeError when A is
// numerically rank deficient (|R_kk| below rel_tol times the largest
// diagonal entry).
Vec solve_least_squares(const Mat& a, const Vec& b, double rel_tol = 1e-12);

// In-place lower Cholesky factor of a symmetric positive definite matrix.
// Returns false if a pivot is not positive.
bool cholesky_factor(Mat& a);
Vec cholesky_solve(const Mat& chol, const Vec& b);
// Inverse of an SPD matrix via Cholesky. Throws DecodeError if not SPD.
Mat spd_inverse(const Mat& a);

}  // namespace tomo
