#include "tomo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tomo/errors.hpp"

namespace tomo {

Mat make_mat(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  Mat m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c) throw std::invalid_argument("make_mat: ragged rows");
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double sq_norm(std::span<const double> v) { return dot(v, v); }

double norm(std::span<const double> v) { return std::sqrt(sq_norm(v)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void axpy_col(const Mat& a, int c, double alpha, std::span<double> y) {
  for (int r = 0; r < a.rows(); ++r) y[r] += alpha * a(r, c);
}

Vec matvec(const Mat& a, std::span<const double> v) {
  Vec y(a.rows(), 0.0);
  for (int r = 0; r < a.rows(); ++r) y[r] = dot(a.row(r), v);
  return y;
}

Vec matvec_t(const Mat& a, std::span<const double> v) {
  Vec y(a.cols(), 0.0);
  for (int r = 0; r < a.rows(); ++r) axpy(v[r], a.row(r), y);
  return y;
}

Mat gram(const Mat& a) {
  const int n = a.cols();
  Mat g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int r = 0; r < a.rows(); ++r) s += a(r, i) * a(r, j);
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

Vec column(const Mat& a, int j) {
  Vec c(a.rows());
  for (int r = 0; r < a.rows(); ++r) c[r] = a(r, j);
  return c;
}

Mat drop_columns(const Mat& a, int c0, int c1) {
  int kept = 0;
  for (int c = 0; c < a.cols(); ++c)
    if (c != c0 && c != c1) ++kept;
  Mat out(a.rows(), kept);
  int oc = 0;
  for (int c = 0; c < a.cols(); ++c) {
    if (c == c0 || c == c1) continue;
    for (int r = 0; r < a.rows(); ++r) out(r, oc) = a(r, c);
    ++oc;
  }
  return out;
}

namespace {

struct Reflector {
  int offset = 0;        // acts on rows [offset, p)
  std::vector<double> v; // Householder vector
  double beta = 0.0;     // H = I - beta v v'
};

void apply_reflector(const Reflector& h, std::span<double> y) {
  double proj = 0.0;
  for (std::size_t i = 0; i < h.v.size(); ++i) proj += h.v[i] * y[h.offset + i];
  proj *= h.beta;
  for (std::size_t i = 0; i < h.v.size(); ++i) y[h.offset + i] -= proj * h.v[i];
}

double tail_sq_norm(const Mat& w, int col, int from) {
  double s = 0.0;
  for (int r = from; r < w.rows(); ++r) s += w(r, col) * w(r, col);
  return s;
}

// Reduce column k of w (rows k..p-1) and apply the reflector to the
// remaining columns. Returns the reflector; w(k,k) becomes the R diagonal.
Reflector reduce_column(Mat& w, int k) {
  const int p = w.rows();
  Reflector h;
  h.offset = k;
  h.v.resize(p - k);
  for (int r = k; r < p; ++r) h.v[r - k] = w(r, k);
  const double nx = norm(h.v);
  if (nx == 0.0) {
    h.beta = 0.0;
    return h;
  }
  const double s = h.v[0] >= 0.0 ? 1.0 : -1.0;
  h.v[0] += s * nx;
  h.beta = 2.0 / sq_norm(h.v);
  for (int c = k; c < w.cols(); ++c) {
    double proj = 0.0;
    for (int r = k; r < p; ++r) proj += h.v[r - k] * w(r, c);
    proj *= h.beta;
    for (int r = k; r < p; ++r) w(r, c) -= proj * h.v[r - k];
  }
  w(k, k) = -s * nx;  // enforce the exact diagonal, the loop above leaves roundoff
  for (int r = k + 1; r < p; ++r) w(r, k) = 0.0;
  return h;
}

}  // namespace

Mat orthonormal_range(const Mat& a, double rel_tol) {
  const int p = a.rows();
  const int n = a.cols();
  if (n == 0 || p == 0) return Mat(p, 0);

  Mat w = a;
  std::vector<Reflector> hs;
  double pivot0 = -1.0;
  const int kmax = std::min(p, n);
  for (int k = 0; k < kmax; ++k) {
    int best = k;
    double best_sq = -1.0;
    for (int c = k; c < n; ++c) {
      const double s = tail_sq_norm(w, c, k);
      if (s > best_sq) {
        best_sq = s;
        best = c;
      }
    }
    const double best_norm = std::sqrt(std::max(best_sq, 0.0));
    if (pivot0 < 0.0) pivot0 = best_norm;
    if (best_norm == 0.0 || best_norm <= rel_tol * pivot0) break;
    if (best != k)
      for (int r = 0; r < p; ++r) std::swap(w(r, k), w(r, best));
    hs.push_back(reduce_column(w, k));
  }

  const int rank = static_cast<int>(hs.size());
  Mat q(p, rank);
  Vec e(p);
  for (int c = 0; c < rank; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    for (int t = rank - 1; t >= 0; --t) apply_reflector(hs[t], e);
    for (int r = 0; r < p; ++r) q(r, c) = e[r];
  }
  return q;
}

Vec solve_least_squares(const Mat& a, const Vec& b, double rel_tol) {
  const int p = a.rows();
  const int n = a.cols();
  if (p < n) throw std::invalid_argument("solve_least_squares: underdetermined system");
  if (static_cast<int>(b.size()) != p)
    throw std::invalid_argument("solve_least_squares: size mismatch");

  Mat w = a;
  Vec y = b;
  for (int k = 0; k < n; ++k) {
    const Reflector h = reduce_column(w, k);
    apply_reflector(h, y);
  }
  double dmax = 0.0;
  for (int k = 0; k < n; ++k) dmax = std::max(dmax, std::abs(w(k, k)));
  for (int k = 0; k < n; ++k)
    if (std::abs(w(k, k)) <= rel_tol * dmax)
      throw DecodeError("least squares: matrix is numerically rank deficient");

  Vec x(n, 0.0);
  for (int k = n - 1; k >= 0; --k) {
    double s = y[k];
    for (int c = k + 1; c < n; ++c) s -= w(k, c) * x[c];
    x[k] = s / w(k, k);
  }
  return x;
}

bool cholesky_factor(Mat& a) {
  const int n = a.rows();
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (d <= 0.0) return false;
    const double l = std::sqrt(d);
    a(j, j) = l;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / l;
    }
    for (int c = j + 1; c < n; ++c) a(j, c) = 0.0;
  }
  return true;
}

Vec cholesky_solve(const Mat& chol, const Vec& b) {
  const int n = chol.rows();
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= chol(i, k) * y[k];
    y[i] = s / chol(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= chol(k, i) * y[k];
    y[i] = s / chol(i, i);
  }
  return y;
}

Mat spd_inverse(const Mat& a) {
  Mat l = a;
  if (!cholesky_factor(l)) throw DecodeError("spd_inverse: matrix is not positive definite");
  const int n = a.rows();
  Mat inv(n, n);
  Vec e(n, 0.0);
  for (int c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    Vec x = cholesky_solve(l, e);
    for (int r = 0; r < n; ++r) inv(r, c) = x[r];
  }
  return inv;
}

}  // namespace tomo
