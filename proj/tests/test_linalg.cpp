#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tomo/errors.hpp"
#include "tomo/linalg.hpp"
#include "tomo/rng.hpp"

using namespace tomo;

namespace {

Mat random_mat(Rng& rng, int p, int n) {
  Mat a(p, n);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = rng.next_gaussian();
  return a;
}

Vec random_vec(Rng& rng, int n) {
  Vec v(n);
  for (double& e : v) e = rng.next_gaussian();
  return v;
}

}  // namespace

TEST_CASE("orthonormal_range produces an orthonormal spanning basis") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 8;
    const int n = 5;
    const Mat a = random_mat(rng, p, n);
    const Mat q = orthonormal_range(a, 1e-10);
    REQUIRE(q.cols() == n);  // Gaussian matrices are full rank a.s.

    for (int c1 = 0; c1 < q.cols(); ++c1) {
      for (int c2 = 0; c2 < q.cols(); ++c2) {
        const double g = dot(column(q, c1), column(q, c2));
        CHECK(std::abs(g - (c1 == c2 ? 1.0 : 0.0)) < 1e-12);
      }
    }
    // every column of a stays invariant under Q Q'
    for (int c = 0; c < n; ++c) {
      const Vec ac = column(a, c);
      const Vec t = matvec_t(q, ac);
      Vec back(p, 0.0);
      for (int k = 0; k < q.cols(); ++k) axpy_col(q, k, t[k], back);
      for (int r = 0; r < p; ++r) CHECK(back[r] == doctest::Approx(ac[r]).epsilon(1e-10));
    }
  }
}

TEST_CASE("orthonormal_range drops dependent columns") {
  Rng rng(2);
  Mat a = random_mat(rng, 6, 2);
  Mat dup(6, 4);
  for (int r = 0; r < 6; ++r) {
    dup(r, 0) = a(r, 0);
    dup(r, 1) = a(r, 1);
    dup(r, 2) = a(r, 0);                      // exact duplicate
    dup(r, 3) = 0.5 * a(r, 0) - 2.0 * a(r, 1);  // linear combination
  }
  const Mat q = orthonormal_range(dup, 1e-10);
  CHECK(q.cols() == 2);

  CHECK(orthonormal_range(Mat(5, 0), 1e-10).cols() == 0);
  CHECK(orthonormal_range(Mat(5, 3), 1e-10).cols() == 0);  // all zeros
}

TEST_CASE("solve_least_squares matches the normal equations") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat a = random_mat(rng, 7, 4);
    const Vec b = random_vec(rng, 7);
    const Vec x = solve_least_squares(a, b);

    // independent route: solve A'A x = A'b by Cholesky
    Mat g = gram(a);
    REQUIRE(cholesky_factor(g));
    const Vec x2 = cholesky_solve(g, matvec_t(a, b));
    for (int i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(x2[i]).epsilon(1e-9));
  }
}

TEST_CASE("solve_least_squares rejects rank-deficient systems") {
  Rng rng(4);
  Mat a = random_mat(rng, 6, 3);
  for (int r = 0; r < 6; ++r) a(r, 2) = a(r, 0);  // duplicate column
  CHECK_THROWS_AS(solve_least_squares(a, random_vec(rng, 6)), DecodeError);
}

TEST_CASE("cholesky solve and inverse") {
  Rng rng(5);
  const Mat a = random_mat(rng, 6, 4);
  Mat g = gram(a);
  for (int i = 0; i < 4; ++i) g(i, i) += 0.5;

  const Mat inv = spd_inverse(g);
  for (int r = 0; r < 4; ++r) {
    const Vec prod = matvec(g, inv.row(r));  // symmetric, row = column
    for (int c = 0; c < 4; ++c)
      CHECK(prod[c] == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(1e-9));
  }
}

TEST_CASE("matvec helpers") {
  const Mat a = make_mat({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  const Vec v{1.0, -1.0};
  const Vec av = matvec(a, v);
  CHECK(av == Vec{-1.0, -1.0, -1.0});
  const Vec w{1.0, 0.0, -1.0};
  const Vec atw = matvec_t(a, w);
  CHECK(atw == Vec{-4.0, -4.0});

  const Mat d = drop_columns(a, 0, -1);
  CHECK(d.cols() == 1);
  CHECK(d(2, 0) == 6.0);
}
