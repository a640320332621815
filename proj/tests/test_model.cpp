#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "tomo/model.hpp"

using namespace tomo;

TEST_CASE("make_constellation produces odd-integer PAM with Gray labels") {
  const Constellation bpsk = make_constellation(2);
  CHECK(bpsk.symbols == std::vector<double>{-1.0, 1.0});
  CHECK(bpsk.bits_per_symbol == 1);
  CHECK(bpsk.labels[0] == 0);
  CHECK(bpsk.labels[1] == 1);

  const Constellation pam4 = make_constellation(4);
  CHECK(pam4.symbols == std::vector<double>{-3.0, -1.0, 1.0, 3.0});
  CHECK(pam4.bits_per_symbol == 2);

  CHECK_THROWS_AS(make_constellation(3), std::invalid_argument);
  CHECK_THROWS_AS(make_constellation(0), std::invalid_argument);
  CHECK_THROWS_AS(make_constellation(1), std::invalid_argument);
}

TEST_CASE("Gray labels of adjacent symbols differ in one bit") {
  for (int m : {2, 4, 8, 16}) {
    const Constellation c = make_constellation(m);
    for (int k = 0; k + 1 < m; ++k) {
      const std::uint32_t diff = c.labels[k] ^ c.labels[k + 1];
      CHECK((diff & (diff - 1)) == 0);
      CHECK(diff != 0);
    }
    // labeling is a bijection onto {0,1}^bits
    std::vector<bool> seen(m, false);
    for (int k = 0; k < m; ++k) {
      REQUIRE(c.labels[k] < static_cast<std::uint32_t>(m));
      CHECK(!seen[c.labels[k]]);
      seen[c.labels[k]] = true;
    }
  }
}

TEST_CASE("constellation symmetry and energy") {
  for (int m : {2, 4, 8, 16}) {
    const Constellation c = make_constellation(m);
    double sum = 0.0;
    for (double a : c.symbols) sum += a;
    CHECK(sum == 0.0);
    CHECK(c.energy() == doctest::Approx((m * m - 1) / 3.0).epsilon(1e-14));
    for (int k = 0; k + 1 < m; ++k) CHECK(c.symbols[k] < c.symbols[k + 1]);
  }
}

TEST_CASE("slicing resolves midpoints to the smaller symbol") {
  const Constellation pam4 = make_constellation(4);
  CHECK(pam4.slice_index(0.9) == 2);
  CHECK(pam4.slice_index(-1.2) == 1);
  CHECK(pam4.slice_index(100.0) == 3);
  CHECK(pam4.slice_index(0.0) == 1);   // exact midpoint between -1 and +1
  CHECK(pam4.slice_index(2.0) == 2);   // midpoint between +1 and +3
  CHECK(pam4.slice_index(-2.0) == 0);
}

TEST_CASE("complex_to_real identity and rotation examples") {
  CMat hc(1, 1);
  hc(0, 0) = {1.0, 0.0};
  const CVec xc{{2.0, 3.0}};
  const auto [h, x] = complex_to_real(hc, xc);
  CHECK(h.rows() == 2);
  CHECK(h.cols() == 2);
  CHECK(h(0, 0) == 1.0);
  CHECK(h(0, 1) == 0.0);
  CHECK(h(1, 0) == 0.0);
  CHECK(h(1, 1) == 1.0);
  CHECK(x == Vec{2.0, 3.0});

  CMat rot(1, 1);
  rot(0, 0) = {0.0, 1.0};
  const auto [hr, xr] = complex_to_real(rot, CVec{{0.0, 0.0}});
  CHECK(hr(0, 0) == 0.0);
  CHECK(hr(0, 1) == -1.0);
  CHECK(hr(1, 0) == 1.0);
  CHECK(hr(1, 1) == 0.0);
}

TEST_CASE("complex_to_real preserves residual norms and commutes with multiplication") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int pc = 2;
    const int dc = 2;
    CMat hc(pc, dc);
    for (auto& v : hc.a) v = {rng.next_gaussian(), rng.next_gaussian()};
    CVec sc(dc), xc(pc);
    for (auto& v : sc) v = {rng.next_gaussian(), rng.next_gaussian()};
    for (auto& v : xc) v = {rng.next_gaussian(), rng.next_gaussian()};

    // complex product, then realify
    CVec hs(pc, {0.0, 0.0});
    for (int r = 0; r < pc; ++r)
      for (int c = 0; c < dc; ++c) hs[r] += hc(r, c) * sc[c];

    const auto [h, x] = complex_to_real(hc, xc);
    const Vec hs_real = matvec(h, realify(sc));
    const Vec hs_direct = realify(hs);
    for (int r = 0; r < 2 * pc; ++r)
      CHECK(hs_real[r] == doctest::Approx(hs_direct[r]).epsilon(1e-12));

    // norms carry over
    double cn = 0.0;
    for (int r = 0; r < pc; ++r) cn += std::norm(hs[r] - xc[r]);
    Vec diff = hs_real;
    for (int r = 0; r < 2 * pc; ++r) diff[r] -= x[r];
    CHECK(sq_norm(diff) == doctest::Approx(cn).epsilon(1e-12));
  }
}

TEST_CASE("sample_channel is deterministic and rejects p < d") {
  Rng a(42);
  Rng b(42);
  const Mat ha = sample_channel(a, 4, 3);
  const Mat hb = sample_channel(b, 4, 3);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c) CHECK(ha(r, c) == hb(r, c));

  Rng c(43);
  CHECK_THROWS_AS(sample_channel(c, 2, 3), std::invalid_argument);
}

TEST_CASE("sample_channel entries have unit-variance Gaussian moments") {
  Rng rng(123);
  const int n = 1000;
  const Mat h = sample_channel(rng, n, 1000);
  double sum = 0.0;
  double sq = 0.0;
  const double count = static_cast<double>(n) * 1000;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < 1000; ++c) {
      sum += h(r, c);
      sq += h(r, c) * h(r, c);
    }
  }
  const double mean = sum / count;
  const double var = sq / count - mean * mean;
  CHECK(std::abs(mean) < 5e-3);
  CHECK(std::abs(var - 1.0) < 1e-2);
}

TEST_CASE("sigma2_from_snr worked examples and monotonicity") {
  const Constellation bpsk = make_constellation(2);
  const Constellation pam4 = make_constellation(4);
  CHECK(sigma2_from_snr(0.0, bpsk, 8) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(sigma2_from_snr(10.0, pam4, 16) == doctest::Approx(8.0).epsilon(1e-14));

  double prev = sigma2_from_snr(-10.0, bpsk, 4);
  for (double snr = -8.0; snr <= 30.0; snr += 2.0) {
    const double cur = sigma2_from_snr(snr, bpsk, 4);
    CHECK(cur < prev);
    prev = cur;
  }
  // linear in d * Es
  CHECK(sigma2_from_snr(6.0, bpsk, 8) == doctest::Approx(2.0 * sigma2_from_snr(6.0, bpsk, 4)));
}

TEST_CASE("problem validation") {
  const Constellation c = make_constellation(2);
  Mat h(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  CHECK_NOTHROW(Problem(h, Vec{0.0, 0.0}, 1.0, c));
  CHECK_THROWS_AS(Problem(h, Vec{0.0, 0.0}, 0.0, c), std::invalid_argument);
  CHECK_THROWS_AS(Problem(h, Vec{0.0}, 1.0, c), std::invalid_argument);
  CHECK_THROWS_AS(Problem(Mat(1, 2), Vec{0.0}, 1.0, c), std::invalid_argument);
  CHECK_THROWS_AS(Problem(Mat(3, 1), Vec{0.0, 0.0, 0.0}, 1.0, c), std::invalid_argument);
}

TEST_CASE("task_seed separates nearby indices") {
  const std::uint64_t base = task_seed(7, 0, 0);
  CHECK(task_seed(7, 0, 1) != base);
  CHECK(task_seed(7, 1, 0) != base);
  CHECK(task_seed(8, 0, 0) != base);
  CHECK(task_seed(7, 0, 0) == base);
}
