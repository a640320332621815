#include "tomo/detectors.hpp"

#include <algorithm>
#include <cmath>

#include "tomo/errors.hpp"

namespace tomo {

namespace {

constexpr int kMlGuardBits = 20;

SymbolVector slice_vector(const Vec& soft, const Constellation& c) {
  std::vector<int> idx(soft.size());
  for (std::size_t i = 0; i < soft.size(); ++i) idx[i] = c.slice_index(soft[i]);
  return make_symbol_vector(std::move(idx), c);
}

DetectorOutput finish_linear(const Problem& pb, Vec soft) {
  DetectorOutput out;
  out.hard = slice_vector(soft, pb.constellation);
  out.residual2 = residual2(pb.H, pb.x, out.hard.values);
  out.soft = std::move(soft);
  return out;
}

}  // namespace

double residual2(const Mat& h, const Vec& x, std::span<const double> s_values) {
  double s = 0.0;
  for (int r = 0; r < h.rows(); ++r) {
    double y = -x[r];
    for (int c = 0; c < h.cols(); ++c) y += h(r, c) * s_values[c];
    s += y * y;
  }
  return s;
}

bool ml_feasible(int m, int d) {
  int bits_per_symbol = 0;
  while ((1 << bits_per_symbol) < m) ++bits_per_symbol;
  return bits_per_symbol * d <= kMlGuardBits;
}

DetectorOutput ml_detect(const Problem& pb) {
  const Constellation& c = pb.constellation;
  const int d = pb.tx();
  const int m = c.size();
  if (!ml_feasible(m, d))
    throw CapabilityError("ml: search space exceeds 2^20 candidates, disable the ML detector");

  // Walk the M^d candidates in lexicographic index order, keeping the
  // residual vector y = H s - x updated one coordinate change at a time.
  std::vector<int> idx(d, 0);
  Vec y(pb.rx());
  for (int r = 0; r < pb.rx(); ++r) {
    double acc = -pb.x[r];
    for (int k = 0; k < d; ++k) acc += pb.H(r, k) * c.symbols[0];
    y[r] = acc;
  }
  std::vector<int> best = idx;
  double best_r2 = sq_norm(y);

  for (;;) {
    int k = d - 1;
    while (k >= 0 && idx[k] == m - 1) {
      axpy_col(pb.H, k, c.symbols[0] - c.symbols[m - 1], y);
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
    axpy_col(pb.H, k, c.symbols[idx[k] + 1] - c.symbols[idx[k]], y);
    ++idx[k];
    const double r2 = sq_norm(y);
    if (r2 < best_r2) {  // strict: first (lexicographically smallest) wins ties
      best_r2 = r2;
      best = idx;
    }
  }

  DetectorOutput out;
  out.hard = make_symbol_vector(std::move(best), c);
  out.residual2 = residual2(pb.H, pb.x, out.hard.values);
  return out;
}

DetectorOutput zf_detect(const Problem& pb) {
  Vec soft;
  try {
    soft = solve_least_squares(pb.H, pb.x);
  } catch (const DecodeError&) {
    throw DecodeError("zf: channel matrix is rank deficient");
  }
  return finish_linear(pb, std::move(soft));
}

DetectorOutput mmse_detect(const Problem& pb) {
  const double alpha = pb.sigma2 / pb.constellation.energy();
  Mat a = gram(pb.H);
  for (int i = 0; i < a.rows(); ++i) a(i, i) += alpha;
  if (!cholesky_factor(a)) throw DecodeError("mmse: regularized normal matrix not SPD");
  Vec soft = cholesky_solve(a, matvec_t(pb.H, pb.x));
  return finish_linear(pb, std::move(soft));
}

DetectorOutput mmse_sic_detect(const Problem& pb) {
  const Constellation& c = pb.constellation;
  const int d = pb.tx();
  const double alpha = pb.sigma2 / c.energy();

  std::vector<int> active(d);
  for (int i = 0; i < d; ++i) active[i] = i;
  Vec x_cur = pb.x;
  std::vector<int> idx(d, 0);
  Vec soft(d, 0.0);

  while (!active.empty()) {
    const int na = static_cast<int>(active.size());
    Mat g(na, na);
    for (int a = 0; a < na; ++a) {
      for (int b = a; b < na; ++b) {
        double s = 0.0;
        for (int r = 0; r < pb.rx(); ++r) s += pb.H(r, active[a]) * pb.H(r, active[b]);
        g(a, b) = s;
        g(b, a) = s;
      }
      g(a, a) += alpha;
    }
    const Mat inv = spd_inverse(g);

    // Smallest MMSE error variance <=> highest post-filter SINR. Ties go
    // to the earliest (lowest original index) stream.
    int pick = 0;
    for (int a = 1; a < na; ++a)
      if (inv(a, a) < inv(pick, pick)) pick = a;

    Vec z(na, 0.0);
    for (int a = 0; a < na; ++a) {
      double s = 0.0;
      for (int r = 0; r < pb.rx(); ++r) s += pb.H(r, active[a]) * x_cur[r];
      z[a] = s;
    }
    const double est = dot(inv.row(pick), z);
    const int col = active[pick];
    const int sym = c.slice_index(est);
    idx[col] = sym;
    soft[col] = est;
    axpy_col(pb.H, col, -c.symbols[sym], x_cur);
    active.erase(active.begin() + pick);
  }

  DetectorOutput out;
  out.hard = make_symbol_vector(std::move(idx), c);
  out.residual2 = residual2(pb.H, pb.x, out.hard.values);
  out.soft = std::move(soft);
  return out;
}

}  // namespace tomo
