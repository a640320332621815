#include "tomo/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tomo/detectors.hpp"
#include "tomo/model.hpp"
#include "tomo/projections.hpp"
#include "tomo/sim.hpp"
#include "tomo/tlsd.hpp"

namespace tomo {

namespace {

struct Ctx {
  Rng rng;
  SelftestFault fault;
  int channels;
  int probes;
};

// Complement basis as the selftest sees it. The fault hook drops the last
// column, which leaves a valid projector onto too small a complement: the
// annihilation check must catch it while idempotence and symmetry stay
// green.
Mat basis_for(const Mat& h, int i, int j, SelftestFault fault) {
  Mat q = orthonormal_range(drop_columns(h, i, j), kRankRelTol);
  if (fault == SelftestFault::kSkipQrColumn && q.cols() > 0) {
    Mat trimmed(q.rows(), q.cols() - 1);
    for (int r = 0; r < q.rows(); ++r)
      for (int c = 0; c + 1 < q.cols(); ++c) trimmed(r, c) = q(r, c);
    q = std::move(trimmed);
  }
  return q;
}

Vec apply_projector(const Mat& q, const Vec& v) {
  Vec out = v;
  if (q.cols() == 0) return out;
  const Vec t = matvec_t(q, v);
  for (int c = 0; c < q.cols(); ++c) axpy_col(q, c, -t[c], out);
  return out;
}

Vec random_vec(Rng& rng, int n) {
  Vec v(n);
  for (double& e : v) e = rng.next_gaussian();
  return v;
}

using Check = SelftestReport::Item;

Check check_projection_algebra(Ctx& ctx, const char* which) {
  Check item;
  item.name = which;
  const bool idem = std::string_view(which) == "projection-idempotence";
  const bool symm = std::string_view(which) == "projection-symmetry";
  double worst = 0.0;
  for (int t = 0; t < ctx.channels; ++t) {
    const int d = 4 + (t % 3) * 2;  // 4, 6, 8
    const int p = d + (t % 2) * 2;
    const Mat h = sample_channel(ctx.rng, p, d);
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const Mat q = basis_for(h, i, j, ctx.fault);
        if (idem) {
          const Vec v = random_vec(ctx.rng, p);
          const Vec pv = apply_projector(q, v);
          const Vec ppv = apply_projector(q, pv);
          double diff = 0.0;
          for (int r = 0; r < p; ++r) diff = std::max(diff, std::abs(ppv[r] - pv[r]));
          worst = std::max(worst, diff / std::max(norm(pv), 1e-300));
        } else if (symm) {
          const Vec u = random_vec(ctx.rng, p);
          const Vec v = random_vec(ctx.rng, p);
          const double lhs = dot(apply_projector(q, u), v);
          const double rhs = dot(u, apply_projector(q, v));
          worst = std::max(worst, std::abs(lhs - rhs) / std::max(norm(u) * norm(v), 1e-300));
        } else {
          for (int k = 0; k < d; ++k) {
            if (k == i || k == j) continue;
            const Vec hk = column(h, k);
            worst = std::max(worst, norm(apply_projector(q, hk)) / norm(hk));
          }
        }
      }
    }
  }
  const double tol = idem || symm ? 1e-10 : 1e-9;
  item.passed = worst <= tol;
  std::ostringstream os;
  os << "worst " << worst << " tol " << tol;
  item.detail = os.str();
  return item;
}

Check check_noiseless_pair_recovery(Ctx& ctx) {
  Check item;
  item.name = "noiseless-pair-recovery";
  item.passed = true;
  const Constellation c = make_constellation(2);
  for (int t = 0; t < ctx.probes; ++t) {
    const int d = 6;
    const int p = 8;
    const Mat h = sample_channel(ctx.rng, p, d);
    std::vector<int> idx(d);
    for (int& v : idx) v = ctx.rng.next_index(c.size());
    const SymbolVector s = make_symbol_vector(idx, c);
    const Vec x = matvec(h, s.values);
    // non-overlapping pairs solve the whole vector exactly from noiseless data
    for (int i = 0; i + 1 < d; i += 2) {
      const PairProjection pp = compute_pair_projection(h, x, i, i + 1);
      Mat a(p, 2);
      for (int r = 0; r < p; ++r) {
        a(r, 0) = pp.h_i[r];
        a(r, 1) = pp.h_j[r];
      }
      const Vec sol = solve_least_squares(a, pp.x);
      if (c.slice_index(sol[0]) != idx[i] || c.slice_index(sol[1]) != idx[i + 1]) {
        item.passed = false;
        item.detail = "pair (" + std::to_string(i) + "," + std::to_string(i + 1) +
                      ") missed the transmitted symbols";
        return item;
      }
    }
  }
  item.detail = "all solved pairs recovered the transmitted symbols";
  return item;
}

Check check_belief_normalization(Ctx& ctx) {
  Check item;
  item.name = "belief-normalization";
  const Constellation c = make_constellation(4);
  double worst = 0.0;
  for (int t = 0; t < ctx.probes; ++t) {
    const int d = 4;
    const int p = 4;
    const Mat h = sample_channel(ctx.rng, p, d);
    std::vector<int> idx(d);
    for (int& v : idx) v = ctx.rng.next_index(c.size());
    const SymbolVector s = make_symbol_vector(idx, c);
    Vec x = matvec(h, s.values);
    for (double& e : x) e += ctx.rng.next_gaussian();
    const Problem pb(h, x, 1.0, c);
    const auto pairs = all_pair_projections(h, x);
    const auto singles = all_single_projections(h, x);
    BeliefState beliefs = init_beliefs(pb, singles);
    const auto tables = metric_tables(pairs, pb.sigma2, c);
    for (const MetricTable& tab : tables) {
      pair_update(beliefs, tab);
      for (int i = 0; i < d; ++i) {
        double sum = 0.0;
        double lo = 0.0;
        for (double v : beliefs.theta(i)) {
          sum += v;
          lo = std::min(lo, v);
        }
        worst = std::max(worst, std::abs(sum - 1.0));
        if (lo < 0.0) worst = 1.0;
      }
    }
  }
  item.passed = worst <= 1e-12;
  item.detail = "worst |sum-1| " + std::to_string(worst);
  return item;
}

Check check_one_hot_fixed_point(Ctx& ctx) {
  Check item;
  item.name = "one-hot-fixed-point";
  item.passed = true;
  const Constellation c = make_constellation(4);
  for (int t = 0; t < ctx.probes; ++t) {
    const int d = 4;
    const Mat h = sample_channel(ctx.rng, 4, d);
    const Vec x = random_vec(ctx.rng, 4);
    const auto tables = metric_tables(all_pair_projections(h, x), 2.0, c);
    BeliefState beliefs(d, c.size());
    for (int i = 0; i < d; ++i) {
      auto th = beliefs.theta(i);
      std::fill(th.begin(), th.end(), 0.0);
      th[ctx.rng.next_index(c.size())] = 1.0;
    }
    const std::vector<double> before = beliefs.storage();
    for (const MetricTable& tab : tables) pair_update(beliefs, tab);
    if (beliefs.storage() != before) {
      item.passed = false;
      item.detail = "one-hot beliefs moved under a pair update";
      return item;
    }
  }
  item.detail = "one-hot states exactly preserved";
  return item;
}

Check check_d2_exactness(Ctx& ctx) {
  Check item;
  item.name = "pair-update-d2-exactness";
  const Constellation c = make_constellation(4);
  double worst = 0.0;
  for (int t = 0; t < ctx.probes; ++t) {
    const Mat h = sample_channel(ctx.rng, 2, 2);
    const Vec x = random_vec(ctx.rng, 2);
    const double sigma2 = 0.8;
    const auto pairs = all_pair_projections(h, x);
    const auto tables = metric_tables(pairs, sigma2, c);
    BeliefState beliefs(2, c.size());
    pair_update(beliefs, tables[0]);

    // exhaustive joint posterior on the original system (the pair
    // projector is the identity when d = 2)
    const int m = c.size();
    std::vector<double> joint(static_cast<std::size_t>(m) * m);
    double zsum = 0.0;
    for (int k = 0; k < m; ++k) {
      for (int l = 0; l < m; ++l) {
        const Vec cand{c.symbols[k], c.symbols[l]};
        joint[static_cast<std::size_t>(k) * m + l] =
            std::exp(-residual2(h, x, cand) / (2.0 * sigma2));
        zsum += joint[static_cast<std::size_t>(k) * m + l];
      }
    }
    for (int k = 0; k < m; ++k) {
      double m0 = 0.0;
      for (int l = 0; l < m; ++l) m0 += joint[static_cast<std::size_t>(k) * m + l];
      worst = std::max(worst, std::abs(m0 / zsum - beliefs.theta(0)[k]));
    }
    for (int l = 0; l < m; ++l) {
      double m1 = 0.0;
      for (int k = 0; k < m; ++k) m1 += joint[static_cast<std::size_t>(k) * m + l];
      worst = std::max(worst, std::abs(m1 / zsum - beliefs.theta(1)[l]));
    }
  }
  item.passed = worst <= 1e-10;
  item.detail = "worst marginal gap " + std::to_string(worst);
  return item;
}

Check check_metric_scale_invariance(Ctx& ctx) {
  Check item;
  item.name = "metric-scale-invariance";
  const Constellation c = make_constellation(2);
  double worst = 0.0;
  for (int t = 0; t < ctx.probes; ++t) {
    const int d = 4;
    const Mat h = sample_channel(ctx.rng, 4, d);
    const Vec x = random_vec(ctx.rng, 4);
    auto tables = metric_tables(all_pair_projections(h, x), 1.5, c);
    BeliefState a(d, c.size());
    BeliefState b(d, c.size());
    for (const MetricTable& tab : tables) pair_update(a, tab);
    for (MetricTable& tab : tables)
      for (double& e : tab.entries) e *= 0.37;
    for (const MetricTable& tab : tables) pair_update(b, tab);
    for (std::size_t k = 0; k < a.storage().size(); ++k)
      worst = std::max(worst, std::abs(a.storage()[k] - b.storage()[k]));
  }
  item.passed = worst <= 1e-14;
  item.detail = "worst belief gap " + std::to_string(worst);
  return item;
}

Check check_noiseless_recovery(Ctx& ctx) {
  Check item;
  item.name = "noiseless-recovery";
  item.passed = true;
  const Constellation c = make_constellation(2);
  for (int t = 0; t < std::max(ctx.probes / 4, 4); ++t) {
    const int d = 4;
    const int p = 4;
    const Mat h = sample_channel(ctx.rng, p, d);
    std::vector<int> idx(d);
    for (int& v : idx) v = ctx.rng.next_index(c.size());
    const SymbolVector s = make_symbol_vector(idx, c);
    const Vec x = matvec(h, s.values);
    const Problem pb(h, x, 1e-8, c);
    const bool ok = ml_detect(pb).hard.indices == idx && zf_detect(pb).hard.indices == idx &&
                    mmse_detect(pb).hard.indices == idx &&
                    mmse_sic_detect(pb).hard.indices == idx &&
                    tlsd_detect(pb).hard.indices == idx;
    if (!ok) {
      item.passed = false;
      item.detail = "a detector missed a noiseless instance";
      return item;
    }
  }
  item.detail = "all detectors exact on noiseless instances";
  return item;
}

}  // namespace

SelftestReport run_selftest(bool quick, SelftestFault fault, std::uint64_t seed) {
  Ctx ctx{Rng(seed), fault, quick ? 8 : 40, quick ? 40 : 200};
  SelftestReport report;
  report.items.push_back(check_projection_algebra(ctx, "projection-idempotence"));
  report.items.push_back(check_projection_algebra(ctx, "projection-symmetry"));
  report.items.push_back(check_projection_algebra(ctx, "projection-annihilation"));
  report.items.push_back(check_noiseless_pair_recovery(ctx));
  report.items.push_back(check_belief_normalization(ctx));
  report.items.push_back(check_one_hot_fixed_point(ctx));
  report.items.push_back(check_d2_exactness(ctx));
  report.items.push_back(check_metric_scale_invariance(ctx));
  report.items.push_back(check_noiseless_recovery(ctx));
  return report;
}

}  // namespace tomo
