#include "tomo/tlsd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tomo/log.hpp"

namespace tomo {

namespace {

// Rescale a table of exponents to scores in (0, 1] with max exactly 1.
void exponents_to_scores(std::vector<double>& e) {
  const double lo = *std::min_element(e.begin(), e.end());
  for (double& v : e) v = std::exp(-(v - lo));
}

// Both rows are re-marginalized against the other stream's pre-update
// beliefs, i.e. they become the two marginals of the local pair posterior
// theta_i(k) theta_j(l) D(k,l). Needs scratch of size 2m.
void pair_update_impl(BeliefState& beliefs, const MetricTable& t, std::span<double> scratch,
                      int& resets) {
  const int m = t.m;
  auto ti = beliefs.theta(t.i);
  auto tj = beliefs.theta(t.j);
  double* ni = scratch.data();
  double* nj = scratch.data() + m;

  double sum_i = 0.0;
  for (int k = 0; k < m; ++k) {
    double acc = 0.0;
    const double* row = t.entries.data() + static_cast<std::size_t>(k) * m;
    for (int l = 0; l < m; ++l) acc += tj[l] * row[l];
    ni[k] = ti[k] * acc;
    sum_i += ni[k];
  }
  double sum_j = 0.0;
  for (int l = 0; l < m; ++l) {
    double acc = 0.0;
    for (int k = 0; k < m; ++k) acc += ti[k] * t.entries[static_cast<std::size_t>(k) * m + l];
    nj[l] = tj[l] * acc;
    sum_j += nj[l];
  }

  if (sum_i > 0.0 && std::isfinite(sum_i)) {
    for (int k = 0; k < m; ++k) ti[k] = ni[k] / sum_i;
  } else {
    std::fill(ti.begin(), ti.end(), 1.0 / static_cast<double>(m));
    ++resets;
  }
  if (sum_j > 0.0 && std::isfinite(sum_j)) {
    for (int l = 0; l < m; ++l) tj[l] = nj[l] / sum_j;
  } else {
    std::fill(tj.begin(), tj.end(), 1.0 / static_cast<double>(m));
    ++resets;
  }
}

std::vector<int> argmax_indices(const BeliefState& beliefs) {
  std::vector<int> idx(beliefs.dim(), 0);
  for (int i = 0; i < beliefs.dim(); ++i) {
    auto th = beliefs.theta(i);
    int best = 0;
    for (int k = 1; k < beliefs.order(); ++k)
      if (th[k] > th[best]) best = k;  // strict: ties keep the smaller symbol index
    idx[i] = best;
  }
  return idx;
}

}  // namespace

BeliefState init_beliefs(const Problem& pb, const std::vector<SingleProjection>& singles) {
  const Constellation& c = pb.constellation;
  const int d = pb.tx();
  const int m = c.size();
  if (static_cast<int>(singles.size()) != d)
    throw std::invalid_argument("init_beliefs: need one single projection per stream");

  BeliefState beliefs(d, m);
  std::vector<double> e(m);
  const double inv_two_sigma2 = 1.0 / (2.0 * pb.sigma2);
  for (int i = 0; i < d; ++i) {
    const SingleProjection& sp = singles[i];
    const double gg = sq_norm(sp.h_i);
    auto th = beliefs.theta(i);
    if (gg <= 0.0) {  // column lies in the span of the others, nothing to learn
      std::fill(th.begin(), th.end(), 1.0 / static_cast<double>(m));
      continue;
    }
    const double gx = dot(sp.h_i, sp.x);
    const double xx = sq_norm(sp.x);
    for (int k = 0; k < m; ++k) {
      const double a = c.symbols[k];
      e[k] = (a * a * gg - 2.0 * a * gx + xx) * inv_two_sigma2;
    }
    exponents_to_scores(e);
    double sum = 0.0;
    for (int k = 0; k < m; ++k) sum += e[k];
    for (int k = 0; k < m; ++k) th[k] = e[k] / sum;
  }
  return beliefs;
}

std::vector<MetricTable> metric_tables(const std::vector<PairProjection>& pairs, double sigma2,
                                       const Constellation& c) {
  const int m = c.size();
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma2);
  std::vector<MetricTable> tables;
  tables.reserve(pairs.size());
  for (const PairProjection& pp : pairs) {
    // ||x - h_i a - h_j b||^2 expanded into six pair constants
    const double gii = sq_norm(pp.h_i);
    const double gjj = sq_norm(pp.h_j);
    const double gij = dot(pp.h_i, pp.h_j);
    const double bi = dot(pp.h_i, pp.x);
    const double bj = dot(pp.h_j, pp.x);
    const double xx = sq_norm(pp.x);

    MetricTable t;
    t.i = pp.i;
    t.j = pp.j;
    t.m = m;
    t.entries.resize(static_cast<std::size_t>(m) * m);
    for (int k = 0; k < m; ++k) {
      const double a = c.symbols[k];
      const double base = xx + a * a * gii - 2.0 * a * bi;
      for (int l = 0; l < m; ++l) {
        const double b = c.symbols[l];
        t.entries[static_cast<std::size_t>(k) * m + l] =
            (base + b * b * gjj + 2.0 * a * b * gij - 2.0 * b * bj) * inv_two_sigma2;
      }
    }
    exponents_to_scores(t.entries);
    tables.push_back(std::move(t));
  }
  return tables;
}

std::vector<MetricTable> metric_tables_direct(const std::vector<PairProjection>& pairs,
                                              double sigma2, const Constellation& c) {
  const int m = c.size();
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma2);
  std::vector<MetricTable> tables;
  tables.reserve(pairs.size());
  Vec r;
  for (const PairProjection& pp : pairs) {
    MetricTable t;
    t.i = pp.i;
    t.j = pp.j;
    t.m = m;
    t.entries.resize(static_cast<std::size_t>(m) * m);
    for (int k = 0; k < m; ++k) {
      for (int l = 0; l < m; ++l) {
        r = pp.x;
        axpy(-c.symbols[k], pp.h_i, r);
        axpy(-c.symbols[l], pp.h_j, r);
        t.entries[static_cast<std::size_t>(k) * m + l] = sq_norm(r) * inv_two_sigma2;
      }
    }
    exponents_to_scores(t.entries);
    tables.push_back(std::move(t));
  }
  return tables;
}

int pair_update(BeliefState& beliefs, const MetricTable& table) {
  if (table.i < 0 || table.j >= beliefs.dim() || table.i >= table.j ||
      table.m != beliefs.order())
    throw std::invalid_argument("pair_update: table does not match belief state");
  std::vector<double> scratch(2 * static_cast<std::size_t>(table.m));
  int resets = 0;
  pair_update_impl(beliefs, table, scratch, resets);
  return resets;
}

TlsdResult tlsd_detect(const Problem& pb, const TlsdConfig& config) {
  ProjectionCache cache(pb.H);
  cache.refresh(pb.x);
  return tlsd_detect(pb, cache, config);
}

TlsdResult tlsd_detect(const Problem& pb, const ProjectionCache& cache,
                       const TlsdConfig& config) {
  if (config.max_sweeps < 1) throw std::invalid_argument("tlsd: max_sweeps must be >= 1");
  const Constellation& c = pb.constellation;
  const int m = c.size();

  BeliefState beliefs = init_beliefs(pb, cache.singles());
  const std::vector<MetricTable> tables = metric_tables(cache.pairs(), pb.sigma2, c);

  std::vector<double> scratch(2 * static_cast<std::size_t>(m));
  std::vector<double> before(beliefs.storage().size());
  int resets = 0;
  int sweeps = 0;
  bool converged = false;
  for (int s = 0; s < config.max_sweeps; ++s) {
    before = beliefs.storage();
    for (const MetricTable& t : tables) pair_update_impl(beliefs, t, scratch, resets);
    ++sweeps;
    double delta = 0.0;
    const std::vector<double>& after = beliefs.storage();
    for (std::size_t k = 0; k < after.size(); ++k)
      delta = std::max(delta, std::abs(after[k] - before[k]));
    if (delta < config.tol) {
      converged = true;
      break;
    }
  }

  SymbolVector tlsd_hard = make_symbol_vector(argmax_indices(beliefs), c);
  const double r_tlsd = residual2(pb.H, pb.x, tlsd_hard.values);

  TlsdResult res{std::move(tlsd_hard), std::move(beliefs), Mat(), sweeps, converged,
                 ArbitrationWinner::kTlsd, resets};
  if (config.arbitrate_with_sic) {
    DetectorOutput sic = mmse_sic_detect(pb);
    if (sic.residual2 < r_tlsd) {  // ties keep the TLSD decision
      res.hard = std::move(sic.hard);
      res.winner = ArbitrationWinner::kMmseSic;
    }
  }
  res.bit_llrs = bit_llrs_from_beliefs(res.posteriors, c);
  if (resets > 0) log_debug("tlsd: %d belief vectors reset to uniform after underflow", resets);
  return res;
}

Mat bit_llrs_from_beliefs(const BeliefState& beliefs, const Constellation& c) {
  constexpr double kLlrClamp = 50.0;
  const int d = beliefs.dim();
  const int nbits = c.bits_per_symbol;
  Mat llrs(d, nbits);
  for (int i = 0; i < d; ++i) {
    auto th = beliefs.theta(i);
    for (int b = 0; b < nbits; ++b) {
      double p0 = 0.0;
      double p1 = 0.0;
      for (int k = 0; k < c.size(); ++k) {
        if (c.bit(k, b) == 0)
          p0 += th[k];
        else
          p1 += th[k];
      }
      const double llr = std::log(p0) - std::log(p1);  // +-inf when a side is empty
      llrs(i, b) = std::clamp(llr, -kLlrClamp, kLlrClamp);
    }
  }
  return llrs;
}

double pseudo_log_likelihood(const std::vector<PairProjection>& pairs, double sigma2,
                             std::span<const double> s_values) {
  double acc = 0.0;
  Vec r;
  for (const PairProjection& pp : pairs) {
    r = pp.x;
    axpy(-s_values[pp.i], pp.h_i, r);
    axpy(-s_values[pp.j], pp.h_j, r);
    acc += sq_norm(r);
  }
  return -acc / (2.0 * sigma2);
}

}  // namespace tomo
