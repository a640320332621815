#include "tomo/model.hpp"

#include <cmath>
#include <stdexcept>

namespace tomo {

Problem::Problem(Mat h, Vec x_in, double sigma2_in, Constellation c)
    : H(std::move(h)), x(std::move(x_in)), sigma2(sigma2_in), constellation(std::move(c)) {
  if (H.cols() < 2) throw std::invalid_argument("problem: need at least two transmit streams");
  if (H.rows() < H.cols()) throw std::invalid_argument("problem: need p >= d");
  if (static_cast<int>(x.size()) != H.rows())
    throw std::invalid_argument("problem: x length does not match channel rows");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("problem: sigma2 must be positive");
  if (constellation.size() < 2) throw std::invalid_argument("problem: empty constellation");
}

SymbolVector make_symbol_vector(std::vector<int> indices, const Constellation& c) {
  SymbolVector s;
  s.values.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) s.values[i] = c.symbols[indices[i]];
  s.indices = std::move(indices);
  return s;
}

std::pair<Mat, Vec> complex_to_real(const CMat& hc, const CVec& xc) {
  const int pc = hc.rows;
  const int dc = hc.cols;
  if (static_cast<int>(xc.size()) != pc)
    throw std::invalid_argument("complex_to_real: size mismatch");
  Mat h(2 * pc, 2 * dc);
  for (int r = 0; r < pc; ++r) {
    for (int c = 0; c < dc; ++c) {
      const double re = hc(r, c).real();
      const double im = hc(r, c).imag();
      h(r, c) = re;
      h(r, c + dc) = -im;
      h(r + pc, c) = im;
      h(r + pc, c + dc) = re;
    }
  }
  return {std::move(h), realify(xc)};
}

Vec realify(const CVec& v) {
  const int n = static_cast<int>(v.size());
  Vec out(2 * n);
  for (int i = 0; i < n; ++i) {
    out[i] = v[i].real();
    out[i + n] = v[i].imag();
  }
  return out;
}

Mat sample_channel(Rng& rng, int p, int d) {
  if (p < d) throw std::invalid_argument("sample_channel: need p >= d");
  Mat h(p, d);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < d; ++c) h(r, c) = rng.next_gaussian();
  return h;
}

double sigma2_from_snr(double snr_db, const Constellation& c, int d) {
  if (d < 1) throw std::invalid_argument("sigma2_from_snr: d must be positive");
  return static_cast<double>(d) * c.energy() / std::pow(10.0, snr_db / 10.0);
}

}  // namespace tomo
