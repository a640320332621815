#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "tomo/constellation.hpp"
#include "tomo/linalg.hpp"
#include "tomo/rng.hpp"

namespace tomo {

// One detection instance of the linear Gaussian model x = H s + n with
// s drawn from a finite symbol set and n ~ N(0, sigma2 I).
struct Problem {
  Mat H;
  Vec x;
  double sigma2 = 0.0;
  Constellation constellation;

  Problem(Mat h, Vec x_in, double sigma2_in, Constellation c);

  int rx() const { return H.rows(); }  // p, receive dimension
  int tx() const { return H.cols(); }  // d, transmit dimension
};

// A candidate transmit vector: symbol indices into the constellation plus
// the corresponding amplitudes.
struct SymbolVector {
  std::vector<int> indices;
  Vec values;
};

SymbolVector make_symbol_vector(std::vector<int> indices, const Constellation& c);

// Complex matrix/vector used only at the model boundary; detection itself
// runs on the doubled real representation.
struct CMat {
  int rows = 0;
  int cols = 0;
  std::vector<std::complex<double>> a;

  CMat() = default;
  CMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}
  std::complex<double>& operator()(int r, int c) {
    return a[static_cast<std::size_t>(r) * cols + c];
  }
  std::complex<double> operator()(int r, int c) const {
    return a[static_cast<std::size_t>(r) * cols + c];
  }
};
using CVec = std::vector<std::complex<double>>;

// Doubled real form: H -> [[Re, -Im], [Im, Re]], x -> [Re; Im]. Complex
// multiplication commutes with the mapping, so norms of residuals carry
// over unchanged.
std::pair<Mat, Vec> complex_to_real(const CMat& hc, const CVec& xc);

// [Re; Im] stacking of a complex vector.
Vec realify(const CVec& v);

// p x d channel with i.i.d. N(0,1) entries drawn from the generator.
// Throws std::invalid_argument when p < d.
Mat sample_channel(Rng& rng, int p, int d);

// Noise variance per real component for a given SNR in dB:
// sigma2 = d * Es / 10^(snr/10), with Es the mean constellation energy.
// With unit-variance channel entries the received energy per antenna is
// d * Es, and N0 is identified with sigma2.
double sigma2_from_snr(double snr_db, const Constellation& c, int d);

}  // namespace tomo
