#include "tomo/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace tomo {

double Constellation::energy() const {
  double s = 0.0;
  for (double a : symbols) s += a * a;
  return s / static_cast<double>(symbols.size());
}

int Constellation::slice_index(double v) const {
  int best = 0;
  double best_d = std::abs(v - symbols[0]);
  for (int k = 1; k < size(); ++k) {
    const double d = std::abs(v - symbols[k]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

int Constellation::bit(int symbol_index, int b) const {
  return static_cast<int>((labels[symbol_index] >> (bits_per_symbol - 1 - b)) & 1u);
}

Constellation make_constellation(int m) {
  if (m < 2 || (m & (m - 1)) != 0)
    throw std::invalid_argument("constellation size must be a power of two, at least 2");
  Constellation c;
  c.symbols.resize(m);
  c.labels.resize(m);
  for (int k = 0; k < m; ++k) {
    c.symbols[k] = static_cast<double>(2 * k - m + 1);
    c.labels[k] = static_cast<std::uint32_t>(k ^ (k >> 1));
  }
  c.bits_per_symbol = static_cast<int>(std::lround(std::log2(static_cast<double>(m))));
  return c;
}

}  // namespace tomo
